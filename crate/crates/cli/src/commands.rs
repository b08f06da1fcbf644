use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ghl_core::certify::{certify_batch, full_certify, Certificate, CertifyOptions};
use ghl_core::criteria::{exclude_degrees, ExcludeOptions, ExclusionRecord};
use ghl_core::ghl::{build_ghl, build_substituted};
use ghl_core::newton::{admissible_degrees, build_polygon};
use ghl_core::{GhlParams, IntegerPolynomial, SeedCoefficients};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{usage, CliConfig, CliError, CliResult};
use crate::render::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedChoice {
    Ones,
    Laguerre,
    #[value(name = "laguerre_scaled")]
    LaguerreScaled,
    /// Read `a_0..a_n` from `--seed-file`.
    Custom,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub u: i64,
    #[arg(long)]
    pub alpha: u64,
    /// Substitution exponent, 1 or d.
    #[arg(long, default_value_t = 1)]
    pub delta: u64,
    #[arg(long, value_enum, default_value_t = SeedChoice::Ones)]
    pub seed: SeedChoice,
    /// Coefficient file for `--seed custom`, one integer per line, a_0 first.
    #[arg(long)]
    pub seed_file: Option<PathBuf>,
}

impl FamilyArgs {
    pub fn params(&self, n: usize) -> CliResult<GhlParams> {
        Ok(GhlParams::new(self.d, self.u, self.alpha, n, self.delta)?)
    }

    pub fn seed(&self, n: usize) -> CliResult<SeedCoefficients> {
        let seed = match self.seed {
            SeedChoice::Ones => SeedCoefficients::ones(n)?,
            SeedChoice::Laguerre => SeedCoefficients::laguerre(n)?,
            SeedChoice::LaguerreScaled => SeedCoefficients::laguerre_scaled(n, self.d)?,
            SeedChoice::Custom => {
                let path = self
                    .seed_file
                    .as_ref()
                    .ok_or_else(|| usage("--seed custom needs --seed-file"))?;
                let poly = read_poly(path)?;
                SeedCoefficients::new(poly.into_coeffs())?
            }
        };
        if self.seed != SeedChoice::Custom && self.seed_file.is_some() {
            return Err(usage("--seed-file is only read with --seed custom"));
        }
        if seed.n() != n {
            return Err(ghl_core::Error::SeedLength { n, got: seed.n() + 1 }.into());
        }
        Ok(seed)
    }
}

pub fn read_poly(path: &PathBuf) -> CliResult<IntegerPolynomial> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    IntegerPolynomial::from_text(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub n: usize,
}

pub fn build(args: &BuildArgs) -> CliResult<Output> {
    let params = args.family.params(args.n)?;
    let seed = args.family.seed(args.n)?;
    let poly = if params.delta == 1 {
        build_ghl(&params, &seed)?
    } else {
        build_substituted(&params, &seed)?
    };
    let coefficients: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
    let mut tsv = String::from("j\tcoefficient\n");
    for (j, c) in coefficients.iter().enumerate() {
        let _ = writeln!(tsv, "{j}\t{c}");
    }
    let body = json!({
        "params": params,
        "seed": seed.kind(),
        "degree": poly.degree(),
        "coefficients": coefficients,
    });
    let mut out = Output::new(&body, tsv)?;
    out.text = Some(poly.to_text());
    Ok(out)
}

#[derive(Debug, Args)]
pub struct PolygonArgs {
    /// Coefficient file, lowest power first.
    pub file: PathBuf,
    #[arg(long, short)]
    pub p: u64,
    /// Also write an SVG drawing here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

pub fn polygon(args: &PolygonArgs) -> CliResult<Output> {
    let poly = read_poly(&args.file)?;
    let np = build_polygon(&poly, args.p)?;
    if let Some(path) = &args.svg {
        std::fs::write(path, np.to_svg())
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let body = json!({
        "prime": np.prime,
        "degree": np.degree,
        "vertices": np.vertices,
        "edges": np.edges,
        "segment_widths": np.segment_widths(),
        "admissible_degrees": admissible_degrees(&np),
    });
    Output::new(&body, np.to_tsv())
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, conflicts_with = "n_range", required_unless_present = "n_range")]
    pub n: Option<usize>,
    /// Inclusive batch range `A..B`, certified in parallel.
    #[arg(long, value_parser = parse_range)]
    pub n_range: Option<(usize, usize)>,
    /// Exit with status 1 unless every residual is empty.
    #[arg(long)]
    pub full: bool,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| format!("bad start {a:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad end {b:?}"))?;
    if a == 0 || a > b {
        return Err(format!("need 1 <= A <= B, got {a}..{b}"));
    }
    Ok((a, b))
}

/// Result of a command plus its exit status.
pub struct Outcome {
    pub output: Output,
    pub status: u8,
}

fn certificate_row(c: &Certificate) -> String {
    let p = &c.params;
    let residual: Vec<String> = c.residual.iter().map(|k| k.to_string()).collect();
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
        p.d,
        p.u,
        p.alpha,
        p.n,
        p.delta,
        tag(&c.seed),
        c.degree,
        tag(&c.verdict),
        if residual.is_empty() { "-".into() } else { residual.join(",") },
        c.family.unwrap_or("-"),
    )
}

fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => "?".into(),
    }
}

const CERT_HEADER: &str = "d\tu\talpha\tn\tdelta\tseed\tdegree\tverdict\tresidual\tfamily\n";

pub fn certify(args: &CertifyArgs, config: &CliConfig) -> CliResult<Outcome> {
    let options = CertifyOptions { primes: config.primes.clone(), strict: config.strict };
    let Some((lo, hi)) = args.n_range else {
        let n = args.n.expect("clap requires --n or --n-range");
        let params = args.family.params(n)?;
        let seed = args.family.seed(n)?;
        let cert = full_certify(&params, &seed, &options)?;
        cert.check_partition()?;
        let status = u8::from(args.full && !cert.residual.is_empty());
        let output = Output::new(&cert, format!("{CERT_HEADER}{}", certificate_row(&cert)))?;
        return Ok(Outcome { output, status });
    };
    if args.family.seed == SeedChoice::Custom {
        return Err(usage("a custom seed fixes n; use --n instead of --n-range"));
    }
    let jobs = (lo..=hi)
        .map(|n| Ok((args.family.params(n)?, args.family.seed(n)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let certs = certify_batch(&jobs, &options)
        .into_iter()
        .map(|r| {
            let c = r?;
            c.check_partition()?;
            Ok(c)
        })
        .collect::<Result<Vec<Certificate>, ghl_core::Error>>()
        .map_err(CliError::from)?;
    let mut tsv = String::from(CERT_HEADER);
    for c in &certs {
        tsv.push_str(&certificate_row(c));
    }
    let open = certs.iter().filter(|c| !c.residual.is_empty()).count();
    let status = u8::from(args.full && open > 0);
    let body = json!({ "count": certs.len(), "with_residual": open, "certificates": certs });
    Ok(Outcome { output: Output::new(&body, tsv)?, status })
}

#[derive(Debug, Args)]
pub struct ExcludeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub n: usize,
}

fn record_row(r: &ExclusionRecord) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\n",
        r.k_range[0],
        r.k_range[1],
        tag(&r.method),
        r.witness_prime.map_or("-".into(), |p| p.to_string()),
        r.complement_of.map_or("-".into(), |c| format!("{}-{}", c[0], c[1])),
    )
}

pub fn exclude(args: &ExcludeArgs, config: &CliConfig) -> CliResult<Output> {
    let params = args.family.params(args.n)?;
    let seed = args.family.seed(args.n)?;
    let report = exclude_degrees(&params, &seed, &ExcludeOptions { primes: config.primes.clone() })?;
    let mut tsv = String::from("from\tto\tmethod\tprime\tcomplement_of\n");
    for r in &report.records {
        tsv.push_str(&record_row(r));
    }
    let body = json!({
        "params": params,
        "seed": seed.kind(),
        "records": report.records,
        "unresolved": report.unresolved,
    });
    Output::new(&body, tsv)
}

//! Newton polygons with respect to a prime.
//!
//! Points are `(x, nu(a_{m-x}))`, so the leading coefficient sits at `x = 0` and the
//! constant term at `x = m`. Factor degrees are constrained at the granularity of
//! minimal lattice segments: an edge of width `w` and height `h` splits into
//! `gcd(w, |h|)` pieces of equal width, and every factor degree is a subset sum of
//! the piece widths.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ghl::{GhlParams, IntegerPolynomial, SeedCoefficients};
use crate::valuation::{self, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    #[serde(with = "crate::ratio_serde")]
    pub slope: Ratio<i64>,
    pub width: usize,
    pub height: i64,
    pub lattice_length: usize,
}

impl Edge {
    fn between(a: (usize, u64), b: (usize, u64)) -> Self {
        let width = b.0 - a.0;
        let height = b.1 as i64 - a.1 as i64;
        let lattice_length = if height == 0 {
            width
        } else {
            width.gcd(&(height.unsigned_abs() as usize))
        };
        Edge {
            slope: Ratio::new(height, width as i64),
            width,
            height,
            lattice_length,
        }
    }

    /// Width of one minimal lattice segment of this edge.
    pub fn segment_width(&self) -> usize {
        self.width / self.lattice_length
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub prime: u64,
    pub degree: usize,
    pub points: Vec<Valuation>,
    pub vertices: Vec<(usize, u64)>,
    pub edges: Vec<Edge>,
}

impl NewtonPolygon {
    /// Builds the polygon from `points[x] = nu(a_{m-x})`.
    ///
    /// Both endpoints must be finite; infinite points never enter the hull.
    pub fn from_valuations(prime: u64, points: Vec<Valuation>) -> Result<Self> {
        valuation::require_prime(prime)?;
        let degree = points.len().checked_sub(1).ok_or(Error::DegeneratePolynomial)?;
        if degree == 0 || points[0].is_infinite() || points[degree].is_infinite() {
            return Err(Error::DegeneratePolynomial);
        }
        let mut hull: Vec<(usize, u64)> = Vec::new();
        for (x, v) in points.iter().enumerate() {
            let Some(y) = v.finite() else { continue };
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // Drop the middle point unless (x1,y1) -> (x2,y2) -> (x,y) turns strictly left.
                let cross = (x2 as i128 - x1 as i128) * (y as i128 - y1 as i128)
                    - (y2 as i128 - y1 as i128) * (x as i128 - x1 as i128);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push((x, y));
        }
        let edges = hull.windows(2).map(|w| Edge::between(w[0], w[1])).collect();
        Ok(NewtonPolygon {
            prime,
            degree,
            points,
            vertices: hull,
            edges,
        })
    }

    pub fn vertex_xs(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.0).collect()
    }

    pub fn min_slope(&self) -> Ratio<i64> {
        self.edges[0].slope
    }

    pub fn max_slope(&self) -> Ratio<i64> {
        self.edges[self.edges.len() - 1].slope
    }

    /// Newton function at an integer abscissa.
    pub fn value_at(&self, x: usize) -> Result<Ratio<i64>> {
        self.evaluate(Ratio::from_integer(x as i64))
    }

    fn evaluate(&self, x: Ratio<i64>) -> Result<Ratio<i64>> {
        if x < Ratio::zero() || x > Ratio::from_integer(self.degree as i64) {
            return Err(Error::OutOfDomain {
                x: x.to_string(),
                max: self.degree,
            });
        }
        let idx = self
            .vertices
            .windows(2)
            .position(|w| x <= Ratio::from_integer(w[1].0 as i64))
            .unwrap_or(self.vertices.len() - 2);
        let (x0, y0) = self.vertices[idx];
        let edge = &self.edges[idx];
        Ok(Ratio::from_integer(y0 as i64) + edge.slope * (x - Ratio::from_integer(x0 as i64)))
    }

    /// Widths of all minimal lattice segments, left to right.
    pub fn segment_widths(&self) -> Vec<usize> {
        self.edges
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.segment_width(), e.lattice_length))
            .collect()
    }

    /// Whether `p` divides the leading coefficient.
    pub fn prime_divides_leading(&self) -> bool {
        self.points[0] != Valuation::Finite(0)
    }

    /// Tab-separated dump: header, then `x  y  is_vertex` per point.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("x\ty\tis_vertex\n");
        let mut vi = 0;
        for (x, y) in self.points.iter().enumerate() {
            let is_vertex = vi < self.vertices.len() && self.vertices[vi].0 == x;
            if is_vertex {
                vi += 1;
            }
            let _ = writeln!(out, "{x}\t{y}\t{}", u8::from(is_vertex));
        }
        out
    }

    /// Static SVG with points, hull and slope labels.
    pub fn to_svg(&self) -> String {
        const W: f64 = 800.0;
        const H: f64 = 500.0;
        const PAD: f64 = 40.0;
        let ymax = self
            .points
            .iter()
            .filter_map(|v| v.finite())
            .max()
            .unwrap_or(0)
            .max(1) as f64;
        let sx = |x: usize| PAD + (W - 2.0 * PAD) * x as f64 / self.degree as f64;
        let sy = |y: u64| H - PAD - (H - 2.0 * PAD) * y as f64 / ymax;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{PAD}" y="20" font-family="monospace" font-size="14">NP_{} degree {}</text>"#,
            self.prime, self.degree
        );
        for (x, y) in self.points.iter().enumerate() {
            if let Some(y) = y.finite() {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="gray"/>"#,
                    sx(x),
                    sy(y)
                );
            }
        }
        let path: Vec<String> = self
            .vertices
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        for (w, e) in self.vertices.windows(2).zip(&self.edges) {
            let mx = (sx(w[0].0) + sx(w[1].0)) / 2.0;
            let my = (sy(w[0].1) + sy(w[1].1)) / 2.0 - 6.0;
            let _ = writeln!(
                out,
                r#"<text x="{mx:.2}" y="{my:.2}" font-family="monospace" font-size="11" fill="blue">{}</text>"#,
                e.slope
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Polygon of an explicit polynomial.
pub fn build_polygon(poly: &IntegerPolynomial, p: u64) -> Result<NewtonPolygon> {
    valuation::require_prime(p)?;
    if poly.degree() == 0 || poly.constant().is_zero() {
        return Err(Error::DegeneratePolynomial);
    }
    let points = poly
        .coeffs()
        .iter()
        .rev()
        .map(|c| valuation::nu_big_unchecked(p, c))
        .collect();
    NewtonPolygon::from_valuations(p, points)
}

/// Polygon of `G(x^delta)` computed from the factored coefficients, never touching the
/// assembled big integers.
pub fn ghl_polygon(params: &GhlParams, seed: &SeedCoefficients, p: u64) -> Result<NewtonPolygon> {
    params.validate()?;
    valuation::require_prime(p)?;
    if seed.n() != params.n {
        return Err(Error::SeedLength {
            n: params.n,
            got: seed.values().len(),
        });
    }
    let n = params.n;
    let delta = params.delta as usize;
    let m = n * delta;
    let mut points = vec![Valuation::Infinite; m + 1];
    let mut tail = 0u64;
    for j in (0..=n).rev() {
        let v = valuation::nu_big_unchecked(p, &seed.values()[j]) + Valuation::Finite(tail);
        points[m - delta * j] = v;
        tail += valuation::ord_term(p, params, j as i64);
    }
    NewtonPolygon::from_valuations(p, points)
}

/// Newton function at an exact rational abscissa.
pub fn newton_function(np: &NewtonPolygon, x: Ratio<i64>) -> Result<Ratio<i64>> {
    np.evaluate(x)
}

/// Subset of `[0, m]` held as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorDegreeSet {
    m: usize,
    bits: Vec<u64>,
}

impl FactorDegreeSet {
    pub fn empty(m: usize) -> Self {
        Self {
            m,
            bits: vec![0; m / 64 + 1],
        }
    }

    pub fn full(m: usize) -> Self {
        let mut s = Self::empty(m);
        for k in 0..=m {
            s.insert(k);
        }
        s
    }

    /// All subset sums of `widths`, which must add up to `m`.
    pub fn subset_sums(m: usize, widths: &[usize]) -> Self {
        let mut s = Self::empty(m);
        s.insert(0);
        for &w in widths {
            s.or_shifted(w);
        }
        s
    }

    fn or_shifted(&mut self, w: usize) {
        let words = w / 64;
        let bits = w % 64;
        for i in (0..self.bits.len()).rev() {
            let mut v = 0u64;
            if i >= words {
                v = self.bits[i - words] << bits;
                if bits > 0 && i > words {
                    v |= self.bits[i - words - 1] >> (64 - bits);
                }
            }
            self.bits[i] |= v;
        }
        self.mask_tail();
    }

    fn mask_tail(&mut self) {
        let extra = (self.m + 1) % 64;
        if extra != 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= (1u64 << extra) - 1;
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains(&self, k: usize) -> bool {
        k <= self.m && self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn insert(&mut self, k: usize) {
        assert!(k <= self.m, "degree {k} outside [0, {}]", self.m);
        self.bits[k / 64] |= 1 << (k % 64);
    }

    pub fn remove(&mut self, k: usize) {
        if k <= self.m {
            self.bits[k / 64] &= !(1 << (k % 64));
        }
    }

    pub fn intersect_with(&mut self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DegreeMismatch(self.m, other.m));
        }
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.m).filter(|&k| self.contains(k))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Degrees in `[1, m-1]` that are not admissible.
    pub fn excluded_proper(&self) -> Vec<usize> {
        (1..self.m).filter(|&k| !self.contains(k)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..=self.m).all(|k| self.contains(k) == self.contains(self.m - k))
    }
}

impl Serialize for FactorDegreeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

/// Possible factor degrees allowed by the lattice segments of `np`.
pub fn admissible_degrees(np: &NewtonPolygon) -> FactorDegreeSet {
    FactorDegreeSet::subset_sums(np.degree, &np.segment_widths())
}

/// Intersection of the admissible sets of several polygons of one polynomial.
pub fn intersect_admissible(polys: &[NewtonPolygon]) -> Result<FactorDegreeSet> {
    let (first, rest) = polys.split_first().ok_or(Error::EmptyInput)?;
    let mut acc = admissible_degrees(first);
    for np in rest {
        acc.intersect_with(&admissible_degrees(np))?;
    }
    Ok(acc)
}

fn check_lemma_shape(np: &NewtonPolygon, k: usize, l: usize) -> Result<()> {
    if k == 0 || np.degree < 2 * k || k <= l {
        return Err(Error::DegreeTooSmall { m: np.degree, k, l });
    }
    if np.prime_divides_leading() {
        return Err(Error::PrimeDividesLeading(np.prime));
    }
    Ok(())
}

/// Both inequalities `g_p(k) > r` and `g_p(m) - g_p(m-k) < r + 1` on a prebuilt polygon.
pub fn lemma_r_on_polygon(np: &NewtonPolygon, k: usize, r: i64) -> Result<bool> {
    check_lemma_shape(np, k, 0)?;
    let r = Ratio::from_integer(r);
    let head = np.value_at(k)?;
    let tail = np.value_at(np.degree)? - np.value_at(np.degree - k)?;
    Ok(head > r && tail < r + 1)
}

/// The most permissive integer `r` for degree `k`: `ceil(g_p(k)) - 1`.
pub fn best_r(np: &NewtonPolygon, k: usize) -> Result<i64> {
    Ok(np.value_at(k)?.ceil().to_integer() - 1)
}

/// Applies the lemma with the best `r`; returns that `r` when it excludes degree `k`.
pub fn lemma_r_best(np: &NewtonPolygon, k: usize) -> Result<Option<i64>> {
    check_lemma_shape(np, k, 0)?;
    let r = best_r(np, k)?;
    Ok(lemma_r_on_polygon(np, k, r)?.then_some(r))
}

/// Whether every `sum a_j b_j x^j` with `p` coprime to `a_0 a_m` lacks a degree-`k`
/// factor, where `g = sum b_j x^j`. `seed_ok` is the caller's assertion about `a_0 a_m`.
pub fn lemma_r_excludes(
    g: &IntegerPolynomial,
    p: u64,
    k: usize,
    r: i64,
    seed_ok: bool,
) -> Result<bool> {
    if !seed_ok {
        return Err(Error::PrimeDividesSeed(p));
    }
    lemma_r_on_polygon(&build_polygon(g, p)?, k, r)
}

/// Degree window `[l+1, k]` test on a prebuilt polygon: `p` divides `b_j` for
/// `j <= m-l-1` and the rightmost slope is below `1/k`.
pub fn slope_window_on_polygon(np: &NewtonPolygon, l: usize, k: usize) -> Result<bool> {
    check_lemma_shape(np, k, l)?;
    let m = np.degree;
    let divisible = np.points[l + 1..=m].iter().all(|v| *v >= Valuation::Finite(1));
    Ok(divisible && np.max_slope() < Ratio::new(1, k as i64))
}

pub fn slope_window_excludes(
    g: &IntegerPolynomial,
    p: u64,
    l: usize,
    k: usize,
) -> Result<bool> {
    slope_window_on_polygon(&build_polygon(g, p)?, l, k)
}

/// `nu_p` of every coefficient of `poly`, lowest power first (test and CLI helper).
pub fn coefficient_valuations(poly: &IntegerPolynomial, p: u64) -> Result<Vec<Valuation>> {
    poly.coeffs().iter().map(|c| valuation::nu(p, c)).collect()
}

/// Converts an `i64` ratio to `f64` for display.
pub fn ratio_to_f64(r: &Ratio<i64>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

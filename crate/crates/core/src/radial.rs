//! Radial profiles.
//!
//! A plane field `f(x) = g(|x|²)` is stored through its profile `g`, a
//! function of the squared radius `r = |x|²`. Plane norms relate to
//! half-line norms by `‖f‖_{L²(ℝ²)} = √π ‖g‖_{L²(ℝ₊)}`.
//!
//! Profiles are either closed forms (`Σ c r^p e^{-β r}`) or samples on a
//! grid. Closed forms are kept symbolic as long as possible: the heat flow,
//! the Hankel-type transform and the Laguerre bases all map them to closed
//! forms again, and their inner products are exact sums evaluated in
//! double-double precision.

use crate::error::{Error, Result};
use crate::serde_num;
use crate::special::{factorial, QuadratureRule};
use crate::xprec::DoubleDouble;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// `c e^{-β r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    #[serde(with = "serde_num")]
    pub coefficient: f64,
    #[serde(with = "serde_num")]
    pub rate: f64,
}

/// `c r^p e^{-β r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyExpTerm {
    #[serde(with = "serde_num")]
    pub coefficient: f64,
    pub power: u32,
    #[serde(with = "serde_num")]
    pub rate: f64,
}

impl PolyExpTerm {
    pub fn new(coefficient: f64, power: u32, rate: f64) -> Self {
        Self { coefficient, power, rate }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if self.coefficient == 0.0 {
            return 0.0;
        }
        self.coefficient * r.powi(self.power as i32) * (-self.rate * r).exp()
    }
}

impl From<ExpTerm> for PolyExpTerm {
    fn from(t: ExpTerm) -> Self {
        Self { coefficient: t.coefficient, power: 0, rate: t.rate }
    }
}

/// Profile sampled on a grid, interpolated by a monotone (PCHIP) cubic and
/// extended beyond the last node by a single exponential.
#[derive(Debug, Clone)]
pub struct SampledProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    tail_rate: f64,
    slopes: OnceLock<Vec<f64>>,
}

impl PartialEq for SampledProfile {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values && self.tail_rate == other.tail_rate
    }
}

impl SampledProfile {
    /// Build a sampled profile. Without an explicit `tail_rate` the slowest
    /// decay rate seen between neighbouring samples over the last decade of
    /// the grid is used.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, tail_rate: Option<f64>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::invalid("sampled profile", "grid needs at least two points"));
        }
        if grid.len() != values.len() {
            return Err(Error::invalid(
                "sampled profile",
                format!("{} grid points but {} values", grid.len(), values.len()),
            ));
        }
        if !(grid[0] > 0.0) {
            return Err(Error::invalid("sampled profile", "grid must start at r > 0"));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid("sampled profile", "grid must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sampled profile", "values must be finite"));
        }
        let tail_rate = match tail_rate {
            Some(rate) => rate,
            None => estimate_tail_rate(&grid, &values)?,
        };
        if !(tail_rate > 0.0 && tail_rate.is_finite()) {
            return Err(Error::invalid("sampled profile", format!("tail rate must be positive, got {tail_rate}")));
        }
        Ok(Self { grid, values, tail_rate, slopes: OnceLock::new() })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_rate(&self) -> f64 {
        self.tail_rate
    }

    pub fn first(&self) -> (f64, f64) {
        (self.grid[0], self.values[0])
    }

    pub fn last(&self) -> (f64, f64) {
        let n = self.grid.len() - 1;
        (self.grid[n], self.values[n])
    }

    /// The exponential continuation `c e^{-λ r}` beyond the grid as a term.
    pub fn tail_term(&self) -> PolyExpTerm {
        let (r_end, v_end) = self.last();
        // Prefactor kept finite by folding e^{λ r_end} into log space when needed.
        let c = v_end * (self.tail_rate * r_end).exp();
        PolyExpTerm::new(c, 0, self.tail_rate)
    }

    fn slopes(&self) -> &[f64] {
        self.slopes.get_or_init(|| pchip_slopes(&self.grid, &self.values))
    }

    pub fn eval(&self, r: f64) -> f64 {
        let (r0, v0) = self.first();
        let (r_end, v_end) = self.last();
        if r <= r0 {
            return v0;
        }
        if r >= r_end {
            return v_end * (-self.tail_rate * (r - r_end)).exp();
        }
        let k = self.grid.partition_point(|&x| x <= r) - 1;
        let d = self.slopes();
        hermite(
            self.grid[k],
            self.grid[k + 1],
            self.values[k],
            self.values[k + 1],
            d[k],
            d[k + 1],
            r,
        )
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

// Fritsch-Carlson slopes with the shape-preserving three-point end rule.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    let edge = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() {
            0.0
        } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
            3.0 * m0
        } else {
            d
        }
    };
    d[0] = edge(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn estimate_tail_rate(grid: &[f64], values: &[f64]) -> Result<f64> {
    if values.iter().all(|&v| v == 0.0) {
        return Ok(1.0);
    }
    let r_end = grid[grid.len() - 1];
    let start = grid
        .partition_point(|&r| r < r_end / 10.0)
        .min(grid.len() - 2);
    let slowest = (start..grid.len() - 1)
        .filter(|&k| values[k] != 0.0 && values[k + 1] != 0.0)
        .map(|k| -(values[k + 1].abs() / values[k].abs()).ln() / (grid[k + 1] - grid[k]))
        .filter(|rate| *rate > 0.0 && rate.is_finite())
        .fold(f64::INFINITY, f64::min);
    if slowest.is_finite() {
        Ok(slowest)
    } else {
        Err(Error::invalid(
            "sampled profile",
            "samples do not decay over the last decade of the grid; supply a tail rate",
        ))
    }
}

/// A function `g` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub enum RadialProfile {
    /// `Σ c_i e^{-β_i r}`
    ExpMixture(Vec<ExpTerm>),
    /// `Σ c_i r^{p_i} e^{-β_i r}`
    PolyExpMixture(Vec<PolyExpTerm>),
    Sampled(SampledProfile),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ProfileRepr {
    ExpMixture {
        terms: Vec<ExpTerm>,
    },
    #[serde(rename = "polyexp_mixture")]
    PolyExpMixture {
        terms: Vec<PolyExpTerm>,
    },
    Sampled {
        #[serde(with = "serde_num::vec")]
        grid: Vec<f64>,
        #[serde(with = "serde_num::vec")]
        values: Vec<f64>,
        #[serde(with = "serde_num")]
        tail_rate: f64,
    },
}

impl TryFrom<ProfileRepr> for RadialProfile {
    type Error = Error;

    fn try_from(repr: ProfileRepr) -> Result<Self> {
        match repr {
            ProfileRepr::ExpMixture { terms } => {
                let p = RadialProfile::ExpMixture(terms);
                p.validate()?;
                Ok(p)
            }
            ProfileRepr::PolyExpMixture { terms } => RadialProfile::poly_exp_mixture(terms),
            ProfileRepr::Sampled { grid, values, tail_rate } => {
                SampledProfile::new(grid, values, Some(tail_rate)).map(RadialProfile::Sampled)
            }
        }
    }
}

impl From<RadialProfile> for ProfileRepr {
    fn from(p: RadialProfile) -> Self {
        match p {
            RadialProfile::ExpMixture(terms) => ProfileRepr::ExpMixture { terms },
            RadialProfile::PolyExpMixture(terms) => ProfileRepr::PolyExpMixture { terms },
            RadialProfile::Sampled(s) => ProfileRepr::Sampled {
                grid: s.grid,
                values: s.values,
                tail_rate: s.tail_rate,
            },
        }
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("profile", format!("decay rates must be positive and finite, got {rate}")))
    }
}

impl RadialProfile {
    pub fn zero() -> Self {
        RadialProfile::ExpMixture(Vec::new())
    }

    /// `Σ c e^{-β r}` from `(coefficient, rate)` pairs.
    pub fn exp_mixture<I: IntoIterator<Item = (f64, f64)>>(terms: I) -> Result<Self> {
        let terms: Vec<ExpTerm> = terms
            .into_iter()
            .map(|(coefficient, rate)| ExpTerm { coefficient, rate })
            .collect();
        let p = RadialProfile::ExpMixture(terms);
        p.validate()?;
        Ok(p)
    }

    pub fn poly_exp_mixture(terms: Vec<PolyExpTerm>) -> Result<Self> {
        let p = RadialProfile::PolyExpMixture(terms);
        p.validate()?;
        Ok(p)
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<f64>, tail_rate: Option<f64>) -> Result<Self> {
        SampledProfile::new(grid, values, tail_rate).map(RadialProfile::Sampled)
    }

    /// Check the representation invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::ExpMixture(terms) => {
                for t in terms {
                    check_rate(t.rate)?;
                    if !t.coefficient.is_finite() {
                        return Err(Error::invalid("profile", "coefficients must be finite"));
                    }
                }
                Ok(())
            }
            RadialProfile::PolyExpMixture(terms) => {
                for t in terms {
                    check_rate(t.rate)?;
                    if !t.coefficient.is_finite() {
                        return Err(Error::invalid("profile", "coefficients must be finite"));
                    }
                }
                Ok(())
            }
            RadialProfile::Sampled(_) => Ok(()),
        }
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, RadialProfile::Sampled(_))
    }

    /// Closed-form terms, with exponential terms promoted to power 0.
    pub fn closed_terms(&self) -> Option<Vec<PolyExpTerm>> {
        match self {
            RadialProfile::ExpMixture(terms) => Some(terms.iter().copied().map(Into::into).collect()),
            RadialProfile::PolyExpMixture(terms) => Some(terms.clone()),
            RadialProfile::Sampled(_) => None,
        }
    }

    /// Build the tightest closed representation of a list of terms: equal
    /// `(power, rate)` pairs are merged, zero terms dropped, and the result
    /// is an `ExpMixture` when every power is 0.
    pub fn from_terms(terms: Vec<PolyExpTerm>) -> Result<Self> {
        let mut merged: Vec<PolyExpTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.iter_mut().find(|m| m.power == t.power && m.rate == t.rate) {
                Some(m) => m.coefficient += t.coefficient,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        if merged.iter().all(|t| t.power == 0) {
            RadialProfile::exp_mixture(merged.into_iter().map(|t| (t.coefficient, t.rate)))
        } else {
            RadialProfile::poly_exp_mixture(merged)
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialProfile::ExpMixture(terms) => {
                terms.iter().map(|t| t.coefficient * (-t.rate * r).exp()).sum()
            }
            RadialProfile::PolyExpMixture(terms) => terms.iter().map(|t| t.eval(r)).sum(),
            RadialProfile::Sampled(s) => s.eval(r),
        }
    }

    /// `a · g`.
    pub fn scaled(&self, a: f64) -> Self {
        match self {
            RadialProfile::ExpMixture(terms) => RadialProfile::ExpMixture(
                terms.iter().map(|t| ExpTerm { coefficient: a * t.coefficient, ..*t }).collect(),
            ),
            RadialProfile::PolyExpMixture(terms) => RadialProfile::PolyExpMixture(
                terms.iter().map(|t| PolyExpTerm { coefficient: a * t.coefficient, ..*t }).collect(),
            ),
            RadialProfile::Sampled(s) => RadialProfile::Sampled(SampledProfile {
                grid: s.grid.clone(),
                values: s.values.iter().map(|v| a * v).collect(),
                tail_rate: s.tail_rate,
                slopes: OnceLock::new(),
            }),
        }
    }

    /// `a·g + b·h`. Closed forms combine symbolically; if either side is
    /// sampled the result is sampled on the other's grid (or the union of
    /// both grids).
    pub fn linear_combination(a: f64, g: &Self, b: f64, h: &Self) -> Result<Self> {
        match (g.closed_terms(), h.closed_terms()) {
            (Some(tg), Some(th)) => {
                let terms = tg
                    .into_iter()
                    .map(|t| PolyExpTerm { coefficient: a * t.coefficient, ..t })
                    .chain(th.into_iter().map(|t| PolyExpTerm { coefficient: b * t.coefficient, ..t }))
                    .collect();
                RadialProfile::from_terms(terms)
            }
            _ => {
                let grid = merged_grid(g, h);
                let values = grid.iter().map(|&r| a * g.eval(r) + b * h.eval(r)).collect();
                let rate = [g, h]
                    .iter()
                    .map(|p| p.slowest_rate())
                    .fold(f64::INFINITY, f64::min);
                RadialProfile::sampled(grid, values, Some(rate))
            }
        }
    }

    /// Slowest exponential decay rate present in the profile.
    pub fn slowest_rate(&self) -> f64 {
        match self {
            RadialProfile::Sampled(s) => s.tail_rate,
            _ => self
                .closed_terms()
                .unwrap_or_default()
                .iter()
                .filter(|t| t.coefficient != 0.0)
                .map(|t| t.rate)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `g(r) · e^{-t r}`.
    pub fn times_exp(&self, t: f64) -> Result<Self> {
        match self {
            RadialProfile::ExpMixture(terms) => RadialProfile::exp_mixture(
                terms.iter().map(|x| (x.coefficient, x.rate + t)),
            ),
            RadialProfile::PolyExpMixture(terms) => RadialProfile::poly_exp_mixture(
                terms.iter().map(|x| PolyExpTerm { rate: x.rate + t, ..*x }).collect(),
            ),
            RadialProfile::Sampled(s) => RadialProfile::sampled(
                s.grid.clone(),
                s.grid.iter().zip(&s.values).map(|(r, v)| v * (-t * r).exp()).collect(),
                Some(s.tail_rate + t),
            ),
        }
    }

    /// Sample onto a grid; the tail rate is the slowest rate of the source.
    pub fn sample_on(&self, grid: &[f64]) -> Result<Self> {
        let values = grid.iter().map(|&r| self.eval(r)).collect();
        let rate = self.slowest_rate();
        let rate = if rate.is_finite() { rate } else { 1.0 };
        RadialProfile::sampled(grid.to_vec(), values, Some(rate))
    }

    /// Upper bound for `∫_n^∞ |g(r)| dr`.
    pub fn tail_mass_bound(&self, n: f64) -> f64 {
        match self {
            RadialProfile::Sampled(s) => {
                let (r_end, _) = s.last();
                let c = s.tail_term();
                if n >= r_end {
                    c.coefficient.abs() * (-c.rate * n).exp() / c.rate
                } else {
                    // Bounded coarsely by the largest sample on [n, r_end] times the length,
                    // plus the exponential tail.
                    let k = s.grid.partition_point(|&r| r < n);
                    let vmax = s.values[k.saturating_sub(1)..]
                        .iter()
                        .fold(0.0f64, |m, v| m.max(v.abs()));
                    vmax * (r_end - n) + c.coefficient.abs() * (-c.rate * r_end).exp() / c.rate
                }
            }
            _ => self
                .closed_terms()
                .unwrap_or_default()
                .iter()
                .map(|t| t.coefficient.abs() * upper_incomplete_moment(t.power, t.rate, n))
                .sum(),
        }
    }

    /// Smallest `n` (found by doubling then bisection) with
    /// `∫_n^∞ |g| <= tol`, never below the end of a sampled grid.
    pub fn truncation_point(&self, tol: f64) -> f64 {
        let floor = match self {
            RadialProfile::Sampled(s) => s.last().0,
            _ => 0.0,
        };
        if self.tail_mass_bound(floor) <= tol {
            return floor;
        }
        let mut lo = floor;
        let mut hi = floor.max(1.0);
        while self.tail_mass_bound(hi) > tol {
            lo = hi;
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_mass_bound(mid) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// `∫_R^∞ r^p e^{-β r} dr = p!/β^{p+1} e^{-βR} Σ_{k≤p} (βR)^k/k!`.
pub fn upper_incomplete_moment(p: u32, beta: f64, big_r: f64) -> f64 {
    let x = beta * big_r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=p {
        term *= x / f64::from(k);
        sum += term;
    }
    factorial(p) / beta.powi(p as i32 + 1) * (-x).exp() * sum
}

fn merged_grid(g: &RadialProfile, h: &RadialProfile) -> Vec<f64> {
    let mut grid: Vec<f64> = [g, h]
        .iter()
        .filter_map(|p| match p {
            RadialProfile::Sampled(s) => Some(s.grid.iter().copied()),
            _ => None,
        })
        .flatten()
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// `Σ_ij a_i b_j (p_i+p_j)! / (β_i+β_j)^{p_i+p_j+1}` in double-double.
pub(crate) fn closed_inner_dd(a: &[PolyExpTerm], b: &[PolyExpTerm]) -> DoubleDouble {
    let mut total = DoubleDouble::ZERO;
    for s in a {
        for t in b {
            if s.coefficient == 0.0 || t.coefficient == 0.0 {
                continue;
            }
            let p = s.power + t.power;
            let rate = DoubleDouble::new(s.rate) + DoubleDouble::new(t.rate);
            let term = DoubleDouble::new(s.coefficient) * DoubleDouble::new(t.coefficient)
                * DoubleDouble::factorial(p)
                / rate.powi(p + 1);
            total += term;
        }
    }
    total
}

const BODY_ORDER: usize = 8;
const HEAD_ORDER: usize = 24;

/// `∫_0^∞ a(r) b(r) dr` where at least one side is sampled: exact
/// exponential tails, Gauss-Legendre on every grid interval, and a
/// constant continuation towards `r = 0`.
fn sampled_inner(a: &RadialProfile, b: &RadialProfile) -> f64 {
    let knots = merged_grid(a, b);
    let body = QuadratureRule::gauss_legendre(BODY_ORDER);
    let head_rule = QuadratureRule::gauss_legendre(HEAD_ORDER);
    let f = |r: f64| a.eval(r) * b.eval(r);
    let head = head_rule.apply_on(f, 0.0, knots[0]);
    let mid: f64 = knots.windows(2).map(|w| body.apply_on(f, w[0], w[1])).sum();
    let r_end = knots[knots.len() - 1];
    let tail_terms = |p: &RadialProfile| -> Vec<PolyExpTerm> {
        match p {
            RadialProfile::Sampled(s) => vec![s.tail_term()],
            other => other.closed_terms().unwrap_or_default(),
        }
    };
    let (ta, tb) = (tail_terms(a), tail_terms(b));
    let mut tail = 0.0;
    for s in &ta {
        for t in &tb {
            tail += s.coefficient
                * t.coefficient
                * upper_incomplete_moment(s.power + t.power, s.rate + t.rate, r_end);
        }
    }
    head + mid + tail
}

/// `⟨a, b⟩_{L²(ℝ₊)}`.
pub fn inner_product(a: &RadialProfile, b: &RadialProfile) -> f64 {
    match (a.closed_terms(), b.closed_terms()) {
        (Some(ta), Some(tb)) => closed_inner_dd(&ta, &tb).to_f64(),
        _ => sampled_inner(a, b),
    }
}

/// `∫_0^∞ r^n g(r) dr`.
pub fn moment_integral(g: &RadialProfile, n: u32) -> f64 {
    match g {
        RadialProfile::Sampled(s) => {
            let (r0, v0) = s.first();
            let head = v0 * r0.powi(n as i32 + 1) / f64::from(n + 1);
            // r^n times a cubic is a polynomial of degree n + 3
            let rule = QuadratureRule::gauss_legendre(((n as usize + 4) / 2 + 1).max(BODY_ORDER));
            let body: f64 = s
                .grid
                .windows(2)
                .map(|w| rule.apply_on(|r| r.powi(n as i32) * s.eval(r), w[0], w[1]))
                .sum();
            let tail = s.tail_term();
            let (r_end, _) = s.last();
            head + body + tail.coefficient * upper_incomplete_moment(n, tail.rate, r_end)
        }
        _ => g
            .closed_terms()
            .unwrap_or_default()
            .iter()
            .map(|t| {
                let p = t.power + n;
                DoubleDouble::new(t.coefficient) * DoubleDouble::factorial(p)
                    / DoubleDouble::new(t.rate).powi(p + 1)
            })
            .sum::<DoubleDouble>()
            .to_f64(),
    }
}

/// `‖g‖_{L²(ℝ₊)}`.
pub fn l2_norm_halfline(g: &RadialProfile) -> f64 {
    inner_product(g, g).max(0.0).sqrt()
}

/// `‖a - b‖_{L²(ℝ₊)}`, computed without forming the norms separately.
pub fn l2_distance(a: &RadialProfile, b: &RadialProfile) -> Result<f64> {
    let diff = RadialProfile::linear_combination(1.0, a, -1.0, b)?;
    Ok(l2_norm_halfline(&diff))
}

/// `n` log-spaced points on `[start, end]`.
pub fn log_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && start > 0.0 && end > start);
    let (la, lb) = (start.ln(), end.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                end
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// A radial plane field `f(x) = g(|x|²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneFieldRadial {
    pub profile: RadialProfile,
}

impl PlaneFieldRadial {
    pub fn new(profile: RadialProfile) -> Self {
        Self { profile }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.profile.eval(x1 * x1 + x2 * x2)
    }

    /// `‖f‖_{L²(ℝ²)} = √π ‖g‖`.
    pub fn l2_norm(&self) -> f64 {
        PI.sqrt() * l2_norm_halfline(&self.profile)
    }
}

/// The radial reduction `f ↦ g`. On this representation it is the identity
/// on the stored profile.
pub fn psi_forward(f: &PlaneFieldRadial) -> RadialProfile {
    f.profile.clone()
}

/// Inverse of [`psi_forward`].
pub fn psi_inverse(g: &RadialProfile) -> PlaneFieldRadial {
    PlaneFieldRadial::new(g.clone())
}

//! Piecewise-constant controls, the synthesis of controls from basis
//! coefficients, and the moment and growth checks a reachable target must
//! pass.

use crate::basis::{binomial_transform_dd, coefficients_dd, BasisContext, CoefficientVector, MAX_ORDER};
use crate::error::{Error, Result};
use crate::radial::{PlaneFieldRadial, RadialProfile};
use crate::serde_num;
use crate::special::{binomial, factorial, QuadratureRule};
use crate::xprec::{CompensatedSum, DoubleDouble};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A piecewise-constant function on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ControlRepr", into = "ControlRepr")]
pub struct Control {
    t: f64,
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ControlRepr {
    #[serde(rename = "T", with = "serde_num")]
    t: f64,
    #[serde(with = "serde_num::vec")]
    breakpoints: Vec<f64>,
    #[serde(with = "serde_num::vec")]
    levels: Vec<f64>,
}

impl TryFrom<ControlRepr> for Control {
    type Error = Error;

    fn try_from(r: ControlRepr) -> Result<Self> {
        Control::new(r.t, r.breakpoints, r.levels)
    }
}

impl From<Control> for ControlRepr {
    fn from(c: Control) -> Self {
        Self { t: c.t, breakpoints: c.breakpoints, levels: c.levels }
    }
}

impl Control {
    pub fn new(t: f64, breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid("control", format!("horizon must be positive, got {t}")));
        }
        if breakpoints.len() < 2 || levels.len() + 1 != breakpoints.len() {
            return Err(Error::invalid(
                "control",
                format!(
                    "{} breakpoints need {} levels, got {}",
                    breakpoints.len(),
                    breakpoints.len().saturating_sub(1),
                    levels.len()
                ),
            ));
        }
        if breakpoints[0] != 0.0 || breakpoints[breakpoints.len() - 1] != t {
            return Err(Error::invalid("control", "breakpoints must start at 0 and end at T"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("control", "breakpoints must be strictly increasing"));
        }
        if levels.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("control", "levels must be finite"));
        }
        Ok(Self { t, breakpoints, levels })
    }

    /// `u ≡ c` on `[0, T]`.
    pub fn constant(t: f64, c: f64) -> Result<Self> {
        Control::new(t, vec![0.0, t], vec![c])
    }

    pub fn zero(t: f64) -> Result<Self> {
        Control::constant(t, 0.0)
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// `(t_start, t_end, level)` for each interval.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.levels)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn sup_norm(&self) -> f64 {
        self.levels.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value at `t`; at a breakpoint the right-hand interval wins.
    pub fn level_at(&self, t: f64) -> f64 {
        if !(0.0..=self.t).contains(&t) {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&b| b <= t);
        self.levels[k.saturating_sub(1).min(self.levels.len() - 1)]
    }

    /// `a·u + b·v` for controls on the same breakpoints.
    pub fn linear_combination(a: f64, u: &Control, b: f64, v: &Control) -> Result<Control> {
        if u.t != v.t || u.breakpoints != v.breakpoints {
            return Err(Error::precondition("controls must share horizon and breakpoints"));
        }
        let levels = u.levels.iter().zip(&v.levels).map(|(x, y)| a * x + b * y).collect();
        Control::new(u.t, u.breakpoints.clone(), levels)
    }
}

/// Moments `γ_0..γ_N` generated on the horizon `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    #[serde(rename = "T", with = "serde_num")]
    pub t: f64,
    #[serde(with = "serde_num::vec")]
    pub values: Vec<f64>,
}

fn lattice(j: u32, l: u32) -> f64 {
    f64::from(j) / f64::from(l)
}

fn staircase(t: f64, l: u32, inner_levels: Vec<f64>) -> Result<Control> {
    let steps = inner_levels.len() as u32;
    let mut breakpoints: Vec<f64> = (0..=steps).map(|j| lattice(j, l)).collect();
    let mut levels = inner_levels;
    if breakpoints[steps as usize] < t {
        breakpoints.push(t);
        levels.push(0.0);
    }
    Control::new(t, breakpoints, levels)
}

/// The staircase `u_l^n`: `(-1)^{n-j} C(n,j) l^{n+1}` on `(j/l, (j+1)/l)`
/// for `j = 0..=n`, zero afterwards. It tends to `(-1)^n δ^{(n)}` as `l → ∞`.
pub fn mollified_delta_derivative(n: u32, l: u32, t: f64) -> Result<Control> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("horizon must be positive, got {t}")));
    }
    if l == 0 || lattice(n + 1, l) > t {
        return Err(Error::precondition(format!(
            "support (n+1)/l = {} exceeds the horizon {t}",
            f64::from(n + 1) / f64::from(l)
        )));
    }
    let height = f64::from(l).powi(n as i32 + 1);
    let levels = (0..=n)
        .map(|j| {
            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n, j) * height
        })
        .collect();
    staircase(t, l, levels)
}

/// The synthesis parameters together with the coefficients they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisPlan {
    pub t: f64,
    pub n: u32,
    pub l: u32,
    pub coefficients: CoefficientVector,
    g_dd: Vec<DoubleDouble>,
}

impl SynthesisPlan {
    pub fn new(g: &RadialProfile, t: f64, n: u32, l: u32) -> Result<Self> {
        let ctx = BasisContext::new(t)?;
        if l == 0 || f64::from(l) * t <= f64::from(n + 1) {
            return Err(Error::precondition(format!("need l > (N+1)/T, got N = {n}, l = {l}, T = {t}")));
        }
        if n > MAX_ORDER {
            return Err(Error::precondition(format!("order {n} exceeds the supported maximum {MAX_ORDER}")));
        }
        let g_dd = coefficients_dd(g, ctx, n);
        let d = binomial_transform_dd(&g_dd);
        let coefficients = CoefficientVector {
            t,
            g_coeffs: g_dd.iter().map(|x| x.to_f64()).collect(),
            d_coeffs: d.iter().map(|x| x.to_f64()).collect(),
        };
        Ok(Self { t, n, l, coefficients, g_dd })
    }

    /// Weights `c_k = -√(2T) π (-1)^k (2T)^k d_k / k!` of `u_l^k` in the control.
    pub fn staircase_weights(&self) -> Vec<f64> {
        self.weights_dd().iter().map(|x| x.to_f64()).collect()
    }

    fn weights_dd(&self) -> Vec<DoubleDouble> {
        let two_t = DoubleDouble::new(2.0 * self.t);
        let d = binomial_transform_dd(&self.g_dd);
        let front = -(two_t.sqrt() * DoubleDouble::new(PI));
        d.iter()
            .enumerate()
            .map(|(k, &dk)| {
                let k = k as u32;
                let w = front * two_t.powi(k) * dk / DoubleDouble::factorial(k);
                if k % 2 == 0 {
                    w
                } else {
                    -w
                }
            })
            .collect()
    }

    /// `Σ_k c_k u_l^k`, flattened onto the lattice `j/l`. The level on
    /// `(j/l, (j+1)/l)` is `Σ_{k≥j} c_k (-1)^{k-j} C(k,j) l^{k+1}`.
    pub fn control(&self) -> Result<Control> {
        let c = self.weights_dd();
        let l = DoubleDouble::new(f64::from(self.l));
        let levels = (0..=self.n)
            .map(|j| {
                (j..=self.n)
                    .map(|k| {
                        let x = c[k as usize] * DoubleDouble::binomial(k, j) * l.powi(k + 1);
                        if (k - j) % 2 == 0 {
                            x
                        } else {
                            -x
                        }
                    })
                    .sum::<DoubleDouble>()
                    .to_f64()
            })
            .collect();
        staircase(self.t, self.l, levels)
    }
}

/// The control `𝒰_l^N` steering towards `g` (requires `l > (N+1)/T`).
pub fn synthesize(g: &RadialProfile, t: f64, n: u32, l: u32) -> Result<Control> {
    SynthesisPlan::new(g, t, n, l)?.control()
}

fn check_moment_count(n: u32) -> Result<()> {
    if n > MAX_ORDER {
        Err(Error::precondition(format!("moment count {n} exceeds the supported maximum {MAX_ORDER}")))
    } else {
        Ok(())
    }
}

/// `γ_n = -π/(2^{2n+1} n!) ∫_0^∞ r^n g(r) dr` for `n = 0..=N`.
pub fn gamma_moments(g: &RadialProfile, t: f64, n_max: u32) -> Result<MomentSequence> {
    BasisContext::new(t)?;
    check_moment_count(n_max)?;
    let values = (0..=n_max)
        .map(|n| {
            let m = crate::radial::moment_integral(g, n);
            -PI / (4f64.powi(n as i32) * 2.0 * factorial(n)) * m
        })
        .collect();
    Ok(MomentSequence { t, values })
}

/// `ω_n = -2 n!/(2n)! ∫∫_{x₁,x₂>0} x₁^{2n} f(x) dx` by tensor Gauss-Legendre
/// quadrature in the plane, refined until two successive panel counts agree
/// to `tol` relative.
pub fn omega_moments(f: &PlaneFieldRadial, t: f64, n_max: u32, tol: f64) -> Result<MomentSequence> {
    BasisContext::new(t)?;
    check_moment_count(n_max)?;
    let g = &f.profile;
    let reach = plane_extent(g, n_max);
    if reach == 0.0 {
        return Ok(MomentSequence { t, values: vec![0.0; n_max as usize + 1] });
    }
    let rule = QuadratureRule::gauss_legendre(16);
    let mut panels = 8usize;
    let mut coarse = tensor_moments(g, &rule, reach, panels, n_max);
    loop {
        panels *= 2;
        let fine = tensor_moments(g, &rule, reach, panels, n_max);
        let worst = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        if worst <= tol {
            let values = fine
                .iter()
                .enumerate()
                .map(|(n, s)| {
                    let n = n as u32;
                    -2.0 * factorial(n) / factorial(2 * n) * s
                })
                .collect();
            return Ok(MomentSequence { t, values });
        }
        if panels >= 256 {
            return Err(Error::NonConvergence {
                what: "plane moment quadrature".into(),
                estimate: worst,
                tol,
            });
        }
        coarse = fine;
    }
}

// Edge length X of the square [0, X]² outside of which r^{n+1} |g(r)| is
// negligible, found by scanning along a ray.
fn plane_extent(g: &RadialProfile, n_max: u32) -> f64 {
    let weight = |r: f64| r.powi(n_max as i32 + 1) * g.eval(r).abs();
    let peak = (0..400)
        .map(|i| weight(1e-3 * 1.05f64.powi(i)))
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let mut r = 1.0;
    loop {
        let tail_max = (0..32)
            .map(|i| weight(r * (1.0 + f64::from(i) / 16.0)))
            .fold(0.0, f64::max);
        if tail_max <= 1e-17 * peak || r > 1e8 {
            return r.sqrt();
        }
        r *= 2.0;
    }
}

fn tensor_moments(g: &RadialProfile, rule: &QuadratureRule, reach: f64, panels: usize, n_max: u32) -> Vec<f64> {
    let h = reach / panels as f64;
    let mut xs = Vec::with_capacity(panels * rule.order());
    let mut ws = Vec::with_capacity(panels * rule.order());
    for p in 0..panels {
        let a = p as f64 * h;
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            xs.push(a + 0.5 * h * (x + 1.0));
            ws.push(0.5 * h * w);
        }
    }
    let mut sums = vec![CompensatedSum::new(); n_max as usize + 1];
    for (&x1, &w1) in xs.iter().zip(&ws) {
        let inner: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(&x2, &w2)| w2 * g.eval(x1 * x1 + x2 * x2))
            .sum();
        let mut power = w1 * inner;
        for s in sums.iter_mut() {
            s.add(power);
            power *= x1 * x1;
        }
    }
    sums.iter().map(|s| s.value()).collect()
}

// x^m - y^m = (x - y) Σ_i x^i y^{m-1-i}, avoiding cancellation for x ≈ y.
fn power_difference(x: f64, y: f64, m: u32) -> f64 {
    let mut s = 0.0;
    for i in 0..m {
        s += x.powi(i as i32) * y.powi((m - 1 - i) as i32);
    }
    (x - y) * s
}

/// `γ_n^u = ∫_0^T ξ^n u(T-ξ) dξ`, exactly per segment.
pub fn control_moments(u: &Control, n_max: u32) -> Result<MomentSequence> {
    check_moment_count(n_max)?;
    let t = u.t;
    let values = (0..=n_max)
        .map(|n| {
            let mut acc = CompensatedSum::new();
            for (a, b, level) in u.segments() {
                if level != 0.0 {
                    acc.add(level * power_difference(t - a, t - b, n + 1) / f64::from(n + 1));
                }
            }
            acc.value()
        })
        .collect();
    Ok(MomentSequence { t, values })
}

/// Default grid for [`necessary_condition`]: 400 log-spaced points on `[1e-4·T, 40·T]`.
pub fn default_condition_grid(t: f64) -> Vec<f64> {
    crate::radial::log_grid(1e-4 * t, 40.0 * t, 400)
}

/// `sup_{r ∈ grid} |g(r)| e^{r/(4T)} / ln(1 + 4T/r)`. A profile reachable with
/// controls bounded by `L` keeps this below `L/(2π)`.
pub fn necessary_condition(g: &RadialProfile, t: f64, grid: &[f64]) -> Result<f64> {
    BasisContext::new(t)?;
    if grid.is_empty() || grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::precondition("condition grid must be non-empty with positive points"));
    }
    Ok(grid
        .iter()
        .map(|&r| {
            let v = g.eval(r).abs();
            if v == 0.0 {
                0.0
            } else {
                // e^{r/4T} |g| computed in log space to survive tiny |g| at large r
                (v.ln() + r / (4.0 * t)).exp() / (4.0 * t / r).ln_1p()
            }
        })
        .fold(0.0, f64::max))
}

fn expm1_complex(w: Complex64) -> Complex64 {
    // e^{x+iy} - 1 = e^x (cos y - 1 + i sin y) + (e^x - 1), with cos y - 1 = -2 sin²(y/2)
    let (x, y) = (w.re, w.im);
    let ex = x.exp();
    let half = (0.5 * y).sin();
    Complex64::new(ex * (-2.0 * half * half) + x.exp_m1(), ex * y.sin())
}

// (e^w - 1)/w
fn expm1_over_w(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) + w * (0.5 + w * (1.0 / 6.0 + w / 24.0))
    } else {
        expm1_complex(w) / w
    }
}

/// `G_e(z) = -(1/π) ∫_0^T e^{-ξz} u(T-ξ) dξ`, the entire extension of the
/// transformed end state; closed form on every segment.
pub fn entire_eval(u: &Control, z: Complex64) -> Complex64 {
    let t = u.t;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b, level) in u.segments() {
        if level == 0.0 {
            continue;
        }
        // ξ runs over (T - b, T - a)
        let lo = t - b;
        let width = b - a;
        acc += level * (-lo * z).exp() * width * expm1_over_w(-width * z);
    }
    -acc / PI
}

/// `(L/π)(e^{T|z|} - 1)/|z|`, with the limit `LT/π` at `z = 0`.
pub fn entire_bound(l: f64, t: f64, z: Complex64) -> f64 {
    let a = z.norm();
    l / PI * t * crate::special::expm1_over_x(t * a)
}

/// `M (2π)^{3/2} T^{n+1}`, bounding `|γ_n|` of a profile whose necessary
/// condition supremum is `M`.
pub fn gamma_bound(m: f64, t: f64, n: u32) -> f64 {
    m * (2.0 * PI).powf(1.5) * t.powi(n as i32 + 1)
}

/// `L T^{n+1}/(n+1)`, bounding `|γ_n^u|` for `‖u‖_∞ ≤ L`.
pub fn control_moment_bound(l: f64, t: f64, n: u32) -> f64 {
    l * t.powi(n as i32 + 1) / f64::from(n + 1)
}

/// `C_n = T(M(2π)^{3/2} + L/(n+1))`, so that `|γ_n - γ_n^u| ≤ π C_n T^n`.
/// The constant depends on `n`.
pub fn matching_constant(m: f64, l: f64, t: f64, n: u32) -> f64 {
    t * (m * (2.0 * PI).powf(1.5) + l / f64::from(n + 1))
}

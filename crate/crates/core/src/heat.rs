//! Radial solutions of the controlled heat equation.
//!
//! The end state splits into the free evolution of the initial datum and
//! the controlled term
//!
//! ```text
//! 𝒴_u(r,t) = -(1/π) ∫_0^t (1/(2ξ)) e^{-r/(4ξ)} u(t-ξ) dξ.
//! ```
//!
//! For a piecewise-constant `u` the substitution `y = r/(4ξ)` turns each
//! segment into a difference of exponential integrals, so no time
//! quadrature (and no treatment of the `ξ → 0` singularity) is needed.

use crate::basis::{expand, truncation_tail, BasisContext};
use crate::control::Control;
use crate::error::{Error, Result};
use crate::radial::{l2_norm_halfline, log_grid, RadialProfile};
use crate::serde_num;
use crate::special::{e1_unchecked, ln_factorial, QuadratureRule};
use crate::transform::phi;
use crate::xprec::CompensatedSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Points in the default residual grid.
pub const DEFAULT_GRID_POINTS: usize = 600;

/// `n` log-spaced points on `[1e-4·T, 60·T]`.
pub fn residual_grid(t: f64, n: usize) -> Vec<f64> {
    log_grid(1e-4 * t, 60.0 * t, n)
}

/// Profile of the free heat flow after time `t`. Gaussians map to
/// Gaussians, `c e^{-βr} ↦ c/(1+4βt) e^{-βr/(1+4βt)}`; other profiles go
/// through the multiplier `e^{-tρ}` on the transform side.
pub fn free_evolution(g0: &RadialProfile, t: f64) -> Result<RadialProfile> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::precondition(format!("evolution time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(g0.clone());
    }
    match g0 {
        RadialProfile::ExpMixture(terms) => RadialProfile::exp_mixture(terms.iter().map(|x| {
            let s = 1.0 + 4.0 * x.rate * t;
            (x.coefficient / s, x.rate / s)
        })),
        _ => phi(&phi(g0)?.times_exp(t)?),
    }
}

static SEGMENT_RULE: OnceLock<QuadratureRule> = OnceLock::new();

// ∫_a^b (1/(2ξ)) e^{-r/(4ξ)} dξ = ½ ∫_{r/4b}^{r/4a} e^{-y}/y dy
fn segment_weight(r: f64, a: f64, b: f64) -> f64 {
    let xb = r / (4.0 * b);
    if a <= 0.0 {
        return 0.5 * e1_unchecked(xb);
    }
    let xa = r / (4.0 * a);
    let width = xa - xb;
    if xa <= 2.0 * xb && width <= 1.0 {
        // Short interval: the E_1 difference would cancel, integrate directly.
        let rule = SEGMENT_RULE.get_or_init(|| QuadratureRule::gauss_legendre(16));
        let scale = (-xb).exp();
        0.5 * scale * rule.apply_on(|s| (-s).exp() / (xb + s), 0.0, width)
    } else {
        0.5 * (e1_unchecked(xb) - e1_unchecked(xa))
    }
}

/// `𝒴_u(r, t)` for `0 < t ≤ T` and `r > 0`.
pub fn controlled_term(u: &Control, t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0 && t <= u.horizon()) {
        return Err(Error::precondition(format!(
            "time {t} outside (0, {}]",
            u.horizon()
        )));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius variable must be positive, got {r}")));
    }
    Ok(controlled_term_unchecked(u, t, r))
}

fn controlled_term_unchecked(u: &Control, t: f64, r: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for (s0, s1, level) in u.segments() {
        if level == 0.0 || s0 >= t {
            continue;
        }
        // control time s ∈ (s0, min(s1, t)) ↦ ξ = t - s
        let lo = if s1 >= t { 0.0 } else { t - s1 };
        let hi = t - s0;
        acc.add(level * segment_weight(r, lo, hi));
    }
    -acc.value() / PI
}

/// `𝒴_u(·, t)` sampled on `grid` (evaluated in parallel).
pub fn controlled_profile(u: &Control, t: f64, grid: &[f64]) -> Result<RadialProfile> {
    controlled_term(u, t, grid[0])?;
    let values: Vec<f64> = grid.par_iter().map(|&r| controlled_term_unchecked(u, t, r)).collect();
    let rate = 1.0 / (4.0 * t);
    RadialProfile::sampled(grid.to_vec(), values, Some(rate))
}

/// Profile of the end state at time `T`: free evolution of `g0` plus the
/// controlled term, sampled on `grid`.
pub fn end_state(u: &Control, g0: &RadialProfile, t: f64, grid: &[f64]) -> Result<RadialProfile> {
    if t > u.horizon() || !(t > 0.0) {
        return Err(Error::precondition(format!(
            "control is defined on [0, {}], cannot evaluate at T = {t}",
            u.horizon()
        )));
    }
    if grid.is_empty() || grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::precondition("grid must be non-empty with positive points"));
    }
    let free = free_evolution(g0, t)?;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&r| free.eval(r) + controlled_term_unchecked(u, t, r))
        .collect();
    let mut rate = f64::INFINITY;
    if u.sup_norm() > 0.0 {
        rate = 1.0 / (4.0 * t);
    }
    rate = rate.min(free.slowest_rate());
    if !rate.is_finite() {
        rate = 1.0 / (4.0 * t);
    }
    RadialProfile::sampled(grid.to_vec(), values, Some(rate))
}

/// `‖v‖_{L²(ℝ₊)}` from samples: trapezoid rule on the grid, the constant
/// `v_0` on `(0, r_0)` and an exponential tail `v_end e^{-λ(r - r_end)}`.
pub fn grid_l2_norm(grid: &[f64], values: &[f64], tail_rate: f64) -> f64 {
    let n = grid.len();
    let head = grid[0] * values[0] * values[0];
    let body: f64 = (0..n - 1)
        .map(|i| 0.5 * (grid[i + 1] - grid[i]) * (values[i] * values[i] + values[i + 1] * values[i + 1]))
        .sum();
    let tail = values[n - 1] * values[n - 1] / (2.0 * tail_rate);
    (head + body + tail).sqrt()
}

/// The two terms of the a priori residual bound for the synthesized control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// `(Σ_{n>N} g_n²)^{1/2}`
    #[serde(with = "serde_num")]
    pub tail_term: f64,
    /// `(√T/(4l)) Σ_k T^k √((2k+2)!)/(T-(k+1)/l)^{k+3/2} · (k+1)/k! · |d_k|`
    #[serde(with = "serde_num")]
    pub mollification_term: f64,
    #[serde(with = "serde_num")]
    pub total: f64,
}

/// Error budget for steering towards `g` with `𝒰_l^N`.
pub fn error_budget(g: &RadialProfile, t: f64, n: u32, l: u32) -> Result<ErrorBudget> {
    let ctx = BasisContext::new(t)?;
    let lf = f64::from(l);
    if l == 0 || lf * t <= f64::from(n + 1) {
        return Err(Error::precondition(format!("need l > (N+1)/T, got N = {n}, l = {l}, T = {t}")));
    }
    let tail_term = truncation_tail(g, ctx, n)?;
    let coeffs = expand(g, ctx, n)?;
    let mut acc = CompensatedSum::new();
    for (k, d) in coeffs.d_coeffs.iter().enumerate() {
        if *d == 0.0 {
            continue;
        }
        let k32 = k as u32;
        let kf = k as f64;
        let gap = t - (kf + 1.0) / lf;
        let log = kf * t.ln() + 0.5 * ln_factorial(2 * k32 + 2) - (kf + 1.5) * gap.ln()
            + (kf + 1.0).ln()
            - ln_factorial(k32)
            + d.abs().ln();
        acc.add(log.exp());
    }
    let mollification_term = t.sqrt() / (4.0 * lf) * acc.value();
    Ok(ErrorBudget { tail_term, mollification_term, total: tail_term + mollification_term })
}

/// Measured and predicted distance between a target and the end state a
/// control reaches from rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndStateReport {
    #[serde(with = "serde_num")]
    pub target_norm: f64,
    /// `‖g - 𝒴_u(·,T)‖_{L²(ℝ₊)}`
    #[serde(with = "serde_num")]
    pub residual_norm: f64,
    /// `√π · residual_norm`, the distance of the plane fields
    #[serde(with = "serde_num")]
    pub plane_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<ErrorBudget>,
}

impl EndStateReport {
    pub fn new(target_norm: f64, residual_norm: f64, budget: Option<ErrorBudget>) -> Self {
        Self { target_norm, residual_norm, plane_residual: PI.sqrt() * residual_norm, budget }
    }
}

/// `‖g - 𝒴_u(·,T)‖` on a grid, with an exponential tail closure at the
/// slower of the two decay rates.
pub fn residual_norm(g: &RadialProfile, u: &Control, t: f64, grid: &[f64]) -> Result<f64> {
    let y = controlled_profile(u, t, grid)?;
    let values: Vec<f64> = grid.iter().zip(y_values(&y)).map(|(&r, v)| g.eval(r) - v).collect();
    let rate = g.slowest_rate().min(1.0 / (4.0 * t));
    Ok(grid_l2_norm(grid, &values, rate))
}

fn y_values(p: &RadialProfile) -> &[f64] {
    match p {
        RadialProfile::Sampled(s) => s.values(),
        _ => unreachable!("controlled profiles are sampled"),
    }
}

/// Report for a control synthesized with `(N, l)`, on the default grid.
pub fn report(g: &RadialProfile, u: &Control, t: f64, n: u32, l: u32) -> Result<EndStateReport> {
    report_on_grid(g, u, t, Some((n, l)), &residual_grid(t, DEFAULT_GRID_POINTS))
}

/// Report on a caller-supplied grid; the budget is included when the
/// synthesis parameters are known.
pub fn report_on_grid(
    g: &RadialProfile,
    u: &Control,
    t: f64,
    params: Option<(u32, u32)>,
    grid: &[f64],
) -> Result<EndStateReport> {
    let residual = residual_norm(g, u, t, grid)?;
    let budget = params.map(|(n, l)| error_budget(g, t, n, l)).transpose()?;
    Ok(EndStateReport::new(l2_norm_halfline(g), residual, budget))
}

/// `max_t √π‖𝒴_u(·,t)‖ / ((2/√π)(t+1)‖u‖_∞)` over `t_grid`; the growth
/// estimate for the controlled term says this never exceeds 1.
pub fn bounded_growth_check(u: &Control, t_grid: &[f64]) -> Result<f64> {
    let l = u.sup_norm();
    if l == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for &t in t_grid {
        if t <= 0.0 {
            continue;
        }
        let grid = residual_grid(t, DEFAULT_GRID_POINTS);
        let y = controlled_profile(u, t, &grid)?;
        let norm = grid_l2_norm(&grid, y_values(&y), 1.0 / (4.0 * t));
        let ratio = PI.sqrt() * norm / (2.0 / PI.sqrt() * (t + 1.0) * l);
        worst = worst.max(ratio);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{exp_integral_e1, integrate, Domain};
    use approx::assert_relative_eq;

    #[test]
    fn free_evolution_examples() {
        let g = RadialProfile::exp_mixture([(1.0, 1.0)]).unwrap();
        assert_eq!(free_evolution(&g, 0.0).unwrap(), g);
        let h = free_evolution(&g, 1.0).unwrap();
        assert_eq!(h, RadialProfile::exp_mixture([(0.2, 0.2)]).unwrap());
        assert!(free_evolution(&g, -1.0).is_err());
    }

    #[test]
    fn polyexp_free_evolution_matches_gaussian_law() {
        // the general route on an exponential disguised as a polynomial mixture
        let g = RadialProfile::poly_exp_mixture(vec![crate::radial::PolyExpTerm::new(1.0, 0, 1.0)]).unwrap();
        let h = free_evolution(&g, 1.0).unwrap();
        for &r in &[0.1, 1.0, 7.0] {
            assert_relative_eq!(h.eval(r), 0.2 * (-0.2 * r).exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn unit_control_gives_exponential_integral() {
        let t = 1.0;
        let u = Control::constant(t, 1.0).unwrap();
        for &r in &[0.01, 0.5, 3.0, 10.0] {
            let expected = -exp_integral_e1(r / (4.0 * t)).unwrap() / (2.0 * PI);
            assert_relative_eq!(controlled_term(&u, t, r).unwrap(), expected, max_relative = 1e-14);
        }
        let z = Control::zero(t).unwrap();
        assert_eq!(controlled_term(&z, t, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_matches_time_quadrature() {
        let u = Control::new(2.0, vec![0.0, 0.3, 0.35, 1.1, 2.0], vec![1.0, -4.0, 0.5, 2.0]).unwrap();
        let rule = QuadratureRule::adaptive(15);
        for &t in &[1.0, 2.0] {
            for &r in &[0.01, 0.2, 1.0, 4.0, 10.0] {
                let mut q = 0.0;
                for (s0, s1, level) in u.segments() {
                    if s0 >= t {
                        continue;
                    }
                    let (a, b) = (if s1 >= t { 0.0 } else { t - s1 }, t - s0);
                    let f = |xi: f64| if xi <= 0.0 { 0.0 } else { (-r / (4.0 * xi)).exp() / (2.0 * xi) };
                    q += level * integrate(f, &rule, Domain::Interval(a, b), 1e-13).unwrap();
                }
                let q = -q / PI;
                let v = controlled_term(&u, t, r).unwrap();
                assert!((v - q).abs() < 1e-8, "t={t} r={r}: {v} vs {q}");
            }
        }
    }

    #[test]
    fn controlled_term_bound() {
        let t = 1.0;
        let u = Control::new(t, vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap();
        for &r in &[0.001, 0.1, 1.0, 5.0, 20.0] {
            let y = controlled_term(&u, t, r).unwrap();
            let bound = 1.0 / (2.0 * PI) * (-r / (4.0 * t)).exp() * (1.0 + 4.0 * t / r).ln();
            assert!(y.abs() <= bound);
        }
        assert!(controlled_term(&u, 2.0, 1.0).is_err());
        assert!(controlled_term(&u, 1.0, 0.0).is_err());
    }

    #[test]
    fn end_state_pieces() {
        let t = 1.0;
        let grid = residual_grid(t, 50);
        let g0 = RadialProfile::exp_mixture([(1.0, 1.0)]).unwrap();
        let zero = Control::zero(t).unwrap();
        let s = end_state(&zero, &g0, t, &grid).unwrap();
        for &r in &grid {
            assert_relative_eq!(s.eval(r), 0.2 * (-0.2 * r).exp(), max_relative = 1e-14);
        }
        let one = Control::constant(t, 1.0).unwrap();
        let s = end_state(&one, &RadialProfile::zero(), t, &grid).unwrap();
        for &r in &grid {
            let expected = -exp_integral_e1(r / 4.0).unwrap() / (2.0 * PI);
            assert_relative_eq!(s.eval(r), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn grid_norm_of_exponential() {
        let grid = residual_grid(1.0, 600);
        let v: Vec<f64> = grid.iter().map(|r| (-r).exp()).collect();
        assert_relative_eq!(grid_l2_norm(&grid, &v, 1.0), 0.5f64.sqrt(), max_relative = 1e-4);
    }

    #[test]
    fn zero_report() {
        let u = Control::zero(2.0).unwrap();
        let r = report(&RadialProfile::zero(), &u, 2.0, 2, 5).unwrap();
        assert_eq!(r.target_norm, 0.0);
        assert_eq!(r.residual_norm, 0.0);
        assert_eq!(r.plane_residual, 0.0);
        let b = r.budget.unwrap();
        assert_eq!((b.tail_term, b.mollification_term, b.total), (0.0, 0.0, 0.0));
    }

    #[test]
    fn growth_ratio_for_unit_control() {
        let u = Control::constant(1.0, 1.0).unwrap();
        let ratio = bounded_growth_check(&u, &[0.1, 0.5, 1.0]).unwrap();
        assert!(ratio > 0.0 && ratio <= 1.0, "{ratio}");
        assert_eq!(bounded_growth_check(&Control::zero(1.0).unwrap(), &[1.0]).unwrap(), 0.0);
    }
}

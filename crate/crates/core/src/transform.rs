//! The order-0 Hankel-type transform
//!
//! ```text
//! (Φg)(ρ) = ½ ∫_0^∞ g(r) J_0(√(rρ)) dr
//! ```
//!
//! which is a self-inverse isometry of `L²(ℝ₊)`. Closed forms are mapped
//! symbolically, using
//!
//! ```text
//! Φ(r^p e^{-αr}) = p!/(2α^{p+1}) · L_p(ρ/(4α)) · e^{-ρ/(4α)},
//! ```
//!
//! obtained by differentiating `Φ(e^{-αr}) = e^{-ρ/(4α)}/(2α)` in `α`.
//! Sampled profiles go through panel quadrature.

use crate::error::{Error, Result};
use crate::radial::{PolyExpTerm, RadialProfile};
use crate::special::{bessel_j0, binomial, factorial, QuadratureRule};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Absolute tolerance used by [`phi`] on sampled profiles.
pub const DEFAULT_TOL: f64 = 1e-10;

const PANEL_ORDER: usize = 12;
const MAX_PANELS: usize = 1 << 17;

/// `Φg`. Closed forms stay closed; sampled profiles are transformed on
/// their own grid.
pub fn phi(g: &RadialProfile) -> Result<RadialProfile> {
    phi_with(g, DEFAULT_TOL)
}

/// [`phi`] with an explicit absolute tolerance for the sampled path.
pub fn phi_with(g: &RadialProfile, tol: f64) -> Result<RadialProfile> {
    match g.closed_terms() {
        Some(terms) => RadialProfile::from_terms(terms.iter().flat_map(phi_term).collect()),
        None => phi_sampled(g, tol),
    }
}

fn phi_term(t: &PolyExpTerm) -> Vec<PolyExpTerm> {
    let p = t.power;
    let a = t.rate;
    let out_rate = 1.0 / (4.0 * a);
    let scale = t.coefficient * factorial(p) / (2.0 * a.powi(p as i32 + 1));
    (0..=p)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let c = scale * sign * binomial(p, k) / (factorial(k) * (4.0 * a).powi(k as i32));
            PolyExpTerm::new(c, k, out_rate)
        })
        .collect()
}

fn phi_sampled(g: &RadialProfile, tol: f64) -> Result<RadialProfile> {
    let RadialProfile::Sampled(s) = g else {
        unreachable!("closed forms take the symbolic path")
    };
    let grid = s.grid().to_vec();
    let values = grid
        .par_iter()
        .map(|&rho| phi_quadrature_reference(g, rho, tol))
        .collect::<Result<Vec<f64>>>()?;
    RadialProfile::sampled(grid, values, None)
}

/// `(Φg)(ρ)` by direct quadrature of the Bessel integral, truncated where
/// `∫_N^∞ |g| dr` drops below `tol/2`. This never uses the closed forms and
/// serves as an independent check on them.
pub fn phi_quadrature_reference(g: &RadialProfile, rho: f64, tol: f64) -> Result<f64> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("transform variable must be non-negative, got {rho}")));
    }
    if !(tol > 0.0) {
        return Err(Error::precondition("tolerance must be positive"));
    }
    let n = g.truncation_point(0.5 * tol);
    if !n.is_finite() {
        return Err(Error::NonConvergence {
            what: "tail of the profile decays too slowly to truncate the Bessel integral".into(),
            estimate: g.tail_mass_bound(1e12),
            tol,
        });
    }
    if n == 0.0 {
        return Ok(0.0);
    }
    let knots: &[f64] = match g {
        RadialProfile::Sampled(s) => s.grid(),
        _ => &[],
    };
    hankel_half_integral(|r| g.eval(r), knots, n, rho, 0.5 * tol)
}

/// `½ ∫_0^{r_max} f(r) J_0(√(rρ)) dr`, computed as `∫_0^Y f(y²) J_0(y√ρ) y dy`
/// with `Y = √r_max`. Panels are at most one half-period of the kernel wide
/// and additionally break at the supplied knots (where `f` may only be C¹).
pub(crate) fn hankel_half_integral<F: Fn(f64) -> f64>(
    f: F,
    knots: &[f64],
    r_max: f64,
    rho: f64,
    tol: f64,
) -> Result<f64> {
    let y_max = r_max.sqrt();
    let rule = QuadratureRule::gauss_legendre(PANEL_ORDER);
    let sqrt_rho = rho.sqrt();
    let integrand = |y: f64| f(y * y) * bessel_j0(y * sqrt_rho) * y;
    let knot_ys: Vec<f64> = knots
        .iter()
        .map(|r| r.sqrt())
        .filter(|&y| y > 0.0 && y < y_max)
        .collect();

    let mut width = (y_max / 32.0).min(if sqrt_rho > 0.0 { PI / sqrt_rho } else { f64::INFINITY });
    loop {
        let panels = (y_max / width).ceil() as usize;
        if panels > MAX_PANELS {
            return Err(Error::NonConvergence {
                what: format!("Bessel panel quadrature at rho = {rho}"),
                estimate: f64::NAN,
                tol,
            });
        }
        let mut cuts: Vec<f64> = (0..panels).map(|i| i as f64 * width).collect();
        cuts.push(y_max);
        cuts.extend_from_slice(&knot_ys);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut coarse = 0.0;
        let mut fine = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            coarse += rule.apply_on(integrand, a, b);
            fine += rule.apply_on(integrand, a, m) + rule.apply_on(integrand, m, b);
        }
        let est = (fine - coarse).abs();
        if est <= tol {
            return Ok(fine);
        }
        width *= 0.5;
    }
}

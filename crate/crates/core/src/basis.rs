//! Laguerre bases on the half-line and the monomial-exponential systems
//! used by the control synthesis.
//!
//! With horizon `T`:
//!
//! ```text
//! ψ_n(r)   = (2T)^{-1/2} L_n(r/(2T)) e^{-r/(4T)}
//! ψ̂_n(ρ)   = (-1)^n (2T)^{1/2} L_n(2Tρ) e^{-Tρ}        (= Φψ_n)
//! φ_n(ρ)   = ρ^n e^{-Tρ}
//! φ_n^l(ρ) = φ_n(ρ) · ((e^{ρ/l} - 1)/(ρ/l))^{n+1}
//! ```

use crate::error::{Error, Result};
use crate::radial::{closed_inner_dd, inner_product, l2_norm_halfline, PolyExpTerm, RadialProfile};
use crate::serde_num;
use crate::special::{binomial, expm1_over_x_minus_one, factorial, ln_factorial};
use crate::xprec::DoubleDouble;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Largest basis index accepted by the expansion and synthesis routines.
pub const MAX_ORDER: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisContext {
    t: f64,
}

impl BasisContext {
    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t.is_finite() {
            Ok(Self { t })
        } else {
            Err(Error::Domain(format!("horizon T must be positive, got {t}")))
        }
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }
}

fn alt(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `ψ_n` as a closed form.
pub fn psi_n(ctx: BasisContext, n: u32) -> RadialProfile {
    let t2 = 2.0 * ctx.t;
    let norm = 1.0 / t2.sqrt();
    let rate = 1.0 / (4.0 * ctx.t);
    let terms = (0..=n)
        .map(|k| {
            let c = norm * alt(k) * binomial(n, k) / (factorial(k) * t2.powi(k as i32));
            PolyExpTerm::new(c, k, rate)
        })
        .collect();
    RadialProfile::PolyExpMixture(terms)
}

/// `ψ̂_n = Φψ_n` as a closed form.
pub fn psi_hat_n(ctx: BasisContext, n: u32) -> RadialProfile {
    let t2 = 2.0 * ctx.t;
    let norm = alt(n) * t2.sqrt();
    let terms = (0..=n)
        .map(|k| {
            let c = norm * alt(k) * binomial(n, k) * t2.powi(k as i32) / factorial(k);
            PolyExpTerm::new(c, k, ctx.t)
        })
        .collect();
    RadialProfile::PolyExpMixture(terms)
}

/// `φ_n(ρ) = ρ^n e^{-Tρ}`.
pub fn phi_n(ctx: BasisContext, n: u32) -> RadialProfile {
    RadialProfile::PolyExpMixture(vec![PolyExpTerm::new(1.0, n, ctx.t)])
}

/// `φ_n^l`, the image of the staircase control `u_l^n` (up to the factor
/// `-1/π`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifiedMonomial {
    pub t: f64,
    pub n: u32,
    pub l: u32,
}

impl MollifiedMonomial {
    pub fn eval(&self, rho: f64) -> f64 {
        let x = rho / f64::from(self.l);
        let bracket = 1.0 + expm1_over_x_minus_one(x);
        rho.powi(self.n as i32) * (-self.t * rho).exp() * bracket.powi(self.n as i32 + 1)
    }

    /// `φ_n^l(ρ) - φ_n(ρ)`, without the cancellation of the naive difference.
    pub fn excess(&self, rho: f64) -> f64 {
        let x = rho / f64::from(self.l);
        let factor = (f64::from(self.n + 1) * expm1_over_x_minus_one(x).ln_1p()).exp_m1();
        rho.powi(self.n as i32) * (-self.t * rho).exp() * factor
    }
}

fn check_support(ctx: BasisContext, n: u32, l: u32) -> Result<()> {
    if l == 0 || f64::from(l) * ctx.t <= f64::from(n + 1) {
        Err(Error::precondition(format!(
            "need l > (n+1)/T, got n = {n}, l = {l}, T = {}",
            ctx.t
        )))
    } else {
        Ok(())
    }
}

/// `φ_n^l`; requires `l > (n+1)/T`.
pub fn phi_n_l(ctx: BasisContext, n: u32, l: u32) -> Result<MollifiedMonomial> {
    check_support(ctx, n, l)?;
    Ok(MollifiedMonomial { t: ctx.t, n, l })
}

/// Upper bound for `‖φ_n - φ_n^l‖_{L²(ℝ₊)}`:
///
/// ```text
/// (n+1)/(2^{n+5/2} l) · √((2n+2)!) / (T - (n+1)/l)^{n+3/2}
/// ```
///
/// evaluated in log space.
pub fn deviation_bound(ctx: BasisContext, n: u32, l: u32) -> Result<f64> {
    check_support(ctx, n, l)?;
    let nf = f64::from(n);
    let lf = f64::from(l);
    let gap = ctx.t - (nf + 1.0) / lf;
    let log = ((nf + 1.0) / lf).ln() - (nf + 2.5) * LN_2 + 0.5 * ln_factorial(2 * n + 2)
        - (nf + 1.5) * gap.ln();
    Ok(log.exp())
}

/// Basis coefficients `g_n = ⟨g, ψ_n⟩` and their binomial transforms
/// `d_k = Σ_{n≥k} C(n,k) (-1)^n g_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientRepr", into = "CoefficientRepr")]
pub struct CoefficientVector {
    pub t: f64,
    pub g_coeffs: Vec<f64>,
    pub d_coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CoefficientRepr {
    #[serde(rename = "T", with = "serde_num")]
    t: f64,
    #[serde(with = "serde_num::vec")]
    g: Vec<f64>,
    #[serde(with = "serde_num::vec")]
    d: Vec<f64>,
}

impl From<CoefficientVector> for CoefficientRepr {
    fn from(c: CoefficientVector) -> Self {
        Self { t: c.t, g: c.g_coeffs, d: c.d_coeffs }
    }
}

impl TryFrom<CoefficientRepr> for CoefficientVector {
    type Error = Error;

    fn try_from(r: CoefficientRepr) -> Result<Self> {
        let c = CoefficientVector { t: r.t, g_coeffs: r.g, d_coeffs: r.d };
        c.validate()?;
        Ok(c)
    }
}

/// `d_k = Σ_{n=k}^N C(n,k) (-1)^n g_n` in double-double.
pub(crate) fn binomial_transform_dd(g: &[DoubleDouble]) -> Vec<DoubleDouble> {
    let n_max = g.len();
    (0..n_max)
        .map(|k| {
            (k..n_max)
                .map(|n| {
                    let term = DoubleDouble::binomial(n as u32, k as u32) * g[n];
                    if n % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum()
        })
        .collect()
}

impl CoefficientVector {
    /// Build from `g_n`, deriving `d_k`.
    pub fn from_g(t: f64, g: Vec<f64>) -> Result<Self> {
        BasisContext::new(t)?;
        let dd: Vec<DoubleDouble> = g.iter().map(|&x| DoubleDouble::new(x)).collect();
        let d = binomial_transform_dd(&dd).iter().map(|x| x.to_f64()).collect();
        Ok(Self { t, g_coeffs: g, d_coeffs: d })
    }

    pub fn order(&self) -> u32 {
        self.g_coeffs.len().saturating_sub(1) as u32
    }

    /// Check lengths and that `d` is the binomial transform of `g`, to
    /// `1e-10` of the magnitude scale `Σ C(n,k)|g_n|` of each sum.
    pub fn validate(&self) -> Result<()> {
        BasisContext::new(self.t)?;
        if self.g_coeffs.len() != self.d_coeffs.len() {
            return Err(Error::invalid("coefficient vector", "g and d must have equal length"));
        }
        if self.g_coeffs.iter().chain(&self.d_coeffs).any(|x| !x.is_finite()) {
            return Err(Error::invalid("coefficient vector", "entries must be finite"));
        }
        let expected = CoefficientVector::from_g(self.t, self.g_coeffs.clone())?;
        for (k, (&d, &e)) in self.d_coeffs.iter().zip(&expected.d_coeffs).enumerate() {
            let scale: f64 = (k..self.g_coeffs.len())
                .map(|n| binomial(n as u32, k as u32) * self.g_coeffs[n].abs())
                .sum();
            if (d - e).abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::invalid(
                    "coefficient vector",
                    format!("d[{k}] = {d} does not match the transform of g ({e})"),
                ));
            }
        }
        Ok(())
    }
}

/// `⟨c r^p e^{-βr}, ψ_n⟩` for `n = 0..=n_max` in double-double. With
/// `a = 1/(4T)` and `s = 1/(2T(β+a))`:
///
/// ```text
/// c (2T)^{-1/2} (β+a)^{-(p+1)} Σ_k C(n,k) (-1)^k (p+k)!/k! s^k
/// ```
fn term_coefficients_dd(t: f64, term: &PolyExpTerm, n_max: u32) -> Vec<DoubleDouble> {
    let t_dd = DoubleDouble::new(t);
    let a = (DoubleDouble::new(4.0) * t_dd).recip();
    let b = DoubleDouble::new(term.rate) + a;
    let s = (DoubleDouble::new(2.0) * t_dd * b).recip();
    let p = term.power;
    let prefactor = DoubleDouble::new(term.coefficient) / (DoubleDouble::new(2.0) * t_dd).sqrt()
        / b.powi(p + 1);
    // w_k = (p+k)!/k! s^k
    let mut w = Vec::with_capacity(n_max as usize + 1);
    let mut wk = DoubleDouble::factorial(p);
    for k in 0..=n_max {
        if k > 0 {
            wk = wk * DoubleDouble::new(f64::from(p + k)) / DoubleDouble::new(f64::from(k)) * s;
        }
        w.push(wk);
    }
    (0..=n_max)
        .map(|n| {
            let sum: DoubleDouble = (0..=n)
                .map(|k| {
                    let x = DoubleDouble::binomial(n, k) * w[k as usize];
                    if k % 2 == 0 {
                        x
                    } else {
                        -x
                    }
                })
                .sum();
            prefactor * sum
        })
        .collect()
}

pub(crate) fn coefficients_dd(g: &RadialProfile, ctx: BasisContext, n_max: u32) -> Vec<DoubleDouble> {
    match g.closed_terms() {
        Some(terms) => {
            let mut acc = vec![DoubleDouble::ZERO; n_max as usize + 1];
            for term in &terms {
                for (a, x) in acc.iter_mut().zip(term_coefficients_dd(ctx.t, term, n_max)) {
                    *a += x;
                }
            }
            acc
        }
        None => (0..=n_max)
            .map(|n| DoubleDouble::new(inner_product(g, &psi_n(ctx, n))))
            .collect(),
    }
}

fn check_order(n: u32) -> Result<()> {
    if n > MAX_ORDER {
        Err(Error::precondition(format!("expansion order {n} exceeds the supported maximum {MAX_ORDER}")))
    } else {
        Ok(())
    }
}

/// Coefficients of `g` in the `ψ_n` basis up to `n_max`, with the derived
/// `d_k`. Closed forms are handled exactly in double-double arithmetic.
pub fn expand(g: &RadialProfile, ctx: BasisContext, n_max: u32) -> Result<CoefficientVector> {
    check_order(n_max)?;
    let gd = coefficients_dd(g, ctx, n_max);
    let d = binomial_transform_dd(&gd);
    Ok(CoefficientVector {
        t: ctx.t,
        g_coeffs: gd.iter().map(|x| x.to_f64()).collect(),
        d_coeffs: d.iter().map(|x| x.to_f64()).collect(),
    })
}

/// `(Σ_{n>N} g_n²)^{1/2}`, obtained from Parseval as `(‖g‖² - Σ_{n≤N} g_n²)^{1/2}`.
pub fn truncation_tail(g: &RadialProfile, ctx: BasisContext, n_max: u32) -> Result<f64> {
    check_order(n_max)?;
    let gd = coefficients_dd(g, ctx, n_max);
    let captured: DoubleDouble = gd.iter().map(|&x| x * x).sum();
    let total = match g.closed_terms() {
        Some(terms) => closed_inner_dd(&terms, &terms),
        None => {
            let n = l2_norm_halfline(g);
            DoubleDouble::new(n) * DoubleDouble::new(n)
        }
    };
    Ok((total - captured).to_f64().max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::inner_product;
    use approx::assert_relative_eq;

    fn ctx(t: f64) -> BasisContext {
        BasisContext::new(t).unwrap()
    }

    #[test]
    fn psi_zero_is_scaled_gaussian() {
        let c = ctx(2.0);
        let p = psi_n(c, 0);
        assert_relative_eq!(p.eval(1.3), (-1.3f64 / 8.0).exp() / 2.0, max_relative = 1e-15);
        let h = psi_hat_n(c, 0);
        assert_relative_eq!(h.eval(0.4), 2.0 * (-0.8f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn orthonormality() {
        for &t in &[0.5, 1.0, 3.0] {
            let c = ctx(t);
            for n in 0..=12 {
                let p = psi_n(c, n);
                assert!((inner_product(&p, &p) - 1.0).abs() < 1e-8);
                let h = psi_hat_n(c, n);
                assert!((inner_product(&h, &h) - 1.0).abs() < 1e-8);
            }
            assert!(inner_product(&psi_n(c, 2), &psi_n(c, 5)).abs() < 1e-8);
        }
    }

    #[test]
    fn monomial_norms() {
        let c = ctx(1.5);
        for n in 0..6 {
            let p = phi_n(c, n);
            let expected = factorial(2 * n) / (2.0 * 1.5f64).powi(2 * n as i32 + 1);
            assert_relative_eq!(inner_product(&p, &p), expected, max_relative = 1e-14);
        }
        assert_relative_eq!(phi_n(ctx(2.0), 1).eval(0.5), (-1.0f64).exp() / 2.0);
        assert_eq!(phi_n(ctx(2.0), 0).eval(0.0), 1.0);
    }

    #[test]
    fn mollified_monomial_limits() {
        let m = phi_n_l(ctx(1.0), 0, 5).unwrap();
        assert_eq!(m.eval(0.0), 1.0);
        let m = phi_n_l(ctx(1.0), 3, 20).unwrap();
        for &rho in &[1e-6, 0.1, 1.0, 5.0] {
            assert!(m.eval(rho) >= phi_n(ctx(1.0), 3).eval(rho));
            assert!(m.excess(rho) >= 0.0);
            assert_relative_eq!(
                m.excess(rho),
                m.eval(rho) - phi_n(ctx(1.0), 3).eval(rho),
                max_relative = 1e-8
            );
        }
        assert!(phi_n_l(ctx(1.0), 3, 4).is_err());
    }

    #[test]
    fn deviation_bound_value_and_monotonicity() {
        // (1/(2^{5/2}·10)) · √2 / 0.9^{3/2}
        let direct = 2f64.sqrt() / (2f64.powf(2.5) * 10.0) / 0.9f64.powf(1.5);
        assert_relative_eq!(deviation_bound(ctx(1.0), 0, 10).unwrap(), direct, max_relative = 1e-13);
        assert_relative_eq!(direct, 0.029_280_35, max_relative = 1e-6);
        let mut last = f64::INFINITY;
        for l in [10, 100, 1000, 10000] {
            let b = deviation_bound(ctx(1.0), 0, l).unwrap();
            assert!(b > 0.0 && b < last);
            last = b;
        }
        assert!(deviation_bound(ctx(1.0), 2, 3).is_err());
    }

    #[test]
    fn expand_basis_element() {
        let c = ctx(1.0);
        let v = expand(&psi_n(c, 3), c, 8).unwrap();
        for (n, g) in v.g_coeffs.iter().enumerate() {
            let expected = if n == 3 { 1.0 } else { 0.0 };
            assert!((g - expected).abs() < 1e-9, "g_{n} = {g}");
        }
    }

    #[test]
    fn coefficient_json() {
        let v = CoefficientVector::from_g(3.0, vec![0.5, -0.25]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"T":"3.0","g":["0.5","-0.25"],"d":["0.75","0.25"]}"#);
        assert_eq!(serde_json::from_str::<CoefficientVector>(&s).unwrap(), v);
        assert!(serde_json::from_str::<CoefficientVector>(r#"{"T":3,"g":[1],"d":[2]}"#).is_err());
        assert!(serde_json::from_str::<CoefficientVector>(r#"{"T":3,"g":[1,2],"d":[2]}"#).is_err());
    }
}

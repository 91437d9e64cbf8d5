//! Scalar special functions and quadrature rules.
//!
//! Everything here is a pure function of its arguments. Laguerre
//! polynomials use the forward three-term recurrence, `J_0` switches between
//! its power series, Miller's backward recurrence and the Hankel asymptotic
//! expansion, and `E_1` switches between its power series and a continued
//! fraction at `x = 1`.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Laguerre polynomial `L_n(x)`.
pub fn laguerre(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `Σ_k C(n,k) μ^k (1-μ)^{n-k} L_k(x)`, which equals `L_n(μx)`.
pub fn laguerre_multiple_argument(n: u32, mu: f64, x: f64) -> f64 {
    let mut total = 0.0;
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 0..=n {
        let lk = match k {
            0 => 1.0,
            1 => cur,
            _ => {
                let kk = f64::from(k - 1);
                let next = ((2.0 * kk + 1.0 - x) * cur - kk * prev) / (kk + 1.0);
                prev = cur;
                cur = next;
                cur
            }
        };
        total += binomial(n, k) * mu.powi(k as i32) * (1.0 - mu).powi((n - k) as i32) * lk;
    }
    total
}

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 8.0 {
        j0_series(x)
    } else if x < 20.0 {
        j0_miller(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let k = f64::from(k);
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

// Backward recurrence normalised by J_0 + 2 Σ J_{2k} = 1.
fn j0_miller(x: f64) -> f64 {
    let start = {
        let m = (x + 20.0 + 10.0 * x.sqrt()) as usize;
        m + (m & 1)
    };
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds the unnormalised J_{k-1}.
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if k == 1 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
        }
    }
    j0 / (norm + j0)
}

fn j0_asymptotic(x: f64) -> f64 {
    // J_0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4))
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60u32 {
        let odd = f64::from(2 * k - 1);
        term *= odd * odd * inv8x / f64::from(k);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // P takes the even terms with signs + - + ..., Q the odd ones with - + - ...
        match k % 4 {
            1 => q -= term,
            2 => p -= term,
            3 => q += term,
            _ => p += term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let cos_shift = (c + s) * FRAC_1_SQRT_2;
    let sin_shift = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_shift - q * sin_shift)
}

/// Exponential integral `E_1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("E1 requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(if x < 1.0 { e1_series(x) } else { e1_continued_fraction(x) })
}

/// `E_1` for arguments already known to be positive; returns 0 at +inf.
pub(crate) fn e1_unchecked(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else if x < 1.0 {
        e1_series(x)
    } else {
        e1_continued_fraction(x)
    }
}

fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..100 {
        let kf = f64::from(k);
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Modified Lentz evaluation of e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let a = -f64::from(i) * f64::from(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

/// `n!` as `f64` (exact up to `n = 22`).
pub fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// `ln(n!)`, summed in the log domain for large `n`.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= 20 {
        factorial(n).ln()
    } else {
        factorial(20).ln() + (21..=n).map(|k| f64::from(k).ln()).sum::<f64>()
    }
}

/// `(2m-1)!!` with the convention `(-1)!! = 1`.
pub fn double_factorial_odd(m: u32) -> f64 {
    (1..=m).map(|k| f64::from(2 * k - 1)).product()
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc.round()
}

/// `(e^x - 1)/x` with the removable singularity at 0 filled in.
pub fn expm1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)))
    } else {
        x.exp_m1() / x
    }
}

/// `(e^x - 1)/x - 1`, accurate for small `x`.
pub fn expm1_over_x_minus_one(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x * (1.0 / 120.0 + x / 720.0))))
    } else {
        (x.exp_m1() - x) / x
    }
}

// ---------------------------------------------------------------------------
// Quadrature

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLaguerre,
    GaussLegendrePanel,
    Adaptive,
}

/// A fixed rule: `Σ w_i f(x_i)`. Legendre rules live on `[-1, 1]`,
/// Laguerre rules integrate against `e^{-x}` on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: QuadratureKind,
}

/// Integration domain for [`integrate`]. `HalfLine { rate }` means
/// `∫_0^∞ f(r) e^{-rate·r} dr`: the exponential weight is implied and `f`
/// is only the smooth residual factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval(f64, f64),
    HalfLine { rate: f64 },
}

const MAX_LAGUERRE_ORDER: usize = 128;
const MAX_PANELS: usize = 1 << 14;
const MAX_ADAPTIVE_DEPTH: u32 = 48;
const MAX_ADAPTIVE_INTERVALS: usize = 1 << 16;

impl QuadratureRule {
    pub fn gauss_legendre(n: usize) -> Self {
        let (nodes, weights) = legendre_nodes_weights(n);
        Self { nodes, weights, kind: QuadratureKind::GaussLegendrePanel }
    }

    /// Same nodes as [`gauss_legendre`](Self::gauss_legendre), used by
    /// [`integrate`] with recursive bisection.
    pub fn adaptive(n: usize) -> Self {
        Self { kind: QuadratureKind::Adaptive, ..Self::gauss_legendre(n) }
    }

    pub fn gauss_laguerre(n: usize) -> Self {
        let (nodes, weights) = laguerre_nodes_weights(n);
        Self { nodes, weights, kind: QuadratureKind::GaussLaguerre }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Apply a Legendre-type rule on `[a, b]`.
    pub fn apply_on<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        debug_assert_ne!(self.kind, QuadratureKind::GaussLaguerre);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// Apply a Laguerre rule to `∫_0^∞ f(r) e^{-rate·r} dr` via `s = rate·r`.
    pub fn apply_half_line<F: Fn(f64) -> f64>(&self, f: F, rate: f64) -> f64 {
        debug_assert_eq!(self.kind, QuadratureKind::GaussLaguerre);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w * f(s / rate))
            .sum::<f64>()
            / rate
    }
}

fn legendre_nodes_weights(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p2) / jf;
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn laguerre_nodes_weights(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(
        (1..=MAX_LAGUERRE_ORDER).contains(&n),
        "Gauss-Laguerre order must be in 1..={MAX_LAGUERRE_ORDER}"
    );
    let nf = n as f64;
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut z = 0.0;
    for i in 0..n {
        // Initial guesses from the asymptotic node spacing.
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p_prev = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (p1 - p2) / z;
            p_prev = p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        nodes.push(z);
        weights.push(-1.0 / (pp * nf * p_prev));
    }
    (nodes, weights)
}

/// Integrate `f` over `domain` with the given base rule, refining until the
/// error estimate (difference between successive refinements) is below `tol`.
///
/// * `GaussLaguerre` requires a `HalfLine` domain; refinement doubles the order.
/// * `GaussLegendrePanel` requires an `Interval`; refinement doubles the panel count.
/// * `Adaptive` bisects locally; a `HalfLine` domain is first mapped onto
///   `[0, 1)` by `r = -ln(1 - s)/rate`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    rule: &QuadratureRule,
    domain: Domain,
    tol: f64,
) -> Result<f64> {
    match (rule.kind, domain) {
        (QuadratureKind::GaussLaguerre, Domain::HalfLine { rate }) => {
            check_rate(rate)?;
            let mut order = rule.order();
            let mut coarse = rule.apply_half_line(&f, rate);
            loop {
                let next = (2 * order).min(MAX_LAGUERRE_ORDER);
                if next == order {
                    return Err(Error::NonConvergence {
                        what: "Gauss-Laguerre order budget exhausted".into(),
                        estimate: f64::NAN,
                        tol,
                    });
                }
                let fine = QuadratureRule::gauss_laguerre(next).apply_half_line(&f, rate);
                let est = (fine - coarse).abs();
                if est <= tol {
                    return Ok(fine);
                }
                if next == MAX_LAGUERRE_ORDER {
                    return Err(Error::NonConvergence {
                        what: "Gauss-Laguerre order budget exhausted".into(),
                        estimate: est,
                        tol,
                    });
                }
                order = next;
                coarse = fine;
            }
        }
        (QuadratureKind::GaussLegendrePanel, Domain::Interval(a, b)) => {
            let mut panels = 1usize;
            let mut coarse = composite(rule, &f, a, b, panels);
            while panels < MAX_PANELS {
                panels *= 2;
                let fine = composite(rule, &f, a, b, panels);
                let est = (fine - coarse).abs();
                if est <= tol {
                    return Ok(fine);
                }
                coarse = fine;
            }
            Err(Error::NonConvergence {
                what: format!("panel quadrature on [{a}, {b}]"),
                estimate: f64::NAN,
                tol,
            })
        }
        (QuadratureKind::Adaptive, Domain::Interval(a, b)) => adaptive(rule, &f, a, b, tol),
        (QuadratureKind::Adaptive, Domain::HalfLine { rate }) => {
            check_rate(rate)?;
            let mapped = |s: f64| {
                if s >= 1.0 {
                    return 0.0;
                }
                let r = -(-s).ln_1p() / rate;
                f(r) / rate
            };
            adaptive(rule, &mapped, 0.0, 1.0, tol)
        }
        (kind, domain) => Err(Error::precondition(format!(
            "rule {kind:?} cannot integrate over {domain:?}"
        ))),
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("half-line decay rate must be positive, got {rate}")))
    }
}

fn composite<F: Fn(f64) -> f64>(rule: &QuadratureRule, f: &F, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    (0..m)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == m { b } else { lo + h };
            rule.apply_on(f, lo, hi)
        })
        .sum()
}

fn adaptive<F: Fn(f64) -> f64>(
    rule: &QuadratureRule,
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    let whole = rule.apply_on(f, a, b);
    let mut state = Bisection { worst: 0.0, budget: MAX_ADAPTIVE_INTERVALS };
    let value = bisect(rule, f, a, b, whole, tol, 0, &mut state);
    if state.worst > tol {
        Err(Error::NonConvergence {
            what: format!("adaptive quadrature on [{a}, {b}]"),
            estimate: state.worst,
            tol,
        })
    } else {
        Ok(value)
    }
}

struct Bisection {
    // accumulated error estimate of intervals that were accepted unconverged
    worst: f64,
    // remaining subdivisions
    budget: usize,
}

#[allow(clippy::too_many_arguments)]
fn bisect<F: Fn(f64) -> f64>(
    rule: &QuadratureRule,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    state: &mut Bisection,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.apply_on(f, a, mid);
    let right = rule.apply_on(f, mid, b);
    let est = (left + right - whole).abs();
    if !est.is_finite() {
        state.worst = f64::INFINITY;
        return left + right;
    }
    if est <= tol {
        return left + right;
    }
    if depth >= MAX_ADAPTIVE_DEPTH || state.budget == 0 {
        state.worst += est;
        return left + right;
    }
    state.budget -= 1;
    bisect(rule, f, a, mid, left, 0.5 * tol, depth + 1, state)
        + bisect(rule, f, mid, b, right, 0.5 * tol, depth + 1, state)
}

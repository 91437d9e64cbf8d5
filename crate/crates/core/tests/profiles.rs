use std::f64::consts::PI;

use heat_control::radial::{
    l2_norm_halfline, log_grid, psi_forward, psi_inverse, PlaneFieldRadial, RadialProfile,
};
use heat_control::special::{
    integrate, laguerre, laguerre_multiple_argument, Domain, QuadratureRule,
};
use heat_control::transform::{phi, phi_quadrature_reference};
use proptest::prelude::*;

fn mixture() -> impl Strategy<Value = RadialProfile> {
    prop::collection::vec((-3.0f64..3.0, 0.2f64..4.0), 1..4)
        .prop_map(|terms| RadialProfile::exp_mixture(terms).unwrap())
}

// Profiles that cannot collapse to zero: the first coefficient stays away from 0.
fn nonzero_mixture() -> impl Strategy<Value = RadialProfile> {
    (0.5f64..3.0, 0.2f64..4.0, prop::collection::vec((-1.0f64..1.0, 0.2f64..4.0), 0..3)).prop_map(
        |(c, a, rest)| {
            let mut terms = vec![(c, a)];
            terms.extend(rest);
            RadialProfile::exp_mixture(terms).unwrap()
        },
    )
}

// ∫∫ f(x)² dx over a square large enough for the slowest rate, by tensor Gauss–Legendre panels.
fn plane_norm_by_tensor_quadrature(f: &PlaneFieldRadial, rate: f64) -> f64 {
    let half = (40.0 / rate).sqrt();
    let panels = 32;
    let rule = QuadratureRule::gauss_legendre(16);
    let h = 2.0 * half / panels as f64;
    let line = |x1: f64| {
        (0..panels)
            .map(|j| {
                let a = -half + j as f64 * h;
                rule.apply_on(|x2| f.eval(x1, x2).powi(2), a, a + h)
            })
            .sum::<f64>()
    };
    let total: f64 = (0..panels)
        .map(|i| {
            let a = -half + i as f64 * h;
            rule.apply_on(line, a, a + h)
        })
        .sum();
    total.sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laguerre_recurrence(n in 1u32..30, x in 0.0f64..50.0) {
        let lhs = f64::from(n + 1) * laguerre(n + 1, x);
        let rhs = (f64::from(2 * n + 1) - x) * laguerre(n, x) - f64::from(n) * laguerre(n - 1, x);
        let scale = lhs.abs().max((f64::from(2 * n + 1) + x) * laguerre(n, x).abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "n={n} x={x}: {lhs} vs {rhs}");
    }

    #[test]
    fn laguerre_scaling(n in 0u32..=10, mu_idx in 0usize..3, x in 0.0f64..10.0) {
        let mu = [-1.0, 0.5, 2.0][mu_idx];
        let a = laguerre_multiple_argument(n, mu, x);
        let b = laguerre(n, mu * x);
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "n={n} μ={mu} x={x}: {a} vs {b}");
    }

    #[test]
    fn plane_norm_is_root_pi_times_profile_norm(g in nonzero_mixture()) {
        let f = psi_inverse(&g);
        let radial = PI.sqrt() * l2_norm_halfline(&psi_forward(&f));
        let plane = plane_norm_by_tensor_quadrature(&f, g.slowest_rate());
        prop_assert!((plane - radial).abs() <= 1e-6 * radial, "{plane} vs {radial}");
        prop_assert!((f.l2_norm() - radial).abs() <= 1e-15 * radial);
    }

    #[test]
    fn sampling_keeps_the_norm(g in nonzero_mixture()) {
        let grid = log_grid(1e-4, 60.0 / g.slowest_rate(), 400);
        let s = g.sample_on(&grid).unwrap();
        let (a, b) = (l2_norm_halfline(&g), l2_norm_halfline(&s));
        prop_assert!((a - b).abs() < 1e-4 * a, "{a} vs {b}");
    }

    #[test]
    fn json_round_trip_is_lossless(g in mixture()) {
        let text = serde_json::to_string(&g).unwrap();
        let back: RadialProfile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn transform_is_an_isometry(g in nonzero_mixture()) {
        let a = l2_norm_halfline(&g);
        let b = l2_norm_halfline(&phi(&g).unwrap());
        prop_assert!((a - b).abs() <= 1e-8 * a, "{a} vs {b}");
    }

    #[test]
    fn transform_is_an_involution(g in nonzero_mixture()) {
        let back = phi(&phi(&g).unwrap()).unwrap();
        let err = l2_norm_halfline(&RadialProfile::linear_combination(1.0, &back, -1.0, &g).unwrap());
        prop_assert!(err <= 1e-10 * l2_norm_halfline(&g), "relative error {err}");
    }

    #[test]
    fn transform_is_linear(g in mixture(), h in mixture(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let lhs = phi(&RadialProfile::linear_combination(a, &g, b, &h).unwrap()).unwrap();
        let rhs = RadialProfile::linear_combination(a, &phi(&g).unwrap(), b, &phi(&h).unwrap()).unwrap();
        for rho in [0.0, 0.3, 1.0, 4.0, 17.0] {
            let (x, y) = (lhs.eval(rho), rhs.eval(rho));
            let scale: f64 = 1.0 + a.abs() + b.abs();
            prop_assert!((x - y).abs() <= 1e-14 * scale * 20.0, "ρ={rho}: {x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn closed_transform_matches_bessel_quadrature(g in nonzero_mixture(), rho in 0.01f64..20.0) {
        let closed = phi(&g).unwrap().eval(rho);
        let direct = phi_quadrature_reference(&g, rho, 1e-9).unwrap();
        prop_assert!((closed - direct).abs() <= 1e-6, "ρ={rho}: {closed} vs {direct}");
    }
}

#[test]
fn laguerre_rule_exactness_up_to_degree_2n_minus_1() {
    for n in [8usize, 16, 32] {
        let rule = QuadratureRule::gauss_laguerre(n);
        for k in 0..2 * n as i32 {
            let got = rule.apply_half_line(|x| x.powi(k), 1.0);
            let exact = heat_control::special::factorial(k as u32);
            assert!((got - exact).abs() <= 1e-12 * exact, "n={n} k={k}: {got} vs {exact}");
        }
    }
}

#[test]
fn adaptive_integration_of_gaussian_moment() {
    // ∫_0^∞ y^4 e^{-y²/4} dy = (√π/2) 3!!/(2² (1/4)^{5/2})
    let exact = PI.sqrt() / 2.0 * 3.0 / (4.0 * 0.25f64.powf(2.5));
    let got = integrate(
        |y: f64| y.powi(4) * (-0.25 * y * y).exp(),
        &QuadratureRule::adaptive(12),
        Domain::Interval(0.0, 20.0),
        1e-13,
    )
    .unwrap();
    assert!((got - exact).abs() <= 1e-11 * exact, "{got} vs {exact}");
}

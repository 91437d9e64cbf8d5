use std::f64::consts::PI;

use heat_control::control::{
    control_moments, default_condition_grid, entire_eval, gamma_bound, gamma_moments,
    necessary_condition, synthesize, Control,
};
use heat_control::heat::{controlled_term, free_evolution};
use heat_control::radial::{l2_norm_halfline, RadialProfile};
use heat_control::special::{bessel_j0, integrate, Domain, QuadratureRule};
use num_complex::Complex64;
use proptest::prelude::*;

fn mixture() -> impl Strategy<Value = RadialProfile> {
    prop::collection::vec((-3.0f64..3.0, 0.05f64..2.0), 1..4)
        .prop_map(|terms| RadialProfile::exp_mixture(terms).unwrap())
}

fn control(t: f64) -> impl Strategy<Value = Control> {
    prop::collection::vec((0.05f64..1.0, -5.0f64..5.0), 1..6).prop_map(move |pieces| {
        let total: f64 = pieces.iter().map(|p| p.0).sum();
        let mut breakpoints = vec![0.0];
        let mut acc = 0.0;
        for (w, _) in &pieces[..pieces.len() - 1] {
            acc += w / total * t;
            breakpoints.push(acc);
        }
        breakpoints.push(t);
        Control::new(t, breakpoints, pieces.iter().map(|p| p.1).collect()).unwrap()
    })
}

fn example_target(t: f64) -> RadialProfile {
    RadialProfile::exp_mixture([(-0.3, 1.0 / (10.0 * t))]).unwrap()
}

// ½∫_0^∞ 𝒴_u(r,T) J_0(√(rρ)) dr, in y = √r, by adaptive Gauss–Legendre.
fn transform_of_controlled_term(u: &Control, rho: f64) -> f64 {
    let t = u.horizon();
    let y_max = (4.0 * t * 45.0).sqrt();
    let f = |y: f64| {
        if y == 0.0 {
            0.0
        } else {
            y * controlled_term(u, t, y * y).unwrap() * bessel_j0(y * rho.sqrt())
        }
    };
    integrate(f, &QuadratureRule::adaptive(16), Domain::Interval(0.0, y_max), 1e-12).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn free_evolution_semigroup(g in mixture(), s in 0.01f64..3.0, t in 0.01f64..3.0) {
        let two_steps = free_evolution(&free_evolution(&g, s).unwrap(), t).unwrap();
        let one_step = free_evolution(&g, s + t).unwrap();
        for r in [0.0, 0.1, 1.0, 5.0, 30.0] {
            let (a, b) = (two_steps.eval(r), one_step.eval(r));
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()) * 4.0, "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn free_evolution_contracts(g in mixture(), t in 0.0f64..5.0) {
        let before = l2_norm_halfline(&g);
        let after = l2_norm_halfline(&free_evolution(&g, t).unwrap());
        prop_assert!(after <= before * (1.0 + 1e-12), "{after} > {before}");
    }

    #[test]
    fn synthesis_is_linear(g in mixture(), h in mixture(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let t = 2.0;
        let (n, l) = (3, 12);
        let combo = synthesize(&RadialProfile::linear_combination(a, &g, b, &h).unwrap(), t, n, l).unwrap();
        let separate = Control::linear_combination(
            a, &synthesize(&g, t, n, l).unwrap(),
            b, &synthesize(&h, t, n, l).unwrap(),
        ).unwrap();
        prop_assert_eq!(combo.breakpoints(), separate.breakpoints());
        let scale = combo.sup_norm().max(separate.sup_norm()).max(1.0);
        for (x, y) in combo.levels().iter().zip(separate.levels()) {
            prop_assert!((x - y).abs() <= 1e-12 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn control_json_round_trip(u in control(1.5)) {
        let text = serde_json::to_string(&u).unwrap();
        let back: Control = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &u);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn control_moments_obey_their_bound(u in control(1.5), n in 0u32..=12) {
        let m = control_moments(&u, n).unwrap();
        let bound = heat_control::control::control_moment_bound(u.sup_norm(), 1.5, n);
        prop_assert!(m.values[n as usize].abs() <= bound * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn end_state_transform_is_the_entire_extension(u in control(1.0), rho in 0.05f64..8.0) {
        let direct = transform_of_controlled_term(&u, rho);
        let g = entire_eval(&u, Complex64::new(rho, 0.0));
        prop_assert!(g.im.abs() <= 1e-14 * g.re.abs().max(1.0));
        prop_assert!((direct - g.re).abs() <= 1e-8, "ρ={rho}: {direct} vs {}", g.re);
    }
}

#[test]
fn taylor_coefficients_are_control_moments() {
    // Coefficients of G_e at 0 by a Cauchy integral over a circle of radius 1/T,
    // compared with -(1/π)(-1)^n γ_n^u / n!.
    let t = 3.0;
    let u = synthesize(&example_target(t), t, 3, 20).unwrap();
    let moments = control_moments(&u, 4).unwrap();
    let radius = 1.0 / t;
    let points = 64;
    for n in 0..=4 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..points {
            let theta = 2.0 * PI * k as f64 / points as f64;
            let z = Complex64::from_polar(radius, theta);
            acc += entire_eval(&u, z) * Complex64::from_polar(1.0, -(n as f64) * theta);
        }
        let coefficient = acc.re / points as f64 / radius.powi(n);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let want = -sign * moments.values[n as usize] / (PI * heat_control::special::factorial(n as u32));
        assert!((coefficient - want).abs() <= 1e-4 * want.abs(), "n={n}: {coefficient} vs {want}");
    }
}

#[test]
fn witness_moments_respect_the_condition_bound() {
    for t in [1.0, 3.0] {
        let g = RadialProfile::exp_mixture([(-2.0 / (PI * t), 1.0 / (2.0 * t))]).unwrap();
        let m = necessary_condition(&g, t, &default_condition_grid(t)).unwrap();
        let gamma = gamma_moments(&g, t, 8).unwrap();
        for (n, value) in gamma.values.iter().enumerate() {
            let bound = gamma_bound(m, t, n as u32);
            assert!(value.abs() <= bound, "T={t} n={n}: |γ| = {} > {bound}", value.abs());
        }
    }
}

#[test]
fn synthesized_moments_approach_target_moments() {
    let t = 3.0;
    let g = example_target(t);
    let target = gamma_moments(&g, t, 3).unwrap();
    let gap = |n_max: u32, l: u32| {
        let u = synthesize(&g, t, n_max, l).unwrap();
        let m = control_moments(&u, 3).unwrap();
        (0..=3).map(|n| (m.values[n] - target.values[n]).abs() / target.values[n].abs()).fold(0.0, f64::max)
    };
    let coarse = gap(3, 20);
    let fine = gap(3, 200);
    assert!(fine < coarse, "moment gap did not shrink: {coarse} -> {fine}");
}

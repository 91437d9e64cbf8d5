use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use heat_control::basis::{expand, truncation_tail, BasisContext};
use heat_control::control::{
    control_moments, default_condition_grid, entire_bound, entire_eval, gamma_moments, necessary_condition,
    synthesize as synthesize_control, Control,
};
use heat_control::heat::{
    end_state, error_budget, grid_l2_norm, report_on_grid, residual_grid, EndStateReport,
};
use heat_control::radial::{l2_norm_halfline, log_grid, RadialProfile};
use heat_control::serde_num;
use heat_control::transform::phi_with;
use num_complex::Complex64;
use serde::Deserialize;

use crate::output::{read_json, resolve, to_json, write_csv, write_json};
use crate::{Failure, Settings, EXIT_PRECONDITION, EXIT_REGRESSION};

type Outcome = Result<(), Failure>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthesisConfig {
    target: RadialProfile,
    #[serde(rename = "T", with = "serde_num")]
    t: f64,
    #[serde(rename = "N")]
    n: u32,
    l: u32,
    out: PathBuf,
}

fn staircase_rows(u: &Control) -> Vec<Vec<f64>> {
    u.segments().map(|(a, b, level)| vec![a, b, level]).collect()
}

fn print_levels(u: &Control) {
    println!("{:>4}  {:>24}  {:>24}  {:>24}", "j", "t_start", "t_end", "level");
    for (j, (a, b, level)) in u.segments().enumerate() {
        println!("{j:>4}  {a:>24e}  {b:>24e}  {level:>24e}");
    }
}

pub fn synthesize(settings: &Settings, config: &Path) -> Outcome {
    let cfg: SynthesisConfig = read_json(config)?;
    let u = synthesize_control(&cfg.target, cfg.t, cfg.n, cfg.l)?;
    let budget = error_budget(&cfg.target, cfg.t, cfg.n, cfg.l)?;
    let out = resolve(&settings.out_dir, &cfg.out)?;
    write_json(&out, &u)?;
    let table = out.with_extension("levels.csv");
    write_csv(&table, &["t_start", "t_end", "level"], staircase_rows(&u))?;
    println!("control (N = {}, l = {}, T = {}) written to {}", cfg.n, cfg.l, cfg.t, out.display());
    print_levels(&u);
    println!("error budget: tail {:e} + mollification {:e} = {:e}", budget.tail_term, budget.mollification_term, budget.total);
    Ok(())
}

fn sampled_values(p: &RadialProfile) -> &[f64] {
    match p {
        RadialProfile::Sampled(s) => s.values(),
        _ => unreachable!("end states are sampled"),
    }
}

pub fn simulate(
    settings: &Settings,
    control: &Path,
    initial: &Path,
    t: Option<f64>,
    target: Option<&Path>,
) -> Outcome {
    let u: Control = read_json(control)?;
    let g0: RadialProfile = read_json(initial)?;
    let target = match target {
        Some(p) => read_json(p)?,
        None => RadialProfile::zero(),
    };
    let t = t.unwrap_or(u.horizon());
    let grid = residual_grid(t, settings.grid_points);
    let state = end_state(&u, &g0, t, &grid)?;
    let RadialProfile::Sampled(s) = &state else { unreachable!("end states are sampled") };
    let diffs: Vec<f64> = grid.iter().zip(s.values()).map(|(&r, v)| target.eval(r) - v).collect();
    let rate = s.tail_rate().min(target.slowest_rate());
    let report = EndStateReport::new(l2_norm_halfline(&target), grid_l2_norm(&grid, &diffs, rate), None);

    let csv_path = resolve(&settings.out_dir, "end_state.csv")?;
    write_csv(&csv_path, &["r", "value"], grid.iter().zip(s.values()).map(|(&r, &v)| vec![r, v]))?;
    let report_path = resolve(&settings.out_dir, "report.json")?;
    write_json(&report_path, &report)?;
    println!("end state at T = {t} written to {}", csv_path.display());
    println!("residual norm {:e} (plane {:e}), target norm {:e}", report.residual_norm, report.plane_residual, report.target_norm);
    Ok(())
}

// Verdict helper: two numbers agree to `tol` relative, or both vanish.
fn agrees(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "HOLDS"
    } else {
        "FAILS"
    }
}

pub fn verify(settings: &Settings, control: &Path, target: &Path, t: Option<f64>, n_max: u32) -> Outcome {
    let u: Control = read_json(control)?;
    let g: RadialProfile = read_json(target)?;
    let t_horizon = u.horizon();
    if let Some(t) = t {
        if t != t_horizon {
            return Err(Failure::new(
                EXIT_PRECONDITION,
                anyhow!("--T {t} does not match the control horizon {t_horizon}"),
            ));
        }
    }
    let t = t_horizon;
    let l = u.sup_norm();

    let m = necessary_condition(&g, t, &default_condition_grid(t))?;
    let cap = l / (2.0 * PI);
    println!("necessary condition: sup |g| e^(r/4T)/ln(1+4T/r) = {m:e}, L/(2π) = {cap:e}: {}", verdict(m <= cap));

    let mut worst_bound = 0.0f64;
    for modulus in [0.1, 1.0, 5.0, 20.0] {
        for k in 0..16 {
            let z = Complex64::from_polar(modulus, 2.0 * PI * f64::from(k) / 16.0);
            let bound = entire_bound(l, t, z);
            if bound > 0.0 {
                worst_bound = worst_bound.max(entire_eval(&u, z).norm() / bound);
            }
        }
    }
    println!("entire bound: max |G_e(z)| / bound = {worst_bound:e}: {}", verdict(worst_bound <= 1.0 + 1e-12));

    let gamma = gamma_moments(&g, t, n_max)?;
    let gamma_u = control_moments(&u, n_max)?;
    let mut moments_ok = true;
    println!("{:>4}  {:>24}  {:>24}  {:>24}", "n", "gamma_target", "gamma_control", "residual");
    for (n, (a, b)) in gamma.values.iter().zip(&gamma_u.values).enumerate() {
        moments_ok &= agrees(*a, *b, settings.tol);
        println!("{n:>4}  {a:>24e}  {b:>24e}  {:>24e}", (a - b).abs());
    }

    let transformed = phi_with(&g, settings.tol * 1e-2)?;
    let mut gap = 0.0f64;
    let mut scale = 0.0f64;
    for rho in log_grid(1e-3 / t, 40.0 / t, 200) {
        let want = transformed.eval(rho);
        gap = gap.max((want - entire_eval(&u, Complex64::new(rho, 0.0)).re).abs());
        scale = scale.max(want.abs());
    }
    let transform_ok = gap <= settings.tol * scale;
    println!("transform: max |Φg - G_e| on the real axis = {gap:e} (scale {scale:e})");
    println!(
        "moment/transform match (tol {:e}): {}",
        settings.tol,
        if moments_ok && transform_ok { "MATCHES" } else { "FAILS" }
    );
    Ok(())
}

pub fn transform(settings: &Settings, profile: &Path) -> Outcome {
    let g: RadialProfile = read_json(profile)?;
    print!("{}", to_json(&phi_with(&g, settings.tol)?));
    Ok(())
}

pub fn moments(profile: &Path, t: f64, n_max: u32) -> Outcome {
    let g: RadialProfile = read_json(profile)?;
    print!("{}", to_json(&gamma_moments(&g, t, n_max)?));
    Ok(())
}

// ---------------------------------------------------------------------------
// Worked example

const EXAMPLE_T: f64 = 3.0;
const PUBLISHED_N3_L20: [f64; 4] = [4171487.587754723, -11985246.36814925, 11476859.47814512, -3662827.493025041];
const PUBLISHED_N4_L60: [f64; 5] =
    [12268766670.45946, -48230066041.31739, 71097757825.27233, -46580177228.79937, 11443719610.35109];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Section of the plane field along one axis; x = 0 is skipped because the
// controlled term has a logarithmic singularity there.
fn section(
    target: &RadialProfile,
    state: impl Fn(f64) -> Result<f64, Failure>,
    xs: &[f64],
) -> Result<Vec<Vec<f64>>, Failure> {
    xs.iter()
        .map(|&x| {
            let r = x * x;
            let (g, y) = (target.eval(r), state(r)?);
            Ok(vec![x, g, y, g - y])
        })
        .collect()
}

pub fn example(settings: &Settings) -> Outcome {
    let t = EXAMPLE_T;
    let ctx = BasisContext::new(t)?;
    let g = RadialProfile::exp_mixture([(-0.3, 1.0 / (10.0 * t))])?;
    let grid = residual_grid(t, settings.grid_points);
    let mut failures: Vec<String> = Vec::new();

    println!("target g(r) = -0.3 exp(-r/(10T)), T = {t}");
    let coeffs = expand(&g, ctx, 4)?;
    println!("{:>4}  {:>24}  {:>24}", "n", "g_n", "closed form");
    for (n, &value) in coeffs.g_coeffs.iter().enumerate() {
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        let closed = sign * (3.0f64 / 7.0).powi(n as i32 + 1) * (2.0 * t).sqrt();
        println!("{n:>4}  {value:>24e}  {closed:>24e}");
        if rel(value, closed) > 1e-12 {
            failures.push(format!("g_{n} = {value:e}, expected {closed:e}"));
        }
    }
    write_csv(
        &resolve(&settings.out_dir, "target.csv")?,
        &["r", "value"],
        grid.iter().map(|&r| vec![r, g.eval(r)]),
    )?;

    let xs_line: Vec<f64> = (0..400).map(|i| -10.0 + (f64::from(i) + 0.5) * 0.05).collect();
    let xs_half: Vec<f64> = (1..=200).map(|i| f64::from(i) * 0.05).collect();
    let mut residuals = Vec::new();
    for (n, l, published) in [(3u32, 20u32, &PUBLISHED_N3_L20[..]), (4, 60, &PUBLISHED_N4_L60[..])] {
        let tag = format!("N{n}_l{l}");
        println!();
        println!("(N, l) = ({n}, {l})");
        let c = expand(&g, ctx, n)?;
        for (k, d) in c.d_coeffs.iter().enumerate() {
            println!("  d_{k} = {d:e}");
        }
        let u = synthesize_control(&g, t, n, l)?;
        print_levels(&u);
        for (j, (&got, &want)) in u.levels().iter().zip(published).enumerate() {
            if rel(got, want) > 1e-6 {
                failures.push(format!("({n},{l}) level {j} = {got:e}, published {want:e}"));
            }
        }

        let tail = truncation_tail(&g, ctx, n)?;
        let closed_tail = 1.5 * (t / 5.0).sqrt() * (3.0f64 / 7.0).powi(n as i32 + 1);
        println!("  tail (sum over n > N of g_n^2)^(1/2) = {tail:e}, closed form {closed_tail:e}");
        if rel(tail, closed_tail) > 1e-10 {
            failures.push(format!("({n},{l}) tail {tail:e}, expected {closed_tail:e}"));
        }

        let report = report_on_grid(&g, &u, t, Some((n, l)), &grid)?;
        let budget = report.budget.expect("budget requested");
        println!(
            "  residual {:e} (plane {:e}), budget {:e} = tail {:e} + mollification {:e}",
            report.residual_norm, report.plane_residual, budget.total, budget.tail_term, budget.mollification_term
        );
        if report.residual_norm > budget.total {
            failures.push(format!("({n},{l}) residual {:e} exceeds budget {:e}", report.residual_norm, budget.total));
        }
        residuals.push(report.residual_norm);

        let state = end_state(&u, &RadialProfile::zero(), t, &grid)?;
        let values = sampled_values(&state);
        write_csv(
            &resolve(&settings.out_dir, format!("control_{tag}.csv"))?,
            &["t_start", "t_end", "level"],
            staircase_rows(&u),
        )?;
        write_csv(
            &resolve(&settings.out_dir, format!("end_state_{tag}.csv"))?,
            &["r", "value"],
            grid.iter().zip(values).map(|(&r, &v)| vec![r, v]),
        )?;
        let at = |r: f64| Ok(heat_control::heat::controlled_term(&u, t, r)?);
        write_csv(
            &resolve(&settings.out_dir, format!("section_x2_0_{tag}.csv"))?,
            &["x1", "target", "end_state", "residual"],
            section(&g, at, &xs_line)?,
        )?;
        write_csv(
            &resolve(&settings.out_dir, format!("section_x1_0_{tag}.csv"))?,
            &["x2", "target", "end_state", "residual"],
            section(&g, at, &xs_half)?,
        )?;
        write_json(&resolve(&settings.out_dir, format!("control_{tag}.json"))?, &u)?;
        write_json(&resolve(&settings.out_dir, format!("report_{tag}.json"))?, &report)?;
    }
    if residuals[1] >= residuals[0] {
        failures.push(format!("residual did not decrease: {:e} -> {:e}", residuals[0], residuals[1]));
    }

    println!();
    if failures.is_empty() {
        println!("all regression checks passed; artifacts in {}", settings.out_dir.display());
        Ok(())
    } else {
        for f in &failures {
            println!("regression: {f}");
        }
        Err(Failure::new(EXIT_REGRESSION, anyhow!("{} regression check(s) failed", failures.len())))
    }
}

//! Exit criteria. Each criterion prints one PASS/FAIL line; the process
//! fails if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use waybell_core::bell::{chsh_s, quantum_singlet, ChshSettings, TSIRELSON_BOUND};
use waybell_core::fitting::{deviation_stats, fit_delta_l, Objective, DEFAULT_GRID_SIZE};
use waybell_core::lhv::{
    base_correlation, linspace, single_spin_required_delta_l, single_spin_response,
    way_correlation_singlet, Model, WayParams,
};
use waybell_core::quantum::{qm_correlation, way_numerator};
use waybell_core::sampler::{estimate_correlation, expected_rejection_fraction, SamplerConfig};
use waybell_core::StateKind;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_time(o: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    let ok = elapsed <= limit;
    outcome(
        o.pass && ok,
        format!("{}; runtime {:.3}s (limit {}s)", o.detail, elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn quantum_oracle() -> Outcome {
    let grid = linspace(0.0, TAU, 1000);
    let mut worst = 0.0f64;
    // 1000 (α, β) pairs: α sweeps the grid, β a fixed permutation of it
    for (i, &a) in grid.iter().enumerate() {
        let b = grid[(i * 617 + 13) % grid.len()];
        let e = qm_correlation(StateKind::Singlet, a, b).unwrap();
        worst = worst.max((e + (a - b).cos()).abs());
    }
    outcome(worst <= 1e-12, format!("max |E_qm + cos| = {worst:.3e} (tol 1e-12)"))
}

fn way_numerator_check() -> Outcome {
    let mut worst = 0.0f64;
    for t in linspace(0.0, PI, 1001) {
        let n = way_numerator(StateKind::Singlet, 0.0, t).unwrap();
        worst = worst.max((n - t.sin()).abs());
    }
    outcome(worst <= 1e-10, format!("max |numerator - sin θ| = {worst:.3e} (tol 1e-10)"))
}

fn anchors() -> Outcome {
    let mut bad = Vec::new();
    for dl in [0.5, 0.77, 10.0] {
        for (t, want) in [(0.0, -1.0), (PI / 2.0, 0.0), (PI, 1.0)] {
            let got = way_correlation_singlet(t, dl).unwrap();
            if got != want {
                bad.push(format!("ΔL={dl} θ={t}: {got}"));
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "exact at θ = 0, π/2, π".to_owned() } else { bad.join("; ") })
}

fn calibration() -> Outcome {
    let fit = fit_delta_l(DEFAULT_GRID_SIZE, Objective::ZeroMeanSigned).unwrap();
    let stats = deviation_stats(fit.delta_l_star, DEFAULT_GRID_SIZE).unwrap();
    let in_range = (0.76..=0.78).contains(&fit.delta_l_star);
    let max_ok = (0.025..=0.04).contains(&stats.max_abs_error);
    let lsq = fit_delta_l(DEFAULT_GRID_SIZE, Objective::LeastSquares).unwrap();
    outcome(
        in_range && max_ok,
        format!(
            "zero_mean_signed ΔL* = {:.6} (want [0.76, 0.78]), max_abs_error = {:.5} (want [0.025, 0.04]); \
             info: least_squares ΔL* = {:.6}",
            fit.delta_l_star, stats.max_abs_error, lsq.delta_l_star
        ),
    )
}

fn tsirelson() -> Outcome {
    let way = |dl: f64| {
        let m = Model::Way(WayParams::singlet(dl).unwrap());
        chsh_s(|a, b| m.correlation_at(a, b), &ChshSettings::STANDARD).unwrap().s_value
    };
    let s05 = way(0.5);
    let s077 = way(0.77);
    let q = chsh_s(quantum_singlet, &ChshSettings::STANDARD).unwrap().s_value;
    let base = chsh_s(|a, b| Model::Base.correlation_at(a, b), &ChshSettings::STANDARD)
        .unwrap()
        .s_value;
    let pass = (3.6..=3.68).contains(&s05)
        && s05 > TSIRELSON_BOUND
        && (2.80..=2.85).contains(&s077)
        && (q - TSIRELSON_BOUND).abs() <= 1e-9
        && (base - 2.0).abs() <= 1e-9;
    outcome(pass, format!("S(ΔL=0.5) = {s05:.5}, S(ΔL=0.77) = {s077:.5}, S_qm = {q:.10}, S_base = {base:.10}"))
}

fn physical_floor() -> Outcome {
    let sup = |dl: f64| {
        linspace(0.0, PI, 100_001)
            .into_iter()
            .map(|t| way_correlation_singlet(t, dl).unwrap().abs())
            .fold(0.0, f64::max)
    };
    let (at_floor, below) = (sup(0.5), sup(0.45));
    outcome(at_floor <= 1.0 && below > 1.0, format!("sup|E| at 0.5 = {at_floor}, at 0.45 = {below:.5}"))
}

fn classical_limit() -> Outcome {
    let gap = |dl: f64| {
        linspace(0.0, PI, 100_001)
            .into_iter()
            .map(|t| (way_correlation_singlet(t, dl).unwrap() - base_correlation(t).unwrap()).abs())
            .fold(0.0, f64::max)
    };
    let (g100, g1000) = (gap(100.0), gap(1000.0));
    outcome(g100 <= 0.02 && g1000 <= 0.002, format!("sup gap at 100 = {g100:.3e}, at 1000 = {g1000:.3e}"))
}

fn monte_carlo() -> Outcome {
    let models = [
        Model::Base,
        Model::Way(WayParams::singlet(0.77).unwrap()),
        Model::Way(WayParams::new(1.0, StateKind::TripletPsiPlus).unwrap()),
    ];
    let n = 1_000_000u64;
    let mut failures = Vec::new();
    let mut worst_z = 0.0f64;
    for (mi, model) in models.iter().enumerate() {
        for k in 0..=10u64 {
            let theta = k as f64 * PI / 10.0;
            let cfg = SamplerConfig::new(7_000 + 100 * mi as u64 + k, n);
            let est = estimate_correlation(model, theta, &cfg).unwrap();
            let closed = model.correlation(theta).unwrap();
            let p = expected_rejection_fraction(model, theta);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let mean_ok = (est.mean - closed).abs() <= 4.0 * est.std_error;
            let rej_ok = (est.rejection_fraction() - p).abs() <= 4.0 * sigma;
            if est.std_error > 0.0 {
                worst_z = worst_z.max((est.mean - closed).abs() / est.std_error);
            }
            if !(mean_ok && rej_ok) {
                failures.push(format!("{} θ={theta:.3}", model.id()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("33 cells within 4σ (worst |z| = {worst_z:.2})")
        } else {
            failures.join(", ")
        },
    )
}

fn run_cli(args: &[&str], threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_waybell"))
        .args(args)
        .env("WAYBELL_THREADS", threads)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let runs: &[&[&str]] = &[
        &["mc", "--model", "way_singlet", "--theta", "0.7", "--samples", "300000", "--seed", "9"],
        &["curve", "--state", "singlet,psi_plus,phi_minus"],
        &["curve", "--format", "json", "--theta-points", "97"],
        &["fit"],
        &["chsh", "--model", "way_singlet"],
    ];
    let mut diffs = Vec::new();
    for args in runs {
        let a = run_cli(args, "1");
        let b = run_cli(args, "1");
        let c = run_cli(args, "8");
        if a != b || a != c {
            diffs.push(args[0]);
        }
    }
    outcome(diffs.is_empty(), format!("{} invocations byte-identical across repeats and WAYBELL_THREADS 1/8; differing: {diffs:?}", runs.len()))
}

fn single_spin() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=100 {
        let alpha = k as f64 * PI / 101.0;
        let dl = single_spin_required_delta_l(alpha).unwrap();
        worst = worst.max((single_spin_response(alpha, dl).unwrap() - alpha.cos()).abs());
    }
    let at_zero = single_spin_required_delta_l(0.0).unwrap();
    let at_quarter = single_spin_required_delta_l(PI / 2.0).unwrap();
    let limits_ok = (at_zero - 0.5).abs() <= 1e-6 && (at_quarter - 1.0 / (PI - 2.0)).abs() <= 1e-6;
    outcome(
        worst <= 1e-10 && limits_ok,
        format!("max |response - cos α| = {worst:.3e}; ΔL(0) = {at_zero:.9}, ΔL(π/2) = {at_quarter:.9}"),
    )
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 quantum oracle", Box::new(|| {
            let t = Instant::now();
            let o = quantum_oracle();
            within_time(o, t.elapsed(), Duration::from_secs(1))
        })),
        ("2 WAY-bound numerator", Box::new(|| {
            let t = Instant::now();
            let o = way_numerator_check();
            within_time(o, t.elapsed(), Duration::from_secs(1))
        })),
        ("3 closed-form anchors", Box::new(anchors)),
        ("4 ΔL calibration", Box::new(|| {
            let t = Instant::now();
            let o = calibration();
            within_time(o, t.elapsed(), Duration::from_secs(1))
        })),
        ("5 Tsirelson", Box::new(tsirelson)),
        ("6 physical floor", Box::new(physical_floor)),
        ("7 classical limit", Box::new(classical_limit)),
        ("8 Monte-Carlo equivalence", Box::new(|| {
            let t = Instant::now();
            let o = monte_carlo();
            within_time(o, t.elapsed(), Duration::from_secs(30))
        })),
        ("9 determinism", Box::new(determinism)),
        ("10 single-spin exactness", Box::new(single_spin)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

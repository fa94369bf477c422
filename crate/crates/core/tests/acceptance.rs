//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use growthlab::asymptotics::{classify_infinite_moment, rv_thresholds, sweep_rv_grid, RatioLimit};
use growthlab::config::{ExperimentConfig, Tolerances};
use growthlab::dynamics::{
    integrate_fde, integrate_ode, integrate_vde, self_convergence_ratio, HistoryFunction,
    IntegrationOptions, Problem, Trajectory,
};
use growthlab::measures::{MeasureKernel, PowerLaw, Support};
use growthlab::nonlinearity::Nonlinearity;
use growthlab::report::{trend_verdict, Empirical, Verdict};
use growthlab::runner::run_scenario;
use growthlab::trend::{extrapolate, spearman, tail_window};
use growthlab::Execution;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;

fn scenario(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/acceptance").join(name);
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn run(name: &str) -> Result<Trajectory, String> {
    run_scenario(&scenario(name), None, Execution::Sequential)
        .map(|o| o.trajectory)
        .map_err(|e| e.to_string())
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn window(tr: &Trajectory) -> std::ops::Range<usize> {
    tail_window(tr.len(), 0.3)
}

fn monotone(v: &[f64], increasing: bool) -> bool {
    v.windows(2).all(|w| if increasing { w[1] >= w[0] } else { w[1] <= w[0] })
}

fn unit_powerlaw(alpha: f64) -> MeasureKernel {
    MeasureKernel::new(Support::HalfLine, &[], Some(Arc::new(PowerLaw::normalized(alpha, 1.0).unwrap())))
        .unwrap()
}

fn sup_rel_x(a: &Trajectory, b: &Trajectory) -> f64 {
    a.log_state
        .iter()
        .zip(&b.log_state)
        .map(|(x, y)| (x - y).exp_m1().abs())
        .fold(0.0, f64::max)
}

fn ode_collapse() -> Outcome {
    let o = IntegrationOptions { t_end: 100.0, h: 1.0 / 32.0, ..Default::default() };
    let mut worst: f64 = 0.0;
    for n in [Nonlinearity::sqrt(), Nonlinearity::example(1.0).unwrap(), Nonlinearity::example(2.0).unwrap()] {
        let reference = integrate_ode(&n, 1.0, 1.0, &o).map_err(|e| e.to_string())?;
        let fde = integrate_fde(&n, &MeasureKernel::delay_dirac(1.0).unwrap(), &HistoryFunction::default(), &o)
            .map_err(|e| e.to_string())?;
        let vde = integrate_vde(&n, &MeasureKernel::volterra_dirac(1.0).unwrap(), 1.0, &o)
            .map_err(|e| e.to_string())?;
        worst = worst.max(sup_rel_x(&fde, &reference)).max(sup_rel_x(&vde, &reference));
    }
    check(worst <= 1e-6, format!("sup relative error in x = {worst:.2e} (limit 1e-6)"))
}

fn closed_form() -> Outcome {
    let n = Nonlinearity::sqrt();
    let o = IntegrationOptions { t_end: 100.0, h: 1.0 / 32.0, ..Default::default() };
    let tr = integrate_fde(&n, &MeasureKernel::delay_dirac(1.0).unwrap(), &HistoryFunction::default(), &o)
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for t in [1.0, 10.0, 100.0] {
        let i = tr.times.iter().position(|s| (s - t).abs() < 1e-9).ok_or("grid misses t")?;
        let exact = (1.0 + t / 2.0) * (1.0 + t / 2.0);
        worst = worst.max((tr.log_state[i].exp() / exact - 1.0).abs());
    }
    check(worst <= 1e-6, format!("max relative error at t=1,10,100 = {worst:.2e}"))
}

fn finite_lambda(tr: &Trajectory) -> Outcome {
    let e = (-1f64).exp();
    let r = extrapolate(&tr.times, &tr.ratio, 0.3).limit;
    let d = extrapolate(&tr.times, &tr.lag_diagnostic, 0.3).limit;
    let w = window(tr);
    let dist: Vec<f64> = tr.lag_diagnostic[w.clone()].iter().map(|d| (d + 1.0).abs()).collect();
    let toward = spearman(&tr.times[w], &dist) < 0.0;
    check(
        (0.33..=0.41).contains(&r) && (d + 1.0).abs() <= 0.15 && toward,
        format!("r_extrapolated = {r:.4} (target {e:.4}), d_extrapolated = {d:.4}, d approaching -1: {toward}"),
    )
}

fn zero_lambda(tr: &Trajectory) -> Outcome {
    let r = extrapolate(&tr.times, &tr.ratio, 0.3).limit;
    let inc = monotone(&tr.ratio[window(tr)], true);
    let max = tr.ratio.iter().cloned().fold(0.0, f64::max);
    check(
        inc && r >= 0.93 && max <= 1.0 + 1e-3,
        format!("increasing over window: {inc}, r_extrapolated = {r:.4}, max r = {max:.6}"),
    )
}

fn infinite_lambda(tr: &Trajectory) -> Outcome {
    let dec = monotone(&tr.ratio[window(tr)], false);
    let r_end = tr.final_ratio();
    let c = extrapolate(&tr.times, &tr.correction, 0.3).limit;
    check(
        dec && r_end <= 0.2 && (c - 1.0).abs() <= 0.15,
        format!("decreasing: {dec}, r(T_end) = {r_end:.2e}, c_extrapolated = {c:.4} (target 1)"),
    )
}

fn volterra_finite_moment(tr: &Trajectory) -> Outcome {
    let e = (-1f64).exp();
    let r = extrapolate(&tr.times, &tr.ratio, 0.3).limit;
    check((r - e).abs() <= 0.1 * e, format!("r_extrapolated = {r:.4} (target {e:.4} +/- 10%)"))
}

fn thresholds_and_classification() -> Outcome {
    let th = rv_thresholds(3.0).map_err(|e| e.to_string())?;
    let n = Nonlinearity::example(3.0).unwrap();
    let verdict = |a: f64| classify_infinite_moment(&n, &unit_powerlaw(a)).map(|r| r.1).map_err(|e| e.to_string());
    let (v19, v11, v135) = (verdict(1.9)?, verdict(1.1)?, verdict(1.35)?);
    let rows = sweep_rv_grid(&[2.0, 3.0, 5.0], &[1.05, 1.2, 1.4, 1.55, 1.7, 1.85, 1.95], Execution::Parallel)
        .map_err(|e| e.to_string())?;
    let consistent = rows.iter().filter(|r| r.consistent()).count();
    let decided = rows.iter().filter(|r| matches!(r.numeric, RatioLimit::Unit | RatioLimit::Zero)).count();
    check(
        th == (1.5, 1.25)
            && v19 == RatioLimit::Unit
            && v11 == RatioLimit::Zero
            && v135 == RatioLimit::Indeterminate
            && consistent == rows.len(),
        format!(
            "thresholds {th:?}; 1.9 -> {v19}, 1.1 -> {v11}, 1.35 -> {v135}; grid {consistent}/{} consistent ({decided} decided)",
            rows.len()
        ),
    )
}

fn trend_of(tr: &Trajectory, target: f64) -> Verdict {
    let emp = Empirical::from_trajectory(tr, 0.3);
    trend_verdict(&emp, target, Tolerances::default().trend_factor)
}

fn dynamic_corroboration(unit: &Trajectory, zero: &Trajectory) -> Outcome {
    let vu = trend_of(unit, 1.0);
    let vz = trend_of(zero, 0.0);
    check(
        vu == Verdict::Confirmed && vz == Verdict::Confirmed,
        format!(
            "alpha=1.9: r {:.4} -> {:.4} toward 1 ({vu}); alpha=1.1: r {:.4} -> {:.4} toward 0 ({vz})",
            unit.ratio[window(unit).start],
            unit.final_ratio(),
            zero.ratio[window(zero).start],
            zero.final_ratio()
        ),
    )
}

fn measure_identity() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 50, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strategy = (
        1.2f64..4.0,
        0.1f64..5.0,
        proptest::collection::vec((0.0f64..50.0, 0.01f64..2.0), 0..4),
        0.01f64..1e4,
    );
    let worst = std::cell::Cell::new(0.0f64);
    let result = runner.run(&strategy, |(alpha, scale, atoms, t)| {
        let k = MeasureKernel::new(Support::HalfLine, &atoms, Some(Arc::new(PowerLaw::new(alpha, scale).unwrap())))
            .unwrap();
        let lhs = k.integrated_tail(t).unwrap();
        let rhs = k.partial_moment(t).unwrap() + t * k.tail_mass(t).unwrap();
        let rel = ((lhs - rhs) / lhs).abs();
        worst.set(worst.get().max(rel));
        prop_assert!(rel <= 1e-8, "alpha={alpha} t={t}: {lhs} vs {rhs}");
        Ok(())
    });
    let mut karamata = Vec::new();
    for alpha in [1.3, 1.5, 1.7] {
        let k = unit_powerlaw(alpha);
        let t = 1e5;
        let ratio = k.integrated_tail(t).unwrap() / k.partial_moment(t).unwrap();
        karamata.push((alpha, ratio * (alpha - 1.0)));
    }
    let kara_ok = karamata.iter().all(|(_, q)| (q - 1.0).abs() <= 0.05);
    check(
        result.is_ok() && kara_ok,
        format!(
            "identity worst rel {:.1e} over 50 cases{}; Karamata (alpha-1)*ratio: {}",
            worst.get(),
            result.err().map_or(String::new(), |e| format!(" ({e})")),
            karamata.iter().map(|(a, q)| format!("{a}:{q:.4}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn numerics() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    // F and its inverse
    let mut round: f64 = 0.0;
    let mut deriv: f64 = 0.0;
    for n in [Nonlinearity::sqrt(), Nonlinearity::example(0.5).unwrap(), Nonlinearity::example(3.0).unwrap()] {
        for k in 0..40 {
            let x = 10f64.powf(-1.0 + 0.3 * k as f64);
            let y = n.eval_f_transform(x).unwrap();
            let back = n.inverse_log(y).unwrap().exp();
            round = round.max((back / x - 1.0).abs());
            let step = 1e-4 * x;
            let fd = (n.eval_f_transform(x + step).unwrap() - n.eval_f_transform(x - step).unwrap()) / (2.0 * step);
            deriv = deriv.max((fd * n.f(x) - 1.0).abs());
        }
    }
    ok &= round <= 1e-8 && deriv <= 1e-5;
    notes.push(format!("roundtrip {round:.1e}, F' vs 1/f {deriv:.1e}"));
    // fourth order on a smooth delay problem
    let n = Nonlinearity::example(1.0).unwrap();
    let k = MeasureKernel::new(Support::DelayInterval { tau: 1.0 }, &[(-1.0, 1.0)], None).unwrap();
    let problem = Problem::Fde { kernel: k, history: HistoryFunction::default() };
    let o = IntegrationOptions { t_end: 50.0, h: 1.0 / 32.0, ..Default::default() };
    let ratio = self_convergence_ratio(&n, &problem, &o).map_err(|e| e.to_string())?;
    ok &= (12.0..=20.0).contains(&ratio);
    notes.push(format!("RK4 ratio {ratio:.2}"));
    // reruns and execution modes
    let cfg = scenario("06-vde-example1-powerlaw3.cfg");
    let short = ExperimentConfig { t_end: 300.0, ..cfg };
    let a = run_scenario(&short, None, Execution::Sequential).map_err(|e| e.to_string())?;
    let b = run_scenario(&short, None, Execution::Sequential).map_err(|e| e.to_string())?;
    let c = run_scenario(&short, None, Execution::Parallel).map_err(|e| e.to_string())?;
    let identical = a.trajectory.to_csv_string() == b.trajectory.to_csv_string()
        && a.trajectory.to_csv_string() == c.trajectory.to_csv_string();
    ok &= identical;
    notes.push(format!("bit-identical CSV: {identical}"));
    check(ok, notes.join(", "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let fde1 = run("03-fde-example1-delay1.cfg");
    let fde2 = run("04-fde-example2-delay1.cfg");
    let fde05 = run("05-fde-example05-delay1.cfg");
    let vde1 = run("06-vde-example1-powerlaw3.cfg");
    let vde19 = run("07-vde-example3-powerlaw19.cfg");
    let vde11 = run("08-vde-example3-powerlaw11.cfg");

    let with = |tr: &Result<Trajectory, String>, f: &dyn Fn(&Trajectory) -> Outcome| match tr {
        Ok(t) => f(t),
        Err(e) => Err(format!("integration failed: {e}")),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("ODE collapse", ode_collapse()),
        ("closed-form sqrt solution", closed_form()),
        ("finite lambda, delay kernel", with(&fde1, &finite_lambda)),
        ("zero lambda, delay kernel", with(&fde2, &zero_lambda)),
        ("infinite lambda, delay kernel", with(&fde05, &infinite_lambda)),
        ("Volterra kernel, finite moment", with(&vde1, &volterra_finite_moment)),
        ("regular-variation thresholds", thresholds_and_classification()),
        ("Volterra kernels, infinite moment", match (&vde19, &vde11) {
            (Ok(u), Ok(z)) => dynamic_corroboration(u, z),
            (Err(e), _) | (_, Err(e)) => Err(format!("integration failed: {e}")),
        }),
        ("measure identity and Karamata ratio", measure_identity()),
        ("numerics", numerics()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria passed in {:.1}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

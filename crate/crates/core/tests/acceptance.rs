//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its PASS/FAIL line even when it passes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use costboost::boosters::{solve_csa_alpha, train, Algorithm, CsaParams, TrainConfig, TrainedModel};
use costboost::datagen::{generate, SplitMix64, SynthKind, SynthSpec};
use costboost::domain::{CostSpec, Dataset, Stump};
use costboost::metrics::{bounded_error_trace, exp_bound_trace, prevalence_ratio, BoundVariant, PrevalenceVariant};
use costboost::numerics::golden_minimize;
use costboost::predictors::{f_cga, f_csa, interior_grid, optimal_predictor, risk, RiskVariant};
use costboost::sweep::{run_sweep, write_sweep_csv, SweepRow};
use costboost::weaklearn::build_pool;
use costboost::Parallelism;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn cs(p: f64, n: f64) -> CostSpec {
    CostSpec::new(p, n).unwrap()
}

fn blobs(n_pos: usize, n_neg: usize, seed: u64) -> Dataset {
    generate(&SynthSpec::new(SynthKind::GaussianBlobs, n_pos, n_neg, seed).with_blobs(1.0, 1.0)).unwrap()
}

fn fit(algorithm: Algorithm, rounds: usize, costs: CostSpec, ds: &Dataset) -> TrainedModel {
    let cfg = TrainConfig::new(algorithm, rounds, costs).recording_weights();
    train(&cfg, ds, &build_pool(ds)).unwrap_or_else(|e| panic!("{algorithm} failed: {e}"))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn reduction_models(ds: &Dataset) -> Vec<TrainedModel> {
    const T: usize = 15;
    vec![
        fit(Algorithm::Asymboost, T, cs(2.0, 2.0), ds),
        fit(Algorithm::Csb2, T, cs(1.0, 1.0), ds),
        fit(Algorithm::Adac1, T, cs(1.0, 1.0), ds),
        fit(Algorithm::Adac2, T, cs(1.0, 1.0), ds),
        fit(Algorithm::Adac3, T, cs(1.0, 1.0), ds),
        fit(Algorithm::CsAdaboost, T, cs(1.0, 1.0), ds),
        fit(Algorithm::AdaboostDb, T, cs(1.0, 1.0), ds),
        fit(Algorithm::CostGeneralized, T, cs(3.0, 3.0), ds),
    ]
}

fn criterion_1() -> Check {
    let mut worst_alpha: f64 = 0.0;
    let mut worst_weight: f64 = 0.0;
    for seed in 0..20 {
        let ds = blobs(15, 15, 1000 + seed);
        let base = fit(Algorithm::Adaboost, 15, CostSpec::symmetric(), &ds);
        for model in reduction_models(&ds) {
            let name = model.algorithm;
            ensure!(model.selected == base.selected, "seed {seed}: {name} selected {:?}, adaboost {:?}", model.selected, base.selected);
            let da = max_abs_diff(&model.alphas(), &base.alphas());
            ensure!(da <= 1e-10, "seed {seed}: {name} alpha differs by {da:e}");
            for (t, (w, w0)) in model.weight_history.iter().zip(&base.weight_history).enumerate() {
                let dw = max_abs_diff(w, w0);
                ensure!(dw <= 1e-10, "seed {seed}: {name} round {} weights differ by {dw:e}", t + 1);
                worst_weight = worst_weight.max(dw);
            }
            worst_alpha = worst_alpha.max(da);
        }
    }
    Ok(format!("8 variants x 20 datasets; max |d alpha| {worst_alpha:.1e}, max |d w| {worst_weight:.1e}"))
}

fn criterion_2() -> Check {
    let mut worst: f64 = 0.0;
    for costs in [cs(2.0, 1.0), cs(3.0, 1.0), cs(3.0, 2.0)] {
        for seed in 0..10 {
            let ds = blobs(20, 20, 2000 + seed);
            let csa = fit(Algorithm::CsAdaboost, 20, costs, &ds);
            let db = fit(Algorithm::AdaboostDb, 20, costs, &ds);
            ensure!(
                csa.selected == db.selected,
                "costs {costs:?} seed {seed}: selections differ\n  csa {:?}\n  db  {:?}",
                csa.selected,
                db.selected
            );
            let d = max_abs_diff(&csa.alphas(), &db.alphas());
            ensure!(d < 1e-6, "costs {costs:?} seed {seed}: alpha differs by {d:e}");
            worst = worst.max(d);
        }
    }
    Ok(format!("3 cost pairs x 10 datasets x 20 rounds; max |d alpha| {worst:.1e}"))
}

fn dominated(model: &TrainedModel, ds: &Dataset, variant: BoundVariant) -> Result<(), String> {
    let bound = exp_bound_trace(model, ds, variant).map_err(|e| e.to_string())?;
    let error = bounded_error_trace(model, ds, variant).map_err(|e| e.to_string())?;
    for (t, (b, e)) in bound.iter().zip(&error).enumerate() {
        ensure!(e <= b, "{} {variant:?}: error {e} exceeds bound {b} at prefix {t}", model.algorithm);
    }
    Ok(())
}

fn criterion_3() -> Check {
    let mut checked = 0;
    let mut worst_product: f64 = 0.0;
    for seed in 0..20 {
        let ds = blobs(15, 15, 1000 + seed);
        let base = fit(Algorithm::Adaboost, 15, CostSpec::symmetric(), &ds);
        dominated(&base, &ds, BoundVariant::Symmetric)?;
        let bound = exp_bound_trace(&base, &ds, BoundVariant::Symmetric).map_err(|e| e.to_string())?;
        let mut product = 1.0;
        for (t, r) in base.trace.iter().enumerate() {
            product *= 2.0 * (r.epsilon * (1.0 - r.epsilon)).sqrt();
            let d = (bound[t + 1] - product).abs();
            ensure!(d <= 1e-9, "seed {seed} round {}: bound {} vs product {product}", t + 1, bound[t + 1]);
            ensure!((r.bound - product).abs() <= 1e-9, "seed {seed}: trace bound {} vs {product}", r.bound);
            worst_product = worst_product.max(d);
        }
        checked += 1;
        for model in reduction_models(&ds) {
            dominated(&model, &ds, BoundVariant::Symmetric)?;
            match model.algorithm {
                Algorithm::CostGeneralized => dominated(&model, &ds, BoundVariant::Cga)?,
                Algorithm::CsAdaboost | Algorithm::AdaboostDb => dominated(&model, &ds, BoundVariant::Csa)?,
                _ => {}
            }
            checked += 1;
        }
    }
    for costs in [cs(2.0, 1.0), cs(3.0, 1.0), cs(3.0, 2.0)] {
        for seed in 0..10 {
            let ds = blobs(20, 20, 2000 + seed);
            for algo in [Algorithm::CsAdaboost, Algorithm::AdaboostDb] {
                dominated(&fit(algo, 20, costs, &ds), &ds, BoundVariant::Csa)?;
                checked += 1;
            }
            let cga = fit(Algorithm::CostGeneralized, 20, costs, &ds);
            dominated(&cga, &ds, BoundVariant::Cga)?;
            checked += 1;
        }
    }
    Ok(format!("{checked} models dominated at every prefix; max |bound - prod 2sqrt(e(1-e))| {worst_product:.1e}"))
}

fn criterion_4() -> Check {
    let mut rng = SplitMix64::new(4);
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    while accepted < 100 {
        let c_pos = rng.uniform(0.5, 4.0);
        let c_neg = rng.uniform(0.5, 4.0);
        let mass_pos = rng.uniform(0.1, 0.9);
        let mass_neg = 1.0 - mass_pos;
        let p = CsaParams {
            c_pos,
            c_neg,
            miss_pos: mass_pos * rng.uniform(0.0, 0.6),
            miss_neg: mass_neg * rng.uniform(0.0, 0.6),
            mass_pos,
            mass_neg,
        };
        let Ok(alpha) = solve_csa_alpha(&p) else { continue };
        if alpha > 4.5 {
            continue;
        }
        accepted += 1;
        // 10^6-point grid on [0, 5]
        let n = 1_000_000;
        let (mut best_a, mut best_l) = (0.0, f64::INFINITY);
        for k in 0..=n {
            let a = 5.0 * k as f64 / n as f64;
            let l = costboost::boosters::csa_loss(&p, a);
            if l < best_l {
                best_l = l;
                best_a = a;
            }
        }
        let d = (alpha - best_a).abs();
        ensure!(d <= 1e-5, "{p:?}: bisection {alpha} vs grid {best_a}");
        worst = worst.max(d);
    }
    Ok(format!("100 admissible tuples; max |bisect - grid argmin| {worst:.1e}"))
}

fn criterion_5() -> Check {
    let half_ln2 = 0.5 * 2f64.ln();
    ensure!((f_cga(0.5, &cs(2.0, 1.0)).unwrap() - half_ln2).abs() < 1e-15, "f_cga(0.5; 2,1)");
    ensure!((f_csa(0.5, &cs(2.0, 1.0)).unwrap() - 2f64.ln() / 3.0).abs() < 1e-15, "f_csa(0.5; 2,1)");
    let mut rng = SplitMix64::new(5);
    let mut worst: f64 = 0.0;
    for variant in [RiskVariant::Ab, RiskVariant::Cga, RiskVariant::Csa] {
        for _ in 0..200 {
            let p = rng.uniform(0.02, 0.98);
            let costs = cs(rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0));
            let closed = optimal_predictor(variant, p, &costs).unwrap();
            let numeric = golden_minimize(|f| risk(f, p, &costs, variant), -20.0, 20.0, 1e-10);
            let d = (closed - numeric).abs();
            ensure!(d <= 1e-6, "{variant:?} p={p} {costs:?}: closed {closed} vs golden {numeric}");
            worst = worst.max(d);
        }
    }
    Ok(format!("600 tuples + spot values; max |closed - golden| {worst:.1e}"))
}

fn criterion_6() -> Check {
    let ds = generate(&SynthSpec::new(SynthKind::VjInverted, 100, 100, 6)).unwrap();
    let model = fit(Algorithm::CostGeneralized, 50, cs(4.0, 1.0), &ds);
    let first = model.ensemble.members[0].stump;
    ensure!(first == Stump::Constant { polarity: 1 }, "round 1 selected {first:?}");
    let errs: Vec<(f64, f64)> = model.trace.iter().map(|r| (r.pos_error, r.neg_error)).collect();
    let flat = errs.windows(2).position(|w| w[0] == w[1]);
    ensure!(flat.is_some(), "no flat segment in the class error trace");
    let last = model.trace.last().unwrap();
    ensure!(
        last.pos_error <= last.neg_error,
        "round 50: pos error {} > neg error {}",
        last.pos_error,
        last.neg_error
    );
    Ok(format!(
        "all-positives first; flat from round {}; round 50 pos {:.3} <= neg {:.3}",
        flat.unwrap() + 1,
        last.pos_error,
        last.neg_error
    ))
}

fn criterion_7() -> Check {
    let ds = generate(&SynthSpec::new(SynthKind::GaussianBlobs, 40, 40, 7).with_blobs(6.0, 0.5)).unwrap();
    let costs = cs(2.0, 1.0);
    let csa = fit(Algorithm::CsAdaboost, 100, costs, &ds);
    ensure!(csa.trace.len() == 100, "cs_adaboost stopped after {} rounds", csa.trace.len());
    let (first, last) = (csa.trace[0].pos_mass, csa.trace[99].pos_mass);
    ensure!(last < first, "pos_mass went from {first} to {last}");

    let cga = fit(Algorithm::CostGeneralized, 100, costs, &ds);
    let expected = costs.c_pos / costs.c_neg;
    let gamma = costs.gamma();
    for i in 0..ds.n() {
        let s = cga.ensemble.score_unchecked(ds.row(i));
        let r = prevalence_ratio(s, &costs, PrevalenceVariant::Cga);
        ensure!(r == expected, "ratio {r} at score {s}");
        // class terms of the CGA bound at a shared performance score, in log space
        let direct = ((gamma.ln() - s) - ((1.0 - gamma).ln() - s)).exp();
        ensure!((direct - expected).abs() <= 1e-9 * expected, "bound terms give {direct} at {s}");
    }
    Ok(format!("cs_adaboost pos_mass {first:.3} -> {last:.3e}; CGA ratio fixed at {expected}"))
}

fn criterion_8() -> Check {
    let ds = blobs(20, 20, 8);
    let mut compared = 0;
    for (p, n) in [(2.0, 1.0), (3.0, 1.0), (4.0, 1.0)] {
        let a = fit(Algorithm::CostGeneralized, 20, cs(p, n), &ds);
        let b = fit(Algorithm::CostGeneralized, 20, cs(5.0 * p, 5.0 * n), &ds);
        ensure!(a.selected == b.selected, "({p},{n}): selections change under scaling");
        ensure!(a.alphas() == b.alphas(), "({p},{n}): alphas change under scaling");
        compared += 1;
    }
    let mut changed = 0;
    for costs in [cs(2.0, 1.0), cs(1.0, 3.0), cs(4.0, 1.0)] {
        let scaled = costs.scaled(5.0).unwrap();
        for p in interior_grid(99) {
            let f = f_csa(p, &costs).unwrap();
            if f.abs() < 1e-12 {
                continue;
            }
            let g = f_csa(p, &scaled).unwrap();
            ensure!((f - g).abs() > 1e-12, "f_csa unchanged at p={p} for {costs:?}");
            changed += 1;
        }
    }
    Ok(format!("{compared} CGA runs scale-invariant; f_csa changed at all {changed} nonzero grid points"))
}

fn sweep_once(ds: &Dataset) -> (Vec<SweepRow>, Duration) {
    let start = Instant::now();
    let costs = [cs(1.0, 1.0), cs(2.0, 1.0), cs(4.0, 1.0)];
    let rows = run_sweep(&Algorithm::COST_SENSITIVE, &costs, ds, &build_pool(ds), 50, Parallelism::default());
    (rows, start.elapsed())
}

fn criterion_9() -> Check {
    let ds = generate(&SynthSpec::new(SynthKind::VjCounterexample, 100, 100, 9)).unwrap();
    let (rows, elapsed) = sweep_once(&ds);
    let (again, _) = sweep_once(&ds);
    ensure!(rows.len() == 33, "{} rows", rows.len());
    for r in &rows {
        ensure!(r.is_ok(), "{} {}:{} failed: {}", r.algorithm, r.c_pos, r.c_neg, r.status);
    }
    let strip = |rows: &[SweepRow]| -> Vec<SweepRow> {
        rows.iter().map(|r| SweepRow { runtime_ms: 0.0, ..r.clone() }).collect()
    };
    ensure!(strip(&rows) == strip(&again), "rerun produced different rows");
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv).map_err(|e| e.to_string())?;
    let lines = String::from_utf8(csv).unwrap().lines().count();
    ensure!(lines == 34, "summary CSV has {lines} lines");
    ensure!(elapsed < Duration::from_secs(300), "sweep took {elapsed:?}");
    Ok(format!("33 cells, deterministic rerun, {:.2}s", elapsed.as_secs_f64()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("reduction suite", criterion_1, 30),
        ("CSA and DB equivalence", criterion_2, 120),
        ("bound domination", criterion_3, 600),
        ("CSA alpha solver vs grid", criterion_4, 600),
        ("risk minimizer oracle", criterion_5, 600),
        ("counterexample properties", criterion_6, 60),
        ("asymmetry swap", criterion_7, 600),
        ("scale invariance split", criterion_8, 600),
        ("sweep harness", criterion_9, 300),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{detail} but took {:.1}s (budget {budget}s)", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail}; {:.2}s)", k + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

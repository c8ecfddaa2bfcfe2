//! Acceptance criteria 1 to 9. Each criterion prints one PASS or FAIL line;
//! the process exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use minmax_core::estimators::{
    estimate_gauss_newton, estimate_irls_lp, estimate_minmax, MinMaxOptions,
};
use minmax_core::geometry::{chebyshev_oracle, BoundingBox, MeasurementSet, Point2, Scenario};
use minmax_core::harness::{preset, run_experiment, EstimatorKind, SweepResult};
use minmax_core::sdp_model::stats;
use minmax_core::sdp_solver::{
    check_kkt, instances::kkt_consistent, solve, SolverOptions, SolverStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances, fixed here and nowhere else.
const SOLVER_REL_TOL: f64 = 1e-6;
const SOLVER_KKT_TOL: f64 = 1e-6;
const SOLVER_TIME_MS: f64 = 100.0;
const ORACLE_GRID_M: f64 = 0.25;
const ORACLE_FLOOR_M: f64 = 0.5;
const ORACLE_HALF_WIDTH_M: f64 = 15.0;
const FIG2_BUDGET_S: f64 = 600.0;
const FIG3_SPEARMAN: f64 = 0.7;
const FIG5_RMSE_AT_ONE_M: f64 = 5.0;
const FIG6_RATIO: f64 = 3.0;
const OUTLIER_M: f64 = 100.0;
const OUTLIER_ERROR_M: f64 = 2.0;
const OUTLIER_CONTRAST: f64 = 5.0;
const N_MC: usize = 100;
const SEED: u64 = 42;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn truth() -> Point2 {
    Point2::new(100.0, 100.0)
}

fn criterion_1() -> Verdict {
    let opts = SolverOptions::default();
    let (mut worst_rel, mut worst_kkt, mut slowest_ms) = (0.0f64, 0.0f64, 0.0f64);
    let mut bad = Vec::new();
    for seed in 0..50 {
        let inst = kkt_consistent(seed, 20, 5);
        let start = Instant::now();
        let sol = solve(&inst.program, &opts);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        slowest_ms = slowest_ms.max(ms);
        let Ok(sol) = sol else {
            bad.push(format!("seed {seed}: error"));
            continue;
        };
        let rel = (sol.objective - inst.optimal_value).abs() / inst.optimal_value.abs().max(1.0);
        let kkt = check_kkt(&inst.program, &sol).max_residual();
        worst_rel = worst_rel.max(rel);
        worst_kkt = worst_kkt.max(kkt);
        if sol.status != SolverStatus::Optimal
            || rel > SOLVER_REL_TOL
            || kkt > SOLVER_KKT_TOL
            || ms >= SOLVER_TIME_MS
        {
            bad.push(format!(
                "seed {seed}: {} rel {rel:.1e} kkt {kkt:.1e} {ms:.1} ms",
                sol.status
            ));
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "50 programs, worst relative objective error {worst_rel:.1e}, worst KKT residual {worst_kkt:.1e}, slowest {slowest_ms:.1} ms{}",
            if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join(", ")) }
        ),
    )
}

fn ring(count: usize, radius: f64, phase: f64) -> Vec<Point2> {
    (0..count)
        .map(|i| {
            let a = phase + std::f64::consts::TAU * i as f64 / count as f64;
            Point2::new(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

fn criterion_2() -> Verdict {
    let mut bad = Vec::new();
    for m in 1..=4 {
        for l in 1..=5 {
            let sc = Scenario::new(ring(m, 300.0, 0.3), ring(l, 550.0, 1.1)).unwrap();
            let s = stats(&sc).unwrap();
            if s.n_var != 8 + 2 * m + l {
                bad.push(format!("({m},{l}): {} variables", s.n_var));
            }
        }
    }
    let s = stats(&Scenario::reference()).unwrap();
    let ok = bad.is_empty() && s.n_sd_formula == 39;
    verdict(
        ok,
        format!(
            "variable count 8+2M+L on all 20 shapes{}; cone formula at (3,4) = {} (built program has {} cones)",
            if bad.is_empty() { String::new() } else { format!(" except {}", bad.join(", ")) },
            s.n_sd_formula,
            s.n_sd_census
        ),
    )
}

fn criterion_3() -> Verdict {
    let sc = Scenario::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let targets: Vec<Point2> = (0..10)
        .map(|_| Point2::new(rng.random_range(0.0..200.0), rng.random_range(0.0..200.0)))
        .collect();
    let bound = (2.0 * ORACLE_GRID_M).max(ORACLE_FLOOR_M);
    let (mut worst, mut misses) = (0.0f64, Vec::new());
    for (i, &x) in targets.iter().enumerate() {
        let ranges = sc.ranges_for(x);
        for rho in [0.5, 1.0, 2.0] {
            let est = match estimate_minmax(&sc, &ranges, &MinMaxOptions::with_rho(rho)) {
                Ok(e) => e,
                Err(e) => {
                    misses.push(format!("target {i} rho {rho}: {e}"));
                    continue;
                }
            };
            let meas = MeasurementSet::new(ranges.clone(), rho).unwrap();
            let oracle = chebyshev_oracle(
                &sc,
                &meas,
                BoundingBox::square(x, ORACLE_HALF_WIDTH_M),
                ORACLE_GRID_M,
            )
            .unwrap();
            let d = est.position.distance(&oracle.center);
            worst = worst.max(d);
            if d > bound {
                let g = est.diagnostics.relaxation_gap.unwrap_or_default();
                println!(
                    "  criterion 3 miss: target {i} ({:.2}, {:.2}) rho {rho}: estimate {} oracle {} distance {d:.3} m, \
                     oracle radius {:.3} m, gap lambda {:.3e} range_square {:.3e} range {:.3e}",
                    x.x, x.y, est.position, oracle.center, oracle.radius, g.lambda, g.range_square, g.range
                );
                misses.push(format!("target {i} rho {rho}"));
            }
        }
    }
    verdict(
        misses.is_empty(),
        format!(
            "30 instances, bound {bound} m, worst distance to grid center {worst:.3} m, {} over bound",
            misses.len()
        ),
    )
}

fn sweep(name: &str, estimators: Vec<EstimatorKind>) -> (SweepResult, f64) {
    let mut cfg = preset(name).unwrap();
    cfg.n_mc = N_MC;
    cfg.base_seed = SEED;
    cfg.estimators = estimators;
    let start = Instant::now();
    let res = run_experiment(&cfg).unwrap();
    (res, start.elapsed().as_secs_f64())
}

fn fmt_series(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn criterion_4() -> Verdict {
    let (res, secs) = sweep(
        "fig2",
        vec![EstimatorKind::MinMax, EstimatorKind::GaussNewton],
    );
    let betas = res.values();
    let mm = res.series("min-max");
    let gn = res.series("gauss-newton");
    let trend = mm[betas.len() - 1] < mm[0];
    let losses: Vec<String> = betas
        .iter()
        .zip(mm.iter().zip(&gn))
        .filter(|(b, (m, g))| **b <= 0.8 + 1e-12 && m > g)
        .map(|(b, _)| format!("{b}"))
        .collect();
    verdict(
        trend && losses.is_empty() && secs < FIG2_BUDGET_S,
        format!(
            "min-max [{}], gauss-newton [{}]; beta 0.9 below 0.1: {trend}; min-max above gauss-newton at beta {{{}}}; {secs:.1} s",
            fmt_series(&mm),
            fmt_series(&gn),
            losses.join(", ")
        ),
    )
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn criterion_5() -> Verdict {
    let all = preset("fig3").unwrap().estimators;
    let (res, _) = sweep("fig3", all.clone());
    let mu = res.values();
    let mut parts = Vec::new();
    let mut minmax_rho = f64::NAN;
    for e in &all {
        let s = res.series(&e.tag());
        let r = spearman(&mu, &s);
        if *e == EstimatorKind::MinMax {
            minmax_rho = r;
        }
        parts.push(format!("{e} {r:.2}"));
    }
    verdict(
        minmax_rho > FIG3_SPEARMAN,
        format!(
            "Spearman correlation with mu_check: {}; min-max [{}]",
            parts.join(", "),
            fmt_series(&res.series("min-max"))
        ),
    )
}

fn criterion_6() -> Verdict {
    let (res, _) = sweep("fig5", vec![EstimatorKind::MinMax]);
    let sig = res.values();
    let mm = res.series("min-max");
    let at_one = sig
        .iter()
        .position(|&s| s == 1.0)
        .map(|i| mm[i])
        .unwrap_or(f64::NAN);
    let monotone = mm.windows(2).all(|w| w[1] > w[0]);
    verdict(
        at_one < FIG5_RMSE_AT_ONE_M && monotone,
        format!(
            "min-max [{}] over sigma [{}]; at sigma 1: {at_one:.3} m; strictly increasing: {monotone}",
            fmt_series(&mm),
            fmt_series(&sig)
        ),
    )
}

fn criterion_7() -> Verdict {
    let (res, _) = sweep("fig6", vec![EstimatorKind::MinMax]);
    let mm = res.series("min-max");
    let (first, last) = (mm[0], mm[mm.len() - 1]);
    verdict(
        last <= FIG6_RATIO * first,
        format!(
            "min-max [{}]; ratio 5 / ratio 1 = {:.2}",
            fmt_series(&mm),
            last / first
        ),
    )
}

fn criterion_8() -> Verdict {
    let sc = Scenario::reference();
    let x = truth();
    let mut ranges = sc.ranges_for(x);
    ranges[(0, 0)] += OUTLIER_M;
    let init = sc.centroid();
    let mm = estimate_minmax(&sc, &ranges, &MinMaxOptions::with_rho(OUTLIER_M))
        .map(|e| e.position.distance(&x))
        .unwrap_or(f64::INFINITY);
    let lad = estimate_irls_lp(&sc, &ranges, 1.0, init, 100, 1e-9, 1e-6)
        .map(|e| e.position.distance(&x))
        .unwrap_or(f64::INFINITY);
    let gn = estimate_gauss_newton(&sc, &ranges, init, 100, 1e-9)
        .map(|e| e.position.distance(&x))
        .unwrap_or(f64::INFINITY);
    let ok = mm < OUTLIER_ERROR_M && lad < OUTLIER_ERROR_M && gn > OUTLIER_CONTRAST * mm.max(lad);
    verdict(
        ok,
        format!("errors with one +{OUTLIER_M} m outlier and rho_hat {OUTLIER_M} m: min-max {mm:.3} m, irls-p1 {lad:.3} m, gauss-newton {gn:.3} m"),
    )
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_minmax-loc");
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let path = dir.path().join(format!("fig2_w{workers}.csv"));
        let status = Command::new(exe)
            .args([
                "run",
                "--preset",
                "fig2",
                "--seed",
                "42",
                "--workers",
                workers,
                "--out",
            ])
            .arg(&path)
            .status()
            .unwrap();
        if !status.success() {
            return verdict(
                false,
                format!("run with {workers} workers exited with {status}"),
            );
        }
        outputs.push(std::fs::read(&path).unwrap());
    }
    let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
    verdict(
        same,
        format!(
            "fig2 seed 42 with 1 and 4 workers: {} bytes, identical: {same}",
            outputs[0].len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("solver recovers constructed optima", criterion_1),
        ("builder census", criterion_2),
        ("min-max matches the grid Chebyshev center", criterion_3),
        (
            "fig2 beta trend and comparison with gauss-newton",
            criterion_4,
        ),
        ("fig3 RMSE rises with mu_check", criterion_5),
        ("fig5 pure Gaussian noise", criterion_6),
        ("fig6 sensitivity to rho_hat / rho", criterion_7),
        ("single outlier contrast", criterion_8),
        ("determinism across worker counts", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

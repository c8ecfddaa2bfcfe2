use crate::estimators::{estimate_gauss_newton, estimate_irls_lp, estimate_minmax, MinMaxOptions};
use crate::geometry::{bistatic_range, Point2, Scenario};
use crate::noise::GaussianMixtureModel;
use crate::sdp_solver::{check_kkt, instances::kkt_consistent, solve, SolverOptions, SolverStatus};

use super::{preset, run_experiment, to_csv_string, EstimatorKind};

/// Result of one built-in invariant check.
#[derive(Clone, Debug, PartialEq)]
pub struct SelftestCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> SelftestCheck {
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    SelftestCheck {
        name,
        passed,
        detail,
    }
}

/// Quick versions of the solver, estimator and harness invariants, for use
/// on a deployed binary.
pub fn selftest() -> Vec<SelftestCheck> {
    let sc = Scenario::reference();
    let truth = Point2::new(100.0, 100.0);
    let clean = sc.ranges_for(truth);
    vec![
        check("bistatic range of the reference geometry", || {
            let br = bistatic_range(truth, sc.transmitters[0], sc.receivers[0]);
            let want = 500.0 + 550.0 * 2f64.sqrt();
            if (br - want).abs() <= 1e-9 {
                Ok(format!("{br:.4} m"))
            } else {
                Err(format!("{br} != {want}"))
            }
        }),
        check("solver recovers known optima", || {
            let opts = SolverOptions::default();
            let mut worst = 0.0f64;
            for seed in 0..10 {
                let inst = kkt_consistent(seed, 20, 5);
                let sol = solve(&inst.program, &opts).map_err(|e| e.to_string())?;
                if sol.status != SolverStatus::Optimal {
                    return Err(format!("seed {seed}: {}", sol.status));
                }
                let rel =
                    (sol.objective - inst.optimal_value).abs() / inst.optimal_value.abs().max(1.0);
                worst = worst
                    .max(rel)
                    .max(check_kkt(&inst.program, &sol).max_residual());
            }
            if worst <= 1e-6 {
                Ok(format!("worst relative error {worst:.1e}"))
            } else {
                Err(format!("worst relative error {worst:.1e}"))
            }
        }),
        check("noise draws are reproducible", || {
            let m =
                GaussianMixtureModel::new(0.5, 0.0, 1.0, 20.0, 1.0).map_err(|e| e.to_string())?;
            let a = m.sample(3, 4, 99).map_err(|e| e.to_string())?;
            let b = m.sample(3, 4, 99).map_err(|e| e.to_string())?;
            if a == b {
                Ok("identical".into())
            } else {
                Err("differ".into())
            }
        }),
        check("min-max is accurate on noiseless ranges", || {
            let est = estimate_minmax(&sc, &clean, &MinMaxOptions::with_rho(0.5))
                .map_err(|e| e.to_string())?;
            let err = est.position.distance(&truth);
            if err <= 0.5 {
                Ok(format!("error {err:.3} m"))
            } else {
                Err(format!("error {err:.3} m"))
            }
        }),
        check("min-max is invariant to sensor relabeling", || {
            let opts = MinMaxOptions::with_rho(1.0);
            let a = estimate_minmax(&sc, &clean, &opts).map_err(|e| e.to_string())?;
            let mut rev = sc.clone();
            rev.transmitters.reverse();
            rev.receivers.reverse();
            let ranges = rev.ranges_for(truth);
            let b = estimate_minmax(&rev, &ranges, &opts).map_err(|e| e.to_string())?;
            let d = a.position.distance(&b.position);
            if d <= 1e-9 {
                Ok(format!("difference {d:.1e} m"))
            } else {
                Err(format!("difference {d:.1e} m"))
            }
        }),
        check("IRLS with p = 2 equals Gauss-Newton", || {
            let mut noisy = clean.clone();
            noisy[(1, 2)] += 7.0;
            let init = sc.centroid();
            let gn =
                estimate_gauss_newton(&sc, &noisy, init, 100, 1e-9).map_err(|e| e.to_string())?;
            let ir = estimate_irls_lp(&sc, &noisy, 2.0, init, 100, 1e-9, 1e-6)
                .map_err(|e| e.to_string())?;
            let d = gn.position.distance(&ir.position);
            if d <= 1e-8 {
                Ok(format!("difference {d:.1e} m"))
            } else {
                Err(format!("difference {d:.1e} m"))
            }
        }),
        check("experiments are independent of worker count", || {
            let mut cfg = preset("fig2").map_err(|e| e.to_string())?;
            cfg.n_mc = 3;
            cfg.sweep.values.truncate(2);
            cfg.estimators = vec![EstimatorKind::MinMax, EstimatorKind::GaussNewton];
            cfg.workers = Some(1);
            let a = run_experiment(&cfg).map_err(|e| e.to_string())?;
            cfg.workers = Some(4);
            let b = run_experiment(&cfg).map_err(|e| e.to_string())?;
            if to_csv_string(&a) == to_csv_string(&b) {
                Ok("byte-identical CSV".into())
            } else {
                Err("CSV differs between 1 and 4 workers".into())
            }
        }),
    ]
}

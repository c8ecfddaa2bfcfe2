//! Monte Carlo RMSE experiments under Gaussian-mixture range errors.
//!
//! Every trial draws its noise from a seed derived from
//! `(base_seed, sweep index, trial)`, runs all configured estimators on the
//! same ranges and reports one squared error per estimator. Trials run on a
//! rayon pool and are summed in trial order afterwards, so results do not
//! depend on the worker count.

mod config;
mod csv_io;
mod selftest;

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

pub use config::{
    preset, EstimatorKind, EstimatorSettings, ExperimentConfig, Sweep, SweepParam, PRESETS,
};
pub use csv_io::{emit_csv, parse_csv, to_csv_string, write_gnuplot, CsvRow};
pub use selftest::{selftest, SelftestCheck};

use crate::estimators::{
    estimate_gauss_newton, estimate_irls_lp, estimate_minmax, Estimate, EstimateError,
    MinMaxOptions,
};
use crate::noise::derive_seed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed results file: {0}")]
    Parse(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Aggregate for one estimator at one sweep value.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub estimator: String,
    /// NaN when every trial failed.
    pub rmse_m: f64,
    pub failures: usize,
    pub trials: usize,
    /// `None` unless timing was requested.
    pub mean_solve_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub param: SweepParam,
    /// Ordered by sweep value, then by estimator in config order.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if out.last() != Some(&r.value) {
                out.push(r.value);
            }
        }
        out
    }

    /// RMSE series of one estimator across the sweep.
    pub fn series(&self, estimator: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.estimator == estimator)
            .map(|r| r.rmse_m)
            .collect()
    }

    pub fn row(&self, value: f64, estimator: &str) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.value == value && r.estimator == estimator)
    }
}

/// Outcome of one estimator on one trial.
#[derive(Clone, Copy, Debug)]
struct TrialOutcome {
    squared_error: Option<f64>,
    millis: f64,
}

/// Worker count used when neither the config nor the caller sets one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let workers = cfg.workers.unwrap_or_else(default_workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;

    let points: Vec<ExperimentConfig> = cfg
        .sweep
        .values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            c.apply(cfg.sweep.param, v).map_err(HarnessError::Config)?;
            Ok(c)
        })
        .collect::<Result<_, HarnessError>>()?;

    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| (0..cfg.n_mc).map(move |n| (i, n)))
        .collect();
    let outcomes: Vec<Vec<TrialOutcome>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, n)| run_trial(&points[i], derive_seed(cfg.base_seed, i as u64, n as u64)))
            .collect()
    });

    let mut rows = Vec::with_capacity(points.len() * cfg.estimators.len());
    for (i, &value) in cfg.sweep.values.iter().enumerate() {
        let trials = &outcomes[i * cfg.n_mc..(i + 1) * cfg.n_mc];
        for (k, est) in cfg.estimators.iter().enumerate() {
            let (mut sum, mut ok, mut ms) = (0.0, 0usize, 0.0);
            for t in trials {
                ms += t[k].millis;
                if let Some(e2) = t[k].squared_error {
                    sum += e2;
                    ok += 1;
                }
            }
            let failures = cfg.n_mc - ok;
            if failures > 0 {
                log::warn!(
                    "{} = {value}: {est} failed on {failures}/{} trials",
                    cfg.sweep.param,
                    cfg.n_mc
                );
            }
            rows.push(SweepRow {
                value,
                estimator: est.tag(),
                rmse_m: if ok > 0 {
                    (sum / ok as f64).sqrt()
                } else {
                    f64::NAN
                },
                failures,
                trials: cfg.n_mc,
                mean_solve_ms: cfg.record_timing.then(|| ms / cfg.n_mc as f64),
            });
        }
    }
    Ok(SweepResult {
        param: cfg.sweep.param,
        rows,
    })
}

/// Ranges and the error bound seen by min-max for one trial.
pub fn trial_data(cfg: &ExperimentConfig, seed: u64) -> (DMatrix<f64>, f64) {
    let sc = &cfg.scenario;
    let realization = cfg
        .noise
        .sample(sc.m(), sc.l(), seed)
        .expect("validated noise model");
    let mut ranges = sc.ranges_for(cfg.target_m);
    let rho = if cfg.noise_free {
        cfg.rho_fixed_m.unwrap_or(0.0)
    } else {
        ranges += &realization.errors;
        cfg.rho_fixed_m
            .unwrap_or_else(|| realization.realized_bound())
    };
    (ranges, cfg.rho_ratio * rho)
}

fn run_trial(cfg: &ExperimentConfig, seed: u64) -> Vec<TrialOutcome> {
    let (ranges, rho_hat) = trial_data(cfg, seed);
    cfg.estimators
        .iter()
        .map(|est| {
            let start = cfg.record_timing.then(Instant::now);
            let result = run_estimator(cfg, *est, &ranges, rho_hat);
            let millis = start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3);
            let squared_error = match result {
                Ok(e) if e.position.is_finite() => Some(e.position.distance(&cfg.target_m).powi(2)),
                Ok(_) => None,
                Err(err) => {
                    log::debug!("{est} failed on seed {seed}: {err}");
                    None
                }
            };
            TrialOutcome {
                squared_error,
                millis,
            }
        })
        .collect()
}

/// Runs one estimator with the config's settings. Baselines start from the
/// sensor centroid.
pub fn run_estimator(
    cfg: &ExperimentConfig,
    kind: EstimatorKind,
    ranges: &DMatrix<f64>,
    rho_hat: f64,
) -> Result<Estimate, EstimateError> {
    let s = &cfg.settings;
    let init = cfg.scenario.centroid();
    match kind {
        EstimatorKind::MinMax => {
            let opts = MinMaxOptions {
                rho_hat,
                infeasibility_inflation: s.infeasibility_inflation,
                max_inflations: s.max_inflations,
                ..MinMaxOptions::default()
            };
            estimate_minmax(&cfg.scenario, ranges, &opts)
        }
        EstimatorKind::GaussNewton => estimate_gauss_newton(
            &cfg.scenario,
            ranges,
            init,
            s.baseline_max_iter,
            s.baseline_tol_m,
        ),
        EstimatorKind::Irls { p } => estimate_irls_lp(
            &cfg.scenario,
            ranges,
            p,
            init,
            s.baseline_max_iter,
            s.baseline_tol_m,
            s.irls_epsilon_m,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: &str, n_mc: usize) -> ExperimentConfig {
        let mut cfg = preset(name).unwrap();
        cfg.n_mc = n_mc;
        cfg.base_seed = 7;
        cfg
    }

    #[test]
    fn noise_free_single_trial_is_accurate() {
        let mut cfg = small("fig2", 1);
        cfg.noise_free = true;
        cfg.rho_fixed_m = Some(0.5);
        cfg.estimators = vec![EstimatorKind::MinMax];
        cfg.sweep.values = vec![0.5];
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert!(res.rows[0].rmse_m < 0.5, "{:?}", res.rows[0]);
        assert_eq!(res.rows[0].failures, 0);
    }

    #[test]
    fn result_is_independent_of_worker_count() {
        let mut cfg = small("fig6", 4);
        cfg.sweep.values.truncate(2);
        cfg.workers = Some(1);
        let a = run_experiment(&cfg).unwrap();
        cfg.workers = Some(3);
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(to_csv_string(&a), to_csv_string(&b));
    }

    #[test]
    fn rows_follow_sweep_then_estimator_order() {
        let mut cfg = small("fig3", 2);
        cfg.sweep.values = vec![11.0, 15.0];
        cfg.estimators = vec![EstimatorKind::GaussNewton, EstimatorKind::Irls { p: 1.0 }];
        let res = run_experiment(&cfg).unwrap();
        let keys: Vec<(f64, &str)> = res
            .rows
            .iter()
            .map(|r| (r.value, r.estimator.as_str()))
            .collect();
        assert_eq!(
            keys,
            vec![
                (11.0, "gauss-newton"),
                (11.0, "irls-p1"),
                (15.0, "gauss-newton"),
                (15.0, "irls-p1")
            ]
        );
        assert_eq!(res.values(), vec![11.0, 15.0]);
        assert!(res
            .rows
            .iter()
            .all(|r| r.rmse_m >= 0.0 && r.mean_solve_ms.is_none()));
    }

    #[test]
    fn estimators_share_the_trial_noise() {
        // GN and IRLS with p = 2 are the same algorithm, so identical data
        // must give identical RMSE.
        let mut cfg = small("fig2", 3);
        cfg.sweep.values = vec![0.3];
        cfg.estimators = vec![EstimatorKind::GaussNewton, EstimatorKind::Irls { p: 2.0 }];
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.rows[0].rmse_m, res.rows[1].rmse_m);
    }

    #[test]
    fn ratio_scales_the_realized_bound() {
        let mut cfg = small("fig6", 1);
        let (_, rho) = trial_data(&cfg, 11);
        cfg.apply(SweepParam::RhoRatio, 3.0).unwrap();
        let (_, rho3) = trial_data(&cfg, 11);
        assert!((rho3 - 3.0 * rho).abs() <= 1e-12 * rho3);
        cfg.rho_fixed_m = Some(2.0);
        assert_eq!(trial_data(&cfg, 11).1, 6.0);
    }
}

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::estimators::{irls_tag, GAUSS_NEWTON_TAG, MINMAX_TAG};
use crate::geometry::{Point2, Scenario};
use crate::noise::GaussianMixtureModel;

use super::HarnessError;

/// Parameter varied along the x-axis of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Beta,
    MuCheck,
    SigmaCheck,
    Sigma,
    /// `ρ̂/ρ`, the over-estimation factor handed to min-max.
    RhoRatio,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Beta => "beta",
            SweepParam::MuCheck => "mu_check",
            SweepParam::SigmaCheck => "sigma_check",
            SweepParam::Sigma => "sigma",
            SweepParam::RhoRatio => "rho_ratio",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "beta" => SweepParam::Beta,
            "mu_check" => SweepParam::MuCheck,
            "sigma_check" => SweepParam::SigmaCheck,
            "sigma" => SweepParam::Sigma,
            "rho_ratio" => SweepParam::RhoRatio,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown sweep parameter `{other}`"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// One estimator in the comparison, named in configs as `min-max`,
/// `gauss-newton` or `irls-p<p>` (e.g. `irls-p1`, `irls-p1.5`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EstimatorKind {
    MinMax,
    GaussNewton,
    Irls { p: f64 },
}

impl EstimatorKind {
    pub fn tag(&self) -> String {
        match self {
            EstimatorKind::MinMax => MINMAX_TAG.to_string(),
            EstimatorKind::GaussNewton => GAUSS_NEWTON_TAG.to_string(),
            EstimatorKind::Irls { p } => irls_tag(*p),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for EstimatorKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == MINMAX_TAG {
            return Ok(EstimatorKind::MinMax);
        }
        if s == GAUSS_NEWTON_TAG {
            return Ok(EstimatorKind::GaussNewton);
        }
        if let Some(p) = s.strip_prefix("irls-p") {
            let p: f64 = p
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad IRLS exponent in `{s}`")))?;
            if !(p > 0.0 && p <= 2.0) {
                return Err(HarnessError::Config(format!(
                    "IRLS exponent must lie in (0, 2], got {p}"
                )));
            }
            return Ok(EstimatorKind::Irls { p });
        }
        Err(HarnessError::Config(format!("unknown estimator `{s}`")))
    }
}

impl TryFrom<String> for EstimatorKind {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<EstimatorKind> for String {
    fn from(k: EstimatorKind) -> String {
        k.tag()
    }
}

/// Iteration limits shared by the estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSettings {
    pub baseline_max_iter: usize,
    pub baseline_tol_m: f64,
    pub irls_epsilon_m: f64,
    pub infeasibility_inflation: f64,
    pub max_inflations: usize,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            baseline_max_iter: 100,
            baseline_tol_m: 1e-9,
            irls_epsilon_m: 1e-6,
            infeasibility_inflation: 2.0,
            max_inflations: 6,
        }
    }
}

fn default_rho_ratio() -> f64 {
    1.0
}

/// A complete Monte Carlo experiment, loadable from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub target_m: Point2,
    pub noise: GaussianMixtureModel,
    pub sweep: Sweep,
    pub estimators: Vec<EstimatorKind>,
    pub n_mc: usize,
    pub base_seed: u64,
    /// Error bound handed to min-max is `rho_ratio · ρ`, where `ρ` is this
    /// value if set and the realized `max |e|` of each trial otherwise.
    #[serde(default)]
    pub rho_fixed_m: Option<f64>,
    #[serde(default = "default_rho_ratio")]
    pub rho_ratio: f64,
    /// Replace every noise draw by zero (for sanity runs).
    #[serde(default)]
    pub noise_free: bool,
    #[serde(default)]
    pub settings: EstimatorSettings,
    /// Wall-clock timing makes output nondeterministic, so it is opt-in.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub gnuplot: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        self.scenario
            .validate_strict()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if !self.target_m.is_finite() {
            return bad("target position must be finite".into());
        }
        self.noise
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.sweep.values.is_empty() {
            return bad("sweep values must be nonempty".into());
        }
        if self.n_mc == 0 {
            return bad("n_mc must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        for &v in &self.sweep.values {
            let mut probe = self.clone();
            probe.sweep.values.clear();
            probe
                .apply(self.sweep.param, v)
                .map_err(HarnessError::Config)?;
        }
        if let Some(r) = self.rho_fixed_m {
            if !(r.is_finite() && r >= 0.0) {
                return bad(format!("rho_fixed_m must be >= 0, got {r}"));
            }
        }
        if !(self.rho_ratio.is_finite() && self.rho_ratio >= 0.0) {
            return bad(format!("rho_ratio must be >= 0, got {}", self.rho_ratio));
        }
        let s = &self.settings;
        if s.baseline_max_iter == 0 || !(s.baseline_tol_m > 0.0) || !(s.irls_epsilon_m >= 0.0) {
            return bad("baseline iteration settings must be positive".into());
        }
        if !(s.infeasibility_inflation > 1.0) {
            return bad("infeasibility_inflation must exceed 1".into());
        }
        Ok(())
    }

    /// Sets `param` to `value` on this config's noise model or ratio.
    pub(crate) fn apply(&mut self, param: SweepParam, value: f64) -> Result<(), String> {
        match param {
            SweepParam::Beta => self.noise.beta = value,
            SweepParam::MuCheck => self.noise.mu_check = value,
            SweepParam::SigmaCheck => self.noise.sigma_check = value,
            SweepParam::Sigma => self.noise.sigma = value,
            SweepParam::RhoRatio => {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(format!("rho_ratio must be >= 0, got {value}"));
                }
                self.rho_ratio = value;
            }
        }
        self.noise
            .validate()
            .map_err(|e| format!("{param} = {value}: {e}"))
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

fn steps(start: f64, step: f64, count: usize) -> Vec<f64> {
    // Integer multiples keep values such as 0.3 exact to the printed digit.
    (0..count)
        .map(|i| ((start + step * i as f64) * 1e9).round() / 1e9)
        .collect()
}

/// The five Monte Carlo studies on the reference geometry with target at
/// (100, 100). Ranges for `fig4` (σ̌ in 1..10 m) and `fig5` (σ in
/// 0.5..3 m) are defaults chosen to show the trend, not read off a figure.
pub fn preset(name: &str) -> Result<ExperimentConfig, HarnessError> {
    let base_noise = GaussianMixtureModel {
        beta: 0.5,
        mu: 0.0,
        sigma: 1.0,
        mu_check: 20.0,
        sigma_check: 1.0,
    };
    let (noise, sweep) = match name {
        "fig2" => (
            base_noise,
            Sweep {
                param: SweepParam::Beta,
                values: steps(0.1, 0.1, 9),
            },
        ),
        "fig3" => (
            base_noise,
            Sweep {
                param: SweepParam::MuCheck,
                values: steps(11.0, 1.0, 10),
            },
        ),
        "fig4" => (
            base_noise,
            Sweep {
                param: SweepParam::SigmaCheck,
                values: steps(1.0, 1.0, 10),
            },
        ),
        "fig5" => (
            GaussianMixtureModel {
                beta: 1.0,
                ..base_noise
            },
            Sweep {
                param: SweepParam::Sigma,
                values: steps(0.5, 0.5, 6),
            },
        ),
        "fig6" => (
            base_noise,
            Sweep {
                param: SweepParam::RhoRatio,
                values: steps(1.0, 1.0, 5),
            },
        ),
        other => {
            return Err(HarnessError::Config(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(ExperimentConfig {
        scenario: Scenario::reference(),
        target_m: Point2::new(100.0, 100.0),
        noise,
        sweep,
        estimators: vec![
            EstimatorKind::MinMax,
            EstimatorKind::GaussNewton,
            EstimatorKind::Irls { p: 1.0 },
            EstimatorKind::Irls { p: 1.5 },
        ],
        n_mc: 100,
        base_seed: 0,
        rho_fixed_m: None,
        rho_ratio: 1.0,
        noise_free: false,
        settings: EstimatorSettings::default(),
        record_timing: false,
        output: None,
        gnuplot: None,
        workers: None,
    })
}

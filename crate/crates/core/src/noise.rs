//! Two-component Gaussian mixture range errors.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("mixture weight beta must lie in [0, 1], got {0}")]
    InvalidWeight(f64),
    #[error("standard deviation {name} must be positive and finite, got {value}")]
    InvalidSigma { name: &'static str, value: f64 },
    #[error("mean {0} must be finite")]
    NonFiniteMean(&'static str),
    #[error("realization must have at least one row and column")]
    EmptyShape,
}

/// `e ~ beta·N(mu, sigma²) + (1 − beta)·N(mu_check, sigma_check²)`.
///
/// The second component models NLOS outliers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureModel {
    pub beta: f64,
    #[serde(rename = "mu_m")]
    pub mu: f64,
    #[serde(rename = "sigma_m")]
    pub sigma: f64,
    #[serde(rename = "mu_check_m")]
    pub mu_check: f64,
    #[serde(rename = "sigma_check_m")]
    pub sigma_check: f64,
}

impl GaussianMixtureModel {
    pub fn new(
        beta: f64,
        mu: f64,
        sigma: f64,
        mu_check: f64,
        sigma_check: f64,
    ) -> Result<Self, NoiseError> {
        let model = Self {
            beta,
            mu,
            sigma,
            mu_check,
            sigma_check,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(NoiseError::InvalidWeight(self.beta));
        }
        for (name, value) in [("sigma", self.sigma), ("sigma_check", self.sigma_check)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(NoiseError::InvalidSigma { name, value });
            }
        }
        if !self.mu.is_finite() {
            return Err(NoiseError::NonFiniteMean("mu"));
        }
        if !self.mu_check.is_finite() {
            return Err(NoiseError::NonFiniteMean("mu_check"));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.beta * self.mu + (1.0 - self.beta) * self.mu_check
    }

    /// Draws an `m`×`l` error matrix. Each entry picks the first component
    /// with probability `beta`. The stream depends only on `seed`.
    pub fn sample(&self, m: usize, l: usize, seed: u64) -> Result<NoiseRealization, NoiseError> {
        self.validate()?;
        if m == 0 || l == 0 {
            return Err(NoiseError::EmptyShape);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first = Normal::new(self.mu, self.sigma).expect("validated sigma");
        let second = Normal::new(self.mu_check, self.sigma_check).expect("validated sigma");
        let mut errors = DMatrix::zeros(m, l);
        let mut flags = DMatrix::from_element(m, l, false);
        // Row-major fill so the (m, l) ordering matches how ranges are listed.
        for i in 0..m {
            for j in 0..l {
                let from_first = rng.random::<f64>() < self.beta;
                errors[(i, j)] = if from_first {
                    first.sample(&mut rng)
                } else {
                    second.sample(&mut rng)
                };
                flags[(i, j)] = from_first;
            }
        }
        Ok(NoiseRealization {
            errors,
            component_flags: flags,
            seed,
        })
    }
}

/// One draw of the M×L error matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRealization {
    pub errors: DMatrix<f64>,
    /// `true` where the entry came from the first (nominal) component.
    pub component_flags: DMatrix<bool>,
    pub seed: u64,
}

impl NoiseRealization {
    /// Tightest bound satisfying `|e| ≤ rho` for this draw: `max |e|`.
    pub fn realized_bound(&self) -> f64 {
        realized_bound(self.errors.as_slice())
    }
}

pub fn realized_bound(errors: &[f64]) -> f64 {
    errors.iter().fold(0.0, |acc, e| acc.max(e.abs()))
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of sweep point `sweep_index`. Depends only on the
/// three arguments, never on scheduling.
pub fn derive_seed(base_seed: u64, sweep_index: u64, trial: u64) -> u64 {
    mix64(mix64(mix64(base_seed) ^ sweep_index) ^ trial)
}

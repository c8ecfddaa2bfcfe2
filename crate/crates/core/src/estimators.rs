//! Position estimators: the min-max (Chebyshev-center) SDP estimator and two
//! nonlinear least-squares baselines.

use log::{debug, info};
use nalgebra::{DMatrix, Matrix2, Vector2};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{GeometryError, MeasurementSet, Point2, Scenario};
use crate::sdp_model::{build, ModelError, VariableLayout};
use crate::sdp_solver::{solve, SolverError, SolverOptions, SolverStatus};

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid estimator option: {0}")]
    InvalidOptions(String),
    #[error("program still infeasible after inflating the error bound to {rho_hat} m")]
    InfeasibleAfterInflation { rho_hat: f64 },
    #[error("solver stopped with status {0}")]
    SolverFailed(SolverStatus),
    #[error("no estimates to average")]
    Empty,
}

/// Gaps between lifted variables and the quantities they relax, in meters or
/// square meters. All zero when the relaxation is tight at the solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RelaxationGap {
    /// `λ − ‖z‖²`.
    pub lambda: f64,
    /// Largest `g_m − d_m²` over transmitters.
    pub range_square: f64,
    /// Largest `|d_m − ‖z − t_m‖|` over transmitters.
    pub range: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Status of the final conic solve (min-max only).
    pub solver_status: Option<SolverStatus>,
    /// Interior-point iterations summed over attempts, or Gauss-Newton
    /// iterations for the baselines.
    pub iterations: usize,
    /// Worst-case radius `t` for min-max, final cost for the baselines.
    pub objective: f64,
    /// Number of times the error bound was inflated after infeasibility.
    pub inflations: usize,
    /// Error bound of the successful attempt (min-max only).
    pub rho_hat: Option<f64>,
    pub relaxation_gap: Option<RelaxationGap>,
    /// Steps that fell back to the gradient because the Jacobian was
    /// rank-deficient.
    pub gradient_steps: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub position: Point2,
    pub method: String,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinMaxOptions {
    /// User-provided bound on every range error, meters.
    pub rho_hat: f64,
    pub infeasibility_inflation: f64,
    pub max_inflations: usize,
    pub solver: SolverOptions,
}

impl Default for MinMaxOptions {
    fn default() -> Self {
        Self {
            rho_hat: 0.0,
            infeasibility_inflation: 2.0,
            max_inflations: 6,
            solver: SolverOptions::default(),
        }
    }
}

impl MinMaxOptions {
    pub fn with_rho(rho_hat: f64) -> Self {
        Self {
            rho_hat,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), EstimateError> {
        if !(self.rho_hat.is_finite() && self.rho_hat >= 0.0) {
            return Err(EstimateError::InvalidOptions(format!(
                "rho_hat must be >= 0, got {}",
                self.rho_hat
            )));
        }
        if !(self.infeasibility_inflation.is_finite() && self.infeasibility_inflation > 1.0) {
            return Err(EstimateError::InvalidOptions(format!(
                "infeasibility_inflation must exceed 1, got {}",
                self.infeasibility_inflation
            )));
        }
        self.solver.validate()?;
        Ok(())
    }
}

pub const MINMAX_TAG: &str = "min-max";
pub const GAUSS_NEWTON_TAG: &str = "gauss-newton";

pub fn irls_tag(p: f64) -> String {
    format!("irls-p{p}")
}

/// Similarity transform to a frame centered on the sensors with unit spread.
/// The conic program is solved in this frame so that its data is O(1).
struct Frame {
    origin: Point2,
    scale: f64,
}

impl Frame {
    fn for_scenario(scenario: &Scenario) -> Self {
        let origin = scenario.centroid();
        let scale = scenario
            .transmitters
            .iter()
            .chain(&scenario.receivers)
            .map(|p| p.distance(&origin))
            .fold(0.0, f64::max);
        Self {
            origin,
            scale: if scale > 0.0 { scale } else { 1.0 },
        }
    }

    fn to_local(&self, p: Point2) -> Point2 {
        (p - self.origin) * (1.0 / self.scale)
    }

    fn to_world(&self, p: Point2) -> Point2 {
        p * self.scale + self.origin
    }
}

fn check_ranges(scenario: &Scenario, ranges: &DMatrix<f64>) -> Result<(), EstimateError> {
    scenario.validate()?;
    let (m, l) = ranges.shape();
    if m != scenario.m() || l != scenario.l() {
        return Err(GeometryError::DimensionMismatch {
            m: scenario.m(),
            l: scenario.l(),
            got_m: m,
            got_l: l,
        }
        .into());
    }
    if !ranges.iter().all(|r| r.is_finite()) {
        return Err(GeometryError::NonFinite("ranges").into());
    }
    Ok(())
}

/// Min-max estimate: the center variable of the relaxed Chebyshev-center
/// program built from `ranges` and the bound `opts.rho_hat`.
///
/// When the solver reports the program infeasible, the bound is multiplied
/// by `opts.infeasibility_inflation` (and raised to at least a thousandth of
/// the sensor spread, so a zero bound can grow) and the solve is retried.
pub fn estimate_minmax(
    scenario: &Scenario,
    ranges: &DMatrix<f64>,
    opts: &MinMaxOptions,
) -> Result<Estimate, EstimateError> {
    check_ranges(scenario, ranges)?;
    opts.validate()?;

    let frame = Frame::for_scenario(scenario);
    let local = scenario.map_positions(|p| frame.to_local(p));
    let local_ranges = ranges / frame.scale;
    let lay = VariableLayout::new(scenario.m(), scenario.l());
    let rho_floor = 1e-3 * frame.scale;

    let mut rho = opts.rho_hat;
    let mut inflations = 0;
    let mut iterations = 0;
    loop {
        let meas = MeasurementSet::new(local_ranges.clone(), rho / frame.scale)?;
        let program = build(&local, &meas)?;
        let sol = solve(&program, &opts.solver)?;
        iterations += sol.iterations;
        match sol.status {
            SolverStatus::Optimal => {
                let y = &sol.primal;
                let [cx, cy] = lay.center();
                let position = frame.to_world(Point2::new(y[cx], y[cy]));
                let [zx, zy] = lay.z();
                let z = Point2::new(y[zx], y[zy]);
                let mut gap = RelaxationGap {
                    lambda: (y[lay.lambda()] - z.norm_squared()) * frame.scale.powi(2),
                    ..Default::default()
                };
                for (m, t) in local.transmitters.iter().enumerate() {
                    let d = y[lay.d(m)];
                    gap.range_square = gap
                        .range_square
                        .max((y[lay.g_tx(m)] - d * d) * frame.scale.powi(2));
                    gap.range = gap.range.max((d - z.distance(t)).abs() * frame.scale);
                }
                debug!("min-max estimate {position} after {iterations} iterations, gap {gap:?}");
                return Ok(Estimate {
                    position,
                    method: MINMAX_TAG.to_string(),
                    diagnostics: Diagnostics {
                        solver_status: Some(sol.status),
                        iterations,
                        objective: y[lay.t()] * frame.scale,
                        inflations,
                        rho_hat: Some(rho),
                        relaxation_gap: Some(gap),
                        gradient_steps: 0,
                        converged: true,
                    },
                });
            }
            SolverStatus::Infeasible => {
                if inflations >= opts.max_inflations {
                    return Err(EstimateError::InfeasibleAfterInflation { rho_hat: rho });
                }
                let next = (rho * opts.infeasibility_inflation).max(rho_floor);
                info!("relaxed program infeasible at rho_hat = {rho} m, retrying with {next} m");
                rho = next;
                inflations += 1;
            }
            status => return Err(EstimateError::SolverFailed(status)),
        }
    }
}

/// Flattened residuals `r̂ − BR(x)` and Jacobian rows `∂BR/∂x`.
fn residuals(
    scenario: &Scenario,
    ranges: &DMatrix<f64>,
    x: Point2,
) -> (Vec<f64>, Vec<Vector2<f64>>) {
    let unit = |p: Point2| {
        let v = x - p;
        let n = v.norm();
        if n > 0.0 {
            Vector2::new(v.x / n, v.y / n)
        } else {
            Vector2::zeros()
        }
    };
    let mut r = Vec::with_capacity(ranges.len());
    let mut j = Vec::with_capacity(ranges.len());
    for (m, t) in scenario.transmitters.iter().enumerate() {
        for (l, s) in scenario.receivers.iter().enumerate() {
            r.push(ranges[(m, l)] - crate::geometry::bistatic_range(x, *t, *s));
            j.push(unit(*t) + unit(*s));
        }
    }
    (r, j)
}

/// Per-residual loss. `p = 2` is the plain square so that the ℓ2 path is
/// unaffected by the smoothing term.
fn lp_loss(r: f64, p: f64, eps: f64) -> f64 {
    if p == 2.0 {
        r * r
    } else {
        (r * r + eps * eps).powf(0.5 * p)
    }
}

fn lp_weight(r: f64, p: f64, eps: f64) -> f64 {
    if p == 2.0 {
        1.0
    } else {
        (r * r + eps * eps).powf(0.5 * (p - 2.0))
    }
}

/// Iteratively reweighted, damped Gauss-Newton on `Σ ℓ_p(r̂ − BR(x))`.
fn reweighted_gauss_newton(
    scenario: &Scenario,
    ranges: &DMatrix<f64>,
    p: f64,
    init: Point2,
    max_iter: usize,
    tol: f64,
    eps: f64,
) -> (Point2, Diagnostics) {
    let cost = |x: Point2| -> f64 {
        let (r, _) = residuals(scenario, ranges, x);
        r.iter().map(|&ri| lp_loss(ri, p, eps)).sum()
    };
    let mut x = init;
    let mut fx = cost(x);
    let mut diag = Diagnostics::default();
    for it in 1..=max_iter {
        diag.iterations = it;
        let (r, jac) = residuals(scenario, ranges, x);
        let mut jtj = Matrix2::zeros();
        let mut jtr = Vector2::zeros();
        for (ri, ji) in r.iter().zip(&jac) {
            let w = lp_weight(*ri, p, eps);
            jtj += ji * ji.transpose() * w;
            jtr += ji * (w * ri);
        }
        // r̂ − BR(x + δ) ≈ r − J·δ, so the normal equations read JᵀWJ·δ = JᵀW·r.
        let rank_ok = {
            let e = jtj.symmetric_eigenvalues();
            let (lo, hi) = (e.min(), e.max());
            hi > 0.0 && lo > 1e-12 * hi
        };
        let step = match rank_ok.then(|| jtj.cholesky()).flatten() {
            Some(ch) => ch.solve(&jtr),
            None => {
                diag.gradient_steps += 1;
                jtr
            }
        };
        if step.norm() < tol {
            diag.converged = true;
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let cand = x + Point2::new(step.x, step.y) * alpha;
            let fc = cost(cand);
            if fc < fx {
                accepted = Some((cand, fc));
                break;
            }
            alpha *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            // No decrease along the direction: x is stationary to working precision.
            diag.converged = true;
            break;
        };
        let moved = (cand - x).norm();
        x = cand;
        fx = fc;
        if moved < tol {
            diag.converged = true;
            break;
        }
    }
    diag.objective = fx;
    (x, diag)
}

/// ℓ2 nonlinear least squares by damped Gauss-Newton.
pub fn estimate_gauss_newton(
    scenario: &Scenario,
    ranges: &DMatrix<f64>,
    init: Point2,
    max_iter: usize,
    tol: f64,
) -> Result<Estimate, EstimateError> {
    check_ranges(scenario, ranges)?;
    check_baseline_options(init, max_iter, tol)?;
    let (position, diagnostics) =
        reweighted_gauss_newton(scenario, ranges, 2.0, init, max_iter, tol, 0.0);
    Ok(Estimate {
        position,
        method: GAUSS_NEWTON_TAG.to_string(),
        diagnostics,
    })
}

/// ℓp estimate (`0 < p ≤ 2`) by IRLS with weights `(r² + ε²)^{(p−2)/2}`.
pub fn estimate_irls_lp(
    scenario: &Scenario,
    ranges: &DMatrix<f64>,
    p: f64,
    init: Point2,
    max_iter: usize,
    tol: f64,
    epsilon: f64,
) -> Result<Estimate, EstimateError> {
    check_ranges(scenario, ranges)?;
    check_baseline_options(init, max_iter, tol)?;
    if !(p > 0.0 && p <= 2.0) {
        return Err(EstimateError::InvalidOptions(format!(
            "p must lie in (0, 2], got {p}"
        )));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(EstimateError::InvalidOptions(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    let (position, diagnostics) =
        reweighted_gauss_newton(scenario, ranges, p, init, max_iter, tol, epsilon);
    Ok(Estimate {
        position,
        method: irls_tag(p),
        diagnostics,
    })
}

fn check_baseline_options(init: Point2, max_iter: usize, tol: f64) -> Result<(), EstimateError> {
    if !init.is_finite() {
        return Err(GeometryError::NonFinite("initial point").into());
    }
    if max_iter == 0 {
        return Err(EstimateError::InvalidOptions(
            "max_iter must be positive".into(),
        ));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(EstimateError::InvalidOptions(format!(
            "tol must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Root-mean-square Euclidean error of `estimates` around `truth`.
pub fn rmse(estimates: &[Estimate], truth: Point2) -> Result<f64, EstimateError> {
    rmse_of_points(estimates.iter().map(|e| e.position), truth)
}

pub fn rmse_of_points(
    points: impl IntoIterator<Item = Point2>,
    truth: Point2,
) -> Result<f64, EstimateError> {
    let (sum, n) = points.into_iter().fold((0.0, 0usize), |(s, n), p| {
        (s + p.distance(&truth).powi(2), n + 1)
    });
    if n == 0 {
        return Err(EstimateError::Empty);
    }
    Ok((sum / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bistatic_range, chebyshev_oracle, BoundingBox};

    const TRUTH: Point2 = Point2::new(100.0, 100.0);

    fn reference_ranges() -> (Scenario, DMatrix<f64>) {
        let sc = Scenario::reference();
        let r = sc.ranges_for(TRUTH);
        (sc, r)
    }

    fn with_outlier() -> (Scenario, DMatrix<f64>) {
        let (sc, mut r) = reference_ranges();
        r[(1, 2)] += 100.0;
        (sc, r)
    }

    #[test]
    fn minmax_noiseless_is_near_truth() {
        let (sc, r) = reference_ranges();
        let est = estimate_minmax(&sc, &r, &MinMaxOptions::with_rho(0.5)).unwrap();
        assert!(est.position.distance(&TRUTH) <= 0.5, "{}", est.position);
        assert_eq!(est.diagnostics.inflations, 0);
        assert_eq!(est.diagnostics.solver_status, Some(SolverStatus::Optimal));

        let oracle = chebyshev_oracle(
            &sc,
            &MeasurementSet::new(r, 0.5).unwrap(),
            BoundingBox::square(TRUTH, 5.0),
            0.25,
        )
        .unwrap();
        assert!(est.position.distance(&oracle.center) <= 0.5);
    }

    #[test]
    fn worst_case_radius_bounds_noiseless_error() {
        let (sc, r) = reference_ranges();
        for rho in [0.0, 0.1] {
            let est = estimate_minmax(&sc, &r, &MinMaxOptions::with_rho(rho)).unwrap();
            let t = est.diagnostics.objective;
            let err = est.position.distance(&TRUTH);
            if rho == 0.0 {
                assert!(err <= t + 1e-6, "rho {rho}: error {err} vs radius {t}");
            } else {
                assert!(err <= rho, "rho {rho}: error {err}");
            }
        }
    }

    #[test]
    #[ignore = "the relaxation leaves g unbounded above, so one pair does not pin z to its ellipse"]
    fn single_pair_zero_bound_lands_near_ellipse() {
        let sc = Scenario::new(
            vec![Point2::new(-100.0, 0.0)],
            vec![Point2::new(100.0, 0.0)],
        )
        .unwrap();
        let x = Point2::new(30.0, 80.0);
        let r = sc.ranges_for(x);
        let est = estimate_minmax(&sc, &r, &MinMaxOptions::with_rho(0.0)).unwrap();
        let br = bistatic_range(est.position, sc.transmitters[0], sc.receivers[0]);
        assert!(est.position.is_finite());
        assert!(
            (br - r[(0, 0)]).abs() <= 1e-6,
            "BR residual {}",
            br - r[(0, 0)]
        );
    }

    #[test]
    fn impossible_ranges_trigger_inflation() {
        // Target on the focal segment of pair (0, 0), whose range is then
        // reported shorter than the focal distance.
        let sc = Scenario::reference();
        let x = (sc.transmitters[0] + sc.receivers[0]) * 0.5;
        let mut r = sc.ranges_for(x);
        let focal = sc.transmitters[0].distance(&sc.receivers[0]);
        r[(0, 0)] = focal - 2.0;
        let est = estimate_minmax(&sc, &r, &MinMaxOptions::with_rho(0.0)).unwrap();
        assert!(est.diagnostics.inflations >= 1, "{:?}", est.diagnostics);
        assert!(est.diagnostics.rho_hat.unwrap() > 0.0);
    }

    #[test]
    fn inflation_budget_is_enforced() {
        let sc = Scenario::reference();
        let mut r = sc.ranges_for(TRUTH);
        for m in 0..sc.m() {
            for l in 0..sc.l() {
                r[(m, l)] = 0.5 * sc.transmitters[m].distance(&sc.receivers[l]);
            }
        }
        let opts = MinMaxOptions {
            max_inflations: 1,
            ..MinMaxOptions::with_rho(0.0)
        };
        match estimate_minmax(&sc, &r, &opts) {
            Err(EstimateError::InfeasibleAfterInflation { rho_hat }) => assert!(rho_hat > 0.0),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn minmax_is_permutation_invariant() {
        let (sc, r) = with_outlier();
        let opts = MinMaxOptions::with_rho(101.0);
        let a = estimate_minmax(&sc, &r, &opts).unwrap();
        let tx_perm = [2, 0, 1];
        let rx_perm = [3, 1, 0, 2];
        let sc2 = Scenario::new(
            tx_perm.iter().map(|&i| sc.transmitters[i]).collect(),
            rx_perm.iter().map(|&i| sc.receivers[i]).collect(),
        )
        .unwrap();
        let r2 = DMatrix::from_fn(3, 4, |m, l| r[(tx_perm[m], rx_perm[l])]);
        let b = estimate_minmax(&sc2, &r2, &opts).unwrap();
        assert!(
            a.position.distance(&b.position) <= 1e-9,
            "{} vs {}",
            a.position,
            b.position
        );
    }

    #[test]
    fn minmax_is_translation_equivariant() {
        let (sc, r) = with_outlier();
        let opts = MinMaxOptions::with_rho(101.0);
        let a = estimate_minmax(&sc, &r, &opts).unwrap();
        for v in [Point2::new(1234.5, -987.0), Point2::new(-3.25, 0.5)] {
            let b = estimate_minmax(&sc.map_positions(|p| p + v), &r, &opts).unwrap();
            assert!((b.position - v).distance(&a.position) <= 1e-6);
        }
    }

    #[test]
    fn gauss_newton_recovers_noiseless_truth() {
        let (sc, r) = reference_ranges();
        let est = estimate_gauss_newton(&sc, &r, Point2::new(0.0, 0.0), 100, 1e-10).unwrap();
        assert!(est.position.distance(&TRUTH) <= 1e-6, "{}", est.position);
        assert!(est.diagnostics.converged);
        let est = estimate_gauss_newton(&sc, &r, TRUTH, 100, 1e-10).unwrap();
        assert!(est.diagnostics.iterations <= 2);
        assert_eq!(est.position, TRUTH);
    }

    #[test]
    fn lad_rejects_single_outlier() {
        let (sc, r) = with_outlier();
        let init = sc.centroid();
        let lad = estimate_irls_lp(&sc, &r, 1.0, init, 500, 1e-10, 1e-6).unwrap();
        let gn = estimate_gauss_newton(&sc, &r, init, 100, 1e-10).unwrap();
        let e_lad = lad.position.distance(&TRUTH);
        assert!(e_lad < 1.0, "lad {e_lad}");
        assert!(gn.position.distance(&TRUTH) > 5.0 * e_lad.max(0.1));
    }

    #[test]
    fn irls_with_p_two_is_gauss_newton() {
        let (sc, r) = with_outlier();
        for init in [sc.centroid(), Point2::new(-50.0, 400.0)] {
            let gn = estimate_gauss_newton(&sc, &r, init, 100, 1e-10).unwrap();
            let ir = estimate_irls_lp(&sc, &r, 2.0, init, 100, 1e-10, 1e-6).unwrap();
            assert!(gn.position.distance(&ir.position) <= 1e-8);
            assert_eq!(gn.diagnostics.iterations, ir.diagnostics.iterations);
        }
    }

    #[test]
    fn irls_noiseless_converges_for_any_p() {
        let (sc, r) = reference_ranges();
        for p in [0.5, 1.0, 1.5, 2.0] {
            let est = estimate_irls_lp(&sc, &r, p, sc.centroid(), 500, 1e-12, 1e-6).unwrap();
            assert!(
                est.position.distance(&TRUTH) <= 1e-6,
                "p={p}: {}",
                est.position
            );
        }
    }

    #[test]
    fn rank_deficient_jacobian_falls_back_to_gradient() {
        // One pair: a single residual cannot determine two coordinates.
        let sc = Scenario::new(
            vec![Point2::new(-100.0, 0.0)],
            vec![Point2::new(100.0, 0.0)],
        )
        .unwrap();
        let r = sc.ranges_for(Point2::new(0.0, 80.0));
        let est = estimate_gauss_newton(&sc, &r, Point2::new(0.0, 10.0), 100, 1e-10).unwrap();
        assert!(est.diagnostics.gradient_steps >= 1);
        let br = bistatic_range(est.position, sc.transmitters[0], sc.receivers[0]);
        assert!((br - r[(0, 0)]).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (sc, r) = reference_ranges();
        assert!(estimate_irls_lp(&sc, &r, 0.0, TRUTH, 10, 1e-9, 1e-6).is_err());
        assert!(estimate_irls_lp(&sc, &r, 2.5, TRUTH, 10, 1e-9, 1e-6).is_err());
        assert!(estimate_gauss_newton(&sc, &r, Point2::new(f64::NAN, 0.0), 10, 1e-9).is_err());
        assert!(estimate_minmax(&sc, &DMatrix::zeros(2, 4), &MinMaxOptions::default()).is_err());
        assert!(estimate_minmax(&sc, &r, &MinMaxOptions::with_rho(-1.0)).is_err());
        let opts = MinMaxOptions {
            infeasibility_inflation: 1.0,
            ..MinMaxOptions::default()
        };
        assert!(estimate_minmax(&sc, &r, &opts).is_err());
    }

    #[test]
    fn rmse_examples() {
        let at = |p: Point2| Estimate {
            position: p,
            method: "x".into(),
            diagnostics: Diagnostics::default(),
        };
        assert_eq!(rmse(&[at(TRUTH), at(TRUTH)], TRUTH).unwrap(), 0.0);
        let v = rmse(
            &[at(Point2::new(103.0, 100.0)), at(Point2::new(100.0, 104.0))],
            TRUTH,
        )
        .unwrap();
        assert!((v - 3.5355339).abs() < 1e-6);
        let ring: Vec<Estimate> = (0..100)
            .map(|k| {
                let a = k as f64 * 0.0628;
                at(TRUTH + Point2::new(a.cos(), a.sin()))
            })
            .collect();
        assert!((rmse(&ring, TRUTH).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rmse(&[], TRUTH), Err(EstimateError::Empty));
    }
}

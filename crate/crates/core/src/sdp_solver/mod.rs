//! Dense primal-dual interior-point solver for small block conic programs.
//!
//! Solves
//!
//! ```text
//! minimize   cᵀy
//! subject to E·y = h
//!            S_k = F0_k + Σ_i y_i·F_ik ⪰ 0      for every block k
//! ```
//!
//! with all `y` free, together with its dual
//!
//! ```text
//! maximize   hᵀw − Σ_k ⟨F0_k, Z_k⟩
//! subject to ⟨F_ik, Z_k⟩ summed over k + (Eᵀw)_i = c_i,   Z_k ⪰ 0.
//! ```
//!
//! Scalar inequalities are treated as 1×1 blocks. The method is an
//! infeasible-start path follower with Nesterov–Todd scaling and a
//! Mehrotra predictor-corrector. The Newton system is reduced to the dense
//! Schur complement `H_ij = Σ_k ⟨F_ik, W_k⁻¹ F_jk W_k⁻¹⟩` bordered by `E`,
//! and factorized with LU.

pub mod instances;
mod kkt;
mod linalg;

use std::fmt;

use log::{debug, log_enabled, Level};
use nalgebra::{DMatrix, DVector, Dyn, LU};
use serde::Serialize;
use thiserror::Error;

use crate::sdp_model::{ConicProgram, ModelError};

pub use kkt::{check_kkt, KktReport};
use linalg::{frob_dot, max_step, sym_eigen, ScaledBlock};

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid solver option: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative duality gap accepted as optimal.
    pub gap_tolerance: f64,
    /// Relative primal/dual residual accepted as feasible.
    pub feasibility_tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Log one columnar line per iteration at `debug` level.
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tolerance: 1e-8,
            feasibility_tolerance: 1e-8,
            max_iterations: 100,
            step_fraction: 0.98,
            trace: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.gap_tolerance > 0.0) {
            return Err(SolverError::InvalidOptions(
                "gap_tolerance must be positive",
            ));
        }
        if !(self.feasibility_tolerance > 0.0) {
            return Err(SolverError::InvalidOptions(
                "feasibility_tolerance must be positive",
            ));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidOptions(
                "max_iterations must be positive",
            ));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(SolverError::InvalidOptions(
                "step_fraction must lie in (0, 1)",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    IterationLimit,
    NumericalFailure,
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::Infeasible => "infeasible",
            SolverStatus::IterationLimit => "iteration-limit",
            SolverStatus::NumericalFailure => "numerical-failure",
        };
        f.write_str(s)
    }
}

/// Relative residuals of an iterate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
}

/// One row of the iteration log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub step_primal: f64,
    pub step_dual: f64,
    /// Smallest eigenvalue over all primal slack blocks after the step.
    pub min_slack_eigenvalue: f64,
}

impl IterationRecord {
    pub const HEADER: &'static str =
        " iter        pobj            dobj         gap       pres       dres   step_p  step_d";

    /// Fixed-width row matching [`HEADER`](Self::HEADER).
    pub fn columns(&self) -> String {
        format!(
            "{:5} {:+15.8e} {:+15.8e} {:10.3e} {:10.3e} {:10.3e} {:7.4} {:7.4}",
            self.iteration,
            self.primal_objective,
            self.dual_objective,
            self.gap,
            self.primal_residual,
            self.dual_residual,
            self.step_primal,
            self.step_dual
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSolution {
    pub status: SolverStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    /// Relative duality gap `max(⟨S,Z⟩, |pobj − dobj|) / (1 + |pobj| + |dobj|)`.
    pub gap: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    /// Equality multipliers `w`.
    pub dual_equalities: Vec<f64>,
    /// Multipliers of the scalar inequalities.
    pub dual_scalars: Vec<f64>,
    /// Dual matrices of the PSD blocks.
    pub dual_blocks: Vec<DMatrix<f64>>,
    pub history: Vec<IterationRecord>,
}

/// Internal cone block with row-normalized data.
struct Block {
    dim: usize,
    f0: DMatrix<f64>,
    coeffs: Vec<(usize, DMatrix<f64>)>,
    /// Original block = `scale` × normalized block.
    scale: f64,
}

impl Block {
    fn eval_linear(&self, dy: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (i, f) in &self.coeffs {
            out += f * dy[*i];
        }
        out
    }

    fn adjoint_into(&self, z: &DMatrix<f64>, out: &mut DVector<f64>) {
        for (i, f) in &self.coeffs {
            out[*i] += frob_dot(f, z);
        }
    }
}

struct NormalizedProgram {
    n: usize,
    c: DVector<f64>,
    e: DMatrix<f64>,
    h: DVector<f64>,
    eq_scale: Vec<f64>,
    blocks: Vec<Block>,
    n_scalar: usize,
}

impl NormalizedProgram {
    fn from_program(p: &ConicProgram) -> Self {
        let n = p.n;
        let c = DVector::from_column_slice(&p.objective);
        let neq = p.equalities.len();
        let mut e = DMatrix::zeros(neq, n);
        let mut h = DVector::zeros(neq);
        let mut eq_scale = Vec::with_capacity(neq);
        for (r, eq) in p.equalities.iter().enumerate() {
            let s = eq
                .coeffs
                .iter()
                .fold(0.0f64, |a, (_, v)| a.max(v.abs()))
                .max(f64::MIN_POSITIVE);
            for &(i, v) in &eq.coeffs {
                e[(r, i)] += v / s;
            }
            h[r] = eq.rhs / s;
            eq_scale.push(s);
        }

        let mut blocks = Vec::new();
        for ineq in &p.scalar_inequalities {
            let mut coeffs: Vec<(usize, DMatrix<f64>)> = Vec::new();
            for &(i, v) in &ineq.coeffs {
                match coeffs.iter_mut().find(|(j, _)| *j == i) {
                    Some((_, m)) => m[(0, 0)] += v,
                    None => coeffs.push((i, DMatrix::from_element(1, 1, v))),
                }
            }
            blocks.push(Block {
                dim: 1,
                f0: DMatrix::from_element(1, 1, ineq.constant),
                coeffs,
                scale: 1.0,
            });
        }
        for b in &p.psd_blocks {
            blocks.push(Block {
                dim: b.dim,
                f0: b.constant.clone(),
                coeffs: b.coeffs.clone(),
                scale: 1.0,
            });
        }
        // Scale every cone constraint so its largest coefficient is one;
        // the feasible set is unchanged.
        for b in &mut blocks {
            let s = b
                .coeffs
                .iter()
                .map(|(_, f)| f.amax())
                .fold(0.0f64, f64::max)
                .max(f64::MIN_POSITIVE);
            b.f0 /= s;
            for (_, f) in &mut b.coeffs {
                *f /= s;
            }
            b.scale = s;
        }
        Self {
            n,
            c,
            e,
            h,
            eq_scale,
            blocks,
            n_scalar: p.scalar_inequalities.len(),
        }
    }

    fn nu(&self) -> f64 {
        self.blocks.iter().map(|b| b.dim).sum::<usize>() as f64
    }

    fn data_magnitude(&self) -> f64 {
        let mut mag = self.c.amax().max(self.h.amax());
        for b in &self.blocks {
            mag = mag.max(b.f0.amax());
            for (_, f) in &b.coeffs {
                mag = mag.max(f.amax());
            }
        }
        mag
    }

    fn adjoint(&self, z: &[DMatrix<f64>]) -> DVector<f64> {
        let mut out = DVector::zeros(self.n);
        for (b, zk) in self.blocks.iter().zip(z) {
            b.adjoint_into(zk, &mut out);
        }
        out
    }
}

struct Iterate {
    y: DVector<f64>,
    w: DVector<f64>,
    s: Vec<DMatrix<f64>>,
    z: Vec<DMatrix<f64>>,
}

struct Metrics {
    rp: Vec<DMatrix<f64>>,
    re: DVector<f64>,
    rd: DVector<f64>,
    pobj: f64,
    dobj: f64,
    complementarity: f64,
    gap: f64,
    pinf: f64,
    dinf: f64,
}

struct Direction {
    dy: DVector<f64>,
    dw: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
    dz: Vec<DMatrix<f64>>,
}

/// Solves a conic program. Deterministic for fixed inputs.
pub fn solve(p: &ConicProgram, opts: &SolverOptions) -> Result<SolverSolution, SolverError> {
    opts.validate()?;
    p.validate()?;
    let np = NormalizedProgram::from_program(p);
    Ok(Solver::new(&np, opts).run(p))
}

struct Solver<'a> {
    p: &'a NormalizedProgram,
    opts: &'a SolverOptions,
    norm_f0: f64,
    norm_h: f64,
    norm_c: f64,
}

impl<'a> Solver<'a> {
    fn new(p: &'a NormalizedProgram, opts: &'a SolverOptions) -> Self {
        let norm_f0 = p
            .blocks
            .iter()
            .map(|b| b.f0.norm_squared())
            .sum::<f64>()
            .sqrt();
        Self {
            p,
            opts,
            norm_f0,
            norm_h: p.h.norm(),
            norm_c: p.c.norm(),
        }
    }

    fn initial(&self) -> Iterate {
        let xi = 1.0 + self.p.data_magnitude();
        Iterate {
            y: DVector::zeros(self.p.n),
            w: DVector::zeros(self.p.e.nrows()),
            s: self
                .p
                .blocks
                .iter()
                .map(|b| DMatrix::identity(b.dim, b.dim) * xi)
                .collect(),
            z: self
                .p
                .blocks
                .iter()
                .map(|b| DMatrix::identity(b.dim, b.dim) * xi)
                .collect(),
        }
    }

    fn metrics(&self, it: &Iterate) -> Metrics {
        let p = self.p;
        let rp: Vec<DMatrix<f64>> = p
            .blocks
            .iter()
            .zip(&it.s)
            .map(|(b, s)| &b.f0 + b.eval_linear(&it.y) - s)
            .collect();
        let re = &p.h - &p.e * &it.y;
        let rd = &p.c - p.adjoint(&it.z) - p.e.transpose() * &it.w;
        let pobj = p.c.dot(&it.y);
        let dobj = p.h.dot(&it.w)
            - p.blocks
                .iter()
                .zip(&it.z)
                .map(|(b, z)| frob_dot(&b.f0, z))
                .sum::<f64>();
        let complementarity: f64 = it.s.iter().zip(&it.z).map(|(s, z)| frob_dot(s, z)).sum();
        let gap = complementarity.max((pobj - dobj).abs()) / (1.0 + pobj.abs() + dobj.abs());
        let rp_norm = rp.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        let pinf = (rp_norm / (1.0 + self.norm_f0)).max(re.norm() / (1.0 + self.norm_h));
        let dinf = rd.norm() / (1.0 + self.norm_c);
        Metrics {
            rp,
            re,
            rd,
            pobj,
            dobj,
            complementarity,
            gap,
            pinf,
            dinf,
        }
    }

    /// Residual of the normalized dual improving ray, or `None` when the
    /// dual iterate does not point in an improving direction.
    fn infeasibility_ray(&self, m: &Metrics) -> Option<f64> {
        let tau = m.dobj;
        if !(tau > 0.0) {
            return None;
        }
        let ray = &self.p.c - &m.rd;
        Some(ray.norm() / tau)
    }

    fn run(&self, original: &ConicProgram) -> SolverSolution {
        let opts = self.opts;
        let nu = self.p.nu();
        let mut it = self.initial();
        let mut history: Vec<IterationRecord> = Vec::new();
        let mut status = SolverStatus::IterationLimit;
        let mut pinf_log: Vec<f64> = Vec::new();

        if opts.trace {
            debug!("{}", IterationRecord::HEADER);
        }

        let mut iterations = 0;
        loop {
            let m = self.metrics(&it);
            if !(m.gap.is_finite() && m.pinf.is_finite() && m.dinf.is_finite()) {
                status = SolverStatus::NumericalFailure;
                break;
            }
            if m.gap <= opts.gap_tolerance
                && m.pinf <= opts.feasibility_tolerance
                && m.dinf <= opts.feasibility_tolerance
            {
                status = SolverStatus::Optimal;
                break;
            }
            pinf_log.push(m.pinf);
            if let Some(ray) = self.infeasibility_ray(&m) {
                let k = pinf_log.len();
                // Primal residual less than halved over the last three steps.
                let stagnant = k > 3 && pinf_log[k - 1] > 0.5 * pinf_log[k - 4];
                if m.pinf > opts.feasibility_tolerance
                    && stagnant
                    && ray <= opts.feasibility_tolerance
                {
                    status = SolverStatus::Infeasible;
                    break;
                }
            }
            if iterations >= opts.max_iterations {
                break;
            }
            iterations += 1;

            let mu = m.complementarity / nu;
            let scaled: Option<Vec<ScaledBlock>> =
                it.s.iter()
                    .zip(&it.z)
                    .map(|(s, z)| ScaledBlock::new(s, z))
                    .collect();
            let Some(scaled) = scaled else {
                status = SolverStatus::NumericalFailure;
                break;
            };
            let Some(kkt) = self.factor(&scaled) else {
                status = SolverStatus::NumericalFailure;
                break;
            };

            // Predictor: complementarity target 0.
            let r_aff: Vec<DMatrix<f64>> = it.z.iter().map(|z| -z).collect();
            let Some(aff) = self.direction(&kkt, &scaled, &m, &r_aff) else {
                status = SolverStatus::NumericalFailure;
                break;
            };
            let ap = max_step(&it.s, &aff.ds).min(1.0);
            let ad = max_step(&it.z, &aff.dz).min(1.0);
            let mu_aff: f64 =
                it.s.iter()
                    .zip(&it.z)
                    .zip(aff.ds.iter().zip(&aff.dz))
                    .map(|((s, z), (ds, dz))| frob_dot(&(s + ds * ap), &(z + dz * ad)))
                    .sum::<f64>()
                    / nu;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // Corrector with second-order term, in the scaled space.
            let r_cor: Vec<DMatrix<f64>> = scaled
                .iter()
                .zip(aff.ds.iter().zip(&aff.dz))
                .map(|(sb, (ds, dz))| sb.corrector_rhs(sigma * mu, ds, dz))
                .collect();
            let Some(dir) = self.direction(&kkt, &scaled, &m, &r_cor) else {
                status = SolverStatus::NumericalFailure;
                break;
            };

            let ap = (opts.step_fraction * max_step(&it.s, &dir.ds)).min(1.0);
            let ad = (opts.step_fraction * max_step(&it.z, &dir.dz)).min(1.0);
            it.y += &dir.dy * ap;
            for (s, ds) in it.s.iter_mut().zip(&dir.ds) {
                *s += ds * ap;
                symmetrize(s);
            }
            it.w += &dir.dw * ad;
            for (z, dz) in it.z.iter_mut().zip(&dir.dz) {
                *z += dz * ad;
                symmetrize(z);
            }

            let min_slack =
                it.s.iter()
                    .map(|s| sym_eigen(s).map_or(f64::NAN, |(e, _)| e.min()))
                    .fold(f64::INFINITY, f64::min);
            let after = self.metrics(&it);
            let rec = IterationRecord {
                iteration: iterations,
                primal_objective: after.pobj,
                dual_objective: after.dobj,
                gap: after.gap,
                primal_residual: after.pinf,
                dual_residual: after.dinf,
                step_primal: ap,
                step_dual: ad,
                min_slack_eigenvalue: min_slack,
            };
            if opts.trace && log_enabled!(Level::Debug) {
                debug!("{}", rec.columns());
            }
            history.push(rec);
        }

        let m = self.metrics(&it);
        self.finish(original, it, m, status, iterations, history)
    }

    /// Assembles and factors the bordered Schur system.
    fn factor(&self, scaled: &[ScaledBlock]) -> Option<Factored> {
        let p = self.p;
        let n = p.n;
        let neq = p.e.nrows();
        let mut k = DMatrix::zeros(n + neq, n + neq);
        for (b, sb) in p.blocks.iter().zip(scaled) {
            let mapped: Vec<DMatrix<f64>> = b
                .coeffs
                .iter()
                .map(|(_, f)| &sb.w_inv * f * &sb.w_inv)
                .collect();
            for (a, (i, fi)) in b.coeffs.iter().enumerate() {
                for (bj, (j, _)) in b.coeffs.iter().enumerate().skip(a) {
                    let v = frob_dot(fi, &mapped[bj]);
                    k[(*i, *j)] += v;
                    if a != bj {
                        k[(*j, *i)] += v;
                    }
                }
            }
        }
        for r in 0..neq {
            for c in 0..n {
                let v = p.e[(r, c)];
                k[(n + r, c)] = v;
                k[(c, n + r)] = v;
            }
        }
        // Symmetric diagonal equilibration `D·K·D`: the Schur entries grow
        // without bound near the cone boundary while the border stays O(1).
        let mut d = DVector::from_element(n + neq, 1.0);
        for i in 0..n {
            let hii = k[(i, i)];
            if hii > 0.0 && hii.is_finite() {
                d[i] = 1.0 / hii.sqrt();
            }
        }
        for r in 0..neq {
            let row_max = (0..n).fold(0.0f64, |a, c| a.max((k[(n + r, c)] * d[c]).abs()));
            if row_max > 0.0 {
                d[n + r] = 1.0 / row_max;
            }
        }
        let scaled_k = DMatrix::from_fn(n + neq, n + neq, |i, j| d[i] * k[(i, j)] * d[j]);
        let lu = scaled_k.clone().lu();
        if !lu.is_invertible() {
            return None;
        }
        Some(Factored {
            matrix: scaled_k,
            lu,
            d,
        })
    }

    /// Solves for a search direction given per-block complementarity
    /// right-hand sides `r` (so that `ΔZ + W⁻¹ΔS W⁻¹ = r`).
    ///
    /// The reduced system recovers `ΔZ` by cancellation of large terms, so
    /// the dual and equality rows of the full Newton system are refined
    /// once with their own residuals.
    fn direction(
        &self,
        kkt: &Factored,
        scaled: &[ScaledBlock],
        m: &Metrics,
        r: &[DMatrix<f64>],
    ) -> Option<Direction> {
        let mut dir = self.newton_solve(kkt, scaled, r, &m.rp, &m.rd, &m.re)?;
        let ed = &m.rd - self.p.adjoint(&dir.dz) - self.p.e.transpose() * &dir.dw;
        let ee = &m.re - &self.p.e * &dir.dy;
        let zero_r: Vec<DMatrix<f64>> = r
            .iter()
            .map(|rk| DMatrix::zeros(rk.nrows(), rk.ncols()))
            .collect();
        if let Some(corr) = self.newton_solve(kkt, scaled, &zero_r, &zero_r, &ed, &ee) {
            let ed_new = &ed - self.p.adjoint(&corr.dz) - self.p.e.transpose() * &corr.dw;
            if ed_new.norm() < ed.norm() {
                dir.dy += corr.dy;
                dir.dw += corr.dw;
                for (a, b) in dir.ds.iter_mut().zip(&corr.ds) {
                    *a += b;
                }
                for (a, b) in dir.dz.iter_mut().zip(&corr.dz) {
                    *a += b;
                }
            }
        }
        Some(dir)
    }

    /// Newton step for complementarity right-hand side `r` and residuals
    /// `(rp, rd, re)`.
    fn newton_solve(
        &self,
        kkt: &Factored,
        scaled: &[ScaledBlock],
        r: &[DMatrix<f64>],
        rp: &[DMatrix<f64>],
        rd: &DVector<f64>,
        re: &DVector<f64>,
    ) -> Option<Direction> {
        let p = self.p;
        let n = p.n;
        let neq = p.e.nrows();
        let mut rhs = DVector::zeros(n + neq);
        for ((b, sb), (rk, rpk)) in p.blocks.iter().zip(scaled).zip(r.iter().zip(rp)) {
            let t = rk - &sb.w_inv * rpk * &sb.w_inv;
            for (i, f) in &b.coeffs {
                rhs[*i] += frob_dot(f, &t);
            }
        }
        for i in 0..n {
            rhs[i] -= rd[i];
        }
        for j in 0..neq {
            rhs[n + j] = re[j];
        }
        let sol = kkt.solve(&rhs)?;
        if !sol.iter().all(|v| v.is_finite()) {
            return None;
        }
        let dy = sol.rows(0, n).into_owned();
        let dw = -sol.rows(n, neq).into_owned();
        let mut ds = Vec::with_capacity(p.blocks.len());
        let mut dz = Vec::with_capacity(p.blocks.len());
        for ((b, sb), (rk, rpk)) in p.blocks.iter().zip(scaled).zip(r.iter().zip(rp)) {
            let dsk = b.eval_linear(&dy) + rpk;
            let mut dzk = rk - &sb.w_inv * &dsk * &sb.w_inv;
            symmetrize(&mut dzk);
            ds.push(dsk);
            dz.push(dzk);
        }
        Some(Direction { dy, dw, ds, dz })
    }

    fn finish(
        &self,
        original: &ConicProgram,
        it: Iterate,
        m: Metrics,
        status: SolverStatus,
        iterations: usize,
        history: Vec<IterationRecord>,
    ) -> SolverSolution {
        let p = self.p;
        let primal: Vec<f64> = it.y.iter().copied().collect();
        let dual_equalities: Vec<f64> = it.w.iter().zip(&p.eq_scale).map(|(w, s)| w / s).collect();
        let mut dual_scalars = Vec::with_capacity(p.n_scalar);
        let mut dual_blocks = Vec::new();
        for (k, (b, z)) in p.blocks.iter().zip(&it.z).enumerate() {
            let orig = z / b.scale;
            if k < p.n_scalar {
                dual_scalars.push(orig[(0, 0)]);
            } else {
                dual_blocks.push(orig);
            }
        }
        SolverSolution {
            status,
            objective: original.objective_value(&primal),
            primal,
            dual_objective: m.dobj,
            gap: m.gap,
            residuals: Residuals {
                primal: m.pinf,
                dual: m.dinf,
            },
            iterations,
            dual_equalities,
            dual_scalars,
            dual_blocks,
            history,
        }
    }
}

struct Factored {
    /// Equilibrated matrix `D·K·D`.
    matrix: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
    d: DVector<f64>,
}

impl Factored {
    /// Solves `K·x = b` with two rounds of iterative refinement.
    fn solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        let rhs = b.component_mul(&self.d);
        let mut u = self.lu.solve(&rhs)?;
        for _ in 0..2 {
            let resid = &rhs - &self.matrix * &u;
            match self.lu.solve(&resid) {
                Some(corr) => u += corr,
                None => break,
            }
        }
        Some(u.component_mul(&self.d))
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests;

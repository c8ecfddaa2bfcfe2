use super::linalg::frob_dot;
use super::{SolverOptions, SolverSolution};
use crate::sdp_model::{dot_sparse, min_eigenvalue, ConicProgram};

/// Optimality conditions re-evaluated from scratch on the original program.
///
/// Primal slacks are recomputed from the returned primal point rather than
/// taken from the solver iterate. Residuals are relative:
/// equality and cone terms over `1 + ‖data‖`, complementarity and gap over
/// `1 + |pobj| + |dobj|`.
#[derive(Clone, Debug, PartialEq)]
pub struct KktReport {
    pub primal_equality: f64,
    /// Largest negative eigenvalue (as a positive number) over primal cones.
    pub primal_cone: f64,
    pub dual_residual: f64,
    pub dual_cone: f64,
    pub complementarity_scalars: Vec<f64>,
    pub complementarity_blocks: Vec<f64>,
    pub gap: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

impl KktReport {
    pub fn max_primal(&self) -> f64 {
        self.primal_equality.max(self.primal_cone)
    }

    pub fn max_dual(&self) -> f64 {
        self.dual_residual.max(self.dual_cone)
    }

    pub fn max_complementarity(&self) -> f64 {
        self.complementarity_scalars
            .iter()
            .chain(&self.complementarity_blocks)
            .fold(0.0, |a, &b| a.max(b.abs()))
    }

    pub fn max_residual(&self) -> f64 {
        self.max_primal()
            .max(self.max_dual())
            .max(self.max_complementarity())
            .max(self.gap)
    }

    /// Every residual within `factor` times the matching tolerance.
    pub fn accepts(&self, opts: &SolverOptions, factor: f64) -> bool {
        let feas = factor * opts.feasibility_tolerance;
        let gap = factor * opts.gap_tolerance;
        self.max_primal() <= feas
            && self.max_dual() <= feas
            && self.max_complementarity() <= gap
            && self.gap <= gap
    }
}

pub fn check_kkt(p: &ConicProgram, s: &SolverSolution) -> KktReport {
    let y = &s.primal;
    let pobj = p.objective_value(y);

    let h_mag = p.equalities.iter().fold(0.0f64, |a, e| a.max(e.rhs.abs()));
    let primal_equality = p
        .equalities
        .iter()
        .map(|e| (dot_sparse(&e.coeffs, y) - e.rhs).abs())
        .fold(0.0, f64::max)
        / (1.0 + h_mag);

    let mut grad = vec![0.0; p.n];
    for (e, w) in p.equalities.iter().zip(&s.dual_equalities) {
        for &(i, a) in &e.coeffs {
            grad[i] += a * w;
        }
    }

    let mut primal_cone = 0.0f64;
    let mut dual_cone = 0.0f64;
    let mut dobj: f64 = p
        .equalities
        .iter()
        .zip(&s.dual_equalities)
        .map(|(e, w)| e.rhs * w)
        .sum();
    let mut comp_scalars = Vec::with_capacity(p.scalar_inequalities.len());
    for (ineq, &z) in p.scalar_inequalities.iter().zip(&s.dual_scalars) {
        let slack = ineq.eval(y);
        primal_cone = primal_cone.max((-slack).max(0.0) / (1.0 + ineq.constant.abs()));
        dual_cone = dual_cone.max((-z).max(0.0));
        for &(i, a) in &ineq.coeffs {
            grad[i] += a * z;
        }
        dobj -= ineq.constant * z;
        comp_scalars.push(slack * z);
    }
    let mut comp_blocks = Vec::with_capacity(p.psd_blocks.len());
    for (block, z) in p.psd_blocks.iter().zip(&s.dual_blocks) {
        let slack = block.eval(y);
        primal_cone =
            primal_cone.max((-min_eigenvalue(&slack)).max(0.0) / (1.0 + block.constant.norm()));
        dual_cone = dual_cone.max((-min_eigenvalue(z)).max(0.0));
        for (i, f) in &block.coeffs {
            grad[*i] += frob_dot(f, z);
        }
        dobj -= frob_dot(&block.constant, z);
        comp_blocks.push(frob_dot(&slack, z));
    }

    let c_norm = p.objective.iter().map(|c| c * c).sum::<f64>().sqrt();
    let dual_residual = p
        .objective
        .iter()
        .zip(&grad)
        .map(|(c, g)| (c - g).powi(2))
        .sum::<f64>()
        .sqrt()
        / (1.0 + c_norm);

    let denom = 1.0 + pobj.abs() + dobj.abs();
    KktReport {
        primal_equality,
        primal_cone,
        dual_residual,
        dual_cone,
        complementarity_scalars: comp_scalars.into_iter().map(|v| v / denom).collect(),
        complementarity_blocks: comp_blocks.into_iter().map(|v| v / denom).collect(),
        gap: (pobj - dobj).abs() / denom,
        primal_objective: pobj,
        dual_objective: dobj,
    }
}

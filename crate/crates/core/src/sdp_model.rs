//! Conic program for Chebyshev-center localization.
//!
//! The epigraph form of the min-max problem is
//!
//! ```text
//! minimize  t
//! s.t.      z = x̆ + γ,  [[t·I₂, γ], [γᵀ, t]] ⪰ 0,  t ≥ 0,
//!           r̲² + g_m − 2·r̲·d_m ≤ g_l^s,   r̄² + g_m − 2·r̄·d_m ≥ g_l^s,
//!           g_m = ‖t_m‖² − 2·t_mᵀz + λ,   g_l^s = ‖s_l‖² − 2·s_lᵀz + λ,
//!           [[I₂, z], [zᵀ, λ]] ⪰ 0,        [[1, d_m], [d_m, g_m]] ⪰ 0,
//! ```
//!
//! where the two PSD constraints on the last line relax `λ = zᵀz` and
//! `g_m = d_m²`. Every variable is free; all sign information lives in the
//! cone constraints.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::geometry::{GeometryError, MeasurementSet, Scenario};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("range bound for pair ({m},{l}) is not finite")]
    NonFiniteBound { m: usize, l: usize },
    #[error("upper range bound for pair ({m},{l}) must be positive, got {value}")]
    NonPositiveUpper { m: usize, l: usize, value: f64 },
    #[error("variable index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("matrix in block {block} is not {dim}x{dim} symmetric")]
    BadMatrix { block: usize, dim: usize },
    #[error("malformed problem dump at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Sparse linear form `Σ coeffs[k].1 · y[coeffs[k].0]`.
pub type SparseRow = Vec<(usize, f64)>;

/// `Σ aᵢ·yᵢ = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEquality {
    pub coeffs: SparseRow,
    pub rhs: f64,
}

/// `constant + Σ aᵢ·yᵢ ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineInequality {
    pub constant: f64,
    pub coeffs: SparseRow,
}

impl AffineInequality {
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.constant + dot_sparse(&self.coeffs, y)
    }
}

/// `F₀ + Σ yᵢ·Fᵢ ⪰ 0` with symmetric `d×d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMatrixBlock {
    pub dim: usize,
    pub constant: DMatrix<f64>,
    pub coeffs: Vec<(usize, DMatrix<f64>)>,
}

impl LinearMatrixBlock {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            constant: DMatrix::zeros(dim, dim),
            coeffs: Vec::new(),
        }
    }

    /// Adds `value` to entry `(r, c)` and its mirror of the coefficient
    /// matrix of variable `var`.
    fn add_entry(&mut self, var: usize, r: usize, c: usize, value: f64) {
        let dim = self.dim;
        let mat = match self.coeffs.iter_mut().find(|(i, _)| *i == var) {
            Some((_, m)) => m,
            None => {
                self.coeffs.push((var, DMatrix::zeros(dim, dim)));
                &mut self.coeffs.last_mut().unwrap().1
            }
        };
        mat[(r, c)] += value;
        if r != c {
            mat[(c, r)] += value;
        }
    }

    fn set_constant(&mut self, r: usize, c: usize, value: f64) {
        self.constant[(r, c)] = value;
        self.constant[(c, r)] = value;
    }

    pub fn eval(&self, y: &[f64]) -> DMatrix<f64> {
        let mut out = self.constant.clone();
        for (i, f) in &self.coeffs {
            out += f * y[*i];
        }
        out
    }
}

/// `minimize cᵀy` subject to equalities, scalar inequalities and LMIs.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicProgram {
    pub n: usize,
    pub objective: Vec<f64>,
    pub equalities: Vec<LinearEquality>,
    pub scalar_inequalities: Vec<AffineInequality>,
    pub psd_blocks: Vec<LinearMatrixBlock>,
}

impl ConicProgram {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            objective: vec![0.0; n],
            equalities: Vec::new(),
            scalar_inequalities: Vec::new(),
            psd_blocks: Vec::new(),
        }
    }

    /// Checks index bounds and exact symmetry of every block matrix.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n;
        let check = |index: usize| {
            if index < n {
                Ok(())
            } else {
                Err(ModelError::IndexOutOfRange { index, n })
            }
        };
        if self.objective.len() != n {
            return Err(ModelError::IndexOutOfRange {
                index: self.objective.len(),
                n,
            });
        }
        for row in self
            .equalities
            .iter()
            .map(|e| &e.coeffs)
            .chain(self.scalar_inequalities.iter().map(|e| &e.coeffs))
        {
            for &(i, _) in row {
                check(i)?;
            }
        }
        for (b, block) in self.psd_blocks.iter().enumerate() {
            let ok = |m: &DMatrix<f64>| m.shape() == (block.dim, block.dim) && *m == m.transpose();
            if !ok(&block.constant) {
                return Err(ModelError::BadMatrix {
                    block: b,
                    dim: block.dim,
                });
            }
            for (i, f) in &block.coeffs {
                check(*i)?;
                if !ok(f) {
                    return Err(ModelError::BadMatrix {
                        block: b,
                        dim: block.dim,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    /// Cone census: one size-1 cone per scalar inequality plus each block.
    pub fn cone_dims(&self) -> Vec<usize> {
        std::iter::repeat_n(1, self.scalar_inequalities.len())
            .chain(self.psd_blocks.iter().map(|b| b.dim))
            .collect()
    }
}

pub(crate) fn dot_sparse(row: &[(usize, f64)], y: &[f64]) -> f64 {
    row.iter().map(|&(i, a)| a * y[i]).sum()
}

/// Index map of the decision vector, in the fixed order
/// `x̆(2) z(2) γ(2) t d(M) g_t(M) g_s(L) λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableLayout {
    pub m: usize,
    pub l: usize,
}

impl VariableLayout {
    pub fn new(m: usize, l: usize) -> Self {
        Self { m, l }
    }

    pub fn center(&self) -> [usize; 2] {
        [0, 1]
    }

    pub fn z(&self) -> [usize; 2] {
        [2, 3]
    }

    pub fn gamma(&self) -> [usize; 2] {
        [4, 5]
    }

    pub fn t(&self) -> usize {
        6
    }

    pub fn d(&self, m: usize) -> usize {
        7 + m
    }

    pub fn g_tx(&self, m: usize) -> usize {
        7 + self.m + m
    }

    pub fn g_rx(&self, l: usize) -> usize {
        7 + 2 * self.m + l
    }

    pub fn lambda(&self) -> usize {
        7 + 2 * self.m + self.l
    }

    pub fn n(&self) -> usize {
        8 + 2 * self.m + self.l
    }
}

/// Builds the relaxed conic program for a scenario and bounded measurements.
pub fn build(scenario: &Scenario, meas: &MeasurementSet) -> Result<ConicProgram, ModelError> {
    scenario.validate()?;
    meas.check_dims(scenario)?;
    let (mm, ll) = (scenario.m(), scenario.l());
    for m in 0..mm {
        for l in 0..ll {
            let (lo, hi) = (meas.lower(m, l), meas.upper(m, l));
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(ModelError::NonFiniteBound { m, l });
            }
            if hi <= 0.0 {
                return Err(ModelError::NonPositiveUpper { m, l, value: hi });
            }
        }
    }

    let lay = VariableLayout::new(mm, ll);
    let mut p = ConicProgram::new(lay.n());
    p.objective[lay.t()] = 1.0;

    // z − x̆ − γ = 0
    for k in 0..2 {
        p.equalities.push(LinearEquality {
            coeffs: vec![
                (lay.z()[k], 1.0),
                (lay.center()[k], -1.0),
                (lay.gamma()[k], -1.0),
            ],
            rhs: 0.0,
        });
    }
    // g = ‖p‖² − 2·pᵀz + λ, written as g + 2·pᵀz − λ = ‖p‖²
    let anchor_row = |g: usize, p: crate::geometry::Point2| LinearEquality {
        coeffs: vec![
            (g, 1.0),
            (lay.z()[0], 2.0 * p.x),
            (lay.z()[1], 2.0 * p.y),
            (lay.lambda(), -1.0),
        ],
        rhs: p.norm_squared(),
    };
    for (m, t) in scenario.transmitters.iter().enumerate() {
        p.equalities.push(anchor_row(lay.g_tx(m), *t));
    }
    for (l, s) in scenario.receivers.iter().enumerate() {
        p.equalities.push(anchor_row(lay.g_rx(l), *s));
    }

    for m in 0..mm {
        for l in 0..ll {
            let (lo, hi) = (meas.lower(m, l), meas.upper(m, l));
            // g_s − g_t + 2·r̲·d − r̲² ≥ 0
            p.scalar_inequalities.push(AffineInequality {
                constant: -lo * lo,
                coeffs: vec![
                    (lay.g_rx(l), 1.0),
                    (lay.g_tx(m), -1.0),
                    (lay.d(m), 2.0 * lo),
                ],
            });
            // r̄² + g_t − 2·r̄·d − g_s ≥ 0
            p.scalar_inequalities.push(AffineInequality {
                constant: hi * hi,
                coeffs: vec![
                    (lay.g_tx(m), 1.0),
                    (lay.d(m), -2.0 * hi),
                    (lay.g_rx(l), -1.0),
                ],
            });
        }
    }
    p.scalar_inequalities.push(AffineInequality {
        constant: 0.0,
        coeffs: vec![(lay.t(), 1.0)],
    });

    // [[t·I₂, γ], [γᵀ, t]]
    let mut ball = LinearMatrixBlock::new(3);
    for k in 0..3 {
        ball.add_entry(lay.t(), k, k, 1.0);
    }
    ball.add_entry(lay.gamma()[0], 0, 2, 1.0);
    ball.add_entry(lay.gamma()[1], 1, 2, 1.0);
    p.psd_blocks.push(ball);

    // [[I₂, z], [zᵀ, λ]]
    let mut lift = LinearMatrixBlock::new(3);
    lift.set_constant(0, 0, 1.0);
    lift.set_constant(1, 1, 1.0);
    lift.add_entry(lay.z()[0], 0, 2, 1.0);
    lift.add_entry(lay.z()[1], 1, 2, 1.0);
    lift.add_entry(lay.lambda(), 2, 2, 1.0);
    p.psd_blocks.push(lift);

    // [[1, d_m], [d_m, g_m]]
    for m in 0..mm {
        let mut b = LinearMatrixBlock::new(2);
        b.set_constant(0, 0, 1.0);
        b.add_entry(lay.d(m), 0, 1, 1.0);
        b.add_entry(lay.g_tx(m), 1, 1, 1.0);
        p.psd_blocks.push(b);
    }

    Ok(p)
}

/// Size accounting for the program of a scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramStats {
    pub n_var: usize,
    /// `5 + 2ML + 2M + L`, the published cone count.
    pub n_sd_formula: usize,
    /// Cone count of the program this crate actually builds: `3 + 2ML + M`.
    pub n_sd_census: usize,
    /// Dimension of every cone in the built program, scalar cones first.
    pub block_dims: Vec<usize>,
}

pub fn stats(scenario: &Scenario) -> Result<ProgramStats, ModelError> {
    scenario.validate()?;
    let (m, l) = (scenario.m(), scenario.l());
    // Placeholder bounds: structure does not depend on the values.
    let ranges = DMatrix::from_fn(m, l, |i, j| {
        scenario.transmitters[i].distance(&scenario.receivers[j]) + 1.0
    });
    let program = build(scenario, &MeasurementSet::new(ranges, 0.0)?)?;
    let block_dims = program.cone_dims();
    Ok(ProgramStats {
        n_var: program.n,
        n_sd_formula: 5 + 2 * m * l + 2 * m + l,
        n_sd_census: block_dims.len(),
        block_dims,
    })
}

/// Constraint violation summary at a given point.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub max_equality_residual: f64,
    /// `+∞` when there are no scalar inequalities.
    pub min_scalar_inequality: f64,
    pub block_min_eigenvalues: Vec<f64>,
}

impl ResidualReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_equality_residual <= tol
            && self.min_scalar_inequality >= -tol
            && self.block_min_eigenvalues.iter().all(|&e| e >= -tol)
    }
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)];
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

pub fn evaluate_constraints(p: &ConicProgram, y: &[f64]) -> ResidualReport {
    assert_eq!(y.len(), p.n, "point has wrong dimension");
    let max_equality_residual = p
        .equalities
        .iter()
        .map(|e| (dot_sparse(&e.coeffs, y) - e.rhs).abs())
        .fold(0.0, f64::max);
    let min_scalar_inequality = p
        .scalar_inequalities
        .iter()
        .map(|e| e.eval(y))
        .fold(f64::INFINITY, f64::min);
    let block_min_eigenvalues = p
        .psd_blocks
        .iter()
        .map(|b| min_eigenvalue(&b.eval(y)))
        .collect();
    ResidualReport {
        max_equality_residual,
        min_scalar_inequality,
        block_min_eigenvalues,
    }
}

/// The lifted point of a candidate location `z` with zero radius:
/// `x̆ = z`, `γ = 0`, `t = 0`, `d_m = ‖z − t_m‖`, `g = d²`, `λ = ‖z‖²`.
pub fn lift_point(scenario: &Scenario, z: crate::geometry::Point2) -> DVector<f64> {
    let lay = VariableLayout::new(scenario.m(), scenario.l());
    let mut y = DVector::zeros(lay.n());
    for k in 0..2 {
        let v = if k == 0 { z.x } else { z.y };
        y[lay.center()[k]] = v;
        y[lay.z()[k]] = v;
    }
    for (m, t) in scenario.transmitters.iter().enumerate() {
        let d = z.distance(t);
        y[lay.d(m)] = d;
        y[lay.g_tx(m)] = d * d;
    }
    for (l, s) in scenario.receivers.iter().enumerate() {
        y[lay.g_rx(l)] = z.distance(s).powi(2);
    }
    y[lay.lambda()] = z.norm_squared();
    y
}

/// Plain-text dump, one record per line, floats in shortest round-trip form.
///
/// ```text
/// program <n>
/// c <var> <value>
/// eq <row> <rhs> <var>:<coeff> ...
/// ineq <row> <constant> <var>:<coeff> ...
/// block <index> <dim>
/// f0 <block> <r> <c> <value>        (upper triangle, nonzeros)
/// f <block> <var> <r> <c> <value>   (upper triangle, nonzeros)
/// ```
pub fn dump(p: &ConicProgram) -> String {
    let mut out = String::new();
    writeln!(out, "program {}", p.n).unwrap();
    for (i, c) in p.objective.iter().enumerate() {
        if *c != 0.0 {
            writeln!(out, "c {i} {c:?}").unwrap();
        }
    }
    let row = |coeffs: &SparseRow| {
        coeffs
            .iter()
            .map(|(i, a)| format!(" {i}:{a:?}"))
            .collect::<String>()
    };
    for (k, e) in p.equalities.iter().enumerate() {
        writeln!(out, "eq {k} {:?}{}", e.rhs, row(&e.coeffs)).unwrap();
    }
    for (k, e) in p.scalar_inequalities.iter().enumerate() {
        writeln!(out, "ineq {k} {:?}{}", e.constant, row(&e.coeffs)).unwrap();
    }
    for (b, block) in p.psd_blocks.iter().enumerate() {
        writeln!(out, "block {b} {}", block.dim).unwrap();
        for r in 0..block.dim {
            for c in r..block.dim {
                let v = block.constant[(r, c)];
                if v != 0.0 {
                    writeln!(out, "f0 {b} {r} {c} {v:?}").unwrap();
                }
            }
        }
        for (i, f) in &block.coeffs {
            for r in 0..block.dim {
                for c in r..block.dim {
                    let v = f[(r, c)];
                    if v != 0.0 {
                        writeln!(out, "f {b} {i} {r} {c} {v:?}").unwrap();
                    }
                }
            }
        }
    }
    out
}

/// Parses the output of [`dump`].
pub fn parse_dump(text: &str) -> Result<ConicProgram, ModelError> {
    let err = |line: usize, msg: &str| ModelError::Parse {
        line: line + 1,
        msg: msg.to_string(),
    };
    let mut program: Option<ConicProgram> = None;
    for (ln, raw) in text.lines().enumerate() {
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(ln, "bad float"));
        let idx = |s: &str| s.parse::<usize>().map_err(|_| err(ln, "bad index"));
        let pairs = |rest: &[&str]| -> Result<SparseRow, ModelError> {
            rest.iter()
                .map(|t| {
                    let (i, a) = t
                        .split_once(':')
                        .ok_or_else(|| err(ln, "expected var:coeff"))?;
                    Ok((idx(i)?, num(a)?))
                })
                .collect()
        };
        if toks[0] == "program" {
            let n = idx(toks.get(1).ok_or_else(|| err(ln, "missing n"))?)?;
            program = Some(ConicProgram::new(n));
            continue;
        }
        let p = program
            .as_mut()
            .ok_or_else(|| err(ln, "record before header"))?;
        let arg = |k: usize| toks.get(k).copied().ok_or_else(|| err(ln, "missing field"));
        match toks[0] {
            "c" => {
                let i = idx(arg(1)?)?;
                *p.objective
                    .get_mut(i)
                    .ok_or_else(|| err(ln, "index out of range"))? = num(arg(2)?)?;
            }
            "eq" => p.equalities.push(LinearEquality {
                rhs: num(arg(2)?)?,
                coeffs: pairs(&toks[3..])?,
            }),
            "ineq" => p.scalar_inequalities.push(AffineInequality {
                constant: num(arg(2)?)?,
                coeffs: pairs(&toks[3..])?,
            }),
            "block" => p.psd_blocks.push(LinearMatrixBlock::new(idx(arg(2)?)?)),
            "f0" | "f" => {
                let b = idx(arg(1)?)?;
                let off = usize::from(toks[0] == "f");
                let (r, c, v) = (
                    idx(arg(2 + off)?)?,
                    idx(arg(3 + off)?)?,
                    num(arg(4 + off)?)?,
                );
                let block = p
                    .psd_blocks
                    .get_mut(b)
                    .ok_or_else(|| err(ln, "unknown block"))?;
                if r >= block.dim || c >= block.dim {
                    return Err(err(ln, "entry outside block"));
                }
                if off == 0 {
                    block.set_constant(r, c, v);
                } else {
                    block.add_entry(idx(arg(2)?)?, r, c, v);
                }
            }
            _ => return Err(err(ln, "unknown record")),
        }
    }
    let p = program.ok_or_else(|| err(0, "empty dump"))?;
    p.validate()?;
    Ok(p)
}

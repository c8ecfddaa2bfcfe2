//! Random conic programs with a known optimum.
//!
//! A primal point `y*`, complementary cone pairs `S*·Z* = 0` and equality
//! multipliers `w*` are drawn first; the data `F0`, `h` and `c` are then
//! chosen so that `(y*, S*, Z*, w*)` satisfies the optimality conditions
//! exactly. The optimal value is therefore `cᵀy*` by construction.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::sdp_model::{AffineInequality, ConicProgram, LinearEquality, LinearMatrixBlock};

#[derive(Clone, Debug)]
pub struct KnownOptimum {
    pub program: ConicProgram,
    pub optimal_value: f64,
    pub primal: Vec<f64>,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| normal(rng));
    a.qr().q()
}

fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| normal(rng));
    (&a + a.transpose()) * 0.5
}

/// Draws an instance with at most `max_vars` variables and PSD blocks of
/// size at most `max_block`.
pub fn kkt_consistent(seed: u64, max_vars: usize, max_block: usize) -> KnownOptimum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_vars.max(2));
    let n_eq = rng.random_range(0..=(n / 3).min(3));
    let n_scalar = rng.random_range(0..=4usize);

    // Enough cone rows that the program is bounded in every direction.
    let mut dims = Vec::new();
    let mut rows = n_scalar;
    while rows < n + 2 || dims.is_empty() {
        let d = rng.random_range(1..=max_block.max(1));
        rows += d * (d + 1) / 2;
        dims.push(d);
    }

    let y_star: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let mut program = ConicProgram::new(n);
    let mut grad = vec![0.0; n];

    for &d in &dims {
        let block = random_block(&mut rng, d, &y_star, &mut grad, false);
        program.psd_blocks.push(block);
    }
    // Every direction of `y` must move some constraint, otherwise the
    // optimum is not unique and the objective is flat along it.
    while !is_injective(&program, n) {
        let d = rng.random_range(2..=max_block.max(2));
        let block = random_block(&mut rng, d, &y_star, &mut grad, true);
        program.psd_blocks.push(block);
    }

    for _ in 0..n_scalar {
        let mut coeffs: Vec<(usize, f64)> = vec![(0, 1.0)];
        for i in 1..n {
            if rng.random_bool(0.5) {
                coeffs.push((i, normal(&mut rng)));
            }
        }
        let active = rng.random_bool(0.5);
        let (s, z) = if active {
            (0.0, rng.random_range(0.5..2.0))
        } else {
            (rng.random_range(0.5..2.0), 0.0)
        };
        let ay: f64 = coeffs.iter().map(|&(i, a)| a * y_star[i]).sum();
        for &(i, a) in &coeffs {
            grad[i] += a * z;
        }
        program.scalar_inequalities.push(AffineInequality {
            constant: s - ay,
            coeffs,
        });
    }

    for _ in 0..n_eq {
        let coeffs: Vec<(usize, f64)> = (0..n).map(|i| (i, normal(&mut rng))).collect();
        let w = normal(&mut rng);
        let rhs: f64 = coeffs.iter().map(|&(i, a)| a * y_star[i]).sum();
        for &(i, a) in &coeffs {
            grad[i] += a * w;
        }
        program.equalities.push(LinearEquality { coeffs, rhs });
    }

    program.objective = grad;
    debug_assert!(is_injective(&program, n));
    let optimal_value = program.objective_value(&y_star);
    KnownOptimum {
        program,
        optimal_value,
        primal: y_star,
    }
}

/// A block whose slack at `y*` and dual are complementary with ranks
/// adding up to `d`. Adds `⟨F_i, Z*⟩` to `grad`.
fn random_block(
    rng: &mut ChaCha8Rng,
    d: usize,
    y_star: &[f64],
    grad: &mut [f64],
    all_vars: bool,
) -> LinearMatrixBlock {
    let q = random_orthogonal(rng, d);
    let rank = rng.random_range(0..=d);
    let mut s_diag = DMatrix::zeros(d, d);
    let mut z_diag = DMatrix::zeros(d, d);
    for i in 0..d {
        let v = rng.random_range(0.5..2.0);
        if i < rank {
            s_diag[(i, i)] = v;
        } else {
            z_diag[(i, i)] = v;
        }
    }
    let s_star = &q * s_diag * q.transpose();
    let z_star = &q * z_diag * q.transpose();

    let mut block = LinearMatrixBlock::new(d);
    let mut f0 = s_star;
    for (i, &yi) in y_star.iter().enumerate() {
        // Variable 0 enters every block through the identity, which
        // guarantees a strictly feasible primal point.
        let f = if i == 0 {
            DMatrix::identity(d, d)
        } else if all_vars || rng.random_bool(0.6) {
            random_symmetric(rng, d)
        } else {
            continue;
        };
        f0 -= &f * yi;
        grad[i] += f.iter().zip(z_star.iter()).map(|(a, b)| a * b).sum::<f64>();
        block.coeffs.push((i, f));
    }
    block.constant = (&f0 + f0.transpose()) * 0.5;
    block
}

/// Whether `y ↦ (F(y), a(y))` over all blocks and scalar rows has full column rank.
fn is_injective(p: &ConicProgram, n: usize) -> bool {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for b in &p.psd_blocks {
        for r in 0..b.dim {
            for c in r..b.dim {
                let mut row = vec![0.0; n];
                for (i, f) in &b.coeffs {
                    row[*i] += f[(r, c)];
                }
                rows.push(row);
            }
        }
    }
    for ineq in &p.scalar_inequalities {
        let mut row = vec![0.0; n];
        for &(i, a) in &ineq.coeffs {
            row[i] += a;
        }
        rows.push(row);
    }
    if rows.len() < n {
        return false;
    }
    let m = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    let sv = m.singular_values();
    sv.min() > 1e-8 * sv.max()
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub(crate) fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Eigen-decomposition of a symmetric matrix, `None` on non-finite input.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
    if !m.iter().all(|v| v.is_finite()) {
        return None;
    }
    if m.nrows() == 1 {
        return Some((DVector::from_element(1, m[(0, 0)]), DMatrix::identity(1, 1)));
    }
    let e = SymmetricEigen::new(m.clone());
    Some((e.eigenvalues, e.eigenvectors))
}

/// Largest `α` with `X + α·ΔX ⪰ 0` summed over blocks (`∞` when unbounded).
pub(crate) fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xk, dk) in x.iter().zip(dx) {
        let a = if xk.nrows() == 1 {
            let d = dk[(0, 0)];
            if d < 0.0 {
                -xk[(0, 0)] / d
            } else {
                f64::INFINITY
            }
        } else {
            let Some(chol) = xk.clone().cholesky() else {
                return 0.0;
            };
            let l = chol.l();
            // L⁻¹ ΔX L⁻ᵀ
            let Some(li) = l.clone().try_inverse() else {
                return 0.0;
            };
            let mut m = &li * dk * li.transpose();
            let n = m.nrows();
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            match sym_eigen(&m) {
                Some((vals, _)) => {
                    let lo = vals.min();
                    if lo < 0.0 {
                        -1.0 / lo
                    } else {
                        f64::INFINITY
                    }
                }
                None => 0.0,
            }
        };
        alpha = alpha.min(a);
    }
    alpha
}

/// Nesterov–Todd scaling of one block: `W = G·Gᵀ` with `W·Z·W = S`, and the
/// scaled point `Λ = Gᵀ·Z·G = G⁻¹·S·G⁻ᵀ`, which is diagonal.
///
/// Built from Cholesky factors `S = L_s·L_sᵀ`, `Z = L_z·L_zᵀ` and the SVD
/// `L_zᵀ·L_s = U·D·Vᵀ`, giving `G = L_s·V·D^{-1/2}` and `Λ = D`. The singular
/// values are of order `√μ`, so this keeps far more accuracy near the
/// boundary than eigen-decompositions of `S^{1/2}·Z·S^{1/2}`.
pub(crate) struct ScaledBlock {
    pub w_inv: DMatrix<f64>,
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    lam: DVector<f64>,
}

impl ScaledBlock {
    pub fn new(s: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Self> {
        let d = s.nrows();
        if d == 1 {
            let (sv, zv) = (s[(0, 0)], z[(0, 0)]);
            if !(sv > 0.0 && zv > 0.0) {
                return None;
            }
            // W = √(s/z), G = W^½.
            let w = (sv / zv).sqrt();
            let g = w.sqrt();
            return Some(Self {
                w_inv: DMatrix::from_element(1, 1, 1.0 / w),
                g: DMatrix::from_element(1, 1, g),
                g_inv: DMatrix::from_element(1, 1, 1.0 / g),
                lam: DVector::from_element(1, (sv * zv).sqrt()),
            });
        }
        if !(s.iter().chain(z.iter()).all(|v| v.is_finite())) {
            return None;
        }
        let ls = s.clone().cholesky()?.l();
        let lz = z.clone().cholesky()?.l();
        let svd = (lz.transpose() * &ls).svd(false, true);
        let v_t = svd.v_t?;
        let lam = svd.singular_values;
        if !(lam.min() > 0.0) {
            return None;
        }
        let ls_inv = ls.solve_lower_triangular(&DMatrix::identity(d, d))?;
        let mut g = &ls * v_t.transpose();
        let mut g_inv = &v_t * ls_inv;
        for j in 0..d {
            let r = lam[j].sqrt();
            g.column_mut(j).unscale_mut(r);
            g_inv.row_mut(j).scale_mut(r);
        }
        let w_inv = sym(g_inv.transpose() * &g_inv);
        Some(Self {
            w_inv,
            g,
            g_inv,
            lam,
        })
    }

    /// Right-hand side `R` of `ΔZ + W⁻¹ΔS W⁻¹ = R` for the corrector step:
    /// the scaled equation `Λ∘(ΔS̃ + ΔZ̃) = σμI − Λ² − ΔS̃ₐ∘ΔZ̃ₐ` with
    /// `ΔS̃ = G⁻¹ΔS G⁻ᵀ` and `ΔZ̃ = GᵀΔZ G`.
    pub fn corrector_rhs(
        &self,
        sigma_mu: f64,
        ds_aff: &DMatrix<f64>,
        dz_aff: &DMatrix<f64>,
    ) -> DMatrix<f64> {
        let d = self.lam.len();
        let ds = &self.g_inv * ds_aff * self.g_inv.transpose();
        let dz = self.g.transpose() * dz_aff * &self.g;
        let mut r = -(&ds * &dz + &dz * &ds) * 0.5;
        for i in 0..d {
            r[(i, i)] += sigma_mu - self.lam[i] * self.lam[i];
        }
        let x = DMatrix::from_fn(d, d, |i, j| 2.0 * r[(i, j)] / (self.lam[i] + self.lam[j]));
        sym(self.g_inv.transpose() * sym(x) * &self.g_inv)
    }
}

fn sym(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

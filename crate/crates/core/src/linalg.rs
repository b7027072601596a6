//! Cholesky factorization of small Hermitian positive-definite matrices.

use num_complex::Complex64;

use crate::channel::{CMatrix, CVector};
use crate::error::{Error, Result};

/// Lower-triangular `L` with `A = L Lᴴ` and a real positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    lower: CMatrix,
    /// Squared pivots minus one, `L_jj² − 1`.
    excess: Vec<f64>,
}

impl Cholesky {
    /// Factors `a`, reading only its lower triangle.
    pub fn factor(a: &CMatrix) -> Result<Self> {
        Self::factor_impl(a, 0.0)
    }

    /// Factors `I + g` without forming it. Pivots are tracked as their
    /// excess over one, so `log_det` stays accurate when `g` is tiny.
    pub fn factor_identity_plus(g: &CMatrix) -> Result<Self> {
        Self::factor_impl(g, 1.0)
    }

    // Factors `shift·I + a`.
    fn factor_impl(a: &CMatrix, shift: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "cannot factor a {}×{} matrix",
                n,
                a.ncols()
            )));
        }
        let mut l = CMatrix::zeros(n, n);
        let mut excess = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = a[(j, j)].re;
            for k in 0..j {
                e -= l[(j, k)].norm_sqr();
            }
            // with shift 1 the pivot is 1 + e; otherwise e is the pivot itself
            let d = e + shift;
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            excess.push(if shift == 1.0 { e } else { d - 1.0 });
            let d = d.sqrt();
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { lower: l, excess })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &CMatrix {
        &self.lower
    }

    /// `ln det A = Σ ln L_jj²`.
    pub fn log_det(&self) -> f64 {
        self.excess.iter().map(|e| e.ln_1p()).sum()
    }

    /// Solves `L y = b` by forward substitution.
    pub fn solve_lower(&self, b: &CVector) -> CVector {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side has wrong length");
        let mut y = b.clone();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lower[(i, k)] * y[k];
            }
            y[i] = s / self.lower[(i, i)].re;
        }
        y
    }

    /// `vᴴ A⁻¹ v = ‖L⁻¹ v‖²`.
    pub fn inverse_quad_form(&self, v: &CVector) -> f64 {
        self.solve_lower(v).norm_squared()
    }
}

/// `ln det A` for Hermitian positive-definite `A`.
pub fn log_det_hpd(a: &CMatrix) -> Result<f64> {
    Cholesky::factor(a).map(|c| c.log_det())
}

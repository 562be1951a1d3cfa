use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, Complex};

/// A validated density matrix: Hermitian, unit trace and positive
/// semidefinite, each within the tolerance it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        m.check_finite()?;
        let deviation = m.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max deviation {deviation:e})"
            )));
        }
        let tr = m.trace();
        if (tr - Complex::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidState(format!(
                "trace {} differs from 1",
                tr.re
            )));
        }
        let min = matrix::min_eigenvalue(&m, tol)?;
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix known to be a valid state by construction.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.m[(row, col)]
    }

    /// `trace(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_inputs() {
        let bad_trace = CMatrix::from_real_diag(&[0.5, 0.4]);
        assert!(DensityMatrix::new(bad_trace, 1e-10).is_err());
        let negative = CMatrix::from_real_diag(&[1.1, -0.1]);
        assert!(DensityMatrix::new(negative, 1e-10).is_err());
        let mut non_herm = CMatrix::from_real_diag(&[0.5, 0.5]);
        non_herm[(0, 1)] = Complex::new(0.1, 0.0);
        assert!(DensityMatrix::new(non_herm, 1e-10).is_err());
    }

    #[test]
    fn maximally_mixed_purity() {
        let rho = DensityMatrix::new(CMatrix::from_real_diag(&[0.25; 4]), 1e-12).unwrap();
        assert!((rho.purity() - 0.25).abs() < 1e-15);
    }
}

use num_complex::Complex;

use super::eigen::{herm_eigen, herm_eigvals};
use super::matrix::ComplexMatrix;
use super::ops::{self, Subsystem};
use crate::error::{Error, Result};
use crate::scalar::{tol, Real};

/// A validated density matrix: unit trace, Hermitian and positive semidefinite
/// to within `tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
    tolerance: T,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, T::lit(tol::STRUCTURAL))
    }

    pub fn with_tolerance(matrix: ComplexMatrix<T>, tolerance: T) -> Result<Self> {
        validate(&matrix, tolerance)?;
        Ok(Self { matrix, tolerance })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        herm_eigvals(&self.matrix).expect("validated Hermitian")
    }

    pub fn partial_trace(&self, sub: Subsystem) -> Result<Self> {
        let m = ops::partial_trace3(&self.matrix, sub)?;
        Self::with_tolerance(m, self.tolerance)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let m = ops::tensor(&self.matrix, &other.matrix)?;
        Self::with_tolerance(m, self.tolerance.max(other.tolerance))
    }

    /// `u ρ u†`, revalidated.
    pub fn conjugated(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(ops::conjugate(u, &self.matrix), self.tolerance)
    }

    /// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let sqrt_rho = herm_eigen(&self.matrix)?
            .map_spectrum(|l| Complex::new(l.max(T::zero()).sqrt(), T::zero()));
        let inner = &(&sqrt_rho * &other.matrix) * &sqrt_rho;
        let vals = herm_eigvals(&inner)?;
        let s: T = vals.iter().map(|v| v.max(T::zero()).sqrt()).sum();
        Ok(s * s)
    }
}

/// Checks the three density-matrix conditions, reporting the first failure.
pub fn validate<T: Real>(m: &ComplexMatrix<T>, tolerance: T) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::InvalidDensity("non-finite entries".into()));
    }
    let tr = m.trace();
    if (tr.re - T::one()).abs() > tolerance || tr.im.abs() > tolerance {
        return Err(Error::InvalidDensity(format!(
            "trace {} + {}i differs from 1",
            tr.re, tr.im
        )));
    }
    let asym = m.hermitian_asymmetry();
    if asym > tolerance {
        return Err(Error::InvalidDensity(format!(
            "Hermitian asymmetry {:e} above {:e}",
            asym, tolerance
        )));
    }
    let min = herm_eigen(m)?.values[0];
    if min < -tolerance {
        return Err(Error::InvalidDensity(format!(
            "smallest eigenvalue {:e} is negative",
            min
        )));
    }
    Ok(())
}

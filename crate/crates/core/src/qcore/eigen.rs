//! Hermitian eigensolver (cyclic complex Jacobi).

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{tol, Real};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }

    /// Rebuilds V f(Λ) V† for a spectral function `f`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let n = self.vectors.dim();
        let fv: Vec<Complex<T>> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)].conj()
            })
        })
    }
}

fn check_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    let asym = m.hermitian_asymmetry();
    if asym > T::lit(tol::STRUCTURAL) || !asym.is_finite() {
        return Err(Error::NotHermitian {
            asymmetry: asym.as_f64(),
        });
    }
    Ok(())
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn herm_eigen<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    check_hermitian(m)?;
    Ok(jacobi(m))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn herm_eigvals<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    herm_eigen(m).map(|e| e.values)
}

fn jacobi<T: Real>(m: &ComplexMatrix<T>) -> HermitianEigen<T> {
    let n = m.dim();
    // symmetrise so that round-off asymmetry cannot stall the sweeps
    let half = T::lit(0.5);
    let mut a = ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.norm();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= eps * scale * T::lit(0.5) || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= T::min_positive_value() || r <= eps * eps * scale {
                    continue;
                }
                let phase = apq / r; // e^{i theta}
                let phase_c = phase.conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (r + r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                // A <- A J, V <- V J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * phase_c * s;
                    a[(k, q)] = akp * s + akq * phase_c * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * phase_c * s;
                    v[(k, q)] = vkp * s + vkq * phase_c * c;
                }
                // A <- J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::ops::pauli;

    #[test]
    fn pauli_z_spectrum() {
        let vals = herm_eigvals(&pauli::z::<f64>()).unwrap();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_with_asymmetry() {
        let m = ComplexMatrix::<f64>::from_real_rows(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        match herm_eigvals(&m) {
            Err(Error::NotHermitian { asymmetry }) => assert!((asymmetry - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reconstructs_complex_hermitian() {
        // hand-picked Hermitian 3x3 with complex couplings
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let m = ComplexMatrix::from_rows(vec![
            one * 2.0,
            one + i,
            i * -0.5,
            one - i,
            one * -1.0,
            one * 0.3,
            i * 0.5,
            one * 0.3,
            one * 0.7,
        ])
        .unwrap();
        let e = herm_eigen(&m).unwrap();
        let back = e.map_spectrum(|l| Complex::new(l, 0.0));
        assert!(back.max_abs_diff(&m) < 1e-13);
        let tr: f64 = e.values.iter().sum();
        assert!((tr - 1.7).abs() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        let m = ComplexMatrix::<f64>::identity(8).scale_real(0.125);
        let vals = herm_eigvals(&m).unwrap();
        assert!(vals.iter().all(|v| (v - 0.125).abs() < 1e-16));
    }
}

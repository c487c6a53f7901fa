//! Tensor products, partial traces, qubit operators and unitary exponentials.
//!
//! Basis convention: `|0>` is the ground state and `|1>` the excited state.
//! Multi-qubit indices are fused row-major with the left tensor factor as the
//! slowest index, so for three qubits ordered `c ⊗ b ⊗ a` the index of
//! `|c b a>` is `4c + 2b + a`.

use num_complex::Complex;
use num_traits::Zero;

use super::eigen::herm_eigen;
use super::matrix::{ComplexMatrix, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Kronecker product `a ⊗ b`; `(a⊗b)(i·nb+k, j·nb+l) = a(i,j)·b(k,l)`.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (na, nb) = (a.dim(), b.dim());
    let dim = na * nb;
    if dim > MAX_DIM {
        return Err(Error::DimensionOverflow { dim });
    }
    Ok(ComplexMatrix::from_fn(dim, |r, c| {
        a[(r / nb, c / nb)] * b[(r % nb, c % nb)]
    }))
}

/// Tensor product of several factors, left to right.
pub fn tensor_all<T: Real>(factors: &[&ComplexMatrix<T>]) -> Result<ComplexMatrix<T>> {
    let (first, rest) = factors.split_first().ok_or(Error::DimensionMismatch {
        expected: 1,
        found: 0,
    })?;
    rest.iter()
        .try_fold((*first).clone(), |acc, f| tensor(&acc, f))
}

/// Which qubit of a register to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Middle,
    Last,
}

fn qubit_count(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() && dim >= 2 {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Traces out qubit `k` (0 = leftmost factor) of an n-qubit operator.
pub fn trace_out_qubit<T: Real>(m: &ComplexMatrix<T>, k: usize) -> Result<ComplexMatrix<T>> {
    let n = qubit_count(m.dim()).ok_or(Error::DimensionMismatch {
        expected: m.dim().next_power_of_two(),
        found: m.dim(),
    })?;
    if k >= n || n < 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: m.dim(),
        });
    }
    let bit = n - 1 - k;
    let low_mask = (1usize << bit) - 1;
    // reduced index r -> full index with 0/1 inserted at position `bit`
    let expand = |r: usize, v: usize| ((r & !low_mask) << 1) | (v << bit) | (r & low_mask);
    let rd = m.dim() / 2;
    Ok(ComplexMatrix::from_fn(rd, |i, j| {
        m[(expand(i, 0), expand(j, 0))] + m[(expand(i, 1), expand(j, 1))]
    }))
}

/// Reduced two-qubit matrix of a three-qubit operator.
pub fn partial_trace3<T: Real>(m: &ComplexMatrix<T>, sub: Subsystem) -> Result<ComplexMatrix<T>> {
    if m.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: m.dim(),
        });
    }
    let k = match sub {
        Subsystem::First => 0,
        Subsystem::Middle => 1,
        Subsystem::Last => 2,
    };
    trace_out_qubit(m, k)
}

/// Embeds a single-qubit operator on qubit `k` (0 = leftmost) of an `n`-qubit register.
pub fn on_qubit<T: Real>(op: &ComplexMatrix<T>, k: usize, n: usize) -> Result<ComplexMatrix<T>> {
    let id = ComplexMatrix::identity(2);
    let factors: Vec<&ComplexMatrix<T>> = (0..n).map(|q| if q == k { op } else { &id }).collect();
    tensor_all(&factors)
}

/// `e^{i·sign·θ·h}` for Hermitian `h`, by spectral decomposition.
pub fn expm_skew<T: Real>(h: &ComplexMatrix<T>, theta: T, sign: i8) -> Result<ComplexMatrix<T>> {
    let s = if sign >= 0 { theta } else { -theta };
    let eig = herm_eigen(h)?;
    Ok(eig.map_spectrum(|l| {
        let arg = s * l;
        Complex::new(arg.cos(), arg.sin())
    }))
}

/// `u ρ u†`.
pub fn conjugate<T: Real>(u: &ComplexMatrix<T>, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    &(u * rho) * &u.adjoint()
}

/// Single-qubit operators in the ground = `|0>` basis.
pub mod pauli {
    use super::*;

    fn m2<T: Real>(e: [(f64, f64); 4]) -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(
            e.iter()
                .map(|&(re, im)| Complex::new(T::lit(re), T::lit(im)))
                .collect(),
        )
        .expect("2x2")
    }

    /// Lowering operator `|g><e|`.
    pub fn lower<T: Real>() -> ComplexMatrix<T> {
        m2([(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])
    }

    /// Raising operator `|e><g|`.
    pub fn raise<T: Real>() -> ComplexMatrix<T> {
        m2([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    /// `|e><e| - |g><g|`, so that `ω σ_z / 2` puts the excited state at `+ω/2`.
    pub fn z<T: Real>() -> ComplexMatrix<T> {
        m2([(-1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)])
    }

    pub fn x<T: Real>() -> ComplexMatrix<T> {
        m2([(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    pub fn y<T: Real>() -> ComplexMatrix<T> {
        m2([(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)])
    }

    /// Exchange operator `σ₋⊗σ₊ + σ₊⊗σ₋` on two qubits.
    pub fn exchange<T: Real>() -> ComplexMatrix<T> {
        let (l, r) = (lower::<T>(), raise::<T>());
        let a = tensor(&l, &r).expect("4x4");
        let b = tensor(&r, &l).expect("4x4");
        &a + &b
    }
}

/// Projector `|ψ><ψ|`.
pub fn projector<T: Real>(psi: &[Complex<T>]) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
}

/// Basis ket `|index>` in dimension `dim`.
pub fn basis<T: Real>(dim: usize, index: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); dim];
    v[index] = Complex::new(T::one(), T::zero());
    v
}

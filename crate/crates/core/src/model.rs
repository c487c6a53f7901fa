//! Waveguide-induced rates and the two-qubit Lindblad generator.
//!
//! Two-qubit operators use the ordering `a ⊗ b`: qubit a is the left (slow)
//! tensor factor, so `|01>` has qubit b excited. Rates are angular
//! frequencies in rad/µs and time is in µs.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{on_qubit, pauli, ComplexMatrix, MAX_DIM};
use crate::scalar::{tol, Real};

/// Physical inputs: bare coupling, intrinsic decay, wavelength ratio and the
/// optional bare detuning and switchable exchange coupling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams<T> {
    /// Bare qubit-waveguide coupling γ (rad/µs).
    pub gamma: T,
    /// Intrinsic non-radiative relaxation γ_nr (rad/µs).
    pub gamma_nr: T,
    /// λ / x₂.
    pub lambda_ratio: T,
    /// ω_a − ω_b (rad/µs).
    pub detuning: T,
    /// Switchable direct exchange coupling g (rad/µs).
    pub coupling: T,
}

impl<T: Real> WaveguideParams<T> {
    pub fn new(gamma: T, gamma_nr: T, lambda_ratio: T) -> Result<Self> {
        let p = Self {
            gamma,
            gamma_nr,
            lambda_ratio,
            detuning: T::zero(),
            coupling: T::zero(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Rates given as plain linear frequencies in MHz (the 2π is applied here).
    pub fn from_mhz(gamma_mhz: T, gamma_nr_mhz: T, lambda_ratio: T) -> Result<Self> {
        let two_pi = T::TAU();
        Self::new(two_pi * gamma_mhz, two_pi * gamma_nr_mhz, lambda_ratio)
    }

    pub fn with_detuning(mut self, detuning: T) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_coupling(mut self, coupling: T) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_lambda_ratio(mut self, lambda_ratio: T) -> Self {
        self.lambda_ratio = lambda_ratio;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_ratio > T::zero()) || !self.lambda_ratio.is_finite() {
            return Err(Error::OutOfRange {
                name: "lambda_ratio",
                value: self.lambda_ratio.as_f64(),
                allowed: "(0, inf)",
            });
        }
        if !(self.gamma >= T::zero()) || !self.gamma.is_finite() {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: self.gamma.as_f64(),
                allowed: "[0, inf)",
            });
        }
        if !(self.gamma_nr >= T::zero()) || !self.gamma_nr.is_finite() {
            return Err(Error::OutOfRange {
                name: "gamma_nr",
                value: self.gamma_nr.as_f64(),
                allowed: "[0, inf)",
            });
        }
        if !self.detuning.is_finite() || !self.coupling.is_finite() {
            return Err(Error::Config("detuning and coupling must be finite".into()));
        }
        Ok(())
    }
}

/// Wavelength-dependent rates and shifts, all in rad/µs except `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates<T> {
    pub phi: T,
    pub gamma_a: T,
    pub gamma_b: T,
    pub gamma_col: T,
    pub g_x: T,
    pub delta_omega_1: T,
    pub delta_omega_2: T,
}

impl<T: Real> DerivedRates<T> {
    /// Smallest eigenvalue of the dissipation matrix [[Γ_a, Γ_col], [Γ_col, Γ_b]].
    /// Negative values mean the generator is not completely positive.
    pub fn dissipation_min_eigenvalue(&self) -> T {
        let half = T::lit(0.5);
        let mean = (self.gamma_a + self.gamma_b) * half;
        let diff = (self.gamma_a - self.gamma_b) * half;
        mean - (diff * diff + self.gamma_col * self.gamma_col).sqrt()
    }

    /// Largest rate appearing in the generator; sets the fastest timescale.
    pub fn fastest_rate(&self, p: &WaveguideParams<T>) -> T {
        [
            self.gamma_a,
            self.gamma_b,
            self.gamma_col.abs(),
            (self.g_x + p.coupling).abs(),
            self.delta_omega_1.abs(),
            self.delta_omega_2.abs(),
            p.detuning.abs(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }
}

pub fn derive_rates<T: Real>(p: &WaveguideParams<T>) -> Result<DerivedRates<T>> {
    p.validate()?;
    let phi = T::TAU() / p.lambda_ratio;
    let g = p.gamma;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    Ok(DerivedRates {
        phi,
        gamma_a: g * (T::one() + phi.cos()) + p.gamma_nr,
        gamma_b: g * (T::one() + (three * phi).cos()) + p.gamma_nr,
        gamma_col: g * (phi.cos() + (two * phi).cos()),
        g_x: g * (phi.sin() + (two * phi).sin()) * half,
        delta_omega_1: g * half * phi.sin(),
        delta_omega_2: g * half * (three * phi).sin(),
    })
}

/// Two-qubit operators in the `a ⊗ b` ordering.
pub(crate) struct TwoQubitOps<T: Real> {
    pub lower_a: ComplexMatrix<T>,
    pub lower_b: ComplexMatrix<T>,
    pub z_a: ComplexMatrix<T>,
    pub z_b: ComplexMatrix<T>,
}

impl<T: Real> TwoQubitOps<T> {
    pub fn new() -> Self {
        let op = |m: ComplexMatrix<T>, k| on_qubit(&m, k, 2).expect("4x4");
        Self {
            lower_a: op(pauli::lower(), 0),
            lower_b: op(pauli::lower(), 1),
            z_a: op(pauli::z(), 0),
            z_b: op(pauli::z(), 1),
        }
    }
}

/// Rotating-frame Hamiltonian
/// `H = d_a σ_zᵃ/2 + d_b σ_zᵇ/2 + (g_x + g)(σ₋ᵃσ₊ᵇ + σ₊ᵃσ₋ᵇ)`
/// with `d_a = δω₁ + Δ/2`, `d_b = δω₂ − Δ/2`.
pub fn build_hamiltonian<T: Real>(r: &DerivedRates<T>, p: &WaveguideParams<T>) -> ComplexMatrix<T> {
    let ops = TwoQubitOps::<T>::new();
    let half = T::lit(0.5);
    let d_a = r.delta_omega_1 + p.detuning * half;
    let d_b = r.delta_omega_2 - p.detuning * half;
    let exchange = pauli::exchange::<T>().scale_real(r.g_x + p.coupling);
    let za = ops.z_a.scale_real(d_a * half);
    let zb = ops.z_b.scale_real(d_b * half);
    &(&za + &zb) + &exchange
}

/// Anything that maps a density matrix to its time derivative.
pub trait Generator<T: Real> {
    fn dim(&self) -> usize;

    fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T>;

    /// Derivative of a row-major flattened density matrix.
    fn apply_flat(&self, rho: &[Complex<T>], out: &mut [Complex<T>]) {
        let m = ComplexMatrix::from_rows(rho.to_vec()).expect("square");
        out.copy_from_slice(self.apply(&m).as_slice());
    }
}

/// Lindblad generator in Kossakowski form:
/// `ρ̇ = −i[H,ρ] + Σ_jk c_jk (L_j ρ L_k† − ½{L_k† L_j, ρ})`.
#[derive(Clone, Debug)]
pub struct Lindbladian<T: Real> {
    hamiltonian: ComplexMatrix<T>,
    jumps: Vec<ComplexMatrix<T>>,
    coefficients: Vec<Vec<T>>,
    effective: ComplexMatrix<T>,
    jumps_adj: Vec<ComplexMatrix<T>>,
}

impl<T: Real> Lindbladian<T> {
    pub fn new(
        hamiltonian: ComplexMatrix<T>,
        jumps: Vec<ComplexMatrix<T>>,
        coefficients: Vec<Vec<T>>,
    ) -> Result<Self> {
        let n = hamiltonian.dim();
        if jumps.iter().any(|l| l.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: jumps.iter().map(|l| l.dim()).find(|&d| d != n).unwrap_or(0),
            });
        }
        if coefficients.len() != jumps.len() || coefficients.iter().any(|r| r.len() != jumps.len())
        {
            return Err(Error::DimensionMismatch {
                expected: jumps.len(),
                found: coefficients.len(),
            });
        }
        let asym = hamiltonian.hermitian_asymmetry();
        if asym > T::lit(tol::UNITARITY) {
            return Err(Error::NotHermitian {
                asymmetry: asym.as_f64(),
            });
        }
        let jumps_adj: Vec<_> = jumps.iter().map(|l| l.adjoint()).collect();
        // H_eff = H − (i/2) Σ c_jk L_k† L_j
        let mut decay = ComplexMatrix::zeros(n);
        for (j, lj) in jumps.iter().enumerate() {
            for (k, lk_adj) in jumps_adj.iter().enumerate() {
                let c = coefficients[j][k];
                if c.is_zero() {
                    continue;
                }
                decay = &decay + &(lk_adj * lj).scale_real(c);
            }
        }
        let effective = &hamiltonian - &decay.scale(Complex::new(T::zero(), T::lit(0.5)));
        Ok(Self {
            hamiltonian,
            jumps,
            coefficients,
            effective,
            jumps_adj,
        })
    }

    /// Independent amplitude damping of each listed operator.
    pub fn diagonal(
        hamiltonian: ComplexMatrix<T>,
        channels: Vec<(T, ComplexMatrix<T>)>,
    ) -> Result<Self> {
        let n = channels.len();
        let mut coefficients = vec![vec![T::zero(); n]; n];
        let mut jumps = Vec::with_capacity(n);
        for (k, (rate, op)) in channels.into_iter().enumerate() {
            coefficients[k][k] = rate;
            jumps.push(op);
        }
        Self::new(hamiltonian, jumps, coefficients)
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix<T> {
        &self.hamiltonian
    }
}

impl<T: Real> Generator<T> for Lindbladian<T> {
    fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let minus_i = Complex::new(T::zero(), -T::one());
        let coherent = &(&self.effective * rho) - &(rho * &self.effective.adjoint());
        let mut out = coherent.scale(minus_i);
        for (j, lj) in self.jumps.iter().enumerate() {
            let left = lj * rho;
            for (k, lk_adj) in self.jumps_adj.iter().enumerate() {
                let c = self.coefficients[j][k];
                if c.is_zero() {
                    continue;
                }
                out = &out + &(&left * lk_adj).scale_real(c);
            }
        }
        out
    }
}

/// A Lindblad generator as a matrix on row-major vectorised density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<T: Real> {
    inner: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    /// Tabulates `gen` column by column on the matrix units `E_ij`.
    pub fn from_generator<G: Generator<T>>(gen: &G) -> Result<Self> {
        let n = gen.dim();
        let big = n * n;
        if big > MAX_DIM {
            return Err(Error::DimensionOverflow { dim: big });
        }
        let mut matrix = ComplexMatrix::zeros(big);
        for col in 0..big {
            let mut unit = ComplexMatrix::zeros(n);
            unit.as_mut_slice()[col] = Complex::new(T::one(), T::zero());
            let image = gen.apply(&unit);
            for (row, v) in image.as_slice().iter().enumerate() {
                matrix[(row, col)] = *v;
            }
        }
        Ok(Self { inner: n, matrix })
    }

    pub fn zero(inner: usize) -> Result<Self> {
        if inner * inner > MAX_DIM {
            return Err(Error::DimensionOverflow { dim: inner * inner });
        }
        Ok(Self {
            inner,
            matrix: ComplexMatrix::zeros(inner * inner),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    /// Largest |tr L(E_ij)| over matrix units; zero for a trace-preserving map.
    pub fn trace_defect(&self) -> T {
        let n = self.inner;
        (0..n * n)
            .map(|col| {
                (0..n)
                    .map(|i| self.matrix[(i * n + i, col)])
                    .fold(Complex::zero(), |a, b| a + b)
                    .norm()
            })
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> Generator<T> for Superoperator<T> {
    fn dim(&self) -> usize {
        self.inner
    }

    fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let v = self.matrix.apply(rho.as_slice());
        ComplexMatrix::from_rows(v).expect("square")
    }

    fn apply_flat(&self, rho: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = self.matrix.dim();
        let data = self.matrix.as_slice();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &data[i * n..(i + 1) * n];
            *o = row
                .iter()
                .zip(rho)
                .fold(Complex::zero(), |acc, (a, b)| acc + *a * *b);
        }
    }
}

/// The two-qubit master-equation generator as a [`Lindbladian`].
pub fn build_lindbladian<T: Real>(
    r: &DerivedRates<T>,
    p: &WaveguideParams<T>,
) -> Result<Lindbladian<T>> {
    let ops = TwoQubitOps::<T>::new();
    let min_eig = r.dissipation_min_eigenvalue();
    if min_eig < -T::lit(tol::STRUCTURAL) * r.gamma_a.max(r.gamma_b).max(T::one()) {
        log::warn!(
            "dissipation matrix not positive semidefinite at phi = {}: smallest eigenvalue {:e}",
            r.phi,
            min_eig
        );
    }
    Lindbladian::new(
        build_hamiltonian(r, p),
        vec![ops.lower_a, ops.lower_b],
        vec![vec![r.gamma_a, r.gamma_col], vec![r.gamma_col, r.gamma_b]],
    )
}

/// The two-qubit master-equation generator tabulated as a 16×16 superoperator.
pub fn build_generator<T: Real>(
    r: &DerivedRates<T>,
    p: &WaveguideParams<T>,
) -> Result<Superoperator<T>> {
    Superoperator::from_generator(&build_lindbladian(r, p)?)
}

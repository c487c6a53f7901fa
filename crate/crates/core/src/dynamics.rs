//! Time integration of the two-qubit master equation.
//!
//! Two paths are provided: the full 4×4 density matrix driven by a
//! [`Superoperator`], and a reduced path over the eight real coordinates of an
//! X-shape state. The reduced right-hand side is obtained by restricting the
//! full generator to the X subspace when the generator is built, so both paths
//! integrate the same equations.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::entangle::{concurrence_wootters, concurrence_x};
use crate::error::{Error, Result};
use crate::model::{build_generator, DerivedRates, Generator, Superoperator, WaveguideParams};
use crate::ode::{sample_grid, DormandPrince, OdeSystem};
use crate::qcore::{herm_eigvals, ComplexMatrix, DensityMatrix};
use crate::scalar::{tol, Real};

/// X-shape two-qubit state: populations of |00>, |01>, |10>, |11>, the inner
/// coherence `z = <01|ρ|10>` and the outer coherence `w = <00|ρ|11>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XState<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub z: Complex<T>,
    pub w: Complex<T>,
}

impl<T: Real> XState<T> {
    pub const COORDS: usize = 8;

    pub fn ground() -> Self {
        Self {
            a: T::one(),
            b: T::zero(),
            c: T::zero(),
            d: T::zero(),
            z: Complex::zero(),
            w: Complex::zero(),
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::diag(&[self.a, self.b, self.c, self.d]);
        m[(1, 2)] = self.z;
        m[(2, 1)] = self.z.conj();
        m[(0, 3)] = self.w;
        m[(3, 0)] = self.w.conj();
        m
    }

    /// Reads the X elements of a 4×4 matrix, ignoring everything else.
    pub fn from_matrix(m: &ComplexMatrix<T>) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: m.dim(),
            });
        }
        Ok(Self {
            a: m[(0, 0)].re,
            b: m[(1, 1)].re,
            c: m[(2, 2)].re,
            d: m[(3, 3)].re,
            z: m[(1, 2)],
            w: m[(0, 3)],
        })
    }

    /// Coordinates `[a, b, c, d, Re z, Im z, Re w, Im w]`.
    pub fn to_coords(&self) -> [T; 8] {
        [
            self.a, self.b, self.c, self.d, self.z.re, self.z.im, self.w.re, self.w.im,
        ]
    }

    pub fn from_coords(x: &[T]) -> Self {
        Self {
            a: x[0],
            b: x[1],
            c: x[2],
            d: x[3],
            z: Complex::new(x[4], x[5]),
            w: Complex::new(x[6], x[7]),
        }
    }

    pub fn trace(&self) -> T {
        self.a + self.b + self.c + self.d
    }

    /// Trace, population bounds and positivity of both 2×2 blocks.
    pub fn validate(&self, tolerance: T) -> Result<()> {
        let fields = [self.a, self.b, self.c, self.d];
        if fields.iter().any(|v| !v.is_finite())
            || !self.z.norm().is_finite()
            || !self.w.norm().is_finite()
        {
            return Err(Error::InvalidDensity("non-finite X-state element".into()));
        }
        if (self.trace() - T::one()).abs() > tolerance {
            return Err(Error::InvalidDensity(format!(
                "trace {} differs from 1",
                self.trace()
            )));
        }
        if let Some(v) = fields
            .iter()
            .find(|&&v| v < -tolerance || v > T::one() + tolerance)
        {
            return Err(Error::InvalidDensity(format!(
                "population {v} outside [0, 1]"
            )));
        }
        if self.z.norm_sqr() > self.b * self.c + tolerance {
            return Err(Error::InvalidDensity("|z|^2 exceeds b*c".into()));
        }
        if self.w.norm_sqr() > self.a * self.d + tolerance {
            return Err(Error::InvalidDensity("|w|^2 exceeds a*d".into()));
        }
        Ok(())
    }
}

/// Largest modulus among the eight off-X entries of a 4×4 matrix.
pub fn off_x_leakage<T: Real>(m: &ComplexMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            let on_x = i == j || i + j == 3;
            if !on_x {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Time-ordered samples of an integration run with concurrence at each sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory<T, S> {
    pub times: Vec<T>,
    pub states: Vec<S>,
    pub concurrence: Vec<T>,
    pub rates: Option<DerivedRates<T>>,
}

impl<T: Real, S> Trajectory<T, S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions<T> {
    pub t_max: T,
    pub sample_dt: T,
    pub rtol: T,
    pub atol: T,
}

impl<T: Real> EvolveOptions<T> {
    pub fn new(t_max: T, sample_dt: T) -> Self {
        Self {
            t_max,
            sample_dt,
            rtol: T::lit(1e-10),
            atol: T::lit(1e-12),
        }
    }

    pub fn with_rtol(mut self, rtol: T) -> Self {
        self.rtol = rtol;
        self
    }

    /// `t_max = 8/γ` with 500 sample intervals.
    pub fn default_for(p: &WaveguideParams<T>) -> Result<Self> {
        if !(p.gamma > T::zero()) {
            return Err(Error::Config("default time span needs gamma > 0".into()));
        }
        let t_max = T::lit(8.0) / p.gamma;
        Ok(Self::new(t_max, t_max / T::lit(500.0)))
    }

    fn solver(&self) -> Result<DormandPrince<T>> {
        if !(self.rtol > T::zero()) || !(self.atol > T::zero()) {
            return Err(Error::OutOfRange {
                name: "rtol",
                value: self.rtol.as_f64(),
                allowed: "(0, inf)",
            });
        }
        Ok(DormandPrince::new(self.rtol, self.atol))
    }

    /// Tolerance used for the per-sample invariant checks.
    pub fn check_tolerance(&self) -> T {
        T::lit(10.0) * self.rtol
    }
}

struct DensityOde<'a, T: Real, G> {
    gen: &'a G,
    n: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real, G: Generator<T>> OdeSystem<T> for DensityOde<'_, T, G> {
    fn dim(&self) -> usize {
        2 * self.n * self.n
    }

    fn rhs(&self, _t: T, y: &[T], dy: &mut [T]) {
        let rho: Vec<Complex<T>> = y
            .chunks_exact(2)
            .map(|p| Complex::new(p[0], p[1]))
            .collect();
        let mut out = vec![Complex::zero(); rho.len()];
        self.gen.apply_flat(&rho, &mut out);
        for (d, v) in dy.chunks_exact_mut(2).zip(out) {
            d[0] = v.re;
            d[1] = v.im;
        }
    }
}

fn flatten<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unflatten<T: Real>(y: &[T]) -> ComplexMatrix<T> {
    ComplexMatrix::from_rows(
        y.chunks_exact(2)
            .map(|p| Complex::new(p[0], p[1]))
            .collect(),
    )
    .expect("square")
}

/// Integrates `ρ̇ = gen(ρ)` and returns ρ at each of `times` (no validation).
pub fn evolve_density<T: Real, G: Generator<T>>(
    rho0: &ComplexMatrix<T>,
    gen: &G,
    times: &[T],
    rtol: T,
    atol: T,
) -> Result<Vec<ComplexMatrix<T>>> {
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho0.dim(),
        });
    }
    let sys = DensityOde {
        gen,
        n: gen.dim(),
        _marker: std::marker::PhantomData,
    };
    let sol = DormandPrince::new(rtol, atol).integrate(&sys, T::zero(), &flatten(rho0), times)?;
    Ok(sol.samples.iter().map(|y| unflatten(y)).collect())
}

fn check_sample<T: Real>(m: &ComplexMatrix<T>, t: T, tolerance: T) -> Result<()> {
    let tr = m.trace();
    if (tr.re - T::one()).abs() > tolerance || tr.im.abs() > tolerance {
        return Err(Error::InvariantViolation {
            t: t.as_f64(),
            what: format!("trace drifted to {}", tr.re),
        });
    }
    let asym = m.hermitian_asymmetry();
    if asym > tolerance {
        return Err(Error::InvariantViolation {
            t: t.as_f64(),
            what: format!("Hermitian asymmetry {asym:e}"),
        });
    }
    let min = herm_eigvals(m)?[0];
    if min < -tolerance {
        return Err(Error::InvariantViolation {
            t: t.as_f64(),
            what: format!("smallest eigenvalue {min:e}"),
        });
    }
    Ok(())
}

/// Full density-matrix integration with per-sample invariant checks and
/// Wootters concurrence.
pub fn evolve_full<T: Real>(
    rho0: &DensityMatrix<T>,
    gen: &Superoperator<T>,
    opts: &EvolveOptions<T>,
) -> Result<Trajectory<T, ComplexMatrix<T>>> {
    if rho0.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho0.dim(),
        });
    }
    opts.solver()?;
    let times = sample_grid(opts.t_max, opts.sample_dt)?;
    let states = evolve_density(rho0.matrix(), gen, &times, opts.rtol, opts.atol)?;
    let tolerance = opts.check_tolerance();
    let mut concurrence = Vec::with_capacity(states.len());
    for (t, m) in times.iter().zip(&states) {
        check_sample(m, *t, tolerance)?;
        let rho = DensityMatrix::with_tolerance(m.clone(), tolerance)?;
        concurrence.push(concurrence_wootters(&rho)?);
    }
    Ok(Trajectory {
        times,
        states,
        concurrence,
        rates: None,
    })
}

/// Real-linear map on X-state coordinates, obtained by restricting the full
/// generator to the X subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct XGenerator<T> {
    matrix: [[T; 8]; 8],
    leakage: T,
}

impl<T: Real> XGenerator<T> {
    pub fn from_generator<G: Generator<T>>(gen: &G) -> Result<Self> {
        if gen.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: gen.dim(),
            });
        }
        let mut matrix = [[T::zero(); 8]; 8];
        let mut leakage = T::zero();
        for col in 0..8 {
            let mut e = [T::zero(); 8];
            e[col] = T::one();
            let image = gen.apply(&XState::from_coords(&e).to_matrix());
            leakage = leakage.max(off_x_leakage(&image));
            // the image of a Hermitian input is Hermitian, so the upper X entries suffice
            let coords = XState::from_matrix(&image)?.to_coords();
            for (row, v) in coords.iter().enumerate() {
                matrix[row][col] = *v;
            }
        }
        Ok(Self { matrix, leakage })
    }

    pub fn new(r: &DerivedRates<T>, p: &WaveguideParams<T>) -> Result<Self> {
        Self::from_generator(&build_generator(r, p)?)
    }

    /// Largest off-X entry produced by the generator on X-shape inputs.
    pub fn leakage(&self) -> T {
        self.leakage
    }

    pub fn matrix(&self) -> &[[T; 8]; 8] {
        &self.matrix
    }

    pub fn rhs_coords(&self, x: &[T], dx: &mut [T]) {
        for (row, d) in self.matrix.iter().zip(dx.iter_mut()) {
            *d = row
                .iter()
                .zip(x)
                .fold(T::zero(), |acc, (m, v)| acc + *m * *v);
        }
    }

    pub fn rhs(&self, x: &XState<T>) -> XState<T> {
        let mut dx = [T::zero(); 8];
        self.rhs_coords(&x.to_coords(), &mut dx);
        XState::from_coords(&dx)
    }
}

impl<T: Real> OdeSystem<T> for XGenerator<T> {
    fn dim(&self) -> usize {
        8
    }

    fn rhs(&self, _t: T, y: &[T], dy: &mut [T]) {
        self.rhs_coords(y, dy);
    }
}

/// Time derivative of an X-state; the fields of the result hold (ȧ, ḃ, ċ, ḋ, ż, ẇ).
pub fn xstate_rhs<T: Real>(
    x: &XState<T>,
    r: &DerivedRates<T>,
    p: &WaveguideParams<T>,
) -> Result<XState<T>> {
    Ok(XGenerator::new(r, p)?.rhs(x))
}

/// Integrates an X-shape initial state on the reduced eight-coordinate system.
pub fn evolve_xstate<T: Real>(
    x0: &XState<T>,
    r: &DerivedRates<T>,
    p: &WaveguideParams<T>,
    opts: &EvolveOptions<T>,
) -> Result<Trajectory<T, XState<T>>> {
    let gen = XGenerator::new(r, p)?;
    evolve_xstate_with(x0, &gen, Some(*r), opts)
}

pub fn evolve_xstate_with<T: Real>(
    x0: &XState<T>,
    gen: &XGenerator<T>,
    rates: Option<DerivedRates<T>>,
    opts: &EvolveOptions<T>,
) -> Result<Trajectory<T, XState<T>>> {
    x0.validate(T::lit(tol::STRUCTURAL))?;
    let times = sample_grid(opts.t_max, opts.sample_dt)?;
    let sol = opts
        .solver()?
        .integrate(gen, T::zero(), &x0.to_coords(), &times)?;
    let tolerance = opts.check_tolerance();
    let mut states = Vec::with_capacity(times.len());
    let mut concurrence = Vec::with_capacity(times.len());
    for (t, y) in times.iter().zip(&sol.samples) {
        let x = XState::from_coords(y);
        x.validate(tolerance)
            .map_err(|e| Error::InvariantViolation {
                t: t.as_f64(),
                what: e.to_string(),
            })?;
        concurrence.push(concurrence_x(&x)?);
        states.push(x);
    }
    Ok(Trajectory {
        times,
        states,
        concurrence,
        rates,
    })
}

/// One row of the comparison between a printed kinetic equation and the
/// generator-derived right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationCheck {
    pub name: &'static str,
    /// max |printed − derived| over the probe states.
    pub max_mismatch: f64,
}

impl EquationCheck {
    pub fn agrees(&self, tolerance: f64) -> bool {
        self.max_mismatch <= tolerance
    }
}

/// The published closed-form kinetic equations for X-shape states, written in
/// the rotating frame (bare frequencies enter only through the detuning, split
/// symmetrically as ±Δ/2).
pub fn printed_kinetic_equations<T: Real>(x: &XState<T>, p: &WaveguideParams<T>) -> XState<T> {
    let phi = T::TAU() / p.lambda_ratio;
    let g = p.gamma;
    let gt = p.gamma + p.gamma_nr;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let (c1, c2, c3) = (phi.cos(), (two * phi).cos(), (three * phi).cos());
    let (s1, s2, s3) = (phi.sin(), (two * phi).sin(), (three * phi).sin());
    let omega_a = p.detuning * half;
    let omega_b = -p.detuning * half;
    let i = Complex::new(T::zero(), T::one());
    let re = |v: T| Complex::new(v, T::zero());
    let XState {
        a: _,
        b,
        c,
        d,
        z,
        w,
    } = *x;
    let zz = z + z.conj();
    let zd = z - z.conj();

    let w_dot = -w
        * half
        * (re(two * gt)
            + i * (two * (omega_a + omega_b))
            + re(g * (c1 + c3))
            + i * (g * (s1 + s3)));
    let z_dot = (-z * (two * gt) - i * z * (two * (omega_a - omega_b))
        + (re(two * d - b - c) - z) * (g * c1)
        + re((two * d - b - c) * g * c2)
        - z * (g * c3)
        + i * (re(b - c) - z) * (g * s1)
        + i * re((b - c) * g * s2)
        + i * z * (g * s3))
        * half;
    let a_dot = (b + c) * gt + (c + zz.re) * g * c1 + zz.re * g * c2 + b * g * c3;
    let b_dot = gt * (d - b) + (d - half * zz.re) * g * c1 - half * zz.re * g * c2 - b * g * c3
        + (i * zd * (half * g * (s1 + s2))).re;
    let c_dot = gt * (d - c) - (c + half * zz.re) * g * c1 - half * zz.re * g * c2 + d * g * c3
        - (i * zd * (half * g * (s1 + s2))).re;
    let d_dot = -d * (two * gt + g * (c1 + c3));
    XState {
        a: a_dot,
        b: b_dot,
        c: c_dot,
        d: d_dot,
        z: z_dot,
        w: w_dot,
    }
}

/// Compares the printed kinetic equations with the generator restricted to X
/// states, equation by equation, over the supplied probe states.
pub fn kinetic_equation_report<T: Real>(
    p: &WaveguideParams<T>,
    probes: &[XState<T>],
) -> Result<Vec<EquationCheck>> {
    let r = crate::model::derive_rates(p)?;
    let gen = XGenerator::new(&r, p)?;
    let names = ["a", "b", "c", "d", "z", "w"];
    let mut worst = [0.0f64; 6];
    for x in probes {
        let derived = gen.rhs(x);
        let printed = printed_kinetic_equations(x, p);
        let diffs = [
            (derived.a - printed.a).abs().as_f64(),
            (derived.b - printed.b).abs().as_f64(),
            (derived.c - printed.c).abs().as_f64(),
            (derived.d - printed.d).abs().as_f64(),
            (derived.z - printed.z).norm().as_f64(),
            (derived.w - printed.w).norm().as_f64(),
        ];
        for (w, d) in worst.iter_mut().zip(diffs) {
            *w = w.max(d);
        }
    }
    let report: Vec<EquationCheck> = names
        .iter()
        .zip(worst)
        .map(|(name, max_mismatch)| EquationCheck { name, max_mismatch })
        .collect();
    for check in &report {
        if !check.agrees(1e-9 * (1.0 + p.gamma.as_f64())) {
            log::info!(
                "printed kinetic equation for {} differs from the generator by up to {:e}",
                check.name,
                check.max_mismatch
            );
        }
    }
    Ok(report)
}

//! Initial states and their preparation.
//!
//! The Werner and pseudo-Werner matrices are laid out in the two-qubit basis
//! |00>, |01>, |10>, |11> with the first qubit as the slow index.
//!
//! The three-qubit preparation register is ordered `c ⊗ b ⊗ a` (auxiliary
//! qubit c leftmost), and the two-qubit state left after tracing out c is
//! therefore in `b ⊗ a` order. The dynamics module uses `a ⊗ b`; the printed
//! pseudo-Werner matrix is used as-is in both places, and [`swap_qubits`]
//! converts between the two orders when the physical labelling matters.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_density, XState};
use crate::error::{Error, Result};
use crate::model::Lindbladian;
use crate::ode::sample_grid;
use crate::qcore::{
    conjugate, expm_skew, on_qubit, pauli, tensor, tensor_all, ComplexMatrix, DensityMatrix,
    Subsystem,
};
use crate::scalar::{tol, Real};

fn check_range<T: Real>(f: T, lo: f64, hi: f64, allowed: &'static str) -> Result<()> {
    if f >= T::lit(lo) && f <= T::lit(hi) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "f",
            value: f.as_f64(),
            allowed,
        })
    }
}

/// Werner state `(1−f)/3·I + (4f−1)/3·|Ψ⁻><Ψ⁻|` as an X-state.
pub fn werner_x<T: Real>(f: T) -> Result<XState<T>> {
    check_range(f, 0.25, 1.0, "[0.25, 1]")?;
    let lit = T::lit;
    let outer = (T::one() - f) / lit(3.0);
    let inner = (T::one() + lit(2.0) * f) / lit(6.0);
    Ok(XState {
        a: outer,
        b: inner,
        c: inner,
        d: outer,
        z: Complex::new((T::one() - lit(4.0) * f) / lit(6.0), T::zero()),
        w: Complex::new(T::zero(), T::zero()),
    })
}

pub fn werner<T: Real>(f: T) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(werner_x(f)?.to_matrix())
}

/// Pseudo-Werner state: diag(f/8, (1+f)/4, 3f/8, 3(1−f)/4) with inner
/// coherence `i√3 f/4` above the diagonal.
pub fn pseudo_werner_x<T: Real>(f: T) -> Result<XState<T>> {
    check_range(f, 0.0, 1.0, "[0, 1]")?;
    let lit = T::lit;
    Ok(XState {
        a: f / lit(8.0),
        b: (T::one() + f) / lit(4.0),
        c: lit(3.0) * f / lit(8.0),
        d: lit(3.0) * (T::one() - f) / lit(4.0),
        z: Complex::new(T::zero(), lit(3.0).sqrt() * f / lit(4.0)),
        w: Complex::new(T::zero(), T::zero()),
    })
}

pub fn pseudo_werner<T: Real>(f: T) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(pseudo_werner_x(f)?.to_matrix())
}

/// Exchanges the two factors of a two-qubit operator.
pub fn swap_qubits<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: m.dim(),
        });
    }
    let s = |i: usize| ((i & 1) << 1) | (i >> 1);
    Ok(ComplexMatrix::from_fn(4, |i, j| m[(s(i), s(j))]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    Werner,
    #[serde(rename = "pw")]
    PseudoWerner,
}

impl StateFamily {
    pub fn xstate<T: Real>(self, f: T) -> Result<XState<T>> {
        match self {
            Self::Werner => werner_x(f),
            Self::PseudoWerner => pseudo_werner_x(f),
        }
    }

    pub fn density<T: Real>(self, f: T) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.xstate(f)?.to_matrix())
    }

    /// Default fidelity bracket for the ESD threshold search.
    pub fn esd_bracket<T: Real>(self) -> (T, T) {
        match self {
            Self::Werner => (T::lit(0.25), T::one()),
            Self::PseudoWerner => (T::one() / T::lit(3.0), T::one()),
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Werner => "werner",
            Self::PseudoWerner => "pw",
        })
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "werner" => Ok(Self::Werner),
            "pw" | "pseudo-werner" | "pseudo_werner" => Ok(Self::PseudoWerner),
            other => Err(Error::Config(format!("unknown state family '{other}'"))),
        }
    }
}

/// Settings for the three-qubit pseudo-Werner preparation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepConfig<T> {
    pub f: T,
    /// Integrate both exchange steps under intrinsic decay instead of applying
    /// them as exact unitaries.
    pub with_dissipation: bool,
    /// a–b exchange strength g (rad/µs), dissipative mode only.
    pub g_strength: T,
    /// b–c exchange strength g_bc (rad/µs), dissipative mode only.
    pub g_bc_strength: T,
    /// Intrinsic decay applied to every qubit in dissipative mode (rad/µs).
    pub gamma_nr: T,
    pub rtol: T,
}

impl<T: Real> PrepConfig<T> {
    pub fn exact(f: T) -> Self {
        Self {
            f,
            with_dissipation: false,
            g_strength: T::lit(TAU * 10.0),
            g_bc_strength: T::lit(TAU * 10.0),
            gamma_nr: T::lit(TAU * 0.03),
            rtol: T::lit(1e-10),
        }
    }

    pub fn dissipative(f: T) -> Self {
        Self {
            with_dissipation: true,
            ..Self::exact(f)
        }
    }

    /// Durations `(π/4)/g` and `(π/6)/g_bc` of the two exchange steps.
    pub fn gate_durations(&self) -> Result<(T, T)> {
        if !(self.g_strength > T::zero()) || !(self.g_bc_strength > T::zero()) {
            return Err(Error::Config(
                "dissipative preparation needs positive exchange strengths".into(),
            ));
        }
        Ok((
            T::FRAC_PI_4() / self.g_strength,
            T::PI() / T::lit(6.0) / self.g_bc_strength,
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrepResult<T: Real> {
    pub rho1: DensityMatrix<T>,
    pub rho2: DensityMatrix<T>,
    pub rho3: DensityMatrix<T>,
    /// Qubits b and a after tracing out c, in `b ⊗ a` order.
    pub rho_out: DensityMatrix<T>,
    /// Uhlmann fidelity of `rho_out` to the pseudo-Werner matrix.
    pub fidelity: T,
    pub gate_durations: Option<(T, T)>,
}

fn dissipative_step<T: Real>(
    rho: &DensityMatrix<T>,
    exchange: &ComplexMatrix<T>,
    strength: T,
    duration: T,
    cfg: &PrepConfig<T>,
) -> Result<DensityMatrix<T>> {
    // e^{-iHt} with H = -g·XY reproduces the e^{+iθ·XY} rotation at θ = g t
    let h = exchange.scale_real(-strength);
    let lower = pauli::lower::<T>();
    let channels = (0..3)
        .map(|k| Ok((cfg.gamma_nr, on_qubit(&lower, k, 3)?)))
        .collect::<Result<Vec<_>>>()?;
    let gen = Lindbladian::diagonal(h, channels)?;
    let out = evolve_density(
        rho.matrix(),
        &gen,
        &[T::zero(), duration],
        cfg.rtol,
        cfg.rtol * T::lit(1e-2),
    )?;
    let m = out.into_iter().last().expect("two samples");
    DensityMatrix::with_tolerance(m, (T::lit(10.0) * cfg.rtol).max(T::lit(tol::STRUCTURAL)))
}

/// Prepares the pseudo-Werner state from `ρ_c ⊗ ρ_b ⊗ ρ_a` with
/// `ρ_a = diag(f, 1−f)`, `ρ_b` excited and `ρ_c` ground, through an a–b exchange
/// by π/4, a b–c exchange by π/6 and a trace over c.
pub fn prepare_pw<T: Real>(cfg: &PrepConfig<T>) -> Result<PrepResult<T>> {
    check_range(cfg.f, 0.0, 1.0, "[0, 1]")?;
    let rho_a = ComplexMatrix::diag(&[cfg.f, T::one() - cfg.f]);
    let rho_b = ComplexMatrix::diag(&[T::zero(), T::one()]);
    let rho_c = ComplexMatrix::diag(&[T::one(), T::zero()]);
    let rho1 = DensityMatrix::new(tensor_all(&[&rho_c, &rho_b, &rho_a])?)?;

    let id = ComplexMatrix::identity(2);
    let xy = pauli::exchange::<T>();
    let xy_ba = tensor(&id, &xy)?;
    let xy_cb = tensor(&xy, &id)?;

    let (rho2, rho3, durations) = if cfg.with_dissipation {
        let (t1, t2) = cfg.gate_durations()?;
        let rho2 = dissipative_step(&rho1, &xy_ba, cfg.g_strength, t1, cfg)?;
        let rho3 = dissipative_step(&rho2, &xy_cb, cfg.g_bc_strength, t2, cfg)?;
        (rho2, rho3, Some((t1, t2)))
    } else {
        let u1 = expm_skew(&xy_ba, T::FRAC_PI_4(), 1)?;
        let rho2 = DensityMatrix::new(conjugate(&u1, rho1.matrix()))?;
        let u2 = expm_skew(&xy_cb, T::PI() / T::lit(6.0), 1)?;
        let rho3 = DensityMatrix::new(conjugate(&u2, rho2.matrix()))?;
        (rho2, rho3, None)
    };
    let rho_out = rho3.partial_trace(Subsystem::First)?;
    let fidelity = rho_out.fidelity(&pseudo_werner(cfg.f)?)?;
    Ok(PrepResult {
        rho1,
        rho2,
        rho3,
        rho_out,
        fidelity,
        gate_durations: durations,
    })
}

/// Square Rabi pulse followed by free decay on a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiConfig<T> {
    /// Rabi frequency Ω (rad/µs).
    pub omega: T,
    /// Intrinsic decay γ_nr (rad/µs).
    pub gamma_nr: T,
    pub pulse_duration: T,
    pub wait_duration: T,
    pub sample_dt: T,
    /// Apply an exact π flip at the end, mapping f to 1 − f.
    pub flip: bool,
    pub rtol: T,
}

impl<T: Real> RabiConfig<T> {
    pub fn new(omega: T, gamma_nr: T, pulse_duration: T, wait_duration: T) -> Self {
        Self {
            omega,
            gamma_nr,
            pulse_duration,
            wait_duration,
            sample_dt: T::lit(0.01),
            flip: false,
            rtol: T::lit(1e-10),
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("omega", self.omega),
            ("gamma_nr", self.gamma_nr),
            ("pulse_duration", self.pulse_duration),
            ("wait_duration", self.wait_duration),
        ];
        for (name, v) in fields {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value: v.as_f64(),
                    allowed: "[0, inf)",
                });
            }
        }
        if !(self.sample_dt > T::zero()) {
            return Err(Error::OutOfRange {
                name: "sample_dt",
                value: self.sample_dt.as_f64(),
                allowed: "(0, inf)",
            });
        }
        Ok(())
    }
}

/// One sample of the single-qubit trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixSample<T> {
    pub t: T,
    pub rho_gg: T,
    pub rho_ee: T,
    pub abs_rho_eg: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixResult<T: Real> {
    pub samples: Vec<MixSample<T>>,
    pub rho_final: DensityMatrix<T>,
    /// Ground-state population at the end (after the optional flip).
    pub f_achieved: T,
}

fn mix_phase<T: Real>(
    rho0: &ComplexMatrix<T>,
    omega: T,
    cfg: &RabiConfig<T>,
    duration: T,
    t_offset: T,
    samples: &mut Vec<MixSample<T>>,
) -> Result<ComplexMatrix<T>> {
    if duration <= T::zero() {
        return Ok(rho0.clone());
    }
    let h = pauli::x::<T>().scale_real(omega * T::lit(0.5));
    let gen = Lindbladian::diagonal(h, vec![(cfg.gamma_nr, pauli::lower())])?;
    let times = sample_grid(duration, cfg.sample_dt.min(duration))?;
    let states = evolve_density(rho0, &gen, &times, cfg.rtol, cfg.rtol * T::lit(1e-2))?;
    let skip = usize::from(!samples.is_empty());
    for (t, m) in times.iter().zip(&states).skip(skip) {
        samples.push(MixSample {
            t: t_offset + *t,
            rho_gg: m[(0, 0)].re,
            rho_ee: m[(1, 1)].re,
            abs_rho_eg: m[(1, 0)].norm(),
        });
    }
    Ok(states.into_iter().last().expect("non-empty grid"))
}

/// Drives a ground-state qubit with `H = (Ω/2)σ_x` for the pulse, then lets it
/// decay freely for the wait, with amplitude damping throughout.
pub fn mixed_qubit<T: Real>(cfg: &RabiConfig<T>) -> Result<MixResult<T>> {
    cfg.validate()?;
    if cfg.gamma_nr > T::zero() && cfg.pulse_duration < T::lit(5.0) / cfg.gamma_nr {
        log::warn!(
            "pulse of {} us is not much longer than 1/gamma_nr = {} us; the populations may not reach 1/2",
            cfg.pulse_duration,
            T::one() / cfg.gamma_nr
        );
    }
    let ground = ComplexMatrix::diag(&[T::one(), T::zero()]);
    let mut samples = vec![MixSample {
        t: T::zero(),
        rho_gg: T::one(),
        rho_ee: T::zero(),
        abs_rho_eg: T::zero(),
    }];
    let after_pulse = mix_phase(
        &ground,
        cfg.omega,
        cfg,
        cfg.pulse_duration,
        T::zero(),
        &mut samples,
    )?;
    let mut rho = mix_phase(
        &after_pulse,
        T::zero(),
        cfg,
        cfg.wait_duration,
        cfg.pulse_duration,
        &mut samples,
    )?;
    if cfg.flip {
        rho = conjugate(&pauli::x(), &rho);
    }
    let rho_final =
        DensityMatrix::with_tolerance(rho, (T::lit(10.0) * cfg.rtol).max(T::lit(tol::STRUCTURAL)))?;
    let f_achieved = rho_final.matrix()[(0, 0)].re;
    Ok(MixResult {
        samples,
        rho_final,
        f_achieved,
    })
}

/// Longest wait accepted by [`wait_time_for_f`], in µs.
pub const MAX_WAIT_US: f64 = 1e4;

/// Wait after a saturating pulse until the ground population reaches `f`:
/// `t = ln(1/(2(1−f)))/γ_nr`.
pub fn wait_time_for_f<T: Real>(f: T, gamma_nr: T) -> Result<T> {
    if !(f >= T::lit(0.5) && f < T::one()) {
        return Err(Error::OutOfRange {
            name: "f",
            value: f.as_f64(),
            allowed: "[0.5, 1)",
        });
    }
    let numerator = (T::one() / (T::lit(2.0) * (T::one() - f))).ln();
    if numerator == T::zero() {
        return Ok(T::zero());
    }
    if !(gamma_nr > T::zero()) {
        return Err(Error::OutOfRange {
            name: "gamma_nr",
            value: gamma_nr.as_f64(),
            allowed: "(0, inf)",
        });
    }
    let t = numerator / gamma_nr;
    if t > T::lit(MAX_WAIT_US) {
        return Err(Error::OutOfRange {
            name: "wait time (us)",
            value: t.as_f64(),
            allowed: "[0, 1e4]",
        });
    }
    Ok(t)
}

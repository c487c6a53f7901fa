//! Concurrence and entanglement sudden death / revival detection.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::dynamics::{evolve_xstate_with, EvolveOptions, Trajectory, XGenerator, XState};
use crate::error::{Error, Result};
use crate::model::{derive_rates, DerivedRates, WaveguideParams};
use crate::qcore::{herm_eigen, herm_eigvals, ComplexMatrix, DensityMatrix};
use crate::scalar::{tol, Real};
use crate::states::StateFamily;

/// Closed-form concurrence of an X-shape state,
/// `C = 2 max(0, |z| − √(ad), |w| − √(bc))`.
pub fn concurrence_x<T: Real>(x: &XState<T>) -> Result<T> {
    let tolerance = T::lit(tol::STRUCTURAL);
    for (name, v) in [("a", x.a), ("b", x.b), ("c", x.c), ("d", x.d)] {
        if !(v >= -tolerance) {
            return Err(Error::InvalidDensity(format!(
                "population {name} = {v} is negative"
            )));
        }
    }
    let clamp = |v: T| v.max(T::zero());
    let f = x.z.norm() - (clamp(x.a) * clamp(x.d)).sqrt();
    let g = x.w.norm() - (clamp(x.b) * clamp(x.c)).sqrt();
    let c = T::lit(2.0) * T::zero().max(f).max(g);
    Ok(c.min(T::one()))
}

/// Wootters concurrence of an arbitrary two-qubit state.
///
/// With ρ = W W† (columns of W are √μ_k times the eigenvectors), the square
/// roots of the eigenvalues of ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y) are the singular values of
/// the symmetric matrix τ = Wᵀ(σ_y⊗σ_y)W. Those are read off as the positive
/// eigenvalues of the Hermitian dilation [[0, τ], [τ†, 0]], which keeps small
/// singular values accurate to absolute round-off.
pub fn concurrence_wootters<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let eig = herm_eigen(rho.matrix())?;
    if eig.values[0] < -rho.tolerance() {
        return Err(Error::InvalidDensity(format!(
            "smallest eigenvalue {:e} is negative",
            eig.values[0]
        )));
    }
    let w = ComplexMatrix::from_fn(4, |i, k| {
        eig.vectors[(i, k)] * eig.values[k].max(T::zero()).sqrt()
    });
    // σ_y⊗σ_y = antidiag(-1, 1, 1, -1)
    let flip_sign = |i: usize| {
        if i == 0 || i == 3 {
            -T::one()
        } else {
            T::one()
        }
    };
    let tau = ComplexMatrix::from_fn(4, |j, k| {
        (0..4).fold(Complex::<T>::zero(), |acc, i| {
            acc + w[(i, j)] * w[(3 - i, k)] * flip_sign(i)
        })
    });
    let dilation = ComplexMatrix::from_fn(8, |r, c| match (r < 4, c < 4) {
        (true, false) => tau[(r, c - 4)],
        (false, true) => tau[(c, r - 4)].conj(),
        _ => Complex::zero(),
    });
    let vals = herm_eigvals(&dilation)?;
    // top four eigenvalues are the singular values, ascending
    let s = &vals[4..];
    let c: T = s[3] - s[2] - s[1] - s[0];
    Ok(c.max(T::zero()).min(T::one()))
}

/// Concurrence of the pseudo-Werner family in closed form,
/// `C = 2 max(0, F, G)` with `F = √3[2f − √(2f(1−f))]/8`, `G = −√(3f(1+f)/32)`.
pub fn pw_concurrence_closed<T: Real>(f: T) -> Result<T> {
    if !(f >= T::zero() && f <= T::one()) {
        return Err(Error::OutOfRange {
            name: "f",
            value: f.as_f64(),
            allowed: "[0, 1]",
        });
    }
    let lit = T::lit;
    let sqrt3 = lit(3.0).sqrt();
    let big_f = sqrt3 * (lit(2.0) * f - (lit(2.0) * f * (T::one() - f)).sqrt()) / lit(8.0);
    let big_g = -(lit(3.0) * f * (T::one() + f) / lit(32.0)).sqrt();
    Ok(lit(2.0) * T::zero().max(big_f).max(big_g))
}

/// Sudden-death and revival instants found along a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EsdReport<T> {
    pub death_times: Vec<T>,
    pub revival_times: Vec<T>,
    pub final_concurrence: T,
}

impl<T: Real> EsdReport<T> {
    pub fn died(&self) -> bool {
        !self.death_times.is_empty()
    }

    pub fn revived(&self) -> bool {
        !self.revival_times.is_empty()
    }
}

/// Defaults for event detection: zero threshold and the number of consecutive
/// sub-threshold samples that make a death.
pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_HOLD: usize = 5;

fn crossing<T: Real>(t0: T, c0: T, t1: T, c1: T, level: T) -> T {
    if c0 == c1 {
        return t1;
    }
    let s = ((c0 - level) / (c0 - c1)).max(T::zero()).min(T::one());
    t0 + s * (t1 - t0)
}

/// Finds deaths (runs of at least `hold` samples with C ≤ ε after C > ε) and
/// revivals (first C > ε after a death) in a sampled concurrence curve.
pub fn detect_events_in<T: Real>(
    times: &[T],
    concurrence: &[T],
    epsilon: T,
    hold: usize,
) -> EsdReport<T> {
    let n = times.len().min(concurrence.len());
    let hold = hold.max(1);
    let mut report = EsdReport {
        death_times: Vec::new(),
        revival_times: Vec::new(),
        final_concurrence: concurrence
            .get(n.wrapping_sub(1))
            .copied()
            .unwrap_or_else(T::zero),
    };
    if n < 2 {
        return report;
    }
    let mut alive = concurrence[0] > epsilon;
    let mut dead = false;
    let mut i = 1;
    while i < n {
        let ci = concurrence[i];
        if alive && ci <= epsilon {
            let run = concurrence[i..n]
                .iter()
                .take_while(|&&c| c <= epsilon)
                .count();
            if run >= hold {
                report.death_times.push(crossing(
                    times[i - 1],
                    concurrence[i - 1],
                    times[i],
                    ci,
                    epsilon,
                ));
                alive = false;
                dead = true;
            }
            i += run;
            continue;
        }
        if !alive && ci > epsilon {
            if dead {
                report.revival_times.push(crossing(
                    times[i - 1],
                    concurrence[i - 1],
                    times[i],
                    ci,
                    epsilon,
                ));
                dead = false;
            }
            alive = true;
        }
        i += 1;
    }
    report
}

pub fn detect_events<T: Real, S>(traj: &Trajectory<T, S>, epsilon: T, hold: usize) -> EsdReport<T> {
    detect_events_in(&traj.times, &traj.concurrence, epsilon, hold)
}

/// Settings for ESD scans and the threshold search.
#[derive(Clone, Copy, Debug)]
pub struct EsdOptions<T> {
    /// Integration horizon; `None` picks [`esd_horizon`].
    pub t_max: Option<T>,
    /// Sample spacing; `None` picks [`esd_sample_dt`].
    pub sample_dt: Option<T>,
    /// Looser than 1e-10 lets integration noise in the |11> population
    /// (amplified by √(ad)) push C across ε late in the decay.
    pub rtol: T,
    pub epsilon: T,
    pub hold: usize,
    /// Fidelity bracket; `None` uses the family default.
    pub bracket: Option<(T, T)>,
    /// Evenly spaced probes used to verify monotonicity before bisecting.
    pub probes: usize,
}

impl<T: Real> Default for EsdOptions<T> {
    fn default() -> Self {
        Self {
            t_max: None,
            sample_dt: None,
            rtol: T::lit(1e-10),
            epsilon: T::lit(DEFAULT_EPSILON),
            hold: DEFAULT_HOLD,
            bracket: None,
            probes: 9,
        }
    }
}

/// Horizon long enough for the slowest collective mode to decay by e⁻⁸:
/// `8 / λ_min` of the dissipation matrix, kept within `[8/γ, 1000 µs]`.
pub fn esd_horizon<T: Real>(r: &DerivedRates<T>, p: &WaveguideParams<T>) -> T {
    let slowest = r.dissipation_min_eigenvalue();
    let eight = T::lit(8.0);
    let floor = if p.gamma > T::zero() {
        eight / p.gamma
    } else {
        T::one()
    };
    let t = if slowest > T::lit(1e-12) {
        eight / slowest
    } else {
        T::lit(1000.0)
    };
    t.max(floor).min(T::lit(1000.0))
}

/// Sample spacing resolving the fastest rate (20 samples per 1/rate) with at
/// least 2000 samples over the horizon.
pub fn esd_sample_dt<T: Real>(r: &DerivedRates<T>, p: &WaveguideParams<T>, t_max: T) -> T {
    let fastest = r.fastest_rate(p).max(p.gamma);
    let by_span = t_max / T::lit(2000.0);
    if fastest > T::zero() {
        by_span.min(T::one() / (T::lit(20.0) * fastest))
    } else {
        by_span
    }
}

/// Runs the reduced dynamics from `family(f)` and reports ESD events.
pub fn esd_run<T: Real>(
    family: StateFamily,
    f: T,
    p: &WaveguideParams<T>,
    opts: &EsdOptions<T>,
) -> Result<(Trajectory<T, XState<T>>, EsdReport<T>)> {
    let r = derive_rates(p)?;
    let gen = XGenerator::new(&r, p)?;
    esd_run_with(family, f, p, &r, &gen, opts)
}

fn esd_run_with<T: Real>(
    family: StateFamily,
    f: T,
    p: &WaveguideParams<T>,
    r: &DerivedRates<T>,
    gen: &XGenerator<T>,
    opts: &EsdOptions<T>,
) -> Result<(Trajectory<T, XState<T>>, EsdReport<T>)> {
    let x0 = family.xstate(f)?;
    let t_max = opts.t_max.unwrap_or_else(|| esd_horizon(r, p));
    let dt = opts.sample_dt.unwrap_or_else(|| esd_sample_dt(r, p, t_max));
    let evolve = EvolveOptions::new(t_max, dt).with_rtol(opts.rtol);
    let traj = evolve_xstate_with(&x0, gen, Some(*r), &evolve)?;
    let report = detect_events(&traj, opts.epsilon, opts.hold);
    Ok((traj, report))
}

/// Outcome of the threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EsdThreshold<T> {
    /// Boundary fidelity: entanglement is lost within the horizon for f below it.
    pub f_star: T,
    /// False when every probe in the bracket lost entanglement (the boundary
    /// lies at or above the upper bracket edge, which is then returned).
    pub bracketed: bool,
}

/// Bisection over f of "entanglement is lost within the horizon" (either never
/// present or a sudden death occurs), returning the boundary within `tol`.
pub fn esd_threshold<T: Real>(
    lambda_ratio: T,
    p: &WaveguideParams<T>,
    family: StateFamily,
    tol: T,
) -> Result<EsdThreshold<T>> {
    esd_threshold_with(lambda_ratio, p, family, tol, &EsdOptions::default())
}

pub fn esd_threshold_with<T: Real>(
    lambda_ratio: T,
    p: &WaveguideParams<T>,
    family: StateFamily,
    tol: T,
    opts: &EsdOptions<T>,
) -> Result<EsdThreshold<T>> {
    if !(tol > T::zero()) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol.as_f64(),
            allowed: "(0, inf)",
        });
    }
    let p = p.with_lambda_ratio(lambda_ratio);
    let r = derive_rates(&p)?;
    let gen = XGenerator::new(&r, &p)?;
    let (lo, hi) = opts.bracket.unwrap_or_else(|| family.esd_bracket());
    let loses = |f: T| -> Result<bool> {
        let (traj, report) = esd_run_with(family, f, &p, &r, &gen, opts)?;
        Ok(traj.concurrence[0] <= opts.epsilon || report.died())
    };

    let probes = opts.probes.max(2);
    let mut samples = Vec::with_capacity(probes);
    for k in 0..probes {
        let f = lo + (hi - lo) * T::from_usize(k).unwrap() / T::from_usize(probes - 1).unwrap();
        samples.push((f, loses(f)?));
    }
    let describe = || {
        samples
            .iter()
            .map(|(f, b)| format!("{:.4}:{}", f, if *b { "lost" } else { "kept" }))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let first_kept = samples.iter().position(|(_, lost)| !lost);
    if let Some(k) = first_kept {
        if samples[k..].iter().any(|(_, lost)| *lost) {
            return Err(Error::NonMonotone(describe()));
        }
    }
    let k = match first_kept {
        None => {
            return Ok(EsdThreshold {
                f_star: hi,
                bracketed: false,
            })
        }
        Some(0) => {
            return Err(Error::NonMonotone(format!(
                "entanglement survives at the lower bracket edge ({})",
                describe()
            )))
        }
        Some(k) => k,
    };
    let (mut a, mut b) = (samples[k - 1].0, samples[k].0);
    while b - a > tol {
        let mid = (a + b) * T::lit(0.5);
        if loses(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(EsdThreshold {
        f_star: (a + b) * T::lit(0.5),
        bracketed: true,
    })
}

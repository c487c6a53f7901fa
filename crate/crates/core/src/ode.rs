//! Dormand–Prince 5(4) with Hairer's 4th-order dense output.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A first-order system `y' = f(t, y)` on a flat real state.
pub trait OdeSystem<T: Real> {
    fn dim(&self) -> usize;
    fn rhs(&self, t: T, y: &[T], dy: &mut [T]);
}

#[derive(Clone, Copy, Debug)]
pub struct DormandPrince<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    /// Upper bound on the step size; `None` for unbounded.
    pub h_max: Option<T>,
}

#[derive(Clone, Debug, Default)]
pub struct Solution<T> {
    /// One state per requested sample time.
    pub samples: Vec<Vec<T>>,
    pub accepted: usize,
    pub rejected: usize,
}

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// error weights b - b*
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

impl<T: Real> DormandPrince<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol,
            max_steps: 50_000_000,
            h_max: None,
        }
    }

    fn err_norm(&self, y0: &[T], y1: &[T], e: &[T]) -> T {
        let n = T::from_usize(y0.len()).unwrap();
        let s: T = y0
            .iter()
            .zip(y1)
            .zip(e)
            .map(|((a, b), err)| {
                let sc = self.atol + self.rtol * a.abs().max(b.abs());
                let q = *err / sc;
                q * q
            })
            .sum();
        (s / n).sqrt()
    }

    fn initial_step<S: OdeSystem<T>>(&self, sys: &S, t0: T, y0: &[T], f0: &[T], span: T) -> T {
        let n = y0.len();
        let norm = |v: &[T]| {
            let s: T = v
                .iter()
                .zip(y0)
                .map(|(x, y)| {
                    let q = *x / (self.atol + self.rtol * y.abs());
                    q * q
                })
                .sum();
            (s / T::from_usize(n).unwrap()).sqrt()
        };
        let d0 = norm(y0);
        let d1 = norm(f0);
        let small = T::lit(1e-5);
        let mut h0 = if d0 < small || d1 < small {
            T::lit(1e-6)
        } else {
            T::lit(0.01) * d0 / d1
        };
        h0 = h0.min(span);
        let y1: Vec<T> = y0.iter().zip(f0).map(|(y, f)| *y + h0 * *f).collect();
        let mut f1 = vec![T::zero(); n];
        sys.rhs(t0 + h0, &y1, &mut f1);
        let diff: Vec<T> = f1.iter().zip(f0).map(|(a, b)| *a - *b).collect();
        let d2 = norm(&diff) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= T::lit(1e-15) {
            (h0 * T::lit(1e-3)).max(T::lit(1e-6))
        } else {
            (T::lit(0.01) / dmax).powf(T::lit(0.2))
        };
        let mut h = (T::lit(100.0) * h0).min(h1).min(span);
        if let Some(hm) = self.h_max {
            h = h.min(hm);
        }
        h
    }

    /// Integrates from `t0` and returns the state at each of `sample_times`
    /// (ascending, all `>= t0`).
    pub fn integrate<S: OdeSystem<T>>(
        &self,
        sys: &S,
        t0: T,
        y0: &[T],
        sample_times: &[T],
    ) -> Result<Solution<T>> {
        let n = sys.dim();
        assert_eq!(y0.len(), n, "state dimension mismatch");
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t0.as_f64() });
        }
        let mut out = Solution {
            samples: Vec::with_capacity(sample_times.len()),
            ..Default::default()
        };
        let mut next = 0;
        while next < sample_times.len() && sample_times[next] <= t0 {
            out.samples.push(y0.to_vec());
            next += 1;
        }
        let Some(&t_end) = sample_times.last() else {
            return Ok(out);
        };
        if next == sample_times.len() {
            return Ok(out);
        }

        let lit = T::lit;
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k1 = vec![T::zero(); n];
        let mut k2 = vec![T::zero(); n];
        let mut k3 = vec![T::zero(); n];
        let mut k4 = vec![T::zero(); n];
        let mut k5 = vec![T::zero(); n];
        let mut k6 = vec![T::zero(); n];
        let mut k7 = vec![T::zero(); n];
        let mut ys = vec![T::zero(); n];
        let mut y_new = vec![T::zero(); n];
        let mut err = vec![T::zero(); n];
        sys.rhs(t, &y, &mut k1);

        let mut h = self.initial_step(sys, t, &y, &k1, t_end - t0);
        let mut last_rejected = false;
        let mut steps = 0usize;

        while next < sample_times.len() {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::TooManySteps {
                    steps: self.max_steps,
                    t: t.as_f64(),
                    t_end: t_end.as_f64(),
                });
            }
            if t + h > t_end {
                h = t_end - t;
            }
            if h <= T::epsilon() * lit(16.0) * t.abs() || h <= T::min_positive_value() {
                return Err(Error::StepUnderflow {
                    t: t.as_f64(),
                    h: h.as_f64(),
                });
            }

            let stage = |dst: &mut [T], coeffs: &[(f64, &[T])]| {
                for i in 0..n {
                    let mut acc = T::zero();
                    for (c, k) in coeffs {
                        acc += lit(*c) * k[i];
                    }
                    dst[i] = y[i] + h * acc;
                }
            };
            stage(&mut ys, &[(A21, &k1)]);
            sys.rhs(t + lit(C2) * h, &ys, &mut k2);
            stage(&mut ys, &[(A31, &k1), (A32, &k2)]);
            sys.rhs(t + lit(C3) * h, &ys, &mut k3);
            stage(&mut ys, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            sys.rhs(t + lit(C4) * h, &ys, &mut k4);
            stage(&mut ys, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            sys.rhs(t + lit(C5) * h, &ys, &mut k5);
            stage(
                &mut ys,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            sys.rhs(t + h, &ys, &mut k6);
            stage(
                &mut y_new,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            sys.rhs(t + h, &y_new, &mut k7);
            for i in 0..n {
                err[i] = h
                    * (lit(E1) * k1[i]
                        + lit(E3) * k3[i]
                        + lit(E4) * k4[i]
                        + lit(E5) * k5[i]
                        + lit(E6) * k6[i]
                        + lit(E7) * k7[i]);
            }
            let en = self.err_norm(&y, &y_new, &err);

            if en.is_finite() && en <= T::one() {
                let t_new = t + h;
                // dense output on (t, t_new]
                while next < sample_times.len() && sample_times[next] <= t_new {
                    let theta = (sample_times[next] - t) / h;
                    let theta1 = T::one() - theta;
                    let mut s = vec![T::zero(); n];
                    for i in 0..n {
                        let r2 = y_new[i] - y[i];
                        let r3 = h * k1[i] - r2;
                        let r4 = r2 - h * k7[i] - r3;
                        let r5 = h
                            * (lit(D1) * k1[i]
                                + lit(D3) * k3[i]
                                + lit(D4) * k4[i]
                                + lit(D5) * k5[i]
                                + lit(D6) * k6[i]
                                + lit(D7) * k7[i]);
                        s[i] = y[i] + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
                    }
                    if sample_times[next] == t_new {
                        s.copy_from_slice(&y_new);
                    }
                    out.samples.push(s);
                    next += 1;
                }
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                out.accepted += 1;

                let mut fac = lit(SAFETY) * en.max(lit(1e-10)).powf(lit(-0.2));
                fac = fac.max(lit(FAC_MIN)).min(if last_rejected {
                    T::one()
                } else {
                    lit(FAC_MAX)
                });
                h = h * fac;
                last_rejected = false;
            } else {
                out.rejected += 1;
                let fac = if en.is_finite() {
                    (lit(SAFETY) * en.powf(lit(-0.2))).max(lit(FAC_MIN))
                } else {
                    lit(0.1)
                };
                h = h * fac.min(T::one());
                last_rejected = true;
            }
            if let Some(hm) = self.h_max {
                h = h.min(hm);
            }
        }
        Ok(out)
    }
}

/// Sample grid `0, dt, 2dt, …` ending exactly at `t_max`.
pub fn sample_grid<T: Real>(t_max: T, sample_dt: T) -> Result<Vec<T>> {
    if !(t_max > T::zero()) || !t_max.is_finite() {
        return Err(Error::OutOfRange {
            name: "t_max",
            value: t_max.as_f64(),
            allowed: "(0, inf)",
        });
    }
    if !(sample_dt > T::zero()) || sample_dt > t_max {
        return Err(Error::OutOfRange {
            name: "sample_dt",
            value: sample_dt.as_f64(),
            allowed: "(0, t_max]",
        });
    }
    let steps = (t_max / sample_dt).floor().to_usize().unwrap_or(0);
    let mut times: Vec<T> = (0..=steps)
        .map(|k| T::from_usize(k).unwrap() * sample_dt)
        .collect();
    let last = *times.last().unwrap();
    if t_max - last > sample_dt * T::lit(1e-9) {
        times.push(t_max);
    } else {
        *times.last_mut().unwrap() = t_max;
    }
    Ok(times)
}

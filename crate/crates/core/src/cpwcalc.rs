//! Coplanar waveguide on an infinitely thick substrate with zero-thickness
//! metal (conformal mapping), plus the wavelength relations used to pick
//! qubit frequencies for a given spacing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Qubit spacing x₂ of the reference layout, in mm.
pub const DEFAULT_X2_MM: f64 = 18.4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpwGeometry<T> {
    /// Centre conductor width, µm.
    pub center_width: T,
    /// Gap to the ground planes, µm.
    pub gap_width: T,
    pub eps_r: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpwDerived<T> {
    /// Characteristic impedance, Ω.
    pub z0: T,
    /// Phase velocity, m/s.
    pub v_ph: T,
    pub eps_eff: T,
}

impl<T: Real> CpwGeometry<T> {
    pub fn new(center_width: T, gap_width: T, eps_r: T) -> Result<Self> {
        let g = Self {
            center_width,
            gap_width,
            eps_r,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_width > T::zero()) || !self.center_width.is_finite() {
            return Err(Error::OutOfRange {
                name: "center_width",
                value: self.center_width.as_f64(),
                allowed: "(0, inf)",
            });
        }
        if !(self.gap_width > T::zero()) || !self.gap_width.is_finite() {
            return Err(Error::OutOfRange {
                name: "gap_width",
                value: self.gap_width.as_f64(),
                allowed: "(0, inf)",
            });
        }
        if !(self.eps_r >= T::one()) || !self.eps_r.is_finite() {
            return Err(Error::OutOfRange {
                name: "eps_r",
                value: self.eps_r.as_f64(),
                allowed: "[1, inf)",
            });
        }
        Ok(())
    }

    /// Modulus `k = w / (w + 2s)`.
    pub fn modulus(&self) -> T {
        self.center_width / (self.center_width + T::lit(2.0) * self.gap_width)
    }
}

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm<T: Real>(a: T, b: T) -> T {
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        if (a - b).abs() <= T::lit(1e-15) * a.abs() {
            break;
        }
        let next = (a + b) * T::lit(0.5);
        b = (a * b).sqrt();
        a = next;
    }
    (a + b) * T::lit(0.5)
}

/// Complete elliptic integral of the first kind, `K(k) = π / (2 AGM(1, √(1−k²)))`.
pub fn elliptic_k<T: Real>(k: T) -> Result<T> {
    if !(k >= T::zero() && k < T::one()) {
        return Err(Error::OutOfRange {
            name: "k",
            value: k.as_f64(),
            allowed: "[0, 1)",
        });
    }
    let kp = (T::one() - k * k).sqrt();
    Ok(T::PI() / (T::lit(2.0) * agm(T::one(), kp)))
}

/// Characteristic impedance and phase velocity.
pub fn cpw_derive<T: Real>(g: &CpwGeometry<T>) -> Result<CpwDerived<T>> {
    g.validate()?;
    let k = g.modulus();
    let kp = (T::one() - k * k).sqrt();
    if !(k > T::zero() && k < T::one()) || !(kp > T::zero()) {
        return Err(Error::OutOfRange {
            name: "k",
            value: k.as_f64(),
            allowed: "(0, 1)",
        });
    }
    let eps_eff = (g.eps_r + T::one()) * T::lit(0.5);
    let ratio = elliptic_k(kp)? / elliptic_k(k)?;
    let z0 = T::lit(30.0) * T::PI() * ratio / eps_eff.sqrt();
    let v_ph = T::lit(SPEED_OF_LIGHT) / eps_eff.sqrt();
    Ok(CpwDerived { z0, v_ph, eps_eff })
}

/// `λ = 2π v_ph / ω` (ω in rad/s, v_ph in m/s, λ in m).
pub fn wavelength<T: Real>(omega: T, v_ph: T) -> Result<T> {
    if !(omega > T::zero()) {
        return Err(Error::OutOfRange {
            name: "omega",
            value: omega.as_f64(),
            allowed: "(0, inf)",
        });
    }
    Ok(T::TAU() * v_ph / omega)
}

/// λ/x₂ for a qubit at `freq_ghz` on the given line, with x₂ in mm.
pub fn lambda_ratio_for_freq<T: Real>(freq_ghz: T, geom: &CpwGeometry<T>, x2_mm: T) -> Result<T> {
    if !(x2_mm > T::zero()) {
        return Err(Error::OutOfRange {
            name: "x2",
            value: x2_mm.as_f64(),
            allowed: "(0, inf)",
        });
    }
    let v = cpw_derive(geom)?.v_ph;
    let lambda_m = wavelength(T::TAU() * freq_ghz * T::lit(1e9), v)?;
    Ok(lambda_m * T::lit(1e3) / x2_mm)
}

/// Coupling-point distances `(x₁, x₂)` in mm with `x₂ = 2x₁`.
pub fn layout_for_spacing<T: Real>(x2_mm: T) -> (T, T) {
    (x2_mm * T::lit(0.5), x2_mm)
}

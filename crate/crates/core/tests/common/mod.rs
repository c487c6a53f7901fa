#![allow(dead_code)]

use num_complex::Complex;
use rand::Rng;
use wgqed::dynamics::XState;

/// Random physical X-state: populations from a flat Dirichlet draw, coherences
/// anywhere inside the positivity disks |z|² ≤ bc and |w|² ≤ ad.
pub fn random_xstate<R: Rng>(rng: &mut R) -> XState<f64> {
    let e: [f64; 4] = std::array::from_fn(|_| -rng.gen_range(1e-12f64..1.0).ln());
    let s: f64 = e.iter().sum();
    let [a, b, c, d] = e.map(|v| v / s);
    let disk = |rng: &mut R, bound: f64| {
        // land exactly on the boundary now and then
        let r = if rng.gen_bool(0.1) {
            1.0
        } else {
            rng.gen_range(0.0..1.0)
        };
        Complex::from_polar(r * bound, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    let z = disk(rng, (b * c).sqrt());
    let w = disk(rng, (a * d).sqrt());
    XState { a, b, c, d, z, w }
}

/// Smallest eigenvalue of an X-state from its two 2×2 blocks.
pub fn xstate_min_eigenvalue(x: &XState<f64>) -> f64 {
    let block =
        |p: f64, q: f64, off: f64| (p + q) / 2.0 - (((p - q) / 2.0).powi(2) + off * off).sqrt();
    block(x.a, x.d, x.w.norm()).min(block(x.b, x.c, x.z.norm()))
}

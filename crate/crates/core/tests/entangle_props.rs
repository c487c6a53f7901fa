mod common;

use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wgqed::entangle::{
    concurrence_wootters, concurrence_x, detect_events_in, esd_run, esd_threshold, EsdOptions,
};
use wgqed::qcore::{expm_skew, herm_eigen, herm_eigvals, tensor, ComplexMatrix, DensityMatrix};
use wgqed::states::{werner_x, StateFamily};
use wgqed::WaveguideParams;

use common::random_xstate;

type C = Complex<f64>;

/// Wootters concurrence from the eigenvalues of √ρ ρ̃ √ρ, with ρ̃ = Y ρ* Y.
fn wootters_oracle(rho: &ComplexMatrix<f64>) -> f64 {
    let yy = ComplexMatrix::from_fn(4, |i, j| {
        if i + j == 3 {
            C::new(if i == 0 || i == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let tilde = &(&yy * &rho.conj()) * &yy;
    let root = herm_eigen(rho)
        .unwrap()
        .map_spectrum(|l| C::new(l.max(0.0).sqrt(), 0.0));
    let r = &(&root * &tilde) * &root;
    let mut l: Vec<f64> = herm_eigvals(&r)
        .unwrap()
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

fn density() -> impl Strategy<Value = ComplexMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let a = ComplexMatrix::from_rows(v.chunks_exact(2).map(|p| C::new(p[0], p[1])).collect())
            .unwrap();
        let p = &a * &a.adjoint();
        let tr = p.trace().re;
        p.scale_real(1.0 / tr)
    })
}

fn local_unitary() -> impl Strategy<Value = ComplexMatrix<f64>> {
    (
        prop::collection::vec(-1.0f64..1.0, 4),
        prop::collection::vec(-1.0f64..1.0, 4),
    )
        .prop_map(|(u, v)| {
            let herm = |e: &[f64]| {
                ComplexMatrix::from_rows(vec![
                    C::new(e[0], 0.0),
                    C::new(e[1], e[2]),
                    C::new(e[1], -e[2]),
                    C::new(e[3], 0.0),
                ])
                .unwrap()
            };
            let ua = expm_skew(&herm(&u), 2.0, 1).unwrap();
            let ub = expm_skew(&herm(&v), 2.0, 1).unwrap();
            tensor(&ua, &ub).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wootters_matches_oracle_on_general_states(rho in density()) {
        let c = concurrence_wootters(&DensityMatrix::new(rho.clone()).unwrap()).unwrap();
        prop_assert!((c - wootters_oracle(&rho)).abs() < 1e-7);
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries(rho in density(), u in local_unitary()) {
        let before = concurrence_wootters(&DensityMatrix::new(rho.clone()).unwrap()).unwrap();
        let rotated = &(&u * &rho) * &u.adjoint();
        let after = concurrence_wootters(&DensityMatrix::new(rotated).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn x_concurrence_ignores_coherence_phases(seed in any::<u64>(), t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let mut x = random_xstate(&mut ChaCha8Rng::seed_from_u64(seed));
        let c0 = concurrence_x(&x).unwrap();
        x.z *= C::from_polar(1.0, t1);
        x.w *= C::from_polar(1.0, t2);
        prop_assert!((concurrence_x(&x).unwrap() - c0).abs() < 1e-15);
        let rho = DensityMatrix::new(x.to_matrix()).unwrap();
        prop_assert!((concurrence_wootters(&rho).unwrap() - c0).abs() < 1e-10);
    }
}

#[test]
fn bell_and_product_states() {
    let s = 0.5f64.sqrt();
    for psi in [[s, 0.0, 0.0, s], [0.0, s, s, 0.0], [s, 0.0, 0.0, -s]] {
        let v: Vec<C> = psi.iter().map(|&x| C::new(x, 0.0)).collect();
        let rho = DensityMatrix::new(wgqed::qcore::projector(&v)).unwrap();
        assert!((concurrence_wootters(&rho).unwrap() - 1.0).abs() < 1e-12);
    }
    let plus = ComplexMatrix::from_fn(2, |_, _| C::new(0.5, 0.0));
    let ground = ComplexMatrix::diag(&[1.0, 0.0]);
    let rho = DensityMatrix::new(tensor(&plus, &ground).unwrap()).unwrap();
    assert!(concurrence_wootters(&rho).unwrap() < 1e-12);
}

#[test]
fn events_on_a_synthetic_curve() {
    let times: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.01).collect();
    let c: Vec<f64> = times.iter().map(|t| t.cos().max(0.0)).collect();
    let rep = detect_events_in(&times, &c, 1e-6, 5);
    let half_pi = std::f64::consts::FRAC_PI_2;
    assert_eq!(rep.death_times.len(), 2);
    assert_eq!(rep.revival_times.len(), 1);
    assert!((rep.death_times[0] - half_pi).abs() < 1e-2);
    assert!((rep.revival_times[0] - 3.0 * half_pi).abs() < 1e-2);
    assert!((rep.death_times[1] - 5.0 * half_pi).abs() < 1e-2);
}

#[test]
fn brief_touch_is_not_a_death() {
    let times: Vec<f64> = (0..20).map(|k| k as f64).collect();
    let mut c = vec![0.5; 20];
    c[7] = 0.0;
    c[8] = 0.0;
    let rep = detect_events_in(&times, &c, 1e-6, 5);
    assert!(!rep.died());
    c[9..14].iter_mut().for_each(|v| *v = 0.0);
    let rep = detect_events_in(&times, &c, 1e-6, 5);
    assert_eq!(rep.death_times.len(), 1);
    assert!(rep.revived());
}

/// Werner state under independent damping at rate Γ: F(t) = |z₀|p − √(a d).
fn werner_f_closed(f: f64, rate: f64, t: f64) -> f64 {
    let x = werner_x(f).unwrap();
    let p = (-rate * t).exp();
    let d = x.d * p * p;
    let bc = (x.b + x.d * (1.0 - p)) * p;
    let a = 1.0 - 2.0 * bc - d;
    x.z.norm() * p - (a * d).sqrt()
}

#[test]
fn death_time_at_the_mirror_node_matches_closed_form() {
    let p = WaveguideParams::from_mhz(5.0, 0.03, 2.0).unwrap();
    for f in [0.55, 0.6, 0.65, 0.7] {
        let (_, rep) = esd_run(StateFamily::Werner, f, &p, &EsdOptions::default()).unwrap();
        assert_eq!(rep.death_times.len(), 1);
        assert!(!rep.revived());
        let (mut lo, mut hi) = (0.0, 200.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if werner_f_closed(f, p.gamma_nr, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(
            (rep.death_times[0] - lo).abs() < 0.05,
            "f = {f}: {} vs {lo}",
            rep.death_times[0]
        );
    }
}

#[test]
fn werner_threshold_near_asymptotic_root() {
    // 16f² + 4f − 11 = 0 is the infinite-horizon boundary
    let root = (-4.0 + (16.0f64 + 704.0).sqrt()) / 32.0;
    let p = WaveguideParams::from_mhz(5.0, 0.03, 2.0).unwrap();
    let res = esd_threshold(2.0, &p, StateFamily::Werner, 1e-5).unwrap();
    assert!(res.bracketed);
    assert!(
        res.f_star >= root - 1e-4 && res.f_star < root + 3e-3,
        "{} vs {root}",
        res.f_star
    );
}

#[test]
fn threshold_rejects_bad_tolerance() {
    let p = WaveguideParams::from_mhz(5.0, 0.03, 2.0).unwrap();
    assert!(esd_threshold(2.0, &p, StateFamily::Werner, 0.0).is_err());
}

#[test]
fn closed_form_and_wootters_on_many_x_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let x = random_xstate(&mut rng);
        let rho = DensityMatrix::new(x.to_matrix()).unwrap();
        assert!((concurrence_x(&x).unwrap() - wootters_oracle(rho.matrix())).abs() < 1e-7);
    }
}

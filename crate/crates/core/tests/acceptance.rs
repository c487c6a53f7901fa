//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::TAU;
use std::sync::Mutex;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wgqed::cpwcalc::{cpw_derive, lambda_ratio_for_freq, wavelength, CpwGeometry, DEFAULT_X2_MM};
use wgqed::dynamics::{
    evolve_full, evolve_xstate, off_x_leakage, EvolveOptions, Trajectory, XGenerator, XState,
};
use wgqed::entangle::{
    concurrence_wootters, concurrence_x, esd_run, esd_threshold, pw_concurrence_closed, EsdOptions,
};
use wgqed::model::{build_generator, derive_rates, WaveguideParams};
use wgqed::qcore::{herm_eigvals, ComplexMatrix, DensityMatrix};
use wgqed::states::{
    mixed_qubit, prepare_pw, pseudo_werner, wait_time_for_f, PrepConfig, RabiConfig, StateFamily,
};

use common::{random_xstate, xstate_min_eigenvalue};

const GAMMA_MHZ: f64 = 5.0;
const GAMMA_NR_MHZ: f64 = 0.03;
const RATIOS: [f64; 4] = [2.0, 1.5, 1.2, 1.3];

fn params(lambda_ratio: f64) -> WaveguideParams<f64> {
    WaveguideParams::from_mhz(GAMMA_MHZ, GAMMA_NR_MHZ, lambda_ratio).unwrap()
}

/// Worst invariant values seen along every trajectory run by the suite.
#[derive(Debug, Default)]
struct Invariants {
    trajectories: usize,
    samples: usize,
    trace_drift: f64,
    min_eigenvalue: f64,
    leakage: f64,
}

static INVARIANTS: Mutex<Invariants> = Mutex::new(Invariants {
    trajectories: 0,
    samples: 0,
    trace_drift: 0.0,
    min_eigenvalue: f64::INFINITY,
    leakage: 0.0,
});

fn record_x(traj: &Trajectory<f64, XState<f64>>, gen_leakage: f64) {
    let mut inv = INVARIANTS.lock().unwrap();
    inv.trajectories += 1;
    inv.samples += traj.len();
    inv.leakage = inv.leakage.max(gen_leakage);
    for x in &traj.states {
        inv.trace_drift = inv.trace_drift.max((x.trace() - 1.0).abs());
        inv.min_eigenvalue = inv.min_eigenvalue.min(xstate_min_eigenvalue(x));
    }
}

fn record_full(traj: &Trajectory<f64, ComplexMatrix<f64>>) {
    let mut inv = INVARIANTS.lock().unwrap();
    inv.trajectories += 1;
    inv.samples += traj.len();
    for m in &traj.states {
        inv.trace_drift = inv.trace_drift.max((m.trace().re - 1.0).abs());
        inv.min_eigenvalue = inv.min_eigenvalue.min(herm_eigvals(m).unwrap()[0]);
        inv.leakage = inv.leakage.max(off_x_leakage(m));
    }
}

fn record_qubit(gg: f64, ee: f64, eg: f64) {
    let mut inv = INVARIANTS.lock().unwrap();
    inv.samples += 1;
    let tr = gg + ee;
    inv.trace_drift = inv.trace_drift.max((tr - 1.0).abs());
    inv.min_eigenvalue = inv
        .min_eigenvalue
        .min(tr / 2.0 - (((gg - ee) / 2.0).powi(2) + eg * eg).sqrt());
}

fn esd(
    family: StateFamily,
    f: f64,
    lambda_ratio: f64,
) -> (
    Trajectory<f64, XState<f64>>,
    wgqed::entangle::EsdReport<f64>,
) {
    let p = params(lambda_ratio);
    let (traj, report) = esd_run(family, f, &p, &EsdOptions::default()).unwrap();
    let leak = XGenerator::new(&derive_rates(&p).unwrap(), &p)
        .unwrap()
        .leakage();
    record_x(&traj, leak);
    (traj, report)
}

struct Outcome {
    passed: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self {
            passed,
            detail,
            notes: Vec::new(),
        }
    }
}

fn criterion_1() -> Outcome {
    // (λ/x₂, Γ_a, Γ_b, Γ_col, g_x) in units of 2π MHz
    let quoted = [
        (2.0, 0.03, 0.03, 0.0, 0.0),
        (1.5, 2.53, 10.03, -5.0, 0.0),
        (1.2, 7.53, 0.03, 0.0, -4.33),
        (1.3, 5.63, 3.26, -4.25, -3.08),
    ];
    let mut worst = (0.0f64, String::new());
    for (ratio, ga, gb, gcol, gx) in quoted {
        let r = derive_rates(&params(ratio)).unwrap();
        for (name, got, want) in [
            ("Γ_a", r.gamma_a, ga),
            ("Γ_b", r.gamma_b, gb),
            ("Γ_col", r.gamma_col, gcol),
            ("g_x", r.g_x, gx),
        ] {
            let dev = (got / TAU - want).abs();
            if dev >= worst.0 {
                worst = (dev, format!("{name} at λ/x2 = {ratio}"));
            }
        }
    }
    Outcome::new(
        worst.0 <= 0.01,
        format!(
            "max |derived − quoted| = {:.4} ×2π MHz ({}), tolerance 0.01",
            worst.0, worst.1
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p = params(2.0);
    let res = esd_threshold(2.0, &p, StateFamily::Werner, 1e-4).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    for f in [res.f_star - 1e-3, res.f_star + 1e-3] {
        esd(StateFamily::Werner, f, 2.0);
    }
    let dev = (res.f_star - 0.714).abs();
    Outcome::new(
        res.bracketed && dev <= 0.005 && elapsed < 30.0,
        format!(
            "f* = {:.5} (target 0.714 ± 0.005), bisection took {:.2} s (limit 30 s)",
            res.f_star, elapsed
        ),
    )
}

fn criterion_3() -> Outcome {
    let at_one = pw_concurrence_closed(1.0).unwrap();
    let dev_one = (at_one - 3f64.sqrt() / 2.0).abs();
    let max_below = (0..100)
        .map(|k| pw_concurrence_closed(k as f64 / 99.0 / 3.0).unwrap())
        .fold(0.0, f64::max);
    let max_diff = (0..=1000)
        .map(|k| {
            let f = k as f64 / 1000.0;
            let x = pseudo_werner_x(f);
            (pw_concurrence_closed(f).unwrap() - concurrence_x(&x).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    Outcome::new(
        dev_one <= 1e-12 && max_below == 0.0 && max_diff <= 1e-12,
        format!(
            "|C(1) − √3/2| = {dev_one:.1e}, max C on f ≤ 1/3 = {max_below:.1e}, closed vs X-state {max_diff:.1e} (tolerance 1e-12)"
        ),
    )
}

fn pseudo_werner_x(f: f64) -> XState<f64> {
    wgqed::states::pseudo_werner_x(f).unwrap()
}

fn printed_rho2(f: f64) -> ComplexMatrix<f64> {
    let mut m = ComplexMatrix::zeros(8);
    m[(1, 1)] = (f / 2.0).into();
    m[(1, 2)] = num_complex::Complex::new(0.0, f / 2.0);
    m[(2, 1)] = num_complex::Complex::new(0.0, -f / 2.0);
    m[(2, 2)] = (f / 2.0).into();
    m[(3, 3)] = (1.0 - f).into();
    m
}

fn printed_rho3(f: f64) -> ComplexMatrix<f64> {
    use num_complex::Complex as C;
    let s3 = 3f64.sqrt();
    let mut m = ComplexMatrix::zeros(8);
    m[(1, 1)] = C::new(f / 2.0, 0.0);
    m[(1, 2)] = C::new(0.0, s3 * f / 4.0);
    m[(1, 4)] = C::new(f / 4.0, 0.0);
    m[(2, 1)] = C::new(0.0, -s3 * f / 4.0);
    m[(2, 2)] = C::new(3.0 * f / 8.0, 0.0);
    m[(2, 4)] = C::new(0.0, -s3 * f / 8.0);
    m[(3, 3)] = C::new(-0.75 * (f - 1.0), 0.0);
    m[(3, 5)] = C::new(0.0, s3 * (f - 1.0) / 4.0);
    m[(4, 1)] = C::new(f / 4.0, 0.0);
    m[(4, 2)] = C::new(0.0, s3 * f / 8.0);
    m[(4, 4)] = C::new(f / 8.0, 0.0);
    m[(5, 3)] = C::new(0.0, -s3 * (f - 1.0) / 4.0);
    m[(5, 5)] = C::new((1.0 - f) / 4.0, 0.0);
    m
}

fn criterion_4() -> Outcome {
    let prep = prepare_pw(&PrepConfig::exact(0.8)).unwrap();
    let d2 = prep.rho2.matrix().max_abs_diff(&printed_rho2(0.8));
    let d3 = prep.rho3.matrix().max_abs_diff(&printed_rho3(0.8));
    let d_out = (0..50)
        .map(|k| {
            let f = k as f64 / 49.0;
            let out = prepare_pw(&PrepConfig::exact(f)).unwrap().rho_out;
            out.matrix()
                .max_abs_diff(pseudo_werner(f).unwrap().matrix())
        })
        .fold(0.0, f64::max);
    Outcome::new(
        d2 <= 1e-12 && d3 <= 1e-12 && d_out <= 1e-10,
        format!("ρ2 {d2:.1e}, ρ3 {d3:.1e} (tolerance 1e-12); ρ_out vs PW over 50 f {d_out:.1e} (tolerance 1e-10)"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for ratio in RATIOS {
        let p = params(ratio);
        let r = derive_rates(&p).unwrap();
        let sup = build_generator(&r, &p).unwrap();
        let leak = XGenerator::from_generator(&sup).unwrap().leakage();
        let opts = EvolveOptions::new(1.0, 0.002);
        for _ in 0..20 {
            let x0 = random_xstate(&mut rng);
            let fast = evolve_xstate(&x0, &r, &p, &opts).unwrap();
            let full =
                evolve_full(&DensityMatrix::new(x0.to_matrix()).unwrap(), &sup, &opts).unwrap();
            record_x(&fast, leak);
            record_full(&full);
            for (x, m) in fast.states.iter().zip(&full.states) {
                worst = worst.max(x.to_matrix().max_abs_diff(m));
            }
            runs += 1;
        }
    }
    Outcome::new(
        worst <= 1e-8,
        format!(
            "{runs} random X-states over 1 µs: max |fast − full| = {worst:.2e} (tolerance 1e-8)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let grid: Vec<f64> = (30..=100).map(|k| k as f64 / 100.0).collect();
    let mut notes = Vec::new();
    let mut passed = true;

    let revived_at_2: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&f| esd(StateFamily::Werner, f, 2.0).1.revived())
        .collect();
    let ok = revived_at_2.is_empty();
    passed &= ok;
    notes.push(format!(
        "λ/x2 = 2: revivals on Werner f ∈ [0.30, 1.00] at {:?} (expect none) {}",
        revived_at_2,
        mark(ok)
    ));

    // revived-interval length (revival to next death, or to the horizon)
    let revived_span = |report: &wgqed::entangle::EsdReport<f64>, horizon: f64| {
        let t_rev = report.revival_times[0];
        let next_death = report.death_times.iter().copied().find(|t| *t > t_rev);
        (next_death.unwrap_or(horizon) - t_rev, next_death.is_some())
    };

    let mut span_15 = f64::INFINITY;
    for ratio in [1.5, 1.3] {
        let (traj, report) = esd(StateFamily::Werner, 0.9, ratio);
        let ok =
            report.died() && report.revived() && report.revival_times[0] > report.death_times[0];
        passed &= ok;
        let span = if ok {
            revived_span(&report, *traj.times.last().unwrap()).0
        } else {
            f64::NAN
        };
        if ratio == 1.5 {
            span_15 = span;
        }
        notes.push(format!(
            "λ/x2 = {ratio}, f = 0.9: deaths {:?} revivals {:?} {}",
            round(&report.death_times),
            round(&report.revival_times),
            mark(ok)
        ));
    }

    let mut fast_revivals = Vec::new();
    for &f in &grid {
        let (traj, report) = esd(StateFamily::Werner, f, 1.2);
        if report.revived() && report.revival_times[0] > report.death_times[0] {
            let (span, redied) = revived_span(&report, *traj.times.last().unwrap());
            if redied && span < span_15 {
                fast_revivals.push((f, span));
            }
        }
    }
    let ok = !fast_revivals.is_empty();
    passed &= ok;
    let summary = match (fast_revivals.first(), fast_revivals.last()) {
        (Some(a), Some(b)) => format!(
            "f ∈ [{:.2}, {:.2}] ({} grid points), revived concurrence lasts {:.3}–{:.3} µs vs {:.3} µs at λ/x2 = 1.5",
            a.0,
            b.0,
            fast_revivals.len(),
            fast_revivals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min),
            fast_revivals.iter().map(|v| v.1).fold(0.0, f64::max),
            span_15
        ),
        _ => "none".into(),
    };
    notes.push(format!(
        "λ/x2 = 1.2: death, revival, fast re-death on {summary} {}",
        mark(ok)
    ));

    let mut out = Outcome::new(passed, "ESD/revival pattern over the four ratios".into());
    out.notes = notes;
    out
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|t| (t * 1e4).round() / 1e4).collect()
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let worst = (0..1000)
        .map(|_| {
            let x = random_xstate(&mut rng);
            let rho = DensityMatrix::new(x.to_matrix()).unwrap();
            (concurrence_x(&x).unwrap() - concurrence_wootters(&rho).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    Outcome::new(
        worst <= 1e-10,
        format!("1000 random X-states: max |closed − Wootters| = {worst:.2e} (tolerance 1e-10)"),
    )
}

fn criterion_8() -> Outcome {
    let omega = TAU * 30.0;
    let gamma_nr = TAU * 0.03;
    let record = |samples: &[wgqed::states::MixSample<f64>]| {
        for s in samples {
            record_qubit(s.rho_gg, s.rho_ee, s.abs_rho_eg);
        }
        INVARIANTS.lock().unwrap().trajectories += 1;
    };

    let pulse = mixed_qubit(&RabiConfig::new(omega, gamma_nr, 35.0, 0.0)).unwrap();
    record(&pulse.samples);
    let end = pulse.samples.last().unwrap();
    let gg_dev = (end.rho_gg - 0.5).abs();
    let ok_pulse = gg_dev <= 0.01 && end.abs_rho_eg <= 0.01;

    let t_wait = wait_time_for_f(0.8, gamma_nr).unwrap();
    let ok_wait = (t_wait - 4.86).abs() <= 0.01;

    let full = mixed_qubit(&RabiConfig::new(omega, gamma_nr, 35.0, t_wait)).unwrap();
    record(&full.samples);
    let f_dev = (full.f_achieved - 0.8).abs();
    let ok_f = f_dev <= 0.005;

    Outcome::new(
        ok_pulse && ok_wait && ok_f,
        format!(
            "after 35 µs |ρgg − 1/2| = {gg_dev:.2e}, |ρeg| = {:.2e} (≤ 0.01); wait = {t_wait:.4} µs (4.86 ± 0.01); f_achieved = {:.5} (0.8 ± 0.005)",
            end.abs_rho_eg, full.f_achieved
        ),
    )
}

fn criterion_9() -> Outcome {
    let geom = CpwGeometry::new(20.0f64, 8.0, 9.8).unwrap();
    let d = cpw_derive(&geom).unwrap();
    let v_dev = (d.v_ph / 1.29017e8 - 1.0).abs();
    let lambda_7 = wavelength(TAU * 7e9, d.v_ph).unwrap() * 1e3;
    let r23 = lambda_ratio_for_freq(2.3, &geom, DEFAULT_X2_MM).unwrap();
    let r30 = lambda_ratio_for_freq(3.0, &geom, DEFAULT_X2_MM).unwrap();
    let z_dev = (d.z0 / 50.0 - 1.0).abs();
    let checks = [
        (
            format!(
                "v_ph = {:.6e} m/s, off by {:.4}% (≤ 0.1%)",
                d.v_ph,
                v_dev * 100.0
            ),
            v_dev <= 1e-3,
        ),
        (
            format!("λ(7 GHz) = {lambda_7:.3} mm (18.4 ± 0.1)"),
            (lambda_7 - 18.4).abs() <= 0.1,
        ),
        (
            format!("λ/x2 at 2.3 GHz = {r23:.4} (3.0 ± 2%)"),
            (r23 / 3.0 - 1.0).abs() <= 0.02,
        ),
        (
            format!("λ/x2 at 3.0 GHz = {r30:.4} (2.4 ± 2%)"),
            (r30 / 2.4 - 1.0).abs() <= 0.02,
        ),
        (
            format!("Z0 = {:.3} Ω, off by {:.2}% (≤ 5%)", d.z0, z_dev * 100.0),
            z_dev <= 0.05,
        ),
    ];
    let passed = checks.iter().all(|c| c.1);
    let mut out = Outcome::new(passed, "CPW design numbers".into());
    out.notes = checks
        .iter()
        .map(|(s, ok)| format!("{s} {}", mark(*ok)))
        .collect();
    out
}

fn criterion_10() -> Outcome {
    // PW trajectories at every ratio join the trajectories recorded above
    for ratio in RATIOS {
        esd(StateFamily::PseudoWerner, 1.0, ratio);
    }
    let inv = INVARIANTS.lock().unwrap();
    let passed = inv.trajectories > 0
        && inv.trace_drift <= 1e-9
        && inv.min_eigenvalue >= -1e-8
        && inv.leakage <= 1e-10;
    Outcome::new(
        passed,
        format!(
            "{} trajectories, {} samples: trace drift {:.1e} (≤ 1e-9), min eigenvalue {:.1e} (≥ −1e-8), off-X leakage {:.1e} (≤ 1e-10)",
            inv.trajectories, inv.samples, inv.trace_drift, inv.min_eigenvalue, inv.leakage
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("rate table", criterion_1),
        ("Werner ESD threshold", criterion_2),
        ("PW closed-form concurrence", criterion_3),
        ("PW preparation chain", criterion_4),
        ("fast path vs full integration", criterion_5),
        ("qualitative ESD/revival pattern", criterion_6),
        ("closed-form vs Wootters concurrence", criterion_7),
        ("mixed-state preparation", criterion_8),
        ("CPW numbers", criterion_9),
        ("structural invariants", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {n:>2} {} {name}: {} [{:.1} s]",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
        for note in &out.notes {
            println!("              {note}");
        }
        if !out.passed {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

use std::f64::consts::TAU;

use serde::Serialize;
use wgqed::dynamics::{evolve_full, evolve_xstate, off_x_leakage, EvolveOptions};
use wgqed::entangle::{detect_events_in, EsdReport, DEFAULT_EPSILON, DEFAULT_HOLD};
use wgqed::model::{build_generator, derive_rates};
use wgqed::{DensityMatrix, DerivedRates, WaveguideParams, XState};

use super::rates::RateRow;
use super::{envelope, Output};
use crate::args::{EvolveArgs, Format};
use crate::config::{EvolveSection, RunConfig};
use crate::error::CliResult;
use crate::output::{num, Csv};

const SAMPLE_INTERVALS: f64 = 500.0;

#[derive(Serialize)]
struct Echo {
    detuning_mhz: f64,
    coupling_mhz: f64,
    full: bool,
    t_max_us: f64,
    sample_dt_us: f64,
}

#[derive(Serialize)]
struct Raw {
    units: &'static str,
    gamma: f64,
    gamma_nr: f64,
    detuning: f64,
    coupling: f64,
    rates: DerivedRates,
}

#[derive(Serialize)]
struct Row {
    t_us: f64,
    #[serde(rename = "C")]
    concurrence: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    re_z: f64,
    im_z: f64,
    re_w: f64,
    im_w: f64,
}

impl Row {
    fn new(t: f64, c: f64, x: &XState) -> Self {
        Self {
            t_us: t,
            concurrence: c,
            a: x.a,
            b: x.b,
            c: x.c,
            d: x.d,
            re_z: x.z.re,
            im_z: x.z.im,
            re_w: x.w.re,
            im_w: x.w.im,
        }
    }
}

#[derive(Serialize)]
struct Body {
    rates: RateRow,
    raw: Raw,
    esd: EsdReport<f64>,
    trajectory: Vec<Row>,
}

pub fn run(cfg: &RunConfig, args: &EvolveArgs, sec: &EvolveSection) -> CliResult<Output> {
    let f = cfg.require_f()?;
    let ratio = cfg.require_lambda_ratio()?;
    let detuning = args.detuning.or(sec.detuning).unwrap_or(0.0);
    let coupling = args.coupling.or(sec.coupling).unwrap_or(0.0);
    let full = args.full || sec.full.unwrap_or(false);

    let p = WaveguideParams::from_mhz(cfg.gamma_mhz, cfg.gamma_nr_mhz, ratio)?
        .with_detuning(TAU * detuning)
        .with_coupling(TAU * coupling);
    let r = derive_rates(&p)?;
    let mut opts = match cfg.t_max_us {
        Some(t) => EvolveOptions::new(t, t / SAMPLE_INTERVALS),
        None => EvolveOptions::default_for(&p)?,
    };
    if let Some(dt) = cfg.sample_dt_us {
        opts.sample_dt = dt;
    }
    opts = opts.with_rtol(cfg.rtol);

    let x0 = cfg.state.xstate(f)?;
    let (times, states, concurrence) = if full {
        let sup = build_generator(&r, &p)?;
        let traj = evolve_full(&DensityMatrix::new(x0.to_matrix())?, &sup, &opts)?;
        let tolerance = opts.check_tolerance();
        let mut states = Vec::with_capacity(traj.len());
        for (t, m) in traj.times.iter().zip(&traj.states) {
            let leak = off_x_leakage(m);
            if leak > tolerance {
                return Err(wgqed::Error::InvariantViolation {
                    t: *t,
                    what: format!("off-X entries reached {leak:e}"),
                }
                .into());
            }
            states.push(XState::from_matrix(m)?);
        }
        (traj.times, states, traj.concurrence)
    } else {
        let traj = evolve_xstate(&x0, &r, &p, &opts)?;
        (traj.times, traj.states, traj.concurrence)
    };
    let report = detect_events_in(&times, &concurrence, DEFAULT_EPSILON, DEFAULT_HOLD);
    log::info!(
        "{} deaths, {} revivals, final C = {:e}",
        report.death_times.len(),
        report.revival_times.len(),
        report.final_concurrence
    );

    let rows = times
        .iter()
        .zip(&states)
        .zip(&concurrence)
        .map(|((&t, x), &c)| Row::new(t, c, x));
    let content = match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "t_us", "C", "a", "b", "c", "d", "re_z", "im_z", "re_w", "im_w",
            ]);
            for row in rows {
                csv.line(
                    [
                        row.t_us,
                        row.concurrence,
                        row.a,
                        row.b,
                        row.c,
                        row.d,
                        row.re_z,
                        row.im_z,
                        row.re_w,
                        row.im_w,
                    ]
                    .map(num),
                );
            }
            csv.finish()
        }
        Format::Json => envelope(
            cfg,
            Echo {
                detuning_mhz: detuning,
                coupling_mhz: coupling,
                full,
                t_max_us: opts.t_max,
                sample_dt_us: opts.sample_dt,
            },
            Body {
                rates: RateRow::mhz(ratio, &r),
                raw: Raw {
                    units: "rad/us",
                    gamma: p.gamma,
                    gamma_nr: p.gamma_nr,
                    detuning: p.detuning,
                    coupling: p.coupling,
                    rates: r,
                },
                esd: report,
                trajectory: rows.collect(),
            },
        ),
    };
    Ok(Output::new(content))
}

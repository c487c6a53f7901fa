use std::f64::consts::TAU;

use serde::Serialize;
use wgqed::states::{mixed_qubit, wait_time_for_f, MixSample, RabiConfig};

use super::{envelope, Output};
use crate::args::{Format, MixArgs};
use crate::config::{MixSection, RunConfig};
use crate::error::CliResult;
use crate::output::{num, Csv};

const DEFAULT_OMEGA_MHZ: f64 = 30.0;
const DEFAULT_PULSE_US: f64 = 35.0;

#[derive(Serialize)]
struct Echo {
    omega_mhz: f64,
    pulse_us: f64,
    wait_us: f64,
    sample_dt_us: f64,
    flip: bool,
}

#[derive(Serialize)]
struct Raw {
    units: &'static str,
    omega: f64,
    gamma_nr: f64,
}

#[derive(Serialize)]
struct Body<'a> {
    f_achieved: f64,
    raw: Raw,
    samples: &'a [MixSample<f64>],
}

pub fn run(cfg: &RunConfig, args: &MixArgs, sec: &MixSection) -> CliResult<Output> {
    let omega = args.omega.or(sec.omega).unwrap_or(DEFAULT_OMEGA_MHZ);
    let pulse = args.pulse.or(sec.pulse).unwrap_or(DEFAULT_PULSE_US);
    let gamma_nr = TAU * cfg.gamma_nr_mhz;
    // an explicit wait wins; otherwise wait until the target f is reached
    let wait = match (args.wait.or(sec.wait), cfg.f) {
        (Some(w), _) => w,
        (None, Some(f)) => wait_time_for_f(f, gamma_nr)?,
        (None, None) => 0.0,
    };
    let mut rabi = RabiConfig::new(TAU * omega, gamma_nr, pulse, wait);
    if let Some(dt) = cfg.sample_dt_us {
        rabi.sample_dt = dt;
    }
    rabi.flip = args.flip || sec.flip.unwrap_or(false);
    rabi.rtol = cfg.rtol;
    let res = mixed_qubit(&rabi)?;

    let content = match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(&["t_us", "rho_gg", "rho_ee", "abs_rho_eg"]);
            for s in &res.samples {
                csv.line([s.t, s.rho_gg, s.rho_ee, s.abs_rho_eg].map(num));
            }
            csv.finish()
        }
        Format::Json => envelope(
            cfg,
            Echo {
                omega_mhz: omega,
                pulse_us: pulse,
                wait_us: wait,
                sample_dt_us: rabi.sample_dt,
                flip: rabi.flip,
            },
            Body {
                f_achieved: res.f_achieved,
                raw: Raw {
                    units: "rad/us",
                    omega: rabi.omega,
                    gamma_nr,
                },
                samples: &res.samples,
            },
        ),
    };
    let mut out = Output::new(content);
    out.summary = Some(format!(
        "f_achieved = {:.12} (wait {:.6} us)",
        res.f_achieved, wait
    ));
    Ok(out)
}

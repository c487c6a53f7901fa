use std::f64::consts::TAU;

use serde::Serialize;
use wgqed::states::{prepare_pw, PrepConfig};
use wgqed::DensityMatrix;

use super::{envelope, Output};
use crate::args::{Format, PrepareArgs};
use crate::config::{positive, PrepareSection, RunConfig};
use crate::error::{usage, CliResult};

const DEFAULT_G_MHZ: f64 = 10.0;

#[derive(Serialize)]
struct Echo {
    dissipative: bool,
    g_mhz: f64,
    g_bc_mhz: f64,
}

#[derive(Serialize)]
struct Matrix {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for Matrix {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let n = m.dim();
        let rows = |im: bool| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if im { m[(i, j)].im } else { m[(i, j)].re })
                        .collect()
                })
                .collect()
        };
        Self {
            re: rows(false),
            im: rows(true),
        }
    }
}

#[derive(Serialize)]
struct GateDurations {
    ab_us: f64,
    bc_us: f64,
}

#[derive(Serialize)]
struct Raw {
    units: &'static str,
    g: f64,
    g_bc: f64,
    gamma_nr: f64,
}

#[derive(Serialize)]
struct Body {
    rho1: Matrix,
    rho2: Matrix,
    rho3: Matrix,
    rho_out: Matrix,
    fidelity: f64,
    gate_durations: Option<GateDurations>,
    raw: Raw,
}

pub fn run(cfg: &RunConfig, args: &PrepareArgs, sec: &PrepareSection) -> CliResult<Output> {
    if cfg.format == Format::Csv {
        return Err(usage("prepare writes JSON only"));
    }
    let f = cfg.require_f()?;
    let dissipative = args.dissipative || sec.dissipative.unwrap_or(false);
    let g = args.g.or(sec.g).unwrap_or(DEFAULT_G_MHZ);
    let g_bc = args.g_bc.or(sec.g_bc).unwrap_or(DEFAULT_G_MHZ);
    positive("--g", g, false)?;
    positive("--g-bc", g_bc, false)?;

    let mut prep = if dissipative {
        PrepConfig::dissipative(f)
    } else {
        PrepConfig::exact(f)
    };
    prep.g_strength = TAU * g;
    prep.g_bc_strength = TAU * g_bc;
    prep.gamma_nr = TAU * cfg.gamma_nr_mhz;
    prep.rtol = cfg.rtol;
    let res = prepare_pw(&prep)?;

    let body = Body {
        rho1: (&res.rho1).into(),
        rho2: (&res.rho2).into(),
        rho3: (&res.rho3).into(),
        rho_out: (&res.rho_out).into(),
        fidelity: res.fidelity,
        gate_durations: res
            .gate_durations
            .map(|(ab_us, bc_us)| GateDurations { ab_us, bc_us }),
        raw: Raw {
            units: "rad/us",
            g: prep.g_strength,
            g_bc: prep.g_bc_strength,
            gamma_nr: prep.gamma_nr,
        },
    };
    let mut out = Output::new(envelope(
        cfg,
        Echo {
            dissipative,
            g_mhz: g,
            g_bc_mhz: g_bc,
        },
        body,
    ));
    out.summary = Some(format!("fidelity = {:.12}", res.fidelity));
    Ok(out)
}

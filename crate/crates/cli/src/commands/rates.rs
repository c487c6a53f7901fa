use std::f64::consts::TAU;

use serde::Serialize;
use wgqed::model::derive_rates;
use wgqed::{DerivedRates, WaveguideParams};

use super::{envelope, Output};
use crate::args::{Format, RatesArgs};
use crate::config::{parse_range, RatesSection, RunConfig};
use crate::error::CliResult;
use crate::output::{num, Csv};

const DEFAULT_RANGE: &str = "1:3:0.01";

/// Rates divided by `scale`: 2π for MHz, 1 for rad/µs. `phi` stays in radians.
#[derive(Clone, Debug, Serialize)]
pub struct RateRow {
    pub lambda_ratio: f64,
    pub phi: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_col: f64,
    pub g_x: f64,
    pub delta_omega_1: f64,
    pub delta_omega_2: f64,
}

impl RateRow {
    pub fn new(lambda_ratio: f64, r: &DerivedRates, scale: f64) -> Self {
        Self {
            lambda_ratio,
            phi: r.phi,
            gamma_a: r.gamma_a / scale,
            gamma_b: r.gamma_b / scale,
            gamma_col: r.gamma_col / scale,
            g_x: r.g_x / scale,
            delta_omega_1: r.delta_omega_1 / scale,
            delta_omega_2: r.delta_omega_2 / scale,
        }
    }

    pub fn mhz(lambda_ratio: f64, r: &DerivedRates) -> Self {
        Self::new(lambda_ratio, r, TAU)
    }
}

#[derive(Serialize)]
struct Echo<'a> {
    lambda_ratios: &'a [f64],
}

#[derive(Serialize)]
struct Raw {
    units: &'static str,
    rows: Vec<RateRow>,
}

#[derive(Serialize)]
struct Body {
    units: &'static str,
    rows: Vec<RateRow>,
    raw: Raw,
}

pub fn run(cfg: &RunConfig, args: &RatesArgs, sec: &RatesSection) -> CliResult<Output> {
    let ratios = match (
        args.range.as_deref().or(sec.range.as_deref()),
        cfg.lambda_ratio,
    ) {
        (Some(range), _) => parse_range(range)?,
        (None, Some(x)) => vec![x],
        (None, None) => parse_range(DEFAULT_RANGE)?,
    };
    let mut rows = Vec::with_capacity(ratios.len());
    let mut raw = Vec::with_capacity(ratios.len());
    for &x in &ratios {
        let r = derive_rates(&WaveguideParams::from_mhz(
            cfg.gamma_mhz,
            cfg.gamma_nr_mhz,
            x,
        )?)?;
        rows.push(RateRow::mhz(x, &r));
        raw.push(RateRow::new(x, &r, 1.0));
    }
    let content = match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "lambda_ratio",
                "phi_rad",
                "gamma_a_mhz",
                "gamma_b_mhz",
                "gamma_col_mhz",
                "g_x_mhz",
                "delta_omega_1_mhz",
                "delta_omega_2_mhz",
            ]);
            for r in &rows {
                csv.line(
                    [
                        r.lambda_ratio,
                        r.phi,
                        r.gamma_a,
                        r.gamma_b,
                        r.gamma_col,
                        r.g_x,
                        r.delta_omega_1,
                        r.delta_omega_2,
                    ]
                    .map(num),
                );
            }
            csv.finish()
        }
        Format::Json => envelope(
            cfg,
            Echo {
                lambda_ratios: &ratios,
            },
            Body {
                units: "MHz (rate / 2π); phi in rad",
                rows,
                raw: Raw {
                    units: "rad/us",
                    rows: raw,
                },
            },
        ),
    };
    Ok(Output::new(content))
}

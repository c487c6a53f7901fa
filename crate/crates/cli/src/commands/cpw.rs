use std::f64::consts::TAU;

use serde::Serialize;
use wgqed::cpwcalc::{cpw_derive, lambda_ratio_for_freq, wavelength, DEFAULT_X2_MM};
use wgqed::CpwGeometry;

use super::{envelope, Output};
use crate::args::{CpwArgs, Format};
use crate::config::{CpwSection, RunConfig};
use crate::error::CliResult;
use crate::output::{num, Csv};

#[derive(Serialize)]
struct Echo<'a> {
    width_um: f64,
    gap_um: f64,
    eps_r: f64,
    freq_ghz: &'a [f64],
    x2_mm: f64,
}

#[derive(Serialize)]
struct Wave {
    freq_ghz: f64,
    lambda_mm: f64,
    lambda_ratio: f64,
}

#[derive(Serialize)]
struct Body {
    z0_ohm: f64,
    eps_eff: f64,
    v_ph_m_per_s: f64,
    wavelengths: Vec<Wave>,
}

pub fn run(cfg: &RunConfig, args: &CpwArgs, sec: &CpwSection) -> CliResult<Output> {
    let width = args.width.or(sec.width).unwrap_or(20.0);
    let gap = args.gap.or(sec.gap).unwrap_or(8.0);
    let eps_r = args.eps_r.or(sec.eps_r).unwrap_or(9.8);
    let x2 = args.x2.or(sec.x2).unwrap_or(DEFAULT_X2_MM);
    let freqs = if args.freq.is_empty() {
        sec.freq.clone().unwrap_or_default()
    } else {
        args.freq.clone()
    };

    let geom = CpwGeometry::new(width, gap, eps_r)?;
    let d = cpw_derive(&geom)?;
    let waves = freqs
        .iter()
        .map(|&freq| {
            Ok(Wave {
                freq_ghz: freq,
                lambda_mm: wavelength(TAU * freq * 1e9, d.v_ph)? * 1e3,
                lambda_ratio: lambda_ratio_for_freq(freq, &geom, x2)?,
            })
        })
        .collect::<wgqed::Result<Vec<_>>>()?;

    let content = match cfg.format {
        Format::Csv if waves.is_empty() => {
            let mut csv = Csv::new(&["z0_ohm", "eps_eff", "v_ph_m_per_s"]);
            csv.line([d.z0, d.eps_eff, d.v_ph].map(num));
            csv.finish()
        }
        Format::Csv => {
            let mut csv = Csv::new(&[
                "z0_ohm",
                "eps_eff",
                "v_ph_m_per_s",
                "freq_ghz",
                "lambda_mm",
                "lambda_ratio",
            ]);
            for w in &waves {
                csv.line(
                    [
                        d.z0,
                        d.eps_eff,
                        d.v_ph,
                        w.freq_ghz,
                        w.lambda_mm,
                        w.lambda_ratio,
                    ]
                    .map(num),
                );
            }
            csv.finish()
        }
        Format::Json => envelope(
            cfg,
            Echo {
                width_um: width,
                gap_um: gap,
                eps_r,
                freq_ghz: &freqs,
                x2_mm: x2,
            },
            Body {
                z0_ohm: d.z0,
                eps_eff: d.eps_eff,
                v_ph_m_per_s: d.v_ph,
                wavelengths: waves,
            },
        ),
    };
    Ok(Output::new(content))
}

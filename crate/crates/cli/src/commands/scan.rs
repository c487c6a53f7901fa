use rayon::prelude::*;
use serde::Serialize;
use wgqed::entangle::{esd_run, EsdOptions};
use wgqed::WaveguideParams;

use super::{envelope, Output};
use crate::args::{Format, ScanArgs};
use crate::config::{parse_list, parse_range, RunConfig, ScanSection};
use crate::error::{model_exit_code, usage, CliError, CliResult};
use crate::output::{flag, num, opt_num, text, Csv};

#[derive(Serialize)]
struct Echo<'a> {
    f_values: &'a [f64],
    lambda_ratios: &'a [f64],
}

#[derive(Clone, Debug, Serialize)]
struct Cell {
    f: f64,
    lambda_ratio: f64,
    #[serde(rename = "C_initial")]
    c_initial: Option<f64>,
    died: bool,
    revived: bool,
    t_death: Option<f64>,
    t_revival: Option<f64>,
    #[serde(rename = "C_final")]
    c_final: Option<f64>,
    status: String,
    #[serde(skip)]
    exit_code: u8,
}

fn run_cell(cfg: &RunConfig, f: f64, lambda_ratio: f64) -> Cell {
    let result =
        WaveguideParams::from_mhz(cfg.gamma_mhz, cfg.gamma_nr_mhz, lambda_ratio).and_then(|p| {
            let opts = EsdOptions {
                t_max: cfg.t_max_us,
                sample_dt: cfg.sample_dt_us,
                rtol: cfg.rtol,
                ..EsdOptions::default()
            };
            esd_run(cfg.state, f, &p, &opts)
        });
    match result {
        Ok((traj, rep)) => Cell {
            f,
            lambda_ratio,
            c_initial: traj.concurrence.first().copied(),
            died: rep.died(),
            revived: rep.revived(),
            t_death: rep.death_times.first().copied(),
            t_revival: rep.revival_times.first().copied(),
            c_final: Some(rep.final_concurrence),
            status: "ok".into(),
            exit_code: 0,
        },
        Err(e) => {
            log::warn!("cell f = {f}, lambda_ratio = {lambda_ratio} failed: {e}");
            Cell {
                f,
                lambda_ratio,
                c_initial: None,
                died: false,
                revived: false,
                t_death: None,
                t_revival: None,
                c_final: None,
                status: format!("error: {e}"),
                exit_code: model_exit_code(&e),
            }
        }
    }
}

pub fn run(cfg: &RunConfig, args: &ScanArgs, sec: &ScanSection) -> CliResult<Output> {
    let f_values = match (args.f_range.as_deref(), args.f_values.as_deref()) {
        (Some(_), Some(_)) => return Err(usage("give either --f-range or --f-values, not both")),
        (Some(r), None) => parse_range(r)?,
        (None, Some(list)) => parse_list(list)?,
        (None, None) => match (sec.f_range.as_deref(), &sec.f_values, cfg.f) {
            (Some(r), _, _) => parse_range(r)?,
            (None, Some(v), _) => v.clone(),
            (None, None, Some(f)) => vec![f],
            (None, None, None) => return Err(usage("scan needs --f-range, --f-values or --f")),
        },
    };
    let lambda_ratios = match (
        args.lambda_ratios.as_deref(),
        &sec.lambda_ratios,
        cfg.lambda_ratio,
    ) {
        (Some(list), _, _) => parse_list(list)?,
        (None, Some(v), _) => v.clone(),
        (None, None, Some(x)) => vec![x],
        (None, None, None) => return Err(usage("scan needs --lambda-ratios or --lambda-ratio")),
    };

    let grid: Vec<(f64, f64)> = f_values
        .iter()
        .flat_map(|&f| lambda_ratios.iter().map(move |&x| (f, x)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| usage(format!("cannot start {} workers: {e}", cfg.jobs)))?;
    let cells: Vec<Cell> =
        pool.install(|| grid.par_iter().map(|&(f, x)| run_cell(cfg, f, x)).collect());

    let failed: Vec<&Cell> = cells.iter().filter(|c| c.exit_code != 0).collect();
    let deferred = (!failed.is_empty()).then(|| CliError::CellsFailed {
        failed: failed.len(),
        total: cells.len(),
        code: failed.iter().map(|c| c.exit_code).max().unwrap_or(3),
    });

    let content = match cfg.format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "f",
                "lambda_ratio",
                "C_initial",
                "died",
                "revived",
                "t_death",
                "t_revival",
                "C_final",
                "status",
            ]);
            for c in &cells {
                csv.line([
                    num(c.f),
                    num(c.lambda_ratio),
                    opt_num(c.c_initial),
                    flag(c.died),
                    flag(c.revived),
                    opt_num(c.t_death),
                    opt_num(c.t_revival),
                    opt_num(c.c_final),
                    text(&c.status),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                cells: &'a [Cell],
            }
            envelope(
                cfg,
                Echo {
                    f_values: &f_values,
                    lambda_ratios: &lambda_ratios,
                },
                Body { cells: &cells },
            )
        }
    };
    Ok(Output {
        content,
        summary: Some(format!("{} cells, {} failed", cells.len(), failed.len())),
        deferred,
    })
}

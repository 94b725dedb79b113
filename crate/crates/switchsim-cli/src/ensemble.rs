//! Ensemble driver: runs every configured switching law over `n_realizations`
//! independent trajectories, aggregates per-time statistics, and renders the
//! CSV summary plus a TOML sidecar describing provenance.
//!
//! Output bytes depend only on the configuration and master seed, not on the
//! worker count: each trajectory draws from its own counter-derived stream,
//! results are collected in index order, and the reductions run in a fixed
//! order with compensated summation.

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

use switchsim::{simulate_pair, TrajectoryRecord};

use crate::error::{CliError, Result};
use crate::scenario::Experiment;

/// Per-law ensemble statistics, one entry per recorded time.
pub struct LawSeries {
    pub law: String,
    pub mean_dist: Vec<f64>,
    pub std_dist: Vec<f64>,
    pub mean_v: Vec<f64>,
    pub std_v: Vec<f64>,
    pub mean_residual: Vec<f64>,
    pub mean_est_gap: Vec<f64>,
    pub mean_meas_gap_abs: Vec<f64>,
}

pub struct EnsembleSummary {
    pub times: Vec<f64>,
    pub laws: Vec<LawSeries>,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub version: &'static str,
    pub config_sha256: String,
    pub config_text: String,
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in values {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Two-pass mean and population standard deviation at every time index.
fn series_stats<F>(records: &[TrajectoryRecord], len: usize, pick: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&TrajectoryRecord, usize) -> f64,
{
    let n = records.len() as f64;
    let mut mean = Vec::with_capacity(len);
    let mut std = Vec::with_capacity(len);
    for k in 0..len {
        let m = kahan_sum(records.iter().map(|r| pick(r, k))) / n;
        let var = kahan_sum(records.iter().map(|r| {
            let d = pick(r, k) - m;
            d * d
        })) / n;
        mean.push(m);
        std.push(var.max(0.0).sqrt());
    }
    (mean, std)
}

fn run_law(exp: &Experiment, law_idx: usize) -> Result<(Vec<f64>, LawSeries)> {
    let (label, law) = &exp.laws[law_idx];
    let records: Vec<TrajectoryRecord> = (0..exp.n_realizations)
        .into_par_iter()
        .map(|i| {
            let stream = ((law_idx as u64) << 40) | i as u64;
            simulate_pair(
                &exp.gens,
                law,
                &exp.cert,
                &exp.rho0_true,
                &exp.rho0_est,
                exp.n_steps,
                &exp.step_cfg,
                exp.master_seed,
                stream,
                false,
            )
            .map_err(|source| CliError::Trajectory {
                law: label.clone(),
                trajectory: i,
                source,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let len = exp.n_steps + 1;
    let times = records[0].times.clone();
    let (mean_dist, std_dist) = series_stats(&records, len, |r, k| r.dist_true[k]);
    let (mean_v, std_v) = series_stats(&records, len, |r, k| r.v_true[k]);
    let (mean_residual, _) = series_stats(&records, len, |r, k| r.residual_true[k]);
    let (mean_est_gap, _) = series_stats(&records, len, |r, k| r.est_gap[k]);
    let (mean_meas_gap_abs, _) = series_stats(&records, len, |r, k| r.meas_gap[k].abs());
    Ok((
        times,
        LawSeries {
            law: label.clone(),
            mean_dist,
            std_dist,
            mean_v,
            std_v,
            mean_residual,
            mean_est_gap,
            mean_meas_gap_abs,
        },
    ))
}

fn run_all(exp: &Experiment) -> Result<EnsembleSummary> {
    let mut times = Vec::new();
    let mut laws = Vec::with_capacity(exp.laws.len());
    for law_idx in 0..exp.laws.len() {
        let (t, series) = run_law(exp, law_idx)?;
        times = t;
        laws.push(series);
    }
    let mut hasher = Sha256::new();
    hasher.update(exp.config_text.as_bytes());
    let config_sha256: String = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    Ok(EnsembleSummary {
        times,
        laws,
        n_realizations: exp.n_realizations,
        master_seed: exp.master_seed,
        version: env!("CARGO_PKG_VERSION"),
        config_sha256,
        config_text: exp.config_text.clone(),
    })
}

/// Runs the full ensemble, optionally on a private pool with a fixed worker
/// count. Identical output regardless of `workers`.
pub fn run_ensemble(exp: &Experiment, workers: Option<usize>) -> Result<EnsembleSummary> {
    match workers {
        Some(w) => {
            if w == 0 {
                return Err(CliError::Field {
                    field: "workers",
                    reason: "must be at least 1".to_string(),
                });
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Config {
                    reason: format!("thread pool: {e}"),
                })?;
            pool.install(|| run_all(exp))
        }
        None => run_all(exp),
    }
}

/// Time-major CSV: for each time, one row per law in configured order.
/// Floats use shortest round-trip formatting.
pub fn render_csv(summary: &EnsembleSummary) -> String {
    let mut out = String::from("t,law,mean_dist,std_dist,mean_v,std_v\n");
    for (k, t) in summary.times.iter().enumerate() {
        for law in &summary.laws {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t, law.law, law.mean_dist[k], law.std_dist[k], law.mean_v[k], law.std_v[k]
            )
            .expect("string write");
        }
    }
    out
}

pub fn render_meta(summary: &EnsembleSummary) -> String {
    format!(
        "config_sha256 = \"{}\"\nmaster_seed = {}\nn_realizations = {}\nversion = \"{}\"\nconfig = '''\n{}'''\n",
        summary.config_sha256,
        summary.master_seed,
        summary.n_realizations,
        summary.version,
        summary.config_text,
    )
}

/// Writes `path` (CSV) and `path.meta.toml` (provenance sidecar).
pub fn write_summary(summary: &EnsembleSummary, path: &Path) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::write(path, render_csv(summary)).map_err(io_err)?;
    let meta_path = format!("{}.meta.toml", path.display());
    std::fs::write(&meta_path, render_meta(summary)).map_err(|source| CliError::Io {
        path: meta_path.clone(),
        source,
    })?;
    Ok(())
}

//! Command executors. Everything here is a pure function of the resolved
//! `CommandSpec`, which is what makes manifest re-runs byte-identical.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use lmsf_core::channel::{gen_sparse_channel, snr_to_noise_var};
use lmsf_core::experiment::{
    compare_algorithms, steady_state_estimate, sweep_regularization, sweep_reweight,
    trial_stream_rng, ExperimentConfig, MseCurve, RhoSweepTarget, StreamKind, SweepResult,
};
use lmsf_core::filters::AlgoParams;
use lmsf_core::theory::{
    lms_steady_mse, lmsf_steady_mse, oracle_steady_mse, za_steady_mse_bound, SteadyStateInput,
    TheoryError, DEFAULT_FIXED_POINT_MAX_ITER, DEFAULT_FIXED_POINT_TOL,
};

use crate::emit::{fmt_sig, to_db, write_json, CsvWriter};
use crate::manifest::{CommandSpec, SweepTarget, TheoryBase, TheoryParam};

pub fn execute(spec: &CommandSpec, out_dir: &Path) -> Result<Vec<String>> {
    match spec {
        CommandSpec::Compare {
            config,
            tail_fraction,
        } => run_compare(config, *tail_fraction, out_dir),
        CommandSpec::Sweep {
            config,
            target,
            grid,
            tail_fraction,
        } => run_sweep(config, *target, grid, *tail_fraction, out_dir),
        CommandSpec::Theory { base, param, grid } => run_theory(base, *param, grid, out_dir),
        CommandSpec::Channel {
            n,
            k,
            seed,
            preset,
            normalize,
        } => run_channel(*n, *k, *seed, preset.as_deref(), *normalize, out_dir),
    }
}

// ---- compare ---------------------------------------------------------

#[derive(Serialize)]
struct AlgoSteady {
    algo: String,
    steady_mse: f64,
    steady_mse_db: f64,
    curve_file: String,
}

#[derive(Serialize)]
struct TheoryOverlay {
    sigma_x_sq: f64,
    sigma_n_sq: f64,
    beta_inf: Option<f64>,
    sigma_e_sq_inf: Option<f64>,
    d_lms: Option<f64>,
    d_lmsf: Option<f64>,
    d_orc: Option<f64>,
    d_za_bound: Option<f64>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct CompareSummary<'a> {
    config: &'a ExperimentConfig,
    config_digest: String,
    master_seed: u64,
    tail_fraction: f64,
    steady_state_mse: Vec<AlgoSteady>,
    theory: TheoryOverlay,
}

fn write_curve(path: &Path, curve: &MseCurve) -> Result<()> {
    let mut csv = CsvWriter::create(path, &["iteration", "mse", "mse_db"])?;
    for (i, &v) in curve.values.iter().enumerate() {
        csv.row(&[i.to_string(), fmt_sig(v), fmt_sig(to_db(v))])?;
    }
    csv.finish()
}

fn theory_overlay(config: &ExperimentConfig) -> TheoryOverlay {
    let sigma_x_sq = config.signal.power;
    let sigma_n_sq = config.noise_variance();
    let mut overlay = TheoryOverlay {
        sigma_x_sq,
        sigma_n_sq,
        beta_inf: None,
        sigma_e_sq_inf: None,
        d_lms: None,
        d_lmsf: None,
        d_orc: None,
        d_za_bound: None,
        notes: Vec::new(),
    };
    let mu_s = config.algos.iter().find_map(|a| match a {
        AlgoParams::Lms(p) => Some(p.mu_s),
        _ => None,
    });
    match mu_s {
        Some(mu_s) => match lms_steady_mse(mu_s, config.n_len, sigma_n_sq, sigma_x_sq) {
            Ok(d) => overlay.d_lms = Some(d),
            Err(e) => overlay.notes.push(format!("d_lms: {e}")),
        },
        None => overlay.notes.push("d_lms: no lms entry configured".into()),
    }
    let lmsf = config.algos.iter().find_map(|a| match a {
        AlgoParams::Lmsf(p) => Some(*p),
        _ => None,
    });
    let gamma_za = config
        .algos
        .iter()
        .find_map(|a| match a {
            AlgoParams::ZaLmsf(p) => Some(p.gamma()),
            _ => None,
        })
        .unwrap_or(0.0);
    match lmsf {
        Some(p) => {
            let input = SteadyStateInput {
                mu: p.mu,
                lambda: p.lambda,
                n_len: config.n_len,
                k_sparsity: config.k_sparsity,
                sigma_x_sq,
                sigma_n_sq,
                gamma_za,
            };
            match lmsf_steady_mse(
                &input,
                DEFAULT_FIXED_POINT_TOL,
                DEFAULT_FIXED_POINT_MAX_ITER,
            ) {
                Ok(report) => {
                    overlay.beta_inf = Some(report.beta_inf);
                    overlay.sigma_e_sq_inf = Some(report.sigma_e_sq_inf);
                    overlay.d_lmsf = Some(report.d_predicted);
                    match oracle_steady_mse(&input) {
                        Ok(d) => overlay.d_orc = Some(d),
                        Err(e) => overlay.notes.push(format!("d_orc: {e}")),
                    }
                    match za_steady_mse_bound(&input) {
                        Ok(d) => overlay.d_za_bound = Some(d),
                        Err(e) => overlay.notes.push(format!("d_za_bound: {e}")),
                    }
                }
                Err(e) => overlay.notes.push(format!("d_lmsf: {e}")),
            }
        }
        None => overlay
            .notes
            .push("d_lmsf: no lmsf entry configured".into()),
    }
    overlay
}

fn run_compare(
    config: &ExperimentConfig,
    tail_fraction: f64,
    out_dir: &Path,
) -> Result<Vec<String>> {
    let curves = compare_algorithms(config).context("comparison failed")?;
    let mut outputs = Vec::new();
    let mut steady = Vec::new();
    for curve in &curves {
        let file = format!("compare_{}.csv", curve.algo_label);
        write_curve(&out_dir.join(&file), curve)?;
        let mse = steady_state_estimate(curve, tail_fraction)?;
        steady.push(AlgoSteady {
            algo: curve.algo_label.clone(),
            steady_mse: mse,
            steady_mse_db: to_db(mse),
            curve_file: file.clone(),
        });
        outputs.push(file);
    }
    let summary = CompareSummary {
        config,
        config_digest: config.digest(),
        master_seed: config.master_seed,
        tail_fraction,
        steady_state_mse: steady,
        theory: theory_overlay(config),
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    outputs.push("summary.json".into());
    Ok(outputs)
}

// ---- sweep -----------------------------------------------------------

#[derive(Serialize)]
struct SweepSummary<'a> {
    config: &'a ExperimentConfig,
    config_digest: String,
    master_seed: u64,
    target: SweepTarget,
    tail_fraction: f64,
    grid: &'a [f64],
    steady_mse: &'a [f64],
    argmin_index: usize,
    argmin_value: f64,
    min_mse: f64,
    table_file: String,
}

fn run_sweep(
    config: &ExperimentConfig,
    target: SweepTarget,
    grid: &[f64],
    tail_fraction: f64,
    out_dir: &Path,
) -> Result<Vec<String>> {
    let result: SweepResult = match target {
        SweepTarget::RhoZa => {
            sweep_regularization(config, RhoSweepTarget::ZaLmsf, grid, tail_fraction)?
        }
        SweepTarget::RhoRza => {
            sweep_regularization(config, RhoSweepTarget::RzaLmsf, grid, tail_fraction)?
        }
        SweepTarget::Epsilon => sweep_reweight(config, grid, tail_fraction)?,
    };
    let file = format!("sweep_{}.csv", target.file_stem());
    let mut csv = CsvWriter::create(
        &out_dir.join(&file),
        &[target.column(), "steady_mse", "steady_mse_db"],
    )?;
    for (value, mse) in result.grid.iter().zip(result.steady_mse.iter()) {
        csv.row(&[fmt_sig(*value), fmt_sig(*mse), fmt_sig(to_db(*mse))])?;
    }
    csv.finish()?;
    let summary = SweepSummary {
        config,
        config_digest: config.digest(),
        master_seed: config.master_seed,
        target,
        tail_fraction,
        grid: &result.grid,
        steady_mse: &result.steady_mse,
        argmin_index: result.argmin_index,
        argmin_value: result.argmin_value(),
        min_mse: result.min_mse(),
        table_file: file.clone(),
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(vec![file, "summary.json".into()])
}

// ---- theory ----------------------------------------------------------

struct TheoryRow {
    beta_inf: f64,
    sigma_e_sq_inf: f64,
    d_lms: f64,
    d_lmsf: f64,
    d_orc: f64,
    d_za_bound: f64,
    status: String,
}

fn error_tag(e: &TheoryError) -> &'static str {
    match e {
        TheoryError::Unstable { .. } => "unstable",
        TheoryError::SparsityExceedsLength { .. } | TheoryError::ZeroLength => "invalid-shape",
        _ => "error",
    }
}

fn theory_row(base: &TheoryBase, param: TheoryParam, value: f64) -> TheoryRow {
    let mut b = *base;
    match param {
        TheoryParam::Lambda => b.lambda = value,
        TheoryParam::Mu => b.mu = value,
        TheoryParam::MuS => b.mu_s = value,
        TheoryParam::GammaZa => b.gamma_za = value,
        TheoryParam::SnrDb => b.sigma_n_sq = snr_to_noise_var(value, b.sigma_x_sq),
        TheoryParam::K => b.k = value.round().max(0.0) as usize,
        TheoryParam::N => b.n = value.round().max(0.0) as usize,
    }
    let mut row = TheoryRow {
        beta_inf: f64::NAN,
        sigma_e_sq_inf: f64::NAN,
        d_lms: f64::NAN,
        d_lmsf: f64::NAN,
        d_orc: f64::NAN,
        d_za_bound: f64::NAN,
        status: String::new(),
    };
    let mut issues: Vec<String> = Vec::new();
    match lms_steady_mse(b.mu_s, b.n, b.sigma_n_sq, b.sigma_x_sq) {
        Ok(d) => row.d_lms = d,
        Err(e) => issues.push(format!("d_lms:{}", error_tag(&e))),
    }
    let input = SteadyStateInput {
        mu: b.mu,
        lambda: b.lambda,
        n_len: b.n,
        k_sparsity: b.k,
        sigma_x_sq: b.sigma_x_sq,
        sigma_n_sq: b.sigma_n_sq,
        gamma_za: b.gamma_za,
    };
    match lmsf_steady_mse(
        &input,
        DEFAULT_FIXED_POINT_TOL,
        DEFAULT_FIXED_POINT_MAX_ITER,
    ) {
        Ok(report) => {
            row.beta_inf = report.beta_inf;
            row.sigma_e_sq_inf = report.sigma_e_sq_inf;
            row.d_lmsf = report.d_predicted;
            match oracle_steady_mse(&input) {
                Ok(d) => row.d_orc = d,
                Err(e) => issues.push(format!("d_orc:{}", error_tag(&e))),
            }
            match za_steady_mse_bound(&input) {
                Ok(d) => row.d_za_bound = d,
                Err(e) => issues.push(format!("d_za_bound:{}", error_tag(&e))),
            }
        }
        Err(e) => issues.push(format!("d_lmsf:{}", error_tag(&e))),
    }
    row.status = if issues.is_empty() {
        "ok".to_string()
    } else {
        issues.join(";")
    };
    row
}

fn run_theory(
    base: &TheoryBase,
    param: TheoryParam,
    grid: &[f64],
    out_dir: &Path,
) -> Result<Vec<String>> {
    let file = format!("theory_{}.csv", param.column());
    let mut csv = CsvWriter::create(
        &out_dir.join(&file),
        &[
            param.column(),
            "beta_inf",
            "sigma_e_sq_inf",
            "d_lms",
            "d_lmsf",
            "d_orc",
            "d_za_bound",
            "status",
        ],
    )?;
    for &value in grid {
        let row = theory_row(base, param, value);
        csv.row(&[
            fmt_sig(value),
            fmt_sig(row.beta_inf),
            fmt_sig(row.sigma_e_sq_inf),
            fmt_sig(row.d_lms),
            fmt_sig(row.d_lmsf),
            fmt_sig(row.d_orc),
            fmt_sig(row.d_za_bound),
            row.status,
        ])?;
    }
    csv.finish()?;
    Ok(vec![file])
}

// ---- channel ---------------------------------------------------------

#[derive(Serialize)]
struct ChannelSummary {
    n: usize,
    k: usize,
    seed: u64,
    preset: Option<String>,
    normalize: bool,
    support: Vec<usize>,
    norm_sq: f64,
    stem_file: String,
}

fn run_channel(
    n: usize,
    k: usize,
    seed: u64,
    preset: Option<&str>,
    normalize: bool,
    out_dir: &Path,
) -> Result<Vec<String>> {
    // trial 0 of an experiment with the same master seed sees this channel
    let mut rng = trial_stream_rng(seed, 0, StreamKind::Channel);
    let mut channel = gen_sparse_channel(n, k, &mut rng)?;
    if normalize {
        channel.normalize_unit_norm();
    }
    let file = "channel.csv".to_string();
    let mut csv = CsvWriter::create(&out_dir.join(&file), &["index", "value"])?;
    for (i, &v) in channel.taps().iter().enumerate() {
        csv.row(&[i.to_string(), fmt_sig(v)])?;
    }
    csv.finish()?;
    let summary = ChannelSummary {
        n,
        k,
        seed,
        preset: preset.map(str::to_string),
        normalize,
        support: channel.support().to_vec(),
        norm_sq: channel.taps().norm_sq(),
        stem_file: file.clone(),
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(vec![file, "summary.json".into()])
}

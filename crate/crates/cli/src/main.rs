mod args;
mod commands;
mod config;
mod emit;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{
    ChannelArgs, Cli, Command, CompareArgs, PresetArg, RerunArgs, SweepArgs, SweepTargetArg,
    TheoryArgs, TheoryParamArg,
};
use commands::execute;
use config::{resolve, Params};
use manifest::{CommandSpec, Manifest, SweepTarget, TheoryBase, TheoryParam};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compare(CompareArgs { common }) => {
            let p = resolve(&common)?;
            let spec = CommandSpec::Compare {
                config: p.compare_config(),
                tail_fraction: p.tail_fraction,
            };
            run_spec(spec, &p.out, p.threads)
        }
        Command::Sweep(sweep_args) => {
            let p = resolve(&sweep_args.common)?;
            let (target, grid) = resolve_sweep(&sweep_args, &p)?;
            let template = match target {
                SweepTarget::RhoZa => p.za_lmsf(),
                SweepTarget::RhoRza | SweepTarget::Epsilon => p.rza_lmsf(),
            };
            let spec = CommandSpec::Sweep {
                config: p.sweep_config(template),
                target,
                grid,
                tail_fraction: p.tail_fraction,
            };
            run_spec(spec, &p.out, p.threads)
        }
        Command::Theory(theory_args) => {
            let p = resolve(&theory_args.common)?;
            let param = theory_param(theory_args.param);
            let grid = resolve_theory_grid(&theory_args, param, &p)?;
            let spec = CommandSpec::Theory {
                base: TheoryBase {
                    mu: p.mu,
                    mu_s: p.mu_s,
                    lambda: p.lambda,
                    n: p.n,
                    k: p.k,
                    sigma_x_sq: p.signal_power,
                    sigma_n_sq: p.noise_variance(),
                    gamma_za: p.mu * p.rho_za,
                },
                param,
                grid,
            };
            run_spec(spec, &p.out, p.threads)
        }
        Command::Channel(ChannelArgs { common, preset }) => {
            let p = resolve(&common)?;
            let (n, k, preset_name) = match preset {
                Some(PresetArg::VehicularB) => (
                    lmsf_core::channel::VEHICULAR_B_LENGTH,
                    lmsf_core::channel::VEHICULAR_B_SPARSITY,
                    Some("vehicular-b".to_string()),
                ),
                None => (p.n, p.k, None),
            };
            let spec = CommandSpec::Channel {
                n,
                k,
                seed: p.seed,
                preset: preset_name,
                normalize: p.normalize_channel,
            };
            run_spec(spec, &p.out, p.threads)
        }
        Command::Rerun(RerunArgs {
            manifest,
            out,
            threads,
        }) => {
            let loaded = Manifest::load(&manifest)?;
            let out_dir = match out {
                Some(dir) => dir,
                None => manifest
                    .parent()
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| PathBuf::from(".")),
            };
            run_spec(loaded.command, &out_dir, threads)
        }
    }
}

fn run_spec(spec: CommandSpec, out_dir: &Path, threads: Option<usize>) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let started = Instant::now();
    let outputs = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("cannot build worker pool")?
            .install(|| execute(&spec, out_dir)),
        None => execute(&spec, out_dir),
    }?;
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: spec.master_seed(),
        command: spec,
        outputs: outputs.clone(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    manifest.save(&out_dir.join("manifest.json"))?;
    for file in &outputs {
        println!("wrote {}", out_dir.join(file).display());
    }
    println!("wrote {}", out_dir.join("manifest.json").display());
    Ok(())
}

fn theory_param(arg: TheoryParamArg) -> TheoryParam {
    match arg {
        TheoryParamArg::Lambda => TheoryParam::Lambda,
        TheoryParamArg::Mu => TheoryParam::Mu,
        TheoryParamArg::MuS => TheoryParam::MuS,
        TheoryParamArg::GammaZa => TheoryParam::GammaZa,
        TheoryParamArg::SnrDb => TheoryParam::SnrDb,
        TheoryParamArg::K => TheoryParam::K,
        TheoryParamArg::N => TheoryParam::N,
    }
}

fn log_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start && count >= 2) {
        bail!("log grid needs 0 < start < stop and at least 2 points");
    }
    let (a, b) = (start.log10(), stop.log10());
    Ok((0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect())
}

fn parse_grid_log(raw: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        bail!("--grid-log expects START:STOP:COUNT, got {raw:?}");
    }
    let start: f64 = parts[0].parse().context("--grid-log START")?;
    let stop: f64 = parts[1].parse().context("--grid-log STOP")?;
    let count: usize = parts[2].parse().context("--grid-log COUNT")?;
    log_grid(start, stop, count)
}

fn resolve_sweep(args: &SweepArgs, p: &Params) -> Result<(SweepTarget, Vec<f64>)> {
    let target = match args.target {
        SweepTargetArg::RhoZa => SweepTarget::RhoZa,
        SweepTargetArg::RhoRza => SweepTarget::RhoRza,
        SweepTargetArg::Epsilon => SweepTarget::Epsilon,
    };
    let grid = match (&args.grid, &args.grid_log) {
        (Some(_), Some(_)) => bail!("--grid and --grid-log are mutually exclusive"),
        (Some(values), None) => values.clone(),
        (None, Some(raw)) => parse_grid_log(raw)?,
        (None, None) => default_sweep_grid(target)?,
    };
    if grid.is_empty() {
        bail!("sweep grid is empty");
    }
    for &v in &grid {
        match target {
            SweepTarget::RhoZa | SweepTarget::RhoRza => {
                if !(v.is_finite() && v >= 0.0) {
                    bail!("sweep grid value {v} must be non-negative");
                }
            }
            SweepTarget::Epsilon => {
                if !(v.is_finite() && v > 0.0) {
                    bail!("epsilon grid value {v} must be positive");
                }
            }
        }
    }
    let _ = p;
    Ok((target, grid))
}

fn default_sweep_grid(target: SweepTarget) -> Result<Vec<f64>> {
    match target {
        SweepTarget::RhoZa => log_grid(1e-5, 1e-2, 10),
        SweepTarget::RhoRza => log_grid(1e-3, 1.0, 10),
        SweepTarget::Epsilon => Ok(vec![1.0, 2.0, 5.0, 10.0, 20.0, 25.0, 50.0]),
    }
}

fn resolve_theory_grid(args: &TheoryArgs, param: TheoryParam, p: &Params) -> Result<Vec<f64>> {
    let grid = match (&args.grid, &args.grid_log) {
        (Some(_), Some(_)) => bail!("--grid and --grid-log are mutually exclusive"),
        (Some(values), None) => values.clone(),
        (None, Some(raw)) => parse_grid_log(raw)?,
        (None, None) => default_theory_grid(param, p)?,
    };
    if grid.is_empty() {
        bail!("theory grid is empty");
    }
    for &v in &grid {
        let ok = match param {
            TheoryParam::Lambda | TheoryParam::Mu | TheoryParam::MuS => v.is_finite() && v > 0.0,
            TheoryParam::GammaZa => v.is_finite() && v >= 0.0,
            TheoryParam::SnrDb => v.is_finite(),
            TheoryParam::K | TheoryParam::N => v.is_finite() && v >= 1.0,
        };
        if !ok {
            bail!("grid value {v} is out of range for {}", param.column());
        }
    }
    Ok(grid)
}

fn default_theory_grid(param: TheoryParam, p: &Params) -> Result<Vec<f64>> {
    match param {
        TheoryParam::Lambda => log_grid(1e-2, 1e2, 25),
        TheoryParam::Mu => log_grid(1e-3, 1e-1, 25),
        TheoryParam::MuS => log_grid(1e-3, 1e-1, 25),
        TheoryParam::GammaZa => log_grid(1e-8, 1e-2, 25),
        TheoryParam::SnrDb => Ok((0..=30).step_by(2).map(f64::from).collect()),
        TheoryParam::K => Ok((1..=p.n).map(|k| k as f64).collect()),
        TheoryParam::N => Ok([8usize, 16, 24, 32, 48, 64]
            .iter()
            .map(|&n| n as f64)
            .collect()),
    }
}

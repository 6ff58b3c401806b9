//! Reproducible Monte-Carlo harness.
//!
//! Every trial derives three named random streams (channel, signal, noise)
//! from `(master_seed, trial_index)` through a splitmix64 chain, so
//! compared algorithms see identical realizations (common random numbers)
//! and results are bitwise independent of thread count: trials may run in
//! parallel but the reduction into a curve always follows trial order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{
    gen_sparse_channel, gen_training_signal, regressor, snr_to_noise_var, ChannelError, SignalSpec,
    SparseChannel,
};
use crate::filters::{step, AlgoParams, FilterError, FilterState, RzaLmsf, ZaLmsf};

pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("trial {trial} diverged for {algo} at iteration {iteration}")]
    TrialDiverged {
        algo: &'static str,
        trial: u64,
        iteration: u64,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("curve is empty")]
    EmptyCurve,
    #[error("tail fraction {0} must lie in (0, 0.5]")]
    InvalidTailFraction(f64),
    #[error("config.algos contains no {family} entry to use as the sweep template")]
    MissingSweepTemplate { family: &'static str },
}

/// Full description of one simulation: channel shape, signal, noise level,
/// algorithms, trial counts, and the master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_len: usize,
    pub k_sparsity: usize,
    pub snr_db: f64,
    pub signal: SignalSpec,
    pub algos: Vec<AlgoParams>,
    pub num_runs: usize,
    pub num_iterations: usize,
    pub master_seed: u64,
    /// Rescale each channel realization to ‖h‖₂ = 1 instead of relying on
    /// the E‖h‖₂² = 1 expectation constraint.
    pub normalize_channel: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_len == 0 {
            return Err(ExperimentError::InvalidConfig(
                "n_len must be at least 1".into(),
            ));
        }
        if self.k_sparsity == 0 || self.k_sparsity > self.n_len {
            return Err(ExperimentError::InvalidConfig(format!(
                "k_sparsity = {} must satisfy 1 <= k <= n_len = {}",
                self.k_sparsity, self.n_len
            )));
        }
        if self.num_runs == 0 {
            return Err(ExperimentError::InvalidConfig(
                "num_runs must be at least 1".into(),
            ));
        }
        if self.num_iterations < self.n_len {
            return Err(ExperimentError::InvalidConfig(format!(
                "num_iterations = {} must be at least n_len = {}",
                self.num_iterations, self.n_len
            )));
        }
        if !(self.signal.power.is_finite() && self.signal.power > 0.0) {
            return Err(ExperimentError::InvalidConfig(format!(
                "signal power = {} must be positive",
                self.signal.power
            )));
        }
        if !self.snr_db.is_finite() {
            return Err(ExperimentError::InvalidConfig(
                "snr_db must be finite".into(),
            ));
        }
        for algo in &self.algos {
            algo.validate()
                .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        }
        Ok(())
    }

    /// Observation noise variance implied by the SNR and transmit power.
    pub fn noise_variance(&self) -> f64 {
        snr_to_noise_var(self.snr_db, self.signal.power)
    }

    /// Stable hex digest of the full config, stamped onto every curve.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", fnv1a64(canonical.as_bytes()))
    }
}

/// Monte-Carlo-averaged squared-error learning curve:
/// `values[n] = mean over runs of ‖h − h̃(n)‖₂²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseCurve {
    pub values: Vec<f64>,
    pub algo_label: String,
    pub config_digest: String,
}

/// One parameter sweep: the grid, the per-point steady-state MSE, and the
/// index of the best grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub steady_mse: Vec<f64>,
    pub argmin_index: usize,
}

impl SweepResult {
    pub fn argmin_value(&self) -> f64 {
        self.grid[self.argmin_index]
    }

    pub fn min_mse(&self) -> f64 {
        self.steady_mse[self.argmin_index]
    }
}

/// Which algorithm family a regularization sweep targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoSweepTarget {
    ZaLmsf,
    RzaLmsf,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The named random streams each trial draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Channel = 0,
    Signal = 1,
    Noise = 2,
}

/// The splittable seed derivation behind every trial: a ChaCha stream keyed
/// by a splitmix64 chain over `(master_seed, trial_index, stream)`. Public
/// so that external tools can regenerate exactly what a trial saw.
pub fn trial_stream_rng(master_seed: u64, trial: u64, stream: StreamKind) -> ChaCha12Rng {
    let seed = splitmix64(
        splitmix64(splitmix64(master_seed).wrapping_add(trial)).wrapping_add(stream as u64),
    );
    ChaCha12Rng::seed_from_u64(seed)
}

struct TrialData {
    channel: SparseChannel,
    signal: Vec<f64>,
    noise: Vec<f64>,
}

fn make_trial_data(config: &ExperimentConfig, trial: u64) -> Result<TrialData, ExperimentError> {
    let mut channel_rng = trial_stream_rng(config.master_seed, trial, StreamKind::Channel);
    let mut channel = gen_sparse_channel(config.n_len, config.k_sparsity, &mut channel_rng)?;
    if config.normalize_channel {
        channel.normalize_unit_norm();
    }
    let spec = SignalSpec {
        kind: config.signal.kind,
        length: config.num_iterations,
        power: config.signal.power,
    };
    let mut signal_rng = trial_stream_rng(config.master_seed, trial, StreamKind::Signal);
    let signal = gen_training_signal(&spec, &mut signal_rng);
    let mut noise_rng = trial_stream_rng(config.master_seed, trial, StreamKind::Noise);
    let noise_dist = Normal::new(0.0, config.noise_variance().sqrt()).expect("valid std");
    let noise = (0..config.num_iterations)
        .map(|_| noise_dist.sample(&mut noise_rng))
        .collect();
    Ok(TrialData {
        channel,
        signal,
        noise,
    })
}

fn run_filter_over(
    config: &ExperimentConfig,
    data: &TrialData,
    algo: &AlgoParams,
    trial: u64,
) -> Result<Vec<f64>, ExperimentError> {
    let mut state = FilterState::zeroed(config.n_len);
    let mut values = Vec::with_capacity(config.num_iterations);
    for t in 0..config.num_iterations {
        values.push(data.channel.taps().squared_distance(state.weights()));
        let x = regressor(&data.signal, t, config.n_len);
        let y = data.channel.taps().dot(&x) + data.noise[t];
        state = match step(&state, &x, y, algo) {
            Ok((next, _)) => next,
            Err(FilterError::Diverged { iteration }) => {
                return Err(ExperimentError::TrialDiverged {
                    algo: algo.label(),
                    trial,
                    iteration,
                })
            }
            Err(other) => return Err(other.into()),
        };
    }
    Ok(values)
}

/// Runs one trial: a fresh (channel, signal, noise) draw for
/// `(master_seed, trial_index)`, the filter from h̃(0) = 0, and the
/// squared estimation error ‖h − h̃(n)‖₂² recorded at every iteration.
pub fn run_trial(
    config: &ExperimentConfig,
    algo: &AlgoParams,
    trial_index: u64,
) -> Result<Vec<f64>, ExperimentError> {
    let data = make_trial_data(config, trial_index)?;
    run_filter_over(config, &data, algo, trial_index)
}

fn average_in_trial_order(
    trajectories: Vec<Vec<f64>>,
    num_iterations: usize,
    num_runs: usize,
) -> Vec<f64> {
    let mut sums = vec![0.0; num_iterations];
    for trajectory in &trajectories {
        for (sum, value) in sums.iter_mut().zip(trajectory.iter()) {
            *sum += value;
        }
    }
    let scale = 1.0 / num_runs as f64;
    for sum in &mut sums {
        *sum *= scale;
    }
    sums
}

/// Averages [`run_trial`] trajectories over `config.num_runs` trials.
///
/// Trials execute in parallel; the summation runs over the collected
/// results in trial order, so the curve is bitwise identical at any
/// thread count. A diverging trial aborts the whole experiment.
pub fn run_monte_carlo(
    config: &ExperimentConfig,
    algo: &AlgoParams,
) -> Result<MseCurve, ExperimentError> {
    config.validate()?;
    algo.validate()
        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
    let trajectories = (0..config.num_runs as u64)
        .into_par_iter()
        .map(|trial| run_trial(config, algo, trial))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MseCurve {
        values: average_in_trial_order(trajectories, config.num_iterations, config.num_runs),
        algo_label: algo.label().to_string(),
        config_digest: config.digest(),
    })
}

/// Runs every algorithm in `config.algos` over common random numbers: each
/// trial draws one (channel, signal, noise) realization shared by all
/// algorithms. Returns one curve per algorithm, in config order.
pub fn compare_algorithms(config: &ExperimentConfig) -> Result<Vec<MseCurve>, ExperimentError> {
    config.validate()?;
    if config.algos.is_empty() {
        return Err(ExperimentError::InvalidConfig(
            "config.algos must not be empty".into(),
        ));
    }
    let per_trial = (0..config.num_runs as u64)
        .into_par_iter()
        .map(|trial| {
            let data = make_trial_data(config, trial)?;
            config
                .algos
                .iter()
                .map(|algo| run_filter_over(config, &data, algo, trial))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let digest = config.digest();
    let mut curves = Vec::with_capacity(config.algos.len());
    for (idx, algo) in config.algos.iter().enumerate() {
        let trajectories: Vec<Vec<f64>> =
            per_trial.iter().map(|trial| trial[idx].clone()).collect();
        curves.push(MseCurve {
            values: average_in_trial_order(trajectories, config.num_iterations, config.num_runs),
            algo_label: algo.label().to_string(),
            config_digest: digest.clone(),
        });
    }
    Ok(curves)
}

/// Tail-averaged steady-state estimate: the mean of the final
/// ⌈tail_fraction·len⌉ curve values.
pub fn steady_state_estimate(curve: &MseCurve, tail_fraction: f64) -> Result<f64, ExperimentError> {
    tail_mean(&curve.values, tail_fraction)
}

/// Slice-level form of [`steady_state_estimate`].
pub fn tail_mean(values: &[f64], tail_fraction: f64) -> Result<f64, ExperimentError> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(ExperimentError::InvalidTailFraction(tail_fraction));
    }
    if values.is_empty() {
        return Err(ExperimentError::EmptyCurve);
    }
    let count = ((tail_fraction * values.len() as f64).ceil() as usize).max(1);
    let tail = &values[values.len() - count..];
    Ok(tail.iter().sum::<f64>() / count as f64)
}

/// Sweeps the regularization weight of the targeted sparse LMS/F family.
///
/// The first matching entry in `config.algos` provides the remaining
/// hyperparameters (μ, λ, ε); each grid point replaces only ρ. Reports the
/// tail-averaged steady MSE per point and the grid argmin.
pub fn sweep_regularization(
    config: &ExperimentConfig,
    target: RhoSweepTarget,
    rho_grid: &[f64],
    tail_fraction: f64,
) -> Result<SweepResult, ExperimentError> {
    if rho_grid.is_empty() {
        return Err(ExperimentError::InvalidConfig(
            "sweep grid must not be empty".into(),
        ));
    }
    let make_algo: Box<dyn Fn(f64) -> AlgoParams> = match target {
        RhoSweepTarget::ZaLmsf => {
            let template = config
                .algos
                .iter()
                .find_map(|a| match a {
                    AlgoParams::ZaLmsf(p) => Some(*p),
                    _ => None,
                })
                .ok_or(ExperimentError::MissingSweepTemplate { family: "za-lmsf" })?;
            Box::new(move |rho| {
                AlgoParams::ZaLmsf(ZaLmsf {
                    rho_za: rho,
                    ..template
                })
            })
        }
        RhoSweepTarget::RzaLmsf => {
            let template = config
                .algos
                .iter()
                .find_map(|a| match a {
                    AlgoParams::RzaLmsf(p) => Some(*p),
                    _ => None,
                })
                .ok_or(ExperimentError::MissingSweepTemplate { family: "rza-lmsf" })?;
            Box::new(move |rho| {
                AlgoParams::RzaLmsf(RzaLmsf {
                    rho_rza: rho,
                    ..template
                })
            })
        }
    };
    run_sweep(config, rho_grid, tail_fraction, make_algo)
}

/// Sweeps the reweight factor ε of RZA-LMS/F at the template's fixed ρ.
pub fn sweep_reweight(
    config: &ExperimentConfig,
    epsilon_grid: &[f64],
    tail_fraction: f64,
) -> Result<SweepResult, ExperimentError> {
    if epsilon_grid.is_empty() {
        return Err(ExperimentError::InvalidConfig(
            "sweep grid must not be empty".into(),
        ));
    }
    let template = config
        .algos
        .iter()
        .find_map(|a| match a {
            AlgoParams::RzaLmsf(p) => Some(*p),
            _ => None,
        })
        .ok_or(ExperimentError::MissingSweepTemplate { family: "rza-lmsf" })?;
    run_sweep(config, epsilon_grid, tail_fraction, |epsilon| {
        AlgoParams::RzaLmsf(RzaLmsf {
            epsilon,
            ..template
        })
    })
}

fn run_sweep(
    config: &ExperimentConfig,
    grid: &[f64],
    tail_fraction: f64,
    make_algo: impl Fn(f64) -> AlgoParams,
) -> Result<SweepResult, ExperimentError> {
    let mut steady_mse = Vec::with_capacity(grid.len());
    for &value in grid {
        let algo = make_algo(value);
        let curve = run_monte_carlo(config, &algo)?;
        steady_mse.push(steady_state_estimate(&curve, tail_fraction)?);
    }
    let argmin_index = steady_mse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("steady MSE is finite"))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    Ok(SweepResult {
        grid: grid.to_vec(),
        steady_mse,
        argmin_index,
    })
}

//! Parameter resolution: built-in defaults < config file < `LMSF_*`
//! environment variables < command-line flags.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use lmsf_core::channel::SignalKind;
use lmsf_core::channel::{snr_to_noise_var, SignalSpec};
use lmsf_core::experiment::ExperimentConfig;
use lmsf_core::filters::{AlgoParams, Lmf, Lms, Lmsf, RzaLms, RzaLmsf, ZaLms, ZaLmsf};
use lmsf_core::theory::stability_bound;

use crate::args::{CommonArgs, SignalArg};

pub const ENV_PREFIX: &str = "LMSF_";

/// Fully resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct Params {
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub mu: f64,
    pub mu_s: f64,
    pub mu_lmf: f64,
    pub lambda: f64,
    pub rho_za: f64,
    pub rho_rza: f64,
    pub rho_zas: f64,
    pub rho_rzas: f64,
    pub epsilon: f64,
    pub runs: usize,
    pub iters: usize,
    pub seed: u64,
    pub signal: SignalKind,
    pub signal_power: f64,
    pub tail_fraction: f64,
    pub normalize_channel: bool,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

/// Optional keys accepted in the TOML config file; names match the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    k: Option<usize>,
    snr_db: Option<f64>,
    mu: Option<f64>,
    mu_s: Option<f64>,
    mu_lmf: Option<f64>,
    lambda: Option<f64>,
    rho_za: Option<f64>,
    rho_rza: Option<f64>,
    rho_zas: Option<f64>,
    rho_rzas: Option<f64>,
    epsilon: Option<f64>,
    runs: Option<usize>,
    iters: Option<usize>,
    seed: Option<u64>,
    signal: Option<String>,
    signal_power: Option<f64>,
    tail_fraction: Option<f64>,
    normalize_channel: Option<bool>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

/// Regularization defaults are tied to the sparsity level; the bundled
/// reference sets cover K = 2 and K = 4.
fn rho_defaults(k: usize) -> (f64, f64, f64, f64) {
    if k == 4 {
        (0.0002, 0.04, 0.004, 0.4)
    } else {
        (0.0004, 0.06, 0.008, 0.8)
    }
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(format!("{ENV_PREFIX}{name}")).ok()
}

fn env_parse<T: FromStr>(name: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match env_var(name) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| anyhow::anyhow!("invalid {ENV_PREFIX}{name} = {raw:?}: {e}")),
    }
}

fn env_bool(name: &str) -> Result<Option<bool>> {
    match env_var(name) {
        None => Ok(None),
        Some(raw) => match raw.as_str() {
            "1" | "true" | "yes" => Ok(Some(true)),
            "0" | "false" | "no" => Ok(Some(false)),
            other => bail!("invalid {ENV_PREFIX}{name} = {other:?}: expected true/false"),
        },
    }
}

fn parse_signal(raw: &str) -> Result<SignalKind> {
    match raw {
        "pn" => Ok(SignalKind::PnBinary),
        "gaussian" => Ok(SignalKind::GaussianWhite),
        other => bail!("invalid signal kind {other:?}: expected pn or gaussian"),
    }
}

fn pick<T>(flag: Option<T>, env: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(env).or(file).unwrap_or(default)
}

pub fn resolve(args: &CommonArgs) -> Result<Params> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            toml::from_str(&raw)
                .with_context(|| format!("cannot parse config file {}", path.display()))?
        }
        None => FileConfig::default(),
    };

    // k decides which regularization default block applies, so resolve it first
    let k = pick(args.k, env_parse("K")?, file.k, 2);
    let (d_rho_za, d_rho_rza, d_rho_zas, d_rho_rzas) = rho_defaults(k);

    let signal_env = match env_var("SIGNAL") {
        Some(raw) => Some(parse_signal(&raw)?),
        None => None,
    };
    let signal_file = match &file.signal {
        Some(raw) => Some(parse_signal(raw)?),
        None => None,
    };
    let signal_flag = args.signal.map(|s| match s {
        SignalArg::Pn => SignalKind::PnBinary,
        SignalArg::Gaussian => SignalKind::GaussianWhite,
    });

    let params = Params {
        n: pick(args.n, env_parse("N")?, file.n, 16),
        k,
        snr_db: pick(args.snr_db, env_parse("SNR_DB")?, file.snr_db, 10.0),
        mu: pick(args.mu, env_parse("MU")?, file.mu, 0.04),
        mu_s: pick(args.mu_s, env_parse("MU_S")?, file.mu_s, 0.008),
        mu_lmf: pick(args.mu_lmf, env_parse("MU_LMF")?, file.mu_lmf, 0.005),
        lambda: pick(args.lambda, env_parse("LAMBDA")?, file.lambda, 0.8),
        rho_za: pick(args.rho_za, env_parse("RHO_ZA")?, file.rho_za, d_rho_za),
        rho_rza: pick(args.rho_rza, env_parse("RHO_RZA")?, file.rho_rza, d_rho_rza),
        rho_zas: pick(args.rho_zas, env_parse("RHO_ZAS")?, file.rho_zas, d_rho_zas),
        rho_rzas: pick(
            args.rho_rzas,
            env_parse("RHO_RZAS")?,
            file.rho_rzas,
            d_rho_rzas,
        ),
        epsilon: pick(args.epsilon, env_parse("EPSILON")?, file.epsilon, 20.0),
        runs: pick(args.runs, env_parse("RUNS")?, file.runs, 200),
        iters: pick(args.iters, env_parse("ITERS")?, file.iters, 1000),
        seed: pick(args.seed, env_parse("SEED")?, file.seed, 1),
        signal: pick(signal_flag, signal_env, signal_file, SignalKind::PnBinary),
        signal_power: pick(None, env_parse("SIGNAL_POWER")?, file.signal_power, 1.0),
        tail_fraction: pick(
            args.tail_fraction,
            env_parse("TAIL_FRACTION")?,
            file.tail_fraction,
            0.1,
        ),
        normalize_channel: pick(
            if args.normalize_channel {
                Some(true)
            } else {
                None
            },
            env_bool("NORMALIZE_CHANNEL")?,
            file.normalize_channel,
            false,
        ),
        out: pick(
            args.out.clone(),
            env_var("OUT").map(PathBuf::from),
            file.out,
            PathBuf::from("out"),
        ),
        threads: pick(
            args.threads.map(Some),
            env_parse("THREADS")?.map(Some),
            file.threads.map(Some),
            None,
        ),
    };
    validate(&params)?;
    Ok(params)
}

fn validate(p: &Params) -> Result<()> {
    if p.n == 0 {
        bail!("n must be at least 1");
    }
    if p.k == 0 || p.k > p.n {
        bail!("k = {} must satisfy 1 <= k <= n = {}", p.k, p.n);
    }
    if p.runs == 0 {
        bail!("runs must be at least 1");
    }
    if p.iters < p.n {
        bail!("iters = {} must be at least n = {}", p.iters, p.n);
    }
    if !(p.signal_power.is_finite() && p.signal_power > 0.0) {
        bail!("signal_power = {} must be positive", p.signal_power);
    }
    if !(p.tail_fraction > 0.0 && p.tail_fraction <= 0.5) {
        bail!("tail_fraction = {} must lie in (0, 0.5]", p.tail_fraction);
    }
    for (name, v) in [
        ("mu", p.mu),
        ("mu_s", p.mu_s),
        ("mu_lmf", p.mu_lmf),
        ("lambda", p.lambda),
        ("epsilon", p.epsilon),
    ] {
        if !(v.is_finite() && v > 0.0) {
            bail!("{name} = {v} must be positive");
        }
    }
    for (name, v) in [
        ("rho_za", p.rho_za),
        ("rho_rza", p.rho_rza),
        ("rho_zas", p.rho_zas),
        ("rho_rzas", p.rho_rzas),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            bail!("{name} = {v} must be non-negative");
        }
    }
    // instability is a legitimate experiment; warn instead of failing
    let bound = stability_bound(p.n, p.signal_power);
    if p.mu >= bound {
        eprintln!(
            "warning: mu = {} is at or above the stability bound {bound:.6e}; \
             runs may diverge",
            p.mu
        );
    }
    if p.mu_s >= bound {
        eprintln!(
            "warning: mu_s = {} is at or above the stability bound {bound:.6e}; \
             runs may diverge",
            p.mu_s
        );
    }
    Ok(())
}

impl Params {
    pub fn noise_variance(&self) -> f64 {
        snr_to_noise_var(self.snr_db, self.signal_power)
    }

    fn base_config(&self, algos: Vec<AlgoParams>) -> ExperimentConfig {
        ExperimentConfig {
            n_len: self.n,
            k_sparsity: self.k,
            snr_db: self.snr_db,
            signal: SignalSpec {
                kind: self.signal,
                length: self.iters,
                power: self.signal_power,
            },
            algos,
            num_runs: self.runs,
            num_iterations: self.iters,
            master_seed: self.seed,
            normalize_channel: self.normalize_channel,
        }
    }

    pub fn lms(&self) -> AlgoParams {
        AlgoParams::Lms(Lms { mu_s: self.mu_s })
    }

    pub fn za_lms(&self) -> AlgoParams {
        AlgoParams::ZaLms(ZaLms {
            mu_s: self.mu_s,
            rho_zas: self.rho_zas,
        })
    }

    pub fn rza_lms(&self) -> AlgoParams {
        AlgoParams::RzaLms(RzaLms {
            mu_s: self.mu_s,
            rho_rzas: self.rho_rzas,
            epsilon: self.epsilon,
        })
    }

    pub fn lmsf(&self) -> AlgoParams {
        AlgoParams::Lmsf(Lmsf {
            mu: self.mu,
            lambda: self.lambda,
        })
    }

    pub fn za_lmsf(&self) -> AlgoParams {
        AlgoParams::ZaLmsf(ZaLmsf {
            mu: self.mu,
            lambda: self.lambda,
            rho_za: self.rho_za,
        })
    }

    pub fn rza_lmsf(&self) -> AlgoParams {
        AlgoParams::RzaLmsf(RzaLmsf {
            mu: self.mu,
            lambda: self.lambda,
            rho_rza: self.rho_rza,
            epsilon: self.epsilon,
        })
    }

    pub fn lmf(&self) -> AlgoParams {
        AlgoParams::Lmf(Lmf { mu: self.mu_lmf })
    }

    /// The full comparison set, in output order.
    pub fn compare_config(&self) -> ExperimentConfig {
        self.base_config(vec![
            self.lms(),
            self.za_lms(),
            self.rza_lms(),
            self.lmsf(),
            self.za_lmsf(),
            self.rza_lmsf(),
            self.lmf(),
        ])
    }

    pub fn sweep_config(&self, template: AlgoParams) -> ExperimentConfig {
        self.base_config(vec![template])
    }
}

//! Sparse channel realizations, training signals, and the observation model
//! `y(t) = hᵀ x + z(t)`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taps::TapVector;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("sparsity k = {k} exceeds channel length n = {n}")]
    SparsityExceedsLength { k: usize, n: usize },
    #[error("channel length and sparsity must both be at least 1 (n = {n}, k = {k})")]
    DegenerateShape { n: usize, k: usize },
    #[error("regressor length {got} does not match channel length {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Ground-truth sparse channel: `K` nonzero taps on a length-`N` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseChannel {
    taps: TapVector,
    support: Vec<usize>,
    sparsity_k: usize,
}

impl SparseChannel {
    pub fn taps(&self) -> &TapVector {
        &self.taps
    }

    /// Sorted indices of the nonzero taps.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity_k
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Rescale so that ‖h‖₂ = 1 exactly for this realization (the default
    /// generator only satisfies E‖h‖₂² = 1 in expectation).
    pub fn normalize_unit_norm(&mut self) {
        let norm = self.taps.norm_sq().sqrt();
        if norm > 0.0 {
            self.taps.scale(1.0 / norm);
        }
    }
}

/// Training signal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    /// Maximal-length LFSR bit stream mapped to ±√σ_x².
    PnBinary,
    /// I.i.d. zero-mean Gaussian samples of variance σ_x².
    GaussianWhite,
}

/// Training signal description: kind, sample count, and power σ_x².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub length: usize,
    pub power: f64,
}

/// Additive white Gaussian observation noise of variance σ_n².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub variance: f64,
}

pub const VEHICULAR_B_LENGTH: usize = 30;
pub const VEHICULAR_B_SPARSITY: usize = 6;

/// Maximal-length Fibonacci LFSR over x¹⁵ + x¹⁴ + 1.
///
/// The polynomial is primitive over GF(2), so any nonzero 15-bit seed walks
/// the full period of 2¹⁵ − 1 states before repeating.
#[derive(Debug, Clone)]
pub struct Lfsr {
    reg: u16,
}

impl Lfsr {
    pub const ORDER: u32 = 15;
    pub const PERIOD: u32 = (1 << 15) - 1;

    /// Builds the register from the low 15 bits of `seed`; an all-zero
    /// register is replaced by 1.
    pub fn new(seed: u16) -> Self {
        let reg = seed & 0x7FFF;
        Self {
            reg: if reg == 0 { 1 } else { reg },
        }
    }

    pub fn state(&self) -> u16 {
        self.reg
    }

    /// Advance one step and return the new feedback bit.
    pub fn next_bit(&mut self) -> bool {
        let fb = ((self.reg >> 14) ^ (self.reg >> 13)) & 1;
        self.reg = ((self.reg << 1) | fb) & 0x7FFF;
        fb == 1
    }
}

/// Draws a sparse channel: `k` support positions uniform without
/// replacement, nonzero gains i.i.d. N(0, 1/k) so that E‖h‖₂² = 1, all
/// other taps exactly zero.
pub fn gen_sparse_channel<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<SparseChannel, ChannelError> {
    if n == 0 || k == 0 {
        return Err(ChannelError::DegenerateShape { n, k });
    }
    if k > n {
        return Err(ChannelError::SparsityExceedsLength { k, n });
    }
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let gain = Normal::new(0.0, (1.0 / k as f64).sqrt()).expect("valid std");
    let mut taps = TapVector::zeros(n);
    for &idx in &support {
        let mut g = gain.sample(rng);
        // a support tap must be nonzero; an exact 0.0 draw has probability
        // zero but would break the support invariant
        while g == 0.0 {
            g = gain.sample(rng);
        }
        taps[idx] = g;
    }
    Ok(SparseChannel {
        taps,
        support,
        sparsity_k: k,
    })
}

/// Six-tap sparse channel on a length-30 grid, generated under the same
/// gain and position rules as [`gen_sparse_channel`].
pub fn vehicular_b_preset<R: Rng + ?Sized>(rng: &mut R) -> SparseChannel {
    gen_sparse_channel(VEHICULAR_B_LENGTH, VEHICULAR_B_SPARSITY, rng)
        .expect("preset shape is valid")
}

/// Generates a training sample sequence.
///
/// `PnBinary` streams the order-15 m-sequence from a seed-derived register
/// state (bit 1 → +√power, bit 0 → −√power); `GaussianWhite` draws i.i.d.
/// normal samples of variance `power`.
pub fn gen_training_signal<R: Rng + ?Sized>(spec: &SignalSpec, rng: &mut R) -> Vec<f64> {
    match spec.kind {
        SignalKind::PnBinary => {
            let amplitude = spec.power.sqrt();
            let mut lfsr = Lfsr::new(rng.random::<u16>());
            (0..spec.length)
                .map(|_| {
                    if lfsr.next_bit() {
                        amplitude
                    } else {
                        -amplitude
                    }
                })
                .collect()
        }
        SignalKind::GaussianWhite => {
            let dist = Normal::new(0.0, spec.power.sqrt()).expect("valid std");
            (0..spec.length).map(|_| dist.sample(rng)).collect()
        }
    }
}

/// Sliding-window regressor `x = [x(t), x(t−1), …, x(t−N+1)]ᵀ`, zero-padded
/// for samples before time 0.
pub fn regressor(signal: &[f64], t: usize, n: usize) -> TapVector {
    let mut window = TapVector::zeros(n);
    for lag in 0..n {
        if t >= lag {
            window[lag] = signal[t - lag];
        }
    }
    window
}

/// One noisy observation `y = hᵀ x + z` with a fresh Gaussian noise draw.
pub fn observe<R: Rng + ?Sized>(
    h: &SparseChannel,
    x: &TapVector,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    if x.len() != h.len() {
        return Err(ChannelError::DimensionMismatch {
            expected: h.len(),
            got: x.len(),
        });
    }
    assert!(
        noise.variance.is_finite() && noise.variance >= 0.0,
        "noise variance must be finite and non-negative"
    );
    let z = Normal::new(0.0, noise.variance.sqrt())
        .expect("valid std")
        .sample(rng);
    Ok(h.taps.dot(x) + z)
}

/// Noise variance from the SNR definition 10·log10(E_s/σ_n²):
/// σ_n² = E_s · 10^(−snr_db/10).
pub fn snr_to_noise_var(snr_db: f64, es: f64) -> f64 {
    es * 10f64.powf(-snr_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn dense_channel_has_no_zero_taps() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let ch = gen_sparse_channel(8, 8, &mut rng).unwrap();
        assert!(ch.taps().iter().all(|&v| v != 0.0));
        assert_eq!(ch.support(), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn sparse_channel_zero_count() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let ch = gen_sparse_channel(16, 2, &mut rng).unwrap();
        let zeros = ch.taps().iter().filter(|&&v| v == 0.0).count();
        assert_eq!(zeros, 14);
        assert_eq!(ch.sparsity(), 2);
        assert_eq!(ch.support().len(), 2);
        for &idx in ch.support() {
            assert_ne!(ch.taps()[idx], 0.0);
        }
    }

    #[test]
    fn invalid_shapes_rejected() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        assert!(matches!(
            gen_sparse_channel(4, 5, &mut rng),
            Err(ChannelError::SparsityExceedsLength { k: 5, n: 4 })
        ));
        assert!(gen_sparse_channel(0, 0, &mut rng).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_sparse_channel(16, 4, &mut ChaCha12Rng::seed_from_u64(42)).unwrap();
        let b = gen_sparse_channel(16, 4, &mut ChaCha12Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vehicular_preset_shape() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let ch = vehicular_b_preset(&mut rng);
        assert_eq!(ch.len(), 30);
        assert_eq!(ch.support().len(), 6);
        assert_eq!(ch.taps().iter().filter(|&&v| v == 0.0).count(), 24);
    }

    #[test]
    fn unit_norm_flag() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut ch = gen_sparse_channel(16, 4, &mut rng).unwrap();
        ch.normalize_unit_norm();
        assert!((ch.taps().norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pn_symbols_are_binary() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let spec = SignalSpec {
            kind: SignalKind::PnBinary,
            length: 4096,
            power: 1.0,
        };
        let s = gen_training_signal(&spec, &mut rng);
        assert!(s.iter().all(|&v| v == 1.0 || v == -1.0));
        let spec = SignalSpec {
            kind: SignalKind::PnBinary,
            length: 64,
            power: 4.0,
        };
        let s = gen_training_signal(&spec, &mut rng);
        assert!(s.iter().all(|&v| v == 2.0 || v == -2.0));
    }

    #[test]
    fn lfsr_full_period() {
        let mut lfsr = Lfsr::new(0b101_0110_0010_1001);
        let start = lfsr.state();
        let mut period = 0u32;
        loop {
            lfsr.next_bit();
            period += 1;
            if lfsr.state() == start {
                break;
            }
            assert!(period <= Lfsr::PERIOD, "state did not recur in time");
        }
        assert_eq!(period, Lfsr::PERIOD);
    }

    #[test]
    fn lfsr_zero_seed_fallback() {
        let mut lfsr = Lfsr::new(0);
        assert_ne!(lfsr.state(), 0);
        for _ in 0..100 {
            lfsr.next_bit();
            assert_ne!(lfsr.state(), 0);
        }
    }

    #[test]
    fn pn_autocorrelation_is_flat() {
        // Full-period circular autocorrelation of an m-sequence at any
        // nonzero lag is exactly -1 (in units of ±1 chips).
        let mut lfsr = Lfsr::new(0x35C7);
        let chips: Vec<f64> = (0..Lfsr::PERIOD)
            .map(|_| if lfsr.next_bit() { 1.0 } else { -1.0 })
            .collect();
        let period = chips.len();
        for lag in [1usize, 7, 100, 5000] {
            let corr: f64 = (0..period)
                .map(|i| chips[i] * chips[(i + lag) % period])
                .sum();
            assert_eq!(corr, -1.0, "lag {lag}");
        }
    }

    #[test]
    fn regressor_windows() {
        let signal = [10.0, 11.0, 12.0, 13.0, 14.0];
        let r0 = regressor(&signal, 0, 3);
        assert_eq!(r0.as_slice(), &[10.0, 0.0, 0.0]);
        let r2 = regressor(&signal, 2, 3);
        assert_eq!(r2.as_slice(), &[12.0, 11.0, 10.0]);
        let r4 = regressor(&signal, 4, 3);
        assert_eq!(r4.as_slice(), &[14.0, 13.0, 12.0]);
        // consecutive windows share n-1 shifted entries
        let r3 = regressor(&signal, 3, 3);
        assert_eq!(&r4.as_slice()[1..], &r3.as_slice()[..2]);
    }

    #[test]
    fn observe_noiseless_is_exact_and_linear() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let ch = gen_sparse_channel(8, 3, &mut rng).unwrap();
        let x = TapVector::from_vec((0..8).map(|i| (i as f64) - 3.5).collect());
        let quiet = NoiseSpec { variance: 0.0 };
        let y = observe(&ch, &x, &quiet, &mut rng).unwrap();
        assert_eq!(y, ch.taps().dot(&x));

        // linear in x
        let mut x2 = x.clone();
        x2.scale(3.0);
        let y2 = observe(&ch, &x2, &quiet, &mut rng).unwrap();
        assert!((y2 - 3.0 * y).abs() < 1e-12);

        // zero window → pure noise (exactly zero here)
        let zeros = TapVector::zeros(8);
        assert_eq!(observe(&ch, &zeros, &quiet, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn observe_dimension_mismatch() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let ch = gen_sparse_channel(8, 3, &mut rng).unwrap();
        let x = TapVector::zeros(7);
        assert!(matches!(
            observe(&ch, &x, &NoiseSpec { variance: 0.1 }, &mut rng),
            Err(ChannelError::DimensionMismatch {
                expected: 8,
                got: 7
            })
        ));
    }

    #[test]
    fn snr_conversion() {
        assert!((snr_to_noise_var(10.0, 1.0) - 0.1).abs() < 1e-15);
        assert!((snr_to_noise_var(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((snr_to_noise_var(20.0, 1.0) - 0.01).abs() < 1e-15);
        assert!((snr_to_noise_var(10.0, 2.0) - 0.2).abs() < 1e-15);
    }
}

//! Adaptive filter update rules.
//!
//! The LMS/F rule updates the estimate by `μ e³(n) x / (e²(n) + λ)`, which
//! is the standard LMS update scaled by the error-dependent ratio
//! `e²/(e² + λ)`. The zero-attracting (ZA) variant subtracts
//! `γ_ZA sgn(h̃)` per tap, the reweighted variant (RZA) subtracts
//! `γ_RZA sgn(h̃)/(1 + ε|h̃|)`. Fixed-step LMS, ZA-LMS, RZA-LMS, and LMF
//! baselines are included for comparison runs.
//!
//! Every step is a pure function of `(state, regressor, observation,
//! params)`: distinct filter instances share no state and may run on
//! distinct threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taps::TapVector;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("regressor length {got} does not match filter length {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("filter weights became non-finite at iteration {iteration}")]
    Diverged { iteration: u64 },
    #[error("invalid parameter {name} = {value}: must be {requirement}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

/// Current estimate and update count of one adaptive filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    weights: TapVector,
    iteration: u64,
}

impl FilterState {
    /// All-zero initial estimate of the given length.
    pub fn zeroed(len: usize) -> Self {
        Self {
            weights: TapVector::zeros(len),
            iteration: 0,
        }
    }

    pub fn new(weights: TapVector) -> Self {
        Self {
            weights,
            iteration: 0,
        }
    }

    pub fn weights(&self) -> &TapVector {
        &self.weights
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }
}

/// Fixed-step LMS parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lms {
    pub mu_s: f64,
}

/// Fixed-step least-mean-fourth parameters (update `μ e³ x`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lmf {
    pub mu: f64,
}

/// LMS/F parameters: initial step `μ` and the threshold `λ` that controls
/// the variable step ratio `e²/(e² + λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lmsf {
    pub mu: f64,
    pub lambda: f64,
}

/// Zero-attracting LMS/F. The shrink strength is always derived as
/// `γ_ZA = μ ρ_ZA`, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZaLmsf {
    pub mu: f64,
    pub lambda: f64,
    pub rho_za: f64,
}

impl ZaLmsf {
    pub fn gamma(&self) -> f64 {
        self.mu * self.rho_za
    }
}

/// Reweighted zero-attracting LMS/F with `γ_RZA = ε μ ρ_RZA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RzaLmsf {
    pub mu: f64,
    pub lambda: f64,
    pub rho_rza: f64,
    pub epsilon: f64,
}

impl RzaLmsf {
    pub fn gamma(&self) -> f64 {
        self.epsilon * self.mu * self.rho_rza
    }
}

/// Zero-attracting LMS with `γ_ZAS = μ_s ρ_ZAS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZaLms {
    pub mu_s: f64,
    pub rho_zas: f64,
}

impl ZaLms {
    pub fn gamma(&self) -> f64 {
        self.mu_s * self.rho_zas
    }
}

/// Reweighted zero-attracting LMS with `γ_RZAS = ε μ_s ρ_RZAS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RzaLms {
    pub mu_s: f64,
    pub rho_rzas: f64,
    pub epsilon: f64,
}

impl RzaLms {
    pub fn gamma(&self) -> f64 {
        self.epsilon * self.mu_s * self.rho_rzas
    }
}

/// Tagged union of per-algorithm hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum AlgoParams {
    Lms(Lms),
    Lmf(Lmf),
    Lmsf(Lmsf),
    ZaLmsf(ZaLmsf),
    RzaLmsf(RzaLmsf),
    ZaLms(ZaLms),
    RzaLms(RzaLms),
}

impl AlgoParams {
    /// Short label used for curve and file naming.
    pub fn label(&self) -> &'static str {
        match self {
            AlgoParams::Lms(_) => "lms",
            AlgoParams::Lmf(_) => "lmf",
            AlgoParams::Lmsf(_) => "lmsf",
            AlgoParams::ZaLmsf(_) => "za-lmsf",
            AlgoParams::RzaLmsf(_) => "rza-lmsf",
            AlgoParams::ZaLms(_) => "za-lms",
            AlgoParams::RzaLms(_) => "rza-lms",
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        fn positive(name: &'static str, value: f64) -> Result<(), FilterError> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(FilterError::InvalidParam {
                    name,
                    value,
                    requirement: "strictly positive and finite",
                })
            }
        }
        fn non_negative(name: &'static str, value: f64) -> Result<(), FilterError> {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(FilterError::InvalidParam {
                    name,
                    value,
                    requirement: "non-negative and finite",
                })
            }
        }
        match *self {
            AlgoParams::Lms(Lms { mu_s }) => positive("mu_s", mu_s),
            AlgoParams::Lmf(Lmf { mu }) => positive("mu", mu),
            AlgoParams::Lmsf(Lmsf { mu, lambda }) => {
                positive("mu", mu)?;
                positive("lambda", lambda)
            }
            AlgoParams::ZaLmsf(ZaLmsf { mu, lambda, rho_za }) => {
                positive("mu", mu)?;
                positive("lambda", lambda)?;
                non_negative("rho_za", rho_za)
            }
            AlgoParams::RzaLmsf(RzaLmsf {
                mu,
                lambda,
                rho_rza,
                epsilon,
            }) => {
                positive("mu", mu)?;
                positive("lambda", lambda)?;
                non_negative("rho_rza", rho_rza)?;
                positive("epsilon", epsilon)
            }
            AlgoParams::ZaLms(ZaLms { mu_s, rho_zas }) => {
                positive("mu_s", mu_s)?;
                non_negative("rho_zas", rho_zas)
            }
            AlgoParams::RzaLms(RzaLms {
                mu_s,
                rho_rzas,
                epsilon,
            }) => {
                positive("mu_s", mu_s)?;
                non_negative("rho_rzas", rho_rzas)?;
                positive("epsilon", epsilon)
            }
        }
    }
}

/// Diagnostics from a single update step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Prediction error e(n) before the update.
    pub error: f64,
    /// Effective LMS-equivalent step applied to the gradient term:
    /// `μ_s` for the LMS family, `μ e²/(e² + λ)` for the LMS/F family,
    /// `μ e²` for LMF.
    pub effective_step: f64,
    /// Per-tap displacement applied by the sparse penalty; the zero vector
    /// for non-sparse rules.
    pub shrink_applied: TapVector,
}

/// Prediction error `e(n) = y − h̃ᵀ(n) x`.
pub fn prediction_error(state: &FilterState, x: &TapVector, y: f64) -> Result<f64, FilterError> {
    if x.len() != state.weights.len() {
        return Err(FilterError::DimensionMismatch {
            expected: state.weights.len(),
            got: x.len(),
        });
    }
    Ok(y - state.weights.dot(x))
}

/// Variable step ratio `e²/(e² + λ) ∈ [0, 1)` for finite `e` and `λ > 0`.
///
/// If `e²` overflows to infinity the mathematical limit 1 is returned; the
/// weight update that produced such an error diverges and is caught by the
/// non-finite guard in the step functions.
pub fn variable_step_ratio(error: f64, lambda: f64) -> f64 {
    let e2 = error * error;
    if e2.is_finite() {
        e2 / (e2 + lambda)
    } else {
        1.0
    }
}

/// Component-wise sign with `sgn(0) = 0`.
pub fn sign_vec(h: &TapVector) -> TapVector {
    TapVector::from_vec(h.iter().map(|&v| signum0(v)).collect())
}

fn signum0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Shared step engine: `w_i ← w_i + step·e·x_i − shrink(w_i)`.
///
/// `shrink` sees the pre-update weights, matching the single-expression
/// form of the ZA/RZA update equations.
fn run_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    step_for: impl Fn(f64) -> f64,
    shrink_for: impl Fn(f64) -> f64,
) -> Result<(FilterState, StepRecord), FilterError> {
    let error = prediction_error(state, x, y)?;
    let step = step_for(error);
    let n = state.weights.len();
    let mut weights = Vec::with_capacity(n);
    let mut shrink = Vec::with_capacity(n);
    let mut finite = true;
    for i in 0..n {
        let s = shrink_for(state.weights[i]);
        let w = state.weights[i] + step * error * x[i] - s;
        finite &= w.is_finite();
        shrink.push(s);
        weights.push(w);
    }
    if !finite {
        return Err(FilterError::Diverged {
            iteration: state.iteration,
        });
    }
    Ok((
        FilterState {
            weights: TapVector::from_vec(weights),
            iteration: state.iteration + 1,
        },
        StepRecord {
            error,
            effective_step: step,
            shrink_applied: TapVector::from_vec(shrink),
        },
    ))
}

/// One LMS update: `h̃ ← h̃ + μ_s e x`.
pub fn lms_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &Lms,
) -> Result<FilterState, FilterError> {
    run_step(state, x, y, |_| params.mu_s, |_| 0.0).map(|(s, _)| s)
}

/// One LMF update: `h̃ ← h̃ + μ e³ x`.
pub fn lmf_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &Lmf,
) -> Result<FilterState, FilterError> {
    run_step(state, x, y, |e| params.mu * (e * e), |_| 0.0).map(|(s, _)| s)
}

/// One LMS/F update: `h̃ ← h̃ + μ e³ x / (e² + λ)`.
pub fn lmsf_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &Lmsf,
) -> Result<FilterState, FilterError> {
    run_step(
        state,
        x,
        y,
        |e| params.mu * variable_step_ratio(e, params.lambda),
        |_| 0.0,
    )
    .map(|(s, _)| s)
}

/// One ZA-LMS/F update: the LMS/F update minus `γ_ZA sgn(h̃(n))`.
pub fn za_lmsf_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &ZaLmsf,
) -> Result<FilterState, FilterError> {
    let gamma = params.gamma();
    run_step(
        state,
        x,
        y,
        |e| params.mu * variable_step_ratio(e, params.lambda),
        |w| gamma * signum0(w),
    )
    .map(|(s, _)| s)
}

/// One RZA-LMS/F update: the LMS/F update minus
/// `γ_RZA sgn(h̃(n)) / (1 + ε |h̃(n)|)`.
pub fn rza_lmsf_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &RzaLmsf,
) -> Result<FilterState, FilterError> {
    let gamma = params.gamma();
    let epsilon = params.epsilon;
    run_step(
        state,
        x,
        y,
        |e| params.mu * variable_step_ratio(e, params.lambda),
        |w| gamma * signum0(w) / (1.0 + epsilon * w.abs()),
    )
    .map(|(s, _)| s)
}

/// One ZA-LMS update: the LMS update minus `γ_ZAS sgn(h̃(n))`.
pub fn za_lms_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &ZaLms,
) -> Result<FilterState, FilterError> {
    let gamma = params.gamma();
    run_step(state, x, y, |_| params.mu_s, |w| gamma * signum0(w)).map(|(s, _)| s)
}

/// One RZA-LMS update: the LMS update minus
/// `γ_RZAS sgn(h̃(n)) / (1 + ε |h̃(n)|)`.
pub fn rza_lms_step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &RzaLms,
) -> Result<FilterState, FilterError> {
    let gamma = params.gamma();
    let epsilon = params.epsilon;
    run_step(
        state,
        x,
        y,
        |_| params.mu_s,
        |w| gamma * signum0(w) / (1.0 + epsilon * w.abs()),
    )
    .map(|(s, _)| s)
}

/// Dispatching step that also returns the per-step diagnostics.
pub fn step(
    state: &FilterState,
    x: &TapVector,
    y: f64,
    params: &AlgoParams,
) -> Result<(FilterState, StepRecord), FilterError> {
    match params {
        AlgoParams::Lms(p) => run_step(state, x, y, |_| p.mu_s, |_| 0.0),
        AlgoParams::Lmf(p) => run_step(state, x, y, |e| p.mu * (e * e), |_| 0.0),
        AlgoParams::Lmsf(p) => run_step(
            state,
            x,
            y,
            |e| p.mu * variable_step_ratio(e, p.lambda),
            |_| 0.0,
        ),
        AlgoParams::ZaLmsf(p) => {
            let gamma = p.gamma();
            run_step(
                state,
                x,
                y,
                |e| p.mu * variable_step_ratio(e, p.lambda),
                |w| gamma * signum0(w),
            )
        }
        AlgoParams::RzaLmsf(p) => {
            let gamma = p.gamma();
            let epsilon = p.epsilon;
            run_step(
                state,
                x,
                y,
                |e| p.mu * variable_step_ratio(e, p.lambda),
                |w| gamma * signum0(w) / (1.0 + epsilon * w.abs()),
            )
        }
        AlgoParams::ZaLms(p) => {
            let gamma = p.gamma();
            run_step(state, x, y, |_| p.mu_s, |w| gamma * signum0(w))
        }
        AlgoParams::RzaLms(p) => {
            let gamma = p.gamma();
            let epsilon = p.epsilon;
            run_step(
                state,
                x,
                y,
                |_| p.mu_s,
                |w| gamma * signum0(w) / (1.0 + epsilon * w.abs()),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn state_of(values: &[f64]) -> FilterState {
        FilterState::new(TapVector::from_vec(values.to_vec()))
    }

    fn taps(values: &[f64]) -> TapVector {
        TapVector::from_vec(values.to_vec())
    }

    #[test]
    fn prediction_error_zero_estimate() {
        let state = FilterState::zeroed(4);
        let x = taps(&[0.3, -0.2, 1.0, 0.5]);
        assert_eq!(prediction_error(&state, &x, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn prediction_error_perfect_estimate() {
        let h = taps(&[0.7, 0.0, -0.3]);
        let x = taps(&[1.0, -1.0, 1.0]);
        let y = h.dot(&x);
        let state = FilterState::new(h);
        assert_eq!(prediction_error(&state, &x, y).unwrap(), 0.0);
    }

    #[test]
    fn prediction_error_orthogonal_regressor() {
        let state = state_of(&[0.5, 0.5]);
        let x = taps(&[1.0, -1.0]);
        let e = prediction_error(&state, &x, 0.2).unwrap();
        assert!((e - 0.2).abs() < 1e-15);
    }

    #[test]
    fn prediction_error_dimension_mismatch() {
        let state = FilterState::zeroed(3);
        let x = taps(&[1.0, 2.0]);
        assert!(matches!(
            prediction_error(&state, &x, 0.0),
            Err(FilterError::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn step_ratio_values() {
        assert_eq!(variable_step_ratio(0.0, 0.8), 0.0);
        let r = variable_step_ratio(0.1f64.sqrt(), 0.8);
        assert!((r - 1.0 / 9.0).abs() < 1e-12);
        let r = variable_step_ratio(0.8f64.sqrt(), 0.8);
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn step_ratio_monotone_and_bounded() {
        let mut last = -1.0;
        for i in 0..200 {
            let e = 1e-3 * 1.1f64.powi(i);
            let r = variable_step_ratio(e, 0.8);
            assert!((0.0..1.0).contains(&r));
            assert!(r > last, "ratio must increase in e²");
            last = r;
        }
        // decreasing in lambda for fixed nonzero error
        let mut last = 2.0;
        for i in 0..100 {
            let lambda = 1e-3 * 1.2f64.powi(i);
            let r = variable_step_ratio(0.5, lambda);
            assert!(r < last, "ratio must decrease in lambda");
            last = r;
        }
    }

    #[test]
    fn step_ratio_overflow_guard() {
        assert_eq!(variable_step_ratio(1e200, 0.8), 1.0);
    }

    #[test]
    fn lmsf_zero_error_fixed_point() {
        let h = taps(&[0.4, -0.1]);
        let x = taps(&[1.0, 2.0]);
        let y = h.dot(&x);
        let state = FilterState::new(h.clone());
        let params = Lmsf {
            mu: 0.04,
            lambda: 0.8,
        };
        let next = lmsf_step(&state, &x, y, &params).unwrap();
        assert_eq!(next.weights(), &h);
        assert_eq!(next.iteration(), 1);
    }

    #[test]
    fn lmsf_one_step_arithmetic() {
        let state = FilterState::zeroed(2);
        let x = taps(&[1.0, 0.0]);
        let params = Lmsf {
            mu: 0.04,
            lambda: 0.8,
        };
        let next = lmsf_step(&state, &x, 1.0, &params).unwrap();
        assert!((next.weights()[0] - 0.04 / 1.8).abs() < 1e-15);
        assert_eq!(next.weights()[1], 0.0);
    }

    #[test]
    fn lmsf_degenerates_to_lms_for_tiny_lambda() {
        // With lambda → 0 the ratio e²/(e²+λ) → 1 and the update equals LMS
        // with step mu; the per-step difference norm is bounded by
        // μ|e|‖x‖λ/(e²+λ).
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..100 {
            let w: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let xv: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: f64 = rng.random_range(-2.0..2.0);
            let state = state_of(&w);
            let x = taps(&xv);
            let lambda = 1e-9;
            let a = lmsf_step(&state, &x, y, &Lmsf { mu: 0.04, lambda }).unwrap();
            let b = lms_step(&state, &x, y, &Lms { mu_s: 0.04 }).unwrap();
            let e = prediction_error(&state, &x, y).unwrap();
            let bound = 0.04 * e.abs() * x.norm_sq().sqrt() * lambda / (e * e + lambda);
            let diff = a.weights().squared_distance(b.weights()).sqrt();
            // 1e-15 absorbs the rounding noise of the weight sums themselves
            assert!(diff <= bound + 1e-15, "diff {diff} exceeds bound {bound}");
        }
    }

    #[test]
    fn za_shrink_with_zero_regressor() {
        let state = state_of(&[0.5, 0.0, -0.3]);
        let x = taps(&[0.0, 0.0, 0.0]);
        let params = ZaLmsf {
            mu: 0.04,
            lambda: 0.8,
            rho_za: 0.25,
        };
        assert!((params.gamma() - 0.01).abs() < 1e-18);
        let next = za_lmsf_step(&state, &x, 3.7, &params).unwrap();
        assert!((next.weights()[0] - 0.49).abs() < 1e-15);
        assert_eq!(next.weights()[1], 0.0, "sgn(0)=0 leaves zero taps alone");
        assert!((next.weights()[2] + 0.29).abs() < 1e-15);
    }

    #[test]
    fn za_reduces_to_lmsf_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut a = FilterState::zeroed(8);
        let mut b = FilterState::zeroed(8);
        let za = ZaLmsf {
            mu: 0.04,
            lambda: 0.8,
            rho_za: 0.0,
        };
        let base = Lmsf {
            mu: 0.04,
            lambda: 0.8,
        };
        for _ in 0..200 {
            let xv: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = taps(&xv);
            let y: f64 = rng.random_range(-2.0..2.0);
            a = za_lmsf_step(&a, &x, y, &za).unwrap();
            b = lmsf_step(&b, &x, y, &base).unwrap();
            for i in 0..8 {
                assert_eq!(a.weights()[i].to_bits(), b.weights()[i].to_bits());
            }
        }
    }

    #[test]
    fn rza_reduces_to_lmsf_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let mut a = FilterState::zeroed(8);
        let mut b = FilterState::zeroed(8);
        let rza = RzaLmsf {
            mu: 0.04,
            lambda: 0.8,
            rho_rza: 0.0,
            epsilon: 20.0,
        };
        let base = Lmsf {
            mu: 0.04,
            lambda: 0.8,
        };
        for _ in 0..200 {
            let xv: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = taps(&xv);
            let y: f64 = rng.random_range(-2.0..2.0);
            a = rza_lmsf_step(&a, &x, y, &rza).unwrap();
            b = lmsf_step(&b, &x, y, &base).unwrap();
            for i in 0..8 {
                assert_eq!(a.weights()[i].to_bits(), b.weights()[i].to_bits());
            }
        }
    }

    #[test]
    fn rza_shrink_magnitude_table_values() {
        // gamma = 20 * 0.04 * 0.06 = 0.048; shrink at |h|=0.5 is 0.048/11.
        let params = RzaLmsf {
            mu: 0.04,
            lambda: 0.8,
            rho_rza: 0.06,
            epsilon: 20.0,
        };
        assert!((params.gamma() - 0.048).abs() < 1e-15);
        let state = state_of(&[0.5]);
        let x = taps(&[0.0]);
        let next = rza_lmsf_step(&state, &x, 0.0, &params).unwrap();
        let shrink = 0.5 - next.weights()[0];
        assert!((shrink - 0.048 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn rza_shrink_decreasing_in_magnitude() {
        let gamma = 0.048;
        let eps = 20.0;
        let shrink = |w: f64| gamma / (1.0 + eps * w.abs());
        assert!(shrink(0.05) > shrink(0.5));
        // crossover with ZA: gamma_rza = gamma_za (1 + eps tau) makes the
        // penalties coincide exactly at |h| = tau
        let tau = 0.1;
        let gamma_za = 1.6e-5;
        let gamma_rza = gamma_za * (1.0 + eps * tau);
        let rza_at_tau = gamma_rza / (1.0 + eps * tau);
        assert!((rza_at_tau - gamma_za).abs() < 1e-18);
    }

    #[test]
    fn lms_one_step_arithmetic() {
        let state = FilterState::zeroed(2);
        let x = taps(&[1.0, 0.0]);
        let next = lms_step(&state, &x, 1.0, &Lms { mu_s: 0.008 }).unwrap();
        assert_eq!(next.weights()[0], 0.008);
        assert_eq!(next.weights()[1], 0.0);
    }

    #[test]
    fn lms_zero_error_unchanged() {
        let h = taps(&[0.2, -0.9]);
        let x = taps(&[3.0, 1.0]);
        let y = h.dot(&x);
        let state = FilterState::new(h.clone());
        let next = lms_step(&state, &x, y, &Lms { mu_s: 0.008 }).unwrap();
        assert_eq!(next.weights(), &h);
    }

    #[test]
    fn lmf_one_step() {
        let state = FilterState::zeroed(2);
        let x = taps(&[1.0, 0.0]);
        let next = lmf_step(&state, &x, 1.0, &Lmf { mu: 0.01 }).unwrap();
        assert!((next.weights()[0] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn lmsf_behaves_like_lmf_for_large_lambda() {
        // For λ ≫ e² the LMS/F update is ≈ LMF with step μ/λ; the relative
        // difference of the two updates is below e²/λ.
        let state = state_of(&[0.1, -0.2, 0.3]);
        let x = taps(&[1.0, 0.5, -1.0]);
        let y = 0.4;
        let mu = 0.04;
        let lambda = 50.0;
        let e = prediction_error(&state, &x, y).unwrap();
        let a = lmsf_step(&state, &x, y, &Lmsf { mu, lambda }).unwrap();
        let b = lmf_step(&state, &x, y, &Lmf { mu: mu / lambda }).unwrap();
        let update_a = a.weights().squared_distance(state.weights()).sqrt();
        let diff = a.weights().squared_distance(b.weights()).sqrt();
        assert!(diff / update_a < e * e / lambda);
    }

    #[test]
    fn za_lms_and_rza_lms_reduce_to_lms() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let mut a = FilterState::zeroed(6);
        let mut b = FilterState::zeroed(6);
        let mut c = FilterState::zeroed(6);
        for _ in 0..200 {
            let xv: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = taps(&xv);
            let y: f64 = rng.random_range(-2.0..2.0);
            a = za_lms_step(
                &a,
                &x,
                y,
                &ZaLms {
                    mu_s: 0.008,
                    rho_zas: 0.0,
                },
            )
            .unwrap();
            b = rza_lms_step(
                &b,
                &x,
                y,
                &RzaLms {
                    mu_s: 0.008,
                    rho_rzas: 0.0,
                    epsilon: 20.0,
                },
            )
            .unwrap();
            c = lms_step(&c, &x, y, &Lms { mu_s: 0.008 }).unwrap();
            for i in 0..6 {
                assert_eq!(a.weights()[i].to_bits(), c.weights()[i].to_bits());
                assert_eq!(b.weights()[i].to_bits(), c.weights()[i].to_bits());
            }
        }
    }

    #[test]
    fn sign_vec_examples() {
        let v = sign_vec(&taps(&[0.3, 0.0, -2.0]));
        assert_eq!(v.as_slice(), &[1.0, 0.0, -1.0]);
        let z = sign_vec(&TapVector::zeros(4));
        assert!(z.iter().all(|&s| s == 0.0));
        // scale invariance under positive scaling
        let a = taps(&[0.5, -0.1, 0.0, 3.0]);
        let mut b = a.clone();
        b.scale(17.0);
        assert_eq!(sign_vec(&a), sign_vec(&b));
    }

    #[test]
    fn step_record_contents() {
        let state = FilterState::zeroed(2);
        let x = taps(&[1.0, 0.0]);
        let params = AlgoParams::Lmsf(Lmsf {
            mu: 0.04,
            lambda: 0.8,
        });
        let (_, rec) = step(&state, &x, 1.0, &params).unwrap();
        assert_eq!(rec.error, 1.0);
        assert!((rec.effective_step - 0.04 / 1.8).abs() < 1e-15);
        assert!(rec.shrink_applied.iter().all(|&s| s == 0.0));
        assert!(rec.effective_step > 0.0 && rec.effective_step <= 0.04);

        let fixed = AlgoParams::Lms(Lms { mu_s: 0.008 });
        let (_, rec) = step(&state, &x, 1.0, &fixed).unwrap();
        assert_eq!(rec.effective_step, 0.008);
    }

    #[test]
    fn divergence_raises_error() {
        let mut state = FilterState::zeroed(2);
        let x = taps(&[1.0, 1.0]);
        let params = Lmf { mu: 10.0 };
        let mut diverged = false;
        for i in 0..200 {
            match lmf_step(&state, &x, (i + 1) as f64 * 100.0, &params) {
                Ok(next) => state = next,
                Err(FilterError::Diverged { .. }) => {
                    diverged = true;
                    break;
                }
                Err(other) => panic!("unexpected error {other}"),
            }
        }
        assert!(
            diverged,
            "oversized LMF step must trip the divergence guard"
        );
    }

    #[test]
    fn steps_are_deterministic() {
        let state = state_of(&[0.1, -0.4, 0.2]);
        let x = taps(&[0.5, 1.0, -0.7]);
        let params = AlgoParams::RzaLmsf(RzaLmsf {
            mu: 0.04,
            lambda: 0.8,
            rho_rza: 0.06,
            epsilon: 20.0,
        });
        let (a, ra) = step(&state, &x, 0.9, &params).unwrap();
        let (b, rb) = step(&state, &x, 0.9, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn params_validation() {
        assert!(AlgoParams::Lmsf(Lmsf {
            mu: 0.04,
            lambda: 0.8
        })
        .validate()
        .is_ok());
        assert!(AlgoParams::Lmsf(Lmsf {
            mu: -0.04,
            lambda: 0.8
        })
        .validate()
        .is_err());
        assert!(AlgoParams::Lmsf(Lmsf {
            mu: 0.04,
            lambda: 0.0
        })
        .validate()
        .is_err());
        assert!(AlgoParams::ZaLmsf(ZaLmsf {
            mu: 0.04,
            lambda: 0.8,
            rho_za: -1e-4
        })
        .validate()
        .is_err());
        assert!(AlgoParams::RzaLms(RzaLms {
            mu_s: 0.008,
            rho_rzas: 0.8,
            epsilon: 0.0
        })
        .validate()
        .is_err());
    }
}

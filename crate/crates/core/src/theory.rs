//! Closed-form steady-state predictions.
//!
//! The conditional step-size ratio of the LMS/F family,
//!
//! ```text
//! β = 1 − √(πλ/2σ_e²) · exp(λ/2σ_e²) · erfc(√(λ/2σ_e²)),
//! ```
//!
//! couples the steady-state MSE to the threshold λ through the error
//! variance σ_e² = σ_n² + σ_x²·D. [`lmsf_steady_mse`] solves the resulting
//! scalar fixed point by damped iteration; [`beta_quadrature`] evaluates
//! the defining Gaussian expectation E[e²/(e²+λ)] directly and serves as an
//! independent check on the closed form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taps::TapVector;

pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-12;
pub const DEFAULT_FIXED_POINT_MAX_ITER: usize = 10_000;
const FIXED_POINT_DAMPING: f64 = 0.5;

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("{name} = {value} must be positive and finite")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} must be non-negative and finite")]
    Negative { name: &'static str, value: f64 },
    #[error("step-size {mu} at or above the stability bound 2/((N+2)σ_x²) = {bound}")]
    Unstable { mu: f64, bound: f64 },
    #[error("sparsity k = {k} exceeds channel length n = {n}")]
    SparsityExceedsLength { k: usize, n: usize },
    #[error("channel length must be at least 1")]
    ZeroLength,
    #[error(
        "fixed point not reached: residual {residual} > tol {tol} after {max_iter} iterations"
    )]
    NoConvergence {
        residual: f64,
        tol: f64,
        max_iter: usize,
    },
    #[error("quadrature did not converge; residual estimate {residual}")]
    QuadratureFailure { residual: f64 },
    #[error("negative discriminant p = {p} in the zero-attractor bound")]
    NegativeDiscriminant { p: f64 },
}

/// Parameters of the steady-state analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateInput {
    pub mu: f64,
    pub lambda: f64,
    pub n_len: usize,
    pub k_sparsity: usize,
    pub sigma_x_sq: f64,
    pub sigma_n_sq: f64,
    /// Shrink strength γ_ZA; only the zero-attractor bound reads it.
    pub gamma_za: f64,
}

impl SteadyStateInput {
    fn validate(&self) -> Result<(), TheoryError> {
        check_positive("mu", self.mu)?;
        check_positive("lambda", self.lambda)?;
        check_positive("sigma_x_sq", self.sigma_x_sq)?;
        check_positive("sigma_n_sq", self.sigma_n_sq)?;
        if self.n_len == 0 {
            return Err(TheoryError::ZeroLength);
        }
        if self.k_sparsity > self.n_len {
            return Err(TheoryError::SparsityExceedsLength {
                k: self.k_sparsity,
                n: self.n_len,
            });
        }
        if !(self.gamma_za.is_finite() && self.gamma_za >= 0.0) {
            return Err(TheoryError::Negative {
                name: "gamma_za",
                value: self.gamma_za,
            });
        }
        Ok(())
    }
}

/// Solved steady state of the LMS/F fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStateReport {
    /// Steady-state conditional step ratio β(∞) ∈ [0, 1].
    pub beta_inf: f64,
    /// Predicted steady-state MSE D(∞).
    pub d_predicted: f64,
    /// Steady-state conditional error variance σ_e²(∞).
    pub sigma_e_sq_inf: f64,
    pub iterations_to_converge: usize,
    /// Final |D − F(D)|.
    pub residual: f64,
}

fn check_positive(name: &'static str, value: f64) -> Result<(), TheoryError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(TheoryError::NonPositive { name, value })
    }
}

/// Scaled complementary error function `exp(x²)·erfc(x)` for x ≥ 0.
///
/// Direct evaluation of exp(λ/2σ_e²)·erfc(·) overflows once the argument
/// ratio is large; the scaled form stays bounded. Below the crossover the
/// direct product is exact enough; above it a Laplace continued fraction
/// avoids the overflowing exponential entirely.
fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 5.0 {
        (x * x).exp() * libm::erfc(x)
    } else {
        // 2 e^{x²} ∫_x^∞ e^{-t²} dt = 1/(x + 1/(2x + 2/(x + 3/(2x + …))))
        let mut tail = 0.0;
        for k in (1..=60u32).rev() {
            let denom = if k % 2 == 1 { 2.0 * x } else { x };
            tail = f64::from(k) / (denom + tail);
        }
        1.0 / (SQRT_PI * (x + tail))
    }
}

/// β as a function of the ratio r = λ/σ_e², via the scaled erfc form
/// `β = 1 − √π·x·erfcx(x)` with x = √(r/2).
pub fn beta_closed_form(lambda: f64, sigma_e_sq: f64) -> Result<f64, TheoryError> {
    check_positive("lambda", lambda)?;
    check_positive("sigma_e_sq", sigma_e_sq)?;
    let x = (lambda / (2.0 * sigma_e_sq)).sqrt();
    Ok((1.0 - SQRT_PI * x * erfcx(x)).clamp(0.0, 1.0))
}

/// Independent oracle for [`beta_closed_form`]: adaptive quadrature of
/// `E[e²/(e²+λ)]` for `e ~ Normal(0, σ_e²)`.
///
/// Accepts λ = 0 (the integrand is then identically 1).
pub fn beta_quadrature(lambda: f64, sigma_e_sq: f64) -> Result<f64, TheoryError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(TheoryError::Negative {
            name: "lambda",
            value: lambda,
        });
    }
    check_positive("sigma_e_sq", sigma_e_sq)?;
    if lambda == 0.0 {
        // the integrand ratio is identically 1, so the expectation is 1
        return Ok(1.0);
    }
    // substitute e = σ_e √2 u:  β = (2/√π) ∫₀^∞ u²/(u² + x²) e^{−u²} du
    let x_sq = lambda / (2.0 * sigma_e_sq);
    let integrand = move |u: f64| {
        let u2 = u * u;
        (2.0 / SQRT_PI) * (u2 / (u2 + x_sq)) * (-u2).exp()
    };
    // e^{-81} ≈ 7e-36: the truncated tail is far below the tolerance
    adaptive_simpson(&integrand, 0.0, 9.0, 1e-12, 52)
}

/// Adaptive Simpson quadrature with a per-panel acceptance test.
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64, TheoryError> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    struct Panel {
        value: f64,
        residual: f64,
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Panel {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Panel {
                value: left + right + delta / 15.0,
                residual: 0.0,
            };
        }
        if depth == 0 {
            return Panel {
                value: left + right,
                residual: delta.abs(),
            };
        }
        let l = recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1);
        let r = recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
        Panel {
            value: l.value + r.value,
            residual: l.residual + r.residual,
        }
    }

    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    let panel = recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
    if panel.residual > tol {
        Err(TheoryError::QuadratureFailure {
            residual: panel.residual,
        })
    } else {
        Ok(panel.value)
    }
}

/// Conditional error variance σ_e² = σ_n² + σ_x²·D.
pub fn conditional_error_var(sigma_n_sq: f64, sigma_x_sq: f64, d: f64) -> f64 {
    sigma_n_sq + sigma_x_sq * d
}

/// Stability bound 2/((N+2)σ_x²) on the (effective) step-size.
pub fn stability_bound(n_len: usize, sigma_x_sq: f64) -> f64 {
    2.0 / ((n_len as f64 + 2.0) * sigma_x_sq)
}

/// Steady-state MSE formula `μ_eff · taps · σ_n² / (2 − μ_eff (N+2) σ_x²)`
/// shared by the LMS, LMS/F, and oracle expressions.
fn mse_formula(mu_eff: f64, tap_count: f64, n_len: usize, sigma_n_sq: f64, sigma_x_sq: f64) -> f64 {
    mu_eff * tap_count * sigma_n_sq / (2.0 - mu_eff * (n_len as f64 + 2.0) * sigma_x_sq)
}

/// Closed-form steady-state MSE of fixed-step LMS,
/// `D = μ_s N σ_n² / (2 − μ_s σ_x² (N+2))`.
pub fn lms_steady_mse(
    mu_s: f64,
    n_len: usize,
    sigma_n_sq: f64,
    sigma_x_sq: f64,
) -> Result<f64, TheoryError> {
    check_positive("mu_s", mu_s)?;
    check_positive("sigma_x_sq", sigma_x_sq)?;
    if !(sigma_n_sq.is_finite() && sigma_n_sq >= 0.0) {
        return Err(TheoryError::Negative {
            name: "sigma_n_sq",
            value: sigma_n_sq,
        });
    }
    if n_len == 0 {
        return Err(TheoryError::ZeroLength);
    }
    let bound = stability_bound(n_len, sigma_x_sq);
    if mu_s >= bound {
        return Err(TheoryError::Unstable { mu: mu_s, bound });
    }
    Ok(mse_formula(
        mu_s,
        n_len as f64,
        n_len,
        sigma_n_sq,
        sigma_x_sq,
    ))
}

/// Solves the coupled steady state of LMS/F:
/// `D = μ β(λ/σ_e²(D)) N σ_n² / (2 − μ β (N+2) σ_x²)`.
///
/// Damped iteration `D ← (1−α)D + αF(D)` with α = 0.5 from the LMS value
/// at step μ; β ≤ 1 keeps the denominator positive whenever μ itself
/// satisfies the stability bound.
pub fn lmsf_steady_mse(
    input: &SteadyStateInput,
    tol: f64,
    max_iter: usize,
) -> Result<SteadyStateReport, TheoryError> {
    input.validate()?;
    check_positive("tol", tol)?;
    let bound = stability_bound(input.n_len, input.sigma_x_sq);
    if input.mu >= bound {
        return Err(TheoryError::Unstable {
            mu: input.mu,
            bound,
        });
    }
    let mut d = lms_steady_mse(input.mu, input.n_len, input.sigma_n_sq, input.sigma_x_sq)?;
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let sigma_e_sq = conditional_error_var(input.sigma_n_sq, input.sigma_x_sq, d);
        let beta = beta_closed_form(input.lambda, sigma_e_sq)?;
        let fd = mse_formula(
            input.mu * beta,
            input.n_len as f64,
            input.n_len,
            input.sigma_n_sq,
            input.sigma_x_sq,
        );
        residual = (d - fd).abs();
        if residual <= tol {
            // report the pair (β, F(β)) so that d_predicted satisfies the
            // MSE formula at beta_inf exactly, not merely within tol
            return Ok(SteadyStateReport {
                beta_inf: beta,
                d_predicted: fd,
                sigma_e_sq_inf: conditional_error_var(input.sigma_n_sq, input.sigma_x_sq, fd),
                iterations_to_converge: iteration,
                residual,
            });
        }
        d = (1.0 - FIXED_POINT_DAMPING) * d + FIXED_POINT_DAMPING * fd;
    }
    Err(TheoryError::NoConvergence {
        residual,
        tol,
        max_iter,
    })
}

/// Oracle (known-support) steady-state MSE
/// `D_orc = μ β(∞) K σ_n² / (2 − μ β(∞) σ_x² (N+2))` at the β(∞) solved by
/// [`lmsf_steady_mse`]; equals (K/N)·D_lmsf at the same β.
pub fn oracle_steady_mse(input: &SteadyStateInput) -> Result<f64, TheoryError> {
    let report = lmsf_steady_mse(input, DEFAULT_FIXED_POINT_TOL, DEFAULT_FIXED_POINT_MAX_ITER)?;
    Ok(mse_formula(
        input.mu * report.beta_inf,
        input.k_sparsity as f64,
        input.n_len,
        input.sigma_n_sq,
        input.sigma_x_sq,
    ))
}

/// Steady-state MSE bound of ZA-LMS/F.
///
/// With Δ_μ = 1 − μβ, Δ_K = 2 − (K+2)μβσ_x², Δ_N = 2 − (N+2)μβσ_x² and the
/// discriminant
/// `p = 8γ²Δ_K²Δ_μ²/π + 16μβσ_x²Δ_NΔ_μ²(γ²(K+1) + μ²β²σ_x²σ_n²)`,
///
/// ```text
/// D_ZA = D_lmsf − γ(N−K)√p/(√(2π)·μ²β²σ_x⁴Δ_N²)
///               + γ²·[2(N−K)Δ_μΔ_K + πΔ_N(μβσ_x² + 2KΔ_μ)]/(π·μ²β²σ_x⁴Δ_N²)
/// ```
///
/// so γ = 0 recovers D_lmsf exactly and the bound is finite for every
/// stable input.
pub fn za_steady_mse_bound(input: &SteadyStateInput) -> Result<f64, TheoryError> {
    let report = lmsf_steady_mse(input, DEFAULT_FIXED_POINT_TOL, DEFAULT_FIXED_POINT_MAX_ITER)?;
    let gamma = input.gamma_za;
    let mb = input.mu * report.beta_inf;
    let sx2 = input.sigma_x_sq;
    let n = input.n_len as f64;
    let k = input.k_sparsity as f64;
    let delta_mu = 1.0 - mb;
    let delta_k = 2.0 - (k + 2.0) * mb * sx2;
    let delta_n = 2.0 - (n + 2.0) * mb * sx2;
    let p = 8.0 * gamma * gamma * delta_k * delta_k * delta_mu * delta_mu / std::f64::consts::PI
        + 16.0
            * mb
            * sx2
            * delta_n
            * delta_mu
            * delta_mu
            * (gamma * gamma * (k + 1.0) + mb * mb * sx2 * input.sigma_n_sq);
    if p < 0.0 {
        return Err(TheoryError::NegativeDiscriminant { p });
    }
    let denom_base = mb * mb * sx2 * sx2 * delta_n * delta_n;
    let second = gamma * (n - k) * p.sqrt() / ((2.0 * std::f64::consts::PI).sqrt() * denom_base);
    let third = gamma
        * gamma
        * (2.0 * (n - k) * delta_mu * delta_k
            + std::f64::consts::PI * delta_n * (mb * sx2 + 2.0 * k * delta_mu))
        / (std::f64::consts::PI * denom_base);
    Ok(report.d_predicted - second + third)
}

/// Predicted steady-state mean bias of ZA-LMS/F under white input
/// (R = σ_x² I): `bias = −(γ_ZA/(μ β(∞) σ_x²)) · E{sgn(h̃(∞))}` per tap.
///
/// The expected sign vector is not available in closed form and is passed
/// in (typically estimated empirically or taken as sgn(h) for taps that
/// stay far from zero).
pub fn za_mean_bias(
    gamma_za: f64,
    mu: f64,
    beta_inf: f64,
    sigma_x_sq: f64,
    expected_sign: &TapVector,
) -> TapVector {
    let scale = gamma_za / (mu * beta_inf * sigma_x_sq);
    TapVector::from_vec(expected_sign.iter().map(|&s| -scale * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfcx_branches_agree() {
        // the continued fraction and the direct product overlap accurately
        // on both sides of the crossover
        for i in 0..=60 {
            let x = 3.0 + 0.1 * i as f64; // 3.0 .. 9.0
            let direct = (x * x).exp() * libm::erfc(x);
            let here = erfcx(x);
            assert!(
                ((here - direct) / direct).abs() < 1e-12,
                "x = {x}: {here} vs {direct}"
            );
        }
        assert!((erfcx(0.0) - 1.0).abs() < 1e-15);
        // asymptotic 1/(x√π) for huge x
        let x = 1e6;
        assert!(((erfcx(x) * x * SQRT_PI) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beta_limits() {
        // r → 0⁺: the subtracted term √(πr/2) vanishes
        let beta = beta_closed_form(1e-12, 1.0).unwrap();
        assert!(beta > 1.0 - 2e-6);
        // r → ∞: β ~ 1/r
        let beta = beta_closed_form(1e12, 1.0).unwrap();
        assert!(beta < 2e-12);
        assert!(beta >= 0.0);
    }

    #[test]
    fn beta_closed_form_rejects_bad_inputs() {
        assert!(beta_closed_form(0.0, 1.0).is_err());
        assert!(beta_closed_form(-1.0, 1.0).is_err());
        assert!(beta_closed_form(1.0, 0.0).is_err());
        assert!(beta_closed_form(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn beta_at_unit_ratio() {
        // frozen from the quadrature oracle: β(r=1) = 0.3443204…
        let q = beta_quadrature(1.0, 1.0).unwrap();
        assert!((q - 0.344_320).abs() < 1e-5, "quadrature gave {q}");
        let c = beta_closed_form(1.0, 1.0).unwrap();
        assert!((c - q).abs() < 1e-9);
    }

    #[test]
    fn beta_quadrature_matches_closed_form_on_log_grid() {
        for i in 0..=60 {
            let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
            let c = beta_closed_form(r, 1.0).unwrap();
            let q = beta_quadrature(r, 1.0).unwrap();
            assert!((c - q).abs() <= 1e-6, "r = {r}: closed {c}, quad {q}");
        }
        // scale invariance: only the ratio matters
        let a = beta_closed_form(0.8, 0.1).unwrap();
        let b = beta_closed_form(8.0, 1.0).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn beta_quadrature_zero_lambda_is_one() {
        assert_eq!(beta_quadrature(0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn beta_monotone_decreasing_in_ratio() {
        let mut last = 2.0;
        for i in 0..=50 {
            let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 50.0);
            let b = beta_closed_form(r, 1.0).unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn conditional_error_var_values() {
        assert_eq!(conditional_error_var(0.1, 1.0, 0.0), 0.1);
        assert!((conditional_error_var(0.1, 1.0, 0.05) - 0.15).abs() < 1e-15);
        assert_eq!(conditional_error_var(0.0, 1.0, 0.25), 0.25);
    }

    #[test]
    fn lms_mse_table_value() {
        let d = lms_steady_mse(0.008, 16, 0.1, 1.0).unwrap();
        assert!((d - 0.0128 / 1.856).abs() < 1e-12);
        assert_eq!(lms_steady_mse(0.008, 16, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn lms_mse_stability_pole() {
        let bound = stability_bound(16, 1.0);
        assert!(matches!(
            lms_steady_mse(bound, 16, 0.1, 1.0),
            Err(TheoryError::Unstable { .. })
        ));
        assert!(matches!(
            lms_steady_mse(bound * 1.5, 16, 0.1, 1.0),
            Err(TheoryError::Unstable { .. })
        ));
        // just below the pole the value blows up but stays finite
        let d = lms_steady_mse(bound * (1.0 - 1e-9), 16, 0.1, 1.0).unwrap();
        assert!(d > 1e6);
    }

    fn table1_input() -> SteadyStateInput {
        SteadyStateInput {
            mu: 0.04,
            lambda: 0.8,
            n_len: 16,
            k_sparsity: 2,
            sigma_x_sq: 1.0,
            sigma_n_sq: 0.1,
            gamma_za: 0.0,
        }
    }

    #[test]
    fn lmsf_fixed_point_reference_values() {
        // frozen from the converged fixed point at the reference setup
        let report = lmsf_steady_mse(&table1_input(), 1e-12, 10_000).unwrap();
        assert!(report.residual <= 1e-12);
        assert!(
            (report.d_predicted - 3.24e-3).abs() < 2e-4,
            "D = {}",
            report.d_predicted
        );
        assert!(
            (report.beta_inf - 0.098).abs() < 5e-3,
            "beta = {}",
            report.beta_inf
        );
        assert!(
            (report.sigma_e_sq_inf - (0.1 + report.d_predicted)).abs() < 1e-15,
            "sigma_e² consistency"
        );
    }

    #[test]
    fn lmsf_fixed_point_unique_from_any_start() {
        // restarting the damped iteration from several initial values inside
        // (0, D_max) lands on the same solution
        let input = table1_input();
        let reference = lmsf_steady_mse(&input, 1e-13, 10_000).unwrap();
        let f = |d: f64| {
            let se2 = conditional_error_var(input.sigma_n_sq, input.sigma_x_sq, d);
            let beta = beta_closed_form(input.lambda, se2).unwrap();
            mse_formula(
                input.mu * beta,
                16.0,
                16,
                input.sigma_n_sq,
                input.sigma_x_sq,
            )
        };
        for d0 in [1e-6, 1e-3, 0.02, 0.049] {
            let mut d = d0;
            for _ in 0..10_000 {
                let fd = f(d);
                if (d - fd).abs() <= 1e-13 {
                    d = fd;
                    break;
                }
                d = 0.5 * d + 0.5 * fd;
            }
            assert!(
                (d - reference.d_predicted).abs() < 1e-10,
                "start {d0} → {d} vs {}",
                reference.d_predicted
            );
        }
    }

    #[test]
    fn lmsf_degenerates_to_lms_for_tiny_lambda() {
        let mut input = table1_input();
        input.lambda = 1e-300;
        let report = lmsf_steady_mse(&input, 1e-14, 10_000).unwrap();
        let lms = lms_steady_mse(0.04, 16, 0.1, 1.0).unwrap();
        assert_eq!(report.beta_inf, 1.0);
        assert!((report.d_predicted - lms).abs() <= 1e-15 * lms.abs());
    }

    #[test]
    fn lmsf_below_lms_for_positive_lambda() {
        let lms = lms_steady_mse(0.04, 16, 0.1, 1.0).unwrap();
        for lambda in [0.1, 0.8, 5.0] {
            let mut input = table1_input();
            input.lambda = lambda;
            let report = lmsf_steady_mse(&input, 1e-12, 10_000).unwrap();
            assert!(report.d_predicted < lms, "lambda = {lambda}");
        }
    }

    #[test]
    fn lmsf_rejects_unstable_and_invalid() {
        let mut input = table1_input();
        input.mu = stability_bound(16, 1.0);
        assert!(matches!(
            lmsf_steady_mse(&input, 1e-12, 10_000),
            Err(TheoryError::Unstable { .. })
        ));
        let mut input = table1_input();
        input.sigma_n_sq = 0.0;
        assert!(lmsf_steady_mse(&input, 1e-12, 10_000).is_err());
        let mut input = table1_input();
        input.k_sparsity = 17;
        assert!(matches!(
            lmsf_steady_mse(&input, 1e-12, 10_000),
            Err(TheoryError::SparsityExceedsLength { .. })
        ));
    }

    #[test]
    fn oracle_identity_and_dense_limit() {
        let input = table1_input();
        let report = lmsf_steady_mse(&input, 1e-12, 10_000).unwrap();
        let orc = oracle_steady_mse(&input).unwrap();
        let ratio_form = report.d_predicted * 2.0 / 16.0;
        assert!((orc - ratio_form).abs() <= 1e-14 * ratio_form);

        let mut dense = input;
        dense.k_sparsity = 16;
        let orc_dense = oracle_steady_mse(&dense).unwrap();
        assert!((orc_dense - report.d_predicted).abs() <= 1e-14 * report.d_predicted);
    }

    #[test]
    fn oracle_formula_at_unit_beta() {
        // μβK σ_n² / (2 − μβσ_x²(N+2)) at β = 1, μ = 0.04, K = 2, N = 16
        let v = mse_formula(0.04, 2.0, 16, 0.1, 1.0);
        assert!((v - 0.008 / 1.28).abs() < 1e-15);
    }

    #[test]
    fn za_bound_recovers_lmsf_at_zero_gamma() {
        let input = table1_input();
        let report = lmsf_steady_mse(&input, 1e-12, 10_000).unwrap();
        let bound = za_steady_mse_bound(&input).unwrap();
        assert_eq!(bound, report.d_predicted);
    }

    #[test]
    fn za_bound_improves_for_some_gamma() {
        let base = table1_input();
        let d_lmsf = lmsf_steady_mse(&base, 1e-12, 10_000).unwrap().d_predicted;
        let mut found = false;
        for i in 0..40 {
            let gamma = 10f64.powf(-8.0 + 6.0 * i as f64 / 39.0);
            let mut input = base;
            input.gamma_za = gamma;
            let b = za_steady_mse_bound(&input).unwrap();
            assert!(b.is_finite());
            if b < d_lmsf {
                found = true;
            }
        }
        assert!(found, "no improving gamma on the grid");
    }

    #[test]
    fn za_mean_bias_vector() {
        let sign = TapVector::from_vec(vec![1.0, 0.0, -1.0]);
        let bias = za_mean_bias(8e-5, 0.04, 0.1, 1.0, &sign);
        let scale = 8e-5 / (0.04 * 0.1);
        assert!((bias[0] + scale).abs() < 1e-15);
        assert_eq!(bias[1], 0.0);
        assert!((bias[2] - scale).abs() < 1e-15);

        let no_bias = za_mean_bias(0.0, 0.04, 0.1, 1.0, &sign);
        assert!(no_bias.iter().all(|&b| b == 0.0));
    }
}

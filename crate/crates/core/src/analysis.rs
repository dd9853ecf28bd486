//! Closed-form theory for the noisy soft-max consensus recursion with
//! `α(t) = a/(t+1)`:
//!
//! * limit MSE of the consensus value around `ȳ`,
//! * norm of the asymptotic covariance of `√t (y(t) - θ₀ 1)`, its optimal
//!   step constant `a*` and optimal norm `‖C*‖`,
//! * iteration lower bounds from an accuracy split `(ε₁, ε₂)`, for generic
//!   transmit functions and for the polynomial / exponential tail families,
//! * the shifted-function variant `g(x) = h(x - T)`.
//!
//! All formulas are evaluated at the proxy `θ₀ ≈ ȳ = (1/N) Σ e^{βx_i}`.
//! [`covariance_matrix`] builds the full covariance from the Laplacian
//! eigenbasis and serves as an independent check on [`covariance_norm`].

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Spectrum;
use crate::mapping::map_initial;
use crate::nonlin::TransmitFunction;

/// `Σ_{t≥0} 1/(t+1)² = π²/6`.
pub const BASEL: f64 = PI * PI / 6.0;

/// Derivatives at or below this are treated as underflowed.
pub const DERIVATIVE_FLOOR: f64 = 1e-300;

/// `ξ_N = (σ²/N) Σ_t α(t)² = (σ²/N) a² π²/6`.
pub fn theoretical_mse(noise_variance: f64, n: usize, a: f64) -> f64 {
    noise_variance / n as f64 * a * a * BASEL
}

/// `(σ²/N) Σ_{t<T} α(t)²`: the exact variance of the mean state after `T`
/// iterations. Never exceeds [`theoretical_mse`].
pub fn finite_horizon_mse(noise_variance: f64, n: usize, a: f64, iterations: usize) -> f64 {
    // Smallest terms first.
    let partial: f64 = (1..=iterations).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    noise_variance / n as f64 * a * a * partial
}

fn check_derivative(h_prime: f64) -> Result<()> {
    if !(h_prime > DERIVATIVE_FLOOR) {
        return Err(Error::DegenerateDerivative(h_prime));
    }
    Ok(())
}

fn check_stability(a: f64, lambda: f64, h_prime: f64) -> Result<()> {
    let margin = 2.0 * a * lambda * h_prime;
    if !(margin > 1.0) {
        return Err(Error::StabilityViolated(margin));
    }
    Ok(())
}

/// `‖C‖ = max{a²σ², (1/N) a²σ² / (2 a h'(θ₀) λ₂ - 1)}`.
pub fn covariance_norm(a: f64, noise_variance: f64, n: usize, lambda2: f64, h_prime: f64) -> Result<f64> {
    check_stability(a, lambda2, h_prime)?;
    let common = a * a * noise_variance;
    let fluctuation = common / (n as f64 * (2.0 * a * h_prime * lambda2 - 1.0));
    Ok(common.max(fluctuation))
}

/// Asymptotic covariance `C = (a²σ²/N) 1 1ᵀ + (1/N) Φ S Φᵀ`.
///
/// `S` solves the Lyapunov equation `M S + S M + a² C_ñ = 0` with
/// `M = a h'(θ₀) B + I/2` and `C_ñ = σ² I`. `M` is diagonal in the
/// Laplacian eigenbasis, so `S_ij = -a² (C_ñ)_ij / (M_ii + M_jj)`.
pub fn covariance_matrix(spectrum: &Spectrum, a: f64, noise_variance: f64, h_prime: f64) -> Result<DMatrix<f64>> {
    let n = spectrum.node_count();
    let b = spectrum.b_matrix();
    let m = b * (a * h_prime) + DMatrix::identity(n - 1, n - 1) * 0.5;
    // Stability: every M_ii < 0, i.e. H_ii = 2 a h' λ_{i+1} - 1 > 0.
    if let Some(worst) = m.diagonal().iter().copied().reduce(f64::max) {
        if !(worst < 0.0) {
            return Err(Error::StabilityViolated(1.0 - 2.0 * worst));
        }
    }
    let noise_cov = DMatrix::identity(n - 1, n - 1) * noise_variance;
    let s = DMatrix::from_fn(n - 1, n - 1, |i, j| -a * a * noise_cov[(i, j)] / (m[(i, i)] + m[(j, j)]));

    let phi = spectrum.phi();
    let ones = DVector::from_element(n, 1.0);
    let consensus_part = &ones * ones.transpose() * (a * a * noise_variance / n as f64);
    let disagreement_part = &phi * s * phi.transpose() / n as f64;
    Ok(consensus_part + disagreement_part)
}

/// Largest eigenvalue of [`covariance_matrix`].
pub fn covariance_norm_oracle(spectrum: &Spectrum, a: f64, noise_variance: f64, h_prime: f64) -> Result<f64> {
    let c = covariance_matrix(spectrum, a, noise_variance, h_prime)?;
    let eig = SymmetricEigen::try_new(c, 1e-14, 10_000)
        .ok_or_else(|| Error::EigensolverFailure("covariance eigenproblem".into()))?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// `a* = (N+1) / (2 N λ₂ h'(θ₀))`, the minimizer of [`covariance_norm`].
pub fn optimal_step(n: usize, lambda2: f64, h_prime: f64) -> Result<f64> {
    check_derivative(h_prime)?;
    if !(lambda2 > 0.0) {
        return Err(Error::InvalidConfig(format!("lambda2 must be positive, got {lambda2}")));
    }
    let n = n as f64;
    Ok((n + 1.0) / (2.0 * n * lambda2 * h_prime))
}

/// `‖C*‖ = ((N+1)/2N)² σ² / (λ₂² h'(θ₀)²)`.
pub fn optimal_covariance_norm(n: usize, lambda2: f64, noise_variance: f64, h_prime: f64) -> Result<f64> {
    check_derivative(h_prime)?;
    let ratio = (n as f64 + 1.0) / (2.0 * n as f64);
    Ok(ratio * ratio * noise_variance / (lambda2 * lambda2 * h_prime * h_prime))
}

/// `θ₀ ≈ ȳ = (1/N) Σ e^{βx_i}`.
pub fn theta0_proxy(x: &[f64], beta: f64) -> Result<f64> {
    Ok(map_initial(x, beta)?.y_bar)
}

/// Iteration lower bound `t* ≥ ‖C*‖/ε₁` with `β = log N / ε₂` and `h'`
/// evaluated at `(1/N) Σ e^{βx_i}`.
pub fn min_iterations(eps1: f64, eps2: f64, lambda2: f64, noise_variance: f64, function: &TransmitFunction, x: &[f64]) -> Result<f64> {
    check_targets(eps1, eps2)?;
    let n = x.len();
    let beta_min = (n as f64).ln() / eps2;
    let theta = theta0_proxy(x, beta_min)?;
    let h_prime = function.derivative(theta);
    Ok(optimal_covariance_norm(n, lambda2, noise_variance, h_prime)? / eps1)
}

fn check_targets(eps1: f64, eps2: f64) -> Result<()> {
    if !(eps1 > 0.0 && eps2 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "error targets must be positive, got eps1 = {eps1}, eps2 = {eps2}"
        )));
    }
    Ok(())
}

/// Inputs shared by the tail-family iteration bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub eps1: f64,
    pub eps2: f64,
    pub n: usize,
    pub lambda2: f64,
    pub noise_variance: f64,
    /// Linear transmit power scale.
    pub gamma: f64,
    pub x_max: f64,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        check_targets(self.eps1, self.eps2)?;
        if !(self.eps2 < self.x_max) {
            return Err(Error::InvalidErrorTarget {
                eps2: self.eps2,
                x_max: self.x_max,
            });
        }
        Ok(())
    }

    /// `x_max/ε₂ - 1`.
    fn excess(&self) -> f64 {
        self.x_max / self.eps2 - 1.0
    }

    fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// `((N+1)/2N)² (σ²/λ₂²) (1/ε₁)`: the factor common to every bound.
    fn prefactor(&self) -> f64 {
        let ratio = (self.n as f64 + 1.0) / (2.0 * self.n as f64);
        ratio * ratio * self.noise_variance / (self.lambda2 * self.lambda2) / self.eps1
    }
}

/// Tail slope of `√γ (1 - 1/(x^p + 1))` at the dominant mapped value:
/// `p √γ (log N) x_max / (ε₂² N^{p(x_max/ε₂ - 1)})`.
pub fn polynomial_tail_slope(b: &BoundInputs, p: f64) -> f64 {
    p * b.gamma.sqrt() * b.log_n() * b.x_max / (b.eps2 * b.eps2 * (b.n as f64).powf(p * b.excess()))
}

/// Iteration bound for the polynomial family with exponent `p`.
pub fn polynomial_family_bound(b: &BoundInputs, p: f64) -> Result<f64> {
    b.validate()?;
    if !(p > 0.0) {
        return Err(Error::InvalidShapeParameter { name: "p", value: p });
    }
    Ok(b.prefactor() / polynomial_tail_slope(b, p).powi(2))
}

/// `p* = 1 / ((log N)(x_max/ε₂ - 1))`.
pub fn optimal_p(eps2: f64, n: usize, x_max: f64) -> Result<f64> {
    if !(eps2 > 0.0 && eps2 < x_max) {
        return Err(Error::InvalidErrorTarget { eps2, x_max });
    }
    Ok(1.0 / ((n as f64).ln() * (x_max / eps2 - 1.0)))
}

/// Closed form of the polynomial bound at `p*`:
/// prefactor · `ε₂⁴ e² (x_max/ε₂ - 1)² / (γ x_max²)`.
pub fn polynomial_optimal_bound(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let e4 = b.eps2.powi(4);
    Ok(b.prefactor() * e4 * E * E * b.excess().powi(2) / (b.gamma * b.x_max * b.x_max))
}

/// Tail slope of `√γ (1 - e^{-qx})` at the dominant mapped value:
/// `q √γ (log N) x_max N^{x_max/ε₂ - 1} / (ε₂² e^{q N^{x_max/ε₂ - 1}})`.
pub fn exponential_tail_slope(b: &BoundInputs, q: f64) -> f64 {
    let growth = (b.n as f64).powf(b.excess());
    q * b.gamma.sqrt() * b.log_n() * b.x_max * growth / (b.eps2 * b.eps2) * (-q * growth).exp()
}

/// Iteration bound for the exponential family with rate `q`.
pub fn exponential_family_bound(b: &BoundInputs, q: f64) -> Result<f64> {
    b.validate()?;
    if !(q > 0.0) {
        return Err(Error::InvalidShapeParameter { name: "q", value: q });
    }
    Ok(b.prefactor() / exponential_tail_slope(b, q).powi(2))
}

/// `q* = N^{1 - x_max/ε₂}`.
pub fn optimal_q(eps2: f64, n: usize, x_max: f64) -> Result<f64> {
    if !(eps2 > 0.0 && eps2 <= x_max) {
        return Err(Error::InvalidErrorTarget { eps2, x_max });
    }
    Ok((n as f64).powf(1.0 - x_max / eps2))
}

/// Closed form of the exponential bound at `q*`:
/// prefactor · `ε₂⁴ e² / (γ x_max² (log N)²)`.
pub fn exponential_optimal_bound(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let e4 = b.eps2.powi(4);
    Ok(b.prefactor() * e4 * E * E / (b.gamma * b.x_max * b.x_max * b.log_n().powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    Polynomial,
    Exponential,
}

/// Exponential iff `(x_max/ε₂ - 1)² > (log N)^{-2}`; ties go polynomial.
pub fn family_selector(eps2: f64, n: usize, x_max: f64) -> Result<FamilyChoice> {
    if !(eps2 > 0.0 && eps2 < x_max) {
        return Err(Error::InvalidErrorTarget { eps2, x_max });
    }
    let lhs = (x_max / eps2 - 1.0).powi(2);
    let rhs = (n as f64).ln().powi(-2);
    Ok(if lhs > rhs {
        FamilyChoice::Exponential
    } else {
        FamilyChoice::Polynomial
    })
}

/// Optimal step and covariance norm for `g(x) = h(x - shift)`:
/// `a*_s` and `‖C_s*‖` with `h'(θ₀ - shift)` in place of `h'(θ₀)`.
///
/// `function` may already carry a shift; it is replaced by `shift`.
pub fn shifted_analysis(n: usize, lambda2: f64, noise_variance: f64, function: &TransmitFunction, shift: f64, theta0: f64) -> Result<(f64, f64)> {
    let g = function.with_shift(shift);
    let slope = g.derivative(theta0);
    Ok((
        optimal_step(n, lambda2, slope)?,
        optimal_covariance_norm(n, lambda2, noise_variance, slope)?,
    ))
}

/// Everything the theory says about one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub nodes: usize,
    pub lambda2: f64,
    pub beta: f64,
    pub noise_variance: f64,
    pub gamma_linear: f64,
    pub x_max: f64,
    pub soft_max: f64,
    pub theta0_proxy: f64,
    /// `h'(θ₀)` of the unshifted function.
    pub h_prime_at_theta0: f64,
    /// Step constant the scenario actually runs with.
    pub step_constant: f64,
    #[serde(rename = "xi_N")]
    pub xi_n: f64,
    /// `‖C‖` at `step_constant` for the function as run (shift included);
    /// `None` when that step is outside the stable region.
    pub c_norm: Option<f64>,
    pub a_star: f64,
    pub c_star_norm: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub t_star_bound: Option<f64>,
    pub p_star: Option<f64>,
    pub q_star: Option<f64>,
    pub polynomial_bound_at_p_star: Option<f64>,
    pub exponential_bound_at_q_star: Option<f64>,
    pub family_choice: Option<FamilyChoice>,
    pub shift: f64,
    pub a_star_s: f64,
    pub c_star_s_norm: f64,
    /// Quantities that could not be evaluated, with the reason.
    pub notes: Vec<String>,
}

/// Inputs for [`analyze`].
#[derive(Debug, Clone, Copy)]
pub struct Scenario<'a> {
    pub x: &'a [f64],
    pub lambda2: f64,
    pub beta: f64,
    pub noise_variance: f64,
    pub step_constant: f64,
    /// Transmit function as run; its shift feeds the shifted quantities.
    pub function: &'a TransmitFunction,
    pub eps1: f64,
    pub eps2: f64,
}

pub fn analyze(s: &Scenario<'_>) -> Result<AnalysisReport> {
    let n = s.x.len();
    let mut notes = Vec::new();
    let base = s.function.unshifted();
    let theta0 = theta0_proxy(s.x, s.beta)?;
    let h_prime = base.derivative(theta0);
    let x_max = s.x.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let run_slope = s.function.derivative(theta0);
    let c_norm = match covariance_norm(s.step_constant, s.noise_variance, n, s.lambda2, run_slope) {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("c_norm: {e}"));
            None
        }
    };
    let t_star_bound = match min_iterations(s.eps1, s.eps2, s.lambda2, s.noise_variance, &base, s.x) {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("t_star_bound: {e}"));
            None
        }
    };

    let bounds = BoundInputs {
        eps1: s.eps1,
        eps2: s.eps2,
        n,
        lambda2: s.lambda2,
        noise_variance: s.noise_variance,
        gamma: base.gamma(),
        x_max,
    };
    let mut family = |label: &str, r: Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{label}: {e}"));
            None
        }
    };
    let p_star = family("p_star", optimal_p(s.eps2, n, x_max));
    let q_star = family("q_star", optimal_q(s.eps2, n, x_max).and_then(|q| bounds.validate().map(|_| q)));
    let polynomial_bound_at_p_star = family("polynomial_bound", polynomial_optimal_bound(&bounds));
    let exponential_bound_at_q_star = family("exponential_bound", exponential_optimal_bound(&bounds));
    let family_choice = family_selector(s.eps2, n, x_max).ok();

    let (a_star_s, c_star_s_norm) = shifted_analysis(n, s.lambda2, s.noise_variance, &base, s.function.shift(), theta0)?;

    Ok(AnalysisReport {
        nodes: n,
        lambda2: s.lambda2,
        beta: s.beta,
        noise_variance: s.noise_variance,
        gamma_linear: base.gamma(),
        x_max,
        soft_max: crate::mapping::soft_max(s.x, s.beta)?,
        theta0_proxy: theta0,
        h_prime_at_theta0: h_prime,
        step_constant: s.step_constant,
        xi_n: theoretical_mse(s.noise_variance, n, s.step_constant),
        c_norm,
        a_star: optimal_step(n, s.lambda2, h_prime)?,
        c_star_norm: optimal_covariance_norm(n, s.lambda2, s.noise_variance, h_prime)?,
        eps1: s.eps1,
        eps2: s.eps2,
        t_star_bound,
        p_star,
        q_star,
        polynomial_bound_at_p_star,
        exponential_bound_at_q_star,
        family_choice,
        shift: s.function.shift(),
        a_star_s,
        c_star_s_norm,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{spectral_decompose, Graph};
    use approx::assert_relative_eq;

    #[test]
    fn mse_values() {
        assert_eq!(theoretical_mse(0.0, 10, 3.0), 0.0);
        assert_relative_eq!(theoretical_mse(1.0, 1, 1.0), 1.644_934_066_848_226_4, max_relative = 1e-15);
        assert_relative_eq!(
            theoretical_mse(2.0, 20, 3.0),
            theoretical_mse(2.0, 10, 3.0) / 2.0,
            max_relative = 1e-15
        );
        let partial = finite_horizon_mse(1.0, 1, 1.0, 10_000_000);
        assert!(partial < theoretical_mse(1.0, 1, 1.0));
        assert_relative_eq!(partial, BASEL, max_relative = 1e-6);
    }

    #[test]
    fn covariance_norm_edges() {
        assert_eq!(covariance_norm(1.0, 0.0, 5, 2.0, 1.0).unwrap(), 0.0);
        assert!(matches!(covariance_norm(0.25, 1.0, 5, 2.0, 1.0), Err(Error::StabilityViolated(m)) if m == 1.0));
        // At a*, both branches coincide.
        let (n, l, h, s) = (9, 1.7, 0.3, 0.8);
        let a = optimal_step(n, l, h).unwrap();
        let first = a * a * s;
        let second = a * a * s / (n as f64 * (2.0 * a * h * l - 1.0));
        assert_relative_eq!(first, second, max_relative = 1e-12);
        assert_relative_eq!(covariance_norm(a, s, n, l, h).unwrap(), first, max_relative = 1e-15);
    }

    #[test]
    fn oracle_two_node_graph() {
        let spec = spectral_decompose(&Graph::complete(2).unwrap()).unwrap();
        let (a, s, h): (f64, f64, f64) = (1.3, 0.7, 0.6);
        // Hand-built 2×2: C = (a²σ²/2) 11ᵀ + (1/2) S φφᵀ, φ = (1,-1)/√2,
        // S = a²σ²/(2·a·h·2 - 1). Eigenvalues a²σ² and S/2.
        let big_s = a * a * s / (4.0 * a * h - 1.0);
        let expect = (a * a * s).max(big_s / 2.0);
        assert_relative_eq!(covariance_norm_oracle(&spec, a, s, h).unwrap(), expect, max_relative = 1e-12);
        assert_relative_eq!(covariance_norm(a, s, 2, 2.0, h).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn oracle_complete_graph_and_zero_noise() {
        let spec = spectral_decompose(&Graph::complete(3).unwrap()).unwrap();
        for (a, h) in [(0.5, 0.9), (2.0, 0.2), (10.0, 0.05)] {
            let closed = covariance_norm(a, 1.1, 3, 3.0, h).unwrap();
            let oracle = covariance_norm_oracle(&spec, a, 1.1, h).unwrap();
            assert_relative_eq!(closed, oracle, max_relative = 1e-10);
        }
        let c = covariance_matrix(&spec, 1.0, 0.0, 1.0).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
        assert_eq!(covariance_norm_oracle(&spec, 1.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn oracle_rejects_unstable_step() {
        let spec = spectral_decompose(&Graph::path(4).unwrap()).unwrap();
        let l2 = spec.algebraic_connectivity();
        let a = 0.9 / (2.0 * l2);
        assert!(matches!(covariance_norm_oracle(&spec, a, 1.0, 1.0), Err(Error::StabilityViolated(_))));
    }

    #[test]
    fn optimal_step_limits() {
        let (l, h) = (2.0, 0.5);
        let lower = 1.0 / (2.0 * l * h);
        let upper = 1.0 / (l * h);
        for n in [1, 2, 10, 75, 1_000_000] {
            let a = optimal_step(n, l, h).unwrap();
            assert!(a > lower && a <= upper);
        }
        assert_relative_eq!(optimal_step(1_000_000_000, l, h).unwrap(), lower, max_relative = 1e-8);
        assert!(matches!(optimal_step(5, 1.0, 0.0), Err(Error::DegenerateDerivative(_))));
        assert!(matches!(optimal_step(5, 1.0, 1e-301), Err(Error::DegenerateDerivative(_))));
        assert!(optimal_step(5, 0.0, 1.0).is_err());
    }

    #[test]
    fn optimal_norm_is_composition() {
        let (n, l, s, h) = (75, 3.4, 1.0, 0.02);
        let a = optimal_step(n, l, h).unwrap();
        assert_relative_eq!(
            optimal_covariance_norm(n, l, s, h).unwrap(),
            covariance_norm(a, s, n, l, h).unwrap(),
            max_relative = 1e-14
        );
        assert!(optimal_covariance_norm(n, 2.0 * l, s, h).unwrap() < optimal_covariance_norm(n, l, s, h).unwrap());
    }

    #[test]
    fn bound_targets_validated() {
        assert!(matches!(optimal_p(1.0, 75, 0.9), Err(Error::InvalidErrorTarget { .. })));
        assert!(matches!(optimal_q(1.0, 75, 0.9), Err(Error::InvalidErrorTarget { .. })));
        assert_eq!(optimal_q(0.9, 75, 0.9).unwrap(), 1.0);
        assert!(matches!(family_selector(0.9, 75, 0.9), Err(Error::InvalidErrorTarget { .. })));
        let f = TransmitFunction::tanh(1.0, 1.0).unwrap();
        assert!(min_iterations(0.0, 0.1, 1.0, 1.0, &f, &[0.5]).is_err());
    }

    #[test]
    fn min_iterations_degenerate_derivative() {
        // β_min = log 75 / 0.1 ≈ 43 puts θ far into the saturated tail of
        // a steep tanh: h' underflows.
        let f = TransmitFunction::tanh(5.6, 1.0).unwrap();
        let x = vec![0.95; 75];
        assert!(matches!(
            min_iterations(0.1, 0.1, 3.0, 1.0, &f, &x),
            Err(Error::DegenerateDerivative(_))
        ));
    }

    #[test]
    fn shifted_reduces_to_unshifted() {
        let f = TransmitFunction::tanh(5.6, 0.015).unwrap();
        let (n, l, s, theta) = (75, 3.7, 1.0, 140.0);
        let (a_s, c_s) = shifted_analysis(n, l, s, &f, 0.0, theta).unwrap();
        let h = f.derivative(theta);
        assert_eq!(a_s, optimal_step(n, l, h).unwrap());
        assert_eq!(c_s, optimal_covariance_norm(n, l, s, h).unwrap());
        // Centered shift: slope is the family peak √γ ω.
        let (a_c, c_c) = shifted_analysis(n, l, s, &f, theta, theta).unwrap();
        assert_eq!(a_c, optimal_step(n, l, 5.6f64.sqrt() * 0.015).unwrap());
        assert!(c_c < c_s);
    }
}

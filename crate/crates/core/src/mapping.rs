//! Soft-max, the exponential mapping of measurements into consensus states,
//! and the map back from a consensus state to a max estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest admissible `β·x` before `e^{βx}` is considered an overflow risk.
pub const EXP_GUARD: f64 = 700.0;

/// Initial per-node measurements `x_i` with their cached extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    values: Vec<f64>,
    max: f64,
    min: f64,
}

impl Measurements {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite measurement {bad}")));
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Measurements { values, max, min })
    }

    /// `n` independent uniform draws on `[0, 1)`.
    pub fn uniform(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| rng.random::<f64>()).collect())
    }

    /// Rescales all values by `target / max` so the maximum is exactly
    /// `target`. Requires a positive maximum and target.
    pub fn with_pinned_max(self, target: f64) -> Result<Self> {
        if !(self.max > 0.0 && target > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cannot pin max {} to {target}",
                self.max
            )));
        }
        let k = target / self.max;
        let values = self
            .values
            .iter()
            .map(|&v| if v == self.max { target } else { (v * k).min(target) })
            .collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn min(&self) -> f64 {
        self.min
    }
}

/// `(1/β) log Σ e^{βx_i}`, evaluated as a log-sum-exp shifted by the
/// largest exponent. Negative `β` gives the soft-min.
pub fn soft_max(x: &[f64], beta: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    if beta == 0.0 {
        return Err(Error::ZeroBeta);
    }
    let m = x.iter().map(|&v| beta * v).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = x.iter().map(|&v| (beta * v - m).exp()).sum();
    Ok((m + sum.ln()) / beta)
}

/// Mapped initial states `y_i(0) = e^{βx_i}` and their mean `ȳ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedState {
    pub y: Vec<f64>,
    pub y_bar: f64,
}

/// Raw exponentials, no log-domain tricks: the consensus recursion runs on
/// these values directly. Fails when any `β·x_i` reaches [`EXP_GUARD`].
pub fn map_initial(x: &[f64], beta: f64) -> Result<MappedState> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    if beta == 0.0 {
        return Err(Error::ZeroBeta);
    }
    let worst = x.iter().map(|&v| beta * v).fold(f64::NEG_INFINITY, f64::max);
    if worst >= EXP_GUARD {
        return Err(Error::OverflowRisk(worst, EXP_GUARD));
    }
    let y: Vec<f64> = x.iter().map(|&v| (beta * v).exp()).collect();
    let y_bar = y.iter().sum::<f64>() / y.len() as f64;
    Ok(MappedState { y, y_bar })
}

/// `(1/β)(log N + log y)`: the max estimate carried by a consensus state.
pub fn unmap_estimate(y: f64, n: usize, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Err(Error::ZeroBeta);
    }
    if !(y > 0.0) {
        return Err(Error::NonpositiveState(y));
    }
    Ok(((n as f64).ln() + y.ln()) / beta)
}

/// `(x_max, x_max + log N / β)`, which sandwich `soft_max(x, β)` for `β > 0`.
pub fn softmax_error_bounds(x: &[f64], beta: f64) -> Result<(f64, f64)> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidConfig(format!("bounds need beta > 0, got {beta}")));
    }
    let x_max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((x_max, x_max + (x.len() as f64).ln() / beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_element() {
        for beta in [0.5, 30.0, -7.0] {
            assert_relative_eq!(soft_max(&[0.3], beta).unwrap(), 0.3, max_relative = 1e-15);
        }
    }

    #[test]
    fn constant_vector() {
        let x = vec![0.25; 75];
        let beta = 5.0;
        assert_relative_eq!(
            soft_max(&x, beta).unwrap(),
            0.25 + 75f64.ln() / beta,
            max_relative = 1e-14
        );
        let m = map_initial(&x, beta).unwrap();
        assert_relative_eq!(
            unmap_estimate(m.y_bar, 75, beta).unwrap(),
            0.25 + 75f64.ln() / beta,
            max_relative = 1e-14
        );
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(soft_max(&[], 1.0), Err(Error::EmptyVector));
        assert_eq!(soft_max(&[1.0], 0.0), Err(Error::ZeroBeta));
        assert_eq!(map_initial(&[1.0], 0.0), Err(Error::ZeroBeta));
        assert_eq!(map_initial(&[], 2.0), Err(Error::EmptyVector));
        assert!(matches!(map_initial(&[0.0, 24.0], 30.0), Err(Error::OverflowRisk(..))));
        assert!(matches!(map_initial(&[-24.0], -30.0), Err(Error::OverflowRisk(..))));
        assert_eq!(unmap_estimate(0.0, 3, 1.0), Err(Error::NonpositiveState(0.0)));
        assert_eq!(unmap_estimate(-2.0, 3, 1.0), Err(Error::NonpositiveState(-2.0)));
        assert!(softmax_error_bounds(&[1.0], -1.0).is_err());
    }

    #[test]
    fn mapping_values() {
        let m = map_initial(&[0.0, 0.0], 3.0).unwrap();
        assert_eq!(m.y, vec![1.0, 1.0]);
        assert_eq!(m.y_bar, 1.0);
        let m = map_initial(&[1.0], 30.0).unwrap();
        assert_relative_eq!(m.y[0], 1.068647458152446e13, max_relative = 1e-14);
    }

    #[test]
    fn unmap_inverse_of_mean() {
        assert_eq!(unmap_estimate(1.0 / 10.0, 10, 2.0).unwrap().abs() < 1e-15, true);
    }

    #[test]
    fn bound_widths() {
        let x = Measurements::uniform(75, 1).unwrap();
        let (lo, hi) = softmax_error_bounds(x.values(), 5.0).unwrap();
        assert_eq!(lo, x.max());
        assert_relative_eq!(hi - lo, 0.863_5, epsilon = 1e-4);
        let (lo, hi) = softmax_error_bounds(x.values(), 30.0).unwrap();
        assert_relative_eq!(hi - lo, 0.143_9, epsilon = 1e-4);
        let (lo, hi) = softmax_error_bounds(&[0.7], 30.0).unwrap();
        assert_eq!((lo, hi), (0.7, 0.7));
    }

    #[test]
    fn pinned_max() {
        let x = Measurements::uniform(75, 3).unwrap().with_pinned_max(0.9561).unwrap();
        assert_eq!(x.max(), 0.9561);
        assert_eq!(x.values().iter().filter(|&&v| v == 0.9561).count(), 1);
        assert!(Measurements::new(vec![-1.0]).unwrap().with_pinned_max(1.0).is_err());
        assert!(Measurements::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn uniform_is_deterministic() {
        assert_eq!(Measurements::uniform(20, 8), Measurements::uniform(20, 8));
        assert_ne!(Measurements::uniform(20, 8), Measurements::uniform(20, 9));
    }
}

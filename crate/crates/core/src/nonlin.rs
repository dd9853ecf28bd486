//! Bounded odd transmit nonlinearities `h(x) = √γ · u(ω (x - T))`.
//!
//! Three normalized shapes `u` are provided:
//!
//! * `tanh`: `u(z) = tanh z`, the simulation family.
//! * polynomial with exponent `p`: `u(z) = sign(z) (1 - 1/(|z|^p + 1))`.
//! * exponential with rate `q`: `u(z) = sign(z) (1 - e^{-q|z|})`.
//!
//! The polynomial and exponential shapes carry their own scale in `p`/`q`,
//! so `ω = 1` for them. Only `tanh` is guaranteed to satisfy `u'(0) = 1`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Tanh,
    Polynomial { p: f64 },
    Exponential { q: f64 },
}

/// Family selector for [`make_function`], without the shape parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Tanh,
    Polynomial,
    Exponential,
}

impl Family {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::Tanh => FamilyKind::Tanh,
            Family::Polynomial { .. } => FamilyKind::Polynomial,
            Family::Exponential { .. } => FamilyKind::Exponential,
        }
    }

    /// Normalized shape `u(z)`.
    pub fn u(&self, z: f64) -> f64 {
        match *self {
            Family::Tanh => z.tanh(),
            Family::Polynomial { p } => z.signum() * (1.0 - 1.0 / (z.abs().powf(p) + 1.0)) * nonzero(z),
            Family::Exponential { q } => z.signum() * -(-q * z.abs()).exp_m1() * nonzero(z),
        }
    }

    /// `u'(z)`.
    pub fn du(&self, z: f64) -> f64 {
        match *self {
            Family::Tanh => sech_squared(z),
            Family::Polynomial { p } => {
                let a = z.abs();
                if a <= 1.0 {
                    p * a.powf(p - 1.0) / (a.powf(p) + 1.0).powi(2)
                } else {
                    // Divide through by a^{2p} so large arguments don't overflow.
                    let inv = a.powf(-p);
                    p * a.powf(-p - 1.0) / (1.0 + inv).powi(2)
                }
            }
            Family::Exponential { q } => q * (-q * z.abs()).exp(),
        }
    }
}

// signum(0.0) is 1.0 in Rust; force u(0) = 0 exactly.
#[inline]
fn nonzero(z: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        1.0
    }
}

/// `sech² z = 4 e^{-2|z|} / (1 + e^{-2|z|})²`, accurate in the tails.
#[inline]
fn sech_squared(z: f64) -> f64 {
    let e = (-2.0 * z.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Converts a power ratio in decibels to linear units.
pub fn gamma_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitFunction {
    family: Family,
    gamma: f64,
    omega: f64,
    shift: f64,
}

/// Builds a transmit function. `shape` is `ω` for tanh, `p` for the
/// polynomial family and `q` for the exponential family. `gamma` is linear.
pub fn make_function(family: FamilyKind, gamma: f64, shape: f64, shift: f64) -> Result<TransmitFunction> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidShapeParameter {
            name: "gamma",
            value: gamma,
        });
    }
    if !(shape > 0.0 && shape.is_finite()) {
        let name = match family {
            FamilyKind::Tanh => "omega",
            FamilyKind::Polynomial => "p",
            FamilyKind::Exponential => "q",
        };
        return Err(Error::InvalidShapeParameter { name, value: shape });
    }
    if !shift.is_finite() {
        return Err(Error::InvalidShapeParameter {
            name: "shift",
            value: shift,
        });
    }
    let (family, omega) = match family {
        FamilyKind::Tanh => (Family::Tanh, shape),
        FamilyKind::Polynomial => (Family::Polynomial { p: shape }, 1.0),
        FamilyKind::Exponential => (Family::Exponential { q: shape }, 1.0),
    };
    Ok(TransmitFunction {
        family,
        gamma,
        omega,
        shift,
    })
}

impl TransmitFunction {
    /// `√γ tanh(ω x)`.
    pub fn tanh(gamma: f64, omega: f64) -> Result<Self> {
        make_function(FamilyKind::Tanh, gamma, omega, 0.0)
    }

    pub fn polynomial(gamma: f64, p: f64) -> Result<Self> {
        make_function(FamilyKind::Polynomial, gamma, p, 0.0)
    }

    pub fn exponential(gamma: f64, q: f64) -> Result<Self> {
        make_function(FamilyKind::Exponential, gamma, q, 0.0)
    }

    /// `g(x) = h(x - shift)`.
    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn unshifted(self) -> Self {
        self.with_shift(0.0)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Transmit amplitude bound `√γ`.
    pub fn peak(&self) -> f64 {
        self.gamma.sqrt()
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.peak() * self.family.u(self.omega * (x - self.shift))
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        self.peak() * self.omega * self.family.du(self.omega * (x - self.shift))
    }

    pub fn validate_axioms(&self) -> AxiomReport {
        let family = self.family;
        check_axioms(move |z| family.u(z))
    }
}

/// Outcome of a sampled check of the normalized-shape axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomReport {
    /// `u(0) = 0` and `u(-z) = -u(z)`.
    pub odd: bool,
    /// `max u = 1`: never above one, and reaching it in the far tail.
    pub unit_bound: bool,
    /// Increasing, slope in `(0, 1]`, and `u'(0) = 1`.
    pub slope: bool,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.odd && self.unit_bound && self.slope
    }
}

/// Checks the axioms for an arbitrary normalized shape using function
/// values only (slopes come from central differences).
pub fn check_axioms(u: impl Fn(f64) -> f64) -> AxiomReport {
    const FD_STEP: f64 = 1e-5;
    let fd = |z: f64| (u(z + FD_STEP) - u(z - FD_STEP)) / (2.0 * FD_STEP);

    // Linear grid near the origin plus a log grid out to 1e12.
    let linear: Vec<f64> = (-5000..=5000).map(|k| k as f64 * 1e-3).collect();
    let log: Vec<f64> = (0..=170).map(|k| 10f64.powf(-5.0 + k as f64 * 0.1)).collect();

    let odd = u(0.0) == 0.0
        && linear
            .iter()
            .chain(&log)
            .all(|&z| (u(z) + u(-z)).abs() <= 1e-12 * u(z).abs().max(1.0));

    let far = *log.last().unwrap();
    let unit_bound = linear
        .iter()
        .chain(&log)
        .all(|&z| u(z).abs() <= 1.0 + 1e-12)
        && u(far) >= 1.0 - 1e-6;

    let mut positive: Vec<f64> = log.iter().copied().collect();
    positive.extend(linear.iter().copied().filter(|&z| z > 0.0));
    positive.sort_by(f64::total_cmp);
    let nondecreasing = positive.windows(2).all(|w| u(w[1]) >= u(w[0]));
    const ORIGIN_STEP: f64 = 1e-8;
    let origin_slope = (u(ORIGIN_STEP) - u(-ORIGIN_STEP)) / (2.0 * ORIGIN_STEP);
    let slope = (origin_slope - 1.0).abs() <= 1e-6
        && nondecreasing
        && linear.iter().all(|&z| {
            let s = fd(z);
            s > 0.0 && s <= 1.0 + 1e-6
        });

    AxiomReport {
        odd,
        unit_bound,
        slope,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tanh_matches_definition() {
        let g = gamma_from_db(7.5);
        let h = TransmitFunction::tanh(g, 0.015).unwrap();
        for x in [-300.0, -1.0, 0.0, 2.0, 138.0] {
            assert_relative_eq!(h.eval(x), g.sqrt() * (0.015 * x).tanh(), max_relative = 1e-15);
        }
        assert_eq!(h.eval(0.0), 0.0);
    }

    #[test]
    fn unit_slope_at_origin() {
        let h = TransmitFunction::tanh(1.0, 1.0).unwrap();
        assert_eq!(h.derivative(0.0), 1.0);
    }

    #[test]
    fn shifted_zero_crossing() {
        let h = TransmitFunction::tanh(gamma_from_db(7.5), 0.015)
            .unwrap()
            .with_shift(138.1045);
        assert_eq!(h.eval(138.1045), 0.0);
        let base = h.unshifted();
        for x in [0.0, 50.0, 138.1045, 400.0] {
            assert_eq!(h.derivative(x), base.derivative(x - 138.1045));
        }
    }

    #[test]
    fn exponential_tail() {
        let h = TransmitFunction::exponential(1.0, 1.0).unwrap();
        let v = h.eval(20.0);
        assert!(v < 1.0);
        assert_relative_eq!(v, 1.0 - (-20f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn every_family_zero_at_origin() {
        for f in [
            TransmitFunction::tanh(3.0, 0.2).unwrap(),
            TransmitFunction::polynomial(3.0, 0.5).unwrap(),
            TransmitFunction::polynomial(3.0, 2.0).unwrap(),
            TransmitFunction::exponential(3.0, 4.0).unwrap(),
        ] {
            assert_eq!(f.eval(0.0), 0.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            TransmitFunction::tanh(0.0, 1.0),
            Err(Error::InvalidShapeParameter { name: "gamma", .. })
        ));
        assert!(matches!(
            TransmitFunction::polynomial(1.0, -1.0),
            Err(Error::InvalidShapeParameter { name: "p", .. })
        ));
        assert!(matches!(
            TransmitFunction::exponential(1.0, f64::NAN),
            Err(Error::InvalidShapeParameter { name: "q", .. })
        ));
        assert!(matches!(
            make_function(FamilyKind::Tanh, 1.0, 0.0, 0.0),
            Err(Error::InvalidShapeParameter { name: "omega", .. })
        ));
    }

    #[test]
    fn axioms_tanh_pass() {
        let r = TransmitFunction::tanh(5.0, 0.3).unwrap().validate_axioms();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn axioms_identity_fails_bound_only() {
        let r = check_axioms(|z| z);
        assert!(r.odd);
        assert!(!r.unit_bound);
        assert!(r.slope);
    }

    #[test]
    fn axioms_polynomial_p2() {
        // Odd and bounded, but flat at the origin: u'(0) = 0.
        let r = TransmitFunction::polynomial(1.0, 2.0).unwrap().validate_axioms();
        assert!(r.odd);
        assert!(r.unit_bound);
        assert!(!r.slope);
    }

    #[test]
    fn axioms_exponential_unit_rate_pass() {
        let r = TransmitFunction::exponential(1.0, 1.0).unwrap().validate_axioms();
        assert!(r.all_pass(), "{r:?}");
        let r = TransmitFunction::exponential(1.0, 3.0).unwrap().validate_axioms();
        assert!(!r.slope);
    }

    #[test]
    fn polynomial_derivative_regimes() {
        let f = |p| Family::Polynomial { p };
        assert_eq!(f(1.0).du(0.0), 1.0);
        assert_eq!(f(2.0).du(0.0), 0.0);
        assert!(f(0.5).du(0.0).is_infinite());
        // No overflow for huge arguments.
        let d = f(3.0).du(1e200);
        assert!(d.is_finite() && d >= 0.0);
    }
}

//! The dual certificate `rho`: odd, anti-periodic with `rho(1 + x) = -rho(x)`,
//! parabolic `x(1 - x)/2` on `[0, 1]`, and `|rho''| <= 1` off the integers.
//!
//! Its Itô identity forces every symmetrizer of a Bernoulli(p) variable to
//! have variance at least `2 rho(q) = pq`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the neighbourhood of each integer excluded from `rho''` checks.
pub const INTEGER_EXCLUSION: f64 = 1e-9;

const SAMPLE_LO: f64 = -5.0;
const SAMPLE_HI: f64 = 5.0;

/// `(-1)^k` for the integer-valued float `k`.
fn parity_sign(k: f64) -> f64 {
    if k.rem_euclid(2.0) == 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `rho(x) = (-1)^floor(x) * f (1 - f) / 2` with `f = x - floor(x)`.
pub fn rho(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("rho({x}) is undefined")));
    }
    let k = x.floor();
    let f = x - k;
    Ok(parity_sign(k) * f * (1.0 - f) / 2.0)
}

/// Second derivative of [`rho`]: `(-1)^(floor(x) + 1)` off the integers and
/// `0` on them. Non-finite input yields NaN.
pub fn rho_pp(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let k = x.floor();
    if x == k {
        0.0
    } else {
        -parity_sign(k)
    }
}

/// `2 rho(1 - p)`, which equals `p (1 - p)`.
pub fn certificate_bound(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateParameter(p));
    }
    Ok(2.0 * rho(1.0 - p)?)
}

/// Worst observed violations of the defining properties of `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub samples_checked: u64,
    /// `max |rho(-x) + rho(x)|`
    pub max_oddness_violation: f64,
    /// `max |rho(1 + x) + rho(x)|`
    pub max_antiperiod_violation: f64,
    /// `max |rho''(x)|`; the bound requires this to be at most 1.
    pub max_second_derivative_abs: f64,
    /// `max |rho''(x - p) + rho''(x + q)|`
    pub max_reflection_violation: f64,
}

impl CertificateReport {
    pub fn second_derivative_violation(&self) -> f64 {
        (self.max_second_derivative_abs - 1.0).max(0.0)
    }

    pub fn max_violation(&self) -> f64 {
        self.max_oddness_violation
            .max(self.max_antiperiod_violation)
            .max(self.second_derivative_violation())
            .max(self.max_reflection_violation)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_EXCLUSION
}

/// Checks oddness, anti-periodicity, `|rho''| <= 1` and the reflection
/// identity `rho''(x - p) = -rho''(x + q)` at `n_samples` uniform points in
/// `[-5, 5]`.
pub fn verify_certificate(n_samples: u64, seed: u64, p: f64) -> Result<CertificateReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateParameter(p));
    }
    let q = 1.0 - p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CertificateReport {
        samples_checked: n_samples,
        max_oddness_violation: 0.0,
        max_antiperiod_violation: 0.0,
        max_second_derivative_abs: 0.0,
        max_reflection_violation: 0.0,
    };
    for _ in 0..n_samples {
        let x: f64 = rng.random_range(SAMPLE_LO..SAMPLE_HI);
        let rx = rho(x)?;
        report.max_oddness_violation = report.max_oddness_violation.max((rho(-x)? + rx).abs());
        report.max_antiperiod_violation =
            report.max_antiperiod_violation.max((rho(1.0 + x)? + rx).abs());
        if !near_integer(x) {
            report.max_second_derivative_abs = report.max_second_derivative_abs.max(rho_pp(x).abs());
        }
        if !near_integer(x - p) && !near_integer(x + q) {
            report.max_reflection_violation = report
                .max_reflection_violation
                .max((rho_pp(x - p) + rho_pp(x + q)).abs());
        }
    }
    Ok(report)
}

//! Finite-support distributions on rational atoms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{Rational, DEFAULT_MAX_DENOMINATOR};

/// Tolerance on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// One support point and its probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(flatten)]
    pub value: Rational,
    pub prob: f64,
}

/// A probability law with finitely many atoms, sorted by value.
///
/// Values are exact; probabilities are `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist")]
pub struct DiscreteDist {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawDist {
    atoms: Vec<Atom>,
}

impl TryFrom<RawDist> for DiscreteDist {
    type Error = Error;

    fn try_from(raw: RawDist) -> Result<Self> {
        DiscreteDist::new(raw.atoms.into_iter().map(|a| (a.value, a.prob)))
    }
}

impl DiscreteDist {
    /// Builds a distribution, merging repeated values. Probabilities must be
    /// non-negative and sum to one within [`MASS_TOLERANCE`].
    pub fn new(atoms: impl IntoIterator<Item = (Rational, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<Rational, f64> = BTreeMap::new();
        for (value, prob) in atoms {
            if !prob.is_finite() || prob < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {prob} at {value} is not a non-negative number"
                )));
            }
            *merged.entry(value).or_insert(0.0) += prob;
        }
        if merged.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let dist = DiscreteDist {
            atoms: merged
                .into_iter()
                .map(|(value, prob)| Atom { value, prob })
                .collect(),
        };
        let mass = dist.total_mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "total mass {mass} differs from 1"
            )));
        }
        Ok(dist)
    }

    pub fn point_mass(value: Rational) -> Self {
        DiscreteDist {
            atoms: vec![Atom { value, prob: 1.0 }],
        }
    }

    /// Bernoulli law on {0, 1} with success probability `p`.
    pub fn bernoulli(p: Rational) -> Result<Self> {
        if !p.is_positive() || p >= Rational::ONE {
            return Err(Error::DegenerateParameter(p.to_f64()));
        }
        Ok(DiscreteDist {
            atoms: vec![
                Atom {
                    value: Rational::ZERO,
                    prob: (Rational::ONE - p).to_f64(),
                },
                Atom {
                    value: Rational::ONE,
                    prob: p.to_f64(),
                },
            ],
        })
    }

    /// [`bernoulli`](Self::bernoulli) with `p` snapped to the nearest fraction
    /// whose denominator is at most `max_den`.
    pub fn bernoulli_approx(p: f64, max_den: i64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::DegenerateParameter(p));
        }
        Self::bernoulli(Rational::approximate(p, max_den)?)
    }

    pub fn bernoulli_f64(p: f64) -> Result<Self> {
        Self::bernoulli_approx(p, DEFAULT_MAX_DENOMINATOR)
    }

    /// Uniform law on the given values.
    pub fn uniform(values: &[Rational]) -> Result<Self> {
        let w = 1.0 / values.len() as f64;
        Self::new(values.iter().map(|&v| (v, w)))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = Rational> + '_ {
        self.atoms.iter().map(|a| a.value)
    }

    /// Probability of exactly `value` (zero if it is not an atom).
    pub fn prob_of(&self, value: Rational) -> f64 {
        self.atoms
            .binary_search_by(|a| a.value.cmp(&value))
            .map(|i| self.atoms[i].prob)
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    pub fn max_abs_value(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.value.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value.to_f64() * a.prob).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| {
                let v = a.value.to_f64();
                v * v * a.prob
            })
            .sum()
    }

    /// Central second moment, computed around the mean so that it stays
    /// non-negative under rounding.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms
            .iter()
            .map(|a| {
                let d = a.value.to_f64() - m;
                d * d * a.prob
            })
            .sum()
    }

    pub fn negate(&self) -> Self {
        DiscreteDist {
            atoms: self
                .atoms
                .iter()
                .rev()
                .map(|a| Atom {
                    value: -a.value,
                    prob: a.prob,
                })
                .collect(),
        }
    }

    pub fn shift(&self, c: Rational) -> Self {
        DiscreteDist {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    value: a.value + c,
                    prob: a.prob,
                })
                .collect(),
        }
    }

    /// The mean as an exact fraction with denominator at most `max_den`.
    ///
    /// Fails when no such fraction reproduces the floating-point mean to
    /// within rounding error.
    pub fn rational_mean(&self, max_den: i64) -> Result<Rational> {
        let m = self.mean();
        let snapped = Rational::approximate(m, max_den)?;
        // rounding error of the float mean, well below typical snapping error
        let tol = 1e-14 * (1.0 + self.max_abs_value()) * self.len() as f64;
        if (snapped.to_f64() - m).abs() > tol {
            return Err(Error::NonRepresentableMean(m, max_den));
        }
        Ok(snapped)
    }

    /// Shifts the law so that its mean is exactly zero.
    pub fn center(&self) -> Result<Self> {
        self.center_with(DEFAULT_MAX_DENOMINATOR)
    }

    pub fn center_with(&self, max_den: i64) -> Result<Self> {
        Ok(self.shift(-self.rational_mean(max_den)?))
    }

    /// Law of the sum of independent draws from `self` and `other`.
    ///
    /// Probabilities landing on the same exact value are added; tiny atoms
    /// are kept.
    pub fn convolve(&self, other: &DiscreteDist) -> DiscreteDist {
        let mut sums: BTreeMap<Rational, f64> = BTreeMap::new();
        for a in &self.atoms {
            for b in &other.atoms {
                *sums.entry(a.value + b.value).or_insert(0.0) += a.prob * b.prob;
            }
        }
        DiscreteDist {
            atoms: sums
                .into_iter()
                .map(|(value, prob)| Atom { value, prob })
                .collect(),
        }
    }

    /// Largest `|P(v) - P(-v)|` over the support, with an absent mirror
    /// counting as probability zero.
    pub fn symmetry_defect(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| (a.prob - self.prob_of(-a.value)).abs())
            .fold(0.0, f64::max)
    }

    /// True iff every atom `(v, p)` has a mirror `(-v, p')` with
    /// `|p - p'| <= tol`.
    pub fn is_symmetric_about_zero(&self, tol: f64) -> bool {
        self.atoms.iter().all(|a| {
            self.atoms
                .binary_search_by(|b| b.value.cmp(&-a.value))
                .is_ok_and(|i| (self.atoms[i].prob - a.prob).abs() <= tol)
        })
    }
}

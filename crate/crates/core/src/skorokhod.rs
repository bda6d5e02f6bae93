//! Skorokhod embedding of centered finite-support laws by randomized
//! first-exit intervals, and Monte Carlo checks of the Itô identities
//! behind the variance bound.
//!
//! A centered law `mu` is embedded by drawing an interval `(a, b)` with
//! `a < 0 < b` atoms of `mu`, with probability `(b - a) mu(a) mu(b) / m`
//! where `m = sum_{b > 0} b mu(b)`, and stopping a standard Brownian motion
//! when it leaves `(a, b)`. With probability `mu({0})` the motion is stopped
//! at once. The exit point then has law `mu` and `E[tau] = Var(mu)`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{rho, rho_pp};
use crate::dist::DiscreteDist;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sampling::{path_rng, MeanEstimate};

/// Tolerance on `|mean|` for a law to count as centered, relative to
/// `max(1, max |v|)`.
pub const CENTERING_TOLERANCE: f64 = 1e-12;

pub const MAX_DT: f64 = 1e-2;

/// Largest truncated fraction for which a report is considered valid.
pub const MAX_TRUNCATED_FRACTION: f64 = 1e-3;

/// Allowance `C` in `|lhs - rhs| <= 3 (se_lhs + se_rhs) + C sqrt(dt)` for the
/// grid-time exit bias of the Itô check.
///
/// Calibrated with `examples/calibrate_ito.rs` (10^4 paths, 8 seeds,
/// p in {0.1, 0.3, 0.5, 0.7, 0.9}, dt in {1e-3, 1e-4}): the largest observed
/// `|lhs - rhs| / sqrt(dt)` was 0.20 and no run exceeded three standard errors.
pub const ITO_DISCRETIZATION_CONSTANT: f64 = 0.25;

/// One realization of the randomized stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExitPair {
    /// Stop immediately (`tau = 0`).
    ZeroAtom,
    /// Stop at the first exit from `(a, b)`.
    Interval { a: Rational, b: Rational },
}

impl ExitPair {
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            ExitPair::ZeroAtom => None,
            ExitPair::Interval { a, b } => Some((a.to_f64(), b.to_f64())),
        }
    }
}

/// Probability of leaving `(a, b)` through `b`, and the expected exit time,
/// for standard Brownian motion started at zero.
pub fn exit_two_point_exact(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a < 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval(a, b));
    }
    Ok((-a / (b - a), -a * b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct WeightedPair {
    lo: usize,
    hi: usize,
    prob: f64,
}

/// The law of the randomized exit interval for a centered target.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitPairLaw {
    target: DiscreteDist,
    zero_index: Option<usize>,
    zero_prob: f64,
    pairs: Vec<WeightedPair>,
    /// Running sums of `zero_prob` then each pair probability.
    cumulative: Vec<f64>,
}

pub fn check_centered(mu: &DiscreteDist) -> Result<()> {
    let m = mu.mean();
    if m.abs() > CENTERING_TOLERANCE * mu.max_abs_value().max(1.0) {
        return Err(Error::NotCentered(m));
    }
    Ok(())
}

impl ExitPairLaw {
    pub fn new(mu: &DiscreteDist) -> Result<Self> {
        check_centered(mu)?;
        let atoms = mu.atoms();
        let zero_index = atoms.iter().position(|a| a.value.is_zero());
        let zero_prob = zero_index.map_or(0.0, |i| atoms[i].prob);
        let scale: f64 = atoms
            .iter()
            .filter(|a| a.value.is_positive())
            .map(|a| a.value.to_f64() * a.prob)
            .sum();

        let mut pairs = Vec::new();
        for (lo, neg) in atoms.iter().enumerate().filter(|(_, a)| a.value.is_negative()) {
            for (hi, pos) in atoms.iter().enumerate().filter(|(_, a)| a.value.is_positive()) {
                let width = pos.value.to_f64() - neg.value.to_f64();
                let prob = width * neg.prob * pos.prob / scale;
                if prob > 0.0 {
                    pairs.push(WeightedPair { lo, hi, prob });
                }
            }
        }
        let mut cumulative = Vec::with_capacity(pairs.len() + 1);
        let mut acc = zero_prob;
        cumulative.push(acc);
        for p in &pairs {
            acc += p.prob;
            cumulative.push(acc);
        }
        Ok(ExitPairLaw {
            target: mu.clone(),
            zero_index,
            zero_prob,
            pairs,
            cumulative,
        })
    }

    pub fn target(&self) -> &DiscreteDist {
        &self.target
    }

    pub fn zero_prob(&self) -> f64 {
        self.zero_prob
    }

    /// Every interval with positive probability, in (a, b) lexicographic order.
    pub fn pairs(&self) -> Vec<(ExitPair, f64)> {
        self.pairs
            .iter()
            .map(|p| (self.interval(p), p.prob))
            .collect()
    }

    fn interval(&self, p: &WeightedPair) -> ExitPair {
        let atoms = self.target.atoms();
        ExitPair::Interval {
            a: atoms[p.lo].value,
            b: atoms[p.hi].value,
        }
    }

    /// `sum_pairs P(pair) * (-ab)`
    pub fn expected_tau(&self) -> f64 {
        let atoms = self.target.atoms();
        self.pairs
            .iter()
            .map(|p| -atoms[p.lo].value.to_f64() * atoms[p.hi].value.to_f64() * p.prob)
            .sum()
    }

    fn sample_index(&self, rng: &mut impl Rng) -> Option<usize> {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u: f64 = rng.random::<f64>() * total;
        if u < self.zero_prob || self.pairs.is_empty() {
            return None;
        }
        let i = self.cumulative[1..].partition_point(|&c| c <= u);
        Some(i.min(self.pairs.len() - 1))
    }

    pub fn sample(&self, rng: &mut impl Rng) -> ExitPair {
        match self.sample_index(rng) {
            None => ExitPair::ZeroAtom,
            Some(i) => self.interval(&self.pairs[i]),
        }
    }
}

/// Draws one exit interval for the centered law `mu`.
pub fn sample_exit_pair(mu: &DiscreteDist, rng: &mut impl Rng) -> Result<ExitPair> {
    Ok(ExitPairLaw::new(mu)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_paths: u64,
    pub dt: f64,
    pub seed: u64,
    pub t_max: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_paths: 10_000,
            dt: 1e-4,
            seed: 0,
            t_max: 1000.0,
        }
    }
}

impl SimConfig {
    /// Checks the configuration against a run whose exit time has mean
    /// `expected_tau`.
    pub fn validate(&self, expected_tau: f64) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidConfig("n_paths must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::InvalidConfig(format!(
                "dt = {} must lie in (0, {MAX_DT}]",
                self.dt
            )));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidConfig(format!("t_max = {} must be positive", self.t_max)));
        }
        if self.t_max < 100.0 * expected_tau {
            return Err(Error::InvalidConfig(format!(
                "t_max = {} is below 100 x E[tau] = {}",
                self.t_max,
                100.0 * expected_tau
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalAtom {
    #[serde(flatten)]
    pub value: Rational,
    pub target_prob: f64,
    pub empirical_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub n_paths: u64,
    pub empirical_dist: Vec<EmpiricalAtom>,
    pub mean_tau: f64,
    pub mean_tau_stderr: f64,
    pub target_variance: f64,
}

impl EmbeddingReport {
    /// Largest `|empirical - target|` in units of the binomial standard error.
    pub fn max_mass_zscore(&self) -> f64 {
        let n = self.n_paths as f64;
        self.empirical_dist
            .iter()
            .map(|a| {
                let se = (a.target_prob * (1.0 - a.target_prob) / n).sqrt();
                let diff = (a.empirical_prob - a.target_prob).abs();
                if se > 0.0 {
                    diff / se
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Embeds `mu` with exact exit laws: each path draws an interval, picks the
/// exit side with its exact hitting probability and contributes the exact
/// conditional mean exit time `-ab`. No time discretization is involved.
pub fn simulate_embedding(mu: &DiscreteDist, cfg: &SimConfig) -> Result<EmbeddingReport> {
    let law = ExitPairLaw::new(mu)?;
    let variance = mu.variance();
    cfg.validate(variance)?;
    let atoms = mu.atoms();

    // (exit atom index or None for the zero shortcut, tau contribution)
    let outcomes: Vec<(Option<usize>, f64)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            match law.sample_index(&mut rng) {
                None => (law.zero_index, 0.0),
                Some(k) => {
                    let pair = law.pairs[k];
                    let a = atoms[pair.lo].value.to_f64();
                    let b = atoms[pair.hi].value.to_f64();
                    let p_hit_b = -a / (b - a);
                    let side = if rng.random::<f64>() < p_hit_b { pair.hi } else { pair.lo };
                    (Some(side), -a * b)
                }
            }
        })
        .collect();

    let mut counts = vec![0u64; atoms.len()];
    for (idx, _) in &outcomes {
        if let Some(k) = idx {
            counts[*k] += 1;
        }
    }
    let taus: Vec<f64> = outcomes.iter().map(|(_, t)| *t).collect();
    let tau = MeanEstimate::from_samples(&taus);
    let n = cfg.n_paths as f64;
    Ok(EmbeddingReport {
        n_paths: cfg.n_paths,
        empirical_dist: atoms
            .iter()
            .zip(&counts)
            .map(|(a, &c)| EmpiricalAtom {
                value: a.value,
                target_prob: a.prob,
                empirical_prob: c as f64 / n,
            })
            .collect(),
        mean_tau: tau.mean,
        mean_tau_stderr: tau.stderr,
        target_variance: variance,
    })
}

/// Result of one discretized Brownian path run to the exit of `(a, b)`.
struct Walk<const N: usize> {
    /// `W` at the first grid time outside `(a, b)`, or at truncation.
    w_end: f64,
    /// `sum rho''(offset_k + W_t) dt` over grid times before exit.
    integrals: [f64; N],
    truncated: bool,
}

/// Gaussian-increment walk from zero until it leaves `(a, b)` at a grid time.
fn walk<const N: usize>(
    rng: &mut impl Rng,
    a: f64,
    b: f64,
    offsets: [f64; N],
    dt: f64,
    t_max: f64,
) -> Walk<N> {
    let sd = dt.sqrt();
    let max_steps = (t_max / dt).ceil() as u64;
    let mut w = 0.0;
    let mut integrals = [0.0; N];
    let mut steps = 0u64;
    while w > a && w < b {
        if steps == max_steps {
            return Walk {
                w_end: w,
                integrals,
                truncated: true,
            };
        }
        for (acc, off) in integrals.iter_mut().zip(offsets) {
            *acc += rho_pp(off + w) * dt;
        }
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        steps += 1;
    }
    Walk {
        w_end: w,
        integrals,
        truncated: false,
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateParameter(p));
    }
    Ok(())
}

/// Exit-interval law for `Y = -X`, `X ~ Bernoulli(p)`, centered: the single
/// interval `(-q, p)`.
fn reflected_bernoulli_law(p: f64) -> Result<ExitPairLaw> {
    let y = DiscreteDist::bernoulli_f64(p)?.negate().center()?;
    ExitPairLaw::new(&y)
}

/// Both sides of `E[rho(B_tau)] - E[rho(B_0)] = 1/2 E[int_0^tau rho''(B_s) ds]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItoReport {
    pub dt: f64,
    pub lhs_estimate: f64,
    pub lhs_stderr: f64,
    pub rhs_estimate: f64,
    pub rhs_stderr: f64,
    pub n_paths_used: u64,
    pub truncated_paths: u64,
}

impl ItoReport {
    pub fn is_valid(&self) -> bool {
        (self.truncated_paths as f64) <= MAX_TRUNCATED_FRACTION * self.n_paths_used as f64
    }

    pub fn discrepancy(&self) -> f64 {
        (self.lhs_estimate - self.rhs_estimate).abs()
    }

    pub fn combined_stderr(&self) -> f64 {
        self.lhs_stderr + self.rhs_stderr
    }

    /// `|lhs - rhs| <= 3 (se_lhs + se_rhs) + C sqrt(dt)`
    pub fn tolerance(&self) -> f64 {
        3.0 * self.combined_stderr() + ITO_DISCRETIZATION_CONSTANT * self.dt.sqrt()
    }

    pub fn sides_agree(&self) -> bool {
        self.discrepancy() <= self.tolerance()
    }
}

/// Monte Carlo estimate of both sides of the Itô identity for `rho` along
/// `B = B_0 + W`, with `B_0` the centered Bernoulli(p) law and `W` stopped
/// at the Skorokhod time embedding `-X` (exit from `(-q, p)`).
pub fn simulate_ito_identity(p: f64, cfg: &SimConfig) -> Result<ItoReport> {
    check_p(p)?;
    let q = 1.0 - p;
    let law = reflected_bernoulli_law(p)?;
    cfg.validate(law.expected_tau())?;

    let per_path: Vec<(f64, f64, bool)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let b0 = if rng.random::<f64>() < p { q } else { -p };
            let start = rho(b0).expect("finite start");
            match law.sample(&mut rng).bounds() {
                None => (0.0, 0.0, false),
                Some((a, b)) => {
                    let w = walk(&mut rng, a, b, [b0], cfg.dt, cfg.t_max);
                    let end = rho(b0 + w.w_end).expect("finite end");
                    (end - start, 0.5 * w.integrals[0], w.truncated)
                }
            }
        })
        .collect();

    let lhs: Vec<f64> = per_path.iter().map(|v| v.0).collect();
    let rhs: Vec<f64> = per_path.iter().map(|v| v.1).collect();
    let lhs = MeanEstimate::from_samples(&lhs);
    let rhs = MeanEstimate::from_samples(&rhs);
    Ok(ItoReport {
        dt: cfg.dt,
        lhs_estimate: lhs.mean,
        lhs_stderr: lhs.stderr,
        rhs_estimate: rhs.mean,
        rhs_stderr: rhs.stderr,
        n_paths_used: cfg.n_paths,
        truncated_paths: per_path.iter().filter(|v| v.2).count() as u64,
    })
}

/// Estimates of the time integral `E[int_0^tau rho''(B_s) ds]` computed
/// three ways on shared paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningReport {
    /// Direct estimate with `B_0` drawn per path.
    pub combined: f64,
    pub combined_stderr: f64,
    /// `p E[int rho''(q + W)] + q E[int rho''(-p + W)]`
    pub decomposed: f64,
    pub decomposed_stderr: f64,
    /// `(p - q) E[int rho''(q + W)]`
    pub collapsed: f64,
    pub collapsed_stderr: f64,
    /// `E[int rho''(q + W)]`
    pub from_q: f64,
    /// `E[int rho''(-p + W)]`
    pub from_minus_p: f64,
    pub n_paths_used: u64,
    pub truncated_paths: u64,
}

impl ConditioningReport {
    /// Combined and decomposed estimates agree within `sigmas` standard errors.
    pub fn decomposition_consistent(&self, sigmas: f64) -> bool {
        (self.combined - self.decomposed).abs() <= sigmas * (self.combined_stderr + self.decomposed_stderr)
    }

    /// The reflection-collapsed form agrees with the decomposed one.
    pub fn collapse_consistent(&self, sigmas: f64) -> bool {
        (self.collapsed - self.decomposed).abs()
            <= sigmas * (self.collapsed_stderr + self.decomposed_stderr) + 1e-12
    }

    pub fn passes(&self, sigmas: f64) -> bool {
        self.decomposition_consistent(sigmas) && self.collapse_consistent(sigmas)
    }
}

/// Checks the decomposition of the time integral by conditioning on `B_0`,
/// and its collapse via `rho''(x - p) = -rho''(x + q)`.
pub fn verify_conditioning(p: f64, cfg: &SimConfig) -> Result<ConditioningReport> {
    check_p(p)?;
    let q = 1.0 - p;
    let law = reflected_bernoulli_law(p)?;
    cfg.validate(law.expected_tau())?;

    // (combined, from q, from -p, truncated)
    let per_path: Vec<(f64, f64, f64, bool)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i);
            let start_at_q = rng.random::<f64>() < p;
            match law.sample(&mut rng).bounds() {
                None => (0.0, 0.0, 0.0, false),
                Some((a, b)) => {
                    let w = walk(&mut rng, a, b, [q, -p], cfg.dt, cfg.t_max);
                    let [from_q, from_minus_p] = w.integrals;
                    let combined = if start_at_q { from_q } else { from_minus_p };
                    (combined, from_q, from_minus_p, w.truncated)
                }
            }
        })
        .collect();

    let combined: Vec<f64> = per_path.iter().map(|v| v.0).collect();
    let decomposed: Vec<f64> = per_path.iter().map(|v| p * v.1 + q * v.2).collect();
    let collapsed: Vec<f64> = per_path.iter().map(|v| (p - q) * v.1).collect();
    let from_q: Vec<f64> = per_path.iter().map(|v| v.1).collect();
    let from_minus_p: Vec<f64> = per_path.iter().map(|v| v.2).collect();

    let combined = MeanEstimate::from_samples(&combined);
    let decomposed = MeanEstimate::from_samples(&decomposed);
    let collapsed = MeanEstimate::from_samples(&collapsed);
    Ok(ConditioningReport {
        combined: combined.mean,
        combined_stderr: combined.stderr,
        decomposed: decomposed.mean,
        decomposed_stderr: decomposed.stderr,
        collapsed: collapsed.mean,
        collapsed_stderr: collapsed.stderr,
        from_q: MeanEstimate::from_samples(&from_q).mean,
        from_minus_p: MeanEstimate::from_samples(&from_minus_p).mean,
        n_paths_used: cfg.n_paths,
        truncated_paths: per_path.iter().filter(|v| v.3).count() as u64,
    })
}

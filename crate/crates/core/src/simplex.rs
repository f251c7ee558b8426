//! Validated probability vectors over a finite class set, dominant-class
//! extraction, and the elementary information quantities (surprisal, entropy).

use crate::error::{Error, Result};

/// Accepted deviation of an input's sum from 1 in [`DiscreteDistribution::validate`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// log of `x` in an arbitrary `base`, routed through the exact intrinsics for
/// the common bases so that e.g. `log2(0.25)` is exactly `-2`.
pub(crate) fn log_in_base(x: f64, base: f64) -> f64 {
    if base == 2.0 {
        x.log2()
    } else if base == std::f64::consts::E {
        x.ln()
    } else if base == 10.0 {
        x.log10()
    } else {
        x.ln() / base.ln()
    }
}

pub(crate) fn ensure_same_len(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.classes() != q.classes() {
        return Err(Error::DimensionMismatch {
            left: p.classes(),
            right: q.classes(),
        });
    }
    Ok(())
}

/// Sums within `renorm_eps` of 1 count as already normalized: a vector whose
/// sum is off by a few rounding steps is stored untouched, which keeps
/// validation idempotent and preserves bit-exact constrained entries from the
/// sampler.
fn renorm_eps(classes: usize) -> f64 {
    classes as f64 * 4.0 * f64::EPSILON
}

/// A probability distribution over `m >= 2` classes.
///
/// Invariants: every entry is finite and nonnegative, and the stored entries
/// sum to 1 up to a few ulps (construction renormalizes accepted input whose
/// sum deviates from 1 by more than that, up to [`SUM_TOLERANCE`]).
///
/// Degenerate entries (exact 0 and 1) are legal; downstream measures treat
/// the resulting `+inf` values as first-class results, never as errors.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validate a raw vector into a distribution.
    ///
    /// Rejects vectors with fewer than two entries, non-finite or negative
    /// entries, or a sum further than [`SUM_TOLERANCE`] from 1. Accepted
    /// input is renormalized by its exact sum.
    pub fn validate(raw: &[f64]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooFewClasses { classes: raw.len() });
        }
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::SumOutOfTolerance {
                sum,
                tolerance: SUM_TOLERANCE,
            });
        }
        let mut probs = raw.to_vec();
        if (sum - 1.0).abs() > renorm_eps(probs.len()) {
            for p in &mut probs {
                *p /= sum;
            }
        }
        Ok(Self { probs })
    }

    /// The probability vector.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of classes `m`.
    pub fn classes(&self) -> usize {
        self.probs.len()
    }

    /// Index of the maximal entry; ties break to the lowest index.
    ///
    /// The tie-break rule is part of the contract: whether two distributions
    /// "agree" on their dominant class decides which Delta divergence branch
    /// runs, so it must be deterministic.
    pub fn dominant(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate().skip(1) {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// The dominant classes of a pair of distributions.
///
/// `omega` maximizes the first distribution, `omega_tilde` the second, and
/// `nondominant` holds every index outside `{omega, omega_tilde}` in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominantPair {
    pub omega: usize,
    pub omega_tilde: usize,
    pub nondominant: Vec<usize>,
    pub labels_agree: bool,
}

impl DominantPair {
    pub fn of(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<Self> {
        ensure_same_len(p, q)?;
        let omega = p.dominant();
        let omega_tilde = q.dominant();
        let nondominant = (0..p.classes())
            .filter(|&i| i != omega && i != omega_tilde)
            .collect();
        Ok(Self {
            omega,
            omega_tilde,
            nondominant,
            labels_agree: omega == omega_tilde,
        })
    }
}

/// Self-information `-log_base(p)` of an outcome with probability `p`.
///
/// Extended-real by convention: `p = 0` gives `+inf`, `p = 1` gives `0`.
pub fn surprisal(p: f64, base: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { value: p });
    }
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    let v = -log_in_base(p, base);
    Ok(if v == 0.0 { 0.0 } else { v })
}

/// Shannon entropy `-sum p_i log_base(p_i)` with the `0 log 0 = 0` convention.
pub fn entropy(d: &DiscreteDistribution, base: f64) -> f64 {
    let mut h = 0.0;
    for &p in d.probs() {
        if p > 0.0 {
            h -= p * log_in_base(p, base);
        }
    }
    if h == 0.0 {
        0.0
    } else {
        h
    }
}

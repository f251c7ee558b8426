//! Seeded Monte-Carlo generation of posterior-distribution pairs on the
//! m-simplex.
//!
//! The sampling law is the flat Dirichlet (uniform on the simplex), realized
//! by normalizing i.i.d. unit exponentials. Dominance constraints are
//! enforced by rejection rather than relabeling, which preserves uniformity
//! on the constrained region; a budget guards pathological constraints.
//!
//! Sample `k` of a run draws from a counter-derived stream of `(seed, k)`, so
//! the emitted sequence is a pure function of the config and independent of
//! thread count or scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::simplex::DiscreteDistribution;

/// Default cap on rejection attempts per constrained draw.
pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

/// How the sampled pair is constrained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintMode {
    /// Two independent uniform draws.
    Unconstrained,
    /// First draw has `probs[mu] = p_mu` with `mu` dominant; second is free.
    DominantValue { mu: usize, p_mu: f64 },
    /// First draw has `mu` dominant at a feasible random level; the second
    /// matches it at `mu` up to `+-diff` (sign chosen uniformly among the
    /// feasible ones). Only the first draw is forced to have `mu` dominant
    /// unless [`SamplerConfig::both_dominant`] is set.
    DominantDiff { mu: usize, diff: f64 },
}

impl ConstraintMode {
    /// The class index the mode constrains, if any.
    pub fn constrained_class(&self) -> Option<usize> {
        match *self {
            ConstraintMode::Unconstrained => None,
            ConstraintMode::DominantValue { mu, .. } | ConstraintMode::DominantDiff { mu, .. } => {
                Some(mu)
            }
        }
    }
}

/// Full description of a sampling run. The emitted stream is a pure function
/// of this value.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub classes: usize,
    pub mode: ConstraintMode,
    pub count: u64,
    pub seed: u64,
    /// In `DominantDiff` mode, also require `mu` dominant for the second draw.
    pub both_dominant: bool,
    pub rejection_cap: u64,
}

impl SamplerConfig {
    pub fn new(classes: usize, mode: ConstraintMode, count: u64, seed: u64) -> Self {
        Self {
            classes,
            mode,
            count,
            seed,
            both_dominant: false,
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }

    pub fn unconstrained(classes: usize, count: u64, seed: u64) -> Self {
        Self::new(classes, ConstraintMode::Unconstrained, count, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::TooFewClasses {
                classes: self.classes,
            });
        }
        if self.count == 0 {
            return Err(Error::InfeasibleConstraint {
                reason: "count must be at least 1".to_string(),
            });
        }
        let m = self.classes as f64;
        match self.mode {
            ConstraintMode::Unconstrained => {}
            ConstraintMode::DominantValue { mu, p_mu } => {
                if mu >= self.classes {
                    return Err(Error::InfeasibleConstraint {
                        reason: format!("mu = {mu} out of range for {} classes", self.classes),
                    });
                }
                if !(p_mu > 0.0 && p_mu <= 1.0) {
                    return Err(Error::InfeasibleConstraint {
                        reason: format!("p_mu = {p_mu} outside (0, 1]"),
                    });
                }
                if p_mu < 1.0 / m {
                    return Err(Error::InfeasibleConstraint {
                        reason: format!("p_mu = {p_mu} below 1/m; class {mu} cannot be dominant"),
                    });
                }
            }
            ConstraintMode::DominantDiff { mu, diff } => {
                if mu >= self.classes {
                    return Err(Error::InfeasibleConstraint {
                        reason: format!("mu = {mu} out of range for {} classes", self.classes),
                    });
                }
                if !(0.0..=1.0).contains(&diff) {
                    return Err(Error::InfeasibleConstraint {
                        reason: format!("diff = {diff} outside [0, 1]"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// The per-sample RNG stream for `(seed, k)`.
pub(crate) fn stream_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// `m - 1` coordinates drawn uniformly from the sub-simplex of total `mass`.
fn scaled_subsimplex<R: Rng + ?Sized>(coords: usize, mass: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..coords).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let s: f64 = draws.iter().sum();
        if s > 0.0 && s.is_finite() {
            return draws.into_iter().map(|e| e * mass / s).collect();
        }
    }
}

/// A point drawn uniformly from the (m-1)-simplex; strictly positive with
/// probability 1.
pub fn sample_simplex<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DiscreteDistribution {
    assert!(m >= 2, "need at least 2 classes");
    let probs = scaled_subsimplex(m, 1.0, rng);
    DiscreteDistribution::validate(&probs).expect("uniform simplex draw is a valid distribution")
}

fn assemble_with_fixed(mu: usize, value: f64, mut rest: Vec<f64>) -> Vec<f64> {
    rest.insert(mu, value);
    rest
}

/// Fraction of the unit (k-1)-simplex (k coordinates) where every coordinate
/// is at most `b`, by inclusion-exclusion over the violated-coordinate sets.
fn box_simplex_volume_fraction(k: usize, b: f64) -> f64 {
    if b >= 1.0 {
        return 1.0;
    }
    if b * k as f64 <= 1.0 {
        return 0.0;
    }
    let mut fraction = 0.0;
    let mut binom = 1.0;
    let mut sign = 1.0;
    for j in 0..=k {
        let slack = 1.0 - j as f64 * b;
        if slack > 0.0 {
            fraction += sign * binom * slack.powi(k as i32 - 1);
        }
        binom = binom * (k - j) as f64 / (j + 1) as f64;
        sign = -sign;
    }
    fraction.max(0.0)
}

/// Uniform draw of `k` coordinates summing to `mass` with every coordinate at
/// most `bound`.
///
/// Rejection from the unconstrained scaled simplex when the acceptance
/// probability is healthy. When the bound is tight, rejection stalls, so the
/// draw goes through the reflection `u_i = bound - w_i`: it maps the
/// constrained region isometrically onto coordinates `w` summing to
/// `k * bound - mass` under the same kind of cap, and that image is roomy
/// (or a plain simplex) exactly when the original is tight.
fn constrained_subsimplex<R: Rng + ?Sized>(
    k: usize,
    mass: f64,
    bound: f64,
    rng: &mut R,
    cap: u64,
) -> Result<(Vec<f64>, u64)> {
    if mass == 0.0 {
        return Ok((vec![0.0; k], 1));
    }
    let k_f = k as f64;
    if k_f * bound < mass {
        return Err(Error::InfeasibleConstraint {
            reason: format!("cannot fit mass {mass} into {k} coordinates of at most {bound}"),
        });
    }
    let direct_acceptance = box_simplex_volume_fraction(k, bound / mass);
    if direct_acceptance >= 0.25 {
        for attempt in 1..=cap {
            let draw = scaled_subsimplex(k, mass, rng);
            if draw.iter().all(|&v| v <= bound) {
                return Ok((draw, attempt));
            }
        }
        return Err(Error::RejectionBudgetExceeded { attempts: cap });
    }
    let reflected_mass = k_f * bound - mass;
    for attempt in 1..=cap {
        let w = scaled_subsimplex(k, reflected_mass, rng);
        if w.iter().all(|&v| v <= bound) {
            let draw = w.into_iter().map(|v| bound - v).collect();
            return Ok((draw, attempt));
        }
    }
    Err(Error::RejectionBudgetExceeded { attempts: cap })
}

fn sample_with_dominant_counted<R: Rng + ?Sized>(
    m: usize,
    mu: usize,
    p_mu: f64,
    rng: &mut R,
    cap: u64,
) -> Result<(DiscreteDistribution, u64)> {
    if mu >= m {
        return Err(Error::InfeasibleConstraint {
            reason: format!("mu = {mu} out of range for {m} classes"),
        });
    }
    if !(p_mu > 0.0 && p_mu <= 1.0) || p_mu < 1.0 / m as f64 {
        return Err(Error::InfeasibleConstraint {
            reason: format!("p_mu = {p_mu} infeasible as a dominant value over {m} classes"),
        });
    }
    let (rest, attempts) = constrained_subsimplex(m - 1, 1.0 - p_mu, p_mu, rng, cap)?;
    let probs = assemble_with_fixed(mu, p_mu, rest);
    let dist = DiscreteDistribution::validate(&probs)
        .expect("constrained simplex draw is a valid distribution");
    Ok((dist, attempts))
}

/// A uniform draw conditioned on `probs[mu] = p_mu` being (weakly) maximal:
/// the remaining mass is spread uniformly over the other `m - 1` coordinates,
/// rejecting draws where any of them exceeds `p_mu`.
pub fn sample_with_dominant<R: Rng + ?Sized>(
    m: usize,
    mu: usize,
    p_mu: f64,
    rng: &mut R,
    cap: u64,
) -> Result<DiscreteDistribution> {
    sample_with_dominant_counted(m, mu, p_mu, rng, cap).map(|(dist, _)| dist)
}

/// Pair generator for a [`SamplerConfig`].
#[derive(Debug, Clone)]
pub struct PairSampler {
    config: SamplerConfig,
}

impl PairSampler {
    pub fn new(config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    /// The `k`-th sampled pair of the run. Pairs are independent across `k`
    /// and reproducible in any order.
    pub fn pair(&self, k: u64) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
        let cfg = &self.config;
        let mut rng = stream_rng(cfg.seed, k);
        let m = cfg.classes;
        match cfg.mode {
            ConstraintMode::Unconstrained => {
                let p = sample_simplex(m, &mut rng);
                let q = sample_simplex(m, &mut rng);
                Ok((p, q))
            }
            ConstraintMode::DominantValue { mu, p_mu } => {
                let p = sample_with_dominant(m, mu, p_mu, &mut rng, cfg.rejection_cap)?;
                let q = sample_simplex(m, &mut rng);
                Ok((p, q))
            }
            ConstraintMode::DominantDiff { mu, diff } => {
                let p_mu = draw_feasible_dominant_level(m, diff, &mut rng);
                let p = sample_with_dominant(m, mu, p_mu, &mut rng, cfg.rejection_cap)?;
                let q_mu = choose_offset_level(p_mu, diff, 1.0 / m as f64, cfg.both_dominant, &mut rng)?;
                let q = if cfg.both_dominant {
                    sample_with_dominant(m, mu, q_mu, &mut rng, cfg.rejection_cap)?
                } else {
                    let rest = scaled_subsimplex(m - 1, 1.0 - q_mu, &mut rng);
                    let probs = assemble_with_fixed(mu, q_mu, rest);
                    DiscreteDistribution::validate(&probs)
                        .expect("offset simplex draw is a valid distribution")
                };
                Ok((p, q))
            }
        }
    }
}

/// Uniform draw of a dominant level from
/// `[1/m, 1]` intersected with `[diff, 1] union [0, 1 - diff]` (the levels
/// from which an offset of `diff` stays inside `[0, 1]`).
fn draw_feasible_dominant_level<R: Rng + ?Sized>(m: usize, diff: f64, rng: &mut R) -> f64 {
    let lo = 1.0 / m as f64;
    if diff <= 0.5 {
        // the union covers all of [0, 1]
        return rng.random_range(lo..=1.0);
    }
    let mut segments: Vec<(f64, f64)> = Vec::with_capacity(2);
    if lo <= 1.0 - diff {
        segments.push((lo, 1.0 - diff));
    }
    segments.push((diff.max(lo), 1.0));
    let total: f64 = segments.iter().map(|(a, b)| b - a).sum();
    if total == 0.0 {
        // diff = 1 with no interior: the only feasible level is 1
        return 1.0;
    }
    let mut u = rng.random_range(0.0..total);
    for &(a, b) in &segments {
        let len = b - a;
        if u <= len {
            return a + u;
        }
        u -= len;
    }
    segments.last().map(|&(_, b)| b).unwrap_or(1.0)
}

/// Pick `p_mu + diff` or `p_mu - diff`, uniformly among the choices that stay
/// in `[0, 1]` (and at or above `1/m` when the second draw must also be
/// dominant).
fn choose_offset_level<R: Rng + ?Sized>(
    p_mu: f64,
    diff: f64,
    dominance_floor: f64,
    needs_dominance: bool,
    rng: &mut R,
) -> Result<f64> {
    let mut candidates: Vec<f64> = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let level = p_mu + sign * diff;
        if (0.0..=1.0).contains(&level) && (!needs_dominance || level >= dominance_floor) {
            candidates.push(level);
        }
    }
    match candidates.len() {
        0 => Err(Error::InfeasibleConstraint {
            reason: format!("no feasible sign keeps {p_mu} +- {diff} inside [0, 1]"),
        }),
        1 => Ok(candidates[0]),
        _ => {
            let pick = rng.random_range(0..candidates.len());
            Ok(candidates[pick])
        }
    }
}

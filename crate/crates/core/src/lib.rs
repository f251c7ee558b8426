//! # deltadiv
//!
//! Divergence measures for detecting classifier incongruence.
//!
//! Two classifiers voicing opinions about the same hypothesis set emit
//! posterior probability vectors `P` and `Q`. Divergence between the vectors
//! signals disagreement, but the classical measures make poor incongruence
//! detectors: K-L is asymmetric and unbounded, and every summation-style
//! divergence picks up *clutter* from the nondominant classes, which drowns
//! the decision-relevant signal as the class count grows.
//!
//! The centrepiece of this crate is the **Delta divergence**: total variation
//! distance computed after merging every nondominant class into a single
//! event, so that only the dominant hypotheses of the two classifiers (plus
//! "neither of the two") matter. It is bounded to `[0, 1]`, symmetric,
//! depends only on probability differences, and reduces clutter from a sum of
//! per-class terms to a single merged term.
//!
//! ## Layout
//!
//! - [`simplex`]: validated probability vectors, dominant-class extraction,
//!   surprisal and entropy.
//! - [`classical`]: K-L (directed and symmetrized), Jensen-Shannon, total
//!   variation, Renyi, generic Csiszar f-divergences and Bregman divergences,
//!   plus the K-L dominant/clutter split.
//! - [`delta`]: Delta divergence with its full case analysis, its clutter
//!   decomposition, and the heuristic baselines it formalizes.
//! - [`sampling`]: seeded Monte-Carlo generation of posterior pairs on the
//!   simplex, unconstrained or dominance-constrained.
//! - [`experiments`]: the scatter-experiment harness (full measure panel per
//!   sampled pair, CSV/JSON-lines emission, threshold sweeps, Delta-binned
//!   summaries, triangle-violation search).
//!
//! All measure evaluations are pure functions over immutable inputs and are
//! safe to call from any number of threads.

pub mod classical;
pub mod delta;
pub mod error;
pub mod experiments;
pub mod sampling;
pub mod simplex;

pub use classical::{
    bregman, f_divergence, jensen_shannon, kl, kl_clutter, kl_symmetrized, renyi, renyi_max,
    total_variation, ConvexGenerator, MeasureKind, MeasureValue,
};
pub use delta::{
    delta_clutter, delta_divergence, delta_max, delta_relationships, delta_star,
    merged_event_total_variation, DeltaBreakdown, DeltaCase, DeltaRelationships,
};
pub use error::{Error, Result};
pub use sampling::{
    sample_simplex, sample_with_dominant, ConstraintMode, PairSampler, SamplerConfig,
};
pub use simplex::{entropy, surprisal, DiscreteDistribution, DominantPair};

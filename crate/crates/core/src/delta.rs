//! Delta divergence: total variation distance evaluated after merging every
//! nondominant class into a single event, so only the two classifiers'
//! dominant hypotheses (and "neither of them") contribute.
//!
//! Writing `omega` and `omega_tilde` for the dominant classes of `p` and `q`,
//! the signed building blocks are
//!
//! ```text
//! A = q[omega_tilde] - p[omega_tilde]      B = p[omega] - q[omega]
//! ```
//!
//! and the closed form splits into three cases:
//!
//! ```text
//! |q[omega] - p[omega]|   labels agree
//! max { |A|, |B| }        labels disagree, A >= 0 and B >= 0
//! |A| + |B|               labels disagree, mixed signs
//! ```
//!
//! `A < 0` and `B < 0` cannot hold together: `A < 0` forces
//! `q[omega] > p[omega] >= p[omega_tilde] > q[omega_tilde]`, contradicting
//! `omega_tilde` being dominant for `q`. The same argument with the roles
//! swapped rules out the mirror image.
//!
//! The value is bounded to `[0, 1]`, symmetric, depends only on probability
//! differences, and never exceeds the total variation distance; for `m = 2`
//! the two coincide. It is not a metric for `m >= 3` (the merged event
//! differs between classifier pairs), which
//! [`crate::experiments::metric_violation_search`] demonstrates by search.

use crate::classical::{MeasureKind, MeasureValue};
use crate::error::Result;
use crate::simplex::{ensure_same_len, DiscreteDistribution, DominantPair};

/// Tolerance for the internal closed-form cross-checks.
const CROSS_CHECK_TOLERANCE: f64 = 1e-12;

/// Which branch of the case analysis produced a Delta value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaCase {
    LabelAgreement,
    DisagreeBothNonnegative,
    DisagreeMixedSign,
}

impl DeltaCase {
    pub fn as_str(self) -> &'static str {
        match self {
            DeltaCase::LabelAgreement => "label-agreement",
            DeltaCase::DisagreeBothNonnegative => "disagree-both-nonnegative",
            DeltaCase::DisagreeMixedSign => "disagree-mixed-sign",
        }
    }
}

/// A Delta divergence value together with its case split and building blocks.
///
/// `pim` (pure incongruence measure) holds the halved dominant-class terms of
/// the merged-event expansion and `group_clutter` the halved merged-complement
/// term, so `pim + group_clutter` recovers `value` in every case. The case
/// tag, not sign inspection, decides which closed-form branch produced
/// `value`; ties in the argmax resolve to the lowest index, and the tag
/// records which branch actually ran.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaBreakdown {
    pub value: f64,
    pub case: DeltaCase,
    /// `q[omega_tilde] - p[omega_tilde]`, signed.
    pub a: f64,
    /// `p[omega] - q[omega]`, signed.
    pub b: f64,
    /// Halved dominant-class contribution.
    pub pim: f64,
    /// Halved merged-complement contribution.
    pub group_clutter: f64,
    pub pair: DominantPair,
}

impl DeltaBreakdown {
    pub fn measure_value(&self) -> MeasureValue {
        MeasureValue {
            value: self.value,
            kind: MeasureKind::Delta,
            log_base: None,
        }
    }
}

/// Delta divergence of a pair, via the closed-form case analysis.
pub fn delta_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<DeltaBreakdown> {
    let pair = DominantPair::of(p, q)?;
    let a = q.probs()[pair.omega_tilde] - p.probs()[pair.omega_tilde];
    let b = p.probs()[pair.omega] - q.probs()[pair.omega];

    let (case, value, pim, group_clutter) = if pair.labels_agree {
        // single dominant index; the merged complement mirrors it exactly
        (
            DeltaCase::LabelAgreement,
            b.abs(),
            0.5 * b.abs(),
            0.5 * b.abs(),
        )
    } else {
        debug_assert!(
            a >= 0.0 || b >= 0.0,
            "dominance makes A < 0 and B < 0 impossible: a={a}, b={b}"
        );
        let pim = 0.5 * (a.abs() + b.abs());
        let group_clutter = 0.5 * (a - b).abs();
        if a >= 0.0 && b >= 0.0 {
            (
                DeltaCase::DisagreeBothNonnegative,
                a.max(b),
                pim,
                group_clutter,
            )
        } else {
            (
                DeltaCase::DisagreeMixedSign,
                a.abs() + b.abs(),
                pim,
                group_clutter,
            )
        }
    };

    Ok(DeltaBreakdown {
        value,
        case,
        a,
        b,
        pim,
        group_clutter,
        pair,
    })
}

/// Delta divergence evaluated directly from its defining reduction: keep the
/// dominant classes, merge everything else into one event with the complement
/// probabilities, and take the total variation of the reduced distributions.
///
/// Algebraically identical to [`delta_divergence`]; kept as an independent
/// evaluation route so the two can be checked against each other.
pub fn merged_event_total_variation(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<f64> {
    let pair = DominantPair::of(p, q)?;
    let (pp, qp) = (p.probs(), q.probs());
    if pair.labels_agree {
        let w = pair.omega;
        let dominant = (qp[w] - pp[w]).abs();
        let complement = ((1.0 - qp[w]) - (1.0 - pp[w])).abs();
        Ok(0.5 * (dominant + complement))
    } else {
        let (w, wt) = (pair.omega, pair.omega_tilde);
        let dominant = (qp[w] - pp[w]).abs() + (qp[wt] - pp[wt]).abs();
        let complement = ((1.0 - qp[w] - qp[wt]) - (1.0 - pp[w] - pp[wt])).abs();
        Ok(0.5 * (dominant + complement))
    }
}

/// The nondominant-class ("clutter") contributions to Delta divergence and to
/// total variation: `(1/2 |sum_i d_i|, 1/2 sum_i |d_i|)` over the indices
/// outside `{omega, omega_tilde}`, with `d_i = p_i - q_i`.
///
/// The merged form folds the differences before taking the absolute value, so
/// `delta_clutter <= tv_clutter` holds on every pair (and both vanish for
/// `m = 2`, where the nondominant set is empty).
pub fn delta_clutter(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<(f64, f64)> {
    let pair = DominantPair::of(p, q)?;
    Ok(clutter_terms(p, q, &pair))
}

pub(crate) fn clutter_terms(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    pair: &DominantPair,
) -> (f64, f64) {
    let mut signed = 0.0;
    let mut absolute = 0.0;
    for &i in &pair.nondominant {
        let d = p.probs()[i] - q.probs()[i];
        signed += d;
        absolute += d.abs();
    }
    (0.5 * signed.abs(), 0.5 * absolute)
}

/// The decision-dependent heuristic
/// `1/2 [ |p[omega] - q[omega]| + |q[omega_tilde] - p[omega_tilde]| ]`.
pub fn delta_star(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<MeasureValue> {
    let pair = DominantPair::of(p, q)?;
    let (pp, qp) = (p.probs(), q.probs());
    let value = 0.5
        * ((pp[pair.omega] - qp[pair.omega]).abs()
            + (qp[pair.omega_tilde] - pp[pair.omega_tilde]).abs());
    Ok(MeasureValue {
        value,
        kind: MeasureKind::DeltaStar,
        log_base: None,
    })
}

/// The max-form heuristic
/// `1/2 max { |p[w] - q[w]| + d |q[wt] - q[w]|, |q[wt] - p[wt]| + d |p[w] - p[wt]| }`
/// with `d = 0` on label agreement and `1` on disagreement.
///
/// On disagreement the value collapses to
/// `1/2 (p[w] + q[wt]) - min { q[w], p[wt] }` when `A` and `B` are both
/// nonnegative, and to the matching single-arm form when one is negative;
/// both rearrangements are asserted against the canonical evaluation.
pub fn delta_max(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<MeasureValue> {
    let pair = DominantPair::of(p, q)?;
    let (pp, qp) = (p.probs(), q.probs());
    let (w, wt) = (pair.omega, pair.omega_tilde);
    let disagree = !pair.labels_agree;

    let mut arm_one = (pp[w] - qp[w]).abs();
    let mut arm_two = (qp[wt] - pp[wt]).abs();
    if disagree {
        arm_one += (qp[wt] - qp[w]).abs();
        arm_two += (pp[w] - pp[wt]).abs();
    }
    let value = 0.5 * arm_one.max(arm_two);

    if disagree {
        let a = qp[wt] - pp[wt];
        let b = pp[w] - qp[w];
        let rearranged = if a >= 0.0 && b >= 0.0 {
            0.5 * (pp[w] + qp[wt]) - qp[w].min(pp[wt])
        } else if b < 0.0 {
            0.5 * (pp[w] + qp[wt]) - pp[wt]
        } else {
            0.5 * (pp[w] + qp[wt]) - qp[w]
        };
        assert!(
            (value - rearranged).abs() <= CROSS_CHECK_TOLERANCE,
            "delta_max closed forms disagree: {value} vs {rearranged}"
        );
    }

    Ok(MeasureValue {
        value,
        kind: MeasureKind::DeltaMax,
        log_base: None,
    })
}

/// Cross-measure relations evaluated on one pair, each within a `1e-12`
/// slack. All of them are theorems (`equals_total_variation` for `m = 2`
/// only), so a `false` anywhere points at an implementation bug.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaRelationships {
    /// `delta_star <= delta`
    pub star_lower: bool,
    /// `delta <= 2 delta_star`
    pub star_upper: bool,
    /// `delta <= total_variation`
    pub within_total_variation: bool,
    /// `delta == total_variation` (guaranteed for `m = 2`)
    pub equals_total_variation: bool,
    /// `delta` equals the per-case `{ delta_star, max{|A|,|B|}, 2 delta_star }` value
    pub case_form_matches: bool,
}

impl DeltaRelationships {
    pub fn all_theorems_hold(&self) -> bool {
        self.star_lower && self.star_upper && self.within_total_variation && self.case_form_matches
    }
}

pub fn delta_relationships(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<DeltaRelationships> {
    ensure_same_len(p, q)?;
    let tol = CROSS_CHECK_TOLERANCE;
    let breakdown = delta_divergence(p, q)?;
    let star = delta_star(p, q)?.value;
    let tv = crate::classical::total_variation(p, q)?.value;

    let case_value = match breakdown.case {
        DeltaCase::LabelAgreement => star,
        DeltaCase::DisagreeBothNonnegative => breakdown.a.abs().max(breakdown.b.abs()),
        DeltaCase::DisagreeMixedSign => 2.0 * star,
    };

    Ok(DeltaRelationships {
        star_lower: star <= breakdown.value + tol,
        star_upper: breakdown.value <= 2.0 * star + tol,
        within_total_variation: breakdown.value <= tv + tol,
        equals_total_variation: (breakdown.value - tv).abs() <= tol,
        case_form_matches: (breakdown.value - case_value).abs() <= tol,
    })
}

//! The classical divergence family: directed and symmetrized K-L,
//! Jensen-Shannon, total variation, Renyi, generic Csiszar f-divergences and
//! Bregman divergences, plus the split of K-L into its dominant-class and
//! clutter contributions.
//!
//! Argument order follows the incongruence-detection convention throughout:
//! `kl(p, q)` evaluates `sum_i q_i log(q_i / p_i)`, i.e. the first argument
//! is the reference distribution in the denominator.
//!
//! Zero handling lives in the specialized entry points (`kl`,
//! `total_variation`, ...). The generic [`f_divergence`] path requires a
//! strictly positive reference instead, because the `0 * f(q/0)` limit
//! depends on the generator's recession behavior.

use crate::error::{Error, Result};
use crate::simplex::{ensure_same_len, log_in_base, DiscreteDistribution, DominantPair};

/// Natural log base, the default for K-L and Renyi values.
pub const NATURAL_LOG_BASE: f64 = std::f64::consts::E;

/// Which measure produced a [`MeasureValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Kl,
    /// Sum of the two directed K-L divergences (Jeffreys' form).
    KlSymmetrized,
    JensenShannon,
    TotalVariation,
    Renyi,
    /// Renyi order-infinity limit: `log max_i(q_i / p_i)`.
    RenyiMax,
    FDivergence,
    Bregman,
    Delta,
    DeltaStar,
    DeltaMax,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Kl => "kl",
            MeasureKind::KlSymmetrized => "kl-sym",
            MeasureKind::JensenShannon => "js",
            MeasureKind::TotalVariation => "tv",
            MeasureKind::Renyi => "renyi",
            MeasureKind::RenyiMax => "renyi:inf",
            MeasureKind::FDivergence => "f-div",
            MeasureKind::Bregman => "bregman",
            MeasureKind::Delta => "delta",
            MeasureKind::DeltaStar => "delta-star",
            MeasureKind::DeltaMax => "delta-max",
        }
    }
}

/// A computed divergence value tagged with its measure and, where a logarithm
/// is involved, the base used.
///
/// `+inf` is a legal value for the unbounded measures (the K-L family and
/// Renyi); Jensen-Shannon (base 2), total variation and the Delta family stay
/// in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub kind: MeasureKind,
    pub log_base: Option<f64>,
}

/// Divergences are nonnegative; fold rounding noise on near-identical inputs
/// back to zero without masking real sign errors.
fn nonneg(value: f64) -> f64 {
    if value < 0.0 && value > -1e-12 {
        0.0
    } else {
        value
    }
}

/// Directed K-L divergence `sum_i q_i log(q_i / p_i)`.
///
/// Conventions: a term with `q_i = 0` contributes nothing; `q_i > 0` over
/// `p_i = 0` makes the value `+inf`.
pub fn kl(p: &DiscreteDistribution, q: &DiscreteDistribution, log_base: f64) -> Result<MeasureValue> {
    ensure_same_len(p, q)?;
    let mut total = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            total = f64::INFINITY;
            break;
        }
        total += qi * log_in_base(qi / pi, log_base);
    }
    Ok(MeasureValue {
        value: nonneg(total),
        kind: MeasureKind::Kl,
        log_base: Some(log_base),
    })
}

/// Symmetrized K-L divergence `kl(p, q) + kl(q, p)` (the sum, not the mean).
pub fn kl_symmetrized(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    log_base: f64,
) -> Result<MeasureValue> {
    let forward = kl(p, q, log_base)?;
    let backward = kl(q, p, log_base)?;
    Ok(MeasureValue {
        value: forward.value + backward.value,
        kind: MeasureKind::KlSymmetrized,
        log_base: Some(log_base),
    })
}

/// Jensen-Shannon divergence
/// `1/2 sum_i [p_i log(2 p_i / (p_i + q_i)) + q_i log(2 q_i / (p_i + q_i))]`,
/// with the `0 log 0 = 0` convention. Lies in `[0, 1]` with base-2 logs.
pub fn jensen_shannon(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    log_base: f64,
) -> Result<MeasureValue> {
    ensure_same_len(p, q)?;
    let mut total = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        let mid = pi + qi;
        if pi > 0.0 {
            total += pi * log_in_base(2.0 * pi / mid, log_base);
        }
        if qi > 0.0 {
            total += qi * log_in_base(2.0 * qi / mid, log_base);
        }
    }
    Ok(MeasureValue {
        value: nonneg(0.5 * total),
        kind: MeasureKind::JensenShannon,
        log_base: Some(log_base),
    })
}

/// Total variation distance `1/2 sum_i |q_i - p_i|`; symmetric, in `[0, 1]`.
pub fn total_variation(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<MeasureValue> {
    ensure_same_len(p, q)?;
    let total: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| (qi - pi).abs())
        .sum();
    Ok(MeasureValue {
        value: 0.5 * total,
        kind: MeasureKind::TotalVariation,
        log_base: None,
    })
}

/// Renyi divergence of order `alpha`:
/// `(1 / (alpha - 1)) log sum_i p_i (q_i / p_i)^alpha`.
///
/// `alpha = 1` delegates to [`kl`] (the limit). For `alpha > 1` a positive
/// `q_i` over `p_i = 0` makes the value `+inf`.
pub fn renyi(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    alpha: f64,
    log_base: f64,
) -> Result<MeasureValue> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidAlpha { alpha });
    }
    ensure_same_len(p, q)?;
    if alpha == 1.0 {
        return kl(p, q, log_base);
    }
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            if alpha > 1.0 {
                sum = f64::INFINITY;
                break;
            }
            continue;
        }
        sum += pi.powf(1.0 - alpha) * qi.powf(alpha);
    }
    let value = if sum.is_infinite() || sum == 0.0 {
        f64::INFINITY
    } else {
        nonneg(log_in_base(sum, log_base) / (alpha - 1.0))
    };
    Ok(MeasureValue {
        value,
        kind: MeasureKind::Renyi,
        log_base: Some(log_base),
    })
}

/// The Renyi order-infinity limit `log max_i(q_i / p_i)`, defined entirely by
/// the most extreme posterior ratio. Listed here because that ratio can come
/// from a nondominant hypothesis, which is exactly what makes it misleading
/// as an incongruence measure.
pub fn renyi_max(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    log_base: f64,
) -> Result<MeasureValue> {
    ensure_same_len(p, q)?;
    let mut max_ratio = 0.0f64;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if qi == 0.0 {
            continue;
        }
        if pi == 0.0 {
            max_ratio = f64::INFINITY;
            break;
        }
        max_ratio = max_ratio.max(qi / pi);
    }
    let value = if max_ratio.is_infinite() {
        f64::INFINITY
    } else {
        nonneg(log_in_base(max_ratio, log_base))
    };
    Ok(MeasureValue {
        value,
        kind: MeasureKind::RenyiMax,
        log_base: Some(log_base),
    })
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A convex generator `f` with `f(1) = 0` for the Csiszar family, optionally
/// carrying its derivative for Bregman divergences.
///
/// Construction spot-checks both constraints numerically: `|f(1)| <= 1e-12`,
/// and midpoint convexity on a fixed grid over `(0, 3]` with the same slack.
pub struct ConvexGenerator {
    name: String,
    f: Box<ScalarFn>,
    f_prime: Option<Box<ScalarFn>>,
    domain_note: String,
}

impl std::fmt::Debug for ConvexGenerator {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt.debug_struct("ConvexGenerator")
            .field("name", &self.name)
            .field("has_derivative", &self.f_prime.is_some())
            .field("domain_note", &self.domain_note)
            .finish()
    }
}

impl ConvexGenerator {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain_note: impl Into<String>,
    ) -> Result<Self> {
        let name = name.into();
        Self::check(&name, &f)?;
        Ok(Self {
            name,
            f: Box::new(f),
            f_prime: None,
            domain_note: domain_note.into(),
        })
    }

    pub fn with_derivative(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain_note: impl Into<String>,
    ) -> Result<Self> {
        let name = name.into();
        Self::check(&name, &f)?;
        Ok(Self {
            name,
            f: Box::new(f),
            f_prime: Some(Box::new(f_prime)),
            domain_note: domain_note.into(),
        })
    }

    fn check(name: &str, f: &impl Fn(f64) -> f64) -> Result<()> {
        let at_one = f(1.0);
        if at_one.abs() > 1e-12 {
            return Err(Error::InvalidGenerator {
                name: name.to_string(),
                reason: format!("f(1) = {at_one}, expected 0"),
            });
        }
        // midpoint convexity on t = 0.05, 0.10, ..., 3.00
        let grid: Vec<f64> = (1..=60).map(|k| k as f64 * 0.05).collect();
        for w in grid.windows(3) {
            let (a, mid, c) = (f(w[0]), f(w[1]), f(w[2]));
            if mid > 0.5 * (a + c) + 1e-12 {
                return Err(Error::InvalidGenerator {
                    name: name.to_string(),
                    reason: format!("not convex near t = {}", w[1]),
                });
            }
        }
        Ok(())
    }

    /// `t log t` (natural log, `0 log 0 = 0`): generates the directed K-L.
    pub fn kl() -> Self {
        Self::with_derivative(
            "kl",
            |t| if t == 0.0 { 0.0 } else { t * t.ln() },
            |t| 1.0 + t.ln(),
            "finite on [0, inf); derivative finite on (0, inf)",
        )
        .expect("t log t satisfies the generator constraints")
    }

    /// `1/2 |t - 1|`: generates the total variation distance.
    pub fn total_variation() -> Self {
        Self::new("tv", |t| 0.5 * (t - 1.0).abs(), "finite everywhere")
            .expect("|t - 1| / 2 satisfies the generator constraints")
    }

    /// `t^2 - 1` with derivative `2t`.
    ///
    /// The affine shift against plain `t^2` keeps `f(1) = 0` without changing
    /// the Bregman divergence, which stays `sum (p_i - q_i)^2`.
    pub fn squared() -> Self {
        Self::with_derivative(
            "squared",
            |t| t * t - 1.0,
            |t| 2.0 * t,
            "finite everywhere",
        )
        .expect("t^2 - 1 satisfies the generator constraints")
    }

    /// Look up one of the shipped generators: `kl`, `tv` or `squared`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "kl" => Ok(Self::kl()),
            "tv" => Ok(Self::total_variation()),
            "squared" => Ok(Self::squared()),
            other => Err(Error::UnknownMeasure {
                name: other.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_note(&self) -> &str {
        &self.domain_note
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        self.f_prime.as_ref().map(|g| g(t))
    }

    fn derivative_fn(&self) -> Result<&ScalarFn> {
        self.f_prime.as_deref().ok_or(Error::MissingDerivative)
    }
}

/// Generic Csiszar f-divergence `sum_i p_i f(q_i / p_i)`.
///
/// Requires a strictly positive reference `p`; the specialized measures own
/// the zero conventions.
pub fn f_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    gen: &ConvexGenerator,
) -> Result<MeasureValue> {
    ensure_same_len(p, q)?;
    if let Some(index) = p.probs().iter().position(|&pi| pi == 0.0) {
        return Err(Error::ZeroInReference { index });
    }
    let total: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| pi * gen.eval(qi / pi))
        .sum();
    Ok(MeasureValue {
        value: nonneg(total),
        kind: MeasureKind::FDivergence,
        log_base: None,
    })
}

/// Bregman divergence `sum_i [f(p_i) - f(q_i) - (p_i - q_i) f'(q_i)]`.
///
/// Requires a generator with a derivative and strictly positive entries on
/// both sides.
pub fn bregman(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    gen: &ConvexGenerator,
) -> Result<MeasureValue> {
    ensure_same_len(p, q)?;
    let f_prime = gen.derivative_fn()?;
    for (index, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi == 0.0 || qi == 0.0 {
            return Err(Error::ZeroEntry { index });
        }
    }
    let total: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| gen.eval(pi) - gen.eval(qi) - (pi - qi) * f_prime(qi))
        .sum();
    Ok(MeasureValue {
        value: nonneg(total),
        kind: MeasureKind::Bregman,
        log_base: None,
    })
}

/// Split `kl(p, q)` into the contribution of the dominant class(es) and the
/// nondominant-class remainder (the *clutter*).
///
/// With agreeing labels the dominant side covers `{omega}` alone; with
/// disagreeing labels it covers both `{omega, omega_tilde}`. Either side can
/// be negative term-wise or `+inf`; their sum recovers `kl(p, q)`.
pub fn kl_clutter(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    pair: &DominantPair,
    log_base: f64,
) -> Result<(f64, f64)> {
    ensure_same_len(p, q)?;
    let mut dominant_term = 0.0;
    let mut clutter_term = 0.0;
    for (i, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if qi == 0.0 {
            continue;
        }
        let term = if pi == 0.0 {
            f64::INFINITY
        } else {
            qi * log_in_base(qi / pi, log_base)
        };
        if i == pair.omega || i == pair.omega_tilde {
            dominant_term += term;
        } else {
            clutter_term += term;
        }
    }
    Ok((dominant_term, clutter_term))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::validate(v).unwrap()
    }

    const E: f64 = std::f64::consts::E;

    #[test]
    fn kl_identical_is_zero() {
        let p = dist(&[0.3, 0.3, 0.4]);
        assert_eq!(kl(&p, &p, E).unwrap().value, 0.0);
    }

    #[test]
    fn kl_matches_direct_summation_oracle() {
        // 0.25 ln(0.5) + 0.75 ln(1.5), evaluated independently
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let expected = 0.13081203594113697;
        assert!((kl(&p, &q, E).unwrap().value - expected).abs() < 1e-15);
    }

    #[test]
    fn kl_infinite_on_support_violation() {
        let p = dist(&[1.0, 0.0]);
        let q = dist(&[0.0, 1.0]);
        assert_eq!(kl(&p, &q, E).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn kl_dimension_mismatch() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.4, 0.3, 0.3]);
        assert!(matches!(
            kl(&p, &q, E),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn kl_symmetrized_is_the_two_term_sum() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let expected = 0.13081203594113697 + 0.14384103622589042;
        let forward = kl_symmetrized(&p, &q, E).unwrap().value;
        let backward = kl_symmetrized(&q, &p, E).unwrap().value;
        assert!((forward - expected).abs() < 1e-15);
        assert_eq!(forward, backward);
        assert_eq!(kl_symmetrized(&p, &p, E).unwrap().value, 0.0);
    }

    #[test]
    fn jensen_shannon_identical_is_zero() {
        let p = dist(&[0.2, 0.8]);
        assert_eq!(jensen_shannon(&p, &p, 2.0).unwrap().value, 0.0);
    }

    #[test]
    fn jensen_shannon_orthogonal_attains_the_bound() {
        let p = dist(&[1.0, 0.0]);
        let q = dist(&[0.0, 1.0]);
        assert_eq!(jensen_shannon(&p, &q, 2.0).unwrap().value, 1.0);
    }

    #[test]
    fn jensen_shannon_matches_four_term_oracle() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let expected = 0.048794940695398498; // direct four-term evaluation
        assert!((jensen_shannon(&p, &q, 2.0).unwrap().value - expected).abs() < 1e-15);
    }

    #[test]
    fn total_variation_examples() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.5, 0.2, 0.3]);
        assert!((total_variation(&p, &q).unwrap().value - 0.1).abs() < 1e-15);
        assert_eq!(total_variation(&p, &p).unwrap().value, 0.0);
        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        assert_eq!(total_variation(&a, &b).unwrap().value, 1.0);
    }

    #[test]
    fn renyi_identical_is_zero() {
        let p = dist(&[0.3, 0.7]);
        for alpha in [0.5, 2.0, 5.0] {
            assert_eq!(renyi(&p, &p, alpha, E).unwrap().value, 0.0);
        }
    }

    #[test]
    fn renyi_alpha_two_matches_summation_oracle() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        // sum p (q/p)^2 = 0.125 + 1.125 = 1.25; value = ln(1.25)
        let expected = 0.22314355131420976;
        assert!((renyi(&p, &q, 2.0, E).unwrap().value - expected).abs() < 1e-15);
    }

    #[test]
    fn renyi_approaches_kl_near_alpha_one() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let kl_value = kl(&p, &q, E).unwrap().value;
        for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
            let r = renyi(&p, &q, alpha, E).unwrap().value;
            assert!((r - kl_value).abs() < 1e-3, "alpha={alpha}: {r} vs {kl_value}");
        }
    }

    #[test]
    fn renyi_alpha_one_delegates_to_kl() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        assert_eq!(
            renyi(&p, &q, 1.0, E).unwrap().value,
            kl(&p, &q, E).unwrap().value
        );
    }

    #[test]
    fn renyi_rejects_nonpositive_alpha() {
        let p = dist(&[0.5, 0.5]);
        assert!(matches!(
            renyi(&p, &p, 0.0, E),
            Err(Error::InvalidAlpha { .. })
        ));
        assert!(matches!(
            renyi(&p, &p, -1.0, E),
            Err(Error::InvalidAlpha { .. })
        ));
    }

    #[test]
    fn renyi_infinite_on_support_violation_above_one() {
        let p = dist(&[1.0, 0.0]);
        let q = dist(&[0.5, 0.5]);
        assert_eq!(renyi(&p, &q, 2.0, E).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn renyi_max_is_the_log_max_ratio() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let expected = (0.75f64 / 0.5).ln();
        assert!((renyi_max(&p, &q, E).unwrap().value - expected).abs() < 1e-15);
        assert_eq!(renyi_max(&p, &p, E).unwrap().value, 0.0);
    }

    #[test]
    fn generator_rejects_nonzero_at_one() {
        let err = ConvexGenerator::new("bad", |t| t * t, "").unwrap_err();
        assert!(matches!(err, Error::InvalidGenerator { .. }));
    }

    #[test]
    fn generator_rejects_concave() {
        let err = ConvexGenerator::new("sqrt", |t| t.sqrt() - 1.0, "").unwrap_err();
        assert!(matches!(err, Error::InvalidGenerator { .. }));
    }

    #[test]
    fn f_divergence_identical_is_zero_for_any_generator() {
        let p = dist(&[0.3, 0.3, 0.4]);
        for gen in [
            ConvexGenerator::kl(),
            ConvexGenerator::total_variation(),
            ConvexGenerator::squared(),
        ] {
            assert_eq!(f_divergence(&p, &p, &gen).unwrap().value, 0.0);
        }
    }

    #[test]
    fn f_divergence_kl_generator_reproduces_kl() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.2, 0.5, 0.3]);
        let via_f = f_divergence(&p, &q, &ConvexGenerator::kl()).unwrap().value;
        let direct = kl(&p, &q, E).unwrap().value;
        assert!((via_f - direct).abs() < 1e-12);
    }

    #[test]
    fn f_divergence_tv_generator_reproduces_total_variation() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.2, 0.5, 0.3]);
        let via_f = f_divergence(&p, &q, &ConvexGenerator::total_variation())
            .unwrap()
            .value;
        let direct = total_variation(&p, &q).unwrap().value;
        assert!((via_f - direct).abs() < 1e-12);
    }

    #[test]
    fn f_divergence_rejects_zero_reference() {
        let p = dist(&[1.0, 0.0]);
        let q = dist(&[0.5, 0.5]);
        assert!(matches!(
            f_divergence(&p, &q, &ConvexGenerator::kl()),
            Err(Error::ZeroInReference { index: 1 })
        ));
    }

    #[test]
    fn bregman_squared_is_the_squared_distance() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let b = bregman(&p, &q, &ConvexGenerator::squared()).unwrap().value;
        assert!((b - 0.125).abs() < 1e-15);
        assert_eq!(bregman(&p, &p, &ConvexGenerator::squared()).unwrap().value, 0.0);
    }

    #[test]
    fn bregman_kl_generator_reproduces_kl_with_p_first() {
        // f(t) = t ln t gives sum [p ln p - q ln q - (p - q)(1 + ln q)]
        // = sum p ln(p/q), i.e. kl with the roles swapped.
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.2, 0.5, 0.3]);
        let b = bregman(&p, &q, &ConvexGenerator::kl()).unwrap().value;
        let direct = kl(&q, &p, E).unwrap().value;
        assert!((b - direct).abs() < 1e-12);
    }

    #[test]
    fn bregman_requires_derivative_and_positive_entries() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        assert!(matches!(
            bregman(&p, &q, &ConvexGenerator::total_variation()),
            Err(Error::MissingDerivative)
        ));
        let degenerate = dist(&[1.0, 0.0]);
        assert!(matches!(
            bregman(&degenerate, &q, &ConvexGenerator::squared()),
            Err(Error::ZeroEntry { index: 1 })
        ));
    }

    #[test]
    fn kl_clutter_identical_is_zero_zero() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let pair = DominantPair::of(&p, &p).unwrap();
        assert_eq!(kl_clutter(&p, &p, &pair, E).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn kl_clutter_agreeing_labels_with_equal_dominant_support() {
        // dominant term vanishes, everything lands in the clutter
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.5, 0.1, 0.4]);
        let pair = DominantPair::of(&p, &q).unwrap();
        assert!(pair.labels_agree);
        let (dominant, clutter) = kl_clutter(&p, &q, &pair, E).unwrap();
        assert_eq!(dominant, 0.0);
        let expected = 0.16739764335716714; // 0.1 ln(1/3) + 0.4 ln 2
        assert!((clutter - expected).abs() < 1e-15);
        assert!((dominant + clutter - kl(&p, &q, E).unwrap().value).abs() < 1e-12);
    }

    #[test]
    fn kl_clutter_disagreeing_labels_with_identical_tails() {
        let p = dist(&[0.5, 0.3, 0.2]);
        let q = dist(&[0.3, 0.5, 0.2]);
        let pair = DominantPair::of(&p, &q).unwrap();
        assert!(!pair.labels_agree);
        let (dominant, clutter) = kl_clutter(&p, &q, &pair, E).unwrap();
        assert_eq!(clutter, 0.0);
        // two-term form over {omega, omega_tilde}
        let expected = 0.10216512475319814;
        assert!((dominant - expected).abs() < 1e-15);
        assert!((dominant + clutter - kl(&p, &q, E).unwrap().value).abs() < 1e-12);
    }
}

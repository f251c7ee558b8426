//! Cross-module invariants of the measure family, checked over seeded
//! Monte-Carlo populations.

use deltadiv::classical::{
    bregman, f_divergence, jensen_shannon, kl, kl_clutter, kl_symmetrized, renyi, renyi_max,
    total_variation, ConvexGenerator,
};
use deltadiv::delta::{delta_divergence, delta_max, delta_star};
use deltadiv::sampling::{sample_simplex, PairSampler, SamplerConfig};
use deltadiv::simplex::{DiscreteDistribution, DominantPair};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const E: f64 = std::f64::consts::E;

fn pairs(m: usize, count: u64, seed: u64) -> impl Iterator<Item = (DiscreteDistribution, DiscreteDistribution)> {
    let sampler = PairSampler::new(SamplerConfig::unconstrained(m, count, seed)).unwrap();
    (0..count).map(move |k| sampler.pair(k).unwrap())
}

#[test]
fn every_measure_is_nonnegative() {
    let squared = ConvexGenerator::squared();
    for m in [2usize, 3, 6] {
        for (p, q) in pairs(m, 100_000, 1000 + m as u64) {
            assert!(kl(&p, &q, E).unwrap().value >= 0.0);
            assert!(kl_symmetrized(&p, &q, E).unwrap().value >= 0.0);
            assert!(jensen_shannon(&p, &q, 2.0).unwrap().value >= 0.0);
            assert!(total_variation(&p, &q).unwrap().value >= 0.0);
            assert!(renyi(&p, &q, 0.5, E).unwrap().value >= 0.0);
            assert!(renyi(&p, &q, 2.0, E).unwrap().value >= 0.0);
            assert!(renyi_max(&p, &q, E).unwrap().value >= 0.0);
            assert!(bregman(&p, &q, &squared).unwrap().value >= 0.0);
            assert!(delta_divergence(&p, &q).unwrap().value >= 0.0);
            assert!(delta_star(&p, &q).unwrap().value >= 0.0);
            assert!(delta_max(&p, &q).unwrap().value >= 0.0);
        }
    }
}

#[test]
fn zero_on_identical_and_small_values_mean_close_distributions() {
    for (p, _) in pairs(5, 1_000, 2000) {
        assert_eq!(kl(&p, &p, E).unwrap().value, 0.0);
        assert_eq!(kl_symmetrized(&p, &p, E).unwrap().value, 0.0);
        assert_eq!(jensen_shannon(&p, &p, 2.0).unwrap().value, 0.0);
        assert_eq!(total_variation(&p, &p).unwrap().value, 0.0);
        assert_eq!(delta_divergence(&p, &p).unwrap().value, 0.0);
    }
    // spot check: a symmetrized K-L below 1e-12 pins total variation below 1e-6
    let base = DiscreteDistribution::validate(&[0.4, 0.35, 0.25]).unwrap();
    let eps = 1e-8;
    let close = DiscreteDistribution::validate(&[0.4 + eps, 0.35 - eps, 0.25]).unwrap();
    let sym = kl_symmetrized(&base, &close, E).unwrap().value;
    assert!(sym < 1e-12, "symmetrized K-L {sym}");
    assert!(total_variation(&base, &close).unwrap().value < 1e-6);
}

#[test]
fn symmetry_where_promised_and_asymmetry_of_kl() {
    let mut asymmetry_witnessed = false;
    for (p, q) in pairs(4, 10_000, 3000) {
        let sym = kl_symmetrized(&p, &q, E).unwrap().value;
        assert!((sym - kl_symmetrized(&q, &p, E).unwrap().value).abs() < 1e-12);
        let js = jensen_shannon(&p, &q, 2.0).unwrap().value;
        assert!((js - jensen_shannon(&q, &p, 2.0).unwrap().value).abs() < 1e-12);
        let tv = total_variation(&p, &q).unwrap().value;
        assert!((tv - total_variation(&q, &p).unwrap().value).abs() < 1e-12);
        if (kl(&p, &q, E).unwrap().value - kl(&q, &p, E).unwrap().value).abs() > 0.01 {
            asymmetry_witnessed = true;
        }
    }
    assert!(asymmetry_witnessed);
}

#[test]
fn bounded_measures_stay_bounded_and_kl_does_not() {
    let mut max_kl: f64 = 0.0;
    for (p, q) in pairs(6, 100_000, 4000) {
        let js = jensen_shannon(&p, &q, 2.0).unwrap().value;
        assert!((0.0..=1.0).contains(&js));
        let tv = total_variation(&p, &q).unwrap().value;
        assert!((0.0..=1.0).contains(&tv));
        max_kl = max_kl.max(kl(&p, &q, E).unwrap().value);
    }
    assert!(max_kl > 3.0, "six-class K-L never exceeded 3 (max {max_kl})");
}

#[test]
fn generic_path_matches_specialized_measures() {
    let kl_gen = ConvexGenerator::kl();
    let tv_gen = ConvexGenerator::total_variation();
    for (p, q) in pairs(6, 10_000, 5000) {
        if p.probs().iter().chain(q.probs()).any(|&x| x == 0.0) {
            continue;
        }
        let via_f = f_divergence(&p, &q, &kl_gen).unwrap().value;
        assert!((via_f - kl(&p, &q, E).unwrap().value).abs() < 1e-12);
        let via_f = f_divergence(&p, &q, &tv_gen).unwrap().value;
        assert!((via_f - total_variation(&p, &q).unwrap().value).abs() < 1e-12);
    }
}

#[test]
fn total_variation_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(6000);
    for _ in 0..10_000 {
        let a = sample_simplex(4, &mut rng);
        let b = sample_simplex(4, &mut rng);
        let c = sample_simplex(4, &mut rng);
        let ab = total_variation(&a, &b).unwrap().value;
        let bc = total_variation(&b, &c).unwrap().value;
        let ac = total_variation(&a, &c).unwrap().value;
        assert!(ab + bc >= ac - 1e-12);
    }
}

#[test]
fn kl_split_recovers_the_total() {
    for m in [3usize, 6] {
        for (p, q) in pairs(m, 10_000, 7000 + m as u64) {
            let pair = DominantPair::of(&p, &q).unwrap();
            let (dominant, clutter) = kl_clutter(&p, &q, &pair, E).unwrap();
            let total = kl(&p, &q, E).unwrap().value;
            if total.is_finite() {
                assert!((dominant + clutter - total).abs() < 1e-12);
            } else {
                assert!(dominant + clutter == f64::INFINITY);
            }
        }
    }
}

use std::collections::HashMap;

use partlab_core::asymptotics::{scale, C};
use partlab_core::experiments::exponential_marginals;
use partlab_core::partition::enumerate_partitions;
use partlab_core::sampling::{
    sample_boltzmann, sample_surrogate, sample_uniform_exact, BoltzmannStats, SurrogateDraw,
    DEFAULT_RETRY_CAP,
};
use partlab_core::stats::chi_square_uniform;
use partlab_core::{RestrictedCountTable, RngStream, TableMode};
use proptest::prelude::*;

fn index(n: u32) -> HashMap<Vec<u32>, usize> {
    let mut m = HashMap::new();
    enumerate_partitions(n, |p| {
        let i = m.len();
        m.insert(p.to_vec(), i);
    });
    m
}

#[test]
fn exact_sampler_uniform_on_twelve() {
    let t = RestrictedCountTable::build(12, TableMode::ByLargestPart);
    let idx = index(12);
    let mut counts = vec![0u64; idx.len()];
    let mut rng = RngStream::new(77, 0).rng();
    for _ in 0..154_000 {
        counts[idx[sample_uniform_exact(12, &mut rng, &t).unwrap().parts()]] += 1;
    }
    assert!(chi_square_uniform(&counts).unwrap().p_value > 1e-3);
}

#[test]
fn boltzmann_uniform_on_six() {
    let idx = index(6);
    let mut counts = vec![0u64; idx.len()];
    let mut rng = RngStream::new(78, 0).rng();
    let mut st = BoltzmannStats::default();
    for _ in 0..55_000 {
        let p = sample_boltzmann(6, &mut rng, DEFAULT_RETRY_CAP, &mut st).unwrap();
        counts[idx[p.parts()]] += 1;
    }
    assert!(chi_square_uniform(&counts).unwrap().p_value > 1e-3);
}

#[test]
fn boltzmann_acceptance_power_law() {
    let ns = [100u32, 400, 1600, 6400];
    let mut pts = Vec::new();
    for &n in &ns {
        let mut st = BoltzmannStats::default();
        let mut rng = RngStream::new(79, n.into()).rng();
        for _ in 0..150 {
            sample_boltzmann(n, &mut rng, DEFAULT_RETRY_CAP, &mut st).unwrap();
        }
        pts.push((f64::from(n).ln(), st.acceptance_rate().ln()));
    }
    assert!(pts.windows(2).all(|w| w[1].1 < w[0].1));
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope > -0.9 && slope < -0.6, "slope {slope}");
}

#[test]
fn reproducible_streams() {
    let t = RestrictedCountTable::build(300, TableMode::ByLargestPart);
    let run = |s: RngStream| {
        let mut rng = s.rng();
        let mut out = String::new();
        for _ in 0..50 {
            out += &serde_json::to_string(&sample_uniform_exact(300, &mut rng, &t).unwrap()).unwrap();
            out += &serde_json::to_string(&sample_surrogate(300, 3, &mut rng).unwrap()).unwrap();
            out.push('\n');
        }
        out
    };
    assert_eq!(run(RngStream::new(5, 1)), run(RngStream::new(5, 1)));
    assert_ne!(run(RngStream::new(5, 1)), run(RngStream::new(5, 2)));
}

#[test]
fn exponential_marginals_are_unit_rate() {
    let e = exponential_marginals(1_000_000, RngStream::new(80, 0)).unwrap();
    assert!((e.mean - 1.0).abs() <= 0.01, "{}", e.mean);
    assert!((e.exceed_one.value - (-1f64).exp()).abs() <= 0.005);
}

#[test]
fn forced_unit_log_point() {
    for n in [100u64, 2500, 10_000, 12_345] {
        let d = SurrogateDraw::from_sums(n, vec![scale(n) * (-C).exp()], vec![scale(n)]).unwrap();
        assert_eq!(d.lambda[0], (n as f64).sqrt().ceil() as i64, "n = {n}");
        assert_eq!(d.lambda_prime[0], 0);
    }
}

proptest! {
    #[test]
    fn slanted_transform_is_nonincreasing(n in 1u64..100_000, a in 1e-6f64..50.0, b in 1e-6f64..50.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let d = SurrogateDraw::from_sums(n, vec![lo, hi], vec![lo, hi]).unwrap();
        prop_assert!(d.lambda[0] >= d.lambda[1]);
        prop_assert_eq!(d.nonpositive, d.lambda[1] <= 0);
    }

    #[test]
    fn exact_draws_have_weight_n(n in 0u32..200, seed in any::<u64>()) {
        let t = RestrictedCountTable::build(200, TableMode::ByLargestPart);
        let p = sample_uniform_exact(n, &mut RngStream::new(seed, 0).rng(), &t).unwrap();
        prop_assert_eq!(p.weight(), u64::from(n));
    }
}

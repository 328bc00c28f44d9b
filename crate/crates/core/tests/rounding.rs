use entround::discrepancy::PartialColoring;
use entround::matrix::{DenseMatrix, DiscrepancyBounds};
use entround::rounding::{
    append_objective_row, dyadic_snap, entropy_round, goodness_check, reduce_to_basic,
    reduce_to_basic_with_rng, Backend, RoundingConfig, RoundingInstance,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn plain(x: Vec<f64>) -> RoundingInstance {
    let m = x.len();
    RoundingInstance::new(
        DenseMatrix::empty(m),
        DenseMatrix::empty(m),
        DiscrepancyBounds::new(vec![]).unwrap(),
        vec![],
        vec![0.0; m],
        x,
    )
    .unwrap()
}

fn ones_row(x: Vec<f64>, delta: f64) -> RoundingInstance {
    let m = x.len();
    RoundingInstance::new(
        DenseMatrix::from_rows(&[vec![1.0; m]], m).unwrap(),
        DenseMatrix::empty(m),
        DiscrepancyBounds::new(vec![delta]).unwrap(),
        vec![],
        vec![0.0; m],
        x,
    )
    .unwrap()
}

#[test]
fn objective_row_halves_weights() {
    let inst = RoundingInstance::new(
        DenseMatrix::empty(2),
        DenseMatrix::from_rows(&[vec![1.0, 0.5]], 2).unwrap(),
        DiscrepancyBounds::new(vec![]).unwrap(),
        vec![1.0],
        vec![0.3, 0.7],
        vec![0.5, 0.5],
    )
    .unwrap();
    let w = append_objective_row(&inst);
    assert_eq!(w.mu, vec![0.5, 0.5]);
    assert_eq!(w.b.row(1), &[0.3, 0.7]);
}

#[test]
fn basic_reduction_keeps_row_sums() {
    let inst = ones_row(vec![0.5, 0.5, 0.5], 1.0);
    let z = reduce_to_basic(&inst);
    assert!((z.z.iter().sum::<f64>() - 1.5).abs() < 1e-9);
    assert!(z.z.iter().filter(|&&v| v > 1e-9 && v < 1.0 - 1e-9).count() <= 1);
}

#[test]
fn dyadic_snap_one_bit() {
    let mut hits = 0;
    for seed in 0..10_000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = dyadic_snap(&[0.3], 1, &mut rng).unwrap();
        let v = d.values()[0];
        assert!(v == 0.0 || v == 0.5);
        if v == 0.5 {
            hits += 1;
        }
    }
    // 0.6 +- 4 sigma
    let sd = (10_000.0f64 * 0.6 * 0.4).sqrt();
    assert!((hits as f64 - 6000.0).abs() <= 4.0 * sd, "{hits}");
}

#[test]
fn empty_constraints_round_without_bias() {
    let inst = plain(vec![0.5, 0.5]);
    let cfg = RoundingConfig::default();
    let mut sum = [0.0; 2];
    const RUNS: u64 = 10_000;
    for seed in 0..RUNS {
        let r = entropy_round(&inst, Backend::Exhaustive, &cfg, seed).unwrap();
        for (s, &y) in sum.iter_mut().zip(&r.y) {
            *s += y as f64;
        }
    }
    let tol = 4.0 * 0.5 / (RUNS as f64).sqrt();
    for s in sum {
        assert!((s / RUNS as f64 - 0.5).abs() <= tol);
    }
}

#[test]
fn ones_row_within_log_bound() {
    let inst = ones_row(vec![0.5; 4], 1.0);
    let cfg = RoundingConfig::default();
    for seed in 0..500 {
        let r = entropy_round(&inst, Backend::Exhaustive, &cfg, seed).unwrap();
        let s: f64 = r.y.iter().map(|&v| v as f64).sum();
        assert!((s - 2.0).abs() <= 16f64.log2() + 1e-9);
        assert!(r.within_deterministic_bound());
    }
}

#[test]
fn goodness_rejects_large_discrepancy() {
    let inst = RoundingInstance::new(
        DenseMatrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap(),
        DenseMatrix::empty(2),
        DiscrepancyBounds::new(vec![1.0]).unwrap(),
        vec![],
        vec![0.0; 2],
        vec![0.5, 0.5],
    )
    .unwrap();
    let chi = PartialColoring::new(vec![1, 1]).unwrap();
    assert!(!goodness_check(&chi, &inst, 0.5));
}

#[test]
fn sdp_backend_rounds() {
    let inst = ones_row(vec![0.25, 0.75, 0.5, 0.5, 0.125, 0.875], 2.0);
    let r = entropy_round(&inst, Backend::Sdp, &RoundingConfig::default(), 4).unwrap();
    assert_eq!(r.y.len(), 6);
    assert!(r.y.iter().all(|&v| v <= 1));
}

#[test]
fn seeded_runs_repeat() {
    let inst = ones_row(vec![0.3, 0.6, 0.9, 0.2, 0.45], 1.0);
    let cfg = RoundingConfig::default();
    let a = entropy_round(&inst, Backend::Exhaustive, &cfg, 99).unwrap();
    let b = entropy_round(&inst, Backend::Exhaustive, &cfg, 99).unwrap();
    assert_eq!(a, b);
}

fn random_instance(seed: u64, n: usize, m: usize) -> RoundingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let a = DenseMatrix::from_rows(&rows, m).unwrap();
    let delta = DiscrepancyBounds::new((0..n).map(|i| a.row_norm2(i).max(1e-3)).collect()).unwrap();
    let b = DenseMatrix::from_rows(&[(0..m).map(|_| rng.random::<f64>()).collect()], m).unwrap();
    let c = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let x = (0..m).map(|_| rng.random::<f64>()).collect();
    RoundingInstance::new(a, b, delta, vec![0.5], c, x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exhaustive_rounding_is_integral_and_bounded(seed in any::<u64>(), n in 1usize..=3, m in 2usize..=12) {
        let inst = random_instance(seed, n, m);
        let r = entropy_round(&inst, Backend::Exhaustive, &RoundingConfig::default(), seed).unwrap();
        prop_assert_eq!(r.y.len(), m);
        prop_assert!(r.y.iter().all(|&v| v <= 1));
        prop_assert!(r.within_deterministic_bound());
        prop_assert!(r.planes_halve());
    }

    #[test]
    fn integral_input_is_kept(seed in any::<u64>(), m in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..m).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect();
        let r = entropy_round(&plain(x.clone()), Backend::Exhaustive, &RoundingConfig::default(), seed).unwrap();
        let y: Vec<f64> = r.y.iter().map(|&v| v as f64).collect();
        prop_assert_eq!(y, x);
    }

    #[test]
    fn randomized_basic_reduction_keeps_rows(seed in any::<u64>(), n in 1usize..=3, m in 2usize..=10) {
        let inst = random_instance(seed, n, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let red = reduce_to_basic_with_rng(&inst, &mut rng);
        prop_assume!(!red.degenerate);
        for row in inst.a.rows().chain(inst.b.rows()) {
            let before: f64 = row.iter().zip(&inst.x).map(|(a, x)| a * x).sum();
            let after: f64 = row.iter().zip(&red.z).map(|(a, x)| a * x).sum();
            prop_assert!((before - after).abs() < 1e-7);
        }
        prop_assert!(red.fractional <= inst.n_rows());
        prop_assert!(red.z.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn dyadic_snap_reconstructs(seed in any::<u64>(), m in 1usize..=8, k in 1u32..=20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let d = dyadic_snap(&x, k, &mut rng).unwrap();
        let step = 0.5f64.powi(k as i32);
        for (v, x) in d.values().iter().zip(&x) {
            prop_assert!((v - x).abs() < step + 1e-12);
            prop_assert!((v / step - (v / step).round()).abs() < 1e-9);
        }
    }
}

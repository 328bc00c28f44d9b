use entround::discrepancy::g_inverse;
use entround::matrix::{DenseMatrix, DiscrepancyBounds};
use entround::sdp::{
    bansal_walk, build_coloring_sdp, freeze_is_monotone, residuals, solve_sdp_feasibility, RowKind,
    WalkConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn none() -> DiscrepancyBounds {
    DiscrepancyBounds::new(vec![]).unwrap()
}

#[test]
fn b_row_cap() {
    let m = 40;
    let b = DenseMatrix::from_rows(&[vec![1.0; m]], m).unwrap();
    let active: Vec<usize> = (0..m).collect();
    let spec = build_coloring_sdp(&DenseMatrix::empty(m), &b, &none(), &[1.0], &active).unwrap();
    let row = spec.rows.iter().find(|r| r.kind == RowKind::B(0)).unwrap();
    let want = g_inverse(4.0).unwrap() * (m as f64).sqrt();
    assert!((row.cap - want).abs() < 1e-9, "{} vs {want}", row.cap);
}

#[test]
fn antipodal_pair() {
    let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]], 2).unwrap();
    // bounds must be positive, so a tiny one stands in for zero
    let delta = DiscrepancyBounds::new(vec![1e-9]).unwrap();
    let spec = build_coloring_sdp(&a, &DenseMatrix::empty(2), &delta, &[], &[0, 1]).unwrap();
    let v = solve_sdp_feasibility(&spec, 1e-6).unwrap();
    assert!(residuals(&spec, &v).max() <= 1e-5);
    let sum: f64 = v.vectors[0]
        .iter()
        .zip(&v.vectors[1])
        .map(|(x, y)| (x + y).powi(2))
        .sum();
    assert!(sum.sqrt() <= 1e-4);
}

#[test]
fn bpr_like_spec_at_m8() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let m = 8;
    let rows: Vec<Vec<f64>> = (1..=3)
        .map(|i| (0..m).map(|j| ((j * 7 + i) % 4) as f64).collect())
        .collect();
    let a = DenseMatrix::from_rows(&rows, m).unwrap();
    let delta = DiscrepancyBounds::new((0..3).map(|i| a.row_norm2(i)).collect()).unwrap();
    let b = DenseMatrix::from_rows(&[(0..m).map(|_| rng.random::<f64>()).collect()], m).unwrap();
    let active: Vec<usize> = (0..m).collect();
    let spec = build_coloring_sdp(&a, &b, &delta, &[0.5], &active).unwrap();
    let v = solve_sdp_feasibility(&spec, 1e-6).unwrap();
    assert!(residuals(&spec, &v).max() <= 1e-5);
}

#[test]
fn single_column_is_fair() {
    let e = DenseMatrix::empty(1);
    let mut plus = 0;
    const RUNS: u64 = 10_000;
    for seed in 0..RUNS {
        let o = bansal_walk(&e, &e, &none(), &[], &WalkConfig::default(), seed).unwrap();
        let chi = o.coloring.unwrap();
        if chi.values()[0] == 1 {
            plus += 1;
        }
    }
    let sd = (RUNS as f64 * 0.25).sqrt();
    assert!(
        (plus as f64 - RUNS as f64 / 2.0).abs() <= 4.0 * sd,
        "{plus}"
    );
}

#[test]
fn zero_matrices_freeze_everything() {
    let e = DenseMatrix::empty(8);
    let cfg = WalkConfig {
        record_trace: true,
        ..WalkConfig::default()
    };
    let mut mean = [0.0; 8];
    for seed in 0..400 {
        let o = bansal_walk(&e, &e, &none(), &[], &cfg, seed).unwrap();
        assert!(o.success);
        assert!(freeze_is_monotone(o.trace.as_ref().unwrap()));
        assert!(o.ledger.is_consistent());
        for (m, c) in mean.iter_mut().zip(o.coloring.unwrap().values()) {
            *m += *c as f64 / 400.0;
        }
    }
    assert!(mean.iter().all(|m| m.abs() <= 4.0 / 20.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn walk_colorings_are_full_and_monotone(seed in any::<u64>(), m in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = vec![(0..m).map(|_| rng.random_range(-1.0..=1.0)).collect()];
        let a = DenseMatrix::from_rows(&rows, m).unwrap();
        let delta = DiscrepancyBounds::new(vec![a.row_norm2(0).max(1e-3)]).unwrap();
        let cfg = WalkConfig { record_trace: true, ..WalkConfig::default() };
        let o = bansal_walk(&a, &DenseMatrix::empty(m), &delta, &[], &cfg, seed).unwrap();
        prop_assert!(freeze_is_monotone(o.trace.as_ref().unwrap()));
        prop_assert!(o.chi.iter().all(|c| c.abs() <= 1.0));
        if let Some(chi) = &o.coloring {
            prop_assert!(chi.is_full());
        }
    }

    #[test]
    fn solver_output_passes_residual_check(seed in any::<u64>(), m in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..2).map(|_| (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
        let a = DenseMatrix::from_rows(&rows, m).unwrap();
        let delta = DiscrepancyBounds::new((0..2).map(|i| a.row_norm2(i).max(1e-3)).collect()).unwrap();
        let active: Vec<usize> = (0..m).collect();
        let spec = build_coloring_sdp(&a, &DenseMatrix::empty(m), &delta, &[], &active).unwrap();
        if let Ok(v) = solve_sdp_feasibility(&spec, 1e-6) {
            prop_assert!(residuals(&spec, &v).max() <= 1e-5);
        }
    }
}

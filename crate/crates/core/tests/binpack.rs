mod common;

use entround::binpack::{
    assign_items_to_slots, assign_small_fractional, check_deficits, cumulated_matrix, grade_index,
    repair_large, size_budget, solve_bin_packing, solve_bpr, solve_train, ItemGroups,
    PackingConfig, PackingInstance, ProblemKind,
};
use entround::config;
use entround::covering::Pattern;
use entround::discrepancy::exact_joint_entropy;
use entround::error::PackingError;
use entround::harness::verify_solution;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_examples() {
    let reject_both = PackingInstance::bpr(vec![0.6, 0.6], vec![0.4, 0.4]).unwrap();
    assert!((common::brute_force_int(&reject_both) - 0.8).abs() < 1e-12);
    let halves = PackingInstance::bin_packing(vec![0.5, 0.5]).unwrap();
    assert!((common::brute_force_int(&halves) - 1.0).abs() < 1e-12);
    assert!((common::exact_lp(&halves) - 1.0).abs() < 1e-9);
}

#[test]
fn small_bpr_and_train_cases() {
    let cfg = PackingConfig::default();
    let one = PackingInstance::bpr(vec![0.5], vec![0.2]).unwrap();
    let s = solve_bpr(&one, 1, &cfg).unwrap();
    assert_eq!(s.rejected, vec![0]);
    assert!((s.total_cost - 0.2).abs() < 1e-12);

    let two = PackingInstance::bpr(vec![0.6, 0.6], vec![1.0, 1.0]).unwrap();
    assert!((solve_bpr(&two, 1, &cfg).unwrap().total_cost - 2.0).abs() < 1e-12);

    let tour = PackingInstance::train(vec![0.4, 0.4], vec![1.0, 1.0]).unwrap();
    assert!((solve_train(&tour, 1, &cfg).unwrap().total_cost - 1.0).abs() < 1e-12);
}

#[test]
fn grade_clamp() {
    let eps: f64 = 0.1;
    let k = grade_index(0.01, eps);
    assert!((1.0 + eps).powi(-(k as i32)) >= eps);
    assert!((1.1f64.powi(-(grade_index(0.5, eps) as i32)) - 0.5132).abs() < 1e-4);
}

#[test]
fn slot_failure_reports_prefix() {
    let err = assign_items_to_slots(&[Pattern::bin(vec![0])], &[0, 1]).unwrap_err();
    assert_eq!(err, PackingError::Deficit { prefix: 2 });
}

fn check_end_to_end(inst: &PackingInstance, seed: u64) -> Result<(), TestCaseError> {
    let cfg = PackingConfig::default();
    let sol = match inst.kind() {
        ProblemKind::Bp => solve_bin_packing(inst, seed, &cfg),
        ProblemKind::Bpr => solve_bpr(inst, seed, &cfg),
        ProblemKind::Train => solve_train(inst, seed, &cfg),
    }
    .unwrap();
    let v = verify_solution(inst, &sol);
    prop_assert!(v.feasible, "{:?}", v.problems);
    let opt = common::brute_force_int(inst);
    prop_assert!(sol.total_cost >= opt - 1e-9);
    prop_assert!(sol.all_bins().all(|b| !b.is_empty()));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bpr_feasible_and_above_opt(seed in any::<u64>(), n in 1usize..=10) {
        check_end_to_end(&common::gen::bpr(seed, n), seed)?;
    }

    #[test]
    fn train_feasible_and_above_opt(seed in any::<u64>(), n in 1usize..=9) {
        check_end_to_end(&common::gen::train(seed, n), seed)?;
    }

    #[test]
    fn bin_packing_feasible_and_above_opt(seed in any::<u64>(), n in 1usize..=10) {
        check_end_to_end(&common::gen::bp(seed, n), seed)?;
    }

    #[test]
    fn repair_clears_deficits(seed in any::<u64>(), n in 1usize..=8, k in 0usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sizes: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..=1.0)).collect();
        sizes.sort_by(|a, b| b.total_cmp(a));
        let items: Vec<usize> = (0..n).collect();
        let g = ItemGroups::build(&sizes, &items, &vec![0; n], 1, 0.1);
        let selected: Vec<Pattern> = (0..k)
            .map(|_| Pattern::bin((0..n).filter(|_| rng.random_bool(0.3)).collect()))
            .collect();
        let out = repair_large(&selected, &g, &sizes, 1.0);
        for b in &out.bins {
            prop_assert!(b.iter().map(|&i| sizes[i]).sum::<f64>() <= 1.0 + 1e-12);
        }
        let mut all = selected.clone();
        all.extend(out.bins.iter().map(|b| Pattern::bin(b.clone())));
        prop_assert!(check_deficits(&all, &g.large[0]).iter().all(|&d| d == 0));
        prop_assert!(assign_items_to_slots(&all, &g.large[0]).is_ok());
    }

    #[test]
    fn small_items_discard_at_most_one_per_space(seed in any::<u64>(), n in 1usize..=12, k in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..0.1)).collect();
        let total: f64 = sizes.iter().sum();
        let mut spaces: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.01).collect();
        let scale = total / spaces.iter().sum::<f64>() * rng.random_range(1.0..1.5);
        spaces.iter_mut().for_each(|s| *s *= scale);
        let items: Vec<usize> = (0..n).collect();
        let out = assign_small_fractional(&spaces, &items, &sizes).unwrap();
        prop_assert!(out.discarded.len() <= k);
        for (space, placed) in spaces.iter().zip(&out.placed) {
            prop_assert!(placed.iter().map(|&i| sizes[i]).sum::<f64>() <= space + 1e-9);
        }
        let mut seen: Vec<usize> = out.placed.iter().flatten().chain(&out.discarded).copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, items);
    }
}

#[test]
fn size_budget_holds_on_corpus() {
    for (s, pats) in common::pattern_corpus(0x5EED, 30) {
        let items: Vec<usize> = (0..s.len()).collect();
        let (cm, d) = cumulated_matrix(&pats, &s, &items, config::C);
        let h = exact_joint_entropy(&cm.matrix, &d).unwrap();
        assert!(h <= size_budget(&pats, &s, &items) + 1e-12);
    }
}

//! Finds the smallest passing constants on a calibration corpus and prints
//! them with a 2x margin. The corpus seed differs from the test seeds.

#[path = "../tests/common/mod.rs"]
mod common;

use entround::binpack::{cumulated_matrix, size_budget, solve_bpr, solve_train, PackingConfig};
use entround::config::Calibration;
use entround::discrepancy::exact_joint_entropy;
use entround::matrix::{DenseMatrix, DiscrepancyBounds};
use entround::sdp::{bansal_walk, WalkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xCA11_B8A7;

fn percentile(mut v: Vec<f64>, q: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return 0.0;
    }
    v[((v.len() - 1) as f64 * q).round() as usize]
}

fn calibrate_c(corpus: &[(Vec<f64>, Vec<entround::covering::Pattern>)]) -> f64 {
    let grid: Vec<f64> = (1..=64).map(|k| k as f64 * 0.25).collect();
    let mut worst: f64 = 0.0;
    for (s, pats) in corpus {
        let items: Vec<usize> = (0..s.len()).collect();
        let budget = size_budget(pats, s, &items);
        let mut need = 0.0;
        for &c in grid.iter().rev() {
            let (cm, d) = cumulated_matrix(pats, s, &items, c);
            let h = exact_joint_entropy(&cm.matrix, &d).unwrap();
            if h > budget + 1e-12 {
                need = c + 0.25;
                break;
            }
        }
        worst = worst.max(need);
    }
    worst
}

fn calibrate_c_l(corpus: &[(Vec<f64>, Vec<entround::covering::Pattern>)]) -> f64 {
    let mut worst: f64 = 0.0;
    for (s, pats) in corpus {
        let items: Vec<usize> = (0..s.len()).collect();
        let (cm, _) = cumulated_matrix(pats, s, &items, 1.0);
        if cm.sigma * cm.beta == 0.0 {
            continue;
        }
        for delta in [1.0, 2.0, 4.0] {
            let d = DiscrepancyBounds::uniform(items.len(), delta).unwrap();
            let h = exact_joint_entropy(&cm.matrix, &d).unwrap();
            worst = worst.max(h * delta * delta / (cm.sigma * cm.beta));
        }
    }
    worst
}

/// Ratio of the walk's discrepancy to the goodness scale, per run.
fn calibrate_c_prime(runs: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5D9);
    let mut needs = Vec::new();
    for _ in 0..runs {
        let (n, m) = (rng.random_range(1..=3), 8);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect();
        let a = DenseMatrix::from_rows(&rows, m).unwrap();
        let delta =
            DiscrepancyBounds::new((0..n).map(|i| a.row_norm2(i).max(1e-3)).collect()).unwrap();
        let brow: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..=1.0)).collect();
        let b = DenseMatrix::from_rows(&[brow], m).unwrap();
        let mu = [0.5];
        let out = bansal_walk(&a, &b, &delta, &mu, &WalkConfig::default(), rng.random()).unwrap();
        let Some(chi) = out.coloring else { continue };
        let log = |v: usize| (v.max(2) as f64).log2();
        let scale = log(n + 1).sqrt() * log(m).sqrt();
        let mut need: f64 = 0.0;
        for i in 0..n {
            need = need.max(a.row_dot_signs(i, chi.values()).abs() / (scale * delta.as_slice()[i]));
        }
        let bscale = (2.0 / mu[0]).log2() / mu[0].sqrt();
        need = need.max(b.row_dot_signs(0, chi.values()).abs() / bscale);
        needs.push(need);
    }
    percentile(needs, 0.9)
}

fn calibrate_slack(cal: Calibration) -> (f64, f64) {
    let cfg = PackingConfig::with_calibration(cal);
    let mut bpr = Vec::new();
    for k in 0..60u64 {
        let n = 4 + (k % 9) as usize;
        let inst = common::gen::bpr(SEED + k, n);
        let sol = solve_bpr(&inst, SEED + k, &cfg).unwrap();
        let opt_f = common::exact_lp(&inst);
        bpr.push((sol.total_cost - opt_f) / (opt_f + 2.0).log2().powi(2));
    }
    let mut train = Vec::new();
    for k in 0..40u64 {
        let n = 3 + (k % 8) as usize;
        let inst = common::gen::train(SEED + 1000 + k, n);
        let sol = solve_train(&inst, SEED + k, &cfg).unwrap();
        let opt_f = common::exact_lp(&inst);
        train.push((sol.total_cost - opt_f) / (opt_f.powf(0.6) + 1.0));
    }
    (percentile(bpr, 0.95), percentile(train, 0.9))
}

fn main() {
    let corpus = common::pattern_corpus(SEED, 60);
    let c = calibrate_c(&corpus);
    println!("C: smallest passing {c:.2}");
    let c_l = calibrate_c_l(&corpus);
    println!("C_L: smallest passing {c_l:.4}");
    let c_prime = calibrate_c_prime(40);
    println!("C': 90th percentile {c_prime:.4}");
    let cal = Calibration {
        c: 2.0 * c,
        c_l: 2.0 * c_l,
        c_prime: 2.0 * c_prime,
        slack: 1.0,
    };
    let (sb, st) = calibrate_slack(cal);
    println!("slack: bpr 95th percentile {sb:.4}, train 90th percentile {st:.4}");
    println!(
        "frozen: C = {}, C_L = {}, C' = {}, slack = {}",
        cal.c,
        cal.c_l,
        cal.c_prime,
        2.0 * sb.max(st)
    );
}

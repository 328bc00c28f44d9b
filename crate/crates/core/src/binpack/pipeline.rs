use super::cumulated::cumulated_matrix;
use super::slots::{assign_items_to_slots, check_deficits, repair_large};
use super::small::{assign_small_fractional, first_fit};
use super::{
    ExtraBin, ExtraOrigin, ItemGroups, PackingInstance, PackingSolution, PackingStats, ProblemKind,
};
use crate::config::Calibration;
use crate::covering::{solve_pattern_lp, Pattern, PatternKind, SparseSolution};
use crate::error::{InputError, PackingError};
use crate::matrix::{DenseMatrix, DiscrepancyBounds};
use crate::oracles::CAPACITY_TOL;
use crate::rounding::{entropy_round, Backend, RoundingConfig, RoundingInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct PackingConfig {
    pub backend: Backend,
    pub rounding: RoundingConfig,
    pub calibration: Calibration,
    /// Additive accuracy of the configuration LP.
    pub lp_delta: f64,
    /// Multiplier of `log2(L + 2)` in the reported repair budget.
    pub log_budget: f64,
    /// Rounding attempts with fresh seeds before giving up.
    pub attempts: u32,
}

impl Default for PackingConfig {
    fn default() -> Self {
        Self::with_calibration(Calibration::default())
    }
}

impl PackingConfig {
    pub fn with_calibration(calibration: Calibration) -> Self {
        Self {
            backend: Backend::Exhaustive,
            rounding: RoundingConfig {
                c_prime: calibration.c_prime,
                ..RoundingConfig::default()
            },
            calibration,
            lp_delta: 1.0,
            log_budget: 1.0,
            attempts: 4,
        }
    }
}

/// Largest `k` with `(1 + eps)^-k >= p`.
fn raw_grade(p: f64, eps: f64) -> usize {
    let base = 1.0 + eps;
    let mut k = ((1.0 / p).ln() / base.ln() + 1e-9).floor().max(0.0) as i32;
    while k > 0 && base.powi(-k) < p * (1.0 - 1e-12) {
        k -= 1;
    }
    k as usize
}

/// Index of the well-rounded position of `p`: the grade just above `p`,
/// never below the smallest grade that is at least `eps`.
pub fn grade_index(p: f64, eps: f64) -> usize {
    raw_grade(p, eps).min(raw_grade(eps, eps))
}

/// Positions raised onto the `(1 + eps)^-k` grid, clamped at the grade above `eps`.
pub fn well_round(inst: &PackingInstance, eps: f64) -> Result<PackingInstance, InputError> {
    let Some(pos) = inst.positions() else {
        return Err(InputError::Range("well_round needs positions".into()));
    };
    if !(eps > 0.0 && eps < 1.0) {
        return Err(InputError::Range(format!("eps = {eps} outside (0, 1)")));
    }
    let rounded = pos
        .iter()
        .map(|&p| (1.0 + eps).powi(-(grade_index(p, eps) as i32)))
        .collect();
    PackingInstance::train(inst.sizes().to_vec(), rounded)
}

/// Position classes and their B-row weights.
struct Layout {
    class: Vec<usize>,
    grades: Vec<f64>,
    mu: Vec<f64>,
    /// Bins bought beyond `ceil|B_j x - B_j y|` for small items.
    extra_small: usize,
}

impl Layout {
    fn single(n: usize) -> Self {
        Self {
            class: vec![0; n],
            grades: vec![1.0],
            mu: vec![1.0],
            extra_small: 1,
        }
    }
}

fn require(inst: &PackingInstance, kind: ProblemKind) -> Result<(), PackingError> {
    if inst.kind() != kind {
        return Err(
            InputError::Range(format!("expected a {kind} instance, got {}", inst.kind())).into(),
        );
    }
    Ok(())
}

fn log_eps(opt_f: f64) -> f64 {
    (opt_f.ln() / opt_f).min(0.5)
}

/// Plain bin packing through the same pipeline as [`solve_bpr`].
pub fn solve_bin_packing(
    inst: &PackingInstance,
    seed: u64,
    cfg: &PackingConfig,
) -> Result<PackingSolution, PackingError> {
    require(inst, ProblemKind::Bp)?;
    let lp = solve_pattern_lp(&*inst.family(), cfg.lp_delta)?;
    let opt_f = lp.objective.max(2.0);
    let mut stats = PackingStats {
        lp_objective: lp.objective,
        opt_f,
        eps: log_eps(opt_f),
        lp_support: lp.solution.support(),
        ..PackingStats::default()
    };
    round_and_repair(
        inst,
        &lp.solution,
        Vec::new(),
        &Layout::single(inst.n()),
        seed,
        cfg,
        &mut stats,
    )
}

/// Bin packing with rejection: LP, pre-rejection, entropy rounding of the
/// cumulated pattern matrix plus one small-space row, then repair.
pub fn solve_bpr(
    inst: &PackingInstance,
    seed: u64,
    cfg: &PackingConfig,
) -> Result<PackingSolution, PackingError> {
    require(inst, ProblemKind::Bpr)?;
    let lp = solve_pattern_lp(&*inst.family(), cfg.lp_delta)?;
    let opt_f = lp.objective.max(2.0);
    let eps = log_eps(opt_f);
    let pre: Vec<usize> = lp
        .solution
        .entries()
        .iter()
        .filter(|(p, w)| p.kind == PatternKind::Reject && *w > 1.0 - eps)
        .map(|(p, _)| p.items[0])
        .collect();
    let mut stats = PackingStats {
        lp_objective: lp.objective,
        opt_f,
        eps,
        lp_support: lp.solution.support(),
        pre_rejected: pre.len(),
        ..PackingStats::default()
    };
    round_and_repair(
        inst,
        &lp.solution,
        pre,
        &Layout::single(inst.n()),
        seed,
        cfg,
        &mut stats,
    )
}

/// Train delivery. The LP is solved on the given positions; the well-rounded
/// grades define the position classes and their weights.
pub fn solve_train(
    inst: &PackingInstance,
    seed: u64,
    cfg: &PackingConfig,
) -> Result<PackingSolution, PackingError> {
    require(inst, ProblemKind::Train)?;
    let lp = solve_pattern_lp(&*inst.family(), cfg.lp_delta)?;
    let opt_f = lp.objective.max(2.0);
    let eps = opt_f.powf(-0.4).min(0.5);
    let pos = inst.positions().expect("train instance");
    let class: Vec<usize> = pos.iter().map(|&p| grade_index(p, eps)).collect();
    let t = class.iter().copied().max().unwrap_or(0) + 1;
    let layout = Layout {
        grades: (0..t).map(|j| (1.0 + eps).powi(-(j as i32))).collect(),
        mu: (0..t)
            .map(|j| eps / 5.0 * (1.0 + eps / 4.0).powi(-(j as i32)))
            .collect(),
        class,
        extra_small: 0,
    };
    let mut stats = PackingStats {
        lp_objective: lp.objective,
        opt_f,
        eps,
        lp_support: lp.solution.support(),
        ..PackingStats::default()
    };
    round_and_repair(
        inst,
        &lp.solution,
        Vec::new(),
        &layout,
        seed,
        cfg,
        &mut stats,
    )
}

struct WorkBin {
    items: Vec<usize>,
    load: f64,
    grade: f64,
    origin: Option<ExtraOrigin>,
}

fn seed_for(seed: u64, attempt: u32) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn round_and_repair(
    inst: &PackingInstance,
    x: &SparseSolution,
    pre_rejected: Vec<usize>,
    layout: &Layout,
    seed: u64,
    cfg: &PackingConfig,
    stats: &mut PackingStats,
) -> Result<PackingSolution, PackingError> {
    let n = inst.n();
    let sizes = inst.sizes();
    let eps = stats.eps;
    let n_classes = layout.grades.len();
    let mut is_out = vec![false; n];
    for &i in &pre_rejected {
        is_out[i] = true;
    }
    let mut rejected = pre_rejected;
    let active: Vec<usize> = (0..n).filter(|&i| !is_out[i]).collect();

    // drop pre-rejected items from every pattern
    let cols = SparseSolution::from_entries(x.entries().iter().filter_map(|(p, w)| {
        let items: Vec<usize> = p.items.iter().copied().filter(|&i| !is_out[i]).collect();
        if items.is_empty() {
            return None;
        }
        match p.kind {
            PatternKind::Reject => {
                Some((Pattern::new(items, p.cost, PatternKind::Reject), w.min(1.0)))
            }
            PatternKind::Bin => {
                let cost = inst.bin_cost(&items);
                Some((Pattern::new(items, cost, PatternKind::Bin), *w))
            }
        }
    }));
    let cols = cols.entries();
    let groups = ItemGroups::build(sizes, &active, &layout.class, n_classes, eps);
    stats.large = groups.n_large();
    stats.small = active.len() - stats.large;
    stats.classes = n_classes;

    let base: Vec<usize> = cols.iter().map(|(_, w)| w.floor() as usize).collect();
    let frac: Vec<f64> = cols
        .iter()
        .map(|(_, w)| (w - w.floor()).clamp(0.0, 1.0))
        .collect();
    let fcols: Vec<usize> = (0..cols.len()).filter(|&k| frac[k] > 1e-12).collect();
    let fpats: Vec<Pattern> = fcols.iter().map(|&k| cols[k].0.clone()).collect();
    stats.fractional_columns = fcols.len();

    let mut a_rows: Vec<Vec<f64>> = Vec::new();
    let mut delta: Vec<f64> = Vec::new();
    for items in &groups.large {
        let (cm, d) = cumulated_matrix(&fpats, sizes, items, cfg.calibration.c);
        a_rows.extend(cm.matrix.to_rows());
        delta.extend_from_slice(d.as_slice());
    }
    // B rows, one per class holding small items
    let b_classes: Vec<usize> = (0..n_classes)
        .filter(|&c| !groups.small[c].is_empty())
        .collect();
    let b_row = |c: usize, p: &Pattern| -> f64 {
        let v: f64 = p
            .items
            .iter()
            .filter(|i| groups.small[c].contains(i))
            .map(|&i| sizes[i])
            .sum();
        v.min(1.0)
    };
    let b_rows: Vec<Vec<f64>> = b_classes
        .iter()
        .map(|&c| fpats.iter().map(|p| b_row(c, p)).collect())
        .collect();

    let m = fpats.len();
    let mut y = vec![0u8; m];
    if m > 0 {
        let ri = RoundingInstance::new(
            DenseMatrix::from_rows(&a_rows, m)?,
            DenseMatrix::from_rows(&b_rows, m)?,
            DiscrepancyBounds::new(delta)?,
            b_classes.iter().map(|&c| layout.mu[c]).collect(),
            fpats.iter().map(|p| p.cost).collect(),
            fcols.iter().map(|&k| frac[k]).collect(),
        )?;
        let mut last = None;
        for attempt in 0..cfg.attempts.max(1) {
            stats.rounding_attempts = attempt + 1;
            match entropy_round(&ri, cfg.backend, &cfg.rounding, seed_for(seed, attempt)) {
                Ok(rep) => {
                    y = rep.y;
                    last = None;
                    break;
                }
                Err(e) => last = Some(e),
            }
        }
        if let Some(e) = last {
            return Err(e.into());
        }
    }
    stats.b_gap = vec![0.0; n_classes];
    for (r, &c) in b_classes.iter().enumerate() {
        let gap: f64 = (0..m)
            .map(|k| (frac[fcols[k]] - y[k] as f64) * b_rows[r][k])
            .sum();
        stats.b_gap[c] = gap.abs();
    }

    let mut selected: Vec<Pattern> = Vec::new();
    for (k, (p, _)) in cols.iter().enumerate() {
        for _ in 0..base[k] {
            selected.push(p.clone());
        }
    }
    for (k, &bit) in y.iter().enumerate() {
        if bit == 1 {
            selected.push(fpats[k].clone());
        }
    }
    // one rejection per item is enough
    let mut seen = vec![false; n];
    selected.retain(|p| {
        if p.kind != PatternKind::Reject {
            return true;
        }
        let i = p.items[0];
        !std::mem::replace(&mut seen[i], true)
    });
    let small_rejected: Vec<usize> = selected
        .iter()
        .filter(|p| p.kind == PatternKind::Reject && sizes[p.items[0]] < eps)
        .map(|p| p.items[0])
        .collect();
    for &i in &small_rejected {
        is_out[i] = true;
    }
    rejected.extend_from_slice(&small_rejected);

    let repair = repair_large(&selected, &groups, sizes, cfg.log_budget);
    stats.repair_rounds = repair.rounds.iter().sum();
    stats.repair_budget_rounds = repair.budget_rounds;
    let n_rounded = selected.len();
    selected.extend(
        repair
            .bins
            .iter()
            .map(|b| Pattern::new(b.clone(), inst.bin_cost(b), PatternKind::Bin)),
    );
    for (c, domain) in groups.large.iter().enumerate() {
        if let Some(k) = check_deficits(&selected, domain)
            .iter()
            .position(|&d| d > 0)
        {
            debug_assert!(false, "repair left a deficit in class {c}");
            return Err(PackingError::Deficit { prefix: k + 1 });
        }
    }

    let grade_of = |items: &[usize]| {
        items
            .iter()
            .map(|&i| layout.grades[layout.class[i]])
            .fold(0.0, f64::max)
    };
    let mut bins: Vec<Option<WorkBin>> = selected
        .iter()
        .enumerate()
        .map(|(k, p)| {
            (p.kind == PatternKind::Bin).then(|| WorkBin {
                items: Vec::new(),
                load: 0.0,
                grade: grade_of(&p.items),
                origin: (k >= n_rounded).then_some(ExtraOrigin::Repair),
            })
        })
        .collect();
    for domain in &groups.large {
        let slots = assign_items_to_slots(&selected, domain)?;
        for (&item, &(p, _)) in domain.iter().zip(&slots.placement) {
            match &mut bins[p] {
                Some(b) => {
                    b.items.push(item);
                    b.load += sizes[item];
                }
                None => rejected.push(item),
            }
        }
    }
    let mut bins: Vec<WorkBin> = bins.into_iter().flatten().collect();

    for c in 0..n_classes {
        let items: Vec<usize> = groups.small[c]
            .iter()
            .copied()
            .filter(|&i| !is_out[i])
            .collect();
        if items.is_empty() {
            continue;
        }
        let grade = layout.grades[c];
        let eligible = |bins: &[WorkBin]| -> Vec<usize> {
            (0..bins.len())
                .filter(|&b| bins[b].grade >= grade * (1.0 - 1e-12))
                .collect()
        };
        let required: f64 = items.iter().map(|&i| sizes[i]).sum();
        let mut available: f64 = eligible(&bins).iter().map(|&b| 1.0 - bins[b].load).sum();
        let mut buy = stats.b_gap[c].ceil() as usize + layout.extra_small;
        loop {
            for _ in 0..buy {
                bins.push(WorkBin {
                    items: Vec::new(),
                    load: 0.0,
                    grade,
                    origin: Some(ExtraOrigin::SmallSpace),
                });
                available += 1.0;
                stats.small_space_bins += 1;
            }
            if available + CAPACITY_TOL >= required {
                break;
            }
            buy = (required - available).ceil().max(1.0) as usize;
        }
        let el = eligible(&bins);
        let spaces: Vec<f64> = el.iter().map(|&b| (1.0 - bins[b].load).max(0.0)).collect();
        let sa = assign_small_fractional(&spaces, &items, sizes)?;
        for (slot, placed) in sa.placed.iter().enumerate() {
            let b = &mut bins[el[slot]];
            for &i in placed {
                b.items.push(i);
                b.load += sizes[i];
            }
        }
        stats.discarded += sa.discarded.len();
        let mut loads: Vec<f64> = el.iter().map(|&b| bins[b].load).collect();
        let at = first_fit(&sa.discarded, sizes, &mut loads);
        let fresh = loads.len() - el.len();
        let first_new = bins.len();
        for _ in 0..fresh {
            bins.push(WorkBin {
                items: Vec::new(),
                load: 0.0,
                grade,
                origin: Some(ExtraOrigin::Discard),
            });
        }
        for (&i, &slot) in sa.discarded.iter().zip(&at) {
            let b = if slot < el.len() {
                el[slot]
            } else {
                first_new + slot - el.len()
            };
            bins[b].items.push(i);
            bins[b].load += sizes[i];
        }
    }

    let mut out_bins = Vec::new();
    let mut extra = Vec::new();
    for mut b in bins.into_iter().filter(|b| !b.items.is_empty()) {
        b.items.sort_unstable();
        match b.origin {
            None => out_bins.push(b.items),
            Some(origin) => extra.push(ExtraBin {
                items: b.items,
                origin,
            }),
        }
    }
    rejected.sort_unstable();
    let mut total = out_bins.iter().map(|b| inst.bin_cost(b)).sum::<f64>()
        + extra.iter().map(|b| inst.bin_cost(&b.items)).sum::<f64>();
    if let Some(pi) = inst.rejection_costs() {
        total += rejected.iter().map(|&i| pi[i]).sum::<f64>();
    }
    Ok(PackingSolution {
        bins: out_bins,
        rejected,
        extra_bins: extra,
        total_cost: total,
        stats: stats.clone(),
    })
}

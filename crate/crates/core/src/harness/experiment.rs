use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_instance, SizeDistribution};
use super::io::{load_instance, LoadedInstance};
use super::verify::{verify_cover, verify_solution};
use super::HarnessError;
use crate::binpack::{
    solve_bin_packing, solve_bpr, solve_train, PackingConfig, PackingInstance, ProblemKind,
};
use crate::config::Calibration;
use crate::covering::solve_pattern_lp;
use crate::discrepancy::{find_half_coloring, HalfColoringMode};
use crate::rounding::{
    entropy_round, tail_report, Backend, RoundingConfig, RoundingInstance, TailReport,
};
use crate::sdp::{bansal_walk, freeze_is_monotone, phase_ledger_check, PhaseReport, WalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveLp,
    Round,
    Color,
    Bpr,
    Train,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: ProblemKind,
    pub n: usize,
    pub distribution: SizeDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub instance: Option<PathBuf>,
    pub seed: u64,
    pub runs: usize,
    pub backend: Backend,
    pub calibration: Calibration,
    pub lambda_grid: Vec<f64>,
    pub output: Option<PathBuf>,
    /// Instances for `bench`, one per run.
    pub generator: Option<GeneratorSpec>,
    pub lp_delta: f64,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            instance: None,
            seed: 0,
            runs: 1,
            backend: Backend::Exhaustive,
            calibration: Calibration::default(),
            lambda_grid: vec![1.0, 2.0],
            output: None,
            generator: None,
            lp_delta: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RunPayload {
    Lp {
        objective: f64,
        support: usize,
        min_coverage: f64,
        feasible: bool,
    },
    Rounding {
        y: Vec<u8>,
        a_discrepancy: Vec<f64>,
        b_discrepancy: Vec<f64>,
        objective_gap: f64,
        within_bound: bool,
    },
    Coloring {
        support: usize,
        /// `max_i |A_i chi| / Delta_i`.
        max_ratio: f64,
        valid: bool,
        monotone: bool,
    },
    Packing {
        cost: f64,
        lp_objective: f64,
        bins: usize,
        extra_bins: usize,
        rejected: usize,
        feasible: bool,
        /// Allowed additive gap over the LP value.
        gap_bound: f64,
        within_gap: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload: Option<RunPayload>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub metric: String,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub seed: u64,
    pub runs: usize,
    pub backend: Backend,
    pub calibration: Calibration,
    pub records: Vec<RunRecord>,
    pub aggregates: Aggregates,
    pub verdicts: Vec<VerdictLine>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Seed of run `k`: first output of the master generator on stream `k`.
pub fn run_seed(master: u64, run: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run as u64);
    rng.next_u64()
}

/// `slack (log2(OPT_f + 2))^2` for BPR, `slack (OPT_f^(3/5) + 1)` for train.
pub fn gap_bound(kind: ProblemKind, opt_f: f64, slack: f64) -> f64 {
    match kind {
        ProblemKind::Train => slack * (opt_f.max(0.0).powf(0.6) + 1.0),
        _ => slack * (opt_f + 2.0).log2().powi(2),
    }
}

/// Loads the configured instance (unless `bench`) and runs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let inst = match (&cfg.instance, cfg.command) {
        (_, Command::Bench) => None,
        (Some(path), _) => Some(load_instance(path)?),
        (None, _) => return Err(HarnessError::Usage("an instance path is required".into())),
    };
    let report = run_experiment_on(cfg, inst.as_ref())?;
    if let Some(out) = &cfg.output {
        std::fs::write(out, report.to_json()).map_err(|e| HarnessError::Io {
            path: out.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(report)
}

fn packing_of(inst: Option<&LoadedInstance>) -> Result<&PackingInstance, HarnessError> {
    match inst {
        Some(LoadedInstance::Packing { instance, .. }) => Ok(instance),
        _ => Err(HarnessError::Usage(
            "this command needs a packing instance".into(),
        )),
    }
}

fn rounding_of(inst: Option<&LoadedInstance>) -> Result<&RoundingInstance, HarnessError> {
    match inst {
        Some(LoadedInstance::Rounding(r)) => Ok(r),
        _ => Err(HarnessError::Usage(
            "this command needs a rounding instance".into(),
        )),
    }
}

fn record(run: usize, seed: u64, res: Result<RunPayload, String>) -> RunRecord {
    match res {
        Ok(p) => RunRecord {
            run,
            seed,
            ok: true,
            error: None,
            payload: Some(p),
        },
        Err(e) => RunRecord {
            run,
            seed,
            ok: false,
            error: Some(e),
            payload: None,
        },
    }
}

fn solve_packing(
    inst: &PackingInstance,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<RunPayload, String> {
    let pc = PackingConfig {
        backend: cfg.backend,
        ..PackingConfig::with_calibration(cfg.calibration)
    };
    let sol = match inst.kind() {
        ProblemKind::Bp => solve_bin_packing(inst, seed, &pc),
        ProblemKind::Bpr => solve_bpr(inst, seed, &pc),
        ProblemKind::Train => solve_train(inst, seed, &pc),
    }
    .map_err(|e| e.to_string())?;
    let v = verify_solution(inst, &sol);
    let lp = sol.stats.lp_objective;
    let bound = gap_bound(inst.kind(), lp, cfg.calibration.slack);
    Ok(RunPayload::Packing {
        cost: v.recomputed_cost,
        lp_objective: lp,
        bins: sol.bins.len(),
        extra_bins: sol.extra_bins.len(),
        rejected: sol.rejected.len(),
        feasible: v.feasible,
        gap_bound: bound,
        within_gap: v.recomputed_cost <= lp + bound + 1e-9,
    })
}

/// Runs `cfg.runs` seeded runs; parallel and serial execution give the same report.
pub fn run_experiment_on(
    cfg: &ExperimentConfig,
    inst: Option<&LoadedInstance>,
) -> Result<Report, HarnessError> {
    if cfg.runs == 0 {
        return Err(HarnessError::Usage("run count must be at least 1".into()));
    }
    let seeds: Vec<(usize, u64)> = (0..cfg.runs).map(|k| (k, run_seed(cfg.seed, k))).collect();
    let mut phase = None;
    let mut tail = None;
    let records: Vec<RunRecord> = match cfg.command {
        Command::SolveLp => {
            let p = packing_of(inst)?;
            seeds
                .par_iter()
                .map(|&(k, s)| {
                    let res = solve_pattern_lp(&*p.family(), cfg.lp_delta)
                        .map_err(|e| e.to_string())
                        .map(|lp| {
                            let v = verify_cover(p, &lp.solution);
                            RunPayload::Lp {
                                objective: lp.objective,
                                support: lp.solution.support(),
                                min_coverage: lp
                                    .solution
                                    .coverage(p.n())
                                    .into_iter()
                                    .fold(f64::INFINITY, f64::min),
                                feasible: v.feasible && lp.solution.support() <= p.n(),
                            }
                        });
                    record(k, s, res)
                })
                .collect()
        }
        Command::Round => {
            let r = rounding_of(inst)?;
            let rc = RoundingConfig {
                c_prime: cfg.calibration.c_prime,
                ..RoundingConfig::default()
            };
            let reports: Vec<_> = seeds
                .par_iter()
                .map(|&(_, s)| entropy_round(r, cfg.backend, &rc, s))
                .collect();
            let ok: Vec<_> = reports
                .iter()
                .filter_map(|r| r.as_ref().ok())
                .cloned()
                .collect();
            tail = Some(tail_report(&ok, &cfg.lambda_grid, cfg.calibration.slack));
            seeds
                .iter()
                .zip(reports)
                .map(|(&(k, s), rep)| {
                    record(
                        k,
                        s,
                        rep.map_err(|e| e.to_string())
                            .map(|rep| RunPayload::Rounding {
                                within_bound: rep.within_deterministic_bound(),
                                y: rep.y,
                                a_discrepancy: rep.a_discrepancy,
                                b_discrepancy: rep.b_discrepancy,
                                objective_gap: rep.objective_gap,
                            }),
                    )
                })
                .collect()
        }
        Command::Color => {
            let r = rounding_of(inst)?;
            let ratio = |chi: &[i8]| {
                (0..r.a.n_rows())
                    .map(|i| r.a.row_dot_signs(i, chi).abs() / r.delta.as_slice()[i])
                    .fold(0.0, f64::max)
            };
            match cfg.backend {
                Backend::Exhaustive => seeds
                    .par_iter()
                    .map(|&(k, s)| {
                        let res = find_half_coloring(&r.a, &r.delta, HalfColoringMode::Pigeonhole)
                            .map_err(|e| e.to_string())
                            .map(|chi| RunPayload::Coloring {
                                support: chi.support(),
                                max_ratio: ratio(chi.values()),
                                valid: chi.is_half() && ratio(chi.values()) <= 1.0 + 1e-9,
                                monotone: true,
                            });
                        record(k, s, res)
                    })
                    .collect(),
                Backend::Sdp => {
                    let wc = WalkConfig {
                        record_trace: true,
                        ..WalkConfig::default()
                    };
                    let outs: Vec<_> = seeds
                        .par_iter()
                        .map(|&(_, s)| bansal_walk(&r.a, &r.b, &r.delta, &r.mu, &wc, s))
                        .collect();
                    let ledgers: Vec<_> = outs
                        .iter()
                        .filter_map(|o| o.as_ref().ok())
                        .map(|o| o.ledger.clone())
                        .collect();
                    phase = Some(phase_ledger_check(
                        &ledgers,
                        &cfg.lambda_grid,
                        cfg.calibration.slack,
                    ));
                    seeds
                        .iter()
                        .zip(outs)
                        .map(|(&(k, s), o)| {
                            let res =
                                o.map_err(|e| e.to_string())
                                    .and_then(|o| match &o.coloring {
                                        Some(chi) => Ok(RunPayload::Coloring {
                                            support: chi.support(),
                                            max_ratio: ratio(chi.values()),
                                            valid: chi.is_full(),
                                            monotone: o
                                                .trace
                                                .as_deref()
                                                .is_none_or(freeze_is_monotone),
                                        }),
                                        None => Err(format!("walk failed: {:?}", o.failure)),
                                    });
                            record(k, s, res)
                        })
                        .collect()
                }
            }
        }
        Command::Bpr | Command::Train => {
            let p = packing_of(inst)?;
            let want = if cfg.command == Command::Bpr {
                ProblemKind::Bpr
            } else {
                ProblemKind::Train
            };
            if p.kind() != want {
                return Err(HarnessError::Usage(format!(
                    "expected a {want} instance, got {}",
                    p.kind()
                )));
            }
            seeds
                .par_iter()
                .map(|&(k, s)| record(k, s, solve_packing(p, s, cfg)))
                .collect()
        }
        Command::Bench => {
            let g = cfg
                .generator
                .ok_or_else(|| HarnessError::Usage("bench needs a generator spec".into()))?;
            seeds
                .par_iter()
                .map(|&(k, s)| {
                    let res = generate_instance(g.kind, g.n, s, g.distribution)
                        .map_err(|e| e.to_string())
                        .and_then(|inst| solve_packing(&inst, s, cfg));
                    record(k, s, res)
                })
                .collect()
        }
    };

    let (metric, values): (&str, Vec<f64>) = match cfg.command {
        Command::SolveLp => (
            "objective",
            metric_of(&records, |p| match p {
                RunPayload::Lp { objective, .. } => Some(*objective),
                _ => None,
            }),
        ),
        Command::Round => (
            "max_a_discrepancy",
            metric_of(&records, |p| match p {
                RunPayload::Rounding { a_discrepancy, .. } => {
                    Some(a_discrepancy.iter().copied().fold(0.0, f64::max))
                }
                _ => None,
            }),
        ),
        Command::Color => (
            "max_ratio",
            metric_of(&records, |p| match p {
                RunPayload::Coloring { max_ratio, .. } => Some(*max_ratio),
                _ => None,
            }),
        ),
        _ => (
            "cost_minus_lp",
            metric_of(&records, |p| match p {
                RunPayload::Packing {
                    cost, lp_objective, ..
                } => Some(cost - lp_objective),
                _ => None,
            }),
        ),
    };
    let count = values.len();
    let mean = if count == 0 {
        0.0
    } else {
        values.iter().sum::<f64>() / count as f64
    };
    let aggregates = Aggregates {
        metric: metric.into(),
        count,
        mean,
        min: if count == 0 {
            0.0
        } else {
            values.iter().copied().fold(f64::INFINITY, f64::min)
        },
        max: if count == 0 {
            0.0
        } else {
            values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        },
        tail,
        phase,
    };
    let verdicts = verdicts(cfg, &records, &aggregates);
    Ok(Report {
        command: cfg.command,
        seed: cfg.seed,
        runs: cfg.runs,
        backend: cfg.backend,
        calibration: cfg.calibration,
        records,
        aggregates,
        verdicts,
    })
}

fn metric_of(records: &[RunRecord], f: impl Fn(&RunPayload) -> Option<f64>) -> Vec<f64> {
    records
        .iter()
        .filter_map(|r| r.payload.as_ref())
        .filter_map(f)
        .collect()
}

fn count_where(records: &[RunRecord], f: impl Fn(&RunPayload) -> bool) -> usize {
    records
        .iter()
        .filter_map(|r| r.payload.as_ref())
        .filter(|p| f(p))
        .count()
}

fn line(name: &str, pass: bool, detail: String) -> VerdictLine {
    VerdictLine {
        name: name.into(),
        pass,
        detail,
    }
}

fn verdicts(cfg: &ExperimentConfig, records: &[RunRecord], agg: &Aggregates) -> Vec<VerdictLine> {
    let total = records.len();
    let ok = records.iter().filter(|r| r.ok).count();
    let mut out = vec![line("runs_completed", ok == total, format!("{ok}/{total}"))];
    match cfg.command {
        Command::SolveLp => {
            let f = count_where(records, |p| {
                matches!(p, RunPayload::Lp { feasible: true, .. })
            });
            out.push(line("cover_feasible", f == total, format!("{f}/{total}")));
        }
        Command::Round => {
            if cfg.backend == Backend::Exhaustive {
                let w = count_where(records, |p| {
                    matches!(
                        p,
                        RunPayload::Rounding {
                            within_bound: true,
                            ..
                        }
                    )
                });
                out.push(line(
                    "deterministic_bound",
                    w == total,
                    format!("{w}/{total}"),
                ));
            }
            if let Some(t) = &agg.tail {
                let worst = t
                    .lines
                    .iter()
                    .map(|l| l.frequency / l.limit)
                    .fold(0.0, f64::max);
                out.push(line(
                    "tail_bound",
                    t.pass(),
                    format!("worst frequency/limit {worst:.4}"),
                ));
            }
        }
        Command::Color => {
            let v = count_where(records, |p| {
                matches!(p, RunPayload::Coloring { valid: true, .. })
            });
            out.push(line("coloring_valid", v == ok, format!("{v}/{ok}")));
            let m = count_where(records, |p| {
                matches!(p, RunPayload::Coloring { monotone: true, .. })
            });
            out.push(line("freezing_monotone", m == ok, format!("{m}/{ok}")));
            if let Some(ph) = &agg.phase {
                out.push(line(
                    "phase_bound",
                    ph.pass(),
                    format!("{} lambda values", ph.lines.len()),
                ));
            }
        }
        _ => {
            let f = count_where(records, |p| {
                matches!(p, RunPayload::Packing { feasible: true, .. })
            });
            out.push(line("feasible", f == ok, format!("{f}/{ok}")));
            let g = count_where(records, |p| {
                matches!(
                    p,
                    RunPayload::Packing {
                        within_gap: true,
                        ..
                    }
                )
            });
            out.push(line("gap_within_slack", g == ok, format!("{g}/{ok}")));
        }
    }
    out
}

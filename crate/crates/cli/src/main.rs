use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entround::binpack::{
    solve_bin_packing, solve_bpr, solve_train, PackingConfig, PackingSolution, ProblemKind,
};
use entround::config::{self, Calibration};
use entround::harness::{
    generate_instance, load_instance, run_experiment, run_seed, verify_solution, write_instance,
    Command, ExperimentConfig, GeneratorSpec, HarnessError, LoadedInstance, SizeDistribution,
};
use entround::rounding::Backend;

#[derive(Parser)]
#[command(name = "entround", version, about = "Entropy rounding experiments")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Solve the pattern LP of a packing instance.
    SolveLp(RunArgs),
    /// Round a rounding instance to an integral vector.
    Round(RunArgs),
    /// Compute half or full colorings of a rounding instance.
    Color(RunArgs),
    /// Bin packing with rejection.
    Bpr(SolveArgs),
    /// Train delivery.
    Train(SolveArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Check a solution file against an instance.
    Verify(VerifyArgs),
    /// Solve freshly generated instances, one per run.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exhaustive,
    Sdp,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exhaustive => Backend::Exhaustive,
            BackendArg::Sdp => Backend::Sdp,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Exhaustive)]
    backend: BackendArg,
    #[arg(long = "c", env = "ENTROUND_C", default_value_t = config::C)]
    c: f64,
    #[arg(long = "c-l", env = "ENTROUND_CL", default_value_t = config::C_L)]
    c_l: f64,
    #[arg(long = "c-prime", env = "ENTROUND_CPRIME", default_value_t = config::C_PRIME)]
    c_prime: f64,
    #[arg(long, env = "ENTROUND_SLACK", default_value_t = config::SLACK)]
    slack: f64,
    /// Comma separated tail thresholds.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    lp_delta: f64,
    /// Report path; the report always goes to stdout as well.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    instance: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Also write the solution of run 0, in input item order.
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    kind: ProblemKind,
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "uniform")]
    distribution: SizeDistribution,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    kind: ProblemKind,
    n: usize,
    #[arg(long, default_value = "uniform")]
    distribution: SizeDistribution,
    #[command(flatten)]
    common: Common,
}

impl Common {
    fn config(&self, command: Command, instance: Option<PathBuf>) -> ExperimentConfig {
        ExperimentConfig {
            instance,
            seed: self.seed,
            runs: self.runs,
            backend: self.backend.into(),
            calibration: Calibration {
                c: self.c,
                c_l: self.c_l,
                c_prime: self.c_prime,
                slack: self.slack,
            },
            lambda_grid: self.lambda.clone(),
            output: self.output.clone(),
            lp_delta: self.lp_delta,
            ..ExperimentConfig::new(command)
        }
    }
}

fn io_error(path: &std::path::Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn experiment(cfg: ExperimentConfig) -> Result<ExitCode, HarnessError> {
    let report = run_experiment(&cfg)?;
    print!("{}", report.to_json());
    for v in &report.verdicts {
        eprintln!(
            "{} {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        );
    }
    Ok(if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Solution of run 0 with item indices mapped back to the input order.
fn write_solution(args: &SolveArgs, path: &std::path::Path) -> Result<(), HarnessError> {
    let LoadedInstance::Packing {
        instance,
        permutation,
        ..
    } = load_instance(&args.instance)?
    else {
        return Err(HarnessError::Usage("expected a packing instance".into()));
    };
    let cfg = args.common.config(Command::Bpr, None);
    let pc = PackingConfig {
        backend: cfg.backend,
        ..PackingConfig::with_calibration(cfg.calibration)
    };
    let seed = run_seed(cfg.seed, 0);
    let mut sol = match instance.kind() {
        ProblemKind::Bp => solve_bin_packing(&instance, seed, &pc),
        ProblemKind::Bpr => solve_bpr(&instance, seed, &pc),
        ProblemKind::Train => solve_train(&instance, seed, &pc),
    }
    .map_err(|e| HarnessError::Validation(e.to_string()))?;
    let remap = |v: &mut Vec<usize>| v.iter_mut().for_each(|i| *i = permutation[*i]);
    sol.bins.iter_mut().for_each(remap);
    sol.extra_bins.iter_mut().for_each(|b| remap(&mut b.items));
    remap(&mut sol.rejected);
    let text = serde_json::to_string_pretty(&sol).map_err(|e| io_error(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, HarnessError> {
    let LoadedInstance::Packing {
        instance,
        permutation,
        ..
    } = load_instance(&args.instance)?
    else {
        return Err(HarnessError::Usage("expected a packing instance".into()));
    };
    let text = std::fs::read_to_string(&args.solution).map_err(|e| io_error(&args.solution, e))?;
    let mut sol: PackingSolution =
        serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    // solution files use input order; the checker works on the sorted instance
    let mut inverse = vec![usize::MAX; permutation.len()];
    for (k, &i) in permutation.iter().enumerate() {
        inverse[i] = k;
    }
    let remap = |v: &mut Vec<usize>| {
        v.iter_mut()
            .for_each(|i| *i = inverse.get(*i).copied().unwrap_or(usize::MAX))
    };
    sol.bins.iter_mut().for_each(remap);
    sol.extra_bins.iter_mut().for_each(|b| remap(&mut b.items));
    remap(&mut sol.rejected);
    let verdict = verify_solution(&instance, &sol);
    println!(
        "{}",
        serde_json::to_string_pretty(&verdict).expect("verdict serializes")
    );
    Ok(if verdict.feasible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.verb {
        Verb::SolveLp(a) => experiment(a.common.config(Command::SolveLp, Some(a.instance))),
        Verb::Round(a) => experiment(a.common.config(Command::Round, Some(a.instance))),
        Verb::Color(a) => experiment(a.common.config(Command::Color, Some(a.instance))),
        Verb::Bpr(a) | Verb::Train(a) if a.solution.is_some() => {
            write_solution(&a, a.solution.as_deref().expect("checked"))?;
            let cmd = match load_instance(&a.instance)? {
                LoadedInstance::Packing { instance, .. }
                    if instance.kind() == ProblemKind::Train =>
                {
                    Command::Train
                }
                _ => Command::Bpr,
            };
            experiment(a.common.config(cmd, Some(a.instance)))
        }
        Verb::Bpr(a) => experiment(a.common.config(Command::Bpr, Some(a.instance))),
        Verb::Train(a) => experiment(a.common.config(Command::Train, Some(a.instance))),
        Verb::Gen(a) => {
            let inst = generate_instance(a.kind, a.n, a.seed, a.distribution)?;
            let mut meta = serde_json::Map::new();
            meta.insert("seed".into(), a.seed.into());
            meta.insert(
                "distribution".into(),
                format!("{:?}", a.distribution).to_lowercase().into(),
            );
            write_instance(&a.output, &inst, meta)?;
            Ok(ExitCode::SUCCESS)
        }
        Verb::Verify(a) => verify(&a),
        Verb::Bench(a) => {
            let mut cfg = a.common.config(Command::Bench, None);
            cfg.generator = Some(GeneratorSpec {
                kind: a.kind,
                n: a.n,
                distribution: a.distribution,
            });
            experiment(cfg)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

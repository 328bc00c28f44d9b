use entround::binpack::{PackingInstance, ProblemKind};
use entround::harness::{
    generate_instance, load_instance, parse_instance, run_experiment, run_experiment_on,
    write_instance, Command, ExperimentConfig, GeneratorSpec, HarnessError, LoadedInstance,
    SizeDistribution,
};

fn packing(text: &str) -> PackingInstance {
    match parse_instance(text).unwrap() {
        LoadedInstance::Packing { instance, .. } => instance,
        LoadedInstance::Rounding(_) => panic!("expected a packing instance"),
    }
}

#[test]
fn minimal_bpr_file() {
    let inst = packing(r#"{"kind": "bpr", "sizes": ["0.5"], "rejection_costs": [0.25]}"#);
    assert_eq!(inst.n(), 1);
    assert_eq!(inst.kind(), ProblemKind::Bpr);
}

#[test]
fn unsorted_sizes_are_sorted_stably() {
    let LoadedInstance::Packing {
        instance,
        permutation,
        notices,
        ..
    } = parse_instance(r#"{"kind": "bp", "sizes": [0.2, 0.7, 0.2, 0.9]}"#).unwrap()
    else {
        panic!()
    };
    assert_eq!(instance.sizes(), &[0.9, 0.7, 0.2, 0.2]);
    assert_eq!(permutation, vec![3, 1, 0, 2]);
    assert!(!notices.is_empty());
}

#[test]
fn out_of_range_cost_is_rejected() {
    let err =
        parse_instance(r#"{"kind": "bpr", "sizes": [0.5], "rejection_costs": [1.5]}"#).unwrap_err();
    assert!(matches!(err, HarnessError::Validation(_)));
}

#[test]
fn write_then_load() {
    let inst = generate_instance(ProblemKind::Train, 6, 11, SizeDistribution::Clustered).unwrap();
    let path = std::env::temp_dir().join(format!("entround-harness-{}.json", std::process::id()));
    write_instance(&path, &inst, Default::default()).unwrap();
    let LoadedInstance::Packing { instance, .. } = load_instance(&path).unwrap() else {
        panic!()
    };
    assert_eq!(instance, inst);
    std::fs::remove_file(path).ok();
}

#[test]
fn one_item_bpr_report_passes() {
    let inst = LoadedInstance::Packing {
        instance: PackingInstance::bpr(vec![0.5], vec![0.2]).unwrap(),
        permutation: vec![0],
        notices: vec![],
        metadata: Default::default(),
    };
    let r = run_experiment_on(&ExperimentConfig::new(Command::Bpr), Some(&inst)).unwrap();
    assert!(r.pass());
    assert_eq!(r.records.len(), 1);
}

#[test]
fn rounding_tail_table() {
    let inst = parse_instance(
        r#"{"kind": "rounding", "a": [[1, 1, 1, 1]], "delta": [1], "x": [0.5, 0.5, 0.5, 0.5]}"#,
    )
    .unwrap();
    let mut cfg = ExperimentConfig::new(Command::Round);
    cfg.runs = 10_000;
    cfg.seed = 3;
    let r = run_experiment_on(&cfg, Some(&inst)).unwrap();
    let tail = r.aggregates.tail.as_ref().unwrap();
    assert_eq!(tail.lines.len(), 2);
    assert!(tail.lines.iter().all(|l| l.runs == 10_000));
    assert!(r.pass());
    // aggregates are recomputable from the records
    let max = r
        .records
        .iter()
        .filter_map(|rec| match &rec.payload {
            Some(entround::harness::RunPayload::Rounding { a_discrepancy, .. }) => {
                Some(a_discrepancy.iter().copied().fold(0.0, f64::max))
            }
            _ => None,
        })
        .fold(0.0, f64::max);
    assert_eq!(r.aggregates.max, max);
}

#[test]
fn bench_is_reproducible_and_writes_output() {
    let out = std::env::temp_dir().join(format!("entround-bench-{}.json", std::process::id()));
    let mut cfg = ExperimentConfig::new(Command::Bench);
    cfg.runs = 5;
    cfg.seed = 42;
    cfg.output = Some(out.clone());
    cfg.generator = Some(GeneratorSpec {
        kind: ProblemKind::Bpr,
        n: 9,
        distribution: SizeDistribution::Dyadic,
    });
    let a = run_experiment(&cfg).unwrap().to_json();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), a);
    let b = run_experiment(&cfg).unwrap().to_json();
    assert_eq!(a, b);
    std::fs::remove_file(out).ok();
}

#[test]
fn zero_runs_is_a_usage_error() {
    let mut cfg = ExperimentConfig::new(Command::Bench);
    cfg.runs = 0;
    assert!(matches!(
        run_experiment_on(&cfg, None),
        Err(HarnessError::Usage(_))
    ));
}

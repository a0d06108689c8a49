use super::*;
use crate::optim::AlgorithmName;
use crate::InstanceStream;

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        vec![(3, 1), (21, 9)],
        vec![
            AlgorithmConfig::new(AlgorithmName::Dcma),
            AlgorithmConfig::new(AlgorithmName::De),
        ],
    );
    cfg.alphas = vec![0.0, 0.25, 0.5, 0.75, 1.0];
    cfg.instances_first = vec![1, 2];
    cfg.runs_per_instance = 2;
    cfg.dimension = 2;
    cfg.budget_multiplier = 100;
    cfg.master_seed = 7;
    cfg
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn seed_goldens() {
    assert_eq!(derive_seed(0, 0, 0, 0, 0, 0), 0xE220_A839_7B1D_CDAF);
    assert_eq!(derive_seed(0, 0, 0, 0, 0, 1), 0x8E32_D533_01AD_A1EF);
    assert_eq!(derive_seed(42, 1, 2, 3, 4, 5), 0x07DA_888F_46EE_B92C);
    assert_eq!(derive_seed(9, 1, 1, 1, 1, 1), derive_seed(9, 1, 1, 1, 1, 1));
    assert_ne!(derive_seed(9, 1, 1, 1, 1, 0), derive_seed(9, 1, 1, 1, 1, 1));
}

#[test]
fn default_grid() {
    let a = default_alphas();
    assert_eq!(a.len(), 21);
    assert_eq!(a[0], 0.0);
    assert_eq!(a[20], 1.0);
    assert!((a[1] - 0.05).abs() < 1e-15);
}

#[test]
fn grid_arithmetic() {
    let mut cfg = ExperimentConfig::new(vec![(3, 1)], vec![AlgorithmConfig::new(AlgorithmName::Dcma)]);
    cfg.alphas = vec![0.0, 1.0];
    cfg.instances_first = vec![1];
    cfg.runs_per_instance = 1;
    cfg.budget_multiplier = 10;
    let set = Experiment::prepare(cfg).unwrap().execute(1).unwrap();
    assert_eq!(set.len(), 2);

    // The sphere sweep over the mandatory functions: 7 pairs x 21 alphas x 10 instances x 5 runs.
    let pairs = [2, 3, 9, 10, 11, 16, 21].iter().map(|&f| (f, 1)).collect();
    let mut sweep = ExperimentConfig::new(pairs, vec![AlgorithmConfig::new(AlgorithmName::Dcma)]);
    sweep.instances_first = (1..=10).collect();
    assert_eq!(sweep.cell_count(), 7350);
    let exp = Experiment::prepare(sweep).unwrap();
    assert_eq!(exp.cells().len(), 7350);
    let keys: BTreeSet<TraceKey> = exp.cells().iter().map(|c| exp.key(c)).collect();
    assert_eq!(keys.len(), 7350);
}

#[test]
fn worker_count_does_not_change_results() {
    let exp = Experiment::prepare(small_config()).unwrap();
    let one = exp.execute(1).unwrap();
    let four = exp.execute(4).unwrap();
    assert_eq!(one.traces, four.traces);
    assert_eq!(one.len(), small_config().cell_count());
}

#[test]
fn shuffled_execution_order_matches() {
    let exp = Experiment::prepare(small_config()).unwrap();
    let reference = exp.execute(2).unwrap();
    let mut cells = exp.cells();
    InstanceStream::from_seed(3).shuffle(&mut cells);
    for cell in cells.iter().take(20) {
        assert_eq!(&exp.run_cell(cell).unwrap(), &reference.traces[&exp.key(cell)]);
    }
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let set = run_experiment(&small_config(), dir.path(), 3).unwrap();
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.len(), 8, "{names:?}");
    assert!(!dir.path().join(PARTIAL_MARKER).exists());

    let text = std::fs::read_to_string(dir.path().join("dcma_f21_f9.csv")).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], TRACE_HEADER);
    assert!(lines[1].starts_with("dcma,21,9,0.000000,1,0,1,"));

    let back = read_trace_dir(dir.path()).unwrap();
    assert_eq!(back.budget, 200);
    assert_eq!(back.dimension, 2);
    assert_eq!(back.traces.len(), set.traces.len());
    for (key, trace) in &set.traces {
        let read = &back.traces[key];
        assert_eq!(read.events, trace.events);
    }

    let best = read_best_points(dir.path()).unwrap();
    assert_eq!(best.len(), set.len());
    for b in &best {
        let t = &set.traces[&b.key];
        assert_eq!(b.point, t.final_best_point);
        assert_eq!(b.final_best, t.final_best);
    }
}

#[test]
fn rerun_is_byte_identical_in_data() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&small_config(), a.path(), 1).unwrap();
    run_experiment(&small_config(), b.path(), 4).unwrap();
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        let x = std::fs::read_to_string(a.path().join(&name)).unwrap();
        let y = std::fs::read_to_string(b.path().join(&name)).unwrap();
        assert_eq!(data_lines(&x), data_lines(&y));
    }
}

#[test]
fn validation_rejects_bad_configs() {
    let mut cfg = small_config();
    cfg.alphas.push(1.5);
    assert!(matches!(cfg.validate(), Err(Error::AlphaOutOfRange(_))));

    let mut cfg = small_config();
    cfg.pairs.push((4, 1));
    assert!(matches!(cfg.validate(), Err(Error::UnsupportedFunction(4))));

    let mut cfg = small_config();
    cfg.algorithms.push(AlgorithmConfig::new(AlgorithmName::Dcma));
    assert!(cfg.validate().is_err());
    cfg.algorithms[2] = AlgorithmConfig::new(AlgorithmName::Dcma).with_sigma0(2.0).with_label("dcma_wide");
    assert!(cfg.validate().is_ok());

    let mut cfg = small_config();
    cfg.budget_multiplier = 5;
    assert!(cfg.validate().is_err(), "budget 10 is below DE's population");

    let mut cfg = small_config();
    cfg.placement_policy.insert("21".into(), PlacementPolicy::FixedNorm { norm: 9.0 });
    assert!(cfg.validate().is_err());
    cfg.placement_policy.insert("21".into(), PlacementPolicy::FixedNorm { norm: 1.0 });
    assert!(cfg.validate().is_ok());
    cfg.placement_policy.insert("x".into(), PlacementPolicy::Uniform);
    assert!(cfg.validate().is_err());

    let mut cfg = small_config();
    cfg.alphas = vec![0.1, 0.1000001];
    assert!(cfg.validate().is_err());
}

#[test]
fn toml_config() {
    let text = r#"
pairs = [[21, 9], [9, 21]]
alphas = [0.0, 0.5, 1.0]
instances_first = [1, 2, 3]
runs_per_instance = 2
dimension = 2
budget_multiplier = 50
master_seed = 11

[placement_policy]
21 = { mode = "fixed_norm", norm = 1.0 }

[[algorithms]]
name = "dcma"
sigma0 = 0.3

[[algorithms]]
name = "dcma"
label = "dcma_wide"
sigma0 = 2.0
"#;
    let cfg = ExperimentConfig::from_toml_str(text).unwrap();
    assert_eq!(cfg.pairs, vec![(21, 9), (9, 21)]);
    assert_eq!(cfg.instance_second, 1);
    assert_eq!(cfg.budget(), 100);
    assert_eq!(cfg.placement_for(21), PlacementPolicy::FixedNorm { norm: 1.0 });
    assert_eq!(cfg.placement_for(9), PlacementPolicy::Uniform);
    assert_eq!(cfg.algorithms[1].label(), "dcma_wide");
    let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(again, cfg);

    let defaults = ExperimentConfig::from_toml_str("pairs = [[3, 1]]\n[[algorithms]]\nname = \"de\"\n").unwrap();
    assert_eq!(defaults.alphas.len(), 21);
    assert_eq!(defaults.instances_first, vec![1, 2, 3, 4, 5]);
    assert_eq!(defaults.runs_per_instance, 5);
    assert_eq!(defaults.budget(), 10_000);

    assert!(ExperimentConfig::from_toml_str("pairs = [[3, 1]]\nalgorithms = []\nbogus = 1\n").is_err());
}

#[test]
fn reader_reports_corrupt_rows() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&small_config(), dir.path(), 2).unwrap();
    let path = dir.path().join("de_f3_f1.csv");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("de,3,1,0.500000,1,0,notanumber,1.0\n");
    std::fs::write(&path, &text).unwrap();
    let line = text.lines().count();
    match read_trace_dir(dir.path()) {
        Err(Error::Parse { path: p, line: l, .. }) => {
            assert_eq!(p, path);
            assert_eq!(l, line);
        }
        other => panic!("expected parse error, got {other:?}"),
    }

    let empty = tempfile::tempdir().unwrap();
    assert!(matches!(read_trace_dir(empty.path()), Err(Error::EmptyTraces)));
}

use sparse_omp::experiments::{
    ratio_experiment, run_experiment, table_cases, ExperimentConfig, Preset,
};
use sparse_omp::io::{recovery_table, Precision};
use sparse_omp::signals::SignalCase;

fn small(trials: usize, offset: usize) -> ExperimentConfig {
    ExperimentConfig {
        preset: Preset::Custom,
        m_values: vec![40, 60],
        n: 128,
        k_values: vec![6],
        cases: table_cases(),
        trials,
        trial_offset: offset,
        seed: 77,
        grid_size: 512,
    }
}

#[test]
fn identical_config_identical_summary() {
    let a = run_experiment(&small(200, 0)).unwrap();
    let b = run_experiment(&small(200, 0)).unwrap();
    assert_eq!(a, b);
    let csv = |s| recovery_table(s).unwrap().to_csv(Precision::Machine);
    assert_eq!(csv(&a), csv(&b));
    let other = run_experiment(&ExperimentConfig { seed: 78, ..small(200, 0) }).unwrap();
    assert_ne!(a.rows, other.rows);
}

#[test]
fn split_runs_pool_to_the_full_run() {
    let full = run_experiment(&small(10_000, 0)).unwrap();
    let parts: Vec<_> = (0..4)
        .map(|i| run_experiment(&small(2_500, 2_500 * i)).unwrap())
        .collect();
    for (r, row) in full.rows.iter().enumerate() {
        let pooled: usize = parts.iter().map(|p| p.rows[r].successes).sum();
        assert_eq!(pooled, row.successes, "row {r}");
        let ratio: f64 = parts.iter().map(|p| p.rows[r].mean_ratio * 2_500.0).sum();
        assert!((ratio / 10_000.0 - row.mean_ratio).abs() <= 1e-9 * row.mean_ratio);
    }
}

#[test]
fn case_subset_does_not_change_results() {
    let full = run_experiment(&small(300, 0)).unwrap();
    let only = run_experiment(&ExperimentConfig {
        cases: vec![SignalCase::Decaying { alpha: 1.2 }],
        ..small(300, 0)
    })
    .unwrap();
    let matching: Vec<_> = full
        .rows
        .iter()
        .filter(|r| r.case == SignalCase::Decaying { alpha: 1.2 })
        .collect();
    assert_eq!(matching.len(), only.rows.len());
    for (a, b) in matching.iter().zip(&only.rows) {
        assert_eq!(*a, b);
    }
}

#[test]
fn ratio_experiment_replays() {
    let ps: Vec<usize> = (3..=10).collect();
    assert_eq!(
        ratio_experiment(&ps, 2000, 0.95, 5).unwrap(),
        ratio_experiment(&ps, 2000, 0.95, 5).unwrap()
    );
}

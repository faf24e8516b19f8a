use kmsketch::bench::{emit_csv, read_csv, run_bench, BenchConfig, BenchRecord, CSV_HEADER};
use kmsketch_core::datagen::{gen_synth, Dataset, SynthSpec};
use kmsketch_core::reducers::{MethodKind, ReductionMethod};
use kmsketch_core::svd::exact_svd;

fn data() -> Dataset {
    gen_synth(&SynthSpec { centers: 3, dim: 40, points_per_center: 15, side: 50.0, variance: 4.0, seed: 2 }).unwrap()
}

fn config(methods: &[MethodKind], r_grid: &[usize], trials: usize) -> BenchConfig {
    let mut cfg = BenchConfig::new(3, 11);
    cfg.methods = methods.iter().map(|&m| ReductionMethod::new(m)).collect();
    cfg.r_grid = r_grid.to_vec();
    cfg.trials = trials;
    cfg.record_timing = false;
    cfg
}

#[test]
fn cardinality_and_order() {
    let ds = data();
    let cfg = config(&[MethodKind::Rp, MethodKind::SamplApproxSvd], &[5, 10, 15, 20], 3);
    let run = run_bench(&ds, &cfg).unwrap();
    assert_eq!(run.records.len(), 24 + 3);
    let keys: Vec<(String, usize, usize)> = run.records.iter().map(|r| (r.method.clone(), r.r, r.trial)).collect();
    let mut want = Vec::new();
    for m in ["rp", "sampl-approx-svd"] {
        for r in [5, 10, 15, 20] {
            for t in 0..3 {
                want.push((m.to_string(), r, t));
            }
        }
    }
    for t in 0..3 {
        want.push(("kmeans".to_string(), 40, t));
    }
    assert_eq!(keys, want);
}

#[test]
fn svd_methods_ignore_the_grid() {
    let ds = data();
    let cfg = config(&[MethodKind::Svd, MethodKind::ApproxSvd], &[5, 10], 2);
    let run = run_bench(&ds, &cfg).unwrap();
    assert_eq!(run.records.len(), 2 * 2 + 2);
    assert!(run.records.iter().filter(|r| r.method != "kmeans").all(|r| r.r == 3));
}

#[test]
fn oversized_selection_is_skipped() {
    let ds = data();
    let cfg = config(&[MethodKind::SamplSvd, MethodKind::Rp], &[20, 60], 1);
    let run = run_bench(&ds, &cfg).unwrap();
    assert_eq!(run.warnings.len(), 1);
    assert!(run.warnings[0].contains("sampl-svd"));
    assert!(!run.records.iter().any(|r| r.method == "sampl-svd" && r.r == 60));
    assert!(run.records.iter().any(|r| r.method == "rp" && r.r == 60));
}

#[test]
fn deterministic_without_timing() {
    let ds = data();
    let cfg = config(&MethodKind::ALL, &[5, 10], 2);
    let a = run_bench(&ds, &cfg).unwrap();
    let b = run_bench(&ds, &cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.records.iter().all(|r| r.reduce_ms == 0.0 && r.cluster_ms == 0.0));
}

#[test]
fn objective_respects_rank_k_floor() {
    let ds = data();
    let svd = exact_svd(&ds.points).unwrap();
    let floor = svd.tail_energy(3) / ds.points.squared_norm();
    let run = run_bench(&ds, &config(&MethodKind::ALL, &[5, 20], 2)).unwrap();
    for rec in &run.records {
        assert!(rec.normalized_objective >= floor * (1.0 - 1e-9), "{rec:?}");
        assert!((0.0..=1.0).contains(&rec.normalized_objective));
        let acc = rec.accuracy.unwrap();
        assert!((0.0..=1.0).contains(&acc));
    }
}

#[test]
fn rejects_bad_configs() {
    let ds = data();
    assert!(run_bench(&ds, &config(&[MethodKind::Rp], &[10, 5], 1)).is_err());
    assert!(run_bench(&ds, &config(&[MethodKind::Rp], &[0, 5], 1)).is_err());
    assert!(run_bench(&ds, &config(&[MethodKind::Rp], &[5], 0)).is_err());
    let mut cfg = config(&[MethodKind::Rp], &[5], 1);
    cfg.kmeans.k = 1;
    assert!(run_bench(&ds, &cfg).is_err());
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    emit_csv(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    assert_eq!(CSV_HEADER.join(","), "method,r,trial,seed,reduce_ms,cluster_ms,objective,normalized_objective,accuracy");

    let mut records = run_bench(&data(), &config(&[MethodKind::Rp], &[5], 2)).unwrap().records;
    records.push(BenchRecord {
        method: "rp".into(),
        r: 7,
        trial: 9,
        seed: u64::MAX,
        reduce_ms: 1.25,
        cluster_ms: 1e-7,
        objective: 1.0 / 3.0,
        normalized_objective: 0.1,
        accuracy: None,
    });
    emit_csv(&records, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), records);
    assert!(std::fs::read_to_string(&path).unwrap().lines().last().unwrap().ends_with(','));
}

use std::sync::Arc;

use sembed::dataset::{parse_manifest, DescriptorCache};
use sembed::evaluation::{gen_synthetic, generate, run_lopo, sweep, sweep_to_text, EvalConfig, Method, SweepGrid, SyntheticSpec};
use sembed::semantics::{parse_taxonomy, RelationMode};

fn small_spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec { points_per_cluster: 12, ..SyntheticSpec::planted(seed) }
}

#[test]
fn sweep_rows_follow_the_grid() {
    let data = generate(&small_spec(1)).unwrap();
    let cache = data.cache().unwrap();
    let base = EvalConfig { mode: RelationMode::As, ..EvalConfig::default() };
    let grid = SweepGrid { m: vec![10, 40], z: vec![1, 3], ..SweepGrid::default() };
    let rows = sweep(&data.dataset, &data.taxonomy, &cache, &base, &grid).unwrap();
    let points: Vec<(usize, usize)> = rows.iter().map(|r| (r.m, r.z)).collect();
    assert_eq!(points, [(10, 1), (10, 3), (40, 1), (40, 3)]);
    assert!(rows.iter().all(|r| r.gamma == base.gamma && r.t == base.walk.t));

    // a grid point equals a direct run with the same settings
    let mut direct = base.clone();
    direct.m = 40;
    direct.walk.z = 3;
    let acc = run_lopo(&data.dataset, &data.taxonomy, &cache, &direct).unwrap().accuracy().unwrap();
    assert_eq!(rows[3].accuracy, acc);

    let again = sweep(&data.dataset, &data.taxonomy, &cache, &base, &grid).unwrap();
    assert_eq!(sweep_to_text(&rows), sweep_to_text(&again));
    assert!(sweep(&data.dataset, &data.taxonomy, &cache, &base, &SweepGrid::default()).is_err());
}

#[test]
fn reports_are_reproducible_across_methods() {
    let data = generate(&small_spec(2)).unwrap();
    for method in [Method::Sembed, Method::Knn, Method::Linear] {
        let cfg = EvalConfig { method, mode: RelationMode::As, seed: 3, ..EvalConfig::default() };
        let a = run_lopo(&data.dataset, &data.taxonomy, &data.cache().unwrap(), &cfg).unwrap();
        let b = run_lopo(&data.dataset, &data.taxonomy, &data.cache().unwrap(), &cfg).unwrap();
        assert_eq!(a.to_text().unwrap(), b.to_text().unwrap());
        assert_eq!(a.records.len(), data.dataset.len());
        assert!(a.folds.iter().all(|f| f.is_clean()));
    }
}

#[test]
fn sampled_runs_use_a_subset() {
    let data = generate(&small_spec(4)).unwrap();
    let cfg = EvalConfig { mode: RelationMode::As, sample: Some(30), ..EvalConfig::default() };
    let report = run_lopo(&data.dataset, &data.taxonomy, &data.cache().unwrap(), &cfg).unwrap();
    assert_eq!(report.records.len(), 30);
}

#[test]
fn concurrent_cache_loads_share_one_copy() {
    let dir = tempfile::tempdir().unwrap();
    let paths = gen_synthetic(&small_spec(5), dir.path()).unwrap();
    let ds = parse_manifest(&paths.manifest).unwrap();
    parse_taxonomy(&paths.taxonomy).unwrap();
    let cache = DescriptorCache::new();
    let seg = &ds.segments()[3];
    let loaded: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..8).map(|_| s.spawn(|| cache.get(&ds, seg).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let first = cache.get(&ds, seg).unwrap();
    assert!(loaded.iter().all(|l| **l == *first));
    assert!(loaded.iter().any(|l| Arc::ptr_eq(l, &first)));
    assert_eq!(cache.len(), 1);
    assert_eq!(cache.dim(), Some(16));
}

#[test]
fn files_on_disk_evaluate_like_memory() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(6);
    let paths = gen_synthetic(&spec, dir.path()).unwrap();
    let ds = parse_manifest(&paths.manifest).unwrap();
    let tax = parse_taxonomy(&paths.taxonomy).unwrap();
    let cfg = EvalConfig { mode: RelationMode::Ah, ..EvalConfig::default() };
    let disk = run_lopo(&ds, &tax, &DescriptorCache::new(), &cfg).unwrap();
    let mem = generate(&spec).unwrap();
    let memory = run_lopo(&mem.dataset, &mem.taxonomy, &mem.cache().unwrap(), &cfg).unwrap();
    assert_eq!(disk.records, memory.records);
}

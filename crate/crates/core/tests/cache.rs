use psu3_core::cache::{
    decode_sets, encode_bsgs, encode_geometry, encode_sets, fingerprint_digest, Cache, Manifest, CACHE_FORMAT_VERSION,
};
use psu3_core::classes::{catalog_from_generators, enumerate_all_classes, DEFAULT_CLASS_BUDGET};
use psu3_core::context::GroupContext;
use psu3_core::maximal::{build_maximals, closure_from_sets, intersection_closure, DEFAULT_NODE_BUDGET};
use psu3_core::{run, OutputFormat, RunConfig, Task};

#[test]
fn artifacts_round_trip_with_identical_fingerprints() {
    let ctx = GroupContext::build(1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (mut cache, notice) = Cache::open(dir.path(), &ctx.group).unwrap();
    assert!(notice.is_none());

    let geometry = encode_geometry(ctx.plane(), &ctx.self_polar);
    let bsgs = encode_bsgs(ctx.group.perm_group().bsgs());
    cache.store("geometry", &geometry).unwrap();
    cache.store("bsgs", &bsgs).unwrap();

    let maximals = build_maximals(&ctx).unwrap();
    let closure = intersection_closure(&ctx, &maximals, DEFAULT_NODE_BUDGET).unwrap();
    let sets: Vec<Vec<u32>> = closure.nodes().iter().map(|n| n.elements.clone()).collect();
    cache.store("closure", &encode_sets(&sets)).unwrap();

    let catalog = enumerate_all_classes(&ctx, DEFAULT_CLASS_BUDGET).unwrap();
    let gens: Vec<Vec<u32>> = catalog.classes().iter().map(|c| c.representative.generators.clone()).collect();
    cache.store("classes", &encode_sets(&gens)).unwrap();

    let (reopened, notice) = Cache::open(dir.path(), &ctx.group).unwrap();
    assert!(notice.is_none());
    assert_eq!(reopened.load("geometry").unwrap().unwrap(), geometry);
    assert_eq!(reopened.load("bsgs").unwrap().unwrap(), bsgs);

    let digest = |records: Vec<&psu3_core::subgroup::SubgroupRecord>| {
        let d: Vec<String> = records.iter().map(|r| r.fingerprint(&ctx.table).digest()).collect();
        fingerprint_digest(d.iter().map(|s| s.as_str()))
    };
    let loaded = closure_from_sets(&ctx, &maximals, decode_sets(&reopened.load("closure").unwrap().unwrap()).unwrap())
        .unwrap();
    assert_eq!(loaded.len(), closure.len());
    assert_eq!(loaded.labels(), closure.labels());
    assert_eq!(loaded.maximal_nodes(), closure.maximal_nodes());
    assert_eq!(digest(loaded.nodes().iter().collect()), digest(closure.nodes().iter().collect()));

    let loaded = catalog_from_generators(&ctx, &decode_sets(&reopened.load("classes").unwrap().unwrap()).unwrap())
        .unwrap();
    assert_eq!(loaded.len(), catalog.len());
    assert_eq!(
        digest(loaded.classes().iter().map(|c| &c.representative).collect()),
        digest(catalog.classes().iter().map(|c| &c.representative).collect())
    );
    let sizes = |c: &psu3_core::classes::ClassCatalog| c.classes().iter().map(|r| r.class_size).collect::<Vec<_>>();
    assert_eq!(sizes(&loaded), sizes(&catalog));
}

#[test]
fn corrupted_or_stale_cache_is_rebuilt() {
    let ctx = GroupContext::build(1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (mut cache, _) = Cache::open(dir.path(), &ctx.group).unwrap();
    cache.store("closure", &[1, 2, 3]).unwrap();

    let file = dir.path().join("closure.bin");
    let mut bytes = std::fs::read(&file).unwrap();
    *bytes.last_mut().unwrap() ^= 1;
    std::fs::write(&file, bytes).unwrap();
    assert!(cache.load("closure").is_err());

    let path = dir.path().join("manifest.json");
    let mut manifest: Manifest = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    manifest.format_version = CACHE_FORMAT_VERSION + 1;
    std::fs::write(&path, serde_json::to_vec(&manifest).unwrap()).unwrap();
    let (reopened, notice) = Cache::open(dir.path(), &ctx.group).unwrap();
    assert!(notice.unwrap().contains("rebuilding"));
    assert!(reopened.manifest().artifacts.is_empty());
    assert!(!file.exists());
}

#[test]
fn cached_run_matches_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(1, &[Task::Mu, Task::Lambda]).unwrap();
    cfg.cache_dir = Some(dir.path().to_path_buf());
    let first = run(&cfg).unwrap();
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    for name in ["geometry", "bsgs", "closure", "classes"] {
        assert!(manifest.contains(&format!("\"{name}\"")), "{name} not cached");
    }
    let second = run(&cfg).unwrap();
    assert_eq!(first.render(OutputFormat::Json).unwrap(), second.render(OutputFormat::Json).unwrap());
    assert_eq!(first.render(OutputFormat::Csv).unwrap(), second.render(OutputFormat::Csv).unwrap());
    assert_eq!(first.exit_code(), 0);
}

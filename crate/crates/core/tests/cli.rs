use std::process::{Command, Output};

fn psu3(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_psu3"));
    cmd.args(args);
    for var in [
        "PSU3_N",
        "PSU3_THREADS",
        "PSU3_CACHE_DIR",
        "PSU3_FORMAT",
        "PSU3_SEED",
        "PSU3_BUDGET_NODES",
        "PSU3_BUDGET_CLASSES",
        "PSU3_MC_TRIALS",
    ] {
        cmd.env_remove(var);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("run psu3")
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.schema.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(stdout: &[u8]) -> serde_json::Value {
    let doc: serde_json::Value = serde_json::from_slice(stdout).unwrap();
    let v = schema();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    doc
}

#[test]
fn mu_csv_is_byte_identical() {
    let a = psu3(&["mu", "--format", "csv", "--seed", "7"], &[]);
    let b = psu3(&["mu", "--format", "csv", "--seed", "7"], &[]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("type,order,normalizer_order,mu,lambda\n"));
    assert!(text.contains("\nC2,2,320,-160,-1\n"));
    assert!(text.contains("\nSym(3),6,30,5,1\n"));
    assert!(text.contains("# C2 | 2 | q^3(q+1) | -q^3(q+1)/2 | -1\n"));
}

#[test]
fn chi_json_is_identical_and_valid() {
    let a = psu3(&["chi", "--prime", "13", "--prime", "5", "--format", "json"], &[]);
    let b = psu3(&["chi", "--prime", "13", "--prime", "5", "--format", "json"], &[]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let doc = assert_valid(&a.stdout);
    let chi = doc["results"]["chi"].as_array().unwrap();
    assert_eq!(chi[0]["p"], 13);
    assert_eq!(chi[0]["chi"], 1600);
    assert_eq!(chi[0]["table_value"], -1600);
    assert_eq!(chi[0]["theorem_value"], -1600);
    assert_eq!(chi[0]["brown_holds"], true);
    assert_eq!(chi[1]["chi"], -624);
    let statuses: Vec<&str> = doc["verdicts"].as_array().unwrap().iter().map(|v| v["status"].as_str().unwrap()).collect();
    assert!(statuses.contains(&"discrepancy"));
    assert!(!statuses.contains(&"fail"));
}

#[test]
fn q16_refuses_mu_and_runs_maximals() {
    let out = psu3(&["--n", "2", "mu"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node budget"));

    let out = psu3(&["generate", "--format", "json"], &[("PSU3_N", "2")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = assert_valid(&out.stdout);
    assert_eq!(doc["config"]["n"], 2);
    assert_eq!(doc["results"]["geometry"]["summary"]["curve_points"], 4097);
    assert_eq!(
        doc["results"]["geometry"]["summary"]["frobenius_triangles"],
        (16u64.pow(6) + 16u64.pow(5) - 16u64.pow(4) - 16u64.pow(3)) / 3
    );
    assert_eq!(doc["results"]["group"]["order"], 16u64.pow(3) * 4097 * 255);
}

#[test]
fn flags_override_environment() {
    let out = psu3(&["generate", "--format", "json", "--seed", "5"], &[("PSU3_SEED", "9"), ("PSU3_THREADS", "3")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = assert_valid(&out.stdout);
    assert_eq!(doc["config"]["rng_seed"], 5);
    assert_eq!(doc["config"]["threads"], 3);

    let out = psu3(&["generate"], &[("PSU3_FORMAT", "json")]);
    let doc = assert_valid(&out.stdout);
    assert_eq!(doc["config"]["rng_seed"], 20240601);
    assert_eq!(doc["config"]["output_format"], "json");
}

#[test]
fn bad_usage_exits_2() {
    assert_eq!(psu3(&["--n", "3", "generate"], &[]).status.code(), Some(2));
    assert_eq!(psu3(&["chi", "--prime", "4"], &[]).status.code(), Some(2));
    assert_eq!(psu3(&["chi"], &[]).status.code(), Some(2));
}

#[test]
fn tiny_budget_gives_partial_report() {
    let out = psu3(&["maximals", "--budget-nodes", "100", "--format", "json"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let doc = assert_valid(&out.stdout);
    let errors = doc["errors"].as_array().unwrap();
    assert_eq!(errors.len(), 1);
    assert!(errors[0].as_str().unwrap().contains("node budget"));
    assert!(doc["results"]["geometry"].is_object());
    assert!(doc["results"]["maximals"].is_null());
}

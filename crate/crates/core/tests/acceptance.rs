//! Acceptance gate. Runs the whole pipeline at q = 4 (plus the q = 16
//! stretch) in-process and prints one line per criterion.

use std::process::ExitCode;

use psu3_core::{run, OutputFormat, ReportDocument, RunConfig, Status, Task};
use serde_json::Value;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn int(v: &Value) -> i128 {
    match v {
        Value::Number(n) => n.as_i64().map(i128::from).or_else(|| n.as_u64().map(i128::from)).unwrap(),
        Value::String(s) => s.parse().unwrap(),
        other => panic!("not an integer: {other}"),
    }
}

fn no_failures(doc: &ReportDocument, claim: &str) -> Check {
    let mut any = false;
    for v in doc.verdicts_for(claim) {
        any = true;
        ensure!(v.status != Status::Fail, "{}: expected {}, computed {}", v.check, v.expected, v.computed);
    }
    ensure!(any, "no verdicts recorded for {claim}");
    Ok(())
}

fn find<'a>(rows: &'a Value, label: &str) -> &'a Value {
    rows.as_array().unwrap().iter().find(|r| r["label"] == label).unwrap_or_else(|| panic!("no row {label}"))
}

// Small GF(16) with modulus x^4 + x + 1, used only as an independent oracle.
fn gf16_mul(mut a: u8, mut b: u8) -> u8 {
    let mut r = 0;
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & 0x10 != 0 {
            a ^= 0x13;
        }
    }
    r
}

fn gf16_norm(a: u8) -> u8 {
    let a2 = gf16_mul(a, a);
    gf16_mul(gf16_mul(a2, a2), a)
}

fn projective_points() -> Vec<[u8; 3]> {
    let mut pts = Vec::new();
    for x in 0..16u8 {
        for y in 0..16u8 {
            for z in 0..16u8 {
                let lead = if x != 0 { x } else if y != 0 { y } else { z };
                if lead == 1 {
                    pts.push([x, y, z]);
                }
            }
        }
    }
    pts
}

fn geometry(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "geometry")?;
    let g = &r["geometry"]["summary"];
    ensure!(g["curve_points"] == 65, "curve points {}", g["curve_points"]);
    ensure!(g["self_polar_triangles"] == 416, "self-polar triangles {}", g["self_polar_triangles"]);
    ensure!(g["frobenius_triangles"] == 1600, "Frobenius triangles {}", g["frobenius_triangles"]);
    let sizes: Vec<(i128, i128)> = r["geometry"]["line_intersections"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| (int(&row["size"]), int(&row["lines"])))
        .collect();
    ensure!(sizes == vec![(1, 65), (5, 208)], "line intersections {sizes:?}");

    // Brute force over PG(2, 16): isotropic points and their line sections.
    let pts = projective_points();
    let curve: Vec<&[u8; 3]> = pts.iter().filter(|p| gf16_norm(p[0]) ^ gf16_norm(p[1]) ^ gf16_norm(p[2]) == 0).collect();
    ensure!(curve.len() == 65, "oracle curve points {}", curve.len());
    let mut hist = [0usize; 6];
    for l in &pts {
        let on = curve.iter().filter(|p| gf16_mul(l[0], p[0]) ^ gf16_mul(l[1], p[1]) ^ gf16_mul(l[2], p[2]) == 0).count();
        ensure!(on < 6, "line meets curve in {on} points");
        hist[on] += 1;
    }
    ensure!(hist == [0, 65, 0, 0, 0, 208], "oracle line sections {hist:?}");
    Ok(())
}

fn group(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "group")?;
    let g = &r["group"];
    ensure!(g["order"] == 62400, "order {}", g["order"]);
    ensure!(g["two_transitive"] == true, "not 2-transitive");
    let census = g["census"].as_array().unwrap();
    let total: i128 = census.iter().map(|c| int(&c["count"])).sum();
    ensure!(total == 62399, "census covers {total} elements");
    let of_order = |o: i128| census.iter().filter(|c| int(&c["order"]) == o).map(|c| int(&c["count"])).sum::<i128>();
    ensure!(of_order(2) == 195 && g["involutions"] == 195, "involutions {}", of_order(2));
    ensure!(of_order(3) == 4160 && g["order_three"] == 4160, "order-3 elements {}", of_order(3));
    Ok(())
}

fn maximals(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "maximals")?;
    let got: Vec<(i128, i128)> = r["maximals"]["families"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (int(&f["order"]), int(&f["family_size"])))
        .collect();
    ensure!(got == vec![(960, 65), (300, 208), (150, 416), (39, 1600)], "families {got:?}");
    for (order, size) in got {
        ensure!(62400 / order == size, "family of order {order} has {size} members");
    }
    Ok(())
}

fn closure(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "closure")?;
    let c = &r["maximals"]["closure"];
    let classes = c["classes"].as_array().unwrap();
    let proper: Vec<&Value> = classes.iter().filter(|k| k["label"] != "G").collect();
    ensure!(proper.len() == 15, "{} proper closure types", proper.len());
    for k in classes {
        ensure!(k["single_class"] == true, "{} splits", k["label"]);
        ensure!(k["normalizer_order"] == k["expected_normalizer_order"], "normalizer of {}", k["label"]);
        ensure!(int(&k["count"]) * int(&k["normalizer_order"]) == 62400, "orbit-stabilizer fails for {}", k["label"]);
    }
    for (label, n) in [("C2", 320), ("C3", 30), ("Sym(3)", 30)] {
        ensure!(find(&c["classes"], label)["normalizer_order"] == n, "normalizer of {label}");
    }
    let nodes: i128 = classes.iter().map(|k| int(&k["count"])).sum();
    ensure!(int(&c["nodes"]) == nodes && nodes == 14823, "closure has {nodes} nodes");
    Ok(())
}

fn triangle_counts(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "triangle-counts")?;
    let t = &r["maximals"]["closure"]["triangle_census"];
    for (label, sp, fr) in [("C2", 32, 0), ("C3", 5, 10), ("Sym(3)", 5, 0)] {
        let row = find(t, label);
        ensure!(row["self_polar"] == sp, "{label}: {} self-polar", row["self_polar"]);
        if label == "C3" {
            ensure!(row["frobenius"] == fr, "{label}: {} Frobenius", row["frobenius"]);
        }
        ensure!(row["incidences_hold"] == true, "{label}: incidences");
    }
    Ok(())
}

const MU: [(&str, i128, i128); 16] = [
    ("S2:C(q^2-1)", -1, -1),
    ("PSL(2,q)xC(q+1)", -1, -1),
    ("(C(q+1)xC(q+1)):Sym(3)", -1, -1),
    ("C(q^2-q+1):C3", -1, -1),
    ("Eq:C(q^2-1)", 1, 1),
    ("(C(q+1)xC(q+1)):C2", 1, 1),
    ("C(q+1)xC(q+1)", 0, 0),
    ("C(q^2-1)", 0, 0),
    ("C(2(q+1))", 0, 0),
    ("C(q+1)=Z(M2)", 0, 0),
    ("Eq", 0, 0),
    ("Sym(3)", 5, 1),
    ("C3", 10, 1),
    ("C2", -160, -1),
    ("1", 0, 0),
    ("G", 1, 1),
];

fn mu_table(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "mu-table")?;
    let rows = &r["mu"]["rows"];
    ensure!(rows.as_array().unwrap().len() == MU.len(), "row count");
    for (label, mu, _) in MU {
        let row = find(rows, label);
        ensure!(int(&row["mu"]) == mu, "mu({label}) = {}", row["mu"]);
        ensure!(row["constant_on_class"] == true, "mu not constant on {label}");
    }
    ensure!(r["mu"]["dual_check"] == true && r["mu"]["upward_sums_vanish"] == true, "recursion checks");
    Ok(())
}

fn lambda_table(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "lambda-table")?;
    let l = &r["lambda"];
    let rows = l["rows"].as_array().unwrap();
    let nonzero: Vec<&str> =
        rows.iter().filter(|x| int(&x["lambda"]) != 0 && x["label"] != "G").map(|x| x["label"].as_str().unwrap()).collect();
    ensure!(nonzero.len() == 9, "lambda nonzero on {nonzero:?}");
    for (label, _, lambda) in MU {
        let row = find(&l["rows"], label);
        ensure!(int(&row["lambda"]) == lambda, "lambda({label}) = {}", row["lambda"]);
    }
    let total: i128 = rows.iter().map(|x| int(&x["class_size"])).sum();
    ensure!(int(&l["subgroups"]) == total, "class sizes sum to {total}");
    ensure!(l["completeness"]["passed"] == true, "completeness argument");
    for k in r["maximals"]["closure"]["classes"].as_array().unwrap() {
        let row = find(&l["rows"], k["label"].as_str().unwrap());
        ensure!(row["class_size"] == k["count"] && row["order"] == k["order"], "closure class {} missing", k["label"]);
    }
    Ok(())
}

fn identities(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "mu-lambda-identities")?;
    let p = &r["lambda"]["properties"];
    ensure!(p["trivial_holds"] == true && int(&p["trivial_mu"]) == 0, "trivial identity");
    ensure!(p["rows"].as_array().unwrap().len() == 34, "per-class verdicts missing");
    ensure!(doc.verdicts_for("mu-lambda-identities").any(|v| v.status == Status::Reported), "aggregate not reported");
    // Direct recomputation of the per-class right-hand side.
    for row in p["rows"].as_array().unwrap() {
        let rhs = int(&row["index_in_normalizer"]) * int(&row["lambda"]);
        ensure!(int(&row["rhs"]) == rhs, "rhs of {}", row["label"]);
        ensure!((int(&row["mu"]) == rhs) == (row["holds"] == true), "verdict of {}", row["label"]);
    }
    Ok(())
}

fn euler(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "euler-characteristics")?;
    let chi = r["chi"].as_array().unwrap();
    let want = [(2, 65, 64), (3, 2080, 3), (5, -624, 25), (13, 1600, 13), (7, 0, 1)];
    for (p, value, sylow) in want {
        let row = chi.iter().find(|c| c["p"] == p).ok_or(format!("p = {p} missing"))?;
        ensure!(int(&row["chi"]) == value, "chi at p = {p} is {}", row["chi"]);
        ensure!(row["hall"]["chi"] == row["poset"]["chi"], "methods disagree at p = {p}");
        ensure!(int(&row["sylow_order"]) == sylow, "Sylow order at p = {p}");
        if sylow > 1 {
            ensure!((value - 1).rem_euclid(sylow) == 0, "Brown fails at p = {p}");
        }
    }
    let disc = doc.verdicts_for("euler-characteristics").filter(|v| v.status == Status::Discrepancy).count();
    ensure!(disc == 3, "{disc} sign discrepancies");
    Ok(())
}

fn gaussian(m: u32, r: u32) -> i128 {
    let mut num = 1i128;
    let mut den = 1i128;
    for i in 0..r {
        num *= (1i128 << (m - i)) - 1;
        den *= (1i128 << (i + 1)) - 1;
    }
    num / den
}

fn telescoping(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "gaussian-telescoping")?;
    for row in r["verify"]["telescoping"].as_array().unwrap() {
        let n = int(&row["n"]) as u32;
        let m = 1u32 << n;
        let s: i128 = (1..=m).map(|k| (if k % 2 == 0 { 1 } else { -1 }) * (1i128 << (k * (k - 1) / 2)) * gaussian(m, k)).sum();
        ensure!(s == -1 && int(&row["value"]) == -1, "n = {n}: {s}");
    }
    ensure!(r["verify"]["telescoping"].as_array().unwrap().len() == 3, "n = 1, 2, 3 not all evaluated");
    Ok(())
}

fn generation(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "generation-probability")?;
    let gp = &r["mu"]["generation_probability"];
    ensure!(gp["exact"] == "5089/5200", "exact value {}", gp["exact"]);
    // Class-level sum: P(2) = sum over classes of |class| mu(H) (|H|/|G|)^2.
    let num: i128 = r["lambda"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| int(&x["class_size"]) * int(&x["mu"]) * int(&x["order"]).pow(2))
        .sum();
    ensure!(num * 5200 == 5089 * 62400i128.pow(2), "class-level oracle gives {num}/62400^2");
    let mc = &r["verify"]["monte_carlo"];
    ensure!(mc["trials"] == 100_000, "trials {}", mc["trials"]);
    let est = mc["estimate"].as_f64().unwrap();
    let se = mc["standard_error"].as_f64().unwrap();
    ensure!((est - 5089.0 / 5200.0).abs() <= 4.0 * se, "Monte Carlo {est} +- {se}");
    ensure!(r["mu"]["mann_violations"] == 0, "Mann bound violated");
    Ok(())
}

fn determinism(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "determinism")?;
    let d = &r["verify"]["determinism"];
    ensure!(d["mu_csv_identical"] == true && d["monte_carlo_identical"] == true, "in-process recomputation differs");
    let mut cfg = RunConfig::new(1, &[Task::Mu, Task::Chi]).map_err(|e| e.to_string())?;
    cfg.primes = vec![2, 5];
    let a = run(&cfg).map_err(|e| e.to_string())?;
    let b = run(&cfg).map_err(|e| e.to_string())?;
    for f in [OutputFormat::Json, OutputFormat::Csv] {
        ensure!(a.render(f).unwrap() == b.render(f).unwrap(), "{f:?} reports differ");
    }
    Ok(())
}

fn stretch(doc: &ReportDocument, r: &Value) -> Check {
    no_failures(doc, "stretch-q16")?;
    let s = &r["verify"]["stretch"];
    ensure!(s["geometry"]["curve_points"] == 4097, "curve points {}", s["geometry"]["curve_points"]);
    let q = 16i128;
    let frob = (q.pow(6) + q.pow(5) - q.pow(4) - q.pow(3)) / 3;
    ensure!(int(&s["geometry"]["frobenius_triangles"]) == frob, "Frobenius triangles {}", s["geometry"]["frobenius_triangles"]);
    ensure!(int(&s["group_order"]) == q.pow(3) * 4097 * 255, "group order {}", s["group_order"]);
    let refused = RunConfig::new(2, &[Task::Mu]).and_then(|c| c.validate());
    ensure!(refused.is_err(), "mu accepted at q = 16");
    Ok(())
}

fn main() -> ExitCode {
    let mut cfg = RunConfig::new(1, &Task::ALL).expect("config");
    cfg.stretch = true;
    let doc = match run(&cfg) {
        Ok(doc) => doc,
        Err(e) => {
            println!("acceptance run failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let value = serde_json::to_value(&doc).unwrap();
    let r = &value["results"];
    let criteria: [(&str, fn(&ReportDocument, &Value) -> Check); 13] = [
        ("geometry", geometry),
        ("group", group),
        ("maximals", maximals),
        ("closure", closure),
        ("triangle-counts", triangle_counts),
        ("mu-table", mu_table),
        ("lambda-table", lambda_table),
        ("mu-lambda-identities", identities),
        ("euler-characteristics", euler),
        ("gaussian-telescoping", telescoping),
        ("generation-probability", generation),
        ("determinism", determinism),
        ("stretch-q16", stretch),
    ];
    let mut failed = 0;
    println!();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(|| check(&doc, r)).unwrap_or_else(|_| Err("panicked".into())) {
            Ok(()) => println!("criterion {:02} {name}: PASS", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:02} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "verdicts: {} pass, {} fail, {} discrepancy, {} reported",
        doc.summary.pass, doc.summary.fail, doc.summary.discrepancy, doc.summary.reported
    );
    if failed == 0 && doc.errors.is_empty() {
        println!("acceptance: 13/13 criteria passed\n");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed\n");
        ExitCode::FAILURE
    }
}

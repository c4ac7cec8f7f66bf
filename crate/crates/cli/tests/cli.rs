use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noise-lattice"))
        .args(args)
        .env_remove("NOISE_LATTICE_MODE")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = bin(&full);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().unwrap())
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn three_point(dir: &TempDir) -> (String, String, String) {
    (
        write(
            dir,
            "space.json",
            r#"{"outcomes": ["a", "b", "c"], "probs": ["1/3", "1/3", "1/3"]}"#,
        ),
        write(dir, "x.json", r#"{"blocks": [[0], [1, 2]]}"#),
        write(dir, "y.json", r#"{"blocks": [[0, 1], [2]]}"#),
    )
}

#[test]
fn spaces() {
    let (v, code) = json(&["space", "dyadic", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["outcomes"], 8);
    assert_eq!(v["results"]["space"]["probs"][0], "1/8");

    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "s.json",
        r#"{"outcomes": ["h", "t"], "probs": [0.25, "3/4"]}"#,
    );
    let (v, code) = json(&["space", "load", &path]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["space"]["probs"], serde_json::json!(["1/4", "3/4"]));

    let bad = write(
        &dir,
        "bad.json",
        r#"{"outcomes": ["h", "t"], "probs": [0.5, 0.6]}"#,
    );
    assert_eq!(bin(&["space", "load", &bad]).status.code(), Some(2));
}

#[test]
fn sigma_operations_on_three_points() {
    let dir = TempDir::new().unwrap();
    let (s, x, y) = three_point(&dir);
    let (v, _) = json(&["sigma", "meet", &s, &x, &y]);
    assert_eq!(v["results"]["blocks"], 1);
    let (v, _) = json(&["sigma", "join", &s, &x, &y]);
    assert_eq!(v["results"]["blocks"], 3);
    let (v, code) = json(&["sigma", "indep", &s, &x, &y]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["independent"], false);
    assert!(v["results"]["witness"].is_array());
    let (v, _) = json(&["sigma", "commutes", &s, &x, &y]);
    assert_eq!(v["results"]["commutes"], false);
}

#[test]
fn algebras_validate_and_restrict() {
    let dir = TempDir::new().unwrap();
    let (v, _) = json(&["ntba", "parity", "2"]);
    assert_eq!(v["results"]["atoms"], 3);
    let algebra = write(&dir, "b.json", &v["results"]["ntba"].to_string());

    let (v, code) = json(&["ntba", "validate", &algebra]);
    assert_eq!((code, v["results"]["valid"].clone()), (0, Value::Bool(true)));
    assert_eq!(v["results"]["elements"], 8);

    let (v, _) = json(&["ntba", "restrict", &algebra, "{0,1}"]);
    assert_eq!(
        (v["results"]["atoms"].clone(), v["results"]["outcomes"].clone()),
        (2.into(), 4.into())
    );

    let (space, x, y) = three_point(&dir);
    let family = format!(
        r#"{{"space": {}, "elements": [{{"blocks": [[0, 1, 2]]}}, {}, {}, {{"blocks": [[0], [1], [2]]}}]}}"#,
        std::fs::read_to_string(&space).unwrap(),
        std::fs::read_to_string(&x).unwrap(),
        std::fs::read_to_string(&y).unwrap(),
    );
    let fam = write(&dir, "fam.json", &family);
    let (v, code) = json(&["ntba", "validate", &fam]);
    assert_eq!(code, 1);
    assert_eq!(v["results"]["reason"], "complement pair not independent");
    assert!(!v["summary"]["pass"].as_bool().unwrap());
}

#[test]
fn chaos_and_spectrum_reports() {
    let (v, code) = json(&["chaos", "report", "parity:2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["dim_h1"], 3);
    assert_eq!(v["results"]["classical"], true);
    assert_eq!(v["results"]["black"], false);
    assert_eq!(v["results"]["generated_blocks"], 8);

    let out = bin(&["spectrum", "report", "coords:3", "--format", "csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "k,dim\n0,1\n1,3\n2,3\n3,1\n"
    );

    let (v, _) = json(&["spectrum", "report", "coords:2"]);
    let ks: Vec<u64> = v["results"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["k"].as_u64().unwrap())
        .collect();
    assert_eq!(ks, vec![0, 1, 1, 2]);
    assert_eq!(
        v["results"]["points"][1]["generator_atoms"],
        serde_json::json!([0])
    );

    let out = Command::new(env!("CARGO_BIN_EXE_noise-lattice"))
        .args(["chaos", "report", "coords:4", "--format", "json"])
        .env("NOISE_LATTICE_MODE", "float")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        (v["mode"].clone(), v["results"]["dim_h1"].clone()),
        ("float".into(), 4.into())
    );
}

#[test]
fn cofinite_commands() {
    let (v, _) = json(&["cofinite", "eval", "y2|x3"]);
    assert_eq!(v["results"]["value"], "x2");
    let (v, _) = json(&["cofinite", "eval", "Y(2k)"]);
    assert_eq!(v["results"]["class"], "Cl(B)\\B");
    assert_eq!(v["results"]["complement"], Value::Null);
    assert_eq!(bin(&["cofinite", "eval", "x0 |"]).status.code(), Some(2));

    let (v, code) = json(&["cofinite", "demo"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["atomless"], false);
}

#[test]
fn demo_dossier() {
    let (v, code) = json(&["demo"]);
    assert_eq!(code, 0);
    let entries = v["results"]["entries"].as_array().unwrap();
    let find = |label: &str| {
        entries
            .iter()
            .find(|e| e["label"].as_str().unwrap().starts_with(label))
            .unwrap_or_else(|| panic!("{label}"))["value"]
            .clone()
    };
    for n in 1..=6 {
        assert_eq!(find(&format!("dim h1, parity n={n}")), (n + 1).to_string());
    }
    assert!(find("sign pairing")
        .as_str()
        .unwrap()
        .starts_with("8 blocks of size 2 in 16 outcomes"));
    assert_eq!(find("completion over"), "B itself");
}

#[test]
fn random_supremum_run() {
    let args = [
        "randsup",
        "run",
        "--ps",
        "0.1,0.1,0.1",
        "--trials",
        "20000",
        "--seed",
        "42",
        "--chi-square",
    ];
    let (v, code) = json(&args);
    assert_eq!(code, 0);
    let u = &v["results"]["union_bound"];
    assert!((u["exact"].as_f64().unwrap() - 0.271).abs() < 1e-12);
    assert!((u["bound"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["results"]["distribution_tests"].as_array().unwrap().len(), 3);
    assert_eq!(json(&args).0, v);
    assert_eq!(bin(&["randsup", "run", "--ps", "0.6,0.6"]).status.code(), Some(2));
}

#[test]
fn check_all_reports_and_faults() {
    let (v, code) = json(&["check", "all", "--seed", "3", "--cases", "3"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["summary"]["checks"].as_u64().unwrap() > 100);
    let reserialized: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(reserialized, v);

    let (v, code) = json(&["check", "all", "--seed", "1", "--cases", "6", "--inject-fault"]);
    assert_eq!(code, 1);
    let suites = v["results"]["suites"].as_array().unwrap();
    let indep = suites.iter().find(|s| s["name"] == "independence").unwrap();
    let repro = &indep["failures"][0]["repro"];
    assert_eq!(repro["seed"], 1);
    assert!(repro["space"]["probs"].is_array());
    assert_eq!(repro["partitions"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["ntba", "coords", "40"]).status.code(), Some(3));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bin(&["space", "dyadic", "2", "--format", "csv"]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["chaos", "report", "missing.json"]).status.code(), Some(2));
    assert_eq!(
        bin(&["space", "dyadic", "2", "--mode", "quaternion"])
            .status
            .code(),
        Some(2)
    );
    assert!(!Path::new("missing.json").exists());
}

use std::path::Path;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn ceresa(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ceresa"))
        .args(args)
        .env("NEWFORMS_CACHE_DIR", cache)
        .env_remove("NEWFORMS_BASE_URL")
        .env_remove("NEWFORMS_TIMEOUT_MS")
        .output()
        .expect("run ceresa")
}

fn schema(name: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(format!("{name}.schema.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&raw).expect("schema compiles")
}

fn assert_valid(name: &str, out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{name}: stdout is not JSON: {e}"));
    let s = schema(name);
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<_> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} output fails its schema: {msgs:#?}\n{v:#}");
    }
    v
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn certify_exit_codes_and_schema() {
    let cache = tmp();
    let out = ceresa(&["certify", "74"], cache.path());
    assert_eq!(out.status.code(), Some(0));
    let v = assert_valid("certificate", &out);
    assert_eq!(v["clause"], "A1_prime");

    let out = ceresa(&["certify", "6"], cache.path());
    assert_eq!(out.status.code(), Some(2));
    let v = assert_valid("certificate", &out);
    assert_eq!(v["verdict"], "unknown");

    for n in ["121", "128", "37", "48957501300891817233601"] {
        let out = ceresa(&["certify", n], cache.path());
        assert_eq!(out.status.code(), Some(0), "certify {n}");
        assert_valid("certificate", &out);
    }
}

#[test]
fn errors_exit_one_with_error_object() {
    let cache = tmp();
    let out = ceresa(&["certify", "0"], cache.path());
    assert_eq!(out.status.code(), Some(1));
    assert_valid("error", &out);

    let out = ceresa(&["heegner", "5", "-3"], cache.path());
    assert_eq!(out.status.code(), Some(1), "-3 is not a square mod 20");
    assert_valid("error", &out);

    let out = ceresa(&["genus", "10", "--curve", "x0star"], cache.path());
    assert_eq!(out.status.code(), Some(1));
    assert_valid("error", &out);
}

#[test]
fn usage_errors_exit_64() {
    let cache = tmp();
    for args in [
        &["frobnicate"][..],
        &["certify"],
        &["certify", "abc"],
        &["genus", "11", "--curve", "x1"],
        &["pullback", "1", "--m0", "three", "--r", "1"],
        &["certify", "37", "--online", "--fixtures", "x"],
    ] {
        assert_eq!(ceresa(args, cache.path()).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(ceresa(&["--help"], cache.path()).status.code(), Some(0));
}

#[test]
fn heegner_output() {
    let cache = tmp();
    let out = ceresa(&["heegner", "1", "-3", "1"], cache.path());
    assert_eq!(out.status.code(), Some(0));
    let v = assert_valid("heegner", &out);
    assert_eq!(v["degree"], "1/3");
    assert_eq!(v["r_values"], serde_json::json!([1]));

    let v = assert_valid("heegner", &ceresa(&["heegner", "11", "-7"], cache.path()));
    assert_eq!(v["degree"], "1");
}

#[test]
fn genus_lattice_pullback_newforms_selftest_validate() {
    let cache = tmp();
    let v = assert_valid("curve_profile", &ceresa(&["genus", "37", "--curve", "x0"], cache.path()));
    assert_eq!(v["genus"], 2);
    let v = assert_valid("curve_profile", &ceresa(&["genus", "37", "--curve", "x0star"], cache.path()));
    assert_eq!(v["genus"], 1);
    let v = assert_valid("curve_profile", &ceresa(&["genus", "1", "--curve", "xn"], cache.path()));
    assert_eq!(v["cusps"], 3);

    let v = assert_valid("lattice", &ceresa(&["lattice", "3"], cache.path()));
    assert_eq!(v["lattices"][0]["discriminant_group_order"], 6);
    assert_eq!(v["lattices"][2]["discriminant_group_order"], 36);

    let v = assert_valid("pullback", &ceresa(&["pullback", "1", "--m0", "7/4", "--r", "1"], cache.path()));
    assert_eq!(v["round_trip_exact"], true);
    let v = assert_valid("pullback", &ceresa(&["pullback", "2", "--m0", "1", "--r", "0"], cache.path()));
    assert_eq!(v["round_trip_exact"], true);

    let v = assert_valid("newforms", &ceresa(&["newforms", "37"], cache.path()));
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
    assert_eq!(ceresa(&["newforms", "1000003"], cache.path()).status.code(), Some(1));

    let out = ceresa(&["selftest"], cache.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(assert_valid("selftest", &out)["ok"], true);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let cache = tmp();
    for args in [&["certify", "128"][..], &["certify", "6"], &["heegner", "7", "-20"], &["pullback", "3", "--m0", "11/12", "--r", "1"]] {
        let a = ceresa(args, cache.path());
        let b = ceresa(args, cache.path());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn fixtures_dir_overrides_bundled_data() {
    let cache = tmp();
    let fixtures = tmp();
    let record = serde_json::json!({
        "data": [{"label": "6.2.a.z", "level": 6, "weight": 2, "char_orbit_index": 1, "dim": 1, "fricke_eigenval": 1, "analytic_rank": 1}]
    });
    std::fs::write(fixtures.path().join("level_6.json"), record.to_string()).unwrap();
    let out = ceresa(&["certify", "6", "--fixtures", fixtures.path().to_str().unwrap()], cache.path());
    assert_eq!(out.status.code(), Some(0));
    let v = assert_valid("certificate", &out);
    assert_eq!(v["clause"], "analytic_witness");
    assert_eq!(v["witnesses"][0]["label"], "6.2.a.z");
}

#[test]
fn config_file_is_read() {
    let cache = tmp();
    let cfg = cache.path().join("ceresa.toml");
    std::fs::write(&cfg, "[geometry]\nenumeration_bound = 200\n").unwrap();
    let out = ceresa(&["--config", cfg.to_str().unwrap(), "genus", "61", "--curve", "xn"], cache.path());
    assert_eq!(out.status.code(), Some(0));
    assert_valid("curve_profile", &out);
    assert_eq!(ceresa(&["genus", "61", "--curve", "xn"], cache.path()).status.code(), Some(1));

    std::fs::write(&cfg, "[newforms]\nbogus = 1\n").unwrap();
    let out = ceresa(&["--config", cfg.to_str().unwrap(), "lattice", "2"], cache.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn text_format_renders_the_same_fields() {
    let cache = tmp();
    let out = ceresa(&["--format", "text", "certify", "74"], cache.path());
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("clause: A1_prime"), "{s}");
    assert!(s.contains("verdict: proven_nontrivial"));
}

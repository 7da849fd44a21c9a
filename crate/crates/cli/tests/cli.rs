use std::path::PathBuf;

use jsonschema::JSONSchema;
use serde_json::Value;

use onerel_cli::{run, Output, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};

fn onerel(args: &[&str]) -> Output {
    run(std::iter::once("onerel").chain(args.iter().copied()))
}

fn schema(name: &str) -> JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../schemas/v1/{name}.schema.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let v: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::compile(&v).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_valid(name: &str, out: &Output) {
    let s = schema(name);
    let v = out.json();
    let msgs: Vec<String> = match s.validate(&v) {
        Ok(()) => vec![],
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    if !msgs.is_empty() {
        panic!("{name} output violates its schema:\n{}\n{}", msgs.join("\n"), out.stdout);
    }
}

fn tmp(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("onerel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn alex_example() {
    let out = onerel(&["alex", "--params", "1,2,a[0]", "--json"]);
    assert_eq!(out.code, EXIT_OK);
    assert_valid("alex", &out);
    let v = out.json();
    assert_eq!(v["poly"], serde_json::json!([[0, 1], [2, 1]]));
    assert_eq!(v["positive_real_roots"], 0);
    assert_eq!(v["descartes_bound"], 0);
    assert_eq!(v["display"], "1 + t^2");
}

#[test]
fn alex_from_relator() {
    let out = onerel(&["alex", "--relator", "a[0] a[1] a[0]^-1 a[1]^-1", "--json"]);
    assert_valid("alex", &out);
    assert_eq!(out.json()["poly"], serde_json::json!([]));
    assert_eq!(out.json()["positive_real_roots"], Value::Null);
    let out = onerel(&["alex", "--relator", "t a t^-1 a^-2", "--json"]);
    assert_eq!(out.json()["poly"], serde_json::json!([[0, 2], [1, -1]]));
    assert_eq!(out.json()["positive_real_roots"], 1);
    assert_eq!(onerel(&["alex", "--relator", "t a"]).code, EXIT_USAGE);
}

#[test]
fn wp_examples() {
    let out = onerel(&["wp", "--params", "1,2,a[0]", "t"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "nontrivial\n");

    let r = onerel(&["relator", "--json"]).json()["gamma_relator"].as_str().unwrap().to_string();
    let out = onerel(&["wp", "--json", &r]);
    assert_eq!(out.code, EXIT_OK);
    assert_valid("wp", &out);
    assert_eq!(out.json()["verdict"], "trivial");

    let out = onerel(&["wp", "--json", "--level", "4", "a[3] a[2] a[4] a[3]^-1 a[4]^-1 a[2]^-1 a[4]^-1 a[2]^-1"]);
    assert_valid("wp", &out);
    assert_eq!(out.json()["verdict"], "trivial");
    assert_eq!(out.json()["level"], 4);

    let out = onerel(&["wp", "--oracle", "klein", "--json", "t a t^-1 a"]);
    assert_valid("wp", &out);
    assert_eq!(out.json()["verdict"], "trivial");
    assert_eq!(out.json()["group"], "klein");
}

#[test]
fn usage_errors() {
    for args in [
        &["wp", "a[0] a[q]"][..],
        &["wp", "--oracle", "nope", "a"],
        &["wp", "--oracle", "klein", "a[0]"],
        &["wp", "--params", "1,2,a[1]^-1", "a"],
        &["frobnicate"],
        &["gts", "--all", "--max-findings", "2"],
        &["syll", "t a"],
        &["biorder", "prove", "--oracle", "h"],
        &["biorder", "check", "/nonexistent/cert.json"],
    ] {
        let out = onerel(args);
        assert_eq!(out.code, EXIT_USAGE, "{args:?}: {out:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = onerel(&["--help"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("biorder"));
}

#[test]
fn rewrite_round_trip() {
    let out = onerel(&["rewrite", "--json", "t a t^-1 a t^2 a t^-1 a^-1 t a^-1 t^-2 a^-1 t^2 a^-1 t^-2 a^-1"]);
    assert_valid("rewrite", &out);
    let v = out.json();
    assert_eq!(v["direction"], "magnus");
    assert_eq!(v["output"], "a[1] a[0] a[2] a[1]^-1 a[2]^-1 a[0]^-1 a[2]^-1 a[0]^-1");
    let back = onerel(&["rewrite", "--json", v["output"].as_str().unwrap()]);
    assert_valid("rewrite", &back);
    assert_eq!(back.json()["direction"], "unrewrite");
    assert_eq!(back.json()["output"], v["input"]);
}

#[test]
fn relator_output() {
    let out = onerel(&["relator", "--params", "2,3,a[0] a[1]", "--j", "2", "--json"]);
    assert_valid("relator", &out);
    let v = out.json();
    assert_eq!(v["s"], 2);
    assert_eq!(v["j"], 2);
    assert!(v["relator"].as_str().unwrap().starts_with("a[4] a[2] a[3] a[5]"));
    let text = onerel(&["relator"]).stdout;
    assert!(text.contains("R_0 = a[1] a[0] a[2] a[1]^-1"));
}

#[test]
fn syll_output() {
    let out = onerel(&["syll", "--json", "--level", "3", "a[1] a[0] a[2] a[3]"]);
    assert_valid("syll", &out);
    assert_eq!(out.json()["verdict"], "nontrivial");
    assert_eq!(out.json()["syllables"].as_array().unwrap().len(), 2);
    let out = onerel(&["syll", "--json", "a[0] a[0]^-1"]);
    assert_valid("syll", &out);
    assert_eq!(out.json()["verdict"], "trivial");
}

#[test]
fn prove_then_check() {
    let path = tmp("gamma.json");
    let out = onerel(&["biorder", "prove", "--json", "--out", &path]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_valid("biorder-prove", &out);
    let v = out.json();
    assert_eq!(v["result"], "certificate");
    let chains: Vec<&str> = v["chains"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert!(chains.contains(&"bacb^-1 < bac < cac < (ac)^2"));
    assert!(chains.contains(&"bacb^-1 < ba < a^2 < (ac)^2"));

    let check = onerel(&["biorder", "check", "--json", &path]);
    assert_eq!(check.code, EXIT_OK);
    assert_valid("biorder-check", &check);
    assert_eq!(check.json()["valid"], true);

    // the bare tree also checks once the presentation is named
    let bare = tmp("gamma-bare.json");
    std::fs::write(&bare, v["certificate"].to_string()).unwrap();
    assert_eq!(onerel(&["biorder", "check", "--oracle", "gamma", &bare]).code, EXIT_OK);
    // against the wrong presentation it is rejected
    let wrong = onerel(&["biorder", "check", "--json", "--oracle", "gamma", "--params", "1,3,a[0]", &bare]);
    assert_eq!(wrong.code, EXIT_USAGE);
    assert_valid("biorder-check", &wrong);
    assert_eq!(wrong.json()["valid"], false);
}

#[test]
fn tampered_certificate_is_rejected() {
    let path = tmp("klein.json");
    let out = onerel(&["biorder", "prove", "--oracle", "klein", "--json", "--out", &path]);
    assert_eq!(out.code, EXIT_OK);
    let mut v = out.json();
    // replace the first relator multiplication's output
    fn tamper(v: &mut Value) -> bool {
        if let Some(steps) = v.get_mut("derivation").and_then(Value::as_array_mut) {
            for s in steps {
                if s["rule"] == "R1" || s["rule"] == "R4" {
                    s["output"] = Value::String("a".into());
                    return true;
                }
            }
            return false;
        }
        if let Some(cases) = v.get_mut("cases") {
            for k in ["pos", "neg", "eq"] {
                if tamper(&mut cases[k]) {
                    return true;
                }
            }
        }
        false
    }
    assert!(tamper(&mut v["certificate"]));
    std::fs::write(&path, v.to_string()).unwrap();
    let check = onerel(&["biorder", "check", "--json", &path]);
    assert_eq!(check.code, EXIT_USAGE);
    assert_eq!(check.json()["valid"], false);
}

#[test]
fn controls_are_inconclusive() {
    for oracle in ["free", "bs"] {
        let out = onerel(&["biorder", "prove", "--oracle", oracle, "--json"]);
        assert_eq!(out.code, EXIT_INCONCLUSIVE, "{oracle}");
        assert_valid("biorder-prove", &out);
        assert_eq!(out.json()["result"], "inconclusive");
        assert!(!out.json()["open"].as_array().unwrap().is_empty());
    }
}

#[test]
fn gts_klein_example() {
    let out = onerel(&["gts", "--oracle", "klein", "--max-factors", "2", "--json"]);
    assert_eq!(out.code, EXIT_OK);
    assert_valid("gts", &out);
    let f = out.json()["findings"].as_array().unwrap().clone();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0]["tau"], "a");
    assert_eq!(f[0]["conjugators"], serde_json::json!(["1", "t"]));
    assert_eq!(f[0]["display"], "τ = a, conjugators (ε, b)");
    let text = onerel(&["gts", "--oracle", "klein", "--max-factors", "2"]).stdout;
    assert!(text.starts_with("τ = a, conjugators (ε, b)\n"));
}

#[test]
fn gts_small_gamma_run() {
    let out = onerel(&["gts", "--json", "--tau-max", "2", "--radius", "1", "--max-factors", "2", "--all"]);
    assert_eq!(out.code, EXIT_OK);
    assert_valid("gts", &out);
    assert!(out.json()["findings"].as_array().unwrap().is_empty());
    let starved = onerel(&["gts", "--json", "--budget", "10", "--all"]);
    assert_eq!(starved.code, EXIT_INCONCLUSIVE);
    assert_eq!(starved.json()["budget_exhausted"], true);
}

#[test]
fn sample_runs() {
    for prop in ["closure", "soundness", "sandwich"] {
        let out = onerel(&["sample", prop, "--count", "20", "--seed", "11", "--json"]);
        assert_eq!(out.code, EXIT_OK, "{prop}: {}", out.stdout);
        assert_valid("sample", &out);
        assert_eq!(out.json()["seed"], 11);
        assert_eq!(out.json()["passed"], 20);
    }
}

#[test]
fn json_is_stable() {
    for args in [
        &["gts", "--oracle", "klein", "--json", "--all", "--tau-max", "2", "--radius", "1", "--max-factors", "2"][..],
        &["biorder", "prove", "--json"],
        &["sample", "soundness", "--count", "30", "--json"],
        &["alex", "--params", "2,2,a[0] a[0] a[1]", "--json"],
    ] {
        let a = onerel(args);
        let b = onerel(args);
        assert_eq!(a, b, "{args:?}");
    }
    let par = onerel(&["gts", "--oracle", "klein", "--json", "--all", "--tau-max", "2", "--radius", "1"]);
    let seq =
        onerel(&["gts", "--oracle", "klein", "--json", "--all", "--tau-max", "2", "--radius", "1", "--sequential"]);
    assert_eq!(par, seq);
}

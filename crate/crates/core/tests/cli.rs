use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(cache: &std::path::Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treechar"))
        .args(args)
        .env("TREECHAR_CACHE", cache)
        .output()
        .unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn schema() -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/record.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Required keys present, no unknown keys, and value types as published.
fn conforms(record: &Value, schema: &Value) -> Result<(), String> {
    let obj = record.as_object().ok_or("not an object")?;
    let props = schema["properties"].as_object().unwrap();
    for k in schema["required"].as_array().unwrap() {
        if !obj.contains_key(k.as_str().unwrap()) {
            return Err(format!("missing {k}"));
        }
    }
    for (k, v) in obj {
        let p = props.get(k).ok_or(format!("unknown key {k}"))?;
        if let Some(allowed) = p.get("enum") {
            if !allowed.as_array().unwrap().contains(v) {
                return Err(format!("{k} = {v} not allowed"));
            }
            continue;
        }
        let types: Vec<&str> = match &p["type"] {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().map(|t| t.as_str().unwrap()).collect(),
            _ => unreachable!(),
        };
        let ok = types.iter().any(|t| match *t {
            "string" => v.is_string(),
            "null" => v.is_null(),
            "integer" => v.is_u64(),
            "number" => v.is_number(),
            "object" => v.is_object(),
            _ => false,
        });
        if !ok {
            return Err(format!("{k} = {v} has the wrong type"));
        }
    }
    Ok(())
}

#[test]
fn documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["chi1", "--group", "basilica", "--word", "a", "--word", "e"]);
    assert!(out.status.success());
    let r = records(&out);
    assert_eq!(r[0]["value"], "1/2");
    assert_eq!(r[1]["value"], "1");
    let out = bin(
        dir.path(),
        &["psi", "--group", "autfin3", "--set", "spine(2,0)", "--word", "h_a", "--level", "2", "--mode", "exact"],
    );
    assert_eq!(records(&out)[0]["value"], "2/3");
}

#[test]
fn every_subcommand_emits_schema_records() {
    let dir = tempfile::tempdir().unwrap();
    let schema = schema();
    let runs: Vec<Vec<&str>> = vec![
        vec!["group", "list"],
        vec!["group", "info", "--group", "hanoi"],
        vec!["chi1", "--group", "overgroup", "--word", "(a d)^2"],
        vec!["chik", "--group", "basilica", "--word", "a", "--k", "2"],
        vec!["fix-symdiff", "--group", "basilica", "--word", "a", "--vertices", "0"],
        vec!["approx-fix", "--group", "basilica", "--vertices", "00,01", "--max-len", "2"],
        vec!["shadow", "--group", "autfin3", "--set", "spine(2,0)", "--level", "2"],
        vec!["dh", "--group", "autfin2", "--set", "cyl(00)", "--other", "cyl(0)", "--level", "3"],
        vec!["psip", "--group", "autfin2", "--set", "cyl(0)", "--word", "b", "--level", "1"],
        vec!["chi-level", "--group", "autfin3", "--set", "spine(2,0)", "--word", "g", "--level", "1"],
        vec![
            "psi", "--group", "autfin2", "--set", "thmb(seq=[2,4];stride=2)", "--word", "t_00000", "--level", "6",
            "--mode", "mc", "--seed", "5", "--samples", "2000",
        ],
        vec!["gram", "--group", "basilica", "--character", "chi1", "--word", "e", "--word", "a", "--word", "b"],
        vec!["central", "--group", "basilica", "--character", "chi1", "--pair", "a,b", "--pair", "a b,b"],
        vec![
            "distinguish", "--group", "autfin2", "--set", "cyl(0)", "--other", "cyl(00)", "--level", "2", "--max-len",
            "1", "--mode", "exact",
        ],
        vec!["rist-growth", "--group", "nonbranch", "--vertex", "0", "--set", "evenzero", "--level", "4", "--max-len", "3"],
        vec!["decomposable", "--group", "nonbranch", "--word", "h1 s", "--level", "4"],
    ];
    for args in runs {
        let out = bin(dir.path(), &args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let rs = records(&out);
        assert!(!rs.is_empty(), "{args:?}");
        for r in rs {
            conforms(&r, &schema).unwrap_or_else(|e| panic!("{args:?}: {e}\n{r}"));
        }
    }
}

#[test]
fn specific_answers() {
    let dir = tempfile::tempdir().unwrap();
    let get = |args: &[&str]| records(&bin(dir.path(), args)).remove(0);
    assert_eq!(get(&["dh", "--group", "autfin2", "--set", "cyl(00)", "--other", "cyl(0)", "--level", "3"])["value"], "1/2");
    assert_eq!(get(&["gram", "--group", "basilica", "--character", "chi1", "--word", "e", "--word", "a"])["detail"]["psd"], true);
    assert_eq!(get(&["central", "--group", "basilica", "--character", "chi1", "--pair", "a,b"])["value"], "true");
    let d = get(&[
        "distinguish", "--group", "autfin2", "--set", "cyl(0)", "--other", "cyl(0)", "--level", "2", "--mode", "exact",
    ]);
    assert_eq!(d["value"], "none-found");
    let r = get(&["rist-growth", "--group", "autfin2", "--vertex", "0", "--set", "cyl(1)", "--level", "3", "--max-len", "2"]);
    assert_eq!(r["detail"]["counts"], serde_json::json!([1, 1]));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "psip", "--group", "autfin2", "--set", "thmb(seq=[2,5];stride=3)", "--word", "t_00000 t_0001", "--level", "6",
        "--mode", "mc", "--seed", "42", "--samples", "3000",
    ];
    let a = bin(dir.path(), &args);
    let b = bin(dir.path(), &[&args[..], &["--threads", "1", "--no-cache"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exported_groups_reproduce_catalog_answers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("basilica", "a b", None),
        ("img-z2-i", "b c", None),
        ("overgroup", "(a d)^2 (a c)^2", None),
        ("hanoi", "(a b)^2", None),
        ("grigorchuk", "a d", Some("thmb(seq=[2,4];stride=2)")),
        ("autfin3", "h_a", Some("spine(2,0)")),
        ("nonbranch", "h1 s", Some("evenzero")),
    ];
    for (name, word, set) in cases {
        let exported = bin(dir.path(), &["group", "export", "--group", name]);
        let file = dir.path().join(format!("{name}.group"));
        std::fs::write(&file, &exported.stdout).unwrap();
        let file = file.to_str().unwrap();
        let (catalog, imported) = match set {
            None => (
                bin(dir.path(), &["chi1", "--group", name, "--word", word, "--format", "plain"]),
                bin(dir.path(), &["chi1", "--group-file", file, "--word", word, "--format", "plain"]),
            ),
            Some(set) => {
                let base = ["chi-level", "--set", set, "--word", word, "--level", "2", "--format", "plain"];
                (
                    bin(dir.path(), &[&base[..], &["--group", name]].concat()),
                    bin(dir.path(), &[&base[..], &["--group-file", file]].concat()),
                )
            }
        };
        assert!(catalog.status.success(), "{name}: {}", String::from_utf8_lossy(&catalog.stderr));
        assert_eq!(catalog.stdout, imported.stdout, "{name}");
    }
}

#[test]
fn exit_codes_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(dir.path(), &["chi1", "--group", "basilica", "--word", "a^"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["chi1", "--group", "nope", "--word", "a"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["shadow", "--group", "autfin2", "--set", "cyl(2)", "--level", "1"]).status.code(), Some(2));
    let overflow = [
        "psi", "--group", "autfin2", "--set", "thmb(seq=[2,4];stride=2)", "--word", "a", "--level", "8", "--mode",
        "exact", "--orbit-cap", "100",
    ];
    assert_eq!(bin(dir.path(), &overflow).status.code(), Some(3));
    let csv = bin(dir.path(), &["chi1", "--group", "basilica", "--word", "a", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    let value = headers.iter().position(|h| h == "value").unwrap();
    assert_eq!(&row[value], "1/2");
}

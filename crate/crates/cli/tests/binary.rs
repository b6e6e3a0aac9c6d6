mod common;

use std::process::Command;

use serde_json::Value;

fn umbral(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_umbral"))
        .args(args)
        .env_remove("UMBRAL_ORDER")
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let doc = serde_json::from_str(if stdout.is_empty() { &stderr } else { &stdout })
        .unwrap_or(Value::Null);
    (out.status.code().unwrap(), doc, stdout)
}

#[test]
fn bell_and_stirling() {
    let (code, doc, _) = umbral(&["bell", "-n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(doc["value"], "52");
    let (_, doc, _) = umbral(&["stirling", "--kind", "first", "-n", "4", "-k", "2"]);
    assert_eq!(doc["value"], "11");
    let (_, doc, _) = umbral(&["bellpoly", "-n", "4", "-k", "2"]);
    assert_eq!(doc["polynomial"], "4*a1*a3 + 3*a2^2");
}

#[test]
fn eval_paper_examples() {
    let (_, doc, _) = umbral(&["eval", "E[(3.u)^2]"]);
    assert_eq!(doc["value"], "9");
    assert_eq!(doc["expr"], "E[(3.u)^2]");
    let (_, doc, _) = umbral(&["eval", "E[bell^3]"]);
    assert_eq!(doc["value"], "5");
    let (_, doc, _) = umbral(&["eval", "E[x.bell]", "-k", "2", "--indet", "x"]);
    assert_eq!(doc["value"], "x^2 + x");
}

#[test]
fn corpus_through_the_binary() {
    let flags = common::workspace_flags();
    for entry in common::CORPUS {
        let mut args: Vec<&str> = vec!["eval", entry.src];
        args.extend(flags.iter().map(String::as_str));
        let (code, doc, _) = umbral(&args);
        assert_eq!(code, 0, "{}: {doc}", entry.src);
        let rendered = doc["expr"].as_str().unwrap();
        let (code, again, _) = umbral(&[&["eval", rendered], &args[2..]].concat());
        assert_eq!(code, 0);
        assert_eq!(again["expr"], rendered);
        assert_eq!(again["value"], doc["value"]);
    }
}

#[test]
fn invert_tree_function() {
    let (code, doc, _) = umbral(&["invert", "--series", "t*exp(-t)", "--order", "6"]);
    assert_eq!(code, 0);
    let moments: Vec<&str> = doc["gamma_moments_umbral"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m.as_str().unwrap())
        .collect();
    assert_eq!(moments, ["1", "1", "2", "9", "64", "625", "7776"]);
    assert_eq!(doc["chi_is_identity"], true);
}

#[test]
fn errors_are_structured() {
    let (code, doc, _) = umbral(&["eval", "E[(a + ]"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["kind"], "SyntaxError");
    assert!(doc["error"]["message"].as_str().unwrap().contains("byte 7"));
    let (code, doc, _) = umbral(&["eval", "E[zeta]"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["kind"], "UnknownAtom");
    let (code, _, _) = umbral(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, doc, _) = umbral(&["check", "no_such_identity"]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["kind"], "UnknownIdentity");
}

#[test]
fn order_flag_beats_environment() {
    let run = |env: &str, args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_umbral"))
            .args(args)
            .env("UMBRAL_ORDER", env)
            .output()
            .unwrap();
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    assert_eq!(run("3", &["gf", "bell"])["order"], 3);
    assert_eq!(run("3", &["gf", "bell", "--order", "5"])["order"], 5);
}

#[test]
fn define_persists_to_the_workspace_file() {
    let dir = std::env::temp_dir().join(format!("umbral-define-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("ws.json");
    let path = file.to_str().unwrap();
    let (code, _, _) = umbral(&["define", "a", "--moments", "1,1,2,5", "--order", "3", "--workspace", path]);
    assert_eq!(code, 0);
    let (code, doc, _) = umbral(&["eval", "E[a + a']", "-k", "2", "--workspace", path]);
    assert_eq!(code, 0);
    assert_eq!(doc["value"], "6");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_and_mc_are_deterministic() {
    let (code, _, first) = umbral(&["check", "thm2_bell_recursion", "--seed", "3"]);
    assert_eq!(code, 0);
    let (_, _, second) = umbral(&["check", "thm2_bell_recursion", "--seed", "3"]);
    assert_eq!(first, second);
    let args = ["mc", "--model", "compound", "--lambda", "1", "--jumps", "1:1/2,2:1/2", "--n", "20000"];
    let (code, doc, first) = umbral(&args);
    assert_eq!(code, 0);
    assert_eq!(doc["model"], "compound(1, {1:1/2,2:1/2})");
    let (_, _, second) = umbral(&args);
    assert_eq!(first, second);
}

#[test]
fn text_format_is_aligned() {
    let out = Command::new(env!("CARGO_BIN_EXE_umbral"))
        .args(["bell", "-n", "5", "--format", "text"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n      5\nvalue  52\n");
}

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{data, running_net};
use spreadnet::io::{LabeledNetFile, NetFile, SpreadFile};
use spreadnet::modes::{spread_with_mode, ModeKind};
use spreadnet::oracle::{isomorphic, unfold_bp_oracle};
use tempfile::TempDir;

fn spreadnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spreadnet"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_str(name: &str) -> String {
    data(name).to_str().unwrap().to_owned()
}

#[test]
fn validate_running_net() {
    let out = spreadnet(&["validate", "--net", &data_str("running-net.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("2 components"));
}

#[test]
fn validate_unbalanced_net() {
    let dir = TempDir::new().unwrap();
    let mut file = NetFile::from_mcnet(&running_net());
    file.places
        .iter_mut()
        .find(|p| p.id == "b")
        .unwrap()
        .component = "d".into();
    let net = dir.path().join("bad.json");
    std::fs::write(&net, serde_json::to_string(&file).unwrap()).unwrap();
    let out = spreadnet(&["validate", "--net", path(&net)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_input_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let net = dir.path().join("broken.json");
    std::fs::write(&net, "{\"places\": [").unwrap();
    assert_eq!(
        spreadnet(&["validate", "--net", path(&net)]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        spreadnet(&["validate", "--net", path(&missing)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(spreadnet(&["validate"]).status.code(), Some(2));
}

#[test]
fn spread_running_example() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("spread.json");
    let dot = dir.path().join("spread.dot");
    let res = spreadnet(&[
        "spread",
        "--net",
        &data_str("running-net.json"),
        "--mode",
        &data_str("running-custom-mode.json"),
        "--out",
        path(&out),
        "--dot",
        path(&dot),
        "--require-saturation",
    ]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let file: SpreadFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file.places.len(), 10);
    assert_eq!(file.transitions.len(), 10);
    assert!(file.saturated);
    let refilled = file.places.iter().find(|p| p.id == "d(su,ε)").unwrap();
    assert_eq!(refilled.clock, ["su", ""]);
    let dot = std::fs::read_to_string(&dot).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 28);
}

#[test]
fn unsaturated_spreading_exit_code() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bp.json");
    let args = [
        "spread",
        "--net",
        &data_str("running-net.json"),
        "--mode",
        &data_str("bp-mode.json"),
        "--out",
        path(&out),
    ];
    assert_eq!(spreadnet(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--require-saturation");
    assert_eq!(spreadnet(&strict).status.code(), Some(3));
    let file: SpreadFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!file.saturated);
    assert_eq!(file.places.len(), 16);
}

#[test]
fn compare_against_bp() {
    let res = spreadnet(&[
        "compare",
        "--net",
        &data_str("running-net.json"),
        "--mode",
        &data_str("bp-mode.json"),
        "--against",
        "bp",
        "--depth",
        "3",
    ]);
    assert_eq!(res.status.code(), Some(0));
    let witness: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(witness["places"].as_object().unwrap().len(), 16);
    assert_eq!(witness["transitions"].as_object().unwrap().len(), 10);
}

#[test]
fn compare_against_trellis() {
    let res = spreadnet(&[
        "compare",
        "--net",
        &data_str("running-net.json"),
        "--mode",
        &data_str("trellis-mode.json"),
        "--against",
        "trellis",
        "--depth",
        "5",
    ]);
    assert_eq!(res.status.code(), Some(0));
}

#[test]
fn compare_reports_mismatch() {
    let res = spreadnet(&[
        "compare",
        "--net",
        &data_str("running-net.json"),
        "--mode",
        &data_str("running-custom-mode.json"),
        "--against",
        "bp",
        "--depth",
        "3",
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stdout).starts_with("not isomorphic"));
}

#[test]
fn compare_agrees_with_library() {
    let mc = running_net();
    for depth in 1..=4 {
        let s = spread_with_mode(&mc, &common::mode(ModeKind::Bp, depth)).unwrap();
        let expected = isomorphic(s.net.mc.net(), &unfold_bp_oracle(&mc, depth).unwrap()).is_some();
        for against in ["bp", "trellis"] {
            let res = spreadnet(&[
                "compare",
                "--net",
                &data_str("running-net.json"),
                "--mode",
                &data_str("bp-mode.json"),
                "--against",
                against,
                "--depth",
                &depth.to_string(),
            ]);
            let lib = if against == "bp" {
                expected
            } else {
                let t = spreadnet::oracle::trellis_oracle(&mc, depth).unwrap();
                isomorphic(s.net.mc.net(), &t).is_some()
            };
            assert_eq!(
                res.status.code() == Some(0),
                lib,
                "depth {depth} against {against}"
            );
        }
    }
}

#[test]
fn oracle_outputs() {
    let dir = TempDir::new().unwrap();
    let bp = dir.path().join("bp.json");
    let tr = dir.path().join("trellis.json");
    let net = data_str("running-net.json");
    assert_eq!(
        spreadnet(&[
            "unfold-bp",
            "--net",
            &net,
            "--depth",
            "2",
            "--out",
            path(&bp)
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        spreadnet(&[
            "trellis",
            "--net",
            &net,
            "--height",
            "2",
            "--out",
            path(&tr)
        ])
        .status
        .code(),
        Some(0)
    );
    let bp: LabeledNetFile = serde_json::from_str(&std::fs::read_to_string(&bp).unwrap()).unwrap();
    let expected = unfold_bp_oracle(&running_net(), 2).unwrap();
    assert_eq!(bp.to_net().unwrap(), expected);
    let tr: LabeledNetFile = serde_json::from_str(&std::fs::read_to_string(&tr).unwrap()).unwrap();
    assert!(tr.to_net().is_ok());
}

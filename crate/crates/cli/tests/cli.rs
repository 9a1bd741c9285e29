use std::process::Command;

use contexta_cli::input::CoverFile;
use contexta_cli::run_args;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contexta"))
}

fn result(args: &[&str]) -> Value {
    let mut argv = vec!["contexta"];
    argv.extend_from_slice(args);
    run_args(argv).unwrap().result
}

#[test]
fn full_qutrit_cover_has_81_sections() {
    let r = result(&["analyze-cover", "full:3:1"]);
    assert_eq!(r["sections"], "81");
    assert_eq!(r["beta_coboundary"], true);
    assert_eq!(r["nosignaling_dimension"], 9);
}

#[test]
fn maximally_mixed_qutrit_is_noncontextual_with_flat_wigner() {
    let r = result(&["analyze-state", "maximally-mixed", "full:3:1"]);
    assert_eq!(r["verdict"]["kind"], "noncontextual");
    assert_eq!(r["verdict"]["witness"]["total_weight"], "1");
    let min = r["wigner"]["min"].as_f64().unwrap();
    assert!((min - 1.0 / 9.0).abs() < 1e-12);
    assert_eq!(r["wigner_cross_check"]["agree"], true);
}

#[test]
fn basis_state_has_a_deterministic_witness() {
    let r = result(&["analyze-state", "basis:0", "full:2:1"]);
    assert_eq!(r["verdict"]["kind"], "noncontextual");
    assert_eq!(r["verdict"]["witness"]["total_weight"], "1");
    assert_eq!(r["verdict"]["sections"], "8");
}

#[test]
fn ghz_on_the_star_and_on_its_first_four_contexts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star4.json");
    std::fs::write(&path, r#"{"name": "mermin-star", "omit": [5]}"#).unwrap();
    let r = result(&["analyze-state", "ghz", path.to_str().unwrap()]);
    assert_eq!(r["verdict"]["kind"], "contextual");
    assert!(r["verdict"]["certificate"]["value_on_model"].as_str().unwrap().starts_with('-'));
    // Adding I5 back removes every global section.
    let r = result(&["analyze-state", "ghz", "mermin-star"]);
    assert_eq!(r["verdict"]["kind"], "strongly_contextual");
}

#[test]
fn explicit_and_symbolic_contexts_agree() {
    let a = result(&["inequality", "ghz", "mermin-star", "--context", "5"]);
    let b = result(&["inequality", "ghz", "mermin-star", "--context", "x1+x2+x3,y1+y2+x3,x1+y2+y3"]);
    assert_eq!(a["bound"], b["bound"]);
    assert_eq!(a["ev_exact"], b["ev_exact"]);
    assert_eq!(a["terms"].as_array().unwrap().len(), 4);
}

#[test]
fn state_files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let named = dir.path().join("bell.json");
    std::fs::write(&named, r#"{"kind": "named", "name": "bell", "p": 2, "n": 2}"#).unwrap();
    let matrix = dir.path().join("m.json");
    std::fs::write(
        &matrix,
        r#"{"kind": "matrix", "p": 2, "n": 2,
            "real": [[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]],
            "imag": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    for path in [&named, &matrix] {
        let r = result(&["inequality", path.to_str().unwrap(), "mermin-square", "--context", "2"]);
        assert_eq!(r["ev_exact"], "1");
        assert_eq!(r["violated"], true);
    }
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("r{k}.json"));
        let status = bin()
            .args(["--seed", "11", "analyze-state", "random", "full:3:1", "--json"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(v["schema"], "contexta/1");
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn exit_codes() {
    let ok = bin().args(["analyze-cover", "mermin-square"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"p": 2, "n": 2, "contexts": [[[1, 0, 0]]]}"#).unwrap();
    let out = bin().arg("analyze-cover").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("length 3"));

    let out = bin().args(["topology", "full:7:2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin().args(["inequality", "maximally-mixed", "mermin-star", "--context", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emitted_cover_files_reload_identically() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["mermin-square", "mermin-star"] {
        let loaded = contexta_cli::input::load_cover(name).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        let file = CoverFile::explicit(loaded.cfg, &loaded.generators);
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        let again = contexta_cli::input::load_cover(path.to_str().unwrap()).unwrap();
        assert_eq!(again.cover, loaded.cover);
        let a = result(&["analyze-cover", name]);
        let b = result(&["analyze-cover", path.to_str().unwrap()]);
        assert_eq!(a["sections"], b["sections"]);
        assert_eq!(a["homology"], b["homology"]);
    }
}

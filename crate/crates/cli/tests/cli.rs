use std::path::{Path, PathBuf};
use std::process::Command;

use fusionwb::corpus::corrupt_table;
use fusionwb::files::{self, MemorySource};
use fusionwb_cli::{run, run_with_threads, Status};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

fn arg(name: &str) -> String {
    corpus().join(name).display().to_string()
}

#[test]
fn transporter_system_saturates() {
    let r = run(["fusion", "saturate", "--group", &arg("s4.grp"), "--prime", "2"]);
    assert_eq!(r.status, Status::Ok);
    assert!(r.render().contains("\nsaturated\n"));
}

#[test]
fn non_saturated_system_exits_one_with_witness() {
    let r = run(["fusion", "saturate", "--fusion", &arg("v4_inv.fus")]);
    assert_eq!(r.exit_code(), 1);
    assert_eq!(r.witnesses, ["SylowFailure P=[0,1,2,3] |Aut_S(P)|=1 |Aut_F(P)|=2"]);
}

#[test]
fn poincare_in_degree_zero_is_one() {
    let r = run(["--format", "json", "stable", "poincare", "--fusion", &arg("c3_inv.fus"), "--max-degree", "0"]);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.results["dimensions"], serde_json::json!([1]));
    let parsed: serde_json::Value = serde_json::from_str(&r.render()).unwrap();
    assert_eq!(parsed["status"], "ok");
}

#[test]
fn hnn_then_verify_lists_inversion() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c3.pres");
    let r = run(["model", "hnn", &arg("c3_inv.fus")]);
    assert_eq!(r.status, Status::Ok);
    let text = r.lines.join("");
    std::fs::write(&out, &text).unwrap();
    let parsed = fusionwb::models::Presentation::parse("c3.pres", &std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed.generators(), ["s1", "s2", "t1"]);
    let v = run(["model", "verify", "--radius", "2", "--fusion", &arg("c3_inv.fus")]);
    assert_eq!(v.status, Status::Ok);
    assert!(v.render().contains("recovered Aut(S): [0,1,2] [0,2,1]"), "{}", v.render());
}

#[test]
fn small_radius_is_a_proper_subsystem() {
    let r = run(["model", "verify", "--radius", "0", "--fusion", &arg("c3_inv.fus")]);
    assert_eq!(r.status, Status::Failure);
}

#[test]
fn amalgam_verifies_at_radius_three() {
    let r = run(["model", "verify", "--radius", "3", "--datum", &arg("d8_s4.datum")]);
    assert_eq!(r.status, Status::Ok, "{}", r.render());
    assert_eq!(r.results["equal"], true);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(["frobnicate"]).exit_code(), 2);
    assert_eq!(run(["stable", "poincare", "--fusion", "/nonexistent.fus"]).exit_code(), 2);
    assert_eq!(run(["model", "verify", "--radius", "9", "--fusion", &arg("c3_inv.fus")]).exit_code(), 2);
    assert_eq!(run(["fusion", "saturate", "--group", &arg("s4.grp"), "--prime", "4"]).exit_code(), 2);
    assert_eq!(run(["--help"]).exit_code(), 0);
}

#[test]
fn quillen_compare_agrees_for_s4() {
    let r = run(["stable", "compare", "--group", &arg("s4.grp"), "--prime", "2", "--max-degree", "6"]);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.results["quillen"], r.results["fusion"]);
}

#[test]
fn corpus_reports_are_identical_across_thread_counts() {
    let a = run_with_threads(["corpus", "check"], Some("1"));
    let b = run_with_threads(["corpus", "check"], Some("4"));
    assert_eq!(a.status, Status::Ok, "{}", a.render());
    assert_eq!(a.render(), b.render());
}

#[test]
fn exported_corpus_with_corrupted_d8_fails() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    assert_eq!(run(["corpus", "export", &d]).status, Status::Ok);
    assert_eq!(run(["corpus", "check", "--dir", &d]).status, Status::Ok);

    let src = MemorySource::new([("d8.grp".to_string(), std::fs::read_to_string(dir.path().join("d8.grp")).unwrap())]);
    let d8 = files::load_group(&src, "d8.grp").unwrap();
    let rows = corrupt_table(&d8).unwrap();
    let mut text = String::from("group D8 order 8\nmode table\n");
    for r in rows {
        text += &r.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        text.push('\n');
    }
    std::fs::write(dir.path().join("d8.grp"), text).unwrap();
    let r = run(["corpus", "check", "--dir", &d]);
    assert_eq!(r.status, Status::Failure);
    let w = r.witnesses.iter().find(|w| w.starts_with("group d8.grp")).expect("d8 witness");
    assert!(w.contains("not associative"), "{w}");
}

#[test]
fn missing_manifest_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(["corpus", "check", "--dir", &dir.path().display().to_string()]);
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn binary_exit_codes_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let bin = env!("CARGO_BIN_EXE_fusionwb");
    let ok = Command::new(bin)
        .args(["fusion", "saturate", "--group", &arg("a4.grp"), "--prime", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), ok.stdout);
    let bad = Command::new(bin).args(["fusion", "saturate", "--fusion", &arg("v4_gl2.fus")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let usage = Command::new(bin).arg("group").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

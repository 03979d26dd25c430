use std::path::Path;
use std::process::{Command, Output};

use bpwa::report::{build_design_map, compatible, Region, RunConfig};
use bpwa::simulator::MotionLabel;

fn bpwa(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpwa"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .env_remove("BPWA_THREADS")
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

const FAST: &[&str] = &["--set", "steps_per_period=64", "--set", "discard=20", "--set", "window=128"];

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["kernel", "--t-end", "5", "--dt", "0.05"], "kernel.csv"),
        (vec!["--omega", "0.5..1.5:0.1", "branches"], "branches.csv"),
        (vec!["--omega", "0.3..1.6:0.05", "--amp", "0.1", "loci"], "loci.csv"),
        (vec!["--omega", "1.3..1.5:0.1", "sweep"], "strobe.csv"),
    ];
    for (args, file) in cases {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let mut full = args.clone();
        full.extend_from_slice(FAST);
        for d in [&a, &b] {
            let o = bpwa(d.path(), &full);
            assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(read(a.path(), file), read(b.path(), file), "{file}");
    }
}

#[test]
fn csv_headers() {
    let d = tempfile::tempdir().unwrap();
    assert!(bpwa(d.path(), &["kernel", "--t-end", "1", "--dt", "0.5"]).status.success());
    let kernel = String::from_utf8(read(d.path(), "kernel.csv")).unwrap();
    assert!(kernel.starts_with("t,hbar\n"));
    assert_eq!(kernel.lines().count(), 4);

    assert!(bpwa(d.path(), &["--omega", "0.8..0.9:0.1", "loci"]).status.success());
    let loci = String::from_utf8(read(d.path(), "loci.csv")).unwrap();
    assert!(loci.starts_with("kind,Omega_b,A_over_R,a_b,residual\n"));

    assert!(bpwa(d.path(), &["--omega", "1.5", "branches"]).status.success());
    let br = String::from_utf8(read(d.path(), "branches.csv")).unwrap();
    assert!(br.starts_with("Omega,a0,psi0,branch,stable,P_avg,CWR\n"));

    let mut args = vec!["--omega", "1.5", "sweep", "--trajectory"];
    args.extend_from_slice(FAST);
    assert!(bpwa(d.path(), &args).status.success());
    assert!(String::from_utf8(read(d.path(), "strobe.csv")).unwrap().starts_with("Omega,Y_strobe\n"));
    assert!(String::from_utf8(read(d.path(), "trajectory.csv")).unwrap().starts_with("t,Y,Ydot,v\n"));
}

#[test]
fn manifest_records_the_run() {
    let d = tempfile::tempdir().unwrap();
    assert!(bpwa(d.path(), &["--gamma", "30", "--omega", "1.0", "branches"]).status.success());
    let m: serde_json::Value = serde_json::from_slice(&read(d.path(), "manifest.json")).unwrap();
    let cfg = RunConfig::with(&[("gamma", "30"), ("omega", "1.0")]).unwrap();
    assert_eq!(m["config_hash"], cfg.hash());
    assert_eq!(m["command"], "branches");
    assert!(m["versions"]["bpwa"].is_string());
    assert!(m["timings"].as_object().unwrap().values().all(|v| v.as_f64().unwrap() >= 0.0));
    assert!(m["artifacts"].as_array().unwrap().iter().any(|a| a == "branches.csv"));
}

#[test]
fn config_file_and_overrides() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\ngamma = 30\nomega = 1.0\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    assert!(bpwa(d.path(), &["--config", cfg_s, "branches"]).status.success());
    let from_file = read(d.path(), "manifest.json");
    assert!(bpwa(d.path(), &["--config", cfg_s, "--set", "gamma=90", "branches"]).status.success());
    let over: serde_json::Value = serde_json::from_slice(&read(d.path(), "manifest.json")).unwrap();
    let base: serde_json::Value = serde_json::from_slice(&from_file).unwrap();
    assert_eq!(base["config"]["gamma"], "30");
    assert_eq!(over["config"]["gamma"], "90");
}

#[test]
fn era_writes_a_realization() {
    let d = tempfile::tempdir().unwrap();
    assert!(bpwa(d.path(), &["era"]).status.success());
    let r: serde_json::Value = serde_json::from_slice(&read(d.path(), "realization.json")).unwrap();
    let n = r["order"].as_u64().unwrap() as usize;
    assert_eq!(r["A"].as_array().unwrap().len(), n);
    assert_eq!(r["B"].as_array().unwrap().len(), n);
    assert!(r["C"].is_array());
    assert!(r["dt"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bpwa(d.path(), args).status.code().unwrap();
    assert_eq!(code(&["kernel", "--t-end", "1", "--dt", "0.5"]), 0);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["kernel", "--bogus"]), 2);
    assert_eq!(code(&["--set", "gama=3", "kernel"]), 2);
    assert_eq!(code(&["--amp", "0..0.2:0.1", "--omega", "1", "sweep"]), 2);
    assert_eq!(code(&["--gamma", "-1", "branches"]), 2);
    assert_eq!(code(&["era", "--order", "40"]), 1);
    let threads = Command::new(env!("CARGO_BIN_EXE_bpwa"))
        .args(["--out", d.path().to_str().unwrap(), "kernel"])
        .env("BPWA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        let d = tempfile::tempdir().unwrap();
        let mut args = vec!["--out", d.path().to_str().unwrap(), "--omega", "1.3..1.6:0.1", "sweep"];
        args.extend_from_slice(FAST);
        let o = Command::new(env!("CARGO_BIN_EXE_bpwa")).args(&args).env("BPWA_THREADS", threads).output().unwrap();
        assert!(o.status.success());
        read(d.path(), "strobe.csv")
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn unforced_design_row_is_all_wells() {
    let cfg = RunConfig::with(&[("amp", "0"), ("omega", "0.4..1.6:0.2")]).unwrap();
    let map = build_design_map(&cfg).unwrap();
    assert_eq!(map.cells.len(), 1);
    assert_eq!(map.cells[0].len(), 7);
    assert!(map.cells[0].iter().all(|c| c.region == Some(Region::Br)), "{:?}", map.cells);
    let mut buf = Vec::new();
    map.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("A_over_R,Omega,region,numeric\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",B_r,")));
}

#[test]
fn region_compatibility() {
    assert!(compatible(Region::Br, MotionLabel::P1Intra));
    assert!(!compatible(Region::Br, MotionLabel::Chaotic));
    assert!(compatible(Region::BL, MotionLabel::P1InterSymmetric));
    assert!(!compatible(Region::BL, MotionLabel::P1Intra));
    assert!(compatible(Region::CH, MotionLabel::Periodic(3)));
    assert!(compatible(Region::BLCH, MotionLabel::P1InterSymmetric));
    assert!(compatible(Region::CHBLBn, MotionLabel::P1Intra));
    assert!(compatible(Region::NTCH, MotionLabel::P1InterAsymmetric));
    assert!(!compatible(Region::NTCH, MotionLabel::P1Intra));
}

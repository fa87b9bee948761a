use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use wavedense::boxcalc::{BoxSet, Cuboid};
use wavedense::freqfn::{FreqFn, GridFn, StepFn};
use wavedense::rational::{frac, int};
use wavedense::Rat;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavedense"))
        .current_dir(dir)
        .args(args)
        .env_remove("WAVEDENSE_SEED")
        .env_remove("WAVEDENSE_TOL")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn indicator(lo: Rat, hi: Rat, v: f64) -> FreqFn {
    let set = BoxSet::from_box(Cuboid::interval(lo, hi).unwrap());
    FreqFn::Step(StepFn::indicator(&set, Complex64::new(v, 0.0)))
}

fn gaussian(cells: usize) -> FreqFn {
    let dom = Cuboid::interval(int(-8), int(8)).unwrap();
    let g = FreqFn::Grid(GridFn::sample(dom, vec![cells], |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap());
    g.scale(1.0 / g.l2_norm())
}

fn put(dir: &Path, name: &str, f: &FreqFn) {
    std::fs::write(dir.join(name), serde_json::to_string_pretty(f).unwrap()).unwrap();
}

#[test]
fn convergence_table_has_eight_decreasing_rows() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "box.json", &indicator(int(0), frac(13, 10), 1.0));
    let o = run(dir.path(), &["grammian-converge", "--input", "box.json", "--p", "1", "--b-sequence", "dyadic:8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let errors: Vec<f64> = r.records().map(|rec| rec.unwrap()[4].parse().unwrap()).collect();
    // |I| − |det b| n_i counted by hand for I = [0, 13/10)
    let by_hand = [0.24, 0.08, 0.06, 0.02, 0.015, 0.005, 0.00375, 0.00125];
    assert_eq!(errors.len(), 8);
    for (e, h) in errors.iter().zip(by_hand) {
        assert!((e - h).abs() < 1e-12, "{e} vs {h}");
    }
}

#[test]
fn increasing_errors_fail_the_check_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "box.json", &indicator(int(0), frac(13, 10), 1.0));
    let o = run(
        dir.path(),
        &["grammian-converge", "--input", "box.json", "--p", "1", "--b-sequence", "1/3,1/4", "--out", "t.csv"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lp error decreasing"), "{}", stderr(&o));
    assert!(dir.path().join("t.csv").exists());
}

#[test]
fn riesz_bundle_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "g.json", &gaussian(1024));
    let o = run(
        dir.path(),
        &["construct-riesz", "--input", "g.json", "--epsilon", "0.5", "--out", "psi.json", "--bundle", "b.json", "--report", "r.json"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(dir.path(), &["verify", "--bundle", "b.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let mut b: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("b.json")).unwrap()).unwrap();
    b["u"]["boxes"].as_array_mut().unwrap().pop();
    std::fs::write(dir.path().join("bad.json"), b.to_string()).unwrap();
    let o = run(dir.path(), &["verify", "--bundle", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("check failed"));

    let spec: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("psi.json")).unwrap()).unwrap();
    assert!(spec.get("generator").is_some() && spec.get("dilation").is_some());
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.json"), "{\n  \"dim\": 1,\n  \"r\": ]\n}").unwrap();
    let o = run(dir.path(), &["verify", "--bundle", "b.json"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("b.json") && e.contains("line 3") && e.contains("column"), "{e}");
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "box.json", &indicator(int(0), int(1), 1.0));
    assert_eq!(run(dir.path(), &["verify", "--bundle", "missing.json"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["construct-frame", "--input", "box.json", "--epsilon", "0"]).status.code(), Some(1));
    let o = run(dir.path(), &["construct-ortho", "--input", "box.json", "--epsilon", "0.2", "--out", "nowhere/psi.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(1));
}

#[test]
fn hypothesis_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "two.json", &indicator(int(0), int(1), 2.0));
    let o = run(dir.path(), &["construct-ortho", "--input", "two.json", "--epsilon", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unit"), "{}", stderr(&o));
    let o = run(dir.path(), &["construct-frame", "--input", "two.json", "--epsilon", "0.2", "--dilation", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn demos_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "band.json", &indicator(int(1), int(3), 0.5f64.sqrt()));
    put(dir.path(), "low.json", &indicator(int(0), frac(1, 2), 2f64.sqrt()));
    let o = run(dir.path(), &["demo-nondensity", "--mode", "dilation", "--input", "band.json", "--report", "d.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("d.json")).unwrap()).unwrap();
    assert!((r["quantities"]["pairing"].as_f64().unwrap() - 1.0 / 8f64.sqrt()).abs() < 1e-12);
    let o = run(dir.path(), &["demo-nondensity", "--mode", "lattice", "--input", "low.json", "--b", "1"]);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["quantities"]["lower_bound"].as_f64().unwrap() - (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-12);
}

#[test]
fn frame_reports_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "g.json", &gaussian(1024));
    let args = |r: &'static str, t: &'static str| {
        ["--threads", t, "--seed", "7", "construct-frame", "--input", "g.json", "--epsilon", "0.1", "--tests", "6", "--report", r]
    };
    for (r, t) in [("a.json", "1"), ("b.json", "4"), ("c.json", "0")] {
        let o = run(dir.path(), &args(r, t));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.json"), read("c.json"));
}

#[test]
fn slices_cover_the_window() {
    let dir = tempfile::tempdir().unwrap();
    put(dir.path(), "band.json", &indicator(int(1), int(3), 0.5));
    let o = run(dir.path(), &["slice", "--input", "band.json", "--out", "s.csv", "--samples", "8", "--window", "0,4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("s.csv")).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["w", "re", "im", "abs"]);
    let abs: Vec<f64> = r.records().map(|x| x.unwrap()[3].parse().unwrap()).collect();
    assert_eq!(abs, [0.0, 0.0, 0.5, 0.5, 0.5, 0.5, 0.0, 0.0]);
}

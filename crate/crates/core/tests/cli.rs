//! End-to-end runs of the `qrw` command line, in process.

use std::fs;
use std::path::PathBuf;

use qrw::cli::run;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("qrw-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn qrw(args: &[&str]) -> i32 {
    run(std::iter::once("qrw").chain(args.iter().copied()))
}

fn s(p: &std::path::Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn simulate_is_deterministic_and_well_formed() {
    let d = scratch("simulate");
    let (a, b) = (d.join("a.csv"), d.join("b.csv"));
    for out in [&a, &b] {
        assert_eq!(qrw(&["simulate", "--fixture", "running", "--n", "30", "--mode", "exact", "--exact-columns", "--out", &s(out)]), 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# spec_id="));
    assert_eq!(lines.next().unwrap(), "r1,j,re,im,prob,re_exact,im_exact");
    let total: f64 = lines.map(|l| l.split(',').nth(4).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-13);
}

#[test]
fn kernel_and_peak_artifacts_round_trip() {
    let d = scratch("kernel");
    let k = d.join("kernel.json");
    assert_eq!(qrw(&["kernel", "--fixture", "running", "--out", &s(&k)]), 0);
    let text = fs::read_to_string(&k).unwrap();
    let b = qrw::kernel::KernelBundle::from_json(&text).unwrap();
    assert_eq!(b.to_json() + "\n", text);
    let p = d.join("peaks.json");
    assert_eq!(qrw(&["peaks1d", "--kernel", &s(&k), "--out", &s(&p)]), 0);
    let text = fs::read_to_string(&p).unwrap();
    let rep = qrw::pipelines::PeakReport::from_json(&text).unwrap();
    assert_eq!(rep.to_json() + "\n", text);
    assert_eq!(rep.peaks.len(), 6);
}

#[test]
fn validate_reports_the_offending_entry() {
    let d = scratch("validate");
    let spec = d.join("bad.json");
    let good = qrw::fixtures::cayley2().to_json();
    // Perturb one coin entry: 3/5 becomes 4/5.
    let bad = good.replacen("\"3\"", "\"4\"", 1);
    assert_ne!(bad, good);
    fs::write(&spec, bad).unwrap();
    assert_eq!(qrw(&["validate", "--spec", &s(&spec)]), 1);
    assert_eq!(qrw(&["validate", "--fixture", "running"]), 0);
    assert_eq!(qrw(&["validate", "--fixture", "nope"]), 1);
}

#[test]
fn overlay_checks_spec_ids_and_passes_empty_peaks_through() {
    let d = scratch("overlay");
    let (prof, peaks, other) = (d.join("p.csv"), d.join("peaks.json"), d.join("other.csv"));
    assert_eq!(qrw(&["simulate", "--fixture", "running", "--n", "50", "--j", "1", "--out", &s(&prof)]), 0);
    assert_eq!(qrw(&["peaks1d", "--fixture", "running", "--out", &s(&peaks)]), 0);
    let joined = d.join("o.csv");
    assert_eq!(qrw(&["overlay", "--profile", &s(&prof), "--peaks", &s(&peaks), "--out", &s(&joined)]), 0);
    let text = fs::read_to_string(&joined).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(",1")).count(), 6);

    assert_eq!(qrw(&["simulate", "--fixture", "cayley2", "--n", "50", "--out", &s(&other)]), 0);
    assert_eq!(qrw(&["overlay", "--profile", &s(&other), "--peaks", &s(&peaks)]), 1);

    let mut rep = qrw::pipelines::PeakReport::from_json(&fs::read_to_string(&peaks).unwrap()).unwrap();
    rep.peaks.clear();
    let empty = d.join("empty.json");
    fs::write(&empty, rep.to_json()).unwrap();
    let same = d.join("same.csv");
    assert_eq!(qrw(&["overlay", "--profile", &s(&prof), "--peaks", &s(&empty), "--out", &s(&same)]), 0);
    assert_eq!(fs::read_to_string(&same).unwrap(), fs::read_to_string(&prof).unwrap());
}

#[test]
fn boundary_resumes_from_stages_and_reports_exhaustion() {
    let d = scratch("boundary");
    let stages = d.join("stages");
    let out = d.join("b.json");
    let args = ["boundary2d", "--fixture", "toy2d", "--filter-grid", "0", "--stage-dir", &s(&stages), "--out", &s(&out)];
    assert_eq!(qrw(&args), 0);
    let first = fs::read_to_string(&out).unwrap();
    let mut again = args.to_vec();
    again.push("--resume");
    assert_eq!(qrw(&again), 0);
    let report: qrw::cli::BoundaryReport = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.curve.stages.iter().all(|st| st.resumed));
    assert!(report.curve.candidate.is_some());
    assert!(!first.is_empty());
    // A tiny degree cap stops the tower: exit code 2 with the partial report.
    let capped = d.join("capped.json");
    assert_eq!(
        qrw(&["boundary2d", "--fixture", "toy2d", "--filter-grid", "0", "--max-degree", "12", "--out", &s(&capped)]),
        2
    );
    let report: qrw::cli::BoundaryReport = serde_json::from_str(&fs::read_to_string(&capped).unwrap()).unwrap();
    assert!(report.downgrade.is_some());
    assert!(report.soundness.iter().all(|(_, r)| *r <= 1e-6));
}

#[test]
fn cayley_output_is_seeded() {
    let d = scratch("cayley");
    let (a, b, c) = (d.join("a.json"), d.join("b.json"), d.join("c.json"));
    for (out, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        assert_eq!(qrw(&["--seed", seed, "cayley", "--k", "3", "--steps", "0;1;-1", "--out", &s(out)]), 0);
    }
    let read = |p: &PathBuf| fs::read_to_string(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(qrw(&["validate", "--spec", &s(&a)]), 0);
}

#[test]
fn bad_arguments_are_configuration_errors() {
    assert_eq!(qrw(&["simulate", "--fixture", "running", "--n", "5", "--mode", "fast"]), 1);
    assert_eq!(qrw(&["simulate", "--fixture", "running", "--n", "5", "--i", "9"]), 1);
    assert_eq!(qrw(&["peaks1d", "--fixture", "u1"]), 1);
    assert_eq!(qrw(&["frobnicate"]), 1);
    assert_eq!(qrw(&["--help"]), 0);
}

//! Simulated profile and predicted peak positions side by side, through
//! the CLI's file formats.
use std::fs;

fn main() {
    let dir = std::env::temp_dir().join("qrw-overlay-example");
    fs::create_dir_all(&dir).expect("temp dir");
    let p = |f: &str| dir.join(f).to_string_lossy().into_owned();
    let runs: [&[&str]; 3] = [
        &["simulate", "--fixture", "running", "--n", "400", "--j", "1", "--out", &p("profile.csv")],
        &["peaks1d", "--fixture", "running", "--out", &p("peaks.json")],
        &["overlay", "--profile", &p("profile.csv"), "--peaks", &p("peaks.json"), "--out", &p("overlay.csv")],
    ];
    for args in runs {
        let code = qrw::cli::run(std::iter::once("qrw").chain(args.iter().copied()));
        assert_eq!(code, 0, "qrw {args:?}");
    }
    let text = fs::read_to_string(p("overlay.csv")).expect("overlay written");
    let lines: Vec<&str> = text.lines().filter(|l| l.ends_with(",1")).collect();
    println!("sites on a peak line:");
    for l in lines {
        println!("  {l}");
    }
}

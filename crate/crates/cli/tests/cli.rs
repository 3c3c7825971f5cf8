use std::fs;
use std::process::{Command, Output};

fn stirap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stirap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn presets_lists_all_ten() {
    let o = stirap(&["presets"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 10);
    assert!(text.starts_with("fig2"));
}

#[test]
fn boundaries_for_fig2() {
    let o = stirap(&["boundaries", "fig2"]);
    assert!(o.status.success());
    let vals: Vec<f64> = stdout(&o)
        .lines()
        .map(|l| l.split('=').nth(1).unwrap().trim().parse().unwrap())
        .collect();
    assert!(
        (vals[0] - 1.49).abs() < 0.01 && (vals[1] - 5.32).abs() < 0.01,
        "{vals:?}"
    );
}

#[test]
fn simulate_writes_files_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = stirap(&[
            "simulate",
            "fig2",
            "--levels",
            "full,minus-excited",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [
        "full.csv",
        "minus-excited.csv",
        "eigen.csv",
        "report.txt",
        "scenario.cfg",
    ] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let eigen = fs::read_to_string(a.join("eigen.csv")).unwrap();
    assert!(eigen.starts_with("t,ReL1,ReL2,ReL3,ImL1,ImL2,ImL3,D_re,D_im\n"));

    // the written scenario runs back to the same result
    let c = stirap(&[
        "simulate",
        a.join("scenario.cfg").to_str().unwrap(),
        "--out",
        dir.path().join("c").to_str().unwrap(),
    ]);
    assert!(c.status.success());
    assert_eq!(
        fs::read(a.join("full.csv")).unwrap(),
        fs::read(dir.path().join("c/full.csv")).unwrap()
    );
}

#[test]
fn compare_and_assert() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = stirap(&[
        "simulate",
        "fig2",
        "--levels",
        "full,minus-excited",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (full, red) = (out.join("full.csv"), out.join("minus-excited.csv"));
    let (full, red) = (full.to_str().unwrap(), red.to_str().unwrap());

    let same = stirap(&["compare", full, full, "--channels", "Pa,Pe", "--assert", "0"]);
    assert!(same.status.success());
    assert!(stdout(&same).contains("diff compare Pa = 0.0000000000000000e0"));

    let tight = stirap(&["compare", full, red, "--channels", "Pa", "--assert", "1e-12"]);
    assert_eq!(tight.status.code(), Some(4));
    let sim = stirap(&[
        "simulate",
        "fig2",
        "--levels",
        "minus-excited",
        "--assert",
        "1e-12",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(sim.status.code(), Some(4));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stirap(&["boundaries", "fig3"]).status.code(), Some(2));
    assert_eq!(
        stirap(&["boundaries", "fig2", "--window", "5:1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        stirap(&["simulate", "fig7", "--levels", "minus-bright"]).status.code(),
        Some(2)
    );

    let cfg = dir.path().join("lossless.cfg");
    fs::write(&cfg, "preset = fig5\ngamma = 0   # no losses\n").unwrap();
    assert_eq!(stirap(&["simulate", cfg.to_str().unwrap()]).status.code(), Some(2));

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "variant = linear-lambda\nomega0 = ten\n").unwrap();
    let o = stirap(&["boundaries", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));

    // a window far from the pulses has no discriminant crossing
    assert_eq!(
        stirap(&["boundaries", "fig2", "--window", "40:50"]).status.code(),
        Some(3)
    );

    let missing = dir.path().join("missing.csv");
    let o = stirap(&[
        "compare",
        missing.to_str().unwrap(),
        missing.to_str().unwrap(),
        "--channels",
        "Pa",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eigentrace_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("e.csv");
    let o = stirap(&[
        "eigentrace",
        "fig9",
        "--darkstate-mode",
        "substitution",
        "--step",
        "1e-3",
        "--window",
        "5:14",
        "--out",
        f.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&f).unwrap();
    assert!(text.starts_with("t,ReL1,ReL2,ReL3,ReL4,ImL1"));
    assert_eq!(text.lines().count(), 1 + 901);
    let o = stirap(&["eigentrace", "fig4", "--detuning", "-0.2", "--window", "9:10"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().count() > 100);
}

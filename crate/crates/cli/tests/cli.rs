use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use photon_efficiency::interferometer::{beam_splitter, haar_random, RandomSeed};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photon-eff"))
        .args(args)
        .env_remove("PHOTON_EFF_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn lines(out: &[u8]) -> Vec<Value> {
    std::str::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn scan_without_numeric_sectors_is_refused() {
    let o = run(&["scan", "--n", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--include-analytic-d"));

    let o = run(&["scan", "--n", "3", "--include-analytic-d", "--trials", "3"]);
    assert_eq!(code(&o), 0);
    let recs = lines(&o.stdout);
    assert_eq!(recs.len(), 4 * 3 + 1);
    let ds: Vec<u64> = recs.last().unwrap()["sectors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["d"].as_u64().unwrap())
        .collect();
    assert_eq!(ds, vec![0, 1, 2, 3]);
}

#[test]
fn scan_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let base = ["scan", "--n", "4..5", "--trials", "70", "--seed", "7"];
    let oa = run(&[&base[..], &["--jobs", "1", "--out", a.to_str().unwrap()]].concat());
    let ob = run(&[&base[..], &["--jobs", "4", "--out", b.to_str().unwrap()]].concat());
    assert_eq!(code(&oa), 0);
    assert_eq!(code(&ob), 0);
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);

    let again = run(&["scan", "--n", "4", "--d", "2", "--trials", "1", "--seed", "7"]);
    let once = run(&["scan", "--n", "4", "--d", "2", "--trials", "1", "--seed", "7"]);
    assert_eq!(again.stdout, once.stdout);
}

#[test]
fn desk_scale_scan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let o = run(&[
        "scan",
        "--n",
        "4..6",
        "--trials",
        "100",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let recs = lines(&std::fs::read(&path).unwrap());
    // D = 2 at N = 4; 2, 3 at N = 5; 2, 3, 4 at N = 6
    assert_eq!(recs.len(), 100 * 6 + 1);
    assert!(recs[..600]
        .iter()
        .all(|r| r["schema"] == 1 && r["kind"] == "trial" && r["ms"].is_null()));
    let summary = recs.last().unwrap();
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["violations"], 0);
    for s in summary["sectors"].as_array().unwrap() {
        assert!(num(&s["min_eig"]) >= -1e-10, "{s}");
        if s["d"] == 2 {
            assert!(num(&s["min_eig"]) > 1e-9, "{s}");
        }
    }
}

#[test]
fn scan_honours_out_dir_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_photon-eff"))
        .args([
            "scan",
            "--n",
            "4",
            "--trials",
            "2",
            "--seed",
            "5",
            "--timing",
            "--null-space",
        ])
        .env("PHOTON_EFF_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let recs = lines(&std::fs::read(dir.path().join("scan-5.jsonl")).unwrap());
    assert_eq!(recs.len(), 3);
    assert!(num(&recs[0]["ms"]) >= 0.0);
    // one pattern row against six detector occupations
    assert_eq!(recs[0]["null_dim"], 5);
}

#[test]
fn scan_reports_bad_configuration_and_io() {
    assert_eq!(code(&run(&["scan"])), 2);
    assert_eq!(code(&run(&["scan", "--n", "4", "--trials", "0"])), 2);
    assert_eq!(code(&run(&["scan", "--n", "6..4"])), 2);
    assert_eq!(code(&run(&["scan", "--n", "4", "--violation-tol", "-1"])), 2);
    let o = run(&["scan", "--n", "4", "--trials", "1", "--out", "/nonexistent-dir/x.jsonl"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_examples() {
    let o = run(&[
        "verify",
        "--check",
        "bound-d-n1m1",
        "--n",
        "4",
        "--trials",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = &lines(&o.stdout)[0];
    assert_eq!(r["passed"], true);
    assert!(num(&r["worst"]) >= -1e-12);

    let o = run(&["verify", "--check", "recurrence", "--n", "6", "--trials", "200"]);
    assert_eq!(code(&o), 0);
    assert!(num(&lines(&o.stdout)[0]["worst"]) <= 1e-11);

    let o = run(&["verify", "--check", "convexity", "--n", "4"]);
    assert_eq!(code(&o), 0);
    assert!(num(&lines(&o.stdout)[0]["worst"]) <= 1e-11);

    assert_eq!(code(&run(&["verify", "--check", "nonsense"])), 2);
}

#[test]
fn verify_all_prints_one_line_per_check() {
    let o = run(&["verify", "--n", "4", "--trials", "5", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<String> = lines(&o.stdout)
        .iter()
        .map(|r| r["check"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "bound-d-n1m1",
            "bound-d0",
            "recurrence",
            "convexity",
            "absorb",
            "no-gain"
        ]
    );
}

#[test]
fn output_identity_example() {
    let o = run(&["output", "--identity", "--p", "0.7,0"]);
    assert_eq!(code(&o), 0);
    let r = &lines(&o.stdout)[0];
    assert!((num(&r["c1"]) - 0.7).abs() < 1e-15);
    assert_eq!(r["source"], "identity");
}

#[test]
fn output_echoes_seed_and_respects_d0_bound() {
    let o = run(&["output", "--seed", "11", "--n", "4", "--p", "0.2,0.9,0.5,0.9"]);
    assert_eq!(code(&o), 0);
    let r = &lines(&o.stdout)[0];
    assert_eq!(r["source"]["seed"], 11);
    assert!(num(&r["c1"]) <= 0.9 + 1e-12);
    assert_eq!(
        run(&["output", "--seed", "11", "--n", "4", "--p", "0.2,0.9,0.5,0.9"]).stdout,
        o.stdout
    );
}

fn write_lambda(dir: &Path, json: String) -> String {
    let path = dir.join("lambda.json");
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn output_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_lambda(dir.path(), haar_random(5, RandomSeed::new(2, 2)).to_json());
    let o = run(&["output", "--lambda", &file, "--p", "0.6"]);
    assert_eq!(code(&o), 0);
    let r = &lines(&o.stdout)[0];
    assert_eq!(r["d"], 0);
    assert!(num(&r["c1"]) <= 0.6 + 1e-12);
    let probs: f64 = r["probabilities"].as_array().unwrap().iter().map(num).sum();
    assert!((probs - 1.0).abs() < 1e-12);

    let chi = dir.path().join("chi.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(
        &chi,
        format!(r#"[{{"occupation": [1,0,0,0], "amplitude": [{h}, 0]}}, {{"occupation": [0,0,1,0], "amplitude": [0, {h}]}}]"#),
    )
    .unwrap();
    let o = run(&[
        "output",
        "--lambda",
        &file,
        "--p",
        "0.6",
        "--chi-file",
        chi.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&o.stdout)[0]["d"], 1);
}

#[test]
fn output_reports_impossible_outcome() {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bs = beam_splitter(h, h).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = write_lambda(dir.path(), bs.to_json());
    let o = run(&["output", "--lambda", &file, "--p", "1", "--chi-pattern", "1"]);
    assert_eq!(code(&o), 0);
    let r = &lines(&o.stdout)[0];
    assert_eq!(r["possible"], false);
    assert!(r["probabilities"].is_null());
    assert!(r["c1"].is_null());
}

#[test]
fn output_rejects_bad_input() {
    assert_eq!(code(&run(&["output", "--p", "0.5"])), 2);
    assert_eq!(code(&run(&["output", "--identity", "--p", "1.5"])), 2);
    assert_eq!(
        code(&run(&[
            "output",
            "--identity",
            "--n",
            "3",
            "--p",
            "0.5",
            "--chi-pattern",
            "1"
        ])),
        2
    );
    assert_eq!(
        code(&run(&["output", "--lambda", "/nonexistent.json", "--p", "0.5"])),
        3
    );
}

#[test]
fn scheme2_auto_condition_zeroes_vacuum() {
    let o = run(&[
        "scheme",
        "--id",
        "2",
        "--gamma",
        "0.6",
        "--beta",
        "0.8",
        "--alpha",
        "0.001",
        "--auto-condition",
    ]);
    assert_eq!(code(&o), 0);
    let r = &lines(&o.stdout)[0];
    assert_eq!(r["result"]["condition_holds"], true);
    let vac = r["result"]["vacuum"].as_array().unwrap();
    assert!(num(&vac[0]).hypot(num(&vac[1])) < 1e-12);
    let s = &r["parameters"]["splitter"];
    let t = num(&s["t"][0]).hypot(num(&s["t"][1]));
    let rr = num(&s["r"][0]).hypot(num(&s["r"][1]));
    assert!((t * t + rr * rr - 1.0).abs() < 1e-12);
}

#[test]
fn scheme1_near_full_transmission_keeps_efficiency() {
    let o = run(&["scheme", "--id", "1", "--q", "0.5", "--t", "0.999", "--E", "0.8"]);
    assert_eq!(code(&o), 0);
    let r = &lines(&o.stdout)[0]["result"];
    assert!((num(&r["output_efficiency"]) - num(&r["input_efficiency"])).abs() < 1e-3);
}

#[test]
fn scheme3_sweep_finds_zero_success() {
    let o = run(&["scheme", "--id", "3", "--sweep", "r", "0..1", "--steps", "21"]);
    assert_eq!(code(&o), 0);
    let recs = lines(&o.stdout);
    assert_eq!(recs.len(), 22);
    let summary = recs.last().unwrap();
    assert_eq!(summary["kind"], "sweep-summary");
    assert!(num(&summary["refined_min_success_probability"]) < 1e-20);
    assert!((num(&summary["refined_argmin"]) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
}

#[test]
fn scheme_oracle_agrees() {
    for args in [
        vec![
            "scheme",
            "--id",
            "1",
            "--q",
            "0.3",
            "--t",
            "0.8",
            "--lo-phase",
            "0.4",
            "--oracle",
        ],
        vec![
            "scheme", "--id", "3", "--gamma2", "0.8", "--beta2", "0.6i", "--t", "0.6", "--oracle",
        ],
        vec![
            "scheme", "--id", "4", "--beta2", "0.8-0.0i", "--t", "0.5", "--t2", "0.3", "--oracle",
        ],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let dev = num(&lines(&o.stdout)[0]["oracle"]["deviation"]);
        assert!(dev < 1e-12, "{args:?}: deviation {dev}");
    }
}

#[test]
fn scheme_rejects_bad_parameters() {
    assert_eq!(code(&run(&["scheme", "--id", "5"])), 2);
    assert_eq!(code(&run(&["scheme", "--id", "3", "--gamma", "1", "--beta", "1"])), 2);
    assert_eq!(code(&run(&["scheme", "--id", "3", "--sweep", "bogus", "0..1"])), 2);
    assert_eq!(code(&run(&["scheme", "--id", "3", "--t", "2"])), 2);
}

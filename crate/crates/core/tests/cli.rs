// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quenchlab::output::read_csv;

fn quenchlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quenchlab"))
        .args(args)
        .env_remove("QUENCHLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn sweep_output_is_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "3"] {
        let out = tmp.path().join(threads);
        let status = quenchlab(&[
            "sweep-tau", "--n", "40", "--tau-grid", "1:20:3", "--xi-grid", "0,0.02",
            "--threads", threads, "--out", out.to_str().unwrap(),
        ]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        files.push(fs::read(out.join("sweep_tau.csv")).unwrap());
        assert_eq!(manifest(&out)["status"], "ok");
    }
    assert_eq!(files[0], files[1]);
    let csv = read_csv(&tmp.path().join("1/sweep_tau.csv")).unwrap();
    assert_eq!(csv.rows.len(), 2 * 5);
    assert_eq!(csv.header["experiment"], "sweep-tau");
}

#[test]
fn invalid_configuration_exits_with_two_and_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bad");
    let res = quenchlab(&["quench", "--n", "41", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let m = manifest(&out);
    assert_eq!(m["status"], "error");
    assert_eq!(m["error"]["exit_code"], 2);

    let res = quenchlab(&["sweep-xi", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2), "missing ξ grid");
    let res = quenchlab(&["sweep-tau", "--tau-grid", "5:1:24", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2), "empty τ grid");
    let res = quenchlab(&["quench", "--noise", "ou", "--xi", "0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2), "coloured noise on the chain");
    let res = quenchlab(&["quench", "--tau", "fast"]);
    assert_eq!(res.status.code(), Some(2), "unparsable flag");
}

#[test]
fn quench_scan_and_fit_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("q");
    let res = quenchlab(&[
        "quench", "--n", "24", "--hi", "-5", "--hf", "5", "--tau", "2", "--xi", "0.01",
        "--hf-scan", "--scan-points", "9", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = read_csv(&out.join("quench.csv")).unwrap();
    let h = csv.numbers("h0").unwrap();
    assert_eq!(h.len(), 9);
    assert_eq!((h[0], h[8]), (-5.0, 5.0));
    let purity = csv.numbers("mean_purity").unwrap();
    assert!(purity.windows(2).all(|w| w[1] <= w[0] + 1e-12));

    let fit_out = tmp.path().join("fit.json");
    let res = quenchlab(&[
        "fit", "--in", out.join("quench.csv").to_str().unwrap(), "--x", "h0", "--y", "sz",
        "--model", "linear", "--window", "-5:0.5", "--out", fit_out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(fit_out).unwrap()).unwrap();
    assert_eq!(fit["points"], 5);
    assert_eq!(fit["source"]["manifest_sha256"], manifest(&out)["manifest_sha256"]);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "n = 16\ntau = 4.0\nxi = 0.02\n").unwrap();
    let res = quenchlab(&["print-config", "--config", cfg.to_str().unwrap(), "--tau", "7"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("n = 16"), "{text}");
    assert!(text.contains("tau = 7.0"), "{text}");
    assert!(text.contains("xi = 0.02"), "{text}");

    fs::write(&cfg, "n = 16\nmystery = 1\n").unwrap();
    let res = quenchlab(&["print-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn oracle_check_passes_on_small_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let res = quenchlab(&["oracle-check", "--n", "6", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stdout));
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("PASS") && !stdout.contains("FAIL"));
    let csv = read_csv(&out.join("oracle.csv")).unwrap();
    assert!(csv.numbers("deviation").unwrap().iter().all(|d| *d < 1e-6));
    let res = quenchlab(&["oracle-check", "--n", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

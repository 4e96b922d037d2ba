//! End-to-end checks of the `milac` binary: exit codes, determinism and the
//! summarize round trip.

use std::path::Path;
use std::process::{Command, Output};

fn milac(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_milac"));
    cmd.args(args).env_remove("MILAC_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "\
N = 8
K = 2
channel = clustered(3)
snr_db = [0, 10]
trials = 4
seed = 11
schemes = [milac, digital]
";

#[test]
fn same_seed_gives_identical_csv_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = milac(
        &[
            "run",
            "--config",
            &cfg,
            "--out",
            a.to_str().unwrap(),
            "--threads",
            "1",
        ],
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = milac(
        &["run", "--config", &cfg, "--out", b.to_str().unwrap()],
        &[("MILAC_THREADS", "3")],
    );
    assert!(out.status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with(
        "scheme,N,K,snr_db,trial,seed,sum_rate_bits,iterations,converged,wall_time_ms\n"
    ));
    assert_eq!(text.lines().count(), 1 + 2 * 4 * 2);

    let c = dir.path().join("c.csv");
    milac(
        &[
            "run",
            "--config",
            &cfg,
            "--out",
            c.to_str().unwrap(),
            "--seed",
            "12",
        ],
        &[],
    );
    assert_ne!(std::fs::read(&c).unwrap(), tb);
}

#[test]
fn summarize_reads_back_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", SMALL);
    let csv = dir.path().join("r.csv");
    let run = milac(
        &["run", "--config", &cfg, "--out", csv.to_str().unwrap()],
        &[],
    );
    let again = milac(&["summarize", "--in", csv.to_str().unwrap()], &[]);
    assert!(again.status.success());
    // run prints the same table after writing the file
    assert_eq!(run.stdout, again.stdout);
    let table = String::from_utf8(again.stdout).unwrap();
    assert_eq!(table.lines().count(), 1 + 4);
    for line in table.lines().skip(1).filter(|l| l.starts_with("milac")) {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ratio <= 1.0 + 1e-6, "{line}");
    }
}

#[test]
fn stdout_csv_plots_and_channel_export() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{SMALL}export_channels = true\noutput = {}\n",
        dir.path().join("o.csv").display()
    );
    let cfg = write_config(dir.path(), "s.cfg", &body);
    let out = milac(&["run", "--config", &cfg, "--plots"], &[]);
    assert!(out.status.success());
    assert!(dir.path().join("o.channels.csv").exists());
    assert!(dir.path().join("o_snr.svg").exists());

    let cfg = write_config(dir.path(), "t.cfg", SMALL);
    let out = milac(&["run", "--config", &cfg], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("scheme,N,K,"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.cfg", "K = 9\nN = 4\n");
    assert_eq!(
        milac(&["run", "--config", &bad], &[]).status.code(),
        Some(1)
    );
    let typo = write_config(dir.path(), "typo.cfg", "trails = 3\n");
    let out = milac(&["run", "--config", &typo], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert_eq!(
        milac(&["run", "--config", "/nonexistent.cfg"], &[])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        milac(
            &[
                "run",
                "--config",
                &write_config(dir.path(), "ok.cfg", SMALL)
            ],
            &[("MILAC_THREADS", "x")]
        )
        .status
        .code(),
        Some(1)
    );

    // one outer iteration cannot meet the stopping rule
    let capped = write_config(dir.path(), "cap.cfg", &format!("{SMALL}max_outer = 1\n"));
    let out = dir.path().join("cap.csv");
    let lax = milac(
        &["run", "--config", &capped, "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(lax.status.code(), Some(0));
    let strict = milac(
        &[
            "run",
            "--config",
            &capped,
            "--out",
            out.to_str().unwrap(),
            "--strict",
        ],
        &[],
    );
    assert_eq!(strict.status.code(), Some(2));
    assert!(std::fs::read_to_string(&out).unwrap().contains(",false,"));
}

#[test]
fn selftest_passes() {
    let out = milac(&["selftest"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

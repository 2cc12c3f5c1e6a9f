use std::fs;
use std::process::Command;

use semiexplicit::harness::{read_records, run_collect, run_summary, RunConfig};

fn config(pairs: &[(&str, &str)]) -> RunConfig {
    let mut cfg = RunConfig::default();
    for (k, v) in pairs {
        cfg.set(k, v).unwrap();
    }
    cfg
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semiexplicit"))
}

#[test]
fn row_count_follows_stride() {
    for (t, dt, stride) in [("1", "0.01", "1"), ("1", "0.01", "7"), ("2.5", "0.1", "3")] {
        let cfg = config(&[("T", t), ("dt", dt), ("stride", stride)]);
        let (rows, summary) = run_collect(&cfg).unwrap();
        let expected = cfg.steps() / cfg.stride + 1;
        assert_eq!(rows.len(), expected);
        assert_eq!(summary.records, expected);
        assert!(rows.windows(2).all(|w| w[1].time > w[0].time));
    }
}

#[test]
fn zero_horizon_gives_only_the_initial_row() {
    let (rows, summary) = run_collect(&config(&[("T", "0")])).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(summary.steps, 0);
    assert!(rows[0].invariant_errors.iter().all(|(_, e)| *e == 0.0));
}

#[test]
fn reruns_are_bit_identical() {
    for method in ["semiexplicit", "midpoint", "tao"] {
        let cfg = config(&[("model", "nls"), ("method", method), ("omega", "100"), ("T", "0.5"), ("dt", "0.01")]);
        let (a, _) = run_collect(&cfg).unwrap();
        let (b, _) = run_collect(&cfg).unwrap();
        assert_eq!(a, b, "{method}");
    }
}

#[test]
fn config_text_round_trips() {
    let text = "# vortex run\nmodel = vortex\nvortex_ic = disparate\nmethod = semiexplicit\ncomposition = suzuki\norder = 4\n\
                dt = 0.01\nT = 0.1\neps = 1e-12\nsolver = broyden\nstride = 5\n";
    let cfg = RunConfig::parse(text).unwrap();
    assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    assert_eq!(cfg.label(), "semiexplicit-S 4");
    assert!(RunConfig::parse("dt 0.1").is_err());
    assert!(RunConfig::parse("unknown = 1").is_err());
    assert!(config(&[("method", "tao")]).validate().is_err());
    assert!(config(&[("method", "midpoint"), ("composition", "triple_jump"), ("order", "4")]).validate().is_err());
}

#[test]
fn summary_tracks_every_step() {
    let cfg = config(&[("model", "nls"), ("T", "1"), ("dt", "0.01"), ("stride", "1000"), ("eps", "1e-13")]);
    let s = run_summary(&cfg).unwrap();
    assert_eq!(s.iterations.solves, 100);
    assert_eq!(s.iterations.failures, 0);
    assert!(s.tracks_defect);
    assert!(s.max_error("total_mass").unwrap() < 1e-12);
}

#[test]
fn cli_run_writes_csv_and_report_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("nls.cfg");
    let csv_path = dir.path().join("nls.csv");
    fs::write(&cfg_path, format!("model = nls\nT = 0.5\ndt = 0.01\nout = {}\n", csv_path.display())).unwrap();

    let out = bin().args(["run", "--config"]).arg(&cfg_path).args(["--stride", "2"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("NW_itr") && stdout.contains("total_mass"));

    let rows = read_records(std::io::BufReader::new(fs::File::open(&csv_path).unwrap())).unwrap();
    assert_eq!(rows.len(), 26);

    let out = bin().arg("report").arg(&csv_path).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("drift_slope") && stdout.contains("total_mass"));
}

#[test]
fn cli_sweep_and_order_study() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep".to_string()];
    for (i, method) in ["semiexplicit", "irk4"].iter().enumerate() {
        let p = dir.path().join(format!("c{i}.cfg"));
        fs::write(&p, format!("method = {method}\nT = 0.2\ndt = 0.01\n")).unwrap();
        args.extend(["--config".into(), p.display().to_string()]);
    }
    args.extend(["--out-dir".into(), dir.path().display().to_string()]);
    let out = bin().args(&args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csvs = fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().path().extension() == Some("csv".as_ref()));
    assert_eq!(csvs.count(), 2);

    let study = dir.path().join("study.csv");
    let out = bin()
        .args(["order-study", "--T", "1", "--dts", "0.01,0.02,0.05,0.1", "--out"])
        .arg(&study)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&study).unwrap();
    assert!(text.starts_with("method,dt,max_rel_h_error\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn cli_rejects_bad_input() {
    assert!(!bin().args(["run", "--method", "nonsense"]).output().unwrap().status.success());
    assert!(!bin().args(["run", "--set", "dt"]).output().unwrap().status.success());
    assert!(!bin().args(["order-study", "--dts", "0.01,0.02"]).output().unwrap().status.success());
}

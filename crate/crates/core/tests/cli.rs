use std::path::Path;
use std::process::{Command, Output};

fn svhmc(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_svhmc"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn simulate_without_intraday_writes_daily_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 3\n[synth]\nn_days = 50\n").unwrap();
    let out = dir.path().join("nested/out");
    let o = svhmc(&["simulate"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names, ["daily.csv", "truth.csv"]);
    let daily = std::fs::read_to_string(out.join("daily.csv")).unwrap();
    assert_eq!(daily.lines().count(), 51);
}

#[test]
fn seed_flag_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    svhmc(&["simulate", "--seed", "1"], None, &a);
    svhmc(&["simulate", "--seed", "2"], None, &b);
    assert_ne!(std::fs::read(a.join("daily.csv")).unwrap(), std::fs::read(b.join("daily.csv")).unwrap());
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[hmc]\nn_steps = 0\n").unwrap();
    let o = svhmc(&["simulate"], Some(&cfg), dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = svhmc(&["simulate"], Some(&dir.path().join("missing.toml")), dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_or_malformed_data_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = svhmc(&["fit", "garch"], None, dir.path());
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(dir.path().join("daily.csv"), "date,return\n2020-01-01,0.1\n2020-01-02,oops\n").unwrap();
    let o = svhmc(&["fit", "garch"], None, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("oops"));
    assert!(!dir.path().join("garch_chain.txt").exists());
}

#[test]
fn fit_writes_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "seed = 4\n[synth]\nn_days = 120\n[sv]\nn_burn = 300\nn_keep = 600\n[garch]\nn_burn = 300\nn_keep = 600\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    svhmc(&["simulate"], Some(&cfg), &out);
    for (model, rows) in [("sv", vec!["phi", "mu", "sigma_eta_sq", "h_10"]), ("garch", vec!["omega", "alpha", "beta"])] {
        let o = svhmc(&["fit", model], Some(&cfg), &out);
        assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", String::from_utf8_lossy(&o.stderr));
        let table = std::fs::read_to_string(out.join(format!("{model}_diagnostics.csv"))).unwrap();
        let names: Vec<&str> = table.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(names, rows);
        assert!(table.starts_with("parameter,mean,sd,se,tau_int,tau_int_err\n"));
        let vol = std::fs::read_to_string(out.join(format!("{model}_volatility.csv"))).unwrap();
        assert!(vol.starts_with(&format!("date,{model}_vol_mean,{model}_vol_sd\n")));
        assert!(!std::fs::read_dir(&out).unwrap().any(|e| e.unwrap().file_name().to_string_lossy().ends_with(".partial")));
    }
}

#[test]
fn evaluate_reports_disjoint_dates() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sv_volatility.csv"), "date,sv_vol_mean,sv_vol_sd\n2020-01-01,1e-4,0\n").unwrap();
    std::fs::write(dir.path().join("rv_5min.csv"), "date,rv,c_rv\n2021-06-01,1e-4,2e-4\n").unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[rv]\ndeltas = [5]\n[eval]\nmodels = [\"sv\"]\n").unwrap();
    let o = svhmc(&["evaluate"], Some(&cfg), dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("2020-01-01..2020-01-01") && err.contains("2021-06-01..2021-06-01"), "{err}");
}

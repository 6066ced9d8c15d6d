use std::path::PathBuf;
use std::process::{Command, Output};

fn tsrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsrm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tsrm-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

/// (argument, value) rows of a CSV table.
fn rows(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("argument"))
        .map(|l| {
            let mut it = l.split(',').map(|c| c.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

fn report(o: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
    v["report"].clone()
}

#[test]
fn height_density_table() {
    let out = stdout(&tsrm(&["density", "--kind", "nu2", "--max", "4", "--points", "401"]));
    assert!(out.starts_with("# tsrm "));
    assert!(out.lines().nth(1).unwrap().starts_with("# config: {"));
    let r = rows(&out);
    assert_eq!(r.len(), 401);
    assert_eq!(r[0].0, 0.0);
    assert!((r[0].1 - 1.3565974502885605).abs() < 1e-12);
    assert_eq!(r[400].0, 4.0);
}

#[test]
fn position_density_is_symmetric_and_anchored() {
    let r = rows(&stdout(&tsrm(&["density", "--kind", "nu1", "--max", "2", "--points", "5"])));
    let xs: Vec<f64> = r.iter().map(|p| p.0).collect();
    assert_eq!(xs, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    assert!((r[2].1 - 0.157454).abs() < 1e-5);
    assert_eq!(r[1].1, r[3].1);
}

#[test]
fn exp_time_height_table_normalizes() {
    let r = rows(&stdout(&tsrm(&["density", "--kind", "nu2hat", "--max", "6", "--points", "6001"])));
    let mass: f64 = r.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    assert!((mass - 1.0).abs() < 1e-4, "{mass}");
}

#[test]
fn bad_ranges_are_usage_errors() {
    for args in [
        &["density", "--kind", "nu2", "--min", "3", "--max", "1"][..],
        &["density", "--kind", "nu2", "--min", "-1"],
        &["density", "--kind", "nu1", "--min", "-1", "--max", "2"],
        &["density", "--kind", "nu7"],
        &["density", "--kind", "nu2", "--points", "1"],
        &["nonsense"],
        &["--k-max", "0", "spectrum"],
    ] {
        assert_eq!(tsrm(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(tsrm(&["--help"]).status.code(), Some(0));
}

#[test]
fn moments_start_at_one() {
    let r = report(&tsrm(&["moments", "--n-max", "2"]));
    let row0 = &r[0];
    assert_eq!(row0["n"], 0);
    assert!((row0["height"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((row0["position"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r[1]["height"].as_f64().unwrap() - 0.472372).abs() < 1e-6);
}

#[test]
fn tail_constants_report() {
    let r = report(&tsrm(&["tails"]));
    assert!((r["height"].as_f64().unwrap() - 0.888889).abs() < 1e-6);
    assert!((r["position"].as_f64().unwrap() - 0.078329).abs() < 1e-6);
    assert!((r["position_stationary"].as_f64().unwrap() - 0.156659).abs() < 1e-6);
    for fit in r["fits"].as_array().unwrap() {
        assert!(fit["relative_error"].as_f64().unwrap() < 0.03);
    }
}

#[test]
fn spectrum_first_row() {
    let out = stdout(&tsrm(&["spectrum", "--k-max", "5"]));
    let data: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "k,delta_prime,p");
    assert_eq!(data.len(), 6);
    let cells: Vec<&str> = data[1].split(',').collect();
    assert_eq!(cells[0], "1");
    assert!((cells[1].parse::<f64>().unwrap() - 0.808616).abs() < 1e-6);
    assert!((cells[2].parse::<f64>().unwrap() - 0.98663).abs() < 1e-5);
}

#[test]
fn tsaw_simulation_is_deterministic() {
    let d = scratch("tsaw");
    let files = [
        "position.samples.csv",
        "position.histogram.csv",
        "height.samples.csv",
        "height.histogram.csv",
        "report.json",
    ];
    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let base = d.join(run);
        let o = tsrm(&[
            "simulate",
            "tsaw",
            "--seed",
            "42",
            "--n-walks",
            "2000",
            "--n-steps",
            "500",
            "-o",
            base.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        // The config header names the output path, so compare bodies.
        let bodies: Vec<String> = files
            .iter()
            .map(|f| {
                let text = std::fs::read_to_string(d.join(format!("{run}.{f}"))).unwrap();
                text.lines().filter(|l| !l.starts_with("# config")).collect::<Vec<_>>().join("\n")
            })
            .collect();
        runs.push(bodies);
    }
    for (f, (a, b)) in files.iter().zip(runs[0].iter().zip(&runs[1])) {
        if *f == "report.json" {
            let strip = |s: &str| {
                let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
                v["config"]["output"] = serde_json::Value::Null;
                v
            };
            assert_eq!(strip(a), strip(b));
        } else {
            assert_eq!(a, b, "{f}");
        }
    }
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("a.report.json")).unwrap()).unwrap();
    let pos = &rep["report"]["position"];
    assert_eq!(pos["n"], 2000);
    assert!(pos["ks"].as_f64().unwrap() < 0.1);
    assert!(pos["alpha_hat"].as_f64().unwrap() > 0.0);
    assert!(pos["moment_checks"].is_array());
    let samples = std::fs::read_to_string(d.join("a.position.samples.csv")).unwrap();
    assert_eq!(samples.lines().filter(|l| !l.starts_with('#')).count(), 2001);
}

#[test]
fn brownian_simulation_reports_z_scores() {
    let r = report(&tsrm(&[
        "simulate", "brownian", "--n-paths", "2000", "--dt", "1e-3", "--h", "0,0.5", "--x", "0.5",
    ]));
    let rows = r.as_array().unwrap();
    // w(0.5); u(0.5), φ(0.5, 0.5), ν̂(0.5, 0.5)
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["target"]["kind"], "w");
    for row in rows {
        let z = row["z"].as_f64().unwrap();
        assert!(z.abs() < 5.0, "{row}");
    }
}

#[test]
fn pde_report_passes_at_defaults() {
    let d = scratch("pde");
    let base = d.join("field.csv");
    let o = tsrm(&["pde", "-o", base.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("field.csv.report.json")).unwrap()).unwrap();
    assert!(rep["report"]["max_deviation"].as_f64().unwrap() <= 1e-3);
    assert_eq!(rep["report"]["pass"], true);
    let field = std::fs::read_to_string(&base).unwrap();
    assert!(field.starts_with("# tsrm "));
}

#[test]
fn quick_selftest_passes() {
    let r = report(&tsrm(&["selftest"]));
    assert_eq!(r["failed"].as_array().unwrap().len(), 0);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "trace_sum(3)"));
}

#[test]
fn config_file_then_flags() {
    let d = scratch("config");
    let path = d.join("run.toml");
    std::fs::write(&path, "seed = 7\nk_max = 30\n[tsaw]\nbeta = 0.5\n").unwrap();
    let p = path.to_str().unwrap();
    let out = stdout(&tsrm(&["--config", p, "--seed", "9", "--print-config", "simulate", "tsaw", "--n-walks", "10"]));
    let v: toml::Table = toml::from_str(&out).unwrap();
    assert_eq!(v["seed"].as_integer(), Some(9));
    assert_eq!(v["k_max"].as_integer(), Some(30));
    assert_eq!(v["tsaw"]["beta"].as_float(), Some(0.5));
    assert_eq!(v["tsaw"]["n_walks"].as_integer(), Some(10));

    std::fs::write(&path, "sede = 7\n").unwrap();
    assert_eq!(tsrm(&["--config", p, "tails"]).status.code(), Some(1));
    assert_eq!(tsrm(&["--config", d.join("missing.toml").to_str().unwrap(), "tails"]).status.code(), Some(3));
}

#[test]
fn unwritable_output_is_io_error() {
    let o = tsrm(&["spectrum", "-o", "/proc/tsrm/no/such/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use connfield::flow::ExperimentConfig;
use connfield::{pgm, Grid2D, ScalarField};

fn connfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_connfield"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{report}"))
        .parse()
        .unwrap()
}

fn write_field(dir: &Path, name: &str, f: impl Fn(f64, f64) -> f64) -> PathBuf {
    let p = dir.join(name);
    pgm::save_pgm(&ScalarField::from_fn(Grid2D::square(64).unwrap(), f), &p).unwrap();
    p
}

fn disk(cx: f64, cy: f64, r: f64) -> impl Fn(f64, f64) -> bool {
    move |x, y| (x - cx).hypot(y - cy) < r
}

#[test]
fn missing_epsilon_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    fs::write(
        &cfg,
        "alpha = 0.35\ntau = 1e-4\nmax_steps = 10\npenalty = none\n",
    )
    .unwrap();
    let o = connfield(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epsilon"), "{}", stderr(&o));
}

#[test]
fn unknown_key_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    fs::write(&cfg, "epsilon = 5e-3\nalpha = 0.35\n# note\nsigma = 2\n").unwrap();
    let o = connfield(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn unstable_step_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    fs::write(
        &cfg,
        "epsilon = 5e-3\nalpha = 0.35\ntau = 1e-2\nmax_steps = 100\npenalty = none\n",
    )
    .unwrap();
    let o = connfield(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let step: usize = stderr(&o)
        .split("diverged at step ")
        .nth(1)
        .and_then(|s| s.split(':').next())
        .and_then(|s| s.parse().ok())
        .expect("step index reported");
    assert!(step < 100);
}

#[test]
fn preset_run_writes_listed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = connfield(&[
        "preset",
        "two_disks_near",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg_path = dir.path().join("config.txt");
    let mut cfg = ExperimentConfig::load(&cfg_path).unwrap();
    assert_eq!(cfg.penalty.as_str(), "connected");
    // keep the test short; the full run is covered by the acceptance suite
    cfg.max_steps = 200;
    cfg.snapshot_every = 100;
    fs::write(&cfg_path, cfg.to_text()).unwrap();

    let o = connfield(&["run", cfg_path.to_str().unwrap(), "--quiet"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = fs::read_to_string(dir.path().join("out/manifest.txt")).unwrap();
    let outputs: Vec<&str> = manifest
        .lines()
        .filter(|l| l.starts_with("output."))
        .map(|l| l.split(" = ").nth(1).unwrap())
        .collect();
    assert_eq!(outputs.len(), 2 + 3);
    for p in &outputs {
        assert!(Path::new(p).exists(), "{p}");
    }
    assert!(manifest.contains("input.image.sha256 = "));
    let trace = fs::read_to_string(dir.path().join("out/trace.csv")).unwrap();
    assert!(trace.starts_with("step,mm,conn,conn_c,fid,total\n"));
    assert_eq!(trace.lines().count(), 1 + 201);

    // the echoed config re-parses to the same configuration
    let echo: String = manifest
        .lines()
        .filter_map(|l| l.strip_prefix("config."))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(ExperimentConfig::parse(&echo, None).unwrap(), cfg);
}

#[test]
fn measure_white_image() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_field(dir.path(), "white.pgm", |_, _| 1.0);
    let o = connfield(&["measure", p.to_str().unwrap(), "--alpha", "0.35"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    assert_eq!(value(&r, "components"), 1.0);
    assert_eq!(value(&r, "energy.conn"), 0.0);
}

#[test]
fn measure_two_blobs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (disk(0.3, 0.5, 0.12), disk(0.7, 0.5, 0.12));
    let p = write_field(dir.path(), "blobs.pgm", |x, y| {
        (a(x, y) || b(x, y)) as u8 as f64
    });
    let csv = dir.path().join("geo.csv");
    let o = connfield(&[
        "measure",
        p.to_str().unwrap(),
        "--alpha",
        "0.35",
        "--geodesics",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    assert_eq!(value(&r, "components"), 2.0);
    assert!(value(&r, "distance.1.2") > 0.0);
    assert!(value(&r, "energy.conn") > 0.0);
    assert!(fs::read_to_string(csv)
        .unwrap()
        .starts_with("i,j,distance,path_nodes"));
}

fn oracle_row(o: &Output) -> Vec<String> {
    let out = stdout(o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("perimeter,steiner,total,components,bound")
    );
    lines.next().unwrap().split(',').map(String::from).collect()
}

#[test]
fn oracle_single_disk() {
    let dir = tempfile::tempdir().unwrap();
    let d = disk(0.5, 0.5, 0.2);
    let p = write_field(dir.path(), "disk.pgm", |x, y| d(x, y) as u8 as f64);
    let o = connfield(&["oracle", p.to_str().unwrap()]);
    assert!(o.status.success());
    let row = oracle_row(&o);
    assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(row[4], "exact");
}

#[test]
fn oracle_two_disk_preset() {
    let dir = tempfile::tempdir().unwrap();
    assert!(connfield(&[
        "preset",
        "two_disks_near",
        "--out",
        dir.path().to_str().unwrap()
    ])
    .status
    .success());
    let o = connfield(&["oracle", dir.path().join("g.pgm").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let total: f64 = oracle_row(&o)[2].parse().unwrap();
    assert!((total - 1.4566).abs() < 0.03 * 1.4566, "{total}");
}

#[test]
fn oracle_five_components_reports_upper_bound() {
    let dir = tempfile::tempdir().unwrap();
    let centers = [
        (0.15, 0.15),
        (0.85, 0.15),
        (0.15, 0.85),
        (0.85, 0.85),
        (0.5, 0.5),
    ];
    let p = write_field(dir.path(), "five.pgm", |x, y| {
        centers
            .iter()
            .any(|&(cx, cy)| (x - cx).hypot(y - cy) < 0.08) as u8 as f64
    });
    let o = connfield(&["oracle", p.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("upper bound"), "{}", stderr(&o));
    let row = oracle_row(&o);
    assert_eq!(row[3], "5");
    assert_eq!(row[4], "upper");
}

#[test]
fn unknown_preset_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = connfield(&[
        "preset",
        "three_disks",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("two_disks_near"));
}

#[test]
fn penalized_two_disk_run_ends_connected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(connfield(&[
        "preset",
        "two_disks_near",
        "--out",
        dir.path().to_str().unwrap()
    ])
    .status
    .success());
    let o = connfield(&[
        "run",
        dir.path().join("config.txt").to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = fs::read_to_string(dir.path().join("out/manifest.txt")).unwrap();
    let o = connfield(&[
        "measure",
        dir.path().join("out/final.pgm").to_str().unwrap(),
        "--alpha",
        "0.35",
    ]);
    let r = stdout(&o);
    let (components, conn) = (value(&r, "components"), value(&r, "energy.conn"));
    assert!(
        manifest.contains("result.components = 1\n") && (components == 1.0 || conn.abs() < 1e-6),
        "final state has {components} component(s), conn = {conn:e}"
    );
}

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use connfield::energetics::{mm_energy, MMParams};
use connfield::flow::{self, EnergyBreakdown, ExperimentConfig, PenaltyMode};
use connfield::oracle::{
    connected_perimeter_reference, mst_upper_bound, simply_connected_reference, MAX_TERMINALS,
};
use connfield::topology::{
    complement_connectedness_energy, connectedness_energy, label_components, ProfileParams,
};
use connfield::{pgm, presets, BinaryMask, BoundaryMode, Error};

use crate::manifest::{config_from_manifest, RunManifest};

fn output_dir(cfg: &ExperimentConfig, config_path: &Path) -> PathBuf {
    cfg.output
        .clone()
        .unwrap_or_else(|| config_path.parent().unwrap_or(Path::new(".")).join("out"))
}

pub fn run(config_path: &Path, quiet: bool) -> Result<()> {
    let t0 = Instant::now();
    let cfg = ExperimentConfig::load(config_path)?;
    let out = output_dir(&cfg, config_path);
    let mut manifest = RunManifest {
        config: cfg.clone(),
        ..RunManifest::default()
    };
    manifest.add_input("config", config_path)?;
    for (role, p) in [
        ("image", &cfg.image),
        ("phi", &cfg.phi),
        ("init_file", &cfg.init_file),
    ] {
        if let Some(p) = p {
            manifest.add_input(role, p)?;
        }
    }
    let (initial, fidelity) = flow::load_inputs(&cfg)?;
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    manifest
        .timings
        .push(("load".into(), t0.elapsed().as_secs_f64()));

    let t1 = Instant::now();
    let snap_dir = out.join("snapshots");
    let mut snapshots = Vec::new();
    let result = flow::run_from(&cfg, initial, fidelity, |k, u, _| {
        if cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0 {
            fs::create_dir_all(&snap_dir).map_err(|e| Error::io(&snap_dir, e))?;
            let p = snap_dir.join(format!("u_{k:07}.pgm"));
            pgm::save_pgm(u, &p)?;
            snapshots.push(p);
        }
        Ok(())
    })?;
    manifest
        .timings
        .push(("flow".into(), t1.elapsed().as_secs_f64()));

    let t2 = Instant::now();
    let final_pgm = out.join("final.pgm");
    pgm::save_pgm(&result.field, &final_pgm)?;
    let trace = out.join("trace.csv");
    fs::write(&trace, result.trace_csv()).map_err(|e| Error::io(&trace, e))?;
    manifest.outputs.push(final_pgm);
    manifest.outputs.push(trace);
    manifest.outputs.extend(snapshots);
    manifest
        .timings
        .push(("write".into(), t2.elapsed().as_secs_f64()));

    let p = ProfileParams::new(cfg.alpha)?;
    let last = result.trace.last().copied().unwrap_or_default();
    let components = label_components(&result.field, &p).count();
    manifest.results = vec![
        ("reason".into(), result.reason.as_str().into()),
        ("steps".into(), result.steps.to_string()),
        ("components".into(), components.to_string()),
        ("energy_total".into(), format!("{:?}", last.total)),
        ("energy_mm".into(), format!("{:?}", last.mm)),
    ];
    let text = manifest.to_text();
    if config_from_manifest(&text)? != cfg {
        return Err(Error::Consistency(
            "manifest config echo does not re-parse to the run config".into(),
        )
        .into());
    }
    let manifest_path = out.join("manifest.txt");
    fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;
    if !quiet {
        println!(
            "{} after {} steps: {} component(s), mm = {:.6}, total = {:.6}",
            result.reason.as_str(),
            result.steps,
            components,
            last.mm,
            last.total
        );
        println!("wrote {}", manifest_path.display());
    }
    Ok(())
}

pub fn measure(
    field: &Path,
    alpha: f64,
    epsilon: f64,
    eta: f64,
    bc: BoundaryMode,
    penalty: PenaltyMode,
    geodesics: Option<&Path>,
) -> Result<()> {
    let u = pgm::load_pgm(field)?;
    let p = ProfileParams::new(alpha)?;
    let (conn, table, labeling) = connectedness_energy(&u, &p)?;
    println!("components = {}", labeling.count());
    for (k, m) in labeling.masses().iter().enumerate() {
        println!("mass.{} = {m:.9e}", k + 1);
    }
    for (i, j, _) in table.pairs() {
        println!("distance.{}.{} = {:.9e}", i + 1, j + 1, table.dist(i, j));
    }
    let conn_c = match penalty {
        PenaltyMode::SimplyConnected => complement_connectedness_energy(&u, &p)?.energy(),
        _ => 0.0,
    };
    let conn = if penalty == PenaltyMode::None {
        0.0
    } else {
        conn
    };
    let mm = mm_energy(&u, &MMParams::new(epsilon, bc));
    let e = EnergyBreakdown::new(mm, conn, conn_c, 0.0, eta);
    println!("energy.mm = {:.9e}", e.mm);
    println!("energy.conn = {:.9e}", e.conn);
    println!("energy.conn_c = {:.9e}", e.conn_complement);
    println!("energy.fid = {:.9e}", e.fid);
    println!("energy.total = {:.9e}", e.total);
    if let Some(path) = geodesics {
        fs::write(path, table.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn oracle(mask: &Path) -> Result<()> {
    let m = BinaryMask::threshold(&pgm::load_pgm(mask)?, 0.5);
    println!("perimeter,steiner,total,components,bound");
    match connected_perimeter_reference(&m) {
        Ok(r) => {
            let bound = if r.upper_bound { "upper" } else { "exact" };
            println!(
                "{:.9},{:.9},{:.9},{},{bound}",
                r.perimeter, r.steiner, r.total, r.components
            );
            match simply_connected_reference(&m) {
                Ok(sc) => println!(
                    "# simply connected: steiner_complement = {:.9}, total = {:.9}{}",
                    sc.steiner_complement,
                    sc.total,
                    if sc.upper_bound { " (upper bound)" } else { "" }
                ),
                Err(Error::UnsupportedCardinality { count, .. }) => {
                    println!("# simply connected: complement has {count} components, not evaluated")
                }
                Err(e) => return Err(e.into()),
            }
        }
        Err(Error::UnsupportedCardinality { count, .. }) => {
            eprintln!(
                "mask has {count} components; the Steiner solver handles at most {MAX_TERMINALS}. \
                 Reporting the minimum spanning tree of set distances as an upper bound."
            );
            let r = mst_upper_bound(&m);
            println!(
                "{:.9},{:.9},{:.9},{},upper",
                r.perimeter, r.steiner, r.total, r.components
            );
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

pub fn preset(name: &str, out: &Path) -> Result<()> {
    let p = presets::preset(name)?;
    let path = p.write(out)?;
    println!("wrote {}", path.display());
    Ok(())
}

//! CSV, JSON and gnuplot output of a run.
//!
//! Every number is written with 17 significant digits so files round-trip
//! exactly. Nothing time- or host-dependent is recorded, so identical inputs
//! give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use dret_core::heom::{ConvergenceReport, HeomResult};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::run::{ClosedRun, HeomRun, Outcome, RunError, SweepPoint};

pub const META_FORMAT: &str = "dret-run";
pub const META_VERSION: u32 = 1;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> io::Result<usize> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    let mut count = 0;
    let mut line = String::new();
    for row in rows {
        line.clear();
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{x:.16e}");
        }
        writeln!(w, "{line}")?;
        count += 1;
    }
    w.flush()?;
    Ok(count)
}

fn population_header(sites: usize) -> Vec<String> {
    std::iter::once("t".to_string()).chain((1..=sites).map(|k| format!("P_{k}"))).collect()
}

/// Files written, relative to the output directory.
#[derive(Debug, Default)]
struct Written {
    files: Vec<String>,
}

impl Written {
    fn add(&mut self, dir: &Path, root: &Path, name: &str) -> PathBuf {
        let path = dir.join(name);
        let rel = path.strip_prefix(root).unwrap_or(&path).to_string_lossy().replace('\\', "/");
        self.files.push(rel);
        path
    }
}

fn closed_files(out: &Path, run: &ClosedRun, w: &mut Written) -> io::Result<Value> {
    let tr = &run.trajectory;
    let sites = tr.populations.first().map_or(0, |p| p.len());
    write_csv(
        &w.add(out, out, "populations.csv"),
        &population_header(sites),
        tr.times.iter().zip(&tr.populations).map(|(t, p)| std::iter::once(*t).chain(p.iter().copied()).collect()),
    )?;
    write_csv(
        &w.add(out, out, "observables.csv"),
        &["t", "rms_displacement", "energy", "norm"].map(String::from),
        (0..tr.times.len()).map(|i| vec![tr.times[i], tr.rms[i], tr.energy[i], tr.norm[i]]),
    )?;
    let mut frames = Vec::with_capacity(run.frames.len());
    let width = run.frames.len().saturating_sub(1).to_string().len().max(4);
    for (k, f) in run.frames.iter().enumerate() {
        let name = format!("wigner_{k:0width$}.csv");
        let grid = &f.field.grid;
        write_csv(
            &w.add(out, out, &name),
            &["Q", "P", "W"].map(String::from),
            grid.q.iter().enumerate().flat_map(|(i, &q)| {
                grid.p.iter().enumerate().map(move |(j, &p)| vec![q, p, f.field.at(i, j)])
            }),
        )?;
        frames.push(json!({
            "file": name,
            "time_index": f.index,
            "time": f.time,
            "normalization": f.field.normalization,
        }));
    }
    let c = &run.convergence;
    let levels = c.accepted_n_max + 1;
    Ok(json!({
        "closed": {
            "accepted_n_max": c.accepted_n_max,
            "fock_deviation": c.deviation,
            "fock_tolerance": dret_core::closed::FOCK_TOLERANCE,
            "fock_attempts": c.attempts.iter().map(|(n, d)| json!({"n_max": n, "deviation": d})).collect::<Vec<_>>(),
            "hilbert_dimension": sites * levels,
            "max_norm_drift": tr.max_norm_drift(),
            "max_relative_energy_drift": tr.max_relative_energy_drift(),
            "final_rms_displacement": tr.rms.last(),
        },
        "wigner": {
            "grid": {
                "extent": run.wigner_extent,
                "points": run.frames.first().map_or(0, |f| f.field.grid.q.len()),
                "layout": "one row per (Q, P) point, Q outer, P inner",
            },
            "normalization_tolerance": dret_core::closed::wigner::NORMALIZATION_TOLERANCE,
            "frames": frames,
        },
    }))
}

fn convergence_json(report: &Option<ConvergenceReport>) -> Value {
    match report {
        None => Value::Null,
        Some(r) => json!({
            "cutoffs": r.cutoffs,
            "deviations": r.deviations,
            "accepted": r.accepted,
            "threshold": r.threshold,
        }),
    }
}

fn heom_summary(run: &HeomRun) -> Value {
    let r = &run.result;
    json!({
        "cutoff": r.cutoff,
        "ado_count": r.ado_count,
        "method": format!("{:?}", r.method),
        "steps": {
            "accepted": r.stats.accepted,
            "rejected": r.stats.rejected,
            "rhs_evaluations": r.stats.rhs_evaluations,
        },
        "max_trace_drift": r.max_trace_drift(),
        "max_hermiticity_error": r.max_hermiticity_error,
        "min_eigenvalue": r.min_eigenvalue,
        "final_populations": r.populations.last(),
        "final_rms_displacement": r.rms.last(),
        "convergence": convergence_json(&run.convergence),
    })
}

fn heom_files(dir: &Path, root: &Path, r: &HeomResult, w: &mut Written) -> io::Result<()> {
    let sites = r.populations.first().map_or(0, |p| p.len());
    write_csv(
        &w.add(dir, root, "populations.csv"),
        &population_header(sites),
        r.times.iter().zip(&r.populations).map(|(t, p)| std::iter::once(*t).chain(p.iter().copied()).collect()),
    )?;
    write_csv(
        &w.add(dir, root, "observables.csv"),
        &["t", "rms_displacement", "trace"].map(String::from),
        (0..r.times.len()).map(|i| vec![r.times[i], r.rms[i], r.trace[i]]),
    )?;
    let pairs = r.coherence_pairs();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(pairs.iter().flat_map(|(j, k)| {
            let (j, k) = (j + 1, k + 1);
            [format!("abs_rho_{j}_{k}"), format!("re_rho_{j}_{k}"), format!("im_rho_{j}_{k}")]
        }))
        .collect();
    write_csv(
        &w.add(dir, root, "coherences.csv"),
        &header,
        r.times.iter().zip(&r.rho).map(|(t, rho)| {
            std::iter::once(*t)
                .chain(pairs.iter().flat_map(|&(j, k)| {
                    let z = rho[(j, k)];
                    [z.norm(), z.re, z.im]
                }))
                .collect()
        }),
    )?;
    Ok(())
}

fn sweep_files(out: &Path, points: &[SweepPoint], w: &mut Written) -> io::Result<Value> {
    let width = points.len().saturating_sub(1).to_string().len();
    let mut summary = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let sub = format!("gamma_{i:0width$}");
        let dir = out.join(&sub);
        fs::create_dir_all(&dir)?;
        heom_files(&dir, out, &p.run.result, w)?;
        let mut s = heom_summary(&p.run);
        s["relaxation"] = json!(p.relaxation);
        s["directory"] = json!(sub);
        summary.push(s);
    }
    let sites = points.first().and_then(|p| p.run.result.populations.first()).map_or(0, |v| v.len());
    let mut header = vec!["relaxation".to_string(), "cutoff".to_string()];
    header.extend((1..=sites).map(|k| format!("P_{k}_final")));
    header.push("rms_displacement_final".into());
    write_csv(
        &w.add(out, out, "sweep.csv"),
        &header,
        points.iter().map(|p| {
            let r = &p.run.result;
            let mut row = vec![p.relaxation, r.cutoff as f64];
            row.extend(r.populations.last().into_iter().flatten().copied());
            row.push(r.rms.last().copied().unwrap_or(f64::NAN));
            row
        }),
    )?;
    Ok(json!({ "sweep": summary }))
}

/// Writes gnuplot scripts next to the CSV files.
fn plot_files(out: &Path, cfg: &RunConfig, outcome: &Outcome, w: &mut Written) -> io::Result<()> {
    let sites = cfg.sites();
    let preamble = "set datafile separator ','\nset key outside right\nset xlabel 't J'\n";
    let mut emit = |name: &str, body: String| -> io::Result<()> {
        fs::write(w.add(out, out, name), format!("{preamble}{body}"))
    };
    match outcome {
        Outcome::Sweep(points) => {
            let mut body = String::from("set ylabel 'P_2'\nset logscale x\nset xlabel 'gamma / J'\n");
            body.push_str(&format!(
                "plot 'sweep.csv' using 1:{} with linespoints title 'final P_2'\n",
                if sites >= 2 { 4 } else { 3 }
            ));
            emit("sweep.gp", body)?;
            let curves: Vec<String> = (0..points.len())
                .map(|i| {
                    let width = points.len().saturating_sub(1).to_string().len();
                    format!("'gamma_{i:0width$}/populations.csv' using 1:3 with lines title 'gamma = {}'", points[i].relaxation)
                })
                .collect();
            emit("populations.gp", format!("set ylabel 'P_2'\nplot {}\n", curves.join(", \\\n     ")))?;
        }
        _ => {
            emit(
                "populations.gp",
                format!("set ylabel 'population'\nplot for [i=2:{}] 'populations.csv' using 1:i with lines title columnhead\n", sites + 1),
            )?;
            emit(
                "observables.gp",
                "set ylabel 'rms displacement'\nplot 'observables.csv' using 1:2 with lines title 'Delta(t)'\n".into(),
            )?;
            if let Outcome::Closed(run) = outcome {
                if !run.frames.is_empty() {
                    let width = run.frames.len().saturating_sub(1).to_string().len().max(4);
                    emit(
                        "wigner.gp",
                        format!(
                            "set xlabel 'Q'\nset ylabel 'P'\nset view map\nset size ratio -1\nset palette defined (-1 'blue', 0 'white', 1 'red')\n\
                             do for [k=0:{}] {{\n    file = sprintf('wigner_%0{width}d.csv', k)\n    set title file\n    splot file using 1:2:3 with pixels notitle\n    pause 0.1\n}}\n",
                            run.frames.len() - 1
                        ),
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn base_meta(cfg: Option<&RunConfig>) -> Value {
    json!({
        "format": META_FORMAT,
        "format_version": META_VERSION,
        "dret_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "units": "hbar = 1; energies in units of J_ref, times in units of 1/J_ref",
    })
}

fn write_meta(out: &Path, meta: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(meta).expect("meta serialises");
    text.push('\n');
    fs::write(out.join("meta.json"), text)
}

/// Writes every output file and `meta.json`. `warnings` are merged with the
/// run's own diagnostics.
pub fn write_bundle(out: &Path, cfg: &RunConfig, outcome: &Outcome, emit_plots: bool, warnings: &[String]) -> io::Result<Value> {
    fs::create_dir_all(out)?;
    let mut w = Written::default();
    let mut meta = base_meta(Some(cfg));
    let mut all_warnings: Vec<String> = warnings.to_vec();
    let detail = match outcome {
        Outcome::Closed(run) => {
            if run.wigner_extent > cfg.wigner.extent && !run.frames.is_empty() {
                all_warnings.push(format!(
                    "Wigner grid widened from extent {} to {} to cover {} Fock levels",
                    cfg.wigner.extent,
                    run.wigner_extent,
                    run.convergence.accepted_n_max + 1
                ));
            }
            closed_files(out, run, &mut w)?
        }
        Outcome::Heom(run) => {
            heom_files(out, out, &run.result, &mut w)?;
            all_warnings.extend(run.result.warnings.iter().map(|x| x.to_string()));
            json!({ "heom": heom_summary(run) })
        }
        Outcome::Sweep(points) => {
            for p in points {
                all_warnings.extend(p.run.result.warnings.iter().map(|x| format!("relaxation {}: {x}", p.relaxation)));
            }
            sweep_files(out, points, &mut w)?
        }
    };
    if emit_plots {
        plot_files(out, cfg, outcome, &mut w)?;
    }
    if let (Value::Object(m), Value::Object(d)) = (&mut meta, detail) {
        m.extend(d);
        m.insert("status".into(), json!("ok"));
        m.insert("warnings".into(), json!(all_warnings));
        m.insert("files".into(), json!(w.files));
    }
    write_meta(out, &meta)?;
    Ok(meta)
}

/// Records a failed run. Used for every error after the output directory is known.
pub fn write_failure(out: &Path, cfg: Option<&RunConfig>, err: &RunError, warnings: &[String]) -> io::Result<()> {
    fs::create_dir_all(out)?;
    let mut meta = base_meta(cfg);
    if let Value::Object(m) = &mut meta {
        m.insert("status".into(), json!("error"));
        m.insert("error".into(), json!({ "kind": err.kind(), "message": err.message() }));
        m.insert("warnings".into(), json!(warnings));
    }
    write_meta(out, &meta)
}

/// Config stored in a previous run's `meta.json`.
pub fn config_from_meta(text: &str) -> Result<RunConfig, String> {
    let meta: Value = serde_json::from_str(text).map_err(|e| format!("meta.json: {e}"))?;
    if meta.get("format").and_then(Value::as_str) != Some(META_FORMAT) {
        return Err("not a dret meta.json (missing format tag)".into());
    }
    let cfg = meta.get("config").filter(|c| !c.is_null()).ok_or("meta.json carries no config")?;
    let cfg = RunConfig::from_json(&cfg.to_string()).map_err(|e| e.to_string())?;
    Ok(cfg)
}

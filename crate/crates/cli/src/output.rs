//! CSV and JSON writers. Every CSV starts with '#'-prefixed metadata lines;
//! every run also drops a JSON metadata file next to its tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use tg_sta::Result;

/// One verified trajectory, as reported in run summary tables.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub t_f: f64,
    pub n: f64,
    pub gamma: f64,
    pub omega0_sq: f64,
    pub omegaf_sq: f64,
    pub ramp: String,
    pub ansatz: String,
    pub density_overlap: f64,
    pub fidelity: f64,
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_summary_csv(
    path: &Path,
    metadata: &[(&str, String)],
    rows: &[SummaryRow],
) -> Result<()> {
    let mut w = create(path)?;
    for (key, val) in metadata {
        writeln!(w, "# {key} = {val}")?;
    }
    writeln!(
        w,
        "t_f,n,gamma,omega0_sq,omegaf_sq,ramp,ansatz,density_overlap,fidelity"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.12e},{:.12e}",
            r.t_f,
            r.n,
            r.gamma,
            r.omega0_sq,
            r.omegaf_sq,
            r.ramp,
            r.ansatz,
            r.density_overlap,
            r.fidelity
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Write `metadata.json` describing the run: scenario, the full config,
/// effective numerical parameters, and the produced files.
pub fn write_metadata(
    out_dir: &Path,
    scenario: &str,
    config: &crate::config::RunConfig,
    extra: serde_json::Value,
    files: &[PathBuf],
) -> Result<()> {
    let names: Vec<String> = files
        .iter()
        .map(|p| {
            p.strip_prefix(out_dir)
                .unwrap_or(p)
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    let doc = serde_json::json!({
        "scenario": scenario,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "run": extra,
        "files": names,
    });
    let mut w = create(&out_dir.join("metadata.json"))?;
    serde_json::to_writer_pretty(&mut w, &doc).map_err(std::io::Error::other)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

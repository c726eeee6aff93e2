//! Report, per-seed JSON Lines and benchmark CSV writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::experiment::{Detail, RunReport, SeedRecord};
use super::HarnessError;

/// One row of the gossip benchmark CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GossipRow {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub tau: u64,
    pub phi: u64,
    pub f: usize,
    pub rounds_rw: u64,
    pub rounds_trivial: u64,
    pub winner: String,
    pub coverage_rw: bool,
    pub seed: u64,
}

pub fn gossip_rows(report: &RunReport) -> Vec<GossipRow> {
    let r = &report.resolved;
    report
        .records
        .iter()
        .filter_map(|rec| match &rec.detail {
            Detail::Gossip {
                f,
                rounds_rw,
                rounds_trivial,
                winner,
                coverage_rw,
                ..
            } => Some(GossipRow {
                n: r.n,
                d: r.degree.unwrap_or(0),
                k: rec.k,
                tau: r.tau.unwrap_or(0),
                phi: r.phi,
                f: *f,
                rounds_rw: *rounds_rw,
                rounds_trivial: *rounds_trivial,
                winner: winner.to_string(),
                coverage_rw: *coverage_rw,
                seed: rec.seed,
            }),
            _ => None,
        })
        .collect()
}

pub fn write_records_jsonl<W: Write>(
    records: &[SeedRecord],
    mut out: W,
) -> Result<(), HarnessError> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_gossip_csv<W: Write>(rows: &[GossipRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json`, `seeds.jsonl` and, for gossip sweeps, `gossip.csv`
/// into `dir`; returns the paths written.
pub fn write_artifacts(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("report.json");
    let mut out = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    written.push(path);
    let path = dir.join("seeds.jsonl");
    let mut out = BufWriter::new(File::create(&path)?);
    write_records_jsonl(&report.records, &mut out)?;
    out.flush()?;
    written.push(path);
    let rows = gossip_rows(report);
    if !rows.is_empty() {
        let path = dir.join("gossip.csv");
        write_gossip_csv(&rows, File::create(&path)?)?;
        written.push(path);
    }
    Ok(written)
}

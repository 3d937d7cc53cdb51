//! On-disk layout of a run directory.
//!
//! ```text
//! config.toml          canonical scenario
//! diagnostics.csv
//! summary.json         conservation and moment-monitor reports
//! snapshots/final.fields, snapshots/final.particles
//! history/index.json, history/frame_NNNNN.{fields,particles}
//! manifest.json
//! ```

use crate::Failure;
use rvm_core::history::{Frame, RunHistory};
use rvm_core::maxwell::{read_fields, write_fields, Grid};
use rvm_core::phase::{read_ensemble, write_ensemble, Mode, ParticleEnsemble};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub const HISTORY_INDEX: &str = "history/index.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the canonical `config.toml`.
    pub config_hash: String,
    pub mode: Mode,
    pub seed: u64,
    pub code_version: String,
    /// Wall-clock seconds since the Unix epoch.
    pub start_time: f64,
    pub end_time: f64,
    pub status: String,
    pub files: Vec<OutputFile>,
}

/// Writes files under a root directory and records each one.
pub struct OutputDir {
    root: PathBuf,
    pub files: Vec<OutputFile>,
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Assertion(format!("{}: {e}", path.display()))
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", root.display())))?;
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
        }
        fs::write(&path, bytes).map_err(|e| io_fail(&path, e))?;
        self.files.push(OutputFile { path: rel.to_string(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_frame(&mut self, stem: &str, frame: &Frame, mode: Mode) -> Result<(), Failure> {
        let fail = |e: rvm_core::CoreError| Failure::Assertion(e.to_string());
        let mut buf = Vec::new();
        write_fields(&frame.fields, &mut buf).map_err(fail)?;
        self.write(&format!("{stem}.fields"), &buf)?;
        let ens = ParticleEnsemble::new(mode, frame.fields.grid.len, frame.particles.clone()).map_err(fail)?;
        buf.clear();
        write_ensemble(&ens, &mut buf).map_err(fail)?;
        self.write(&format!("{stem}.particles"), &buf)
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFrame {
    time: f64,
    stem: String,
}

#[derive(Serialize, Deserialize)]
struct HistoryIndex {
    mode: Mode,
    grid: Grid,
    dt: f64,
    frames: Vec<IndexFrame>,
}

pub fn write_history(out: &mut OutputDir, h: &RunHistory) -> Result<(), Failure> {
    let mut frames = Vec::new();
    for (k, f) in h.frames.iter().enumerate() {
        let stem = format!("frame_{k:05}");
        out.write_frame(&format!("history/{stem}"), f, h.mode)?;
        frames.push(IndexFrame { time: f.time, stem });
    }
    let index = HistoryIndex { mode: h.mode, grid: h.grid, dt: h.dt, frames };
    out.write(HISTORY_INDEX, &serde_json::to_vec_pretty(&index).expect("index serializes"))
}

/// Load a stored history; a missing or unreadable history is a missing input.
pub fn read_history(run_dir: &Path) -> Result<RunHistory, Failure> {
    let index_path = run_dir.join(HISTORY_INDEX);
    let text = fs::read(&index_path).map_err(|e| Failure::Missing(format!("no stored history at {}: {e}", index_path.display())))?;
    let index: HistoryIndex = serde_json::from_slice(&text).map_err(|e| Failure::Missing(format!("{}: {e}", index_path.display())))?;
    let dir = run_dir.join("history");
    let mut frames = Vec::with_capacity(index.frames.len());
    for f in &index.frames {
        let read = |ext: &str| -> Result<Vec<u8>, Failure> {
            let p = dir.join(format!("{}.{ext}", f.stem));
            fs::read(&p).map_err(|e| Failure::Missing(format!("{}: {e}", p.display())))
        };
        let bad = |e: rvm_core::CoreError| Failure::Missing(format!("frame {}: {e}", f.stem));
        let fields = read_fields(read("fields")?.as_slice()).map_err(bad)?;
        let particles = read_ensemble(read("particles")?.as_slice()).map_err(bad)?.into_particles();
        frames.push(Frame { time: f.time, fields, particles });
    }
    RunHistory::new(index.mode, index.grid, index.dt, frames).map_err(|e| Failure::Missing(e.to_string()))
}

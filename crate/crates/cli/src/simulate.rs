use crate::store::{sha256_hex, write_history, OutputDir, RunManifest};
use crate::{CliResult, Failure};
use rvm_core::pic::{conservation_report, moment_inequality_monitor, run as run_scenario, DiagnosticSeries, Scenario};
use rvm_core::CoreError;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Configuration problems exit 2, numerical breakdown exits 1.
fn classify(e: CoreError) -> Failure {
    match e {
        CoreError::Config(_) | CoreError::Cfl { .. } | CoreError::Constraint(_) | CoreError::Geometry(_) => Failure::Usage(e.to_string()),
        _ => Failure::Assertion(e.to_string()),
    }
}

fn write_series(out: &mut OutputDir, series: &DiagnosticSeries) -> CliResult {
    let mut csv = Vec::new();
    series.write_csv(&mut csv).map_err(|e| Failure::Assertion(e.to_string()))?;
    out.write("diagnostics.csv", &csv)?;
    let summary = serde_json::json!({
        "conservation": conservation_report(series),
        "moment_monitor": moment_inequality_monitor(series),
    });
    out.write("summary.json", &serde_json::to_vec_pretty(&summary).expect("summary serializes"))
}

pub fn run(path: &Path, out_dir: &Path, seed: Option<u64>, dt: Option<f64>, grid: Option<[usize; 2]>) -> CliResult {
    let start = now();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Missing(format!("{}: {e}", path.display())))?;
    let mut scn = Scenario::from_toml(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        scn.seed = s;
    }
    if let Some(d) = dt {
        scn.dt = d;
    }
    if let Some(n) = grid {
        scn.grid.n = n;
    }
    scn.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let config = scn.to_toml();

    let mut out = OutputDir::create(out_dir)?;
    out.write("config.toml", config.as_bytes())?;
    let (status, result) = match run_scenario(&scn) {
        Ok(o) => {
            write_series(&mut out, &o.series)?;
            out.write_frame("snapshots/final", &o.final_frame, scn.mode)?;
            if let Some(h) = &o.history {
                write_history(&mut out, h)?;
            }
            ("complete", Ok(()))
        }
        Err(f) => {
            if let Some(series) = &f.series {
                write_series(&mut out, series)?;
            }
            if let Some(frame) = &f.last_good {
                out.write_frame("snapshots/last_good", frame, scn.mode)?;
            }
            let msg = f.to_string();
            (
                "failed",
                Err(match classify(f.error) {
                    Failure::Usage(_) => Failure::Usage(msg),
                    _ => Failure::Assertion(msg),
                }),
            )
        }
    };
    let manifest = RunManifest {
        config_hash: sha256_hex(config.as_bytes()),
        mode: scn.mode,
        seed: scn.seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        start_time: start,
        end_time: now(),
        status: status.to_string(),
        files: out.files.clone(),
    };
    out.write("manifest.json", &serde_json::to_vec_pretty(&manifest).expect("manifest serializes"))?;
    if result.is_ok() {
        println!("wrote {} files to {}", out.files.len(), out_dir.display());
    }
    result
}

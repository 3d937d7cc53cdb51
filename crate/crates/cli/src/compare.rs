use crate::store::read_history;
use crate::{CliResult, Failure};
use rvm_core::maxwell::{Spectral, SpectralInterpolator};
use rvm_core::retarded::{RepresentationEvaluator, RepresentationReport, RetardedQuadrature};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
#[serde(untagged)]
enum ProbeResult {
    Ok {
        #[serde(flatten)]
        terms: RepresentationReport,
        grid: [f64; 6],
        relative_error: f64,
    },
    Err {
        t: f64,
        x: [f64; 2],
        error: String,
    },
}

#[derive(Serialize)]
struct Summary {
    probes: usize,
    evaluated: usize,
    failed: usize,
    /// `|| total - grid ||_2 / || grid ||_2` over all evaluated probes and components.
    relative_l2_error: f64,
}

#[derive(Serialize)]
struct Report {
    probes: Vec<ProbeResult>,
    summary: Summary,
}

fn rel(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

pub fn run(run_dir: &Path, probes_path: &Path, out: Option<&Path>) -> CliResult {
    let text = std::fs::read_to_string(probes_path).map_err(|e| Failure::Missing(format!("{}: {e}", probes_path.display())))?;
    let probes: Vec<[f64; 3]> =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: expected [[t, x1, x2], ...]: {e}", probes_path.display())))?;
    let history = read_history(run_dir)?;
    let ev = RepresentationEvaluator::new(&history, &RetardedQuadrature::default()).map_err(|e| Failure::Missing(e.to_string()))?;
    let sp = Spectral::new(history.grid);
    let (mut num, mut den) = (0.0, 0.0);
    let mut results = Vec::with_capacity(probes.len());
    for &[t, x1, x2] in &probes {
        let x = [x1, x2];
        let grid = history.frame_at(t).map(|k| {
            let f = &history.frames[k].fields;
            let arrays: Vec<&[f64]> = f.e.iter().chain(f.b.iter()).map(|a| a.as_slice()).collect();
            let mut v = [0.0; 6];
            SpectralInterpolator::new(&sp, &arrays).eval(x, &mut v);
            v
        });
        match grid.and_then(|g| ev.evaluate(t, x).map(|r| (r, g))) {
            Ok((terms, grid)) => {
                let d: f64 = (0..6).map(|c| (terms.total[c] - grid[c]).powi(2)).sum();
                let g2: f64 = grid.iter().map(|v| v * v).sum();
                num += d;
                den += g2;
                results.push(ProbeResult::Ok { terms, grid, relative_error: rel(d, g2) });
            }
            Err(e) => {
                eprintln!("warning: probe t = {t}, x = {x:?}: {e}");
                results.push(ProbeResult::Err { t, x, error: e.to_string() });
            }
        }
    }
    let failed = results.iter().filter(|r| matches!(r, ProbeResult::Err { .. })).count();
    let summary = Summary { probes: probes.len(), evaluated: probes.len() - failed, failed, relative_l2_error: rel(num, den) };
    eprintln!("{} of {} probes evaluated, relative L2 error {:.3e}", summary.evaluated, summary.probes, summary.relative_l2_error);
    let json = serde_json::to_string_pretty(&Report { probes: results, summary }).expect("report serializes");
    match out {
        Some(p) => std::fs::write(p, json + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

use crate::error::Result;
use crate::phase::Mode;
use serde::Serialize;
use std::io::Write;

/// One diagnostic sample. Moments are `sum_i w_i p0_i^N`; field norms are of
/// `|K| = (|E|^2 + |B|^2)^(1/2)` on the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticRecord {
    pub step: usize,
    pub time: f64,
    pub field_energy: f64,
    pub kinetic_energy: f64,
    pub total_energy: f64,
    pub gauss_residual: f64,
    pub div_b_residual: f64,
    /// `4 pi sum_i w_i`.
    pub total_charge: f64,
    pub max_weight: f64,
    /// Grid maximum of `rho / (4 pi)`.
    pub density_max: f64,
    pub k_linf: f64,
    pub moments: Vec<f64>,
    /// `||K||_{L^(N + d_p)}` per configured `N`.
    pub k_norms: Vec<f64>,
    /// `sum_i w_i p0_i^(N - 1) |K(x_i)|` per configured `N`.
    pub force_moments: Vec<f64>,
    /// Largest `|V3 + A3 - (V3 + A3)(0)|` over tracers.
    pub invariant_drift: f64,
    /// `max |A3|` of the evolved potential.
    pub a3_sup: f64,
    /// Largest gap between the evolved and the elliptic `A3` (mean removed).
    pub gauge_drift: f64,
    /// Binned sup of `int <p3>^(5 + delta) f dp3`.
    pub p3_line_sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticSeries {
    pub mode: Mode,
    pub moment_orders: Vec<f64>,
    pub records: Vec<DiagnosticRecord>,
    /// Per tracer, the largest invariant drift over the run.
    pub tracer_drift: Vec<f64>,
    /// Weights at the end equal the loaded weights bit for bit.
    pub weights_unchanged: bool,
}

fn order_label(n: f64) -> String {
    format!("{n}")
}

impl DiagnosticSeries {
    pub fn columns(&self) -> Vec<String> {
        let mut c: Vec<String> = [
            "step",
            "time",
            "field_energy",
            "kinetic_energy",
            "total_energy",
            "gauss_residual",
            "div_b_residual",
            "total_charge",
            "max_weight",
            "density_max",
            "k_linf",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let d = self.mode.dim_p() as f64;
        for &n in &self.moment_orders {
            c.push(format!("moment_{}", order_label(n)));
        }
        for &n in &self.moment_orders {
            c.push(format!("k_norm_{}", order_label(n + d)));
        }
        for &n in &self.moment_orders {
            c.push(format!("force_moment_{}", order_label(n)));
        }
        c.extend(["invariant_drift", "a3_sup", "gauge_drift", "p3_line_sup"].iter().map(|s| s.to_string()));
        c
    }

    /// One header row, then one row per record; floats use the shortest
    /// representation that round-trips.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| crate::error::CoreError::Io(e.to_string());
        w.write_record(self.columns()).map_err(io)?;
        for r in &self.records {
            let mut row = vec![r.step.to_string()];
            let fixed = [
                r.time,
                r.field_energy,
                r.kinetic_energy,
                r.total_energy,
                r.gauss_residual,
                r.div_b_residual,
                r.total_charge,
                r.max_weight,
                r.density_max,
                r.k_linf,
            ];
            row.extend(fixed.iter().map(|v| v.to_string()));
            row.extend(r.moments.iter().map(|v| v.to_string()));
            row.extend(r.k_norms.iter().map(|v| v.to_string()));
            row.extend(r.force_moments.iter().map(|v| v.to_string()));
            row.extend([r.invariant_drift, r.a3_sup, r.gauge_drift, r.p3_line_sup].iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    /// `max |E(t) - E(0)| / |E(0)|` (absolute when `E(0) = 0`).
    pub energy_drift: f64,
    /// `max |Q(t) - Q(0)|`.
    pub charge_drift: f64,
    pub weights_unchanged: bool,
    pub gauss_initial: f64,
    pub gauss_max: f64,
    pub density_max_sup: f64,
    pub invariant_drift: f64,
    pub tracer_drift_max: f64,
    pub a3_sup: f64,
    pub gauge_drift: f64,
    pub p3_line_sup: f64,
}

pub fn conservation_report(series: &DiagnosticSeries) -> ConservationReport {
    let recs = &series.records;
    let sup = |f: &dyn Fn(&DiagnosticRecord) -> f64| recs.iter().map(f).fold(0.0, f64::max);
    let (e0, q0, g0) = recs.first().map(|r| (r.total_energy, r.total_charge, r.gauss_residual)).unwrap_or((0.0, 0.0, 0.0));
    let scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
    ConservationReport {
        energy_drift: sup(&|r| (r.total_energy - e0).abs()) / scale,
        charge_drift: sup(&|r| (r.total_charge - q0).abs()),
        weights_unchanged: series.weights_unchanged,
        gauss_initial: g0,
        gauss_max: sup(&|r| r.gauss_residual),
        density_max_sup: sup(&|r| r.density_max),
        invariant_drift: sup(&|r| r.invariant_drift),
        tracer_drift_max: series.tracer_drift.iter().copied().fold(0.0, f64::max),
        a3_sup: sup(&|r| r.a3_sup),
        gauge_drift: sup(&|r| r.gauge_drift),
        p3_line_sup: sup(&|r| r.p3_line_sup),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentMonitorRow {
    pub n: f64,
    /// `sup (d/dt ||p0^N f||^(1/(N + d_p)))_+ / ||K||_{L^(N + d_p)}` over steps.
    pub empirical_constant: f64,
    /// `sup (d/dt ||p0^N f||)_+ / ||p0^(N-1) f |K| ||` over steps.
    pub proof_step_constant: f64,
    pub max_abs_derivative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentMonitorReport {
    pub rows: Vec<MomentMonitorRow>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        0.0
    } else if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// Discrete derivatives between consecutive records against midpoint field
/// quantities.
pub fn moment_inequality_monitor(series: &DiagnosticSeries) -> MomentMonitorReport {
    let d = series.mode.dim_p() as f64;
    let recs = &series.records;
    let rows = series
        .moment_orders
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let q = n + d;
            let mut row = MomentMonitorRow { n, empirical_constant: 0.0, proof_step_constant: 0.0, max_abs_derivative: 0.0 };
            for w in recs.windows(2) {
                let dt = w[1].time - w[0].time;
                if dt <= 0.0 {
                    continue;
                }
                let dm = (w[1].moments[k] - w[0].moments[k]) / dt;
                let droot = (w[1].moments[k].powf(1.0 / q) - w[0].moments[k].powf(1.0 / q)) / dt;
                let kn = 0.5 * (w[0].k_norms[k] + w[1].k_norms[k]);
                let fm = 0.5 * (w[0].force_moments[k] + w[1].force_moments[k]);
                row.max_abs_derivative = row.max_abs_derivative.max(dm.abs());
                row.empirical_constant = row.empirical_constant.max(ratio(droot, kn));
                row.proof_step_constant = row.proof_step_constant.max(ratio(dm, fm));
            }
            row
        })
        .collect();
    MomentMonitorReport { rows }
}

use crate::error::{LabError, Result};
use crate::report::IneqReport;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GronwallRun {
    pub t: Vec<f64>,
    /// Saturated `g` with `g = M (1 + ||g||_{L^p(0, t)})`.
    pub g: Vec<f64>,
    /// `ln(g / (2 M e^{4^p t M^p}))`, `-inf` where `g = 0`.
    pub log_margin: Vec<f64>,
    pub monotone: bool,
    pub report: IneqReport,
}

/// March the saturated solution on `n` uniform steps over `[0, T]`, using
/// the trapezoid rule for `int g^p` and a scalar fixed point per step, and
/// compare against `2 M e^{4^p t M^p}` in log form.
pub fn gronwall_check<F: Fn(f64) -> f64>(m: F, p: f64, t_end: f64, n: usize) -> Result<GronwallRun> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::Input(format!("need 1 <= p < inf, got {p}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) || n == 0 {
        return Err(LabError::Input("need T > 0 and at least one step".into()));
    }
    let h = t_end / n as f64;
    let t: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mv: Vec<f64> = t.iter().map(|&s| m(s)).collect();
    for w in mv.windows(2) {
        if !(w[0] >= 0.0 && w[1] >= w[0] && w[1].is_finite()) {
            return Err(LabError::Input("M must be finite, nonnegative and nondecreasing".into()));
        }
    }
    let mut g = vec![mv[0]];
    let mut integral = 0.0f64;
    for i in 1..=n {
        let prev = g[i - 1].powf(p);
        let mut gi = g[i - 1].max(mv[i]);
        let mut converged = false;
        for _ in 0..200 {
            let next = mv[i] * (1.0 + (integral + 0.5 * h * (prev + gi.powf(p))).powf(1.0 / p));
            if !next.is_finite() {
                return Err(LabError::Divergence(format!("non-finite iterate at t = {}", t[i])));
            }
            let done = (next - gi).abs() <= 1e-15 * next.abs();
            gi = next;
            if done {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(LabError::Divergence(format!("no fixed point at t = {}", t[i])));
        }
        integral += 0.5 * h * (prev + gi.powf(p));
        g.push(gi);
    }
    let four_p = 4f64.powf(p);
    let mut rep = IneqReport::new("gronwall", "t M g");
    rep.hard = true;
    rep.constant = Some(1.0);
    let mut log_margin = Vec::with_capacity(g.len());
    let mut holds = true;
    for i in 0..g.len() {
        let lm = if g[i] == 0.0 { f64::NEG_INFINITY } else { g[i].ln() - (2.0 * mv[i]).ln() - four_p * t[i] * mv[i].powf(p) };
        holds &= lm <= 0.0;
        log_margin.push(lm);
        rep.observe(lm.exp(), &[t[i], mv[i], g[i]]);
    }
    let monotone = g.windows(2).all(|w| w[1] >= w[0]);
    rep.pass = holds && monotone;
    rep.note = format!("g / bound at most {:.3e}, monotone {monotone}", rep.max_ratio);
    Ok(GronwallRun { t, g, log_margin, monotone, report: rep })
}

/// The four configurations of the suite: `(label, M, p)` on `[0, 3]`.
pub fn gronwall_cases() -> Vec<(&'static str, Box<dyn Fn(f64) -> f64 + Sync>, f64)> {
    vec![
        ("M=1,p=1", Box::new(|_| 1.0), 1.0),
        ("M=1+t,p=2", Box::new(|t| 1.0 + t), 2.0),
        ("M=0.5e^t,p=1.5", Box::new(|t: f64| 0.5 * t.exp()), 1.5),
        ("M=2,p=3", Box::new(|_| 2.0), 3.0),
    ]
}

pub fn gronwall_suite(steps: usize) -> Result<Vec<IneqReport>> {
    gronwall_cases()
        .into_iter()
        .map(|(label, m, p)| {
            let mut r = gronwall_check(m, p, 3.0, steps)?.report;
            r.name = format!("gronwall[{label}]");
            Ok(r)
        })
        .collect()
}

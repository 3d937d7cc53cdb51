use super::sampler::{EmSample, FieldSampler};
use crate::error::{CoreError, Result};
use crate::phase::Mode;
use crate::vecops::{self, V3};

/// Point on a characteristic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharState {
    pub x: [f64; 2],
    pub p: V3,
    pub t: f64,
    pub mode: Mode,
}

impl CharState {
    pub fn new(mode: Mode, t: f64, x: [f64; 2], p: &[f64]) -> Result<Self> {
        if p.len() != mode.dim_p() {
            return Err(CoreError::Mode(format!("momentum has {} components in {} mode", p.len(), mode.label())));
        }
        let mut a = [0.0; 3];
        a[..p.len()].copy_from_slice(p);
        if a.iter().chain(x.iter()).chain(std::iter::once(&t)).any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("characteristic state".into()));
        }
        Ok(CharState { x, p: a, t, mode })
    }

    pub fn p0(&self) -> f64 {
        1f64.hypot(vecops::norm(&self.p))
    }
}

#[inline]
fn velocity(p: &V3) -> V3 {
    let p0 = 1f64.hypot(vecops::norm(p));
    [p[0] / p0, p[1] / p0, p[2] / p0]
}

/// Momentum update over `h` in fixed fields: half electric kick, exact
/// rotation about `B` by `h |B| / p0`, half electric kick.
#[inline]
pub fn kick(p: V3, f: &EmSample, h: f64) -> V3 {
    let mut q = p;
    vecops::axpy(&mut q, 0.5 * h, &f.e);
    let bn = vecops::norm(&f.b);
    if bn > 0.0 {
        let g = 1f64.hypot(vecops::norm(&q));
        let k = vecops::scale(&f.b, 1.0 / bn);
        let a = -h * bn / g;
        let (s, c) = a.sin_cos();
        let kxq = vecops::cross(&k, &q);
        let kq = vecops::dot(&k, &q);
        q = [
            q[0] * c + kxq[0] * s + k[0] * kq * (1.0 - c),
            q[1] * c + kxq[1] * s + k[1] * kq * (1.0 - c),
            q[2] * c + kxq[2] * s + k[2] * kq * (1.0 - c),
        ];
    }
    vecops::axpy(&mut q, 0.5 * h, &f.e);
    q
}

fn step(state: &CharState, fields: &dyn FieldSampler, h: f64) -> Result<(CharState, [f64; 2], EmSample)> {
    let v = velocity(&state.p);
    let xh = [state.x[0] + 0.5 * h * v[0], state.x[1] + 0.5 * h * v[1]];
    let f = fields.sample(state.t + 0.5 * h, xh)?;
    f.check_mode(state.mode)?;
    let p = kick(state.p, &f, h);
    let v = velocity(&p);
    let x = [xh[0] + 0.5 * h * v[0], xh[1] + 0.5 * h * v[1]];
    Ok((CharState { x, p, t: state.t + h, mode: state.mode }, xh, f))
}

/// One symmetric drift-kick-drift step; time reversible and second order.
pub fn push(state: &CharState, fields: &dyn FieldSampler, dt: f64) -> Result<CharState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CoreError::Constraint(format!("dt must be positive, got {dt}")));
    }
    if fields.mode() != state.mode {
        return Err(CoreError::Mode("sampler and state disagree on mode".into()));
    }
    Ok(step(state, fields, dt)?.0)
}

fn check_history(fields: &dyn FieldSampler, a: f64, b: f64) -> Result<()> {
    if let Some((lo, hi)) = fields.time_range() {
        let (a, b) = (a.min(b), a.max(b));
        let slack = 1e-12 * (1.0 + hi.abs());
        if a < lo - slack || b > hi + slack {
            return Err(CoreError::History(format!("need [{a}, {b}], have [{lo}, {hi}]")));
        }
    }
    Ok(())
}

/// `(X, V)(t_to; t_from, x, p)` by steps of at most `max_dt`; backward
/// integration runs the same scheme with negative step.
pub fn flow_map(fields: &dyn FieldSampler, t_from: f64, t_to: f64, x: [f64; 2], p: &[f64], max_dt: f64) -> Result<CharState> {
    let mut s = CharState::new(fields.mode(), t_from, x, p)?;
    if t_to == t_from {
        return Ok(s);
    }
    if !(max_dt > 0.0) {
        return Err(CoreError::Constraint(format!("max_dt must be positive, got {max_dt}")));
    }
    check_history(fields, t_from, t_to)?;
    let n = ((t_to - t_from).abs() / max_dt).ceil().max(1.0) as usize;
    let h = (t_to - t_from) / n as f64;
    for k in 0..n {
        s = step(&s, fields, h)?.0;
        s.t = t_from + (k + 1) as f64 * h;
    }
    Ok(s)
}

/// `d(X, V) / d(x, p)`, ordered `(x1, x2, p1, .., p_{d_p})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowJacobian {
    n: usize,
    m: [[f64; 5]; 5],
}

impl FlowJacobian {
    pub fn identity(mode: Mode) -> Self {
        let n = 2 + mode.dim_p();
        let mut m = [[0.0; 5]; 5];
        for (i, row) in m.iter_mut().enumerate().take(n) {
            row[i] = 1.0;
        }
        FlowJacobian { n, m }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    /// Frobenius norm of rows `rows`, optionally after subtracting the identity.
    fn block_norm(&self, rows: std::ops::Range<usize>, minus_identity: bool) -> f64 {
        let mut s = 0.0;
        for i in rows {
            for j in 0..self.n {
                let v = self.m[i][j] - if minus_identity && i == j { 1.0 } else { 0.0 };
                s += v * v;
            }
        }
        s.sqrt()
    }

    /// `|grad X|` (Frobenius).
    pub fn dx_norm(&self) -> f64 {
        self.block_norm(0..2, false)
    }

    /// `|grad V|` (Frobenius).
    pub fn dv_norm(&self) -> f64 {
        self.block_norm(2..self.n, false)
    }

    /// `|grad X - [I 0]| + |grad V - [0 I]|`.
    pub fn deviation(&self) -> f64 {
        self.block_norm(0..2, true) + self.block_norm(2..self.n, true)
    }

    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.m;
        let mut det = 1.0;
        for c in 0..n {
            let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("rows");
            if a[piv][c] == 0.0 {
                return 0.0;
            }
            if piv != c {
                a.swap(piv, c);
                det = -det;
            }
            det *= a[c][c];
            for r in (c + 1)..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
        det
    }
}

/// `d phat / d p = (I - phat phat^T) / p0`.
fn dvel(p: &V3) -> [[f64; 3]; 3] {
    let p0 = 1f64.hypot(vecops::norm(p));
    let v = velocity(p);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = ((i == j) as u8 as f64 - v[i] * v[j]) / p0;
        }
    }
    m
}

fn drift_jac(j: &mut FlowJacobian, p: &V3, h: f64, d: usize) {
    let m = dvel(p);
    let n = j.n;
    for col in 0..n {
        for i in 0..2 {
            let mut s = 0.0;
            for k in 0..d {
                s += m[i][k] * j.m[2 + k][col];
            }
            j.m[i][col] += h * s;
        }
    }
}

/// One step of the characteristic system and its linearization; the kick
/// Jacobian uses the implicit midpoint (Cayley) form.
pub fn variational_push(state: &CharState, jac: &FlowJacobian, fields: &dyn FieldSampler, dt: f64) -> Result<(CharState, FlowJacobian)> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(CoreError::Constraint(format!("dt must be finite and nonzero, got {dt}")));
    }
    let d = state.mode.dim_p();
    if jac.n != 2 + d {
        return Err(CoreError::Shape("Jacobian size does not match mode".into()));
    }
    let (next, xh, _f) = step(state, fields, dt)?;
    let grad = fields.gradient(state.t + 0.5 * dt, xh)?;
    let f = fields.sample(state.t + 0.5 * dt, xh)?;
    let mut j = *jac;
    drift_jac(&mut j, &state.p, 0.5 * dt, d);
    let pm = vecops::scale(&vecops::add(&state.p, &next.p), 0.5);
    let mv = dvel(&pm);
    let vm = velocity(&pm);
    // dF/dp = -[B]x M, dF/dx_j = dE/dx_j + phat x dB/dx_j
    let mut app = [[0.0; 3]; 3];
    for k in 0..3 {
        let col = [mv[0][k], mv[1][k], mv[2][k]];
        let c = vecops::cross(&col, &f.b);
        for i in 0..3 {
            app[i][k] = c[i];
        }
    }
    let mut apx = [[0.0; 2]; 3];
    for jx in 0..2 {
        let c = vecops::add(&grad.de[jx], &vecops::cross(&vm, &grad.db[jx]));
        for i in 0..3 {
            apx[i][jx] = c[i];
        }
    }
    let h = dt;
    let mut lhs = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            lhs[i][k] = (i == k) as u8 as f64 - 0.5 * h * app[i][k];
        }
        if i >= d {
            lhs[i] = [0.0; 3];
            lhs[i][i] = 1.0;
        }
    }
    for col in 0..j.n {
        let mut dp = [0.0; 3];
        for k in 0..d {
            dp[k] = j.m[2 + k][col];
        }
        let dx = [j.m[0][col], j.m[1][col]];
        let mut rhs = [0.0; 3];
        for i in 0..d {
            let mut s = dp[i];
            for k in 0..d {
                s += 0.5 * h * app[i][k] * dp[k];
            }
            s += h * (apx[i][0] * dx[0] + apx[i][1] * dx[1]);
            rhs[i] = s;
        }
        let sol = vecops::solve3(lhs, rhs).ok_or_else(|| CoreError::Constraint("singular kick linearization".into()))?;
        for k in 0..d {
            j.m[2 + k][col] = sol[k];
        }
    }
    drift_jac(&mut j, &next.p, 0.5 * dt, d);
    Ok((next, j))
}

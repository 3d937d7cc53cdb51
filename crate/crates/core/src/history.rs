//! Stored run frames: fields and particles at equally spaced times.

use crate::characteristics::{EmGradient, EmSample, FieldSampler};
use crate::error::{CoreError, Result};
use crate::maxwell::{FieldState, Grid, Spectral, SpectralInterpolator};
use crate::phase::{Mode, Particle};

/// Fields and particles (momenta synchronized to `time`) at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub time: f64,
    pub fields: FieldState,
    pub particles: Vec<Particle>,
}

/// Frames at times `k * dt`, `k = 0, 1, ..`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunHistory {
    pub mode: Mode,
    pub grid: Grid,
    pub dt: f64,
    pub frames: Vec<Frame>,
}

impl RunHistory {
    pub fn new(mode: Mode, grid: Grid, dt: f64, frames: Vec<Frame>) -> Result<Self> {
        let h = RunHistory { mode, grid, dt, frames };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(CoreError::History(format!("frame spacing must be positive, got {}", self.dt)));
        }
        for (k, f) in self.frames.iter().enumerate() {
            let want = k as f64 * self.dt;
            if (f.time - want).abs() > 1e-9 * self.dt.max(want) {
                return Err(CoreError::History(format!("frame {k} at t = {} but expected {want}", f.time)));
            }
            if f.fields.mode != self.mode || f.fields.grid != self.grid {
                return Err(CoreError::History(format!("frame {k} has a different mode or grid")));
            }
        }
        Ok(())
    }

    pub fn t_last(&self) -> f64 {
        self.frames.last().map(|f| f.time).unwrap_or(0.0)
    }

    /// Index of the frame stored at time `t`.
    pub fn frame_at(&self, t: f64) -> Result<usize> {
        if self.frames.is_empty() {
            return Err(CoreError::History("no frames stored".into()));
        }
        let k = (t / self.dt).round();
        if k < 0.0 || k as usize >= self.frames.len() {
            return Err(CoreError::History(format!("t = {t} outside stored range [0, {}]", self.t_last())));
        }
        let k = k as usize;
        if (self.frames[k].time - t).abs() > 1e-9 * self.dt.max(t.abs()) {
            return Err(CoreError::History(format!("t = {t} is not a stored frame time")));
        }
        Ok(k)
    }
}

/// Spectral interpolants of all six field components and their gradients.
pub(crate) fn frame_interpolator(sp: &Spectral, f: &FieldState) -> SpectralInterpolator {
    let arrays: Vec<&[f64]> = f.e.iter().chain(f.b.iter()).map(|a| a.as_slice()).collect();
    SpectralInterpolator::with_gradients(sp, &arrays)
}

/// Field sampler over a history: trigonometric interpolation in space,
/// linear interpolation in time.
pub struct HistorySampler {
    mode: Mode,
    dt: f64,
    t_last: f64,
    interps: Vec<SpectralInterpolator>,
}

impl HistorySampler {
    pub fn new(history: &RunHistory) -> Result<Self> {
        history.validate()?;
        if history.frames.is_empty() {
            return Err(CoreError::History("no frames stored".into()));
        }
        let sp = Spectral::new(history.grid);
        Ok(HistorySampler {
            mode: history.mode,
            dt: history.dt,
            t_last: history.t_last(),
            interps: history.frames.iter().map(|f| frame_interpolator(&sp, &f.fields)).collect(),
        })
    }

    fn eval(&self, t: f64, x: [f64; 2]) -> Result<[f64; 18]> {
        if t < -1e-12 || t > self.t_last + 1e-12 {
            return Err(CoreError::History(format!("t = {t} outside [0, {}]", self.t_last)));
        }
        let u = (t / self.dt).clamp(0.0, (self.interps.len() - 1) as f64);
        let k = (u.floor() as usize).min(self.interps.len().saturating_sub(2));
        let a = if self.interps.len() == 1 { 0.0 } else { u - k as f64 };
        let mut v0 = [0.0; 18];
        self.interps[k].eval(x, &mut v0);
        if a > 0.0 {
            let mut v1 = [0.0; 18];
            self.interps[k + 1].eval(x, &mut v1);
            for i in 0..18 {
                v0[i] = (1.0 - a) * v0[i] + a * v1[i];
            }
        }
        if self.mode == Mode::TwoD {
            for base in [0, 6, 12] {
                v0[base + 2] = 0.0;
                v0[base + 3] = 0.0;
                v0[base + 4] = 0.0;
            }
        }
        Ok(v0)
    }
}

impl FieldSampler for HistorySampler {
    fn mode(&self) -> Mode {
        self.mode
    }

    fn sample(&self, t: f64, x: [f64; 2]) -> Result<EmSample> {
        let v = self.eval(t, x)?;
        Ok(EmSample { e: [v[0], v[1], v[2]], b: [v[3], v[4], v[5]] })
    }

    fn gradient(&self, t: f64, x: [f64; 2]) -> Result<EmGradient> {
        let v = self.eval(t, x)?;
        Ok(EmGradient { de: [[v[6], v[7], v[8]], [v[12], v[13], v[14]]], db: [[v[9], v[10], v[11]], [v[15], v[16], v[17]]] })
    }

    fn time_range(&self) -> Option<(f64, f64)> {
        Some((0.0, self.t_last))
    }
}

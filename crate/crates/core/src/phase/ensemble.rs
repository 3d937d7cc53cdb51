use super::Mode;
use crate::error::{CoreError, Result};

/// One macro-particle: position, momentum (third slot zero in 2D) and weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub x: [f64; 2],
    pub p: [f64; 3],
    pub w: f64,
}

/// Weighted particles sampling `f` on a periodic box.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleEnsemble {
    mode: Mode,
    box_len: [f64; 2],
    particles: Vec<Particle>,
}

impl ParticleEnsemble {
    pub fn new(mode: Mode, box_len: [f64; 2], particles: Vec<Particle>) -> Result<Self> {
        if !(box_len[0] > 0.0 && box_len[1] > 0.0 && box_len.iter().all(|v| v.is_finite())) {
            return Err(CoreError::Geometry(format!("box extents must be positive, got {box_len:?}")));
        }
        for (i, q) in particles.iter().enumerate() {
            if !(q.w > 0.0 && q.w.is_finite()) {
                return Err(CoreError::Constraint(format!("particle {i}: weight {} not positive", q.w)));
            }
            if q.x.iter().chain(q.p.iter()).any(|v| !v.is_finite()) {
                return Err(CoreError::NonFinite(format!("particle {i}")));
            }
            if mode == Mode::TwoD && q.p[2] != 0.0 {
                return Err(CoreError::Mode(format!("particle {i}: planar mode with nonzero p3")));
            }
        }
        Ok(ParticleEnsemble { mode, box_len, particles })
    }

    pub fn empty(mode: Mode, box_len: [f64; 2]) -> Self {
        ParticleEnsemble { mode, box_len, particles: Vec::new() }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim_p(&self) -> usize {
        self.mode.dim_p()
    }

    pub fn box_len(&self) -> [f64; 2] {
        self.box_len
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        crate::vecops::pairwise_sum_by(self.particles.len(), &|i| self.particles[i].w)
    }

    pub fn into_particles(self) -> Vec<Particle> {
        self.particles
    }
}

//! Columnar little-endian ensemble snapshot.
//!
//! Layout: magic `RVME`, `u32` version (1), `u32` dim_p, `u64` count,
//! `f64` box extents (2), then `count` values per column in the order
//! x1, x2, p1 .. p_{dim_p}, w.

use super::{Mode, Particle, ParticleEnsemble};
use crate::error::{CoreError, Result};
use std::io::{Read, Write};

pub const ENSEMBLE_MAGIC: &[u8; 4] = b"RVME";

pub fn write_ensemble<W: Write>(ens: &ParticleEnsemble, mut out: W) -> Result<()> {
    let d = ens.dim_p();
    let ps = ens.particles();
    let mut buf = Vec::with_capacity(36 + ps.len() * (3 + d) * 8);
    buf.extend_from_slice(ENSEMBLE_MAGIC);
    buf.extend_from_slice(&1u32.to_le_bytes());
    buf.extend_from_slice(&(d as u32).to_le_bytes());
    buf.extend_from_slice(&(ps.len() as u64).to_le_bytes());
    for v in ens.box_len() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut col = |f: &dyn Fn(&Particle) -> f64| {
        for q in ps {
            buf.extend_from_slice(&f(q).to_le_bytes());
        }
    };
    col(&|q| q.x[0]);
    col(&|q| q.x[1]);
    for k in 0..d {
        col(&|q| q.p[k]);
    }
    col(&|q| q.w);
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_ensemble<R: Read>(mut input: R) -> Result<ParticleEnsemble> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut cur = Cursor { b: &bytes, at: 0 };
    if cur.take(4)? != ENSEMBLE_MAGIC {
        return Err(CoreError::Format("bad ensemble magic".into()));
    }
    let version = cur.u32()?;
    if version != 1 {
        return Err(CoreError::Format(format!("unsupported ensemble version {version}")));
    }
    let d = cur.u32()? as usize;
    let mode = Mode::from_dim_p(d).ok_or_else(|| CoreError::Format(format!("dim_p {d}")))?;
    let n = cur.u64()? as usize;
    let box_len = [cur.f64()?, cur.f64()?];
    let mut cols = vec![vec![0.0; n]; 3 + d];
    for c in cols.iter_mut() {
        for v in c.iter_mut() {
            *v = cur.f64()?;
        }
    }
    if cur.at != bytes.len() {
        return Err(CoreError::Format("trailing bytes in ensemble snapshot".into()));
    }
    let particles = (0..n)
        .map(|i| {
            let mut p = [0.0; 3];
            for k in 0..d {
                p[k] = cols[2 + k][i];
            }
            Particle { x: [cols[0][i], cols[1][i]], p, w: cols[2 + d][i] }
        })
        .collect();
    ParticleEnsemble::new(mode, box_len, particles)
}

pub(crate) struct Cursor<'a> {
    pub b: &'a [u8],
    pub at: usize,
}

impl<'a> Cursor<'a> {
    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.b.len() {
            return Err(CoreError::Format("truncated file".into()));
        }
        let s = &self.b[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }
    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

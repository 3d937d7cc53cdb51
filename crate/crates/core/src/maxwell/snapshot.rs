//! Little-endian field snapshot.
//!
//! Layout: magic `RVMF`, `u32` version (1), `u8` mode (0 planar, 1 for 2.5d),
//! `u32` n1, `u32` n2, `f64` L1, `f64` L2, `f64` h1, `f64` h2, `f64` time,
//! `u32` component count, then per component a `u8` id
//! (0..=5 for E1, E2, E3, B1, B2, B3) followed by `n1 * n2` values with the
//! first index fastest.

use super::fields::FieldState;
use super::grid::Grid;
use crate::error::{CoreError, Result};
use crate::phase::snapshot_cursor::Cursor;
use crate::phase::Mode;
use std::io::{Read, Write};

pub const FIELD_MAGIC: &[u8; 4] = b"RVMF";

fn components(mode: Mode) -> &'static [u8] {
    match mode {
        Mode::TwoD => &[0, 1, 5],
        Mode::TwoHalfD => &[0, 1, 2, 3, 4, 5],
    }
}

pub fn write_fields<W: Write>(f: &FieldState, mut out: W) -> Result<()> {
    f.validate()?;
    let comps = components(f.mode);
    let n = f.grid.size();
    let mut buf = Vec::with_capacity(64 + comps.len() * (1 + 8 * n));
    buf.extend_from_slice(FIELD_MAGIC);
    buf.extend_from_slice(&1u32.to_le_bytes());
    buf.push(match f.mode {
        Mode::TwoD => 0,
        Mode::TwoHalfD => 1,
    });
    buf.extend_from_slice(&(f.grid.n[0] as u32).to_le_bytes());
    buf.extend_from_slice(&(f.grid.n[1] as u32).to_le_bytes());
    let h = f.grid.h();
    for v in [f.grid.len[0], f.grid.len[1], h[0], h[1], f.time] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(comps.len() as u32).to_le_bytes());
    for &c in comps {
        buf.push(c);
        let a = if c < 3 { &f.e[c as usize] } else { &f.b[c as usize - 3] };
        for v in a {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_fields<R: Read>(mut input: R) -> Result<FieldState> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut cur = Cursor { b: &bytes, at: 0 };
    if cur.take(4)? != FIELD_MAGIC {
        return Err(CoreError::Format("bad field magic".into()));
    }
    let version = cur.u32()?;
    if version != 1 {
        return Err(CoreError::Format(format!("unsupported field version {version}")));
    }
    let mode = match cur.u8()? {
        0 => Mode::TwoD,
        1 => Mode::TwoHalfD,
        m => return Err(CoreError::Format(format!("unknown mode byte {m}"))),
    };
    let n = [cur.u32()? as usize, cur.u32()? as usize];
    let len = [cur.f64()?, cur.f64()?];
    let _h = [cur.f64()?, cur.f64()?];
    let time = cur.f64()?;
    let grid = Grid::new(n, len).map_err(|e| CoreError::Format(e.to_string()))?;
    let mut f = FieldState::zeros(mode, grid);
    f.time = time;
    let count = cur.u32()? as usize;
    for _ in 0..count {
        let id = cur.u8()? as usize;
        if id > 5 {
            return Err(CoreError::Format(format!("unknown component id {id}")));
        }
        let a = if id < 3 { &mut f.e[id] } else { &mut f.b[id - 3] };
        for v in a.iter_mut() {
            *v = cur.f64()?;
        }
    }
    if cur.at != bytes.len() {
        return Err(CoreError::Format("trailing bytes in field snapshot".into()));
    }
    f.validate()?;
    Ok(f)
}

//! Binary snapshot format for grid fields.
//!
//! Layout (little-endian):
//!   bytes 0..12   magic `b"KINLABSNAP\0\0"`
//!   bytes 12..16  format version (u32), currently 1
//!   n_per_axis: u32, box_half_width: f64, support_radius: f64,
//!   flags: u32 (bit 0: complex), then values row-major as f64
//!   (re/im pairs when complex).

use crate::error::{KinlabError, Result};
use crate::grid::{ComplexField, Field, VelocityGrid};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::sync::Arc;

const MAGIC: &[u8; 12] = b"KINLABSNAP\0\0";
const VERSION: u32 = 1;
const FLAG_COMPLEX: u32 = 1;

fn write_header(w: &mut impl Write, grid: &VelocityGrid, flags: u32) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.box_half_width().to_le_bytes())?;
    w.write_all(&grid.support_radius().to_le_bytes())?;
    w.write_all(&flags.to_le_bytes())?;
    Ok(())
}

fn read_header(r: &mut impl Read) -> Result<(Arc<VelocityGrid>, u32)> {
    let mut magic = [0u8; 12];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(KinlabError::SnapshotFormat("bad magic".into()));
    }
    let mut u4 = [0u8; 4];
    let mut u8b = [0u8; 8];
    r.read_exact(&mut u4)?;
    let version = u32::from_le_bytes(u4);
    if version != VERSION {
        return Err(KinlabError::SnapshotFormat(format!(
            "unsupported version {version}"
        )));
    }
    r.read_exact(&mut u4)?;
    let n = u32::from_le_bytes(u4) as usize;
    r.read_exact(&mut u8b)?;
    let l = f64::from_le_bytes(u8b);
    r.read_exact(&mut u8b)?;
    let radius = f64::from_le_bytes(u8b);
    r.read_exact(&mut u4)?;
    let flags = u32::from_le_bytes(u4);
    let grid = VelocityGrid::new(n, l, radius)?;
    Ok((grid, flags))
}

pub fn write_field(w: &mut impl Write, f: &Field) -> Result<()> {
    write_header(w, f.grid(), 0)?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_complex_field(w: &mut impl Write, f: &ComplexField) -> Result<()> {
    write_header(w, f.grid(), FLAG_COMPLEX)?;
    for v in f.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub enum Snapshot {
    Real(Field),
    Complex(ComplexField),
}

pub fn read_snapshot(r: &mut impl Read) -> Result<Snapshot> {
    let (grid, flags) = read_header(r)?;
    let len = grid.len();
    let mut buf = [0u8; 8];
    if flags & FLAG_COMPLEX != 0 {
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            let im = f64::from_le_bytes(buf);
            values.push(Complex64::new(re, im));
        }
        Ok(Snapshot::Complex(ComplexField::from_values(&grid, values)?))
    } else {
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        Ok(Snapshot::Real(Field::from_values(&grid, values)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::maxwellian;

    #[test]
    fn roundtrip_real() {
        let grid = VelocityGrid::standard(8).unwrap();
        let f = maxwellian(&grid);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), 16 + 4 + 8 + 8 + 4 + 8 * grid.len());
        match read_snapshot(&mut buf.as_slice()).unwrap() {
            Snapshot::Real(g) => assert_eq!(g.values(), f.values()),
            _ => panic!("expected real snapshot"),
        }
    }

    #[test]
    fn rejects_corrupt_magic() {
        let grid = VelocityGrid::standard(8).unwrap();
        let f = maxwellian(&grid);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf[0] = b'X';
        assert!(read_snapshot(&mut buf.as_slice()).is_err());
    }
}

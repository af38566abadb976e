//! Binary snapshot format.
//!
//! Layout (little-endian throughout): magic `NSSL`, format version (u32),
//! ndim (u32), ncomp (u32), dims per axis (u32 each), box lengths (f64 each),
//! then the physical-space samples as f64, component-major then row-major.

use crate::error::{Result, SpectralError};
use crate::field::PhysicalField;
use crate::grid::Grid;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"NSSL";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_snapshot(path: &Path, field: &PhysicalField) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(field.grid.ndim() as u32).to_le_bytes());
    buf.extend_from_slice(&(field.ncomp() as u32).to_le_bytes());
    for &n in field.grid.dims() {
        buf.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for &l in field.grid.box_lengths() {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    for comp in &field.data {
        for &v in comp {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<PhysicalField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut cursor = 0usize;
    let take = |cursor: &mut usize, n: usize| -> Result<&[u8]> {
        if *cursor + n > bytes.len() {
            return Err(SpectralError::Snapshot("truncated snapshot".into()));
        }
        let slice = &bytes[*cursor..*cursor + n];
        *cursor += n;
        Ok(slice)
    };
    let magic = take(&mut cursor, 4)?;
    if magic != MAGIC {
        return Err(SpectralError::Snapshot("bad magic".into()));
    }
    let read_u32 = |cursor: &mut usize| -> Result<u32> {
        let s = take(cursor, 4)?;
        Ok(u32::from_le_bytes(s.try_into().unwrap()))
    };
    let read_f64 = |cursor: &mut usize| -> Result<f64> {
        let s = take(cursor, 8)?;
        Ok(f64::from_le_bytes(s.try_into().unwrap()))
    };
    let version = read_u32(&mut cursor)?;
    if version != FORMAT_VERSION {
        return Err(SpectralError::Snapshot(format!(
            "unsupported format version {version}"
        )));
    }
    let ndim = read_u32(&mut cursor)? as usize;
    let ncomp = read_u32(&mut cursor)? as usize;
    if !(2..=3).contains(&ndim) || ncomp == 0 || ncomp > 16 {
        return Err(SpectralError::Snapshot("implausible header".into()));
    }
    let mut dims = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        dims.push(read_u32(&mut cursor)? as usize);
    }
    let mut lengths = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        lengths.push(read_f64(&mut cursor)?);
    }
    let grid = Grid::new(&dims, &lengths)?;
    let n = grid.len();
    let mut data = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let mut comp = Vec::with_capacity(n);
        for _ in 0..n {
            comp.push(read_f64(&mut cursor)?);
        }
        data.push(comp);
    }
    if cursor != bytes.len() {
        return Err(SpectralError::Snapshot("trailing bytes".into()));
    }
    PhysicalField::from_components(&grid, data)
}

/// Human-readable header summary for the CLI.
pub fn describe(path: &Path) -> Result<String> {
    let field = read_snapshot(path)?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for comp in &field.data {
        for &v in comp {
            min = min.min(v);
            max = max.max(v);
        }
    }
    Ok(format!(
        "ndim={} ncomp={} dims={:?} box={:?} min={:.6e} max={:.6e}",
        field.grid.ndim(),
        field.ncomp(),
        field.grid.dims(),
        field.grid.box_lengths(),
        min,
        max
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_bits() {
        let g = Grid::new_2d(8, 12, 1.0, 2.5).unwrap();
        let f = PhysicalField::fill(&g, 3, |c, x| (c as f64 + 1.0) * x[0].sin() + x[1]);
        let dir = std::env::temp_dir().join("nssl_snapshot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.nssl");
        write_snapshot(&path, &f).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(f.grid.dims(), back.grid.dims());
        for (a, b) in f.data.iter().zip(&back.data) {
            for (&x, &y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = std::env::temp_dir().join("nssl_snapshot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("junk.nssl");
        std::fs::write(&path, b"JUNKxxxxxxxx").unwrap();
        assert!(read_snapshot(&path).is_err());
        std::fs::remove_file(&path).ok();
    }
}

//! Field and profile files.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, VortexError};
use crate::field::ScalarField2D;
use crate::params::Grid2D;

const MAGIC: &[u8; 8] = b"VLXF0001";

/// Seventeen significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Planar fields as CSV, header `x,y,u,v,eta,F12`, row-major in `(j, i)`.
pub fn write_fields_csv(
    path: &Path,
    u: &ScalarField2D,
    v: &ScalarField2D,
    eta: &ScalarField2D,
    f12: &ScalarField2D,
) -> Result<()> {
    let g = u.grid;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,y,u,v,eta,F12")?;
    for j in 0..g.n {
        for i in 0..g.n {
            let k = g.idx(i, j);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                num(g.coord(i)),
                num(g.coord(j)),
                num(u.data[k]),
                num(v.data[k]),
                num(eta.data[k]),
                num(f12.data[k])
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Binary dump: magic, `n` (u64), `R` (f64), field count (u64), each name as
/// length (u64) plus UTF-8 bytes, then every field row-major; all little-endian.
pub fn write_fields_binary(path: &Path, fields: &[(&str, &ScalarField2D)]) -> Result<()> {
    let grid = fields
        .first()
        .map(|f| f.1.grid)
        .ok_or_else(|| VortexError::Format("no fields to write".into()))?;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n as u64).to_le_bytes())?;
    w.write_all(&grid.half_extent.to_le_bytes())?;
    w.write_all(&(fields.len() as u64).to_le_bytes())?;
    for (name, _) in fields {
        w.write_all(&(name.len() as u64).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
    }
    for (_, f) in fields {
        if f.grid != grid {
            return Err(VortexError::Format("fields on different grids".into()));
        }
        for x in &f.data {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_fields_binary(path: &Path) -> Result<Vec<(String, ScalarField2D)>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let mut take = |k: usize| -> Result<&[u8]> {
        let s = bytes
            .get(pos..pos + k)
            .ok_or_else(|| VortexError::Format("truncated field file".into()))?;
        pos += k;
        Ok(s)
    };
    if take(8)? != MAGIC {
        return Err(VortexError::Format("bad magic".into()));
    }
    let u64_of = |b: &[u8]| u64::from_le_bytes(b.try_into().expect("8 bytes"));
    let n = u64_of(take(8)?) as usize;
    let r = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
    let count = u64_of(take(8)?) as usize;
    let grid = Grid2D::new(r, n)?;
    let mut names = Vec::with_capacity(count);
    for _ in 0..count {
        let len = u64_of(take(8)?) as usize;
        let name = String::from_utf8(take(len)?.to_vec()).map_err(|e| VortexError::Format(e.to_string()))?;
        names.push(name);
    }
    let mut out = Vec::with_capacity(count);
    for name in names {
        let raw = take(8 * grid.len())?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        out.push((name, ScalarField2D { grid, data }));
    }
    if pos != bytes.len() {
        return Err(VortexError::Format("trailing bytes in field file".into()));
    }
    Ok(out)
}

/// Radial profiles as CSV, header `r,u,du,v,dv,eta`.
pub fn write_profile_csv(
    path: &Path,
    r: &[f64],
    u: (&[f64], &[f64]),
    v: (&[f64], &[f64]),
    eta: &[f64],
) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "r,u,du,v,dv,eta")?;
    for k in 0..r.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            num(r[k]),
            num(u.0[k]),
            num(u.1[k]),
            num(v.0[k]),
            num(v.1[k]),
            num(eta[k])
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid2D::new(3.0, 9).unwrap();
        let a = ScalarField2D::from_fn(grid, |x, y| x * y - 0.1);
        let b = ScalarField2D::from_fn(grid, |x, _| x.sin());
        let p = dir.path().join("f.bin");
        write_fields_binary(&p, &[("u", &a), ("eta", &b)]).unwrap();
        let back = read_fields_binary(&p).unwrap();
        assert_eq!(back[0].0, "u");
        assert_eq!(back[0].1, a);
        assert_eq!(back[1].1, b);
        std::fs::write(&p, b"VLXF0002").unwrap();
        assert!(read_fields_binary(&p).is_err());
    }

    #[test]
    fn csv_digits_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid2D::new(1.0, 3).unwrap();
        let f = ScalarField2D::from_fn(grid, |x, y| (x + 0.1) / 3.0 + y);
        let p = dir.path().join("f.csv");
        write_fields_csv(&p, &f, &f, &f, &f).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,u,v,eta,F12"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row[2], f.data[0]);
    }
}

//! Small file writers shared by the pipeline stages.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Write `data` (row-major, `nx` columns) as a 16-bit binary PGM scaled so the
/// maximum maps to 65535. Rows are written in storage order.
pub fn write_pgm16(path: &Path, nx: usize, ny: usize, data: &[f64]) -> Result<()> {
    let max = data.iter().cloned().fold(0.0f64, f64::max);
    write_pgm16_scaled(path, nx, ny, data, max)
}

/// Write `data` as a 16-bit PGM with `full_scale` mapped to 65535; values
/// outside [0, full_scale] are clamped.
pub fn write_pgm16_scaled(
    path: &Path,
    nx: usize,
    ny: usize,
    data: &[f64],
    full_scale: f64,
) -> Result<()> {
    if data.len() != nx * ny {
        return Err(Error::config(format!(
            "image buffer has {} samples, expected {}",
            data.len(),
            nx * ny
        )));
    }
    let scale = if full_scale > 0.0 {
        65535.0 / full_scale
    } else {
        0.0
    };
    let mut w = create(path)?;
    let mut buf = Vec::with_capacity(2 * data.len() + 32);
    buf.extend_from_slice(format!("P5\n{nx} {ny}\n65535\n").as_bytes());
    for &v in data {
        let q = (v.max(0.0) * scale).round().min(65535.0) as u16;
        buf.extend_from_slice(&q.to_be_bytes());
    }
    w.write_all(&buf).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write a row-major grid as CSV, one image row per line.
pub fn write_csv_grid(path: &Path, nx: usize, ny: usize, data: &[f64]) -> Result<()> {
    if data.len() != nx * ny {
        return Err(Error::config(format!(
            "grid buffer has {} samples, expected {}",
            data.len(),
            nx * ny
        )));
    }
    let mut w = create(path)?;
    for row in data.chunks(nx) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write a table with a header row.
pub fn write_csv_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Serialize `value` as pretty JSON.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Write little-endian f32 samples.
pub fn write_f32_le(path: &Path, data: impl Iterator<Item = f32>) -> Result<()> {
    let mut w = create(path)?;
    let mut buf = Vec::new();
    for v in data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_f32_le(path: &Path) -> Result<Vec<f32>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(Error::config(format!(
            "{} is not a whole number of f32 samples",
            path.display()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_and_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        write_pgm16(&p, 2, 2, &[0.0, 0.5, 1.0, 0.25]).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let header = b"P5\n2 2\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        let px: Vec<u16> = bytes[header.len()..]
            .chunks(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(px, vec![0, 32768, 65535, 16384]);
    }

    #[test]
    fn f32_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.raw");
        write_f32_le(&p, [1.5f32, -2.0, 3.25].into_iter()).unwrap();
        assert_eq!(read_f32_le(&p).unwrap(), vec![1.5, -2.0, 3.25]);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_pgm16(&dir.path().join("x.pgm"), 3, 3, &[1.0]).is_err());
        assert!(write_csv_grid(&dir.path().join("x.csv"), 3, 3, &[1.0]).is_err());
    }
}

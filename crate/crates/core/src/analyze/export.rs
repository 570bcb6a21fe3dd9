//! Matrix exports: CSV and 8-bit grayscale PGM heatmaps.

use crate::autodiff::Tensor;
use crate::error::Result;
use std::fs;
use std::io::Write;
use std::path::Path;

/// One CSV row per matrix row, plain numbers, no header.
pub fn save_matrix_csv(path: &Path, m: &Tensor) -> Result<()> {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Binary PGM (P5), rows = query/cycle, columns = key/timestep, values
/// scaled linearly so the matrix minimum maps to 0 and the maximum to
/// 255. A constant matrix renders black.
pub fn save_pgm(path: &Path, m: &Tensor) -> Result<()> {
    let (rows, cols) = (m.rows(), m.cols());
    let lo = m.data().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = m.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut bytes = Vec::with_capacity(rows * cols + 32);
    bytes.extend_from_slice(format!("P5\n{} {}\n255\n", cols, rows).as_bytes());
    for &v in m.data() {
        let px = if span > 0.0 {
            ((v - lo) / span * 255.0).round() as u8
        } else {
            0
        };
        bytes.push(px);
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

//! Bit-exact file emission: binary PGM images and CSV tables.
//!
//! Images are 8-bit P5 with single-space header separators, a trailing
//! newline after the maxval, and a row-major payload with the top-left pixel
//! first. CSV uses comma separation, LF line endings and a `.` decimal
//! point; every float is printed with 15 significant digits.

use henon_core::green::GreenValue;
use henon_core::grid::Grid;
use std::fs;
use std::io;
use std::path::Path;

/// Fixed-width scientific rendering used by every CSV column.
pub fn fmt(x: f64) -> String {
    format!("{x:.14e}")
}

/// Log-scaled byte for a Green value against the grid maximum:
/// `round(255 * min(1, log(1+g) / log(1+g_max)))`.
pub fn green_byte(g: f64, g_max: f64) -> u8 {
    if !(g_max > 0.0) || !(g > 0.0) {
        return 0;
    }
    let t = (1.0 + g).ln() / (1.0 + g_max).ln();
    (255.0 * t.min(1.0)).round() as u8
}

/// PGM payload for a Green grid. Grid row 0 sits at the window's y_min, so
/// rows are emitted in reverse to put the top-left pixel first.
pub fn green_bytes(grid: &Grid<GreenValue>) -> Vec<u8> {
    let g_max = grid
        .data()
        .iter()
        .map(|g| g.value)
        .fold(0.0f64, f64::max);
    let (w, h) = (grid.width(), grid.height());
    let mut out = Vec::with_capacity(w * h);
    for row in (0..h).rev() {
        for col in 0..w {
            out.push(green_byte(grid.get(col, row).value, g_max));
        }
    }
    out
}

pub fn write_pgm(path: &Path, width: usize, height: usize, payload: &[u8]) -> io::Result<()> {
    assert_eq!(payload.len(), width * height, "payload must fill the image");
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(payload);
    fs::write(path, bytes)
}

pub fn write_text(path: &Path, body: &str) -> io::Result<()> {
    fs::write(path, body.as_bytes())
}

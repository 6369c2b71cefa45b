//! Plain-text PGM (P2) masks for grid-shaped perturbations.
//!
//! Each delta component maps to `round(255 · δᵢ / (hi − lo))`, clamped to
//! `[0, 255]`: a delta spanning the full feature range is white, zero is
//! black.

use std::fmt::Write as _;

use cem_core::{Error, Result};

pub fn delta_to_pgm(delta: &[f64], rows: usize, cols: usize, lo: f64, hi: f64) -> Result<String> {
    if rows * cols != delta.len() {
        return Err(Error::InvalidConfig(format!(
            "image shape {rows}x{cols} does not match {} features",
            delta.len()
        )));
    }
    if !(hi > lo) {
        return Err(Error::InvalidConfig(format!(
            "invalid feature range [{lo}, {hi}]"
        )));
    }
    let mut out = String::new();
    writeln!(out, "P2").expect("write to string");
    writeln!(out, "{cols} {rows}").expect("write to string");
    writeln!(out, "255").expect("write to string");
    for r in 0..rows {
        let row: Vec<String> = (0..cols)
            .map(|c| {
                let gray = (255.0 * delta[r * cols + c] / (hi - lo)).round();
                format!("{}", gray.clamp(0.0, 255.0) as u8)
            })
            .collect();
        writeln!(out, "{}", row.join(" ")).expect("write to string");
    }
    Ok(out)
}

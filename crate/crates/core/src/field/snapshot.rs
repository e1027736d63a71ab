//! `GFLD1` field snapshots.
//!
//! An ASCII header line `GFLD1 d n1 [n2 n3] L1 [L2 L3]` terminated by `\n`,
//! followed by one little-endian `(re, im)` pair of `f64` per cell in
//! row-major order. Lengths are written with Rust's shortest round-trip
//! float formatting, so reading a snapshot back reproduces the grid exactly.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::grid::Grid;
use super::wavefunction::WaveFunction;
use crate::error::{Error, Result};

pub const MAGIC: &str = "GFLD1";

pub fn header(grid: &Grid) -> String {
    let mut h = format!("{MAGIC} {}", grid.dims());
    for n in grid.shape() {
        h.push_str(&format!(" {n}"));
    }
    for l in grid.lengths() {
        h.push_str(&format!(" {l}"));
    }
    h
}

pub fn write_snapshot<W: Write>(psi: &WaveFunction, mut out: W) -> Result<()> {
    writeln!(out, "{}", header(psi.grid()))?;
    let mut buf = Vec::with_capacity(16 * psi.amplitudes().len());
    for a in psi.amplitudes() {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: BufRead>(mut input: R) -> Result<WaveFunction> {
    let mut line = Vec::new();
    input.read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(Error::Snapshot("missing header terminator".into()));
    }
    let text = std::str::from_utf8(&line[..line.len() - 1])
        .map_err(|_| Error::Snapshot("header is not ASCII".into()))?;
    let mut tokens = text.split(' ');
    if tokens.next() != Some(MAGIC) {
        return Err(Error::Snapshot(format!("expected magic {MAGIC}")));
    }
    let bad = |what: &str| Error::Snapshot(format!("malformed header field: {what}"));
    let d: usize = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("d"))?;
    if !(1..=3).contains(&d) {
        return Err(bad("d"));
    }
    let points = (0..d)
        .map(|_| tokens.next().and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| bad("n")))
        .collect::<Result<Vec<_>>>()?;
    let lengths = (0..d)
        .map(|_| tokens.next().and_then(|t| t.parse::<f64>().ok()).ok_or_else(|| bad("L")))
        .collect::<Result<Vec<_>>>()?;
    if tokens.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    let grid = Grid::new(&points, &lengths)?;

    let mut raw = vec![0u8; 16 * grid.len()];
    input
        .read_exact(&mut raw)
        .map_err(|e| Error::Snapshot(format!("payload truncated: {e}")))?;
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Snapshot("trailing bytes after payload".into()));
    }
    let amps = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    WaveFunction::new(&grid, amps)
}

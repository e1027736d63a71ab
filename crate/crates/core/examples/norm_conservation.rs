//! Norm drift of Doebner-Goldin and logarithmic members of the unified
//! family over unit time.
//!
//! The DG sets differ only in `c1`. With `D' c1 > D` the equation is
//! backward-parabolic at high wavenumber and the run blows up; at or below
//! the threshold `c1 = D / D'` the norm is conserved to roundoff.

use num_complex::Complex64;
use nlgauge::evolution::{evolve, DgParams, EvolveOptions, UnifiedParams};
use nlgauge::field::{Grid, WaveFunction};

fn main() -> nlgauge::Result<()> {
    let grid = Grid::new(&[256], &[12.0])?;
    let q = std::f64::consts::TAU / 12.0;
    let psi = WaveFunction::from_fn(&grid, |x| Complex64::from_polar(1.0 + 0.5 * (q * x[0]).cos(), q * x[0]))?
        .normalized()?;
    let dg = |c1: f64| UnifiedParams::from_dg(DgParams { d: 0.1, d_prime: 1.0, c: [c1, 0.0, 1.0, 0.0, 1.0] }, 1.0, 1.0);
    let runs = [
        ("DG c1 = 1", dg(1.0)),
        ("DG c1 = 0.1", dg(0.1)),
        ("DG c1 = -1", dg(-1.0)),
        ("BBM alpha1 = 1", UnifiedParams::from_bbm(1.0, 1.0, 1.0)),
    ];
    for (label, p) in &runs {
        match evolve(&psi, p, &EvolveOptions::new(1.0, 1e-4).stride(2500)) {
            Ok(traj) => {
                for d in &traj.diagnostics {
                    println!("{label:>15}  t = {:.2}  |norm - 1| = {:.2e}  max|psi| = {:.4}", d.t, (d.norm - 1.0).abs(), d.max_abs);
                }
            }
            Err(e) => println!("{label:>15}  {e}"),
        }
    }
    Ok(())
}

//! The DG equation linearized at high wavenumber has symbol trace
//! `(D' c1 - D) k^2` in `(d rho / rho, dS)`. Runs on either side of the
//! threshold behave accordingly.

use num_complex::Complex64;
use nlgauge::evolution::{evolve, DgParams, EvolveOptions, UnifiedParams};
use nlgauge::field::{Grid, WaveFunction};
use nlgauge::Error;

fn two_mode(n: usize) -> WaveFunction {
    let grid = Grid::new(&[n], &[12.0]).unwrap();
    let q = std::f64::consts::TAU / 12.0;
    WaveFunction::from_fn(&grid, |x| Complex64::from_polar(1.0 + 0.5 * (q * x[0]).cos(), q * x[0]))
        .unwrap()
        .normalized()
        .unwrap()
}

fn dg(c1: f64) -> UnifiedParams {
    UnifiedParams::from_dg(DgParams { d: 0.1, d_prime: 1.0, c: [c1, 0.0, 1.0, 0.0, 1.0] }, 1.0, 1.0)
}

#[test]
fn at_or_below_threshold_conserves_norm() {
    let psi = two_mode(128);
    for c1 in [0.1, 0.0, -1.0] {
        let traj = evolve(&psi, &dg(c1), &EvolveOptions::new(1.0, 1e-4)).unwrap();
        let drift = (traj.last().norm() - 1.0).abs();
        println!("c1 = {c1:>4}: drift {drift:.2e}");
        assert!(drift <= 1e-10);
    }
}

#[test]
fn above_threshold_blows_up() {
    let err = evolve(&two_mode(128), &dg(1.0), &EvolveOptions::new(1.0, 1e-4)).unwrap_err();
    println!("c1 = 1: {err}");
    assert!(matches!(err, Error::BlowUp { .. }));
}

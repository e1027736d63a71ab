//! Free Gaussian spreading against the closed form
//! `<x^2>(t) = sigma^2 + (hbar t / 2 m sigma)^2 + (hbar k t / m)^2`.

use nlgauge::evolution::{evolve, EvolveOptions, UnifiedParams};
use nlgauge::field::{Grid, WaveFunction};

fn main() -> nlgauge::Result<()> {
    let (sigma, k) = (1.0, 0.5);
    let grid = Grid::new(&[512], &[40.0])?;
    let psi = WaveFunction::gaussian(&grid, &[0.0], sigma, &[k])?;
    let traj = evolve(&psi, &UnifiedParams::linear(1.0, 1.0), &EvolveOptions::new(2.0, 1e-3).stride(250))?;
    println!("{:>6} {:>16} {:>16} {:>10}", "t", "<x^2>", "closed form", "error");
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let x2 = state.position_second_moment()?[0];
        let exact = sigma * sigma + (t / (2.0 * sigma)).powi(2) + (k * t).powi(2);
        println!("{t:>6.2} {x2:>16.12} {exact:>16.12} {:>10.2e}", (x2 - exact).abs());
    }
    Ok(())
}

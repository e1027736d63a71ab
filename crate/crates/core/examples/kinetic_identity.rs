//! The kinetic term written through the R functionals,
//! `lap psi / psi = i R1 + R2/2 - R3 - R5/4`, checked on a moving Gaussian.

use nlgauge::field::{Grid, WaveFunction};
use nlgauge::functionals::{compute_r, kinetic_decomposition, DensityFloor};

fn main() -> nlgauge::Result<()> {
    let grid = Grid::new(&[512], &[32.0])?;
    let psi = WaveFunction::gaussian(&grid, &[0.0], 1.0, &[0.7])?;
    let (lhs, rhs) = kinetic_decomposition(&psi, DensityFloor::default())?;
    let r = compute_r(&psi, DensityFloor::default())?;
    let x = grid.axis_coordinates(0);
    println!("{:>7} {:>11} {:>11} {:>11} {:>11} {:>11} {:>10}", "x", "R1", "R2", "R3", "R4", "R5", "residual");
    for i in (0..x.len()).filter(|&i| x[i].abs() <= 3.0).step_by(16) {
        println!(
            "{:>7.3} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>10.2e}",
            x[i],
            r.r1[i],
            r.r2[i],
            r.r3[i],
            r.r4[i],
            r.r5[i],
            (lhs[i] - rhs[i]).norm()
        );
    }
    Ok(())
}

//! Direct integration of the gauge-transformed equation against the
//! conjugated linear flow `N o U(t) o N^-1`, at three time steps.

use nlgauge::evolution::{conjugated_evolve, evolve, EvolveOptions, UnifiedParams};
use nlgauge::field::{Grid, WaveFunction};
use nlgauge::gauge::{GammaPath, GaugeTransform};

fn deviation(gamma: &GammaPath, dt: f64) -> nlgauge::Result<f64> {
    let grid = Grid::new(&[256], &[12.0])?;
    let psi = WaveFunction::periodic_gaussian(&grid, &[0.0], 1.0, &[0.0])?;
    let n = GaugeTransform::pure_path(gamma.clone());
    let psi0 = n.apply(&psi, 0.0)?;
    let opts = EvolveOptions::new(0.5, dt);
    let direct = evolve(&psi0, &UnifiedParams::from_gauge(gamma, 1.0, 1.0), &opts)?;
    let oracle = conjugated_evolve(&psi0, &n, None, 1.0, 1.0, &opts)?;
    Ok(direct.last().distance(oracle.last())? / oracle.last().norm())
}

fn main() -> nlgauge::Result<()> {
    let paths = [
        ("gamma = 1", GammaPath::Constant(1.0)),
        ("gamma = sin t", GammaPath::Sine { amplitude: 1.0, omega: 1.0, phase: 0.0 }),
    ];
    for (label, gamma) in &paths {
        let mut prev: Option<f64> = None;
        for dt in [2e-4, 1e-4, 5e-5] {
            let d = deviation(gamma, dt)?;
            match prev {
                Some(p) => println!("{label:>14}  dt = {dt:.0e}  deviation = {d:.3e}  order = {:.2}", (p / d).log2()),
                None => println!("{label:>14}  dt = {dt:.0e}  deviation = {d:.3e}"),
            }
            prev = Some(d);
        }
    }
    Ok(())
}

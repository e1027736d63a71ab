//! Two decompositions of one mixed state, evolved under a linear, a
//! logarithmic and a gauge-equivalent flow.

use nlgauge::ensembles::{decomposition_divergence, equivalent_decompositions, ObservableSet};
use nlgauge::evolution::{EvolveOptions, UnifiedParams};
use nlgauge::field::{Grid, WaveFunction};
use nlgauge::gauge::GaugeTransform;

fn colliding(n: usize) -> nlgauge::Result<(Grid, WaveFunction, WaveFunction)> {
    let grid = Grid::new(&[n], &[40.0])?;
    let a = WaveFunction::gaussian(&grid, &[-4.0], 1.0, &[4.0])?;
    let b = WaveFunction::gaussian(&grid, &[4.0], 1.0, &[-4.0])?;
    Ok((grid, a, b))
}

fn run(n: usize, dt: f64, p: &UnifiedParams) -> nlgauge::Result<f64> {
    let (grid, a, b) = colliding(n)?;
    let (e, ep) = equivalent_decompositions(&a, &b)?;
    let obs = ObservableSet::standard(&grid, 7, 8.0)?;
    let series = decomposition_divergence(&e, &ep, p, &EvolveOptions::new(1.0, dt), &obs)?;
    Ok(series.final_divergence())
}

fn main() -> nlgauge::Result<()> {
    let linear = UnifiedParams::linear(1.0, 1.0);
    println!("linear flow       divergence = {:.3e}", run(256, 1e-3, &linear)?);

    let bbm = UnifiedParams::from_bbm(1.0, 1.0, 1.0);
    for (n, dt) in [(256, 1e-3), (256, 5e-4), (512, 5e-4), (512, 2.5e-4)] {
        println!("log flow n = {n:4} dt = {dt:.1e}  divergence = {:.4e}", run(n, dt, &bbm)?);
    }

    // u = 1 + cos(qx)/2 and v = (1 - cos(qx)/2) e^{iqx} are orthogonal, of equal
    // norm, and |u +- v|^2 >= 1 everywhere, so no member comes near a node.
    let grid = Grid::new(&[256], &[12.0])?;
    let q = std::f64::consts::TAU / 12.0;
    let a = WaveFunction::from_fn(&grid, |x| (1.0 + 0.5 * (q * x[0]).cos()).into())?.normalized()?;
    let b = WaveFunction::from_fn(&grid, |x| {
        num_complex::Complex64::from_polar(1.0 - 0.5 * (q * x[0]).cos(), q * x[0])
    })?
    .normalized()?;
    let n = GaugeTransform::pure(1.0);
    let (e, ep) = equivalent_decompositions(&a, &b)?;
    let (e, ep) = (e.map(|s| n.apply(s, 0.0))?, ep.map(|s| n.apply(s, 0.0))?);
    let obs = ObservableSet::standard(&grid, 7, 8.0)?.conjugated(&n)?;
    let gauge = UnifiedParams::from_gauge(n.gamma(), 1.0, 1.0);
    let series = decomposition_divergence(&e, &ep, &gauge, &EvolveOptions::new(1.0, 1e-4).stride(1000), &obs)?;
    println!("gauge flow, conjugated observables  peak divergence = {:.3e}", series.peak());
    let plain = ObservableSet::standard(&grid, 7, 8.0)?;
    let series = decomposition_divergence(&e, &ep, &gauge, &EvolveOptions::new(1.0, 1e-4), &plain)?;
    println!("gauge flow, linear observables      divergence = {:.3e}", series.final_divergence());
    Ok(())
}

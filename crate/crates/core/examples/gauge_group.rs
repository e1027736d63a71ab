//! Group laws of the nonlinear gauge transformations on random nodeless
//! states: additivity of pure gauges, inverses, and the action on local
//! unitaries.

use nlgauge::ensembles::{random_nodeless_state, seeded_rng};
use nlgauge::field::{Grid, RealField};
use nlgauge::gauge::{apply_local_unitary, GammaPath, GaugeTransform};

fn main() -> nlgauge::Result<()> {
    let grid = Grid::new(&[256], &[12.0])?;
    let theta = RealField::from_fn(&grid, |x| (std::f64::consts::TAU * x[0] / 12.0).sin());
    let minus = RealField::from_fn(&grid, |x| -(std::f64::consts::TAU * x[0] / 12.0).sin());
    let reflect = GaugeTransform::new(1.0, GammaPath::Constant(1.3), -1);
    let mut rng = seeded_rng(1);
    println!("{:>5} {:>12} {:>12} {:>12}", "state", "additivity", "inverse", "semidirect");
    for s in 0..5 {
        let psi = random_nodeless_state(&grid, &mut rng)?;
        let (a, b) = (GaugeTransform::pure(0.7), GaugeTransform::pure(-1.9));
        let add = a.apply(&b.apply(&psi, 0.0)?, 0.0)?.distance(&a.compose(&b).apply(&psi, 0.0)?)?;
        let inv = a.inverse()?.apply(&a.apply(&psi, 0.0)?, 0.0)?.distance(&psi)?;
        let lhs = reflect.apply(&apply_local_unitary(&theta, &psi)?, 0.0)?;
        let rhs = apply_local_unitary(&minus, &reflect.apply(&psi, 0.0)?)?;
        println!("{s:>5} {add:>12.2e} {inv:>12.2e} {:>12.2e}", lhs.distance(&rhs)?);
    }
    Ok(())
}

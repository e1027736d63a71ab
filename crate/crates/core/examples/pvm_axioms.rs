//! Generalized projection-valued measures `N E N^-1` for position bins and
//! momentum bands, with their probabilities on a gauge-transformed state.

use std::collections::BTreeSet;

use nlgauge::ensembles::{random_nodeless_state, seeded_rng};
use nlgauge::field::Grid;
use nlgauge::gauge::GaugeTransform;
use nlgauge::observables::{pvm_measure, GeneralizedPVM};

fn main() -> nlgauge::Result<()> {
    let grid = Grid::new(&[256], &[12.0])?;
    let n = GaugeTransform::pure(1.5);
    let psi = n.apply(&random_nodeless_state(&grid, &mut seeded_rng(6))?, 0.0)?;
    let pvms = [
        ("position", GeneralizedPVM::position(&grid, 0, &[-4.0, -1.0, 0.0, 2.5, 5.0], n.clone())?),
        ("momentum", GeneralizedPVM::momentum(&grid, 0, &[-2.0, -0.5, 0.5, 1.0, 3.0], n.clone())?),
    ];
    for (name, m) in &pvms {
        let probs: Vec<f64> = (0..m.bin_count())
            .map(|b| pvm_measure(m, &psi, &BTreeSet::from([b]), 0.0))
            .collect::<nlgauge::Result<_>>()?;
        let shown: Vec<String> = probs.iter().map(|p| format!("{p:.4}")).collect();
        println!("{name:>9}: [{}]  sum - 1 = {:.1e}", shown.join(", "), probs.iter().sum::<f64>() - 1.0);
        let (b1, b2) = (BTreeSet::from([1, 2, 3]), BTreeSet::from([2, 3, 4]));
        let b12: BTreeSet<usize> = b1.intersection(&b2).copied().collect();
        let lhs = m.projection(&b1)?.apply(&m.projection(&b2)?.apply(&psi, 0.0)?, 0.0)?;
        let rhs = m.projection(&b12)?.apply(&psi, 0.0)?;
        println!("{:>9}  E(B1) E(B2) vs E(B1 & B2): {:.1e}", "", lhs.distance(&rhs)?);
    }
    Ok(())
}

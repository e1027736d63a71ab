//! The two descriptions of a linearizable system, row by row: states,
//! evolution, conjugated observables and positional probabilities.

use nlgauge::evolution::EvolveOptions;
use nlgauge::field::{Grid, WaveFunction};
use nlgauge::gauge::GaugeTransform;
use nlgauge::observables::{equivalence_table_check, BorelBin, EquivalenceRow, LinearProjection, ModeSet};

fn main() -> nlgauge::Result<()> {
    let grid = Grid::new(&[256], &[12.0])?;
    let psi = WaveFunction::periodic_gaussian(&grid, &[0.0], 1.0, &[0.0])?;
    let n = GaugeTransform::pure(1.5);
    let projections = vec![
        LinearProjection::Momentum(ModeSet::band(&grid, 0, 0.0, 1.0)?),
        LinearProjection::Momentum(ModeSet::band(&grid, 0, 1.0, 3.0)?),
        LinearProjection::Position(BorelBin::slab(&grid, 0, -1.0, 1.0)?),
        LinearProjection::rank_one(&WaveFunction::periodic_gaussian(&grid, &[0.5], 0.8, &[1.0])?)?,
    ];
    let bins = BorelBin::tiling(&grid, 0, 10)?;
    let opts = EvolveOptions::new(1.0, 1e-4).stride(1000);
    let report = equivalence_table_check(&psi, &n, &projections, &bins, None, 1.0, 1.0, &opts)?;
    println!("{:>6} {:>16} {:>16} {:>16} {:>16}", "t", EquivalenceRow::LABELS[0], EquivalenceRow::LABELS[1], EquivalenceRow::LABELS[2], EquivalenceRow::LABELS[3]);
    for r in &report.rows {
        let [a, b, c, d] = r.values();
        println!("{:>6.3} {a:>16.3e} {b:>16.3e} {c:>16.3e} {d:>16.3e}", r.t);
    }
    let [a, b, c, d] = report.max();
    println!("max    {a:>16.3e} {b:>16.3e} {c:>16.3e} {d:>16.3e}");
    Ok(())
}

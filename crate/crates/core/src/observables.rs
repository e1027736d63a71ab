//! Positional observables, orthogonal projections and their nonlinear
//! conjugates.
//!
//! A [`GeneralizedProjection`] is `N∘E∘N⁻¹` for an orthogonal projection `E`
//! and an invertible gauge transform `N`. It is idempotent but not linear.
//! A [`GeneralizedPVM`] assigns one of them to every set of value bins of an
//! observable that is diagonal either in position or in the grid's Fourier
//! modes, all sharing one conjugator.
//!
//! Value space is partitioned by a sorted list of edges `e_0 < ... < e_m` into
//! `(-inf, e_0), [e_0, e_1), ..., [e_m, inf)`, so bin `i` of `m + 2` is the
//! half-open interval below edge `i`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{conjugated_evolve, evolve, EvolveOptions, UnifiedParams};
use crate::field::{Grid, RealField, WaveFunction};
use crate::gauge::{GaugeTransform, PhaseField};

/// A measurable subset of the box, realised as a set of grid cells.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelBin {
    grid: Grid,
    mask: Arc<Vec<bool>>,
}

impl BorelBin {
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> bool) -> Self {
        let mask = (0..grid.len()).map(|i| f(&grid.position(i)[..grid.dims()])).collect();
        Self { grid: grid.clone(), mask: Arc::new(mask) }
    }

    pub fn from_mask(grid: &Grid, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "mask has {} cells, grid has {}",
                mask.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: grid.clone(), mask: Arc::new(mask) })
    }

    /// The whole box `M`.
    pub fn full(grid: &Grid) -> Self {
        Self::from_fn(grid, |_| true)
    }

    pub fn empty(grid: &Grid) -> Self {
        Self::from_fn(grid, |_| false)
    }

    /// `{x : x_axis > threshold}`.
    pub fn half_space(grid: &Grid, axis: usize, threshold: f64) -> Result<Self> {
        check_axis(grid, axis)?;
        Ok(Self::from_fn(grid, |x| x[axis] > threshold))
    }

    /// `{x : lo <= x_axis < hi}`.
    pub fn slab(grid: &Grid, axis: usize, lo: f64, hi: f64) -> Result<Self> {
        check_axis(grid, axis)?;
        Ok(Self::from_fn(grid, |x| x[axis] >= lo && x[axis] < hi))
    }

    /// Axis-aligned half-open box `prod [lo_a, hi_a)`.
    pub fn cuboid(grid: &Grid, lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != grid.dims() || hi.len() != grid.dims() {
            return Err(Error::InvalidArgument("box corners need one entry per axis".into()));
        }
        Ok(Self::from_fn(grid, |x| (0..x.len()).all(|a| x[a] >= lo[a] && x[a] < hi[a])))
    }

    /// `count` slabs of equal width tiling the box along `axis`.
    pub fn tiling(grid: &Grid, axis: usize, count: usize) -> Result<Vec<Self>> {
        check_axis(grid, axis)?;
        if count == 0 {
            return Err(Error::InvalidArgument("tiling needs at least one slab".into()));
        }
        let n = grid.shape()[axis];
        Ok((0..count)
            .map(|s| {
                let mask = (0..grid.len())
                    .map(|i| grid.unravel(i)[axis] * count / n == s)
                    .collect();
                Self { grid: grid.clone(), mask: Arc::new(mask) }
            })
            .collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.mask[flat]
    }

    pub fn cells(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// `chi_B` as a real field.
    pub fn indicator(&self) -> RealField {
        RealField::new(&self.grid, self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect())
            .expect("mask length matches grid")
    }

    pub fn complement(&self) -> Self {
        Self { grid: self.grid.clone(), mask: Arc::new(self.mask.iter().map(|m| !m).collect()) }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a && b)
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.intersection(other)?.cells() == 0)
    }

    fn zip(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mask = self.mask.iter().zip(other.mask.iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), mask: Arc::new(mask) })
    }
}

fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis < grid.dims() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("axis {axis} on a {}-d grid", grid.dims())))
    }
}

/// Probability of finding the system in `bin`: `<psi|chi_B psi> / ||psi||^2`.
pub fn p_b(psi: &WaveFunction, bin: &BorelBin) -> Result<f64> {
    if psi.grid() != bin.grid() {
        return Err(Error::GridMismatch);
    }
    let (mut inside, mut total) = (0.0, 0.0);
    for (a, &m) in psi.amplitudes().iter().zip(bin.mask()) {
        let w = a.norm_sqr();
        total += w;
        if m {
            inside += w;
        }
    }
    if total == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(inside / total)
}

/// A set of discrete Fourier modes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    grid: Grid,
    mask: Arc<Vec<bool>>,
}

impl ModeSet {
    /// Modes whose wave vector satisfies `f`.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> bool) -> Self {
        let mask = (0..grid.len()).map(|i| f(&grid.wavevector(i)[..grid.dims()])).collect();
        Self { grid: grid.clone(), mask: Arc::new(mask) }
    }

    /// `{k : lo <= |k_axis| < hi}`.
    pub fn band(grid: &Grid, axis: usize, lo: f64, hi: f64) -> Result<Self> {
        check_axis(grid, axis)?;
        Ok(Self::from_fn(grid, |k| k[axis].abs() >= lo && k[axis].abs() < hi))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn complement(&self) -> Self {
        Self { grid: self.grid.clone(), mask: Arc::new(self.mask.iter().map(|m| !m).collect()) }
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mask = self.mask.iter().zip(other.mask.iter()).map(|(&a, &b)| a && b).collect();
        Ok(Self { grid: self.grid.clone(), mask: Arc::new(mask) })
    }
}

/// Orthogonal projection on the grid's state space.
#[derive(Clone, Debug)]
pub enum LinearProjection {
    /// Multiplication by `chi_B`.
    Position(BorelBin),
    /// Keeps the listed Fourier modes.
    Momentum(ModeSet),
    /// `|phi><phi|` with `phi` normalized on construction.
    RankOne(WaveFunction),
    /// `1 - E`.
    Complement(Box<LinearProjection>),
}

impl LinearProjection {
    pub fn rank_one(phi: &WaveFunction) -> Result<Self> {
        Ok(Self::RankOne(phi.normalized()?))
    }

    pub fn grid(&self) -> &Grid {
        match self {
            Self::Position(b) => b.grid(),
            Self::Momentum(m) => m.grid(),
            Self::RankOne(phi) => phi.grid(),
            Self::Complement(e) => e.grid(),
        }
    }

    /// `1 - E`, with `1 - (1 - E)` folded back to `E`.
    pub fn negation(&self) -> Self {
        match self {
            Self::Complement(e) => (**e).clone(),
            e => Self::Complement(Box::new(e.clone())),
        }
    }

    /// Product of two commuting projections of the same kind.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Position(a), Self::Position(b)) => Ok(Self::Position(a.intersection(b)?)),
            (Self::Momentum(a), Self::Momentum(b)) => Ok(Self::Momentum(a.intersection(b)?)),
            _ => Err(Error::InvalidArgument(
                "meet is only formed for position or momentum projections".into(),
            )),
        }
    }

    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        if psi.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let grid = psi.grid();
        let out = match self {
            Self::Position(b) => psi
                .amplitudes()
                .iter()
                .zip(b.mask())
                .map(|(&a, &m)| if m { a } else { Complex64::new(0.0, 0.0) })
                .collect(),
            Self::Momentum(modes) => {
                let mut spec = psi.amplitudes().to_vec();
                grid.forward(&mut spec);
                for (c, &m) in spec.iter_mut().zip(modes.mask()) {
                    if !m {
                        *c = Complex64::new(0.0, 0.0);
                    }
                }
                grid.inverse(&mut spec);
                spec
            }
            Self::RankOne(phi) => return Ok(phi.scaled(phi.inner(psi)?)),
            Self::Complement(e) => return psi.sub(&e.apply(psi)?),
        };
        WaveFunction::new(grid, out)
    }

    /// `||E psi||^2 / ||psi||^2`.
    pub fn expectation(&self, psi: &WaveFunction) -> Result<f64> {
        let total = psi.norm_sqr();
        if total == 0.0 {
            return Err(Error::ZeroState);
        }
        if let Self::Position(b) = self {
            return p_b(psi, b);
        }
        Ok(self.apply(psi)?.norm_sqr() / total)
    }
}

/// `E_hat = N∘E∘N⁻¹`.
#[derive(Clone, Debug)]
pub struct GeneralizedProjection {
    inner: LinearProjection,
    conjugator: GaugeTransform,
    inverse: GaugeTransform,
}

impl GeneralizedProjection {
    /// Fails unless `conjugator` is invertible and norm preserving.
    pub fn new(inner: LinearProjection, conjugator: GaugeTransform) -> Result<Self> {
        if !conjugator.is_norm_preserving() {
            return Err(Error::NonInvertible("conjugator must preserve the norm".into()));
        }
        let inverse = conjugator.inverse()?;
        Ok(Self { inner, conjugator, inverse })
    }

    /// `E` itself, conjugated by the identity.
    pub fn linear(inner: LinearProjection) -> Self {
        Self { inner, conjugator: GaugeTransform::identity(), inverse: GaugeTransform::identity() }
    }

    pub fn inner(&self) -> &LinearProjection {
        &self.inner
    }

    pub fn conjugator(&self) -> &GaugeTransform {
        &self.conjugator
    }

    /// `N(1 - E)N⁻¹`.
    pub fn negation(&self) -> Self {
        Self { inner: self.inner.negation(), ..self.clone() }
    }

    /// `N(E1 E2)N⁻¹` for commuting `E1`, `E2` sharing the conjugator.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        Ok(Self { inner: self.inner.meet(&other.inner)?, ..self.clone() })
    }

    /// `N(t)[E[N(t)⁻¹[psi]]]`.
    pub fn apply(&self, psi: &WaveFunction, t: f64) -> Result<WaveFunction> {
        let linear = self.inverse.apply(psi, t)?;
        self.conjugator.apply(&self.inner.apply(&linear)?, t)
    }

    /// `||E_hat psi||^2 / ||psi||^2`.
    pub fn expectation(&self, psi: &WaveFunction, t: f64) -> Result<f64> {
        let total = psi.norm_sqr();
        if total == 0.0 {
            return Err(Error::ZeroState);
        }
        if let LinearProjection::Position(b) = &self.inner {
            if self.conjugator.kappa().is_none() {
                return p_b(psi, b);
            }
        }
        Ok(self.apply(psi, t)?.norm_sqr() / total)
    }
}

/// `Ê = N∘E∘N⁻¹` applied at `t = 0`.
pub fn apply_generalized(e: &GeneralizedProjection, psi: &WaveFunction) -> Result<WaveFunction> {
    e.apply(psi, 0.0)
}

/// Where an observable is diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

/// Projection-valued measure of an observable with one value per cell of
/// the chosen representation, conjugated by a shared gauge transform.
#[derive(Clone, Debug)]
pub struct GeneralizedPVM {
    grid: Grid,
    representation: Representation,
    bin_of_cell: Arc<Vec<usize>>,
    edges: Vec<f64>,
    conjugator: GaugeTransform,
}

impl GeneralizedPVM {
    /// `values[i]` is the observable's value on cell `i` (a position cell or
    /// a Fourier mode in FFT order).
    pub fn new(
        grid: &Grid,
        representation: Representation,
        values: &[f64],
        edges: &[f64],
        conjugator: GaugeTransform,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("one observable value per cell".into()));
        }
        if edges.is_empty() || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("edges must be non-empty and increasing".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("observable value is NaN".into()));
        }
        if !conjugator.is_norm_preserving() || !conjugator.is_invertible() {
            return Err(Error::NonInvertible("conjugator must be norm preserving".into()));
        }
        let bin_of_cell = values.iter().map(|&v| edges.partition_point(|&e| e <= v)).collect();
        Ok(Self {
            grid: grid.clone(),
            representation,
            bin_of_cell: Arc::new(bin_of_cell),
            edges: edges.to_vec(),
            conjugator,
        })
    }

    /// Position coordinate along `axis`.
    pub fn position(grid: &Grid, axis: usize, edges: &[f64], conjugator: GaugeTransform) -> Result<Self> {
        check_axis(grid, axis)?;
        let values: Vec<f64> = (0..grid.len()).map(|i| grid.position(i)[axis]).collect();
        Self::new(grid, Representation::Position, &values, edges, conjugator)
    }

    /// Wavenumber along `axis`.
    pub fn momentum(grid: &Grid, axis: usize, edges: &[f64], conjugator: GaugeTransform) -> Result<Self> {
        check_axis(grid, axis)?;
        let values: Vec<f64> = (0..grid.len()).map(|i| grid.wavevector(i)[axis]).collect();
        Self::new(grid, Representation::Momentum, &values, edges, conjugator)
    }

    /// Number of value bins, `edges.len() + 1`.
    pub fn bin_count(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn conjugator(&self) -> &GaugeTransform {
        &self.conjugator
    }

    /// Every value bin.
    pub fn all_bins(&self) -> BTreeSet<usize> {
        (0..self.bin_count()).collect()
    }

    /// `E_hat(B)` for the union `B` of the listed value bins.
    pub fn projection(&self, bins: &BTreeSet<usize>) -> Result<GeneralizedProjection> {
        if let Some(&b) = bins.iter().find(|&&b| b >= self.bin_count()) {
            return Err(Error::InvalidArgument(format!("value bin {b} of {}", self.bin_count())));
        }
        let mask: Vec<bool> = self.bin_of_cell.iter().map(|b| bins.contains(b)).collect();
        let inner = match self.representation {
            Representation::Position => LinearProjection::Position(BorelBin::from_mask(&self.grid, mask)?),
            Representation::Momentum => {
                LinearProjection::Momentum(ModeSet { grid: self.grid.clone(), mask: Arc::new(mask) })
            }
        };
        GeneralizedProjection::new(inner, self.conjugator.clone())
    }
}

/// `mu_psi(B) = ||E_hat(B) psi||^2 / ||psi||^2`.
pub fn pvm_measure(m: &GeneralizedPVM, psi: &WaveFunction, bins: &BTreeSet<usize>, t: f64) -> Result<f64> {
    m.projection(bins)?.expectation(psi, t)
}

/// One time slice of [`equivalence_table_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub t: f64,
    /// `||N⁻¹[N[psi_t]] - psi_t|| / ||psi_t||`.
    pub wave_functions: f64,
    /// `||psi'_t - N[psi_t]|| / ||psi'_t||` with `psi'_t` integrated directly.
    pub time_evolution: f64,
    /// Largest `|<E_hat>_(psi'_t) - <E>_(psi_t)|` over the projections.
    pub observables: f64,
    /// Largest `|p_B(N[psi_t]) - p_B(psi_t)|` over the bins.
    pub position: f64,
}

impl EquivalenceRow {
    pub const LABELS: [&'static str; 4] = ["wave_functions", "time_evolution", "observables", "position"];

    pub fn values(&self) -> [f64; 4] {
        [self.wave_functions, self.time_evolution, self.observables, self.position]
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
}

impl EquivalenceReport {
    /// Largest deviation per row label, in [`EquivalenceRow::LABELS`] order.
    pub fn max(&self) -> [f64; 4] {
        let mut m = [0.0f64; 4];
        for r in &self.rows {
            for (acc, v) in m.iter_mut().zip(r.values()) {
                *acc = acc.max(v);
            }
        }
        m
    }
}

/// Compares the linear description (`psi`, linear flow, `E`, `chi_B`) with
/// the nonlinear one (`N[psi]`, the pushed-forward equation integrated
/// directly, `N E N⁻¹`, `chi_B`) at every recorded time.
///
/// `n` must be a pure gauge `N_gamma(t)` so the nonlinear side has an
/// equation of its own.
pub fn equivalence_table_check(
    psi: &WaveFunction,
    n: &GaugeTransform,
    projections: &[LinearProjection],
    bins: &[BorelBin],
    potential: Option<&RealField>,
    hbar: f64,
    mass: f64,
    opts: &EvolveOptions,
) -> Result<EquivalenceReport> {
    let pure = n.lambda() == 1 && n.kappa().is_none() && matches!(n.theta(), PhaseField::Zero) && n.delta() == 1.0;
    if !pure {
        return Err(Error::NotClosed("the direct nonlinear flow needs a pure gauge N_gamma".into()));
    }
    let mut nonlinear = UnifiedParams::from_gauge(n.gamma(), hbar, mass);
    let mut linear = UnifiedParams::linear(hbar, mass);
    if let Some(v) = potential {
        nonlinear = nonlinear.with_potential(v.clone());
        linear = linear.with_potential(v.clone());
    }
    let inverse = n.inverse()?;
    let psi0_prime = n.apply(psi, 0.0)?;
    let lin = evolve(psi, &linear, opts)?;
    let direct = evolve(&psi0_prime, &nonlinear, opts)?;
    let conj = conjugated_evolve(&psi0_prime, n, potential, hbar, mass, opts)?;
    let hats: Vec<GeneralizedProjection> = projections
        .iter()
        .map(|e| GeneralizedProjection::new(e.clone(), n.clone()))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(lin.times.len());
    for (k, &t) in lin.times.iter().enumerate() {
        let (psi_t, direct_t, image_t) = (&lin.states[k], &direct.states[k], &conj.states[k]);
        let wave_functions = inverse.apply(image_t, t)?.distance(psi_t)? / psi_t.norm();
        let time_evolution = direct_t.distance(image_t)? / direct_t.norm();
        let mut observables = 0.0f64;
        for (e, hat) in projections.iter().zip(&hats) {
            observables = observables.max((hat.expectation(direct_t, t)? - e.expectation(psi_t)?).abs());
        }
        let mut position = 0.0f64;
        for b in bins {
            position = position.max((p_b(image_t, b)? - p_b(psi_t, b)?).abs());
        }
        rows.push(EquivalenceRow { t, wave_functions, time_evolution, observables, position });
    }
    Ok(EquivalenceReport { rows })
}

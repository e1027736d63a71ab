//! Statistical mixtures of pure states and how two decompositions of one
//! mixture drift apart under a nonlinear flow.
//!
//! The same mixed state `1/2 (|phi1><phi1| + |phi2><phi2|)` is also
//! `1/2 (|phi+><phi+| + |phi-><phi-|)` with `phi+- = (phi1 +- phi2)/sqrt 2`.
//! A linear flow keeps the two decompositions indistinguishable forever. A
//! nonlinear one generally does not, unless it is a gauge image of a linear
//! flow and the observables are conjugated by the same gauge.
//!
//! Random states come from [`seeded_rng`], a ChaCha8 stream seeded with a
//! single `u64`, so every run is reproducible from its seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolveOptions, UnifiedParams};
use crate::field::{Grid, WaveFunction};
use crate::gauge::GaugeTransform;
use crate::observables::{BorelBin, GeneralizedProjection, LinearProjection, ModeSet};

/// Weighted pure states on one grid, weights positive and summing to one.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<(f64, WaveFunction)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, WaveFunction)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidEnsemble("no members".into()));
        };
        if members.iter().any(|(w, _)| !(*w > 0.0 && *w <= 1.0)) {
            return Err(Error::InvalidEnsemble("weights must lie in (0, 1]".into()));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        if members.iter().any(|(_, s)| s.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        if members.iter().any(|(_, s)| s.norm_sqr() == 0.0) {
            return Err(Error::ZeroState);
        }
        Ok(Self { members })
    }

    pub fn pure(psi: WaveFunction) -> Result<Self> {
        Self::new(vec![(1.0, psi)])
    }

    pub fn members(&self) -> &[(f64, WaveFunction)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.members[0].1.grid()
    }

    /// Same weights, every state sent through `f` in parallel.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&WaveFunction) -> Result<WaveFunction> + Sync,
    {
        let states: Vec<WaveFunction> = self.members.par_iter().map(|(_, s)| f(s)).collect::<Result<_>>()?;
        Self::new(self.members.iter().map(|(w, _)| *w).zip(states).collect())
    }

    /// `sum_j w_j psi_j(x) conj psi_j(y) / ||psi_j||^2`, row-major, `n x n`.
    pub fn density_matrix(&self) -> Vec<Complex64> {
        let n = self.grid().len();
        let mut rho = vec![Complex64::new(0.0, 0.0); n * n];
        for (w, psi) in &self.members {
            let s = w / psi.norm_sqr();
            let a = psi.amplitudes();
            for i in 0..n {
                let ai = a[i] * s;
                for j in 0..n {
                    rho[i * n + j] += ai * a[j].conj();
                }
            }
        }
        rho
    }
}

/// `sum_j w_j f(psi_j)`, summed in member order.
pub fn ensemble_expectation(e: &Ensemble, f: impl Fn(&WaveFunction) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for (w, psi) in e.members() {
        acc += w * f(psi)?;
    }
    Ok(acc)
}

/// `(1/2 {phi1, phi2}, 1/2 {phi+, phi-})` for an orthogonal pair of equal norm.
pub fn equivalent_decompositions(phi1: &WaveFunction, phi2: &WaveFunction) -> Result<(Ensemble, Ensemble)> {
    let (n1, n2) = (phi1.norm(), phi2.norm());
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroState);
    }
    if (n1 - n2).abs() > 1e-12 * n1.max(n2) {
        return Err(Error::NotOrthonormal(format!("norms {n1} and {n2} differ")));
    }
    let overlap = phi1.inner(phi2)?.norm() / (n1 * n2);
    if overlap > 1e-10 {
        return Err(Error::NotOrthonormal(format!("|<phi1, phi2>| = {overlap:e}")));
    }
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let plus = phi1.add(phi2)?.scaled(r);
    let minus = phi1.sub(phi2)?.scaled(r);
    Ok((
        Ensemble::new(vec![(0.5, phi1.clone()), (0.5, phi2.clone())])?,
        Ensemble::new(vec![(0.5, plus), (0.5, minus)])?,
    ))
}

/// The generator behind every random state: ChaCha8 seeded from `seed`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth, strictly nonvanishing random state.
///
/// Modulus `b + prod_a exp(-(x_a - c_a)^2 / 4 s_a^2) (1 + a cos(q x_a + p))`
/// with `b` in `[0.05, 0.2]` and `a < 0.45`. Phase is a sum of three random
/// periodic sine modes per axis. All parameters are drawn before sampling,
/// so one seed gives the same continuum function on every resolution of
/// the same box.
pub fn random_nodeless_state(grid: &Grid, rng: &mut impl Rng) -> Result<WaveFunction> {
    let d = grid.dims();
    let base = rng.gen_range(0.05..0.2);
    let mut envelope = Vec::with_capacity(d);
    let mut modes = Vec::with_capacity(d);
    for a in 0..d {
        let l = grid.lengths()[a];
        let center = rng.gen_range(-0.25 * l..0.25 * l);
        let width = rng.gen_range(l / 16.0..l / 8.0).max(3.0 * grid.spacing(a));
        let ripple = rng.gen_range(0.0..0.45);
        let q = rng.gen_range(0.5..3.0) * 2.0 * std::f64::consts::PI / l;
        let p = rng.gen_range(0.0..std::f64::consts::TAU);
        envelope.push((center, width, ripple, q, p));
        let k0 = std::f64::consts::TAU / l;
        let m: Vec<(f64, f64, f64)> = (1..=3)
            .map(|m| (rng.gen_range(-1.0..1.0), m as f64 * k0, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        modes.push(m);
    }
    WaveFunction::from_fn(grid, |x| {
        let mut bump = 1.0;
        let mut phase = 0.0;
        for a in 0..d {
            let (c, s, r, q, p) = envelope[a];
            bump *= (-(x[a] - c).powi(2) / (4.0 * s * s)).exp() * (1.0 + r * (q * x[a] + p).cos());
            for &(amp, k, ph) in &modes[a] {
                phase += amp * (k * x[a] + ph).sin();
            }
        }
        Complex64::from_polar(base + bump, phase)
    })?
    .normalized()
}

/// Named projections whose expectations are compared between ensembles.
#[derive(Clone, Debug, Default)]
pub struct ObservableSet {
    ids: Vec<String>,
    items: Vec<GeneralizedProjection>,
}

impl ObservableSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, id: impl Into<String>, e: GeneralizedProjection) {
        self.ids.push(id.into());
        self.items.push(e);
    }

    /// Ten position slabs along the first axis, five bands of `|k_0|`
    /// splitting `[0, k_cut)` evenly (the last one open above), and five
    /// rank-one projections onto states from [`random_nodeless_state`].
    pub fn standard(grid: &Grid, seed: u64, k_cut: f64) -> Result<Self> {
        if !(k_cut > 0.0 && k_cut.is_finite()) {
            return Err(Error::InvalidArgument(format!("k_cut = {k_cut}")));
        }
        let mut set = Self::new();
        let (l, half) = (grid.lengths()[0], 0.5 * grid.lengths()[0]);
        for s in 0..10 {
            let lo = -half + s as f64 * l / 10.0;
            let hi = if s == 9 { f64::INFINITY } else { lo + l / 10.0 };
            let bin = BorelBin::slab(grid, 0, lo, hi)?;
            set.push(format!("position_{s}"), GeneralizedProjection::linear(LinearProjection::Position(bin)));
        }
        for b in 0..5 {
            let lo = b as f64 * k_cut / 5.0;
            let hi = if b == 4 { f64::INFINITY } else { lo + k_cut / 5.0 };
            let modes = ModeSet::band(grid, 0, lo, hi)?;
            set.push(format!("momentum_{b}"), GeneralizedProjection::linear(LinearProjection::Momentum(modes)));
        }
        let mut rng = seeded_rng(seed);
        for r in 0..5 {
            let phi = random_nodeless_state(grid, &mut rng)?;
            set.push(format!("rank_one_{r}"), GeneralizedProjection::linear(LinearProjection::rank_one(&phi)?));
        }
        Ok(set)
    }

    /// [`ObservableSet::standard`] with `k_cut` at half the Nyquist wavenumber.
    pub fn default_set(grid: &Grid, seed: u64) -> Result<Self> {
        Self::standard(grid, seed, 0.5 * std::f64::consts::PI / grid.spacing(0))
    }

    /// Every projection re-conjugated by `n`.
    pub fn conjugated(&self, n: &GaugeTransform) -> Result<Self> {
        let items = self
            .items
            .iter()
            .map(|e| GeneralizedProjection::new(e.inner().clone(), n.clone()))
            .collect::<Result<_>>()?;
        Ok(Self { ids: self.ids.clone(), items })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn items(&self) -> &[GeneralizedProjection] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Expectations of every observable in both ensembles at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceRecord {
    pub t: f64,
    /// `(<f>_e, <f>_e')` per observable, in set order.
    pub expectations: Vec<(f64, f64)>,
}

impl DivergenceRecord {
    pub fn max_abs_diff(&self) -> f64 {
        self.expectations.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct DivergenceSeries {
    pub ids: Vec<String>,
    pub records: Vec<DivergenceRecord>,
}

impl DivergenceSeries {
    /// Divergence at the final time.
    pub fn final_divergence(&self) -> f64 {
        self.records.last().map_or(0.0, DivergenceRecord::max_abs_diff)
    }

    /// Largest divergence over all recorded times.
    pub fn peak(&self) -> f64 {
        self.records.iter().map(DivergenceRecord::max_abs_diff).fold(0.0, f64::max)
    }
}

/// Evolves every member of `e` and `e_prime` under `p` (members in
/// parallel) and records `max_f |<f>_e(t) - <f>_e'(t)|` at every stride.
pub fn decomposition_divergence(
    e: &Ensemble,
    e_prime: &Ensemble,
    p: &UnifiedParams,
    opts: &EvolveOptions,
    observables: &ObservableSet,
) -> Result<DivergenceSeries> {
    if e.grid() != e_prime.grid() {
        return Err(Error::GridMismatch);
    }
    let members: Vec<&(f64, WaveFunction)> = e.members().iter().chain(e_prime.members()).collect();
    let runs = members
        .par_iter()
        .map(|(_, psi)| evolve(psi, p, opts))
        .collect::<Result<Vec<_>>>()?;
    let (left, right) = runs.split_at(e.len());
    let times = &runs[0].times;
    let mut records = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let expect = |ens: &Ensemble, traj: &[crate::evolution::Trajectory], f: &GeneralizedProjection| {
            let mut acc = 0.0;
            for ((w, _), run) in ens.members().iter().zip(traj) {
                acc += w * f.expectation(&run.states[k], t)?;
            }
            Ok::<f64, Error>(acc)
        };
        let expectations = observables
            .items()
            .par_iter()
            .map(|f| Ok((expect(e, left, f)?, expect(e_prime, right, f)?)))
            .collect::<Result<Vec<_>>>()?;
        records.push(DivergenceRecord { t, expectations });
    }
    Ok(DivergenceSeries { ids: observables.ids().to_vec(), records })
}

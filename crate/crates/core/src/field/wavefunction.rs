use num_complex::Complex64;

use super::grid::Grid;
use super::spectral;
use crate::error::{Error, Result};

/// Real scalar field sampled on a grid (potentials, phases, densities).
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.position(i)[..grid.dims()]))
            .collect();
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Probability density and current of a wavefunction.
#[derive(Clone, Debug)]
pub struct HydroFields {
    pub rho: Vec<f64>,
    /// One component per axis.
    pub current: Vec<Vec<f64>>,
}

/// Complex amplitudes on a [`Grid`]: a pure state.
#[derive(Clone, Debug)]
pub struct WaveFunction {
    grid: Grid,
    amps: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: &Grid, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for a grid of {} cells",
                amps.len(),
                grid.len()
            )));
        }
        if let Some(i) = amps.iter().position(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid: grid.clone(), amps })
    }

    /// Builds a state without the finiteness scan; callers guarantee it.
    pub(crate) fn from_parts(grid: &Grid, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), grid.len());
        Self { grid: grid.clone(), amps }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let amps = (0..grid.len()).map(|i| f(&grid.position(i)[..grid.dims()])).collect();
        Self::new(grid, amps)
    }

    /// Normalized packet `exp(i k.x) exp(-|x-c|^2 / (4 sigma^2))`.
    ///
    /// `sigma` is the standard deviation of the position density. It must be
    /// at least three cells wide and the packet must sit six widths inside the
    /// box on every axis.
    pub fn gaussian(grid: &Grid, center: &[f64], sigma: f64, momentum: &[f64]) -> Result<Self> {
        let d = grid.dims();
        if center.len() != d || momentum.len() != d {
            return Err(Error::InvalidArgument(format!(
                "center/momentum must have {d} components"
            )));
        }
        let min = 3.0 * grid.max_spacing();
        if !(sigma.is_finite() && sigma >= min) {
            return Err(Error::UnderResolved { width: sigma, min });
        }
        for a in 0..d {
            let half = 0.5 * grid.lengths()[a];
            if center[a].abs() + 6.0 * sigma > half {
                return Err(Error::OutsideBox(format!(
                    "axis {a}: |c| + 6 sigma = {} exceeds L/2 = {half}",
                    center[a].abs() + 6.0 * sigma
                )));
            }
        }
        let psi = Self::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for a in 0..d {
                r2 += (x[a] - center[a]).powi(2);
                phase += momentum[a] * x[a];
            }
            Complex64::from_polar((-r2 / (4.0 * sigma * sigma)).exp(), phase)
        })?;
        psi.normalized()
    }

    /// Normalized sum over periodic images of the packet in [`WaveFunction::gaussian`].
    ///
    /// Smooth across the box boundary for any width, so the packet may fill
    /// the box; its density then never drops far below its maximum. Only the
    /// resolution condition `sigma >= 3 max dx` applies.
    pub fn periodic_gaussian(
        grid: &Grid,
        center: &[f64],
        sigma: f64,
        momentum: &[f64],
    ) -> Result<Self> {
        let d = grid.dims();
        if center.len() != d || momentum.len() != d {
            return Err(Error::InvalidArgument(format!(
                "center/momentum must have {d} components"
            )));
        }
        let min = 3.0 * grid.max_spacing();
        if !(sigma.is_finite() && sigma >= min) {
            return Err(Error::UnderResolved { width: sigma, min });
        }
        // images beyond 40 sigma contribute below exp(-400)
        let reach: Vec<i64> = grid
            .lengths()
            .iter()
            .map(|&l| (40.0 * sigma / l).ceil() as i64 + 1)
            .collect();
        let mut offsets: Vec<Vec<f64>> = vec![Vec::new()];
        for (a, &r) in reach.iter().enumerate() {
            let l = grid.lengths()[a];
            offsets = offsets
                .into_iter()
                .flat_map(|o| {
                    (-r..=r).map(move |m| {
                        let mut o = o.clone();
                        o.push(m as f64 * l);
                        o
                    })
                })
                .collect();
        }
        let psi = Self::from_fn(grid, |x| {
            offsets
                .iter()
                .map(|o| {
                    let mut r2 = 0.0;
                    let mut phase = 0.0;
                    for a in 0..d {
                        let xa = x[a] + o[a];
                        r2 += (xa - center[a]).powi(2);
                        phase += momentum[a] * xa;
                    }
                    Complex64::from_polar((-r2 / (4.0 * sigma * sigma)).exp(), phase)
                })
                .sum()
        })?;
        psi.normalized()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `sum conj(self) other dV`, accumulated in index order.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_grid(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += a.conj() * b;
        }
        Ok(acc * self.grid.cell_volume())
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
        }
        acc * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_parts(&self.grid, self.amps.iter().map(|a| a * c).collect())
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(&self.grid, self.amps.iter().map(|a| a.conj()).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_parts(
            &self.grid,
            self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::from_parts(
            &self.grid,
            self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect(),
        ))
    }

    /// L2 distance `||self - other||`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum |psi_hat|^2 dV / N`, the Fourier-side norm squared.
    pub fn spectral_norm_sqr(&self) -> f64 {
        let mut spec = self.amps.clone();
        self.grid.forward(&mut spec);
        let mut acc = 0.0;
        for c in &spec {
            acc += c.norm_sqr();
        }
        acc * self.grid.cell_volume() / self.grid.len() as f64
    }

    /// `<x_a>` for every axis, with positions taken in `[-L/2, L/2)`.
    pub fn position_expectation(&self) -> Result<Vec<f64>> {
        self.position_moments(1)
    }

    /// `<x_a^2>` for every axis.
    pub fn position_second_moment(&self) -> Result<Vec<f64>> {
        self.position_moments(2)
    }

    fn position_moments(&self, power: i32) -> Result<Vec<f64>> {
        let ns = self.norm_sqr();
        if ns == 0.0 {
            return Err(Error::ZeroState);
        }
        let dv = self.grid.cell_volume();
        let mut m = vec![0.0; self.grid.dims()];
        for (i, a) in self.amps.iter().enumerate() {
            let x = self.grid.position(i);
            for (axis, acc) in m.iter_mut().enumerate() {
                *acc += x[axis].powi(power) * a.norm_sqr();
            }
        }
        Ok(m.into_iter().map(|v| v * dv / ns).collect())
    }

    /// `<-i grad>` evaluated in Fourier space (wavenumber units).
    pub fn momentum_expectation(&self) -> Result<Vec<f64>> {
        let mut spec = self.amps.clone();
        self.grid.forward(&mut spec);
        let mut total = 0.0;
        let mut m = vec![0.0; self.grid.dims()];
        for (i, c) in spec.iter().enumerate() {
            let w = c.norm_sqr();
            total += w;
            let k = self.grid.wavevector(i);
            for (axis, acc) in m.iter_mut().enumerate() {
                *acc += k[axis] * w;
            }
        }
        if total == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(m.into_iter().map(|v| v / total).collect())
    }

    /// `rho = |psi|^2` and `J = Im(conj(psi) grad psi)` with a spectral gradient.
    pub fn hydro(&self) -> HydroFields {
        let grad = spectral::spectral_gradient(&self.grid, &self.amps);
        let current = grad
            .iter()
            .map(|g| self.amps.iter().zip(g).map(|(p, d)| (p.conj() * d).im).collect())
            .collect();
        HydroFields { rho: self.density(), current }
    }
}

//! Strang split-step flow of the linear Schrodinger equation.
//!
//! Half a potential kick, the exact kinetic phase `exp(-i hbar k^2 dt / 2m)`
//! in Fourier space, then the other half kick. With `V = 0` the step is the
//! exact flow of the discretized equation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Grid, RealField, WaveFunction};

/// Precomputed phase factors for one `(grid, V, dt, hbar, m)` combination.
#[derive(Clone, Debug)]
pub struct LinearPropagator {
    grid: Grid,
    kinetic: Vec<Complex64>,
    half_kick: Option<Vec<Complex64>>,
    dt: f64,
}

impl LinearPropagator {
    pub fn new(grid: &Grid, potential: Option<&RealField>, dt: f64, hbar: f64, mass: f64) -> Result<Self> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step {dt} must be >= 0")));
        }
        if !(hbar > 0.0 && mass > 0.0) {
            return Err(Error::InvalidArgument("hbar and mass must be positive".into()));
        }
        let kinetic = grid
            .wavenumber_squared()
            .into_iter()
            .map(|k2| Complex64::from_polar(1.0, -hbar * k2 * dt / (2.0 * mass)))
            .collect();
        let half_kick = match potential {
            Some(v) => {
                if v.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                Some(
                    v.values()
                        .iter()
                        .map(|&v| Complex64::from_polar(1.0, -v * dt / (2.0 * hbar)))
                        .collect(),
                )
            }
            None => None,
        };
        Ok(Self { grid: grid.clone(), kinetic, half_kick, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `amps` by one step in place.
    pub fn step_in_place(&self, amps: &mut [Complex64]) {
        if let Some(kick) = &self.half_kick {
            amps.iter_mut().zip(kick).for_each(|(a, k)| *a *= k);
        }
        self.grid.forward(amps);
        amps.iter_mut().zip(&self.kinetic).for_each(|(a, k)| *a *= k);
        self.grid.inverse(amps);
        if let Some(kick) = &self.half_kick {
            amps.iter_mut().zip(kick).for_each(|(a, k)| *a *= k);
        }
    }

    pub fn step(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut amps = psi.amplitudes().to_vec();
        self.step_in_place(&mut amps);
        Ok(WaveFunction::from_parts(&self.grid, amps))
    }
}

/// One split-step of `i hbar d_t psi = (-hbar^2/2m lap + V) psi`.
pub fn step_linear(
    psi: &WaveFunction,
    potential: Option<&RealField>,
    dt: f64,
    hbar: f64,
    mass: f64,
) -> Result<WaveFunction> {
    LinearPropagator::new(psi.grid(), potential, dt, hbar, mass)?.step(psi)
}

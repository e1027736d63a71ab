//! Right-hand side of the unified family and its RK4 integrator.
//!
//! The kinetic part is evaluated as `nu1 lap psi` directly. Only the
//! departures of `mu2, mu3, mu5` from their kinetic values multiply the
//! functionals, so the linear point never divides by the density and stays
//! well defined at nodes.

use num_complex::Complex64;

use super::params::UnifiedParams;
use crate::error::{Error, Result};
use crate::field::{spectral, Grid, WaveFunction};
use crate::functionals::compute_r;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Spectral filter applied to the state after every RK4 step.
///
/// The products and quotients inside `R1..R5` alias near-Nyquist content
/// onto the wrong derivative symbols, which breaks the cancellation that
/// keeps the gauge-type equations neutrally stable. Without a filter those
/// modes grow from rounding noise within a few dozen steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Dealias {
    None,
    /// `exp(-36 (|k| / k_nyquist)^36)` per axis.
    #[default]
    HouLi,
}

/// Settings of the method-of-lines RK4 stepper.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOptions {
    /// `dt <= cfl * dx_min^2 * m / hbar`.
    pub cfl: f64,
    /// Reject a step when `max|psi|` grows by more than this factor.
    pub max_growth: f64,
    pub dealias: Dealias,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { cfl: 0.2, max_growth: 10.0, dealias: Dealias::default() }
    }
}

fn hou_li_filter(grid: &Grid, amps: &mut [Complex64]) {
    grid.forward(amps);
    for (i, a) in amps.iter_mut().enumerate() {
        let k = grid.wavevector(i);
        let mut damping = 0.0;
        for axis in 0..grid.dims() {
            let nyquist = std::f64::consts::PI / grid.spacing(axis);
            damping += 36.0 * (k[axis].abs() / nyquist).powi(36);
        }
        if damping > 0.0 {
            *a *= (-damping).exp();
        }
    }
    grid.inverse(amps);
}

/// Largest time step the stepper accepts.
pub fn stability_limit(grid: &Grid, p: &UnifiedParams, cfl: f64) -> f64 {
    let dx = grid.min_spacing();
    cfl * dx * dx * p.mass() / p.hbar()
}

/// `d_t psi` at time `t`, plus the number of floored cells.
pub(crate) fn rhs_amplitudes(
    grid: &Grid,
    amps: &[Complex64],
    p: &UnifiedParams,
    t: f64,
) -> Result<(Vec<Complex64>, usize)> {
    let c = p.coefficients(t);
    let n = amps.len();
    if amps.iter().all(|a| a.norm_sqr() == 0.0) {
        return Ok((vec![Complex64::new(0.0, 0.0); n], 0));
    }
    let lap = spectral::spectral_laplacian(grid, amps);
    // phi collects everything that multiplies psi
    let mut phi = vec![Complex64::new(0.0, 0.0); n];
    if let Some(v) = p.potential() {
        for (f, &v) in phi.iter_mut().zip(v.values()) {
            f.re += c.mu0 * v;
        }
    }

    let res = c.residual_mu();
    let needs_r = c.nu2 != 0.0 || res.iter().any(|&m| m != 0.0);
    let needs_rho = needs_r || c.alpha1 != 0.0 || p.coupling().is_some();
    let mut floored_cells = 0;
    if needs_rho {
        let psi = WaveFunction::from_parts(grid, amps.to_vec());
        if needs_r {
            let r = compute_r(&psi, p.floor())?;
            floored_cells = r.floored_cells;
            for i in 0..n {
                let re = res[0] * r.r1[i]
                    + res[1] * r.r2[i]
                    + res[2] * r.r3[i]
                    + res[3] * r.r4[i]
                    + res[4] * r.r5[i];
                phi[i] += Complex64::new(re, c.nu2 * r.r2[i]);
            }
            add_density_terms(&mut phi, &r.rho_floored, Some(&r.current), p, c.alpha1, c.mu0);
        } else {
            let (rho_floored, count) = p.floor().apply(&psi.density());
            floored_cells = count;
            let current = p.coupling().map(|_| psi.hydro().current);
            add_density_terms(&mut phi, &rho_floored, current.as_ref(), p, c.alpha1, c.mu0);
        }
    }

    let out = (0..n).map(|i| -I * (c.nu1 * lap[i] + phi[i] * amps[i])).collect();
    Ok((out, floored_cells))
}

fn add_density_terms(
    phi: &mut [Complex64],
    rho_floored: &[f64],
    current: Option<&Vec<Vec<f64>>>,
    p: &UnifiedParams,
    alpha1: f64,
    mu0: f64,
) {
    if alpha1 != 0.0 {
        for (f, r) in phi.iter_mut().zip(rho_floored) {
            f.re += alpha1 * r.ln();
        }
    }
    if let (Some(a), Some(j)) = (p.coupling(), current) {
        for (a_axis, j_axis) in a.iter().zip(j) {
            for i in 0..phi.len() {
                phi[i].re += mu0 * a_axis[i] * j_axis[i] / rho_floored[i];
            }
        }
    }
}

/// `d_t psi = -i [mu0 V + i(nu1 R1 + nu2 R2) + sum mu_k R_k + alpha1 ln rho + mu0 A.J/rho] psi`.
pub fn rhs_unified(psi: &WaveFunction, p: &UnifiedParams, t: f64) -> Result<Vec<Complex64>> {
    p.check_grid(psi.grid())?;
    Ok(rhs_amplitudes(psi.grid(), psi.amplitudes(), p, t)?.0)
}

/// Classical RK4 step; returns the new amplitudes and the largest floored
/// cell count seen by any stage.
pub(crate) fn rk4_in_place(
    grid: &Grid,
    amps: &mut [Complex64],
    p: &UnifiedParams,
    t: f64,
    dt: f64,
    opts: &StepOptions,
) -> Result<usize> {
    if dt == 0.0 {
        return Ok(0);
    }
    let limit = stability_limit(grid, p, opts.cfl);
    if !(dt > 0.0) || dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let before = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let stage = |base: &[Complex64], k: &[Complex64], h: f64| -> Vec<Complex64> {
        base.iter().zip(k).map(|(b, k)| b + k * h).collect()
    };
    let (k1, f1) = rhs_amplitudes(grid, amps, p, t)?;
    let (k2, f2) = rhs_amplitudes(grid, &stage(amps, &k1, 0.5 * dt), p, t + 0.5 * dt)?;
    let (k3, f3) = rhs_amplitudes(grid, &stage(amps, &k2, 0.5 * dt), p, t + 0.5 * dt)?;
    let (k4, f4) = rhs_amplitudes(grid, &stage(amps, &k3, dt), p, t + dt)?;
    let w = dt / 6.0;
    for i in 0..amps.len() {
        amps[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * w;
    }
    if opts.dealias == Dealias::HouLi {
        hou_li_filter(grid, amps);
    }
    let after = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let finite = amps.iter().all(|a| a.re.is_finite() && a.im.is_finite());
    if !finite || (before > 0.0 && after > opts.max_growth * before) {
        return Err(Error::BlowUp {
            t: t + dt,
            growth: if finite { after / before } else { f64::INFINITY },
        });
    }
    Ok(f1.max(f2).max(f3).max(f4))
}

/// One RK4 step of the unified equation from `t` to `t + dt`.
pub fn step_nonlinear(
    psi: &WaveFunction,
    p: &UnifiedParams,
    t: f64,
    dt: f64,
    opts: &StepOptions,
) -> Result<WaveFunction> {
    p.check_grid(psi.grid())?;
    let mut amps = psi.amplitudes().to_vec();
    rk4_in_place(psi.grid(), &mut amps, p, t, dt, opts)?;
    Ok(WaveFunction::from_parts(psi.grid(), amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::params::DgParams;
    use crate::evolution::LinearPropagator;
    use crate::field::RealField;
    use crate::functionals::{compute_r, DensityFloor};
    use std::f64::consts::PI;

    fn line() -> Grid {
        Grid::new(&[256], &[40.0]).unwrap()
    }

    #[test]
    fn linear_point_plane_wave_eigenvalue() {
        let l = 20.0;
        let g = Grid::new(&[128], &[l]).unwrap();
        let k = 2.0 * PI * 4.0 / l;
        let psi = WaveFunction::from_fn(&g, |x| Complex64::from_polar(1.0, k * x[0])).unwrap();
        let rhs = rhs_unified(&psi, &UnifiedParams::linear(1.0, 1.0), 0.0).unwrap();
        for (r, p) in rhs.iter().zip(psi.amplitudes()) {
            assert!((r - (-I * 0.5 * k * k * p)).norm() < 1e-10);
        }
    }

    #[test]
    fn bbm_on_unit_modulus_is_linear() {
        let l = 20.0;
        let g = Grid::new(&[64], &[l]).unwrap();
        let k = 2.0 * PI * 2.0 / l;
        let psi = WaveFunction::from_fn(&g, |x| Complex64::from_polar(1.0, k * x[0])).unwrap();
        let a = rhs_unified(&psi, &UnifiedParams::from_bbm(1.0, 1.0, 1.0), 0.0).unwrap();
        let b = rhs_unified(&psi, &UnifiedParams::linear(1.0, 1.0), 0.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn dg_isolates_diffusion_term() {
        // real Gaussian, so J = 0 and only nu2 R2 contributes to Re(rhs/psi)
        let g = Grid::new(&[512], &[32.0]).unwrap();
        let psi = WaveFunction::gaussian(&g, &[0.0], 1.0, &[0.0]).unwrap();
        let d = 0.3;
        let p = UnifiedParams::from_dg(DgParams { d, d_prime: 1.0, c: [1.0, 0.0, 1.0, 0.5, 0.0] }, 1.0, 1.0);
        let rhs = rhs_unified(&psi, &p, 0.0).unwrap();
        let r = compute_r(&psi, DensityFloor::default()).unwrap();
        let x = g.axis_coordinates(0);
        for i in (0..g.len()).filter(|&i| x[i].abs() <= 3.0) {
            let ratio = rhs[i] / psi.amplitudes()[i];
            assert!((ratio.re - 0.5 * d * r.r2[i]).abs() < 1e-8, "x = {}", x[i]);
        }
    }

    #[test]
    fn rk4_agrees_with_split_step_at_linear_point() {
        let g = line();
        let psi = WaveFunction::gaussian(&g, &[0.0], 1.0, &[1.0]).unwrap();
        let p = UnifiedParams::linear(1.0, 1.0);
        let dt = 1e-4;
        let prop = LinearPropagator::new(&g, None, dt, 1.0, 1.0).unwrap();
        let (mut a, mut b) = (psi.clone(), psi.clone());
        let opts = StepOptions::default();
        for n in 0..5000 {
            a = step_nonlinear(&a, &p, n as f64 * dt, dt, &opts).unwrap();
            b = prop.step(&b).unwrap();
        }
        let d = a.distance(&b).unwrap();
        assert!(d <= 1e-6, "distance {d:e}");
    }

    #[test]
    fn rk4_norm_drift_small() {
        let g = line();
        let psi = WaveFunction::gaussian(&g, &[0.0], 1.0, &[0.5]).unwrap();
        let p = UnifiedParams::linear(1.0, 1.0);
        let mut a = psi.clone();
        for n in 0..1000 {
            a = step_nonlinear(&a, &p, n as f64 * 1e-3, 1e-3, &StepOptions::default()).unwrap();
        }
        assert!((a.norm() - psi.norm()).abs() <= 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let g = Grid::new(&[64], &[20.0]).unwrap();
        let v = RealField::from_fn(&g, |x| 0.5 * x[0] * x[0]);
        let p = UnifiedParams::linear(1.0, 1.0).with_potential(v);
        let psi = WaveFunction::gaussian(&g, &[0.5], 1.0, &[0.0]).unwrap();
        let run = |dt: f64| {
            let mut a = psi.clone();
            let n = (0.5 / dt).round() as usize;
            for s in 0..n {
                a = step_nonlinear(&a, &p, s as f64 * dt, dt, &StepOptions::default()).unwrap();
            }
            a
        };
        let reference = run(0.5 / 1600.0);
        let errs: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&n| run(0.5 / n).distance(&reference).unwrap())
            .collect();
        let (r1, r2) = ((errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2());
        println!("RK4 observed orders {r1:.3} {r2:.3}");
        assert!((r1 - 4.0).abs() < 0.3 && (r2 - 4.0).abs() < 0.3);
    }

    #[test]
    fn zero_dt_and_guards() {
        let g = line();
        let psi = WaveFunction::gaussian(&g, &[0.0], 1.0, &[0.0]).unwrap();
        let p = UnifiedParams::from_bbm(1.0, 1.0, 1.0);
        let same = step_nonlinear(&psi, &p, 0.0, 0.0, &StepOptions::default()).unwrap();
        assert_eq!(same.amplitudes(), psi.amplitudes());
        assert!(matches!(
            step_nonlinear(&psi, &p, 0.0, 1.0, &StepOptions::default()),
            Err(Error::StepTooLarge { .. })
        ));
        let wild = p.with_coefficients(crate::evolution::Coefficients { alpha1: -1e6, ..p.coefficients(0.0) });
        let opts = StepOptions { cfl: 1e9, ..StepOptions::default() };
        assert!(matches!(step_nonlinear(&psi, &wild, 0.0, 1e-2, &opts), Err(Error::BlowUp { .. })));
    }
}

//! The five hydrodynamic functionals `R1..R5` of a wavefunction.
//!
//! With `rho = |psi|^2` and `J = Im(conj(psi) grad psi)`:
//!
//! ```text
//! R1 = div J / rho      R2 = lap rho / rho      R3 = J.J / rho^2
//! R4 = J.grad rho / rho^2                       R5 = grad rho.grad rho / rho^2
//! ```
//!
//! All derivatives are spectral. Every division uses the floored density
//! `rho~ = hypot(rho, eps * max rho)` so nodes and far tails stay finite.
//! The floor is smooth in `rho` on purpose: a hard `max` leaves a kink in
//! anything built from `rho~`, and spectral derivatives spread that kink over
//! the whole grid as Gibbs noise, which then gets divided by the floor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{spectral, WaveFunction};

/// Relative density floor used wherever a functional divides by `rho`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityFloor(f64);

impl DensityFloor {
    pub const DEFAULT: f64 = 1e-12;

    pub fn new(epsilon_rel: f64) -> Result<Self> {
        if epsilon_rel > 0.0 && epsilon_rel < 1e-3 {
            Ok(Self(epsilon_rel))
        } else {
            Err(Error::InvalidArgument(format!(
                "density floor {epsilon_rel} outside (0, 1e-3)"
            )))
        }
    }

    pub fn epsilon_rel(self) -> f64 {
        self.0
    }

    /// Absolute threshold for a density whose maximum is `max_rho`.
    pub fn threshold(self, max_rho: f64) -> f64 {
        self.0 * max_rho
    }

    /// `hypot(rho, t)` for a threshold `t`; equals `rho` to rounding once
    /// `rho > 1e8 t`.
    pub fn regularize(rho: f64, t: f64) -> f64 {
        rho.hypot(t)
    }

    /// Floored density pointwise, and the number of cells below the threshold.
    pub fn apply(self, rho: &[f64]) -> (Vec<f64>, usize) {
        let t = self.threshold(rho.iter().copied().fold(0.0, f64::max));
        let floored = rho.iter().filter(|&&r| r < t).count();
        (rho.iter().map(|&r| Self::regularize(r, t)).collect(), floored)
    }
}

impl Default for DensityFloor {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

/// `R1..R5` plus the intermediate fields the evolution terms reuse.
#[derive(Clone, Debug)]
pub struct RValues {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub r3: Vec<f64>,
    pub r4: Vec<f64>,
    pub r5: Vec<f64>,
    /// Floored density used in the denominators.
    pub rho_floored: Vec<f64>,
    pub current: Vec<Vec<f64>>,
    /// Number of cells where the floor was active.
    pub floored_cells: usize,
}

impl RValues {
    pub fn get(&self, j: usize) -> &[f64] {
        match j {
            1 => &self.r1,
            2 => &self.r2,
            3 => &self.r3,
            4 => &self.r4,
            5 => &self.r5,
            _ => panic!("functional index {j} not in 1..=5"),
        }
    }
}

pub fn compute_r(psi: &WaveFunction, floor: DensityFloor) -> Result<RValues> {
    let grid = psi.grid();
    let rho = psi.density();
    if rho.iter().all(|&r| r == 0.0) {
        return Err(Error::ZeroState);
    }
    let hydro = psi.hydro();
    let (grad_rho, lap_rho) = spectral::spectral_derivatives_real(grid, &rho);
    let div_j = spectral::spectral_divergence_real(grid, &hydro.current);
    let (rho_floored, floored_cells) = floor.apply(&rho);

    let n = grid.len();
    let (mut r1, mut r2, mut r3, mut r4, mut r5) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let rt = rho_floored[i];
        let rt2 = rt * rt;
        let (mut jj, mut jg, mut gg) = (0.0, 0.0, 0.0);
        for a in 0..grid.dims() {
            let j = hydro.current[a][i];
            let g = grad_rho[a][i];
            jj += j * j;
            jg += j * g;
            gg += g * g;
        }
        r1[i] = div_j[i] / rt;
        r2[i] = lap_rho[i] / rt;
        r3[i] = jj / rt2;
        r4[i] = jg / rt2;
        r5[i] = gg / rt2;
    }
    Ok(RValues { r1, r2, r3, r4, r5, rho_floored, current: hydro.current, floored_cells })
}

/// Both sides of `lap psi / psi = i R1 + R2/2 - R3 - R5/4`, pointwise.
///
/// The left side is evaluated as `conj(psi) lap psi / rho~` with the same
/// floor as the functionals. Only meaningful where `|psi|` is above the floor.
pub fn kinetic_decomposition(
    psi: &WaveFunction,
    floor: DensityFloor,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let r = compute_r(psi, floor)?;
    let lap = spectral::spectral_laplacian(psi.grid(), psi.amplitudes());
    let lhs = psi
        .amplitudes()
        .iter()
        .zip(&lap)
        .zip(&r.rho_floored)
        .map(|((p, l), rt)| p.conj() * l / rt)
        .collect();
    let rhs = (0..psi.grid().len())
        .map(|i| Complex64::new(0.5 * r.r2[i] - r.r3[i] - 0.25 * r.r5[i], r.r1[i]))
        .collect();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use std::f64::consts::PI;

    fn plane_wave(k_mode: f64) -> (WaveFunction, f64) {
        let l = 20.0;
        let g = Grid::new(&[128], &[l]).unwrap();
        let k = 2.0 * PI * k_mode / l;
        let psi = WaveFunction::from_fn(&g, |x| Complex64::from_polar(0.3, k * x[0])).unwrap();
        (psi, k)
    }

    fn unit_gaussian() -> WaveFunction {
        let g = Grid::new(&[512], &[32.0]).unwrap();
        WaveFunction::gaussian(&g, &[0.0], 1.0, &[0.0]).unwrap()
    }

    fn index_of(psi: &WaveFunction, x: f64) -> usize {
        let xs = psi.grid().axis_coordinates(0);
        xs.iter().position(|&v| (v - x).abs() < 1e-12).unwrap()
    }

    #[test]
    fn floor_bounds() {
        assert!(DensityFloor::new(0.0).is_err());
        assert!(DensityFloor::new(1e-3).is_err());
        assert!(DensityFloor::new(1e-8).is_ok());
        assert_eq!(DensityFloor::default().epsilon_rel(), 1e-12);
    }

    #[test]
    fn plane_wave_values() {
        let (psi, k) = plane_wave(4.0);
        let r = compute_r(&psi, DensityFloor::default()).unwrap();
        for i in 0..psi.grid().len() {
            assert!(r.r1[i].abs() < 1e-10);
            assert!(r.r2[i].abs() < 1e-10);
            assert!((r.r3[i] - k * k).abs() < 1e-10);
            assert!(r.r4[i].abs() < 1e-10);
            assert!(r.r5[i].abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_values() {
        let psi = unit_gaussian();
        let r = compute_r(&psi, DensityFloor::default()).unwrap();
        let one = index_of(&psi, 1.0);
        let zero = index_of(&psi, 0.0);
        assert!((r.r5[one] - 1.0).abs() < 1e-6, "R5(1) = {}", r.r5[one]);
        assert!((r.r2[zero] + 1.0).abs() < 1e-6, "R2(0) = {}", r.r2[zero]);
        // J is rounding noise; far tails divide it by the floored density
        let x = psi.grid().axis_coordinates(0);
        for i in (0..x.len()).filter(|&i| x[i].abs() <= 3.0) {
            let worst = r.r1[i].abs().max(r.r3[i].abs()).max(r.r4[i].abs());
            assert!(worst < 1e-10, "x = {}: {worst}", x[i]);
        }
    }

    #[test]
    fn gaussian_r5_matches_finite_differences() {
        // sixth-order central differences as an independent route
        let psi = unit_gaussian();
        let g = psi.grid().clone();
        let rho = psi.density();
        let dx = g.spacing(0);
        let r = compute_r(&psi, DensityFloor::default()).unwrap();
        let x = g.axis_coordinates(0);
        for i in 0..g.len() {
            if x[i].abs() > 3.0 {
                continue;
            }
            let at = |o: isize| rho[g.neighbor(i, 0, o)];
            let d1 = (45.0 * (at(1) - at(-1)) - 9.0 * (at(2) - at(-2)) + (at(3) - at(-3)))
                / (60.0 * dx);
            let fd = d1 * d1 / (rho[i] * rho[i]);
            let tol = 1e-6 * r.r5[i].max(1.0);
            assert!((fd - r.r5[i]).abs() < tol, "x = {}: {fd} vs {}", x[i], r.r5[i]);
        }
    }

    #[test]
    fn non_negative_squares() {
        let g = Grid::new(&[64, 32], &[12.0, 10.0]).unwrap();
        let psi = WaveFunction::from_fn(&g, |x| {
            let env = (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp();
            Complex64::from_polar(env * (1.2 + (x[0] - x[1]).sin()), 0.7 * x[0] + 0.2 * x[1] * x[1])
        })
        .unwrap();
        let r = compute_r(&psi, DensityFloor::default()).unwrap();
        assert!(r.r3.iter().chain(&r.r5).all(|&v| v >= 0.0));
    }

    #[test]
    fn zero_state_is_rejected() {
        let g = Grid::new(&[16], &[1.0]).unwrap();
        assert!(matches!(
            compute_r(&WaveFunction::zeros(&g), DensityFloor::default()),
            Err(Error::ZeroState)
        ));
    }

    #[test]
    fn decomposition_plane_wave() {
        let (psi, k) = plane_wave(3.0);
        let (lhs, rhs) = kinetic_decomposition(&psi, DensityFloor::default()).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a + k * k).norm() < 1e-10 && (b + k * k).norm() < 1e-10);
        }
    }

    #[test]
    fn decomposition_constant() {
        let g = Grid::new(&[32], &[5.0]).unwrap();
        let psi = WaveFunction::from_fn(&g, |_| Complex64::new(0.4, -0.1)).unwrap();
        let (lhs, rhs) = kinetic_decomposition(&psi, DensityFloor::default()).unwrap();
        assert!(lhs.iter().chain(&rhs).all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn decomposition_gaussian_core() {
        let psi = unit_gaussian();
        let (lhs, rhs) = kinetic_decomposition(&psi, DensityFloor::default()).unwrap();
        let x = psi.grid().axis_coordinates(0);
        let worst = (0..x.len())
            .filter(|&i| x[i].abs() <= 3.0)
            .map(|i| (lhs[i] - rhs[i]).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6, "residual {worst}");
    }
}

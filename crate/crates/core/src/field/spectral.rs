//! Fourier-space differentiation on a periodic [`Grid`].
//!
//! First derivatives drop the Nyquist mode of even axes so that the gradient
//! of a real field stays real. The Laplacian keeps it with `-(pi/dx)^2`, which
//! makes every grid mode an exact eigenfunction.

use num_complex::Complex64;

use super::grid::Grid;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn to_complex(f: &[f64]) -> Vec<Complex64> {
    f.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

fn derivative_symbol(grid: &Grid, axis: usize, flat: usize) -> f64 {
    let n = grid.shape()[axis];
    let j = grid.unravel(flat)[axis];
    if n.is_multiple_of(2) && j == n / 2 {
        0.0
    } else {
        grid.axis_wavenumbers(axis)[j]
    }
}

/// Gradient from an already transformed field.
fn gradient_from_spectrum(grid: &Grid, spectrum: &[Complex64]) -> Vec<Vec<Complex64>> {
    (0..grid.dims())
        .map(|axis| {
            let mut d: Vec<Complex64> = spectrum
                .iter()
                .enumerate()
                .map(|(i, &c)| I * derivative_symbol(grid, axis, i) * c)
                .collect();
            grid.inverse(&mut d);
            d
        })
        .collect()
}

fn laplacian_from_spectrum(grid: &Grid, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut d: Vec<Complex64> = spectrum
        .iter()
        .zip(grid.wavenumber_squared())
        .map(|(&c, k2)| -k2 * c)
        .collect();
    grid.inverse(&mut d);
    d
}

pub fn spectral_gradient(grid: &Grid, f: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut spec = f.to_vec();
    grid.forward(&mut spec);
    gradient_from_spectrum(grid, &spec)
}

pub fn spectral_laplacian(grid: &Grid, f: &[Complex64]) -> Vec<Complex64> {
    let mut spec = f.to_vec();
    grid.forward(&mut spec);
    laplacian_from_spectrum(grid, &spec)
}

/// Gradient and Laplacian sharing one forward transform.
pub fn spectral_derivatives(grid: &Grid, f: &[Complex64]) -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
    let mut spec = f.to_vec();
    grid.forward(&mut spec);
    (gradient_from_spectrum(grid, &spec), laplacian_from_spectrum(grid, &spec))
}

pub fn spectral_gradient_real(grid: &Grid, f: &[f64]) -> Vec<Vec<f64>> {
    spectral_gradient(grid, &to_complex(f))
        .into_iter()
        .map(|c| c.into_iter().map(|v| v.re).collect())
        .collect()
}

pub fn spectral_laplacian_real(grid: &Grid, f: &[f64]) -> Vec<f64> {
    spectral_laplacian(grid, &to_complex(f)).into_iter().map(|v| v.re).collect()
}

/// Gradient and Laplacian of a real field.
pub fn spectral_derivatives_real(grid: &Grid, f: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let (g, l) = spectral_derivatives(grid, &to_complex(f));
    (
        g.into_iter().map(|c| c.into_iter().map(|v| v.re).collect()).collect(),
        l.into_iter().map(|v| v.re).collect(),
    )
}

pub fn spectral_divergence_real(grid: &Grid, components: &[Vec<f64>]) -> Vec<f64> {
    let mut spec = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (axis, comp) in components.iter().enumerate() {
        let mut c = to_complex(comp);
        grid.forward(&mut c);
        for (i, (s, v)) in spec.iter_mut().zip(c).enumerate() {
            *s += I * derivative_symbol(grid, axis, i) * v;
        }
    }
    grid.inverse(&mut spec);
    spec.into_iter().map(|v| v.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line(n: usize, l: f64) -> Grid {
        Grid::new(&[n], &[l]).unwrap()
    }

    #[test]
    fn sine_derivative() {
        let l = 7.0;
        let g = line(64, l);
        let x = g.axis_coordinates(0);
        let w = 2.0 * PI / l;
        let f: Vec<f64> = x.iter().map(|&x| (w * x).sin()).collect();
        let d = spectral_gradient_real(&g, &f);
        for (xi, di) in x.iter().zip(&d[0]) {
            assert!((di - w * (w * xi).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = Grid::new(&[16, 8], &[1.0, 2.0]).unwrap();
        let d = spectral_gradient_real(&g, &vec![3.5; g.len()]);
        assert!(d.iter().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn plane_wave_is_laplacian_eigenfunction() {
        let l = 10.0;
        let g = line(128, l);
        let k = 2.0 * PI * 5.0 / l;
        let f: Vec<Complex64> = g
            .axis_coordinates(0)
            .iter()
            .map(|&x| Complex64::from_polar(1.0, k * x))
            .collect();
        let lap = spectral_laplacian(&g, &f);
        for (a, b) in lap.iter().zip(&f) {
            assert!((a + k * k * b).norm() < 1e-10);
        }
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = Grid::new(&[64, 64], &[12.0, 12.0]).unwrap();
        let f: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.position(i);
                (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp()
            })
            .collect();
        let div = spectral_divergence_real(&g, &spectral_gradient_real(&g, &f));
        let lap = spectral_laplacian_real(&g, &f);
        for (a, b) in div.iter().zip(&lap) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic lattice on `[-L/2, L/2)` along each of 1 to 3 axes.
///
/// Storage is row-major: the last axis varies fastest. The grid owns the
/// FFT plans for every axis, so cloning is cheap (reference counted) and a
/// grid can be shared freely between threads.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    shape: Vec<usize>,
    lengths: Vec<f64>,
    strides: Vec<usize>,
    wavenumbers: Vec<Vec<f64>>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("shape", &self.inner.shape)
            .field("lengths", &self.inner.lengths)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.shape == other.inner.shape && self.inner.lengths == other.inner.lengths)
    }
}

impl Grid {
    pub fn new(points: &[usize], lengths: &[f64]) -> Result<Self> {
        let dims = points.len();
        if !(1..=3).contains(&dims) {
            return Err(Error::InvalidGrid(format!("dimension {dims} not in 1..=3")));
        }
        if lengths.len() != dims {
            return Err(Error::InvalidGrid(format!(
                "{} lengths given for {dims} axes",
                lengths.len()
            )));
        }
        for (&n, &l) in points.iter().zip(lengths) {
            if n < 8 {
                return Err(Error::InvalidGrid(format!("{n} points per axis, need >= 8")));
            }
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("axis length {l} must be positive")));
            }
        }

        let mut strides = vec![1; dims];
        for a in (0..dims.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * points[a + 1];
        }

        let mut planner = FftPlanner::new();
        let forward = points.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = points.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        let wavenumbers = points
            .iter()
            .zip(lengths)
            .map(|(&n, &l)| {
                (0..n)
                    .map(|j| {
                        let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                        2.0 * PI * m / l
                    })
                    .collect()
            })
            .collect();

        Ok(Self {
            inner: Arc::new(GridInner {
                shape: points.to_vec(),
                lengths: lengths.to_vec(),
                strides,
                wavenumbers,
                forward,
                inverse,
            }),
        })
    }

    pub fn dims(&self) -> usize {
        self.inner.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn lengths(&self) -> &[f64] {
        &self.inner.lengths
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.inner.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.inner.lengths[axis] / self.inner.shape[axis] as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dims()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dims()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dims()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.inner.lengths.iter().product()
    }

    /// Sample positions along one axis, `x_j = -L/2 + j dx`.
    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        let dx = self.spacing(axis);
        let half = 0.5 * self.inner.lengths[axis];
        (0..self.inner.shape[axis]).map(|j| -half + j as f64 * dx).collect()
    }

    /// Angular wavenumbers of the DFT modes along one axis in FFT order.
    /// The Nyquist mode of an even axis carries `-pi/dx`.
    pub fn axis_wavenumbers(&self, axis: usize) -> &[f64] {
        &self.inner.wavenumbers[axis]
    }

    /// Per-axis multi-index of a flat index.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in 0..self.dims() {
            idx[a] = (flat / self.inner.strides[a]) % self.inner.shape[a];
        }
        idx
    }

    /// Flat index of a multi-index; each component wraps periodically.
    pub fn ravel(&self, idx: &[isize]) -> usize {
        idx.iter()
            .zip(&self.inner.shape)
            .zip(&self.inner.strides)
            .map(|((&i, &n), &s)| i.rem_euclid(n as isize) as usize * s)
            .sum()
    }

    /// Flat index of the periodic neighbour `offset` cells away along `axis`.
    pub fn neighbor(&self, flat: usize, axis: usize, offset: isize) -> usize {
        let idx = self.unravel(flat);
        let mut signed = [0isize; 3];
        for a in 0..self.dims() {
            signed[a] = idx[a] as isize;
        }
        signed[axis] += offset;
        self.ravel(&signed[..self.dims()])
    }

    /// Position of a cell; unused trailing components are zero.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dims() {
            x[a] = -0.5 * self.inner.lengths[a] + idx[a] as f64 * self.spacing(a);
        }
        x
    }

    /// Wave vector of a spectral cell.
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut k = [0.0; 3];
        for a in 0..self.dims() {
            k[a] = self.inner.wavenumbers[a][idx[a]];
        }
        k
    }

    /// `|k|^2` of every spectral cell, consistent with the spectral Laplacian.
    pub fn wavenumber_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.wavevector(i).iter().map(|k| k * k).sum())
            .collect()
    }

    /// Unnormalized forward DFT over all axes, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.forward);
    }

    /// Inverse DFT over all axes, in place, dividing by the number of cells.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.inverse);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid");
        for (axis, plan) in plans.iter().enumerate() {
            let n = self.inner.shape[axis];
            let stride = self.inner.strides[axis];
            if stride == 1 {
                plan.process(data);
                continue;
            }
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let block = n * stride;
            for outer in 0..data.len() / block {
                for s in 0..stride {
                    let base = outer * block + s;
                    for j in 0..n {
                        line[j] = data[base + j * stride];
                    }
                    plan.process(&mut line);
                    for j in 0..n {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
    }
}

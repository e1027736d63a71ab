//! Periodic grids, wavefunctions, hydrodynamic fields and spectral calculus.

mod grid;
pub mod snapshot;
pub mod spectral;
mod wavefunction;

pub use grid::Grid;
pub use snapshot::{read_snapshot, write_snapshot};
pub use spectral::{
    spectral_derivatives, spectral_derivatives_real, spectral_divergence_real, spectral_gradient,
    spectral_gradient_real, spectral_laplacian, spectral_laplacian_real,
};
pub use wavefunction::{HydroFields, RealField, WaveFunction};

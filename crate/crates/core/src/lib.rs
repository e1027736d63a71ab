pub mod cli;
pub mod ensembles;
pub mod error;
pub mod evolution;
pub mod field;
pub mod functionals;
pub mod gauge;
pub mod observables;

pub use error::{Error, Result};

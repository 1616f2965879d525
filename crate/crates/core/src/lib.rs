//! Numerical free probability: n-fold free convolution via subordination,
//! density recovery by Stieltjes inversion, and the free CLT expansions for
//! densities, free entropy, and free Fisher information.

pub mod cli;
pub mod density;
pub mod entropy;
pub mod error;
pub mod expansion;
pub mod measure;
pub mod quad;
pub mod subordination;
pub mod transforms;

pub use error::{Error, Result};
pub use measure::{DensityProfile, Measure};
pub use num_complex::Complex64;

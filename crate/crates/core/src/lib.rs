//! Spectra of time-frequency localization operators with polyradial masks,
//! Hermite and Hagedorn windows, and mixed-state windows.

pub mod cli;
pub mod config;
pub mod eigenvalues;
pub mod error;
pub mod hagedorn;
pub mod opmatrix;
pub mod phasespace;
pub mod quad;
pub mod reinhardt;
pub mod specfun;
pub mod symplectic;

pub use error::{Error, Result};

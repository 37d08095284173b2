//! Sampled and closed-form time-frequency transforms on phase space.

mod closed;
mod grid;
mod transforms;

pub use closed::*;
pub use grid::{GridFunction, PhaseGrid, Signal, TimeLattice};
pub use transforms::{cohen_class, fft_convolve, stft, stft_point, wigner, wigner_point};

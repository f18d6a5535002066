//! Rough kernels, their dyadic measures and the Fourier decay checks.

mod decay;
mod kernel;
mod profile;
mod tau;
mod windows;

pub use decay::*;
pub use kernel::*;
pub use profile::*;
pub use tau::*;
pub use windows::*;

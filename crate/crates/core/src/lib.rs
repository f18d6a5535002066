pub mod bessel;
pub mod dilation;
pub mod error;
pub mod extrapolation;
pub mod linalg;
pub mod oscillatory;
pub mod polar;
pub mod quadrature;
pub mod quasinorm;
pub mod report;
pub mod rough;

pub use error::{Error, Result};
pub use linalg::SquareMatrix;

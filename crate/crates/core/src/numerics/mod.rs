//! Extended-exponent complex arithmetic, complex polynomials with a
//! companion-matrix root finder, and small dense 2x2 helpers.

pub(crate) mod dd;
mod ext;
mod mat2;
mod poly;

pub use ext::{ext_log_abs, ext_point, log_sup_norm, ExtComplex, ExtPoint, LN_2};
pub use mat2::Mat2;
pub use poly::Poly;

//! Shared numerical machinery: compensated summation, quadrature rules,
//! Chebyshev interpolation, special functions, and small fitting problems.

pub mod chebyshev;
pub mod fitting;
pub mod kahan;
pub mod quad;
pub mod special;

pub use chebyshev::Chebyshev;
pub use kahan::Accumulator;

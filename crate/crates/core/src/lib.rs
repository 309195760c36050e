//! PT-symmetric oscillator with a centrifugal core: spectrum, eigenfunctions,
//! pseudo-norms, ladder operators and coherent states.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent;
pub mod error;
pub mod grid;
pub mod ladder;
pub mod oscillator;
pub mod quadrature;
pub mod special;

pub use num_complex::Complex64;

pub use coherent::{CoherentStateSpec, NormZeroReport};
pub use error::{Error, Result};
pub use grid::{GridFunction, UniformGrid};
pub use ladder::{LadderOperator, ParameterizedFunction};
pub use oscillator::{Eigenstate, EigenstateSpec, PtoParams, QuasiParity};
pub use quadrature::{Integral, QuadratureConfig};

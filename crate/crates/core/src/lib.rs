//! Tetrahedral Boltzmann weights of state-integral models and numerical
//! checks of the identities they satisfy.

// `!(x < y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod identities;
pub mod lattice;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod shapes;
pub mod specfun;
pub mod weights;

pub use lattice::{LatticeSpec, TransferMatrix};
pub use num_complex::Complex64;
pub use quadrature::{Grid, StateSpace};
pub use shapes::{AngleTriple, GaugeField, PentagonAngles, RhoSix, SpectralQuad};
pub use weights::{EdgeStates, IrcCorners, ModelParams, TetWeight, TetrahedralWeight};

//! Spectral solver and verification toolkit for Abel integral equations in
//! Jacobi-weighted Lebesgue spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod error;
pub mod fracops;
pub mod jacobi;
pub mod solver;
pub mod specfun;

mod ddouble;
mod exact;

pub use coupling::{CouplingMatrix, DecayDiagnostic, Orientation};
pub use error::{Error, Result};
pub use fracops::{FracOrder, PowerTerm};
pub use jacobi::{CoefficientSequence, JacobiBasis, Side};
pub use solver::{solve, AbelProblem, Rhs, SolutionReport};

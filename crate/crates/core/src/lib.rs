//! Exact arithmetic for the generalized Grassmann algebra and its
//! companions: the coefficient ring `C[ε]`, generalized signs, co-module
//! certificates, idempotent decompositions, hulls and formal supertraces.

pub mod coeff;
pub mod comodule;
pub mod error;
pub mod grassmann;
pub mod hull;
pub mod linalg;
pub mod perm;
pub mod sample;
pub mod scalar;
pub mod supertrace;

pub use coeff::{exp_map, EpsMonomial, EpsPoly, PairSet};
pub use error::AlgebraError;
pub use grassmann::{GrassElem, Grade, SElem, SGen, SWord, Word};
pub use perm::Permutation;
pub use scalar::{BaseRing, Scalar};

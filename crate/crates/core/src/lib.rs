//! Local Gowers norms on quadratic varieties over `F_p`.
//!
//! The crate is organized in layers:
//!
//! * [`field`] — exact arithmetic over `F_p`, the `tau`/`iota` lifting maps,
//!   and exact linear algebra (RREF, solve, null space).
//! * [`quadform`] — quadratic forms, affine subspaces, sphere sets
//!   `V(M)^{h_1,...,h_r}` and their rank/isotropy geometry.
//! * [`poly`] — sparse multivariate polynomials: `F_p`-coefficient forms and
//!   exact `(1/p)Z`-coefficient polynomials.
//! * [`gowers`] — grid functions, the multidimensional DFT, Gowers-set
//!   counting strategies and local Gowers norms.
//! * [`mset`] — quadratic function families, standard representations,
//!   I-decompositions, projections/fibers and Fubini averaging.
//! * [`ideals`] — form-ideal membership, strings, reducibility predicates,
//!   top-down decomposition witnesses and almost linear Freiman maps.
//! * [`inverse`] — polynomial phases, the constructive degree-1 inverse
//!   step, correlations and converse checks.

pub mod field;
pub mod gowers;
pub mod ideals;
pub mod inverse;
pub mod mset;
pub mod poly;
pub mod quadform;
pub mod rng;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

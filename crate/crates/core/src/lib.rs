//! Exact computations in the universal Steenrod algebra `Q(p)` at odd primes.
//!
//! The algebra is the free `F_p`-algebra on letters `z_{eps,k}` modulo the
//! generalized Adem relations `R(eps,k,n)` and `S(eps,k,n)`. Elements are
//! represented by sparse polynomials over words and reduced to the basis of
//! admissible words by [`straighten::Straightener`].

pub mod algebra;
pub mod error;
pub mod expr;
pub mod fractal;
pub mod modp;
pub mod straighten;
pub mod verify;

pub use algebra::{Family, Letter, Poly, RelationId, Word};
pub use error::{Error, Result};
pub use modp::{validate_prime, Fp, PrimeContext};
pub use straighten::{ReductionStats, Straightener, Strategy};

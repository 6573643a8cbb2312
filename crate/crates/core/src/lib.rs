//! Batch computation of L-polynomials for genus-3 curves given as double
//! covers `w^2 = f(X,Y,Z)` of a plane conic `g(X,Y,Z) = 0`, where the conic
//! need not have a rational point.
//!
//! The curve is first rewritten as a hyperelliptic model `y^2 = h(x)` over a
//! quadratic field `K = Q(sqrt D)`. An accumulating remainder tree over the
//! ring of integers of `K` then yields, for every good prime `p < N` at once,
//! one row of the Hasse-Witt matrix per translate of `h`; three translates
//! recover the full matrix and hence `L_p(T) mod p`. The exact polynomial is
//! lifted from there with generic-group computations in the Jacobian of the
//! reduction.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`], [`quad_ring`], [`finite_fields`]: scalar arithmetic.
//! * [`model_builder`]: conic + quartic to hyperelliptic model over `O_K`.
//! * [`recurrence`], [`remainder_forest`]: the batch kernel.
//! * [`hasse_witt`], [`lpoly_modp`]: per-prime extraction.
//! * [`jacobian`], [`lifting`]: recovery of `L_p(T)` over `Z`.
//! * [`oracle`]: brute-force references used by tests and small primes.
//! * [`driver`], [`curve_file`]: configuration, classification, output.

pub mod arith;
pub mod curve_file;
pub mod driver;
pub mod error;
pub mod finite_fields;
pub mod hasse_witt;
pub mod jacobian;
pub mod lifting;
pub mod lpoly_modp;
pub mod model_builder;
pub mod oracle;
pub mod quad_ring;
pub mod recurrence;
pub mod remainder_forest;

pub use error::{Error, Result};

//! Exact arithmetic for double quintic symmetroids.
//!
//! A four-dimensional linear system of quadrics in P⁴ determines a discriminant
//! quintic `H`, a double cover `Y → H` parameterising singular members together
//! with a ruling of 2-planes, and a 2-torsion Brauer class on `Y` coming from
//! the conic bundle of planes. This crate computes that data exactly:
//!
//! * [`exact`]: big integers, rationals, sparse multivariate polynomials,
//!   exact matrices, Smith normal form, real root isolation.
//! * [`localfields`]: square classes and Hilbert symbols at every place of ℚ.
//! * [`quadform`]: rank, signature, discriminant and smooth-point tests for
//!   quadratic forms over ℚ, ℝ, ℚ_p and 𝔽_q.
//! * [`pencil`]: the universal Gram matrix, the quaternion symbol of the
//!   Brauer class, regularity certificates and points of the Reye variety.
//! * [`nullstellensatz`]: Macaulay-matrix emptiness certificates over 𝔽̄_p and
//!   over every prime at once.
//! * [`brauer`]: local points of `Y`, local invariants, and certificates for
//!   the failure of weak approximation.
//! * [`density`]: the local sieve factors, the certified Euler product bound,
//!   Monte Carlo sampling and exhaustive censuses over 𝔽_2 and 𝔽_3.

pub mod brauer;
pub mod density;
pub mod error;
pub mod exact;
pub mod localfields;
pub mod nullstellensatz;
pub mod pencil;
pub mod quadform;

pub use error::{Error, Result};

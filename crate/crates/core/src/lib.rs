//! Arithmetic of integral points on affine quadrics `q(x) = m` over the rationals.
//!
//! The library is organized around one pipeline:
//!
//! * [`forms`] — exact quadratic-form algebra: diagonalization, Hilbert symbols,
//!   Hasse invariants, local and global representability (the solvability gate).
//! * [`enumerate`] — integral and `p0`-integral points in height balls and boxes,
//!   with a fast prefix-scan enumerator and a naive full-box oracle.
//! * [`modular`] — reductions mod `p^k` and exact point counts over prime fields
//!   and prime-power rings, for the quadric and for codimension-two slices.
//! * [`density`] — local densities, archimedean densities by quadrature, p-adic
//!   height-ball volumes, and assembled main-term predictions.
//! * [`equidist`] — counts in congruence neighborhoods against their main terms,
//!   with measured discrepancy exponents.
//! * [`sieve`] — sifting functions, density tables, Mertens products, remainder
//!   ledgers, deterministic factorization, and almost-prime searches.
//! * [`geomsieve`] — points whose reductions meet a codimension-two locus at some
//!   large prime, plus the supporting gcd-divisibility and representability counts.
//!
//! All counts and densities are exact (`BigInt` / `BigRational`); floating point
//! is confined to quadrature estimates and least-squares fits.

pub mod arith;
pub mod density;
pub mod enumerate;
pub mod equidist;
pub mod error;
pub mod fit;
pub mod forms;
pub mod geomsieve;
pub mod modular;
pub mod oracles;
pub mod poly;
pub mod sieve;

pub use error::Error;

/// Exact integer used at API boundaries.
pub type Int = num_bigint::BigInt;
/// Exact rational used for densities, measures, and sieve weights.
pub type Rat = num_rational::BigRational;

/// Convenience result alias.
pub type Result<T> = std::result::Result<T, Error>;

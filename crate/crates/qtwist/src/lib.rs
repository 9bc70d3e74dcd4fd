//! Exact 2-descent machinery for full-2-torsion elliptic curves over ℚ,
//! together with the prime-constellation sieve used to hunt for quadratic
//! twists with prescribed 2-Selmer rank.
//!
//! The crate certifies rank growth in ℚ(i)/ℚ: it searches for a twist
//! parameter `t` such that `dim Sel²(Eᵗ/ℚ) = 2` while `E⁻ᵗ` carries an
//! explicit non-torsion rational point, and packages the result as a
//! re-verifiable certificate.
//!
//! Module map:
//! - [`qlocal`] — places, square classes, Hilbert symbols, reciprocity,
//!   deterministic prime search.
//! - [`quadspace`] — finite 𝔽₂ quadratic spaces, maximal isotropic
//!   subspaces, Frobenius-determinant degeneracy classification.
//! - [`curve2tor`] — full-2-torsion curves, Kummer maps, local images,
//!   torsion, root numbers, point search.
//! - [`seltrans`] — Selmer structures, transition chains, twist descent,
//!   suitability checks, sign-table calculus, Selmer reduction.
//! - [`constellation`] — linear-form systems, local densities, singular
//!   series, convex regions, the simultaneous-prime sieve.
//! - [`pipeline`] — experiment orchestration, certificates, verification.

pub mod constellation;
pub mod curve2tor;
pub(crate) mod padic;
pub mod pipeline;
pub mod qlocal;
pub mod quadspace;
pub mod seltrans;

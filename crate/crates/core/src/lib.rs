//! Exact computational homological algebra over the rationals.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] — sparse matrices over arbitrary-precision rationals, with
//!   exact rank / kernel / solve / projector-image routines.
//! * [`chain`] — finitely supported chain complexes, chain maps, homology,
//!   tensor products and mapping cones.
//! * [`perm`] — permutations, reduced words in adjacent transpositions, and
//!   Koszul signs for permuting graded tensor factors.
//! * [`symseq`] — symmetric sequences of chain complexes: the levelwise
//!   tensor product, tensor powers, coinvariants by the averaging projector,
//!   and mapping sequences.
//! * [`circle`] — the composition (circle) product of symmetric sequences,
//!   its associativity and unit isomorphisms, unit insertions, and the
//!   evaluation / transposition maps of the mapping-sequence adjunction.
//! * [`operad`] — operads as monoids for the circle product, their algebras
//!   and one-sided modules, axiom checkers, and built-in examples.
//! * [`simplicial`] — simplicial objects in chain complexes: identity checks,
//!   Moore normalization, Dold–Kan decomposition, realization as a total
//!   complex with an explicit trustworthy degree window, skeletal truncation,
//!   copowers by finite simplicial sets, and simplicial homotopies.
//! * [`bar`] — two-sided bar constructions, their contractions, and the
//!   derived invariants built from them (Quillen homology, change of
//!   operads, right-module resolutions).
//! * [`selftest`] — the executable acceptance suite.
//!
//! Everything is computed with exact rational arithmetic; no floating point
//! appears anywhere. All reported numbers are either exactly right or an
//! error is raised.

pub mod bar;
pub mod chain;
pub mod circle;
pub mod error;
pub mod linalg;
pub mod operad;
pub mod perm;
pub mod selftest;
pub mod simplicial;
pub mod symseq;

pub use error::Error;

/// Arbitrary-precision rational scalar used throughout the crate.
pub type Q = num::BigRational;

/// Shorthand for an integer rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Shorthand for the rational `n / d`. Panics when `d == 0`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

//! Exact-arithmetic engine for Sullivan minimal models of wedges of spheres.
//!
//! The crate builds the bigraded minimal model of a graded vector space with
//! trivial products, adjoins a degree-1 circle factor, constructs the
//! self-equivalence that is homotopic to the identity through every degree yet
//! acts nontrivially on cohomology, and abelianizes the bundled group
//! presentations whose rationalized classifying spaces realize these models.
//!
//! All arithmetic is exact: rationals for the algebra side, arbitrary-precision
//! integers for presentation matrices. Every construction is deterministic, so
//! serialized artifacts are byte-stable across runs.

pub mod algebra;
pub mod bigraded;
pub mod cdga;
pub mod groups;
pub mod json;
pub mod linalg;
pub mod pipeline;
pub mod selfeq;

/// Exact rational scalar used throughout the algebra side of the crate.
pub type Q = num::BigRational;

/// Arbitrary-precision integer used by presentation matrices and Smith forms.
pub type Z = num::BigInt;

/// Shorthand for a rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from(Z::from(n))
}

/// Shorthand for the rational `p/q`; panics if `den` is zero.
pub fn q_ratio(num: i64, den: i64) -> Q {
    Q::new(Z::from(num), Z::from(den))
}

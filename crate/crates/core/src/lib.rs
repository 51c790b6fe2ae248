//! Morse-Bott structure of trace functions on orthogonal groups: critical
//! loci and their block decompositions, Hessian forms and index counting,
//! gradient flows, and the exact mod-2 Betti-number combinatorics tying the
//! critical data to the topology of SO(n) and the Grassmannians.
//!
//! The crate is organized around five subsystems:
//!
//! * [`matrix`]: dense matrix primitives, the standard basis of so(n),
//!   signed permutation matrices, Haar sampling and polar projection.
//! * [`comb`]: perfect fillings of margin tables, index and dimension
//!   formulas, subset degree statistics, Betti numbers and their identities.
//! * [`quadratic`]: the function Tr(A X B X^T) for diagonal A, B built from
//!   eigenvalue spectra, with the full critical-locus construction and
//!   decomposition and the Hessian index theory.
//! * [`linear`]: functions Tr(A^T X), the Grassmannian parametrization of
//!   the trace function's critical locus, and the per-degree index identity.
//! * [`flow`]: gradient-flow integration on O(n) plus the closed-form limit
//!   maps of the corner-entry function and their reflection identity.
//!
//! [`verify`] bundles every documented property into a deterministic
//! desk-scale check suite.

// Entry formulas are written with explicit indices; iterator rewrites
// obscure the block structure they mirror.
#![allow(clippy::needless_range_loop)]

pub mod comb;
pub mod error;
pub mod flow;
pub mod linear;
pub mod matrix;
pub mod polynomial;
pub mod quadratic;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{Matrix, OrthogonalPoint, SignedPermutation, SkewIndex};
pub use polynomial::IntPolynomial;

//! Exact-arithmetic toolkit for computations on free groups and their
//! ascending HNN extensions.
//!
//! The crate is organized around a handful of small algebraic engines:
//!
//! * [`words`] — reduced words over a finite alphabet, free-group algebra,
//!   endomorphisms, and the textual word grammar;
//! * [`polyring`] — multivariate polynomials with arbitrary-precision
//!   integer coefficients, exact rational evaluation, polynomial square
//!   roots, and a monic-quadratic solver;
//! * [`trace`] — trace polynomials of words in two SL2 matrices in the
//!   Fricke coordinates `x = tr(a)`, `y = tr(b)`, `z = tr(ab)`, with an
//!   exact rational-matrix oracle;
//! * [`variety`] — trace varieties of endomorphisms of the rank-two free
//!   group, a triangular solver for the systems they produce, and the
//!   solvable-pair probe;
//! * [`subgroups`] — Stallings foldings with constructive membership;
//! * [`hnn`] — normal forms and the word problem in ascending HNN
//!   extensions, Magnus rewriting of one-relator presentations, and
//!   homomorphism checking;
//! * [`quotients`] — separation of group elements in small finite quotients
//!   (affine and symmetric targets);
//! * [`presentations`] — finite presentations and the text format the
//!   command-line tools consume.

pub mod error;
pub mod hnn;
pub mod polyring;
pub mod presentations;
pub mod quotients;
pub mod subgroups;
pub mod trace;
pub mod variety;
pub mod words;

pub use error::ParseError;
pub use hnn::{HnnNormalForm, HnnPresentation, InnerPowerCheck};
pub use polyring::{Polynomial, Rational, Substitution, VarSet};
pub use presentations::{FinitePresentation, PresentationText};
pub use quotients::{FiniteAssignment, GroupElem, WitnessTarget};
pub use subgroups::SubgroupGraph;
pub use trace::{Mat2, TraceContext};
pub use variety::{Component, SolveOutcome, TraceSystem};
pub use words::{Alphabet, Endomorphism, FreeWord};

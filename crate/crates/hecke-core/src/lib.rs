//! Exact arithmetic for Hecke triangle groups `G_q` and their trace fields.
//!
//! The crate is built around [`field::FieldContext`], which fixes the real
//! field `Q(lambda)` with `lambda = 2cos(pi/q)` and acts as the arithmetic
//! context for everything else:
//!
//! - [`field`]: exact elements of `Q(lambda)` in the power basis, sign
//!   determination under the real embeddings, square roots, subfield tests.
//! - [`group`]: 2x2 determinant-one matrices over the field, Moebius action
//!   on the projective line, spectral classification, exact fixed points.
//! - [`words`]: normal forms in the free product `Z/2 * Z/q`, cyclic
//!   reduction, conjugacy testing, and digit-sequence combinatorics.
//! - [`rosen`]: the lambda-continued fraction algorithm with exact
//!   termination and periodicity detection.
//! - [`traces`]: trace identities, the three-term trace recurrence, and
//!   verification of parametric families of special hyperbolic elements.
//! - [`census`]: batch orbit censuses, heights, and periodic-part searches.
//!
//! Everything here is `no_std + alloc`; IO, parallel drivers, and the CLI
//! live in the companion `hecke-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod census;
pub mod field;
pub mod group;
pub mod interval;
pub mod poly;
pub mod rosen;
pub mod traces;
pub mod words;

pub use field::{FieldContext, FieldElement, SqrtOutcome};
pub use group::{GroupMatrix, ProjPoint, SpectralData};
pub use rosen::{CFExpansion, ExpansionStatus, OrbitKind, OrbitLabel};
pub use words::{DigitSeq, FamilySpec, Word};

// Re-exported so downstream crates use the same bignum versions.
pub use num_bigint;
pub use num_rational;
pub use num_traits;

pub type BigInt = num_bigint::BigInt;
pub type BigRational = num_rational::BigRational;

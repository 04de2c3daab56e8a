//! Exact-arithmetic library for conductors, local types and epsilon-factor
//! variance numbers of symmetric-cube transfers of GL(2) local parameters
//! attached to modular newforms.
//!
//! Everything is computed twice where the theory gives a closed form: once
//! definitionally (brute force over unit groups, exact cyclotomic sums) and
//! once through the closed form, with the definitional value authoritative.

pub mod angle;
pub mod characters;
pub mod conductor;
pub mod cyclotomic;
pub mod epsilon;
pub mod error;
pub mod fields;
pub mod gauss;
pub mod global;
pub mod padic;
pub mod verify;
pub mod wd;

pub use angle::RationalAngle;
pub use cyclotomic::{CyclotomicNumber, FormalScalar, Rat};
pub use error::{Result, Sym3Error};
pub use fields::{FieldKind, LocalFieldSpec, ResidueRing, RingElt};

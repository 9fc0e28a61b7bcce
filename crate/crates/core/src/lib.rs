//! Exact computations with nilpotent algebras: polynomial systems and their
//! Jacobians, polynomial quasigroups, reconstruction of algebra operations,
//! commensurator determinants, groups of polynomial substitutions and
//! partial-order ranks.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::needless_range_loop, clippy::type_complexity)]
extern crate alloc;

pub mod algebra;
pub mod commensurator;
pub mod error;
pub mod field;
pub mod free;
pub mod linalg;
pub mod orders;
pub mod polyfun;
pub mod polymap;
pub mod quasigroup;
pub mod reconstruct;
pub mod sample;
pub mod solver;

pub use algebra::{Algebra, Element, Flags};
pub use error::{Error, Result};
pub use field::{Field, FieldElement};

//! Polynomial-method certificates for sequenceability of subsets of
//! semidirect products `Z_p ⋊ H`.
//!
//! The crate is organised bottom-up: [`groups`] and [`sequencing`] give exact
//! group arithmetic and brute-force oracles, [`poly`] is the polynomial
//! engine, [`certify`] builds and checks certificates for whole subset types
//! and [`weakseq`] does the same for t-weak sequencings.

pub mod arith;
pub mod certify;
pub mod error;
pub mod groups;
pub mod poly;
pub mod sequencing;
pub mod weakseq;

pub use error::{Error, Result};
pub use groups::{FamilyTag, FiniteGroupTable, GroupDescriptor, GroupElement, MultiplierMap, SemidirectGroup};

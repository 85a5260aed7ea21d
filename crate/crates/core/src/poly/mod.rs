//! Polynomials that are products of linear forms.

pub mod form;
pub mod json;
pub mod quadrature;
pub mod ring;
pub mod sparse;

pub use form::{dedupe_proportional, DedupeReport, LinearForm, Monomial};
pub use quadrature::{coefficient_of, QuadratureOptions, QuadratureRing, QuadratureStats};
pub use ring::{eisenstein_norm, CoefficientRing, Eisenstein, EisensteinIntegers, Integers, IntegersMod};
pub use sparse::{expand_truncated, product_naive, truncated_mul, SparsePoly};

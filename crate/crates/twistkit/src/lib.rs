//! Exact computations with Dehn twist factorizations of the boundary multi-twist
//! in mapping class groups of holed tori.

pub mod catalog;
pub mod factorization;
pub mod freegroup;
pub mod invariants;
pub mod moves;
pub mod surface;

pub use factorization::{CurveExpr, Factorization, TwistFactor};
pub use freegroup::{CertifiedAut, MarkedClass, Word};
pub use surface::{Label, TwistTable};

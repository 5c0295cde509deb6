//! The linear (−1)-shifted symplectic category.

mod compositor;
mod factor;
mod relation;
mod space;

pub use compositor::{compositor, Compositor};
pub use factor::{decompose_coisotrope, factor_through, factorize, orthogonal_span, pushout_span, span_cospan, square_commutes, CoisotropeDecomposition, FactorizationCospan};
pub use relation::{compose, compose_graphs, cotangent_lift, matched_pairs, Relation};
pub use space::{ClassFlags, CoisotropicReduction, OddSympSpace, SubspaceClass};

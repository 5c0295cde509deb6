//! Generalized Lagrangians, quantum L∞ algebras and their relations.

mod certificate;
mod genlag;
mod linfty;

pub use certificate::{check_relation, compose_relations, RelationCertificate};
pub use genlag::GeneralizedLagrangian;
pub use linfty::{effective_action, transfer, transfer_hpl, QuantumLInfty, Transfer};

#[cfg(test)]
mod tests;

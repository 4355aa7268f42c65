//! Exact-rational algebraic data of a theory and the verifiers for its axioms.

mod bundle;
mod equipped;
mod graph;

pub use bundle::*;
pub use equipped::{
    casimir, casimir_tensor, describe, twisted_casimir, verify_equipped, EquippedFrobenius,
};
pub use graph::{
    basis_element, check_associativity, composable_sequences, crossing_sides, find_unit,
    least_rotation, product_from_forms, verify_graph_frobenius, Form3, GradedVector,
    GraphFrobeniusData, StarProduct,
};

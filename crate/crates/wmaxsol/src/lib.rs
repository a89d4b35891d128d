//! Weighted maximum-solution problems over finite constraint languages.
//!
//! The library models instances that ask for a constraint-satisfying
//! assignment maximising a weighted sum of variable values. It provides the
//! operation algebra used to recognise tractable languages (polymorphisms,
//! iterates, group cosets, generalised max witnesses), classifiers that map
//! languages to approximability buckets, exact and approximate solvers
//! dispatched by detected structure, and instance transformations.

pub mod algebra;
pub mod classify;
pub mod cli;
pub mod model;
pub mod reduce;
pub mod solve;

//! Finitely describable automorphisms of the free abelian group of countably
//! infinite rank, with exact decision procedures for congruence and Λ-levels,
//! normal generation, and constructions that come with re-checkable certificates.

pub mod arith;
pub mod classify;
pub mod cli;
pub mod construct;
pub mod filters;
pub mod gen;
pub mod io;
pub mod linalg;
pub mod model;
pub mod selftest;

//! Exact cocycle deformation of Hopf *-algebras, relative Hopf modules and
//! covariant differential calculi, with verifiers for the resulting geometry.

pub mod calculus;
pub mod cli;
pub mod cocycle;
pub mod geometry;
pub mod hopf;
pub mod linalg;
pub mod linear;
pub mod models;
pub mod relhopf;
pub mod report;
pub mod scalars;

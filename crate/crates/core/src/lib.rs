//! Transversal switching between stabilizer codes by randomized stabilizer
//! rewiring, with explicit distance verification of every intermediate code.

pub mod analysis;
pub mod catalog;
pub mod circuit;
pub mod cli;
pub mod f2;
pub mod fixtures;
pub mod pauli;
pub mod rsra;
pub mod sim;

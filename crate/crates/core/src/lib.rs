//! Symbolic and numeric toolkit for the quantum Toda lattice and the mirror
//! phase functions of complete flag manifolds.

pub mod algebra;
pub mod toda;
pub mod mirror;
pub mod critical;
pub mod oscillatory;
pub mod semiclassical;
pub mod virasoro;
pub mod harness;

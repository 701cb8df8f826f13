//! Mirror model of the complete flag manifold: triangular graph, relations,
//! equivariant weights, phase function and σ-charts.

pub mod chart;
pub mod graph;

use thiserror::Error;

use crate::algebra::AlgebraError;

pub use chart::{all_charts, all_k_sequences, make_chart, ChartReport, SigmaChart};
pub use graph::{assign_weights, build_graph, build_phase, Edge, EdgeKind, MirrorGraph, PhaseExpression};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MirrorError {
    #[error("graph size must be at least 1, got {0}")]
    InvalidSize(usize),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("ρ differences in row {i} of chart {k:?} are not a permutation of the expected λ's")]
    Multiset { i: usize, k: Vec<usize> },
    #[error("relation system is singular for chart {0:?}")]
    Singular(Vec<usize>),
    #[error("eliminated edges of chart {0:?} are not integral monomials")]
    NonIntegral(Vec<usize>),
    #[error("chart {0:?} has Jacobian determinant {1}, expected ±1")]
    Jacobian(Vec<usize>, String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

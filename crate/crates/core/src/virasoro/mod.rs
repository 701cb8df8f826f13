//! The symplectic loop space H((ħ)), quantization of infinitesimally
//! symplectic operators, the point Virasoro operators and the (μ, ρ) family.
//!
//! Basis vectors are φ_α ħ^k, written `(k, α)` with α zero-based. In the
//! Darboux coordinates the ħ^m coefficient (m ≥ 0) is q_m^α and the
//! ħ^{-1-m} coefficient is (-1)^{m+1} p_m^α.

pub mod loops;
pub mod operator;
pub mod quantize;

use thiserror::Error;

pub use loops::{
    family_action, omega, DMap, FamilyMap, HbarPower, LoopMap, LoopPairing, LoopVector, SymplecticLoopElement,
    ZeroMap,
};
pub use operator::{FockIndex, QuadraticOperator, WeylElement};
pub use quantize::{
    commutation_check, family_commutation_check, family_virasoro, forced_scalar, monomial_basis, point_virasoro,
    quantize, PointSource, string_operator, unquantized_bracket_check, BracketReport, CommutationReport, ResidualClass,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VirasoroError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("operator is not infinitesimally symplectic: Ω(Te,e') + Ω(e,Te') = {value} for e = ħ^{}φ_{}, e' = ħ^{}φ_{}", .first.0, .first.1, .second.0, .second.1)]
    NotSymplectic {
        first: (i32, usize),
        second: (i32, usize),
        value: String,
    },
}

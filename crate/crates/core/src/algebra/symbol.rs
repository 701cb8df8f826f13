//! Global symbol set shared by every polynomial in the crate.
//!
//! Symbols are structured rather than free-form strings so that the ordering
//! of exponent vectors is the same in every module and every run: the derived
//! `Ord` on [`Symbol`] is the variable order used by the graded-lexicographic
//! term order.

use std::fmt;
use std::sync::{Mutex, OnceLock};

/// A named indeterminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// The loop parameter ħ.
    Hbar,
    /// The genus-counting parameter ε of the Fock space.
    Epsilon,
    /// Spectral variable of characteristic polynomials.
    X,
    /// Equivariant parameter λ_i.
    Lambda(u16),
    /// q_i = e^{t_i - t_{i-1}}.
    Q(u16),
    /// Commuting momentum p_i of the classical Toda matrix.
    P(u16),
    /// Vertical edge variable u_{i,j}.
    U(u16, u16),
    /// Horizontal edge variable v_{i,j}.
    V(u16, u16),
    /// Exponentiated vertex coordinate e^{T_{i,j}}.
    Vertex(u16, u16),
    /// Stand-in for the torus weight λ_a - λ_b with a > b; only ever used
    /// with integer (typically negative) exponents.
    Weight(u16, u16),
    /// Fock-space coordinate q_m^α.
    Fock(u16, u16),
    /// Free symbol registered by name, see [`Symbol::named`].
    Named(u32),
}

fn registry() -> &'static Mutex<Vec<String>> {
    static NAMES: OnceLock<Mutex<Vec<String>>> = OnceLock::new();
    NAMES.get_or_init(|| Mutex::new(Vec::new()))
}

impl Symbol {
    /// Interns `name` and returns the corresponding free symbol. Interning the
    /// same name twice yields the same symbol.
    pub fn named(name: &str) -> Symbol {
        let mut names = registry().lock().expect("symbol registry poisoned");
        if let Some(pos) = names.iter().position(|s| s == name) {
            return Symbol::Named(pos as u32);
        }
        names.push(name.to_string());
        Symbol::Named((names.len() - 1) as u32)
    }

    pub fn lambda(i: usize) -> Symbol {
        Symbol::Lambda(i as u16)
    }

    pub fn q(i: usize) -> Symbol {
        Symbol::Q(i as u16)
    }

    pub fn p(i: usize) -> Symbol {
        Symbol::P(i as u16)
    }

    pub fn u(i: usize, j: usize) -> Symbol {
        Symbol::U(i as u16, j as u16)
    }

    pub fn v(i: usize, j: usize) -> Symbol {
        Symbol::V(i as u16, j as u16)
    }

    pub fn vertex(i: usize, j: usize) -> Symbol {
        Symbol::Vertex(i as u16, j as u16)
    }

    pub fn fock(m: usize, alpha: usize) -> Symbol {
        Symbol::Fock(m as u16, alpha as u16)
    }

    /// The symbol for λ_a - λ_b together with the sign needed to express it
    /// in the canonical orientation (larger index first).
    pub fn weight(a: usize, b: usize) -> (Symbol, i32) {
        assert_ne!(a, b, "a torus weight needs two distinct indices");
        if a > b {
            (Symbol::Weight(a as u16, b as u16), 1)
        } else {
            (Symbol::Weight(b as u16, a as u16), -1)
        }
    }

    /// Degree in the λ-grading: λ_i and the weight symbols carry degree 1.
    pub fn lambda_degree(&self) -> i32 {
        match self {
            Symbol::Lambda(_) | Symbol::Weight(_, _) => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Hbar => write!(f, "hbar"),
            Symbol::Epsilon => write!(f, "eps"),
            Symbol::X => write!(f, "x"),
            Symbol::Lambda(i) => write!(f, "lambda{i}"),
            Symbol::Q(i) => write!(f, "q{i}"),
            Symbol::P(i) => write!(f, "p{i}"),
            Symbol::U(i, j) => write!(f, "u{i}_{j}"),
            Symbol::V(i, j) => write!(f, "v{i}_{j}"),
            Symbol::Vertex(i, j) => write!(f, "T{i}_{j}"),
            Symbol::Weight(a, b) => write!(f, "chi{a}_{b}"),
            Symbol::Fock(m, a) => write!(f, "Q{m}_{a}"),
            Symbol::Named(id) => {
                let names = registry().lock().expect("symbol registry poisoned");
                write!(f, "{}", names[*id as usize])
            }
        }
    }
}

//! Coefficient rings for the whole crate.
//!
//! Everything here is a finitely generated local ring with residue field
//! `k = F_{p^m}`, stored in an exact polynomial normal form:
//!
//! * `W_N(k)`: coefficients mod `p^N` in `(Z/p^N)[u]/(f)` for a fixed monic
//!   irreducible `f` of degree `m`, with the Frobenius lift computed once by
//!   Newton iteration;
//! * Artin local quotients `W_N(k)[t_1..t_r]` cut out by monomial relations,
//!   with a standard-monomial basis;
//! * Eisenstein extensions `W_N(k)[pi]/(pi^h - p*u)`, optionally truncated by
//!   `pi^q = 0`, which induces a per-monomial p-power cap on coefficients.
//!
//! Elements carry a precision counter `prec`: the element is known modulo
//! `p^prec` (slot-wise, further clipped by the structural caps). Addition and
//! multiplication take the minimum, exact division by `p` costs one, and
//! multiplication by `p` or raising to the `p`-th power gains one.

mod ring;
mod matrix;

pub use matrix::{residue_rank, solve_general, solve_linear, Mat, Scalar};
pub use ring::{ArtinPart, EisUnit, LocalRing, RingEl};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RingError {
    #[error("element is not a unit")]
    NotAUnit,
    #[error("ring is not local: {0}")]
    NotLocal(String),
    #[error("inexact division by p^{0}")]
    InexactDivision(u32),
    #[error("p-division is not precision-safe on a ring with truncation caps")]
    CappedDivision,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("operation requires an unramified ring: {0}")]
    NeedUnramified(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

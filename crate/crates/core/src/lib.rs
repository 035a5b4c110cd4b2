//! Exact arithmetic for p-adic frame/display calculus.
//!
//! The crate is organized bottom-up:
//!
//! * [`padic`] — coefficient rings: `W_N(k)` for `k = F_{p^m}` in a polynomial
//!   model, Artin local quotients with monomial relations, Eisenstein
//!   extensions `W(k)[pi]/(pi^h - p u)`, plus generic matrices and linear
//!   solving over these rings.
//! * [`witt`] — truncated Witt vectors over the above rings, computed through
//!   p-torsion-free covers with per-value precision tracking, and the small
//!   Witt ring `Ŵ(R) = W(k) ⊞ Ŵ(m_R)` of an Artin local ring.
//! * [`frames`] — frames in the sense of a graded ring `(S_n)` with divided
//!   Frobenii; the tautological frame and the small Witt frame, behind a
//!   common trait with a name-based registry.
//! * [`displays`] — displays (graded windows) over a frame: normal
//!   decompositions, duals, twists, tensor products, base change, morphism
//!   and exactness checks, pairings, strong divisibility.
//! * [`dieudonne`] — Dieudonne modules over `W(k)`, Newton slopes via
//!   division-free characteristic polynomials, and the rank-22 weight-2
//!   lattice with its slope decomposition.
//! * [`lifting`] — the lifting pipeline: lift a formal group together with
//!   its Frobenius endomorphism over Artin rings `V/pi^(n+1)`, assemble the
//!   rank-22 display, and emit a re-verifiable certificate.
//! * [`jsonio`] — canonical JSON encoding shared by certificates and the CLI.

pub mod padic;
pub mod witt;
pub mod frames;
pub mod displays;
pub mod dieudonne;
pub mod lifting;
pub mod jsonio;

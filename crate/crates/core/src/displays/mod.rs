//! Displays: finite free graded modules with a semilinear Frobenius whose
//! linearization is invertible, presented by a normal decomposition.
//!
//! A display over a frame is stored as a degree label per basis vector
//! (ascending) plus the structure matrix `phi`. The Frobenius it encodes is
//! `F(e_j) = p^(d_j) * (column j of phi)` extended `sigma_0`-semilinearly;
//! `phi` itself stays invertible, so negative degrees (duals) need no
//! division — evaluation of `F` is simply postponed until the display is
//! twisted back into effective range.
//!
//! The operation algebra (sum, twist, tensor, dual, base change) works on
//! structure matrices and keeps the basis sorted by degree; sorting is a
//! permutation conjugation and therefore exact.

mod filtered;
mod morphism;
mod pairing;
mod quadruple;

pub use filtered::{strong_divisibility_check, FilteredFModule, SdReport};
pub use morphism::{check_exact, check_morphism, eval_pairing_hom, DisplayHom, ExactReport, MorphReport};
pub use pairing::{check_pairing, PairingReport};
pub use quadruple::{from_quadruple, to_quadruple, QElement, Quadruple};

use crate::frames::{Frame, FrameEl, FrameMorphism};
use crate::padic::{Mat, RingError};
use rand::RngCore;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DisplayError {
    #[error("structure matrix is not invertible")]
    NotInvertible,
    #[error("displays live over different frames")]
    FrameMismatch,
    #[error("operation needs degrees within {{0,1}}")]
    WrongDegreeRange,
    #[error("display is not effective")]
    NotEffective,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone)]
pub struct Display {
    pub frame: Rc<dyn Frame>,
    /// Degree of each basis vector, ascending.
    pub degs: Vec<i64>,
    pub phi: Mat<FrameEl>,
}

impl std::fmt::Debug for Display {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Display(degs={:?} over {})", self.degs, self.frame.name())
    }
}

/// Stable argsort: position i of the result holds the old index of the
/// i-th smallest degree.
pub(crate) fn sort_perm(degs: &[i64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..degs.len()).collect();
    idx.sort_by_key(|&i| degs[i]);
    idx
}

fn apply_perm(degs: &[i64], phi: &Mat<FrameEl>, perm: &[usize]) -> (Vec<i64>, Mat<FrameEl>) {
    let nd: Vec<i64> = perm.iter().map(|&i| degs[i]).collect();
    let np = Mat::from_fn(phi.rows, phi.cols, |i, j| phi.at(perm[i], perm[j]).clone());
    (nd, np)
}

/// Builds and validates a display. The basis is re-sorted by degree if
/// needed (an exact permutation conjugation).
pub fn make_display(
    frame: Rc<dyn Frame>,
    degs: Vec<i64>,
    phi: Mat<FrameEl>,
) -> Result<Display, DisplayError> {
    let n = degs.len();
    if phi.rows != n || phi.cols != n {
        return Err(DisplayError::Shape(format!(
            "{} degrees vs {}x{} matrix",
            n, phi.rows, phi.cols
        )));
    }
    let (degs, phi) = if degs.windows(2).all(|w| w[0] <= w[1]) {
        (degs, phi)
    } else {
        let perm = sort_perm(&degs);
        apply_perm(&degs, &phi, &perm)
    };
    if n > 0 && !phi.is_invertible(frame.as_ref()) {
        return Err(DisplayError::NotInvertible);
    }
    Ok(Display { frame, degs, phi })
}

impl Display {
    pub fn rank(&self) -> usize {
        self.degs.len()
    }

    pub fn degree_range(&self) -> (i64, i64) {
        if self.degs.is_empty() {
            (0, 0)
        } else {
            (self.degs[0], *self.degs.last().unwrap())
        }
    }

    pub fn is_effective(&self) -> bool {
        self.degs.first().map_or(true, |&d| d >= 0)
    }

    /// `(degree, rank)` pairs in ascending degree order.
    pub fn ranks_by_degree(&self) -> Vec<(i64, usize)> {
        let mut out: Vec<(i64, usize)> = Vec::new();
        for &d in &self.degs {
            match out.last_mut() {
                Some((dd, r)) if *dd == d => *r += 1,
                _ => out.push((d, 1)),
            }
        }
        out
    }

    /// Ranks of the graded pieces of the mod-`t` reduction; degree labels
    /// included. Requires effectivity.
    pub fn reduction_profile(&self) -> Result<Vec<(i64, usize)>, DisplayError> {
        if !self.is_effective() {
            return Err(DisplayError::NotEffective);
        }
        Ok(self.ranks_by_degree())
    }

    pub fn same_frame(&self, other: &Display) -> bool {
        self.frame.spec() == other.frame.spec()
    }

    pub fn eq_display(&self, other: &Display) -> bool {
        self.same_frame(other)
            && self.degs == other.degs
            && self.phi.eq(self.frame.as_ref(), &other.phi)
    }

    pub fn direct_sum(&self, other: &Display) -> Result<Display, DisplayError> {
        Ok(self.direct_sum_maps(other)?.0)
    }

    /// Direct sum plus the four canonical block maps
    /// `(sum, inj1, inj2, proj1, proj2)`.
    pub fn direct_sum_maps(
        &self,
        other: &Display,
    ) -> Result<(Display, DisplayHom, DisplayHom, DisplayHom, DisplayHom), DisplayError> {
        if !self.same_frame(other) {
            return Err(DisplayError::FrameMismatch);
        }
        let fr = self.frame.as_ref();
        let n1 = self.rank();
        let n = n1 + other.rank();
        let mut degs: Vec<i64> = self.degs.clone();
        degs.extend_from_slice(&other.degs);
        let phi = self.phi.block_diag(fr, &other.phi);
        let perm = sort_perm(&degs);
        let (degs, phi) = apply_perm(&degs, &phi, &perm);
        let sum = Display {
            frame: self.frame.clone(),
            degs,
            phi,
        };
        // perm[i'] = old index; old < n1 belongs to the left summand
        let ind = |cond: &dyn Fn(usize, usize) -> bool, rows: usize, cols: usize| {
            Mat::from_fn(rows, cols, |i, j| {
                if cond(i, j) {
                    fr.one()
                } else {
                    fr.zero()
                }
            })
        };
        let inj1 = ind(&|i, j| perm[i] == j, n, n1);
        let inj2 = ind(&|i, j| perm[i] == n1 + j, n, n - n1);
        let proj1 = ind(&|i, j| perm[j] == i, n1, n);
        let proj2 = ind(&|i, j| perm[j] == n1 + i, n - n1, n);
        let hom = |mat: Mat<FrameEl>, src: &Display, dst: &Display| {
            DisplayHom::from_plain(mat, src, dst)
        };
        Ok((
            sum.clone(),
            hom(inj1, self, &sum),
            hom(inj2, other, &sum),
            hom(proj1, &sum, self),
            hom(proj2, &sum, other),
        ))
    }

    /// Tensor with the rank-one display of weight `n` (which sits in
    /// degree `-n`): shifts all degrees down by `n`.
    pub fn twist(&self, n: i64) -> Display {
        Display {
            frame: self.frame.clone(),
            degs: self.degs.iter().map(|d| d - n).collect(),
            phi: self.phi.clone(),
        }
    }

    pub fn tensor(&self, other: &Display) -> Result<Display, DisplayError> {
        Ok(self.tensor_with_perm(other)?.0)
    }

    /// Tensor product; also returns the permutation new index -> Kronecker
    /// index `i * rank(other) + j`.
    pub(crate) fn tensor_with_perm(
        &self,
        other: &Display,
    ) -> Result<(Display, Vec<usize>), DisplayError> {
        if !self.same_frame(other) {
            return Err(DisplayError::FrameMismatch);
        }
        let n2 = other.rank();
        let mut degs: Vec<i64> = Vec::with_capacity(self.rank() * n2);
        for &d1 in &self.degs {
            for &d2 in &other.degs {
                degs.push(d1 + d2);
            }
        }
        let phi = self.phi.kronecker(self.frame.as_ref(), &other.phi);
        let perm = sort_perm(&degs);
        let (degs, phi) = apply_perm(&degs, &phi, &perm);
        Ok((
            Display {
                frame: self.frame.clone(),
                degs,
                phi,
            },
            perm,
        ))
    }

    pub fn dual(&self) -> Result<Display, DisplayError> {
        Ok(self.dual_with_perm()?.0)
    }

    /// Dual display; also returns the permutation new index -> original
    /// index (which basis vector each dual vector pairs against).
    pub(crate) fn dual_with_perm(&self) -> Result<(Display, Vec<usize>), DisplayError> {
        let fr = self.frame.as_ref();
        let phi_star = self.phi.transpose().invert(fr).map_err(|e| match e {
            RingError::NotAUnit => DisplayError::NotInvertible,
            other => DisplayError::Ring(other),
        })?;
        let degs: Vec<i64> = self.degs.iter().map(|d| -d).collect();
        let perm = sort_perm(&degs);
        let (degs, phi) = apply_perm(&degs, &phi_star, &perm);
        Ok((
            Display {
                frame: self.frame.clone(),
                degs,
                phi,
            },
            perm,
        ))
    }

    /// Pushes every structure entry through a map into another frame.
    pub fn map_entries(
        &self,
        dst: Rc<dyn Frame>,
        f: impl Fn(&FrameEl) -> Result<FrameEl, RingError>,
    ) -> Result<Display, DisplayError> {
        let phi = self.phi.try_map(|x| f(x))?;
        if self.rank() > 0 && !phi.is_invertible(dst.as_ref()) {
            return Err(DisplayError::NotInvertible);
        }
        Ok(Display {
            frame: dst,
            degs: self.degs.clone(),
            phi,
        })
    }

    pub fn base_change(&self, f: &FrameMorphism) -> Result<Display, DisplayError> {
        if self.frame.spec() != f.src.spec() {
            return Err(DisplayError::FrameMismatch);
        }
        self.map_entries(f.dst.clone(), |x| f.apply(x))
    }
}

/// The unit display: rank one in degree 0, structure map the identity.
pub fn unit_display(frame: Rc<dyn Frame>) -> Display {
    let one = frame.one();
    Display {
        frame,
        degs: vec![0],
        phi: Mat {
            rows: 1,
            cols: 1,
            d: vec![one],
        },
    }
}

/// The weight-`n` twisting display (rank one, degree `-n`).
pub fn weight_display(frame: Rc<dyn Frame>, n: i64) -> Display {
    unit_display(frame).twist(n)
}

/// Random display with invertible structure matrix: a unit lower- times
/// upper-triangular product, so invertibility holds by construction.
pub fn random_display(
    frame: Rc<dyn Frame>,
    degs: Vec<i64>,
    rng: &mut dyn RngCore,
) -> Display {
    let fr = frame.as_ref();
    let n = degs.len();
    let lower = Mat::from_fn(n, n, |i, j| {
        if i == j {
            fr.one()
        } else if i > j {
            fr.random_el(rng)
        } else {
            fr.zero()
        }
    });
    let upper = Mat::from_fn(n, n, |i, j| {
        if i == j {
            fr.random_unit(rng)
        } else if i < j {
            fr.random_el(rng)
        } else {
            fr.zero()
        }
    });
    let phi = lower.mul(fr, &upper);
    make_display(frame.clone(), degs, phi).expect("triangular product is invertible")
}

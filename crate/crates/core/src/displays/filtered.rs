//! Filtered modules with a semilinear operator, and the strong
//! divisibility check that turns one into a display.
//!
//! Over a torsion-free base (modeled by an uncapped ring with Frobenius
//! lift), a free module `M` with `sigma`-semilinear `F` and a filtration
//! by direct summands `M = F^0 supset F^1 supset ... supset F^d` is
//! strongly divisible when `F(F^i) subset p^i M` for every `i` and the
//! divided images together generate `M`. The check performs the exact
//! divisions, and on success produces the equivalent display: a
//! filtration-adapted basis plus the structure matrix of the divided
//! operator.

use super::{make_display, Display, DisplayError};
use crate::frames::{Frame, FrameEl, TautologicalFrame};
use crate::padic::{residue_rank, solve_general, LocalRing, Mat, RingEl, RingError};
use std::rc::Rc;

#[derive(Clone, Debug)]
pub struct FilteredFModule {
    pub ring: LocalRing,
    /// Matrix of `F` in the standard basis: `F(e_j)` is column `j`,
    /// extended `sigma`-semilinearly.
    pub fmat: Mat<RingEl>,
    /// Span matrices of `F^1, F^2, ..., F^d`; `F^0 = M` is implicit.
    pub steps: Vec<Mat<RingEl>>,
}

impl FilteredFModule {
    pub fn new(
        ring: &LocalRing,
        fmat: Mat<RingEl>,
        steps: Vec<Mat<RingEl>>,
    ) -> Result<Self, DisplayError> {
        if ring.is_capped() {
            return Err(DisplayError::Ring(RingError::NeedUnramified(
                "strong divisibility needs honest division by p".into(),
            )));
        }
        let n = fmat.rows;
        if fmat.cols != n {
            return Err(DisplayError::Shape("F matrix must be square".into()));
        }
        let mut prev_cols = n;
        for (i, s) in steps.iter().enumerate() {
            if s.rows != n {
                return Err(DisplayError::Shape(format!("step {} row count", i + 1)));
            }
            if s.cols > prev_cols {
                return Err(DisplayError::Shape(format!(
                    "step {} is larger than the previous one",
                    i + 1
                )));
            }
            if residue_rank(ring, s) != s.cols {
                return Err(DisplayError::Shape(format!(
                    "step {} is not a direct summand",
                    i + 1
                )));
            }
            prev_cols = s.cols;
        }
        // nesting: each step must solve in terms of the previous one
        for w in steps.windows(2) {
            if solve_general(ring, &w[0], &w[1]).is_err() {
                return Err(DisplayError::Shape("filtration steps are not nested".into()));
            }
        }
        Ok(FilteredFModule {
            ring: ring.clone(),
            fmat,
            steps,
        })
    }

    pub fn rank(&self) -> usize {
        self.fmat.rows
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

#[derive(Clone, Debug)]
pub struct SdReport {
    /// One flag per filtration level `1..=d`: did `F(F^i)` divide by
    /// `p^i` exactly?
    pub divisible: Vec<bool>,
    pub generation: bool,
    pub notes: Vec<String>,
    /// On full success: the equivalent display and the adapted basis
    /// (columns, in the display's degree order) expressing it in the
    /// standard basis.
    pub display: Option<Display>,
    pub basis: Option<Mat<RingEl>>,
}

impl SdReport {
    pub fn pass(&self) -> bool {
        self.divisible.iter().all(|&b| b) && self.generation
    }
}

/// Incremental residue-span tracker over `k`.
struct KSpan {
    rows: Vec<Vec<Vec<u64>>>,
}

impl KSpan {
    fn new() -> Self {
        KSpan { rows: vec![] }
    }

    /// Row-reduces `v` against the span; if independent, absorbs it and
    /// returns true.
    fn absorb(&mut self, kr: &LocalRing, mut v: Vec<Vec<u64>>) -> bool {
        for row in &self.rows {
            let lead = row.iter().position(|x| !kr.k_is_zero(x)).unwrap();
            if !kr.k_is_zero(&v[lead]) {
                let f = v[lead].clone();
                for (a, b) in v.iter_mut().zip(row) {
                    let t = kr.k_mul(&f, b);
                    *a = kr.k_sub(a, &t);
                }
            }
        }
        let Some(lead) = v.iter().position(|x| !kr.k_is_zero(x)) else {
            return false;
        };
        let inv = kr.k_inv(&v[lead]).expect("nonzero lead");
        for a in v.iter_mut() {
            *a = kr.k_mul(a, &inv);
        }
        self.rows.push(v);
        true
    }
}

/// Runs the strong divisibility check and, when it passes, returns the
/// equivalent display over the supplied tautological frame of the same
/// base ring.
pub fn strong_divisibility_check(
    fm: &FilteredFModule,
    frame: Rc<dyn Frame>,
) -> Result<SdReport, DisplayError> {
    let taut = frame
        .as_any()
        .downcast_ref::<TautologicalFrame>()
        .ok_or_else(|| DisplayError::Shape("need a tautological frame".into()))?;
    if taut.ring != fm.ring {
        return Err(DisplayError::FrameMismatch);
    }
    let ring = &fm.ring;
    let n = fm.rank();
    let d = fm.depth();
    let mut notes = Vec::new();

    // filtration-adapted basis, built from the deepest step outward
    let mut span = KSpan::new();
    let mut chosen: Vec<(i64, Vec<RingEl>)> = Vec::new();
    for level in (0..=d).rev() {
        let step;
        let cols: &Mat<RingEl> = if level == 0 {
            step = Mat::identity(ring, n);
            &step
        } else {
            &fm.steps[level - 1]
        };
        for j in 0..cols.cols {
            let col: Vec<RingEl> = (0..n).map(|i| cols.at(i, j).clone()).collect();
            let kvec: Vec<Vec<u64>> = col.iter().map(|x| ring.residue(x)).collect();
            if span.absorb(ring, kvec) {
                chosen.push((level as i64, col));
            }
        }
    }
    if chosen.len() != n {
        return Err(DisplayError::Shape(
            "filtration does not span the module".into(),
        ));
    }
    chosen.sort_by_key(|(deg, _)| *deg);
    let degs: Vec<i64> = chosen.iter().map(|(deg, _)| *deg).collect();
    let basis = Mat::from_fn(n, n, |i, j| chosen[j].1[i].clone());
    let basis_inv = basis.invert(ring).expect("adapted basis is invertible");

    // divide F on each block by the block's p-power
    let mut divisible = vec![true; d];
    let mut phi_cols: Vec<Option<Vec<RingEl>>> = Vec::with_capacity(n);
    for (deg, col) in &chosen {
        let sig = Mat::from_fn(n, 1, |i, _| ring.sigma(&col[i]).expect("sigma"));
        let img = fm.fmat.mul(ring, &sig);
        let mut divided: Option<Vec<RingEl>> = Some(Vec::with_capacity(n));
        if *deg > 0 {
            let mut ok = Vec::with_capacity(n);
            for i in 0..n {
                match ring.divide_p(img.at(i, 0), *deg as u32) {
                    Ok(v) => ok.push(v),
                    Err(e) => {
                        divisible[(*deg - 1) as usize] = false;
                        notes.push(format!("level {deg}: {e}"));
                        divided = None;
                        break;
                    }
                }
            }
            if divided.is_some() {
                divided = Some(ok);
            }
        } else {
            divided = Some((0..n).map(|i| img.at(i, 0).clone()).collect());
        }
        phi_cols.push(divided);
    }

    if divisible.iter().any(|&b| !b) {
        return Ok(SdReport {
            divisible,
            generation: false,
            notes,
            display: None,
            basis: None,
        });
    }

    let raw = Mat::from_fn(n, n, |i, j| phi_cols[j].as_ref().unwrap()[i].clone());
    let phi = basis_inv.mul(ring, &raw);
    let generation = residue_rank(ring, &phi) == n;
    if !generation {
        notes.push("divided images do not generate".into());
        return Ok(SdReport {
            divisible,
            generation,
            notes,
            display: None,
            basis: None,
        });
    }
    let phi_f = Mat::from_fn(n, n, |i, j| FrameEl::Ring(phi.at(i, j).clone()));
    let display = make_display(frame.clone(), degs, phi_f)?;
    Ok(SdReport {
        divisible,
        generation,
        notes,
        display: Some(display),
        basis: Some(basis),
    })
}

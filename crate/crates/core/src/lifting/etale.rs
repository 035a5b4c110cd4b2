//! Lifts of unit-exponent blocks and the rigidity probe.
//!
//! A block whose exponents are all zero lifts along an integer unit matrix
//! with nothing to solve: the section of the base projection is
//! multiplicative, so the integer equivariance downstairs transports
//! verbatim.  Such lifts are also rigid: any second lift agreeing modulo the
//! square-zero part is conjugate to the first, and the conjugating
//! intertwiner is the limit of a finite fixed-point iteration (each twist
//! application pushes the discrepancy one digit deeper).  The probe checks
//! this rigidity on a seeded random perturbation.

use super::LiftError;
use crate::displays::{make_display, Display};
use crate::frames::{Frame, FrameEl, SmallWittFrame};
use crate::padic::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::rc::Rc;

/// Lift an integral invertible matrix as a display whose exponents all
/// vanish.
pub fn lift_etale(frame: &Rc<dyn Frame>, u: &[Vec<i64>]) -> Result<Display, LiftError> {
    let r = u.len();
    if r == 0 {
        return Err(LiftError::BadProblem("unit-exponent block must have positive rank".into()));
    }
    if u.iter().any(|row| row.len() != r) {
        return Err(LiftError::BadProblem("unit-exponent block matrix must be square".into()));
    }
    let phi = Mat::from_fn(r, r, |i, j| frame.from_int(u[i][j]));
    Ok(make_display(frame.clone(), vec![0; r], phi)?)
}

/// Outcome of the rigidity probe.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub attempted: bool,
    pub converged: bool,
    pub iterations: u32,
    pub intertwines: bool,
    pub unipotent: bool,
}

impl ProbeReport {
    pub fn pass(&self) -> bool {
        self.attempted && self.converged && self.intertwines && self.unipotent
    }
}

/// Perturb the structure matrix of a unit-exponent display inside the
/// square-zero part and solve for the intertwiner by iteration.  Only
/// meaningful over a split-Witt frame; elsewhere the probe reports
/// `attempted: false`.
pub fn uniqueness_probe(
    frame: &Rc<dyn Frame>,
    d: &Display,
    seed: u64,
) -> Result<ProbeReport, LiftError> {
    let skipped = ProbeReport {
        attempted: false,
        converged: false,
        iterations: 0,
        intertwines: false,
        unipotent: false,
    };
    let Some(sf) = frame.as_any().downcast_ref::<SmallWittFrame>() else {
        return Ok(skipped);
    };
    if d.degs.iter().any(|&g| g != 0) {
        return Err(LiftError::Internal("rigidity probe needs a unit-exponent display".into()));
    }
    let cx = &sf.cx;
    let fr = frame.as_ref();
    let n = d.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut perturbed = d.phi.clone();
    for i in 0..n {
        for j in 0..n {
            let mut noise = cx.zero();
            for digit in noise.eta.iter_mut() {
                *digit = cx.ring.random_topnil(&mut rng);
            }
            let e = fr.add(perturbed.at(i, j), &FrameEl::SmallWitt(noise))?;
            perturbed.set(i, j, e);
        }
    }

    let phi_inv = d.phi.invert(fr)?;
    let twist = |x: &Mat<FrameEl>| x.try_map(|e| fr.sigma0(e));
    let budget = cx.eta_len as u32;
    let mut x = Mat::identity(fr, n);
    let mut converged = false;
    let mut iterations = budget;
    for it in 0..budget {
        let xn = perturbed.mul(fr, &twist(&x)?).mul(fr, &phi_inv);
        if xn.eq(fr, &x) {
            converged = true;
            iterations = it;
            break;
        }
        x = xn;
    }
    let lhs = x.mul(fr, &d.phi);
    let rhs = perturbed.mul(fr, &twist(&x)?);
    let intertwines = lhs.eq(fr, &rhs);
    let delta = x.sub(fr, &Mat::identity(fr, n));
    let unipotent = (0..n).all(|i| {
        (0..n).all(|j| match delta.at(i, j) {
            FrameEl::SmallWitt(s) => cx.wk.is_zero(&s.w),
            FrameEl::Ring(_) => false,
        })
    });
    Ok(ProbeReport { attempted: true, converged, iterations, intertwines, unipotent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{build_frame, FrameSpec, RingSpec};

    fn sw_frame(p: u64, m: usize, h: u32, quot: u32, prec: u32, eta_len: usize) -> Rc<dyn Frame> {
        build_frame(&FrameSpec {
            kind: "smallwitt".into(),
            p,
            m,
            prec,
            eta_len,
            ring: RingSpec::Eisenstein { h, teich_unit: false, quot: Some(quot) },
        })
        .unwrap()
    }

    #[test]
    fn identity_block_lifts_and_probe_passes() {
        let fr = sw_frame(3, 1, 2, 3, 4, 5);
        let u: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| i64::from(i == j)).collect()).collect();
        let d = lift_etale(&fr, &u).unwrap();
        assert!(d.is_effective());
        let rep = uniqueness_probe(&fr, &d, 17).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert!(rep.iterations <= 5);
    }

    #[test]
    fn nontrivial_unit_matrix_probe() {
        let fr = sw_frame(3, 2, 2, 2, 4, 5);
        let u = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        // det = 2, a unit at p = 3
        let d = lift_etale(&fr, &u).unwrap();
        let rep = uniqueness_probe(&fr, &d, 99).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let fr = sw_frame(3, 1, 1, 2, 4, 4);
        let u = vec![vec![1, 1], vec![1, 1]];
        assert!(lift_etale(&fr, &u).is_err());
    }
}

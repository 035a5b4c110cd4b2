//! Structure-preserving maps between frames.
//!
//! Three kinds cover everything the deformation pipeline needs:
//!
//! * `Reduction`: Witt frame to Witt frame along a quotient of base rings
//!   of the same shape (deformation ring one step down the tower). Acts
//!   digit-wise; commutes with Frobenius by functoriality.
//! * `ToBase`: Witt frame onto the tautological frame of the residue-field
//!   model; the digit half dies (its digits sit in the maximal ideal) and
//!   the section half survives.
//! * `Section`: tautological frame into a Witt frame along the canonical
//!   multiplicative section; exact, and the chosen representative of each
//!   entry is promoted to an exact element of `W(k)`.

use super::{Frame, FrameEl, SmallWittFrame, TautologicalFrame, Witness};
use crate::padic::RingError;
use crate::witt::small::SwEl;
use std::rc::Rc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphismKind {
    Reduction,
    ToBase,
    Section,
}

#[derive(Clone)]
pub struct FrameMorphism {
    pub kind: MorphismKind,
    pub src: Rc<dyn Frame>,
    pub dst: Rc<dyn Frame>,
}

impl std::fmt::Debug for FrameMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:?}: {} -> {}",
            self.kind,
            self.src.name(),
            self.dst.name()
        )
    }
}

fn as_sw_frame(f: &dyn Frame) -> Result<&SmallWittFrame, RingError> {
    f.as_any()
        .downcast_ref::<SmallWittFrame>()
        .ok_or_else(|| RingError::Shape("expected a Witt frame".into()))
}

fn as_taut_frame(f: &dyn Frame) -> Result<&TautologicalFrame, RingError> {
    f.as_any()
        .downcast_ref::<TautologicalFrame>()
        .ok_or_else(|| RingError::Shape("expected a tautological frame".into()))
}

impl FrameMorphism {
    pub fn reduction(src: Rc<dyn Frame>, dst: Rc<dyn Frame>) -> Result<Self, RingError> {
        let s = as_sw_frame(src.as_ref())?;
        let d = as_sw_frame(dst.as_ref())?;
        // compatibility is checked by a probe transport
        s.cx.ring.transport(&d.cx.ring, &s.cx.ring.one(), false)?;
        Ok(FrameMorphism {
            kind: MorphismKind::Reduction,
            src,
            dst,
        })
    }

    pub fn to_base(src: Rc<dyn Frame>, dst: Rc<dyn Frame>) -> Result<Self, RingError> {
        let s = as_sw_frame(src.as_ref())?;
        let d = as_taut_frame(dst.as_ref())?;
        s.cx.wk.transport(&d.ring, &s.cx.wk.one(), false)?;
        Ok(FrameMorphism {
            kind: MorphismKind::ToBase,
            src,
            dst,
        })
    }

    pub fn section(src: Rc<dyn Frame>, dst: Rc<dyn Frame>) -> Result<Self, RingError> {
        let s = as_taut_frame(src.as_ref())?;
        let d = as_sw_frame(dst.as_ref())?;
        s.ring.transport(&d.cx.wk, &s.ring.one(), true)?;
        Ok(FrameMorphism {
            kind: MorphismKind::Section,
            src,
            dst,
        })
    }

    pub fn apply(&self, a: &FrameEl) -> Result<FrameEl, RingError> {
        match self.kind {
            MorphismKind::Reduction => {
                let s = as_sw_frame(self.src.as_ref())?;
                let d = as_sw_frame(self.dst.as_ref())?;
                let x = a.as_sw();
                let w = s.cx.wk.transport(&d.cx.wk, &x.w, false)?;
                let l = x.eta.len().min(d.cx.eta_len);
                let eta = x.eta[..l]
                    .iter()
                    .map(|dg| s.cx.ring.transport(&d.cx.ring, dg, false))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FrameEl::SmallWitt(SwEl { w, eta }))
            }
            MorphismKind::ToBase => {
                let s = as_sw_frame(self.src.as_ref())?;
                let d = as_taut_frame(self.dst.as_ref())?;
                Ok(FrameEl::Ring(s.cx.wk.transport(&d.ring, &a.as_sw().w, false)?))
            }
            MorphismKind::Section => {
                let s = as_taut_frame(self.src.as_ref())?;
                let d = as_sw_frame(self.dst.as_ref())?;
                let w = s.ring.transport(&d.cx.wk, a.as_ring(), true)?;
                Ok(FrameEl::SmallWitt(d.cx.from_wk(&w)))
            }
        }
    }

    /// Transports a witness; the realized elements correspond under
    /// [`FrameMorphism::apply`].
    pub fn apply_witness(&self, w: &Witness) -> Result<Witness, RingError> {
        match self.kind {
            MorphismKind::Reduction => Ok(Witness {
                pre: self.apply(&w.pre)?,
                s: w.s,
            }),
            MorphismKind::ToBase => {
                // p^(s-1) V(a) maps to p^s sigma^(-1)(image of a)
                let d = as_taut_frame(self.dst.as_ref())?;
                let img = self.apply(&w.pre)?;
                Ok(Witness {
                    pre: FrameEl::Ring(d.ring.sigma_inv(img.as_ring())?),
                    s: w.s,
                })
            }
            MorphismKind::Section => Err(RingError::Shape(
                "witness transport along the section is not defined".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{build_frame, FrameSpec, RingSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eis_spec(quot: u32) -> FrameSpec {
        FrameSpec {
            kind: "smallwitt".into(),
            p: 3,
            m: 1,
            prec: 4,
            eta_len: 4,
            ring: RingSpec::Eisenstein {
                h: 2,
                teich_unit: false,
                quot: Some(quot),
            },
        }
    }

    fn taut_spec() -> FrameSpec {
        FrameSpec {
            kind: "tautological".into(),
            p: 3,
            m: 1,
            prec: 4,
            eta_len: 0,
            ring: RingSpec::Unramified,
        }
    }

    #[test]
    fn reduction_is_a_frame_map() {
        let up = build_frame(&eis_spec(3)).unwrap();
        let down = build_frame(&eis_spec(2)).unwrap();
        let red = FrameMorphism::reduction(up.clone(), down.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..10 {
            let a = up.random_el(&mut rng);
            let b = up.random_el(&mut rng);
            let lhs = red.apply(&up.mul(&a, &b).unwrap()).unwrap();
            let rhs = down.mul(&red.apply(&a).unwrap(), &red.apply(&b).unwrap()).unwrap();
            assert!(down.eq(&lhs, &rhs));
            let ls = red.apply(&up.sigma0(&a).unwrap()).unwrap();
            let rs = down.sigma0(&red.apply(&a).unwrap()).unwrap();
            assert!(down.eq(&ls, &rs));
            let w = up.witness_random(2, &mut rng);
            let wm = red.apply_witness(&w).unwrap();
            assert!(down.eq(
                &down.realize(&wm).unwrap(),
                &red.apply(&up.realize(&w).unwrap()).unwrap()
            ));
        }
    }

    #[test]
    fn base_and_section_are_inverse_on_constants() {
        let wf = build_frame(&eis_spec(3)).unwrap();
        let tf = build_frame(&taut_spec()).unwrap();
        let tobase = FrameMorphism::to_base(wf.clone(), tf.clone()).unwrap();
        let sect = FrameMorphism::section(tf.clone(), wf.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..10 {
            let c = tf.random_el(&mut rng);
            let up = sect.apply(&c).unwrap();
            assert!(tf.eq(&tobase.apply(&up).unwrap(), &c));
            // the section promotes representatives to exact elements, so it
            // is a ring map commuting with Frobenius modulo the source
            // precision: compare after reducing back down
            let d = tf.random_el(&mut rng);
            let lhs = sect.apply(&tf.mul(&c, &d).unwrap()).unwrap();
            let rhs = wf.mul(&sect.apply(&c).unwrap(), &sect.apply(&d).unwrap()).unwrap();
            assert!(tf.eq(
                &tobase.apply(&lhs).unwrap(),
                &tobase.apply(&rhs).unwrap()
            ));
            let ls = sect.apply(&tf.sigma0(&c).unwrap()).unwrap();
            let rs = wf.sigma0(&sect.apply(&c).unwrap()).unwrap();
            assert!(tf.eq(
                &tobase.apply(&ls).unwrap(),
                &tobase.apply(&rs).unwrap()
            ));
            // projection is a ring map commuting with Frobenius
            let x = wf.random_el(&mut rng);
            let y = wf.random_el(&mut rng);
            let lp = tobase.apply(&wf.mul(&x, &y).unwrap()).unwrap();
            let rp = tf
                .mul(&tobase.apply(&x).unwrap(), &tobase.apply(&y).unwrap())
                .unwrap();
            assert!(tf.eq(&lp, &rp));
            let lf = tobase.apply(&wf.sigma0(&x).unwrap()).unwrap();
            let rf = tf.sigma0(&tobase.apply(&x).unwrap()).unwrap();
            assert!(tf.eq(&lf, &rf));
            // witness transport respects realization
            let w = wf.witness_random(2, &mut rng);
            let wm = tobase.apply_witness(&w).unwrap();
            assert!(tf.eq(
                &tf.realize(&wm).unwrap(),
                &tobase.apply(&wf.realize(&w).unwrap()).unwrap()
            ));
        }
    }
}

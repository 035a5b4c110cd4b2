//! The Witt-vector frame of a local base ring, in split representation:
//! `sigma_0` is the Witt Frobenius, `J_s` consists of the elements
//! `p^(s-1) V(a)`, and the divided Frobenius reads off `a` from the
//! witness (`sigma(p^(s-1) V(a)) = p^s a`).

use super::{Frame, FrameEl, FrameSpec, Witness};
use crate::padic::{LocalRing, RingError};
use crate::witt::small::{IEl, SwCtx};
use rand::RngCore;
use std::any::Any;

#[derive(Clone, Debug)]
pub struct SmallWittFrame {
    pub cx: SwCtx,
    spec: FrameSpec,
}

impl SmallWittFrame {
    pub fn new(ring: &LocalRing, eta_len: usize, spec: FrameSpec) -> Result<Self, RingError> {
        Ok(SmallWittFrame {
            cx: SwCtx::new(ring, eta_len)?,
            spec,
        })
    }

    pub fn from_spec(spec: &FrameSpec) -> Result<Self, RingError> {
        let ring = spec.build_ring()?;
        Self::new(&ring, spec.eta_len, spec.clone())
    }

    fn iel(w: &Witness) -> IEl {
        IEl {
            pre: w.pre.as_sw().clone(),
            s: w.s,
        }
    }
}

impl Frame for SmallWittFrame {
    fn name(&self) -> String {
        let shape = match &self.spec.ring {
            super::RingSpec::Unramified => "unramified".to_string(),
            super::RingSpec::Monomial { nilp, .. } => format!("monomial{nilp:?}"),
            super::RingSpec::Eisenstein { h, quot, .. } => {
                format!("eisenstein(h={h},quot={quot:?})")
            }
        };
        format!(
            "smallwitt(p={},m={},N={},L={},{shape})",
            self.cx.ring.p, self.cx.ring.m, self.cx.ring.prec, self.cx.eta_len
        )
    }

    fn spec(&self) -> FrameSpec {
        self.spec.clone()
    }

    fn p(&self) -> u64 {
        self.cx.ring.p
    }

    fn zero(&self) -> FrameEl {
        FrameEl::SmallWitt(self.cx.zero())
    }

    fn one(&self) -> FrameEl {
        FrameEl::SmallWitt(self.cx.one())
    }

    fn from_int(&self, n: i64) -> FrameEl {
        FrameEl::SmallWitt(self.cx.from_int(n))
    }

    fn add(&self, a: &FrameEl, b: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::SmallWitt(self.cx.add(a.as_sw(), b.as_sw())?))
    }

    fn neg(&self, a: &FrameEl) -> FrameEl {
        FrameEl::SmallWitt(self.cx.neg(a.as_sw()))
    }

    fn mul(&self, a: &FrameEl, b: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::SmallWitt(self.cx.mul(a.as_sw(), b.as_sw())?))
    }

    fn inv(&self, a: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::SmallWitt(self.cx.inv(a.as_sw())?))
    }

    fn is_zero(&self, a: &FrameEl) -> bool {
        self.cx.is_zero(a.as_sw())
    }

    fn is_unit(&self, a: &FrameEl) -> bool {
        self.cx.is_unit(a.as_sw())
    }

    fn eq(&self, a: &FrameEl, b: &FrameEl) -> bool {
        self.cx.eq(a.as_sw(), b.as_sw())
    }

    fn random_el(&self, rng: &mut dyn RngCore) -> FrameEl {
        FrameEl::SmallWitt(self.cx.random_el(rng))
    }

    fn random_unit(&self, rng: &mut dyn RngCore) -> FrameEl {
        FrameEl::SmallWitt(self.cx.random_unit(rng))
    }

    fn residue(&self, a: &FrameEl) -> Vec<u64> {
        // eta sits in W(m) and dies in k; only the W(k)-part survives.
        self.cx.wk.residue(&a.as_sw().w)
    }

    fn k_ring(&self) -> &LocalRing {
        &self.cx.ring
    }

    fn sigma0(&self, a: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::SmallWitt(self.cx.frobenius(a.as_sw())?))
    }

    fn realize(&self, w: &Witness) -> Result<FrameEl, RingError> {
        Ok(FrameEl::SmallWitt(self.cx.j_realize(&Self::iel(w))?))
    }

    fn sigma_div(&self, w: &Witness) -> Result<FrameEl, RingError> {
        Ok(w.pre.clone())
    }

    fn t_down(&self, w: &Witness) -> Result<Witness, RingError> {
        if w.s < 2 {
            return Err(RingError::BadParameter("t needs level >= 2".into()));
        }
        let lowered = self.cx.iel_t(&Self::iel(w))?;
        Ok(Witness {
            pre: FrameEl::SmallWitt(lowered.pre),
            s: lowered.s,
        })
    }

    fn witness_from_sigma(&self, y: &FrameEl, s: u32) -> Result<Witness, RingError> {
        Ok(Witness { pre: y.clone(), s })
    }

    fn witness_solve(&self, x: &FrameEl, s: u32) -> Option<Witness> {
        let iel = self.cx.j_witness(x.as_sw(), s)?;
        Some(Witness {
            pre: FrameEl::SmallWitt(iel.pre),
            s: iel.s,
        })
    }

    fn witness_zero(&self, s: u32) -> Witness {
        Witness {
            pre: self.zero(),
            s,
        }
    }

    fn witness_add(&self, a: &Witness, b: &Witness) -> Result<Witness, RingError> {
        assert_eq!(a.s, b.s);
        Ok(Witness {
            pre: self.add(&a.pre, &b.pre)?,
            s: a.s,
        })
    }

    fn witness_neg(&self, a: &Witness) -> Witness {
        Witness {
            pre: self.neg(&a.pre),
            s: a.s,
        }
    }

    fn witness_scalar(&self, c: &FrameEl, w: &Witness) -> Result<Witness, RingError> {
        let lifted = self.cx.iel_scalar(c.as_sw(), &Self::iel(w))?;
        Ok(Witness {
            pre: FrameEl::SmallWitt(lifted.pre),
            s: lifted.s,
        })
    }

    fn witness_random(&self, s: u32, rng: &mut dyn RngCore) -> Witness {
        Witness {
            pre: self.random_el(rng),
            s,
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

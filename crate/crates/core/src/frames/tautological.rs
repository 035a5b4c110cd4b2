//! The frame structure carried by the polynomial model of `W(k)` itself:
//! `J_s = p^s S`, `sigma_s = sigma / p^s` (exact on witnesses `x = p^s c`),
//! rewitnessing multiplies the preimage by `p`.

use super::{Frame, FrameEl, FrameSpec, RingSpec, Witness};
use crate::padic::{LocalRing, RingError};
use rand::RngCore;
use std::any::Any;

#[derive(Clone, Debug)]
pub struct TautologicalFrame {
    pub ring: LocalRing,
}

impl TautologicalFrame {
    pub fn new(ring: &LocalRing) -> Result<Self, RingError> {
        // needs honest division by p, so no capped slots; monomial
        // quotients are fine (sigma sends each generator to its p-th
        // power)
        if matches!(ring.artin, crate::padic::ArtinPart::Eisenstein { .. }) || ring.is_capped() {
            return Err(RingError::NeedUnramified("tautological frame".into()));
        }
        Ok(TautologicalFrame { ring: ring.clone() })
    }

    pub fn from_spec(spec: &FrameSpec) -> Result<Self, RingError> {
        if matches!(spec.ring, RingSpec::Eisenstein { .. }) {
            return Err(RingError::NeedUnramified("tautological frame".into()));
        }
        Self::new(&spec.build_ring()?)
    }
}

impl Frame for TautologicalFrame {
    fn name(&self) -> String {
        format!(
            "tautological(p={},m={},N={})",
            self.ring.p, self.ring.m, self.ring.prec
        )
    }

    fn spec(&self) -> FrameSpec {
        let ring = match &self.ring.artin {
            crate::padic::ArtinPart::Monomial {
                nilp, vanishing, ..
            } => RingSpec::Monomial {
                nilp: nilp.clone(),
                vanishing: vanishing.clone(),
            },
            _ => RingSpec::Unramified,
        };
        FrameSpec {
            kind: "tautological".into(),
            p: self.ring.p,
            m: self.ring.m,
            prec: self.ring.prec,
            eta_len: 0,
            ring,
        }
    }

    fn p(&self) -> u64 {
        self.ring.p
    }

    fn zero(&self) -> FrameEl {
        FrameEl::Ring(self.ring.zero())
    }

    fn one(&self) -> FrameEl {
        FrameEl::Ring(self.ring.one())
    }

    fn from_int(&self, n: i64) -> FrameEl {
        FrameEl::Ring(self.ring.from_i64(n))
    }

    fn add(&self, a: &FrameEl, b: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::Ring(self.ring.add(a.as_ring(), b.as_ring())))
    }

    fn neg(&self, a: &FrameEl) -> FrameEl {
        FrameEl::Ring(self.ring.neg(a.as_ring()))
    }

    fn mul(&self, a: &FrameEl, b: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::Ring(self.ring.mul(a.as_ring(), b.as_ring())))
    }

    fn inv(&self, a: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::Ring(self.ring.inv(a.as_ring())?))
    }

    fn is_zero(&self, a: &FrameEl) -> bool {
        self.ring.is_zero(a.as_ring())
    }

    fn is_unit(&self, a: &FrameEl) -> bool {
        self.ring.is_unit(a.as_ring())
    }

    fn eq(&self, a: &FrameEl, b: &FrameEl) -> bool {
        self.ring.eq(a.as_ring(), b.as_ring())
    }

    fn random_el(&self, rng: &mut dyn RngCore) -> FrameEl {
        FrameEl::Ring(self.ring.random_el(rng))
    }

    fn random_unit(&self, rng: &mut dyn RngCore) -> FrameEl {
        FrameEl::Ring(self.ring.random_unit(rng))
    }

    fn residue(&self, a: &FrameEl) -> Vec<u64> {
        self.ring.residue(a.as_ring())
    }

    fn k_ring(&self) -> &LocalRing {
        &self.ring
    }

    fn sigma0(&self, a: &FrameEl) -> Result<FrameEl, RingError> {
        Ok(FrameEl::Ring(self.ring.sigma(a.as_ring())?))
    }

    fn realize(&self, w: &Witness) -> Result<FrameEl, RingError> {
        Ok(FrameEl::Ring(self.ring.mul_pow_p(w.pre.as_ring(), w.s)))
    }

    fn sigma_div(&self, w: &Witness) -> Result<FrameEl, RingError> {
        Ok(FrameEl::Ring(self.ring.sigma(w.pre.as_ring())?))
    }

    fn t_down(&self, w: &Witness) -> Result<Witness, RingError> {
        if w.s < 2 {
            return Err(RingError::BadParameter("t needs level >= 2".into()));
        }
        Ok(Witness {
            pre: FrameEl::Ring(self.ring.mul_pow_p(w.pre.as_ring(), 1)),
            s: w.s - 1,
        })
    }

    fn witness_from_sigma(&self, y: &FrameEl, s: u32) -> Result<Witness, RingError> {
        Ok(Witness {
            pre: FrameEl::Ring(self.ring.sigma_inv(y.as_ring())?),
            s,
        })
    }

    fn witness_solve(&self, x: &FrameEl, s: u32) -> Option<Witness> {
        let pre = self.ring.divide_p(x.as_ring(), s).ok()?;
        Some(Witness {
            pre: FrameEl::Ring(pre),
            s,
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
        Ok(Witness {
            pre: self.mul(c, &w.pre)?,
            s: w.s,
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

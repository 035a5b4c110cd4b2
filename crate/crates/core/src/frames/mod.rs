//! Frames: the ambient structures a display lives over.
//!
//! A frame packages a base ring `S` together with a Frobenius lift
//! `sigma_0`, a descending chain of divided-Frobenius domains `J_1 supset
//! J_2 supset ...`, exact divided Frobenii `sigma_s : J_s -> S`, and the
//! rewitnessing maps `t : J_(s+1) -> J_s` satisfying `sigma_s(t(a)) = p
//! sigma_(s+1)(a)`. Elements of `J_s` are always carried together with a
//! [`Witness`] that makes `sigma_s` evaluable without division.
//!
//! Two implementations are provided and selected by name through
//! [`build_frame`]:
//!
//! * `"tautological"` ([`TautologicalFrame`]): the polynomial model of
//!   `W(k)` itself, `J_s = p^s S`, divided Frobenius `sigma / p^s`;
//! * `"smallwitt"` ([`SmallWittFrame`]): Witt vectors of a local base ring
//!   in split representation, `J_s = p^(s-1) V(...)`, with the divided
//!   Frobenius reading the witness directly.
//!
//! The two satisfy the same axioms and every consumer works through
//! `dyn Frame`, so algorithms can be exercised against either.

mod morphism;
mod smallwitt;
mod tautological;

pub use morphism::{FrameMorphism, MorphismKind};
pub use smallwitt::SmallWittFrame;
pub use tautological::TautologicalFrame;

use crate::padic::{LocalRing, RingEl, RingError, Scalar};
use crate::witt::small::SwEl;
use once_cell::sync::Lazy;
use rand::RngCore;
use std::any::Any;
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::rc::Rc;

/// Element of a frame's base ring; the variant must match the frame kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameEl {
    Ring(RingEl),
    SmallWitt(SwEl),
}

impl FrameEl {
    pub fn as_ring(&self) -> &RingEl {
        match self {
            FrameEl::Ring(r) => r,
            FrameEl::SmallWitt(_) => panic!("expected a plain ring element"),
        }
    }

    pub fn as_sw(&self) -> &SwEl {
        match self {
            FrameEl::SmallWitt(s) => s,
            FrameEl::Ring(_) => panic!("expected a split Witt element"),
        }
    }
}

/// Membership witness for the `s`-th divided-Frobenius domain. What `pre`
/// means depends on the frame: the realized element is `p^s pre` in the
/// tautological frame and `p^(s-1) V(pre)` in the Witt frame. In both,
/// `sigma_s` and the module action are exact on witnesses.
#[derive(Clone, Debug)]
pub struct Witness {
    pub pre: FrameEl,
    pub s: u32,
}

/// How to build a frame: ring shape plus frame kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameSpec {
    pub kind: String,
    pub p: u64,
    pub m: usize,
    pub prec: u32,
    /// digit budget of the split-Witt representation (ignored by the
    /// tautological frame)
    pub eta_len: usize,
    pub ring: RingSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingSpec {
    Unramified,
    Monomial {
        nilp: Vec<u32>,
        vanishing: Vec<Vec<u32>>,
    },
    Eisenstein {
        h: u32,
        teich_unit: bool,
        quot: Option<u32>,
    },
}

impl FrameSpec {
    pub fn build_ring(&self) -> Result<LocalRing, RingError> {
        match &self.ring {
            RingSpec::Unramified => LocalRing::unramified(self.p, self.m, self.prec),
            RingSpec::Monomial { nilp, vanishing } => {
                LocalRing::artin_monomial(self.p, self.m, self.prec, nilp, vanishing)
            }
            RingSpec::Eisenstein {
                h,
                teich_unit,
                quot,
            } => LocalRing::eisenstein(
                self.p,
                self.m,
                self.prec,
                *h,
                if *teich_unit {
                    crate::padic::EisUnit::TeichGenerator
                } else {
                    crate::padic::EisUnit::One
                },
                *quot,
            ),
        }
    }
}

/// The frame interface. Every method is exact: no operation silently
/// divides by `p`; anything that could fail returns an error.
pub trait Frame: Debug {
    fn name(&self) -> String;
    fn spec(&self) -> FrameSpec;
    fn p(&self) -> u64;

    // base ring
    fn zero(&self) -> FrameEl;
    fn one(&self) -> FrameEl;
    fn from_int(&self, n: i64) -> FrameEl;
    fn add(&self, a: &FrameEl, b: &FrameEl) -> Result<FrameEl, RingError>;
    fn neg(&self, a: &FrameEl) -> FrameEl;
    fn mul(&self, a: &FrameEl, b: &FrameEl) -> Result<FrameEl, RingError>;
    fn inv(&self, a: &FrameEl) -> Result<FrameEl, RingError>;
    fn is_zero(&self, a: &FrameEl) -> bool;
    fn is_unit(&self, a: &FrameEl) -> bool;
    fn eq(&self, a: &FrameEl, b: &FrameEl) -> bool;
    fn random_el(&self, rng: &mut dyn RngCore) -> FrameEl;
    fn random_unit(&self, rng: &mut dyn RngCore) -> FrameEl;
    /// Image in the residue field `k`, as coefficients on the `k`-basis of
    /// [`Frame::k_ring`].
    fn residue(&self, a: &FrameEl) -> Vec<u64>;
    /// A ring handle whose `k_*` helpers give arithmetic in the residue
    /// field.
    fn k_ring(&self) -> &LocalRing;

    // Frobenius structure
    fn sigma0(&self, a: &FrameEl) -> Result<FrameEl, RingError>;
    /// The element a witness stands for.
    fn realize(&self, w: &Witness) -> Result<FrameEl, RingError>;
    /// Divided Frobenius `sigma_s`, exact on witnesses.
    fn sigma_div(&self, w: &Witness) -> Result<FrameEl, RingError>;
    /// Rewitness one level down (`s >= 2`): same element, seen in
    /// `J_(s-1)`.
    fn t_down(&self, w: &Witness) -> Result<Witness, RingError>;
    /// The witness with prescribed divided Frobenius: `sigma_s` of the
    /// result is exactly `y`. This is how correction terms are
    /// parametrized during lifting.
    fn witness_from_sigma(&self, y: &FrameEl, s: u32) -> Result<Witness, RingError>;
    /// Searches for a witness that realizes to `x`; sound but possibly
    /// conservative.
    fn witness_solve(&self, x: &FrameEl, s: u32) -> Option<Witness>;
    fn witness_zero(&self, s: u32) -> Witness;
    fn witness_add(&self, a: &Witness, b: &Witness) -> Result<Witness, RingError>;
    fn witness_neg(&self, a: &Witness) -> Witness;
    /// Module action `c * -` on witnesses: `sigma_s(c x) = sigma_0(c)
    /// sigma_s(x)`.
    fn witness_scalar(&self, c: &FrameEl, w: &Witness) -> Result<Witness, RingError>;
    fn witness_random(&self, s: u32, rng: &mut dyn RngCore) -> Witness;

    fn as_any(&self) -> &dyn Any;
}

impl dyn Frame {
    /// `p^j` as a base ring element.
    pub fn p_power(&self, j: u32) -> FrameEl {
        let p = self.from_int(self.p() as i64);
        let mut acc = self.one();
        for _ in 0..j {
            acc = self.mul(&acc, &p).expect("multiplication by p");
        }
        acc
    }

    pub fn int_mul(&self, n: i64, a: &FrameEl) -> Result<FrameEl, RingError> {
        self.mul(&self.from_int(n), a)
    }
}

impl Scalar for FrameEl {
    type Ctx = dyn Frame;

    fn s_zero(cx: &dyn Frame) -> Self {
        cx.zero()
    }
    fn s_one(cx: &dyn Frame) -> Self {
        cx.one()
    }
    fn s_add(cx: &dyn Frame, a: &Self, b: &Self) -> Self {
        cx.add(a, b).expect("frame addition")
    }
    fn s_sub(cx: &dyn Frame, a: &Self, b: &Self) -> Self {
        cx.add(a, &cx.neg(b)).expect("frame subtraction")
    }
    fn s_mul(cx: &dyn Frame, a: &Self, b: &Self) -> Self {
        cx.mul(a, b).expect("frame multiplication")
    }
    fn s_neg(cx: &dyn Frame, a: &Self) -> Self {
        cx.neg(a)
    }
    fn s_is_zero(cx: &dyn Frame, a: &Self) -> bool {
        cx.is_zero(a)
    }
    fn s_is_unit(cx: &dyn Frame, a: &Self) -> bool {
        cx.is_unit(a)
    }
    fn s_inv(cx: &dyn Frame, a: &Self) -> Result<Self, RingError> {
        cx.inv(a)
    }
    fn s_eq(cx: &dyn Frame, a: &Self, b: &Self) -> bool {
        cx.eq(a, b)
    }
}

type FrameBuilder = fn(&FrameSpec) -> Result<Rc<dyn Frame>, RingError>;

static REGISTRY: Lazy<BTreeMap<&'static str, FrameBuilder>> = Lazy::new(|| {
    let mut m: BTreeMap<&'static str, FrameBuilder> = BTreeMap::new();
    m.insert("tautological", |spec| {
        Ok(Rc::new(TautologicalFrame::from_spec(spec)?) as Rc<dyn Frame>)
    });
    m.insert("smallwitt", |spec| {
        Ok(Rc::new(SmallWittFrame::from_spec(spec)?) as Rc<dyn Frame>)
    });
    m
});

/// Names of all registered frame kinds.
pub fn frame_names() -> Vec<&'static str> {
    REGISTRY.keys().copied().collect()
}

/// Builds a frame by registry name.
pub fn build_frame(spec: &FrameSpec) -> Result<Rc<dyn Frame>, RingError> {
    let builder = REGISTRY
        .get(spec.kind.as_str())
        .ok_or_else(|| RingError::BadParameter(format!("unknown frame kind `{}`", spec.kind)))?;
    builder(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frames_under_test() -> Vec<Rc<dyn Frame>> {
        let mut out = Vec::new();
        out.push(
            build_frame(&FrameSpec {
                kind: "tautological".into(),
                p: 3,
                m: 2,
                prec: 6,
                eta_len: 0,
                ring: RingSpec::Unramified,
            })
            .unwrap(),
        );
        for n in 2..=4u32 {
            out.push(
                build_frame(&FrameSpec {
                    kind: "smallwitt".into(),
                    p: 3,
                    m: 1,
                    prec: 1,
                    eta_len: 4,
                    ring: RingSpec::Monomial {
                        nilp: vec![n],
                        vanishing: vec![],
                    },
                })
                .unwrap(),
            );
        }
        out.push(
            build_frame(&FrameSpec {
                kind: "smallwitt".into(),
                p: 3,
                m: 1,
                prec: 4,
                eta_len: 4,
                ring: RingSpec::Eisenstein {
                    h: 2,
                    teich_unit: false,
                    quot: Some(3),
                },
            })
            .unwrap(),
        );
        out
    }

    #[test]
    fn registry_dispatch() {
        assert_eq!(frame_names(), vec!["smallwitt", "tautological"]);
        let bad = build_frame(&FrameSpec {
            kind: "nope".into(),
            p: 3,
            m: 1,
            prec: 2,
            eta_len: 2,
            ring: RingSpec::Unramified,
        });
        assert!(bad.is_err());
    }

    /// `sigma_s(t(a)) = p sigma_(s+1)(a)`, exactly, for witnessed elements;
    /// at the bottom, `sigma_0(realize(a)) = p sigma_1(a)`.
    #[test]
    fn divided_frobenius_axiom() {
        for fr in frames_under_test() {
            let mut rng = ChaCha8Rng::seed_from_u64(41);
            for _ in 0..25 {
                let a = fr.witness_random(2, &mut rng);
                let ta = fr.t_down(&a).unwrap();
                assert!(fr.eq(
                    &fr.realize(&ta).unwrap(),
                    &fr.realize(&a).unwrap()
                ));
                let lhs = fr.sigma_div(&ta).unwrap();
                let rhs = fr.int_mul(fr.p() as i64, &fr.sigma_div(&a).unwrap()).unwrap();
                assert!(fr.eq(&lhs, &rhs), "{}", fr.name());

                let b = fr.witness_random(1, &mut rng);
                let l2 = fr.sigma0(&fr.realize(&b).unwrap()).unwrap();
                let r2 = fr.int_mul(fr.p() as i64, &fr.sigma_div(&b).unwrap()).unwrap();
                assert!(fr.eq(&l2, &r2), "{}", fr.name());
            }
        }
    }

    #[test]
    fn witness_module_structure() {
        for fr in frames_under_test() {
            let mut rng = ChaCha8Rng::seed_from_u64(43);
            for s in 1..=2u32 {
                for _ in 0..8 {
                    let a = fr.witness_random(s, &mut rng);
                    let b = fr.witness_random(s, &mut rng);
                    let c = fr.random_el(&mut rng);
                    // realize is additive
                    let sum = fr.witness_add(&a, &b).unwrap();
                    assert!(fr.eq(
                        &fr.realize(&sum).unwrap(),
                        &fr.add(&fr.realize(&a).unwrap(), &fr.realize(&b).unwrap())
                            .unwrap()
                    ));
                    // module action realizes to plain multiplication
                    let ca = fr.witness_scalar(&c, &a).unwrap();
                    assert!(fr.eq(
                        &fr.realize(&ca).unwrap(),
                        &fr.mul(&c, &fr.realize(&a).unwrap()).unwrap()
                    ));
                    // and sigma_s(c a) = sigma_0(c) sigma_s(a)
                    assert!(fr.eq(
                        &fr.sigma_div(&ca).unwrap(),
                        &fr.mul(&fr.sigma0(&c).unwrap(), &fr.sigma_div(&a).unwrap())
                            .unwrap()
                    ));
                    // prescribed divided Frobenius
                    let w = fr.witness_from_sigma(&c, s).unwrap();
                    assert!(fr.eq(&fr.sigma_div(&w).unwrap(), &c));
                }
            }
        }
    }

    #[test]
    fn witness_solving() {
        for fr in frames_under_test() {
            let mut rng = ChaCha8Rng::seed_from_u64(45);
            for s in 1..=2u32 {
                for _ in 0..5 {
                    let planted = fr.witness_random(s, &mut rng);
                    let x = fr.realize(&planted).unwrap();
                    let found = fr.witness_solve(&x, s).expect("witness search");
                    assert!(fr.eq(&fr.realize(&found).unwrap(), &x));
                }
            }
            // elements outside J_1 are rejected
            let u = fr.random_unit(&mut rng);
            assert!(fr.witness_solve(&u, 1).is_none());
        }
    }
}

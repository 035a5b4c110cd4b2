//! The module/submodule presentation of a 1-display over a Witt frame.
//!
//! A display with degrees in `{0,1}` is equivalently `(P, Q, F, F_1)`:
//! `P` is free of rank `r_0 + r_1`, `Q` is spanned by the degree-1 part
//! together with the divided-domain multiples of the degree-0 part, `F` is
//! the display operator on `P`, and `F_1 : Q -> P` is the divided
//! operator with `p F_1 = F` on `Q` and `F_1(Q)` generating `P`.
//!
//! Elements of `Q` are passed as witnessed coordinates on the degree-0
//! generators plus plain coordinates on the degree-1 generators, so `F_1`
//! is evaluated exactly, without division.

use super::morphism::residue_rank_frame;
use super::{make_display, Display, DisplayError};
use crate::frames::{FrameEl, Witness};
use crate::padic::Mat;

pub struct Quadruple {
    pub display: Display,
    pub rank0: usize,
    pub rank1: usize,
}

/// An element of `Q`: level-1 witnessed coordinates on the degree-0
/// generators, plain coordinates on the degree-1 generators.
#[derive(Clone, Debug)]
pub struct QElement {
    pub q0: Vec<Witness>,
    pub q1: Vec<FrameEl>,
}

/// Views a 1-display over the Witt frame as `(P, Q, F, F_1)`.
pub fn to_quadruple(d: &Display) -> Result<Quadruple, DisplayError> {
    if d.degs.iter().any(|&x| x != 0 && x != 1) {
        return Err(DisplayError::WrongDegreeRange);
    }
    if d.frame.spec().kind != "smallwitt" {
        return Err(DisplayError::Shape(
            "the quadruple view reads divided-domain coordinates, which the Witt frame carries"
                .into(),
        ));
    }
    let rank0 = d.degs.iter().filter(|&&x| x == 0).count();
    Ok(Quadruple {
        display: d.clone(),
        rank0,
        rank1: d.rank() - rank0,
    })
}

impl Quadruple {
    /// `F` on a plain coordinate vector of `P`.
    pub fn f_apply(&self, x: &[FrameEl]) -> Result<Vec<FrameEl>, DisplayError> {
        let d = &self.display;
        let fr = d.frame.as_ref();
        if x.len() != d.rank() {
            return Err(DisplayError::Shape("coordinate length".into()));
        }
        let v = Mat::from_fn(d.rank(), 1, |j, _| {
            let s = fr.sigma0(&x[j]).expect("sigma_0");
            fr.mul(&fr.p_power(d.degs[j] as u32), &s).expect("scale")
        });
        let out = d.phi.mul(fr, &v);
        Ok(out.d)
    }

    /// `F_1` on an element of `Q`; exact.
    pub fn f1_apply(&self, q: &QElement) -> Result<Vec<FrameEl>, DisplayError> {
        let d = &self.display;
        let fr = d.frame.as_ref();
        if q.q0.len() != self.rank0 || q.q1.len() != self.rank1 {
            return Err(DisplayError::Shape("Q coordinate shape".into()));
        }
        let mut divided = Vec::with_capacity(d.rank());
        let (mut i0, mut i1) = (0usize, 0usize);
        for &deg in &d.degs {
            if deg == 0 {
                let w = &q.q0[i0];
                i0 += 1;
                if w.s != 1 {
                    return Err(DisplayError::Shape("degree-0 coordinates need level-1 witnesses".into()));
                }
                divided.push(fr.sigma_div(w)?);
            } else {
                divided.push(fr.sigma0(&q.q1[i1])?);
                i1 += 1;
            }
        }
        let v = Mat { rows: d.rank(), cols: 1, d: divided };
        Ok(self.display.phi.mul(fr, &v).d)
    }

    /// The plain element of `P` a `Q`-element stands for.
    pub fn q_realize(&self, q: &QElement) -> Result<Vec<FrameEl>, DisplayError> {
        let d = &self.display;
        let fr = d.frame.as_ref();
        let mut out = Vec::with_capacity(d.rank());
        let (mut i0, mut i1) = (0usize, 0usize);
        for &deg in &d.degs {
            if deg == 0 {
                out.push(fr.realize(&q.q0[i0])?);
                i0 += 1;
            } else {
                out.push(q.q1[i1].clone());
                i1 += 1;
            }
        }
        Ok(out)
    }

    /// `F_1(Q)` generates `P` iff the structure matrix is invertible; the
    /// residue-field rank decides it.
    pub fn f1_generates(&self) -> bool {
        let d = &self.display;
        residue_rank_frame(d.frame.as_ref(), &d.phi) == d.rank()
    }
}

/// Rebuilds the display from the images of the generators: `F` on the
/// degree-0 generators and `F_1` on the degree-1 generators, in that
/// basis order.
pub fn from_quadruple(
    q: &Quadruple,
    f_cols: &Mat<FrameEl>,
    f1_cols: &Mat<FrameEl>,
) -> Result<Display, DisplayError> {
    let d = &q.display;
    let n = d.rank();
    if f_cols.rows != n || f_cols.cols != q.rank0 || f1_cols.rows != n || f1_cols.cols != q.rank1 {
        return Err(DisplayError::Shape("generator image shapes".into()));
    }
    let phi = Mat::from_fn(n, n, |i, j| {
        if j < q.rank0 {
            f_cols.at(i, j).clone()
        } else {
            f1_cols.at(i, j - q.rank0).clone()
        }
    });
    make_display(d.frame.clone(), d.degs.clone(), phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displays::random_display;
    use crate::frames::{build_frame, Frame, FrameSpec, RingSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::rc::Rc;

    fn sw_frame() -> Rc<dyn Frame> {
        build_frame(&FrameSpec {
            kind: "smallwitt".into(),
            p: 3,
            m: 1,
            prec: 3,
            eta_len: 4,
            ring: RingSpec::Monomial {
                nilp: vec![2],
                vanishing: vec![],
            },
        })
        .unwrap()
    }

    #[test]
    fn rank_one_cases() {
        let fr = sw_frame();
        // slope-zero case: P the whole ring, Q the divided domain,
        // F = sigma_0 and F_1 the divided Frobenius
        let etale = make_display(
            fr.clone(),
            vec![0],
            Mat::from_fn(1, 1, |_, _| fr.one()),
        )
        .unwrap();
        let q = to_quadruple(&etale).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let x = fr.random_el(&mut rng);
        assert!(fr.eq(&q.f_apply(&[x.clone()]).unwrap()[0], &fr.sigma0(&x).unwrap()));
        let w = fr.witness_random(1, &mut rng);
        let qe = QElement { q0: vec![w.clone()], q1: vec![] };
        assert!(fr.eq(&q.f1_apply(&qe).unwrap()[0], &fr.sigma_div(&w).unwrap()));
        assert!(q.f1_generates());

        // slope-one case: Q = P, F = p sigma_0
        let mult = make_display(fr.clone(), vec![1], Mat::from_fn(1, 1, |_, _| fr.one())).unwrap();
        let q = to_quadruple(&mult).unwrap();
        let y = fr.random_el(&mut rng);
        let fy = q.f_apply(&[y.clone()]).unwrap();
        let expect = fr.int_mul(3, &fr.sigma0(&y).unwrap()).unwrap();
        assert!(fr.eq(&fy[0], &expect));
        let qe = QElement { q0: vec![], q1: vec![y] };
        // p F_1 = F on Q
        let f1 = q.f1_apply(&qe).unwrap();
        assert!(fr.eq(&fr.int_mul(3, &f1[0]).unwrap(), &fy[0]));
    }

    #[test]
    fn p_f1_equals_f_and_round_trip() {
        let fr = sw_frame();
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let d = random_display(fr.clone(), vec![0, 1], &mut rng);
        let q = to_quadruple(&d).unwrap();
        assert_eq!((q.rank0, q.rank1), (1, 1));
        assert!(q.f1_generates());

        let qe = QElement {
            q0: vec![fr.witness_random(1, &mut rng)],
            q1: vec![fr.random_el(&mut rng)],
        };
        let f1 = q.f1_apply(&qe).unwrap();
        let realized = q.q_realize(&qe).unwrap();
        let f = q.f_apply(&realized).unwrap();
        for (a, b) in f1.iter().zip(&f) {
            let pa = fr.int_mul(3, a).unwrap();
            assert!(fr.eq(&pa, b), "p F_1 != F on Q");
        }

        // round trip: read off generator images, rebuild, compare
        let n = d.rank();
        let basis = |j: usize| -> Vec<FrameEl> {
            (0..n).map(|i| if i == j { fr.one() } else { fr.zero() }).collect()
        };
        let mut fcols = Mat::zero(fr.as_ref(), n, q.rank0);
        for j in 0..q.rank0 {
            let img = q.f_apply(&basis(j)).unwrap();
            for i in 0..n {
                fcols.set(i, j, img[i].clone());
            }
        }
        let mut f1cols = Mat::zero(fr.as_ref(), n, q.rank1);
        for j in 0..q.rank1 {
            let qe = QElement {
                q0: vec![fr.witness_zero(1); q.rank0],
                q1: (0..q.rank1)
                    .map(|l| if l == j { fr.one() } else { fr.zero() })
                    .collect(),
            };
            let img = q.f1_apply(&qe).unwrap();
            for i in 0..n {
                f1cols.set(i, j, img[i].clone());
            }
        }
        let rebuilt = from_quadruple(&q, &fcols, &f1cols).unwrap();
        assert!(rebuilt.eq_display(&d));
    }
}

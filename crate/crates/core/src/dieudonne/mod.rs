//! Free modules over `W_N(k)` with a Frobenius-semilinear operator:
//! construction kit, Newton slopes, and the checks that decide when a
//! Hodge-type decomposition turns the operator into a display.
//!
//! The operator `F` is stored as its matrix `A` in a fixed basis,
//! `F(x) = A . sigma(x)`. Verschiebung is derived, never stored:
//! `V = p F^(-1)` as a lattice map, computed division-free through the
//! adjugate so that it also exists when `A` is singular modulo `p`.

pub mod charpoly;
pub mod k3;
pub mod slopes;

pub use charpoly::{adjugate, charpoly, det_from_charpoly};
pub use k3::{k3_slope_module, K3SlopeData};
pub use slopes::{newton_polygon_slopes, reduce_slope, Slope};

use crate::padic::{residue_rank, ArtinPart, LocalRing, Mat, RingEl, RingError};

#[derive(Clone, Debug)]
pub struct DieudonneModule {
    pub ring: LocalRing,
    /// Matrix of `F`; column `j` is `F(e_j)`.
    pub fmat: Mat<RingEl>,
}

impl DieudonneModule {
    pub fn new(ring: &LocalRing, fmat: Mat<RingEl>) -> Result<Self, RingError> {
        if !matches!(ring.artin, ArtinPart::None) {
            return Err(RingError::NeedUnramified(
                "semilinear module theory runs over W_N(k)".into(),
            ));
        }
        if fmat.rows != fmat.cols {
            return Err(RingError::Shape("operator matrix must be square".into()));
        }
        Ok(DieudonneModule {
            ring: ring.clone(),
            fmat,
        })
    }

    pub fn rank(&self) -> usize {
        self.fmat.rows
    }

    /// Height-`h` one-dimensional formal group: `F e_i = p e_(i+1)` for
    /// `i < h` and `F e_h = e_1`. All slopes equal `(h-1)/h`.
    pub fn formal_group(ring: &LocalRing, h: u32) -> Result<Self, RingError> {
        if h == 0 {
            return Err(RingError::BadParameter("height must be positive".into()));
        }
        let h = h as usize;
        let p = ring.from_u64(ring.p);
        let mut a = Mat::zero(ring, h, h);
        for j in 0..h - 1 {
            a.set(j + 1, j, p.clone());
        }
        a.set(0, h - 1, ring.one());
        Self::new(ring, a)
    }

    /// Unit-root module `F = U . sigma` with `U` invertible; all slopes 0.
    pub fn etale(ring: &LocalRing, u: Mat<RingEl>) -> Result<Self, RingError> {
        if !u.is_invertible(ring) {
            return Err(RingError::Shape(
                "unit-root operator matrix must be invertible".into(),
            ));
        }
        Self::new(ring, u)
    }

    /// Scales `F` by `p^n`, shifting every slope up by `n`.
    pub fn twist(&self, n: u32) -> Self {
        DieudonneModule {
            ring: self.ring.clone(),
            fmat: self.fmat.try_map(|x| Ok::<_, RingError>(self.ring.mul_pow_p(x, n))).unwrap(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, RingError> {
        if self.ring != other.ring {
            return Err(RingError::Shape("summands over different rings".into()));
        }
        Ok(DieudonneModule {
            ring: self.ring.clone(),
            fmat: self.fmat.block_diag(&self.ring, &other.fmat),
        })
    }

    /// Change of basis along an invertible `U`: the new operator matrix
    /// is `U . A . sigma(U)^(-1)`, the matrix of the same `F` in the
    /// basis whose coordinates are `U x`.
    pub fn conjugated(&self, u: &Mat<RingEl>) -> Result<Self, RingError> {
        let r = &self.ring;
        let su = u.try_map(|x| r.sigma(x))?;
        let sui = su.invert(r)?;
        Ok(DieudonneModule {
            ring: r.clone(),
            fmat: u.mul(r, &self.fmat).mul(r, &sui),
        })
    }

    /// Matrix of `F^steps`: `A . sigma(A) ... sigma^(steps-1)(A)`. For
    /// `steps = m` this operator is `W(k)`-linear.
    pub fn frobenius_power(&self, steps: u32) -> Result<Mat<RingEl>, RingError> {
        let r = &self.ring;
        let mut acc = self.fmat.clone();
        let mut cur = self.fmat.clone();
        for _ in 1..steps.max(1) {
            cur = cur.try_map(|x| r.sigma(x))?;
            acc = acc.mul(r, &cur);
        }
        Ok(acc)
    }

    /// Newton slopes as reduced fractions, ascending with multiplicity:
    /// the polygon of the characteristic polynomial of the linearized
    /// operator `F^m`, rescaled by `1/m`. Needs working precision at
    /// least `m * rank + 2` so no polygon vertex can hide above the
    /// precision ceiling.
    pub fn newton_slopes(&self) -> Result<Vec<Slope>, RingError> {
        let r = &self.ring;
        let m = r.m as u32;
        let n = self.rank() as u32;
        if r.prec < m * n + 2 {
            return Err(RingError::Precision(format!(
                "slope computation at rank {n} over degree {m} needs precision >= {}",
                m * n + 2
            )));
        }
        let am = self.frobenius_power(m)?;
        let coeffs = charpoly(r, &am);
        let vals: Vec<Option<u32>> = coeffs
            .iter()
            .map(|c| {
                if r.is_zero(c) {
                    None
                } else {
                    Some(r.val_p(c).expect("unramified"))
                }
            })
            .collect();
        let raw = newton_polygon_slopes(&vals)?;
        Ok(raw
            .into_iter()
            .map(|(num, den)| reduce_slope(num, den * m as i64))
            .collect())
    }

    /// Matrix `B` of Verschiebung, `V(x) = B . sigma^(-1)(x)`, defined by
    /// `F V = p`. Fails when `V` is not integral.
    pub fn vmat(&self) -> Result<Mat<RingEl>, RingError> {
        let r = &self.ring;
        let coeffs = charpoly(r, &self.fmat);
        let det = det_from_charpoly(r, &coeffs);
        if r.is_zero(&det) {
            return Err(RingError::Precision(
                "determinant vanishes to working precision".into(),
            ));
        }
        let v = r.val_p(&det)?;
        let u = r.divide_p(&det, v)?;
        let ui = r.inv(&u)?;
        let adj = adjugate(r, &self.fmat);
        // p A^(-1) = p adj(A) u^(-1) / p^v
        let scaled = adj.try_map(|x| Ok::<_, RingError>(r.mul(x, &ui)))?;
        let b = if v == 0 {
            scaled.try_map(|x| Ok::<_, RingError>(r.mul_pow_p(x, 1)))?
        } else {
            scaled.try_map(|x| r.divide_p(x, v - 1))?
        };
        b.try_map(|x| r.sigma_inv(x))
    }
}

/// Does the column span of `x` lie inside the full-rank lattice spanned
/// by the square matrix `y`? Division-free: `y^(-1) x` is integral iff
/// `adj(y) x / unit` is divisible by `p^(val det y)`.
pub fn lattice_contains(
    ring: &LocalRing,
    y: &Mat<RingEl>,
    x: &Mat<RingEl>,
) -> Result<bool, RingError> {
    let coeffs = charpoly(ring, y);
    let det = det_from_charpoly(ring, &coeffs);
    if ring.is_zero(&det) {
        return Err(RingError::Precision(
            "lattice matrix determinant vanishes to working precision".into(),
        ));
    }
    let v = ring.val_p(&det)?;
    if v >= ring.prec {
        return Err(RingError::Precision("lattice index exceeds precision".into()));
    }
    let t = adjugate(ring, y).mul(ring, x);
    for e in &t.d {
        if !ring.is_zero(e) && ring.val_p(e)? < v {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    /// `F(F^1)` is divisible by `p`.
    pub f_image_divisible: bool,
    /// `V(M) = p L + F^1` as lattices.
    pub v_image_decomposes: bool,
    /// The kernel of `F` mod `p` has the rank forced by `F^1`.
    pub kernel_rank_matches: bool,
    /// `[F on L | p^(-1) F on F^1]` is invertible.
    pub divided_map_invertible: bool,
    /// Smallest element precision among the derived matrices.
    pub precision: u32,
    pub notes: Vec<String>,
}

impl AdmissibilityReport {
    pub fn pass(&self) -> bool {
        self.f_image_divisible
            && self.v_image_decomposes
            && self.kernel_rank_matches
            && self.divided_map_invertible
    }
}

/// Decides whether the decomposition `M-bar = L-bar (+) F^1-bar` makes
/// `(M, F)` the module of a display with `F^1` in degree one: checks
/// divisibility of `F` on `F^1`, the Verschiebung image, the mod-`p`
/// kernel rank, and invertibility of the divided operator.
///
/// `l` and `f1` are column-span matrices; together they must reduce to a
/// basis mod `p`, which is a precondition rather than one of the graded
/// checks.
pub fn check_display_admissibility(
    d: &DieudonneModule,
    l: &Mat<RingEl>,
    f1: &Mat<RingEl>,
) -> Result<AdmissibilityReport, RingError> {
    let r = &d.ring;
    let n = d.rank();
    if l.rows != n || f1.rows != n || l.cols + f1.cols != n {
        return Err(RingError::Shape("decomposition has the wrong shape".into()));
    }
    let joint = Mat::from_fn(n, n, |i, j| {
        if j < l.cols {
            l.at(i, j).clone()
        } else {
            f1.at(i, j - l.cols).clone()
        }
    });
    if residue_rank(r, &joint) != n {
        return Err(RingError::Shape(
            "spans do not decompose the module mod p".into(),
        ));
    }
    let mut notes = Vec::new();
    let mut precision = r.prec;

    let f_on_f1 = d.fmat.mul(r, &f1.try_map(|x| r.sigma(x))?);
    let divided_f1 = f_on_f1.try_map(|x| r.divide_p(x, 1));
    let f_image_divisible = divided_f1.is_ok();
    if let Err(e) = &divided_f1 {
        notes.push(format!("F on the filtration step: {e}"));
    }

    let v_image_decomposes = match d.vmat() {
        Ok(b) => {
            precision = precision.min(b.d.iter().map(|e| e.prec).min().unwrap_or(r.prec));
            let pl = l.try_map(|x| Ok::<_, RingError>(r.mul_pow_p(x, 1)))?;
            let target = Mat::from_fn(n, n, |i, j| {
                if j < l.cols {
                    pl.at(i, j).clone()
                } else {
                    f1.at(i, j - l.cols).clone()
                }
            });
            lattice_contains(r, &target, &b)? && lattice_contains(r, &b, &target)?
        }
        Err(e) => {
            notes.push(format!("Verschiebung: {e}"));
            false
        }
    };

    let kernel_rank_matches = residue_rank(r, &d.fmat) == l.cols;

    let divided_map_invertible = match divided_f1 {
        Err(_) => false,
        Ok(df) => {
            let f_on_l = d.fmat.mul(r, &l.try_map(|x| r.sigma(x))?);
            let tilde = Mat::from_fn(n, n, |i, j| {
                if j < l.cols {
                    f_on_l.at(i, j).clone()
                } else {
                    df.at(i, j - l.cols).clone()
                }
            });
            precision = precision.min(tilde.d.iter().map(|e| e.prec).min().unwrap_or(r.prec));
            tilde.is_invertible(r)
        }
    };

    Ok(AdmissibilityReport {
        f_image_divisible,
        v_image_decomposes,
        kernel_rank_matches,
        divided_map_invertible,
        precision,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wring(p: u64, m: usize, prec: u32) -> LocalRing {
        LocalRing::unramified(p, m, prec).unwrap()
    }

    #[test]
    fn formal_group_slopes() {
        for m in [1usize, 2] {
            for h in 1..=4u32 {
                let r = wring(3, m, m as u32 * h + 4);
                let d = DieudonneModule::formal_group(&r, h).unwrap();
                let s = d.newton_slopes().unwrap();
                let want = reduce_slope(h as i64 - 1, h as i64);
                assert_eq!(s, vec![want; h as usize], "h={h} m={m}");
            }
        }
    }

    #[test]
    fn unit_root_and_twist_slopes() {
        let r = wring(5, 1, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let u = Mat::from_fn(3, 3, |_, _| r.random_el(&mut rng));
        let u = if u.is_invertible(&r) {
            u
        } else {
            u.add(&r, &Mat::identity(&r, 3))
        };
        let d = DieudonneModule::etale(&r, u).unwrap();
        assert_eq!(d.newton_slopes().unwrap(), vec![(0, 1); 3]);
        assert_eq!(d.twist(1).newton_slopes().unwrap(), vec![(1, 1); 3]);
    }

    #[test]
    fn mixed_sum_orders_slopes() {
        let r = wring(3, 1, 8);
        let g = DieudonneModule::formal_group(&r, 2).unwrap();
        let e = DieudonneModule::etale(&r, Mat::identity(&r, 1)).unwrap().twist(1);
        let s = g.direct_sum(&e).unwrap().newton_slopes().unwrap();
        assert_eq!(s, vec![(1, 2), (1, 2), (1, 1)]);
    }

    #[test]
    fn slopes_survive_basis_change() {
        let r = wring(3, 2, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let d = DieudonneModule::formal_group(&r, 3).unwrap();
        for _ in 0..5 {
            let mut u = Mat::from_fn(3, 3, |_, _| r.random_el(&mut rng));
            while !u.is_invertible(&r) {
                u = Mat::from_fn(3, 3, |_, _| r.random_el(&mut rng));
            }
            let c = d.conjugated(&u).unwrap();
            assert_eq!(c.newton_slopes().unwrap(), d.newton_slopes().unwrap());
        }
    }

    #[test]
    fn verschiebung_of_the_formal_group() {
        let r = wring(3, 1, 8);
        let d = DieudonneModule::formal_group(&r, 3).unwrap();
        let b = d.vmat().unwrap();
        // V e_(i+1) = e_i, V e_1 = p e_h
        let mut want = Mat::zero(&r, 3, 3);
        want.set(0, 1, r.one());
        want.set(1, 2, r.one());
        want.set(2, 0, r.from_u64(3));
        assert!(b.eq(&r, &want));
        // F V = p on the nose
        let fv = d.fmat.mul(&r, &b.try_map(|x| r.sigma(x)).unwrap());
        assert!(fv.eq(&r, &Mat::identity(&r, 3).scale(&r, &r.from_u64(3))));
    }

    #[test]
    fn admissibility_of_standard_decompositions() {
        for h in 1..=3usize {
            let r = wring(3, 1, 8);
            let d = DieudonneModule::formal_group(&r, h as u32).unwrap();
            let l = Mat::from_fn(h, 1, |i, _| {
                if i == h - 1 {
                    r.one()
                } else {
                    r.zero()
                }
            });
            let f1 = Mat::from_fn(h, h - 1, |i, j| {
                if i == j {
                    r.one()
                } else {
                    r.zero()
                }
            });
            let rep = check_display_admissibility(&d, &l, &f1).unwrap();
            assert!(rep.pass(), "h={h}: {:?}", rep);
            assert!(rep.precision >= 4);
        }
        // unit-root: the filtration step is zero
        let r = wring(3, 2, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let mut u = Mat::from_fn(2, 2, |_, _| r.random_el(&mut rng));
        while !u.is_invertible(&r) {
            u = Mat::from_fn(2, 2, |_, _| r.random_el(&mut rng));
        }
        let d = DieudonneModule::etale(&r, u).unwrap();
        let l = Mat::identity(&r, 2);
        let f1 = Mat::zero(&r, 2, 0);
        let rep = check_display_admissibility(&d, &l, &f1).unwrap();
        assert!(rep.pass(), "{:?}", rep);
    }

    #[test]
    fn admissibility_rejects_the_swapped_decomposition() {
        let r = wring(3, 1, 8);
        let d = DieudonneModule::formal_group(&r, 2).unwrap();
        // swap the roles of e_1 and e_2
        let l = Mat::from_fn(2, 1, |i, _| if i == 0 { r.one() } else { r.zero() });
        let f1 = Mat::from_fn(2, 1, |i, _| if i == 1 { r.one() } else { r.zero() });
        let rep = check_display_admissibility(&d, &l, &f1).unwrap();
        assert!(!rep.f_image_divisible);
        assert!(!rep.v_image_decomposes);
        assert!(!rep.divided_map_invertible);
        assert!(!rep.pass());
    }

    #[test]
    fn lattice_containment_basics() {
        let r = wring(5, 1, 8);
        let y = Mat::from_fn(2, 2, |i, j| {
            if i == j && i == 0 {
                r.from_u64(5)
            } else if i == j {
                r.one()
            } else {
                r.zero()
            }
        });
        let inside = Mat::from_fn(2, 1, |i, _| if i == 0 { r.from_u64(10) } else { r.one() });
        let outside = Mat::from_fn(2, 1, |i, _| if i == 0 { r.one() } else { r.zero() });
        assert!(lattice_contains(&r, &y, &inside).unwrap());
        assert!(!lattice_contains(&r, &y, &outside).unwrap());
    }
}

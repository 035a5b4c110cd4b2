//! Morphisms of displays and the exactness checker.
//!
//! A morphism is normalized to a single matrix `G` with `G[i][j] : L_(d_j)
//! -> L'_(d_i)`. Whenever the degree drop `tau = d_j - d'_i` is positive
//! the entry must lie in the `tau`-th divided-Frobenius domain, and the
//! morphism carries a [`Witness`] for it; the equivariance identity is then
//! checked in divided form, which needs no division by `p`:
//!
//! `G phi = phi' Sigma(G)`, where `Sigma(G)[i][j]` is `sigma_tau` of the
//! entry (via its witness) for `tau >= 1` and `p^(-tau) sigma_0` otherwise.

use super::{Display, DisplayError};
use crate::frames::{Frame, FrameEl, Witness};
use crate::padic::{LocalRing, Mat};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct DisplayHom {
    pub mat: Mat<FrameEl>,
    /// Witnesses for the entries in positive divided-Frobenius degree,
    /// keyed by `(target row, source column)`.
    pub wit: BTreeMap<(usize, usize), Witness>,
}

impl DisplayHom {
    /// Wraps a plain matrix. Zero entries in witness-required positions get
    /// the zero witness; nonzero ones are searched for. Positions the
    /// search cannot certify are left bare and will fail the grading check.
    pub fn from_plain(mat: Mat<FrameEl>, src: &Display, dst: &Display) -> DisplayHom {
        let fr = src.frame.as_ref();
        let mut wit = BTreeMap::new();
        for i in 0..dst.rank() {
            for j in 0..src.rank() {
                let tau = src.degs[j] - dst.degs[i];
                if tau >= 1 {
                    let e = mat.at(i, j);
                    let w = if fr.is_zero(e) {
                        Some(fr.witness_zero(tau as u32))
                    } else {
                        fr.witness_solve(e, tau as u32)
                    };
                    if let Some(w) = w {
                        wit.insert((i, j), w);
                    }
                }
            }
        }
        DisplayHom { mat, wit }
    }

    pub fn identity(d: &Display) -> DisplayHom {
        Self::from_plain(Mat::identity(d.frame.as_ref(), d.rank()), d, d)
    }

    /// Copy with one entry shifted by `delta`; witnesses are left as they
    /// were, so this is the canonical way to build a near-morphism that the
    /// checker must reject.
    pub fn perturb_entry(&self, fr: &dyn Frame, i: usize, j: usize, delta: &FrameEl) -> DisplayHom {
        let mut out = self.clone();
        let e = fr.add(self.mat.at(i, j), delta).expect("frame addition");
        out.mat.set(i, j, e);
        out
    }
}

#[derive(Clone, Debug)]
pub struct MorphReport {
    pub grading_ok: bool,
    pub equivariant: bool,
    pub precision: u32,
    pub notes: Vec<String>,
}

impl MorphReport {
    pub fn pass(&self) -> bool {
        self.grading_ok && self.equivariant
    }
}

/// Checks the grading condition and divided F-equivariance of `h : src ->
/// dst`.
pub fn check_morphism(h: &DisplayHom, src: &Display, dst: &Display) -> Result<MorphReport, DisplayError> {
    if !src.same_frame(dst) {
        return Err(DisplayError::FrameMismatch);
    }
    if h.mat.rows != dst.rank() || h.mat.cols != src.rank() {
        return Err(DisplayError::Shape(format!(
            "morphism is {}x{}, displays need {}x{}",
            h.mat.rows,
            h.mat.cols,
            dst.rank(),
            src.rank()
        )));
    }
    let fr = src.frame.as_ref();
    let mut notes = Vec::new();
    let mut grading_ok = true;

    // Sigma(G), built while the grading is checked.
    let mut sigma = Mat::zero(fr, dst.rank(), src.rank());
    for i in 0..dst.rank() {
        for j in 0..src.rank() {
            let tau = src.degs[j] - dst.degs[i];
            let e = h.mat.at(i, j);
            if tau >= 1 {
                match h.wit.get(&(i, j)) {
                    None => {
                        grading_ok = false;
                        notes.push(format!("({i},{j}): no witness for degree drop {tau}"));
                    }
                    Some(w) => {
                        if w.s != tau as u32 {
                            grading_ok = false;
                            notes.push(format!("({i},{j}): witness level {} != {tau}", w.s));
                        } else if !fr.eq(&fr.realize(w)?, e) {
                            grading_ok = false;
                            notes.push(format!("({i},{j}): witness realizes to a different entry"));
                        } else {
                            sigma.set(i, j, fr.sigma_div(w)?);
                        }
                    }
                }
            } else {
                let scaled = fr.mul(&fr.p_power((-tau) as u32), &fr.sigma0(e)?)?;
                sigma.set(i, j, scaled);
            }
        }
    }

    let lhs = h.mat.mul(fr, &src.phi);
    let rhs = dst.phi.mul(fr, &sigma);
    let equivariant = grading_ok && lhs.eq(fr, &rhs);
    if grading_ok && !equivariant {
        notes.push("G phi != phi' Sigma(G)".into());
    }
    Ok(MorphReport {
        grading_ok,
        equivariant,
        precision: fr.spec().prec,
        notes,
    })
}

/// Gaussian rank of a matrix of residue-field elements.
fn k_rank(kr: &LocalRing, mut rows: Vec<Vec<Vec<u64>>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pos) = (rank..rows.len()).find(|&r| !kr.k_is_zero(&rows[r][c])) else {
            continue;
        };
        rows.swap(rank, pos);
        let inv = kr.k_inv(&rows[rank][c]).expect("nonzero pivot");
        for x in rows[rank].iter_mut() {
            *x = kr.k_mul(x, &inv);
        }
        for r in 0..rows.len() {
            if r != rank && !kr.k_is_zero(&rows[r][c]) {
                let f = rows[r][c].clone();
                for cc in 0..cols {
                    let t = kr.k_mul(&rows[rank][cc], &f);
                    rows[r][cc] = kr.k_sub(&rows[r][cc], &t);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Residue-field rank of a matrix over the frame's base ring.
pub(crate) fn residue_rank_frame(fr: &dyn Frame, a: &Mat<FrameEl>) -> usize {
    let rows: Vec<Vec<Vec<u64>>> = (0..a.rows)
        .map(|i| (0..a.cols).map(|j| fr.residue(a.at(i, j))).collect())
        .collect();
    k_rank(fr.k_ring(), rows)
}

#[derive(Clone, Debug)]
pub struct ExactReport {
    pub composite_zero: bool,
    pub degree_ranks_ok: bool,
    pub notes: Vec<String>,
}

impl ExactReport {
    pub fn pass(&self) -> bool {
        self.composite_zero && self.degree_ranks_ok
    }
}

/// Certifies exactness of `0 -> sub -f-> mid -g-> quo -> 0` for finite
/// free modules over a local base: the composite vanishes and, degreewise
/// over the residue field, `f` is injective, `g` is surjective, and the
/// ranks add up. Nakayama lifts these to the ring.
pub fn check_exact(
    f: &DisplayHom,
    g: &DisplayHom,
    sub: &Display,
    mid: &Display,
    quo: &Display,
) -> Result<ExactReport, DisplayError> {
    if !sub.same_frame(mid) || !mid.same_frame(quo) {
        return Err(DisplayError::FrameMismatch);
    }
    let fr = mid.frame.as_ref();
    let mut notes = Vec::new();
    let comp = g.mat.mul(fr, &f.mat);
    let composite_zero = comp.is_zero(fr);
    if !composite_zero {
        notes.push("g o f != 0".into());
    }

    let mut degs: Vec<i64> = sub
        .degs
        .iter()
        .chain(&mid.degs)
        .chain(&quo.degs)
        .copied()
        .collect();
    degs.sort_unstable();
    degs.dedup();
    let mut degree_ranks_ok = true;
    for &deg in &degs {
        let pick = |ds: &[i64]| -> Vec<usize> {
            ds.iter()
                .enumerate()
                .filter(|(_, &d)| d == deg)
                .map(|(i, _)| i)
                .collect()
        };
        let (si, mi, qi) = (pick(&sub.degs), pick(&mid.degs), pick(&quo.degs));
        let sl = |m: &Mat<FrameEl>, rows: &[usize], cols: &[usize]| {
            Mat::from_fn(rows.len(), cols.len(), |i, j| m.at(rows[i], cols[j]).clone())
        };
        let rf = residue_rank_frame(fr, &sl(&f.mat, &mi, &si));
        let rg = residue_rank_frame(fr, &sl(&g.mat, &qi, &mi));
        if rf != si.len() || rg != qi.len() || rf + rg != mi.len() {
            degree_ranks_ok = false;
            notes.push(format!(
                "degree {deg}: ranks f={rf}/{} g={rg}/{} middle={}",
                si.len(),
                qi.len(),
                mi.len()
            ));
        }
    }
    Ok(ExactReport {
        composite_zero,
        degree_ranks_ok,
        notes,
    })
}

/// The evaluation morphism `D tensor dual(D) -> unit`; returns the tensor
/// display and the morphism, which must pass [`check_morphism`].
pub fn eval_pairing_hom(d: &Display) -> Result<(Display, DisplayHom), DisplayError> {
    let fr = d.frame.as_ref();
    let n = d.rank();
    let (dd, dperm) = d.dual_with_perm()?;
    let (t, tperm) = d.tensor_with_perm(&dd)?;
    let mut mat = Mat::zero(fr, 1, n * n);
    for c in 0..n * n {
        let (i, l) = (tperm[c] / n, tperm[c] % n);
        if dperm[l] == i {
            mat.set(0, c, fr.one());
        }
    }
    let unit = super::unit_display(d.frame.clone());
    let hom = DisplayHom::from_plain(mat, &t, &unit);
    Ok((t, hom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displays::{make_display, random_display, unit_display};
    use crate::frames::{build_frame, FrameSpec, RingSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::rc::Rc;

    fn frames_under_test() -> Vec<Rc<dyn Frame>> {
        let taut = build_frame(&FrameSpec {
            kind: "tautological".into(),
            p: 3,
            m: 2,
            prec: 5,
            eta_len: 0,
            ring: RingSpec::Unramified,
        })
        .unwrap();
        let sw = build_frame(&FrameSpec {
            kind: "smallwitt".into(),
            p: 3,
            m: 1,
            prec: 2,
            eta_len: 4,
            ring: RingSpec::Monomial {
                nilp: vec![3],
                vanishing: vec![],
            },
        })
        .unwrap();
        vec![taut, sw]
    }

    #[test]
    fn identity_and_integer_scalars_are_morphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for fr in frames_under_test() {
            for degs in [vec![0, 1], vec![0, 1, 2]] {
                let d = random_display(fr.clone(), degs, &mut rng);
                let id = DisplayHom::identity(&d);
                assert!(check_morphism(&id, &d, &d).unwrap().pass());
                let two = id.mat.scale(fr.as_ref(), &fr.from_int(2));
                let h = DisplayHom::from_plain(two, &d, &d);
                assert!(check_morphism(&h, &d, &d).unwrap().pass());
            }
        }
    }

    #[test]
    fn checker_rejects_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for fr in frames_under_test() {
            let d = random_display(fr.clone(), vec![0, 1], &mut rng);
            let id = DisplayHom::identity(&d);
            for (i, j) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
                let delta = fr.random_unit(&mut rng);
                let bad = id.perturb_entry(fr.as_ref(), i, j, &delta);
                assert!(
                    !check_morphism(&bad, &d, &d).unwrap().pass(),
                    "perturbation at ({i},{j}) accepted over {}",
                    fr.name()
                );
            }
        }
    }

    #[test]
    fn witnessed_degree_drop_entries_check_out() {
        // Build phi' := G phi Sigma(G)^(-1) for a unipotent G with one
        // witnessed entry; the checker must accept G : (phi) -> (phi').
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for fr in frames_under_test() {
            let src = random_display(fr.clone(), vec![0, 1], &mut rng);
            let w = fr.witness_random(1, &mut rng);
            let x = fr.realize(&w).unwrap();
            let mut g = Mat::identity(fr.as_ref(), 2);
            g.set(0, 1, x);
            let mut sigma = Mat::identity(fr.as_ref(), 2);
            sigma.set(0, 1, fr.sigma_div(&w).unwrap());
            let phi2 = g
                .mul(fr.as_ref(), &src.phi)
                .mul(fr.as_ref(), &sigma.invert(fr.as_ref()).unwrap());
            let dst = make_display(fr.clone(), vec![0, 1], phi2).unwrap();
            let mut wit = BTreeMap::new();
            wit.insert((0usize, 1usize), w);
            let hom = DisplayHom { mat: g, wit };
            let rep = check_morphism(&hom, &src, &dst).unwrap();
            assert!(rep.pass(), "{:?} over {}", rep.notes, fr.name());
        }
    }

    #[test]
    fn evaluation_into_the_unit_display() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for fr in frames_under_test() {
            for degs in [vec![0, 1], vec![0, 2]] {
                let d = random_display(fr.clone(), degs, &mut rng);
                let (t, ev) = eval_pairing_hom(&d).unwrap();
                let unit = unit_display(fr.clone());
                let rep = check_morphism(&ev, &t, &unit).unwrap();
                assert!(rep.pass(), "{:?} over {}", rep.notes, fr.name());
            }
        }
    }

    #[test]
    fn split_sequences_are_exact_and_p_is_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for fr in frames_under_test() {
            let a = random_display(fr.clone(), vec![0, 1], &mut rng);
            let b = random_display(fr.clone(), vec![1, 2], &mut rng);
            let (s, inj1, _, _, proj2) = a.direct_sum_maps(&b).unwrap();
            let rep = check_exact(&inj1, &proj2, &a, &s, &b).unwrap();
            assert!(rep.pass(), "{:?}", rep.notes);

            // multiplication by p is injective but has non-free cokernel
            let pmap = DisplayHom::from_plain(
                Mat::identity(fr.as_ref(), 2).scale(fr.as_ref(), &fr.from_int(3)),
                &a,
                &a,
            );
            let trivial = make_display(fr.clone(), vec![], Mat::zero(fr.as_ref(), 0, 0)).unwrap();
            let zero_to = DisplayHom::from_plain(Mat::zero(fr.as_ref(), 0, 2), &a, &trivial);
            let rep = check_exact(&pmap, &zero_to, &a, &a, &trivial).unwrap();
            assert!(!rep.pass());
        }
    }
}

//! The individual certificate checks.
//!
//! Every check is pure: it rebuilds what it needs from the stored
//! certificate data and never re-runs the solver.  A check that trips an
//! internal error (a matrix that stopped being invertible, a transport that
//! no longer applies) fails honestly with the error in its notes rather
//! than aborting verification.

use super::connected::{cyclic_phi_int, frobenius_power_int};
use super::{stage_spec, LiftCertificate};
use crate::dieudonne::k3::expected_k3_slopes;
use crate::dieudonne::{reduce_slope, DieudonneModule, Slope};
use crate::displays::{
    check_exact, check_morphism, check_pairing, make_display, strong_divisibility_check, Display,
    DisplayHom, FilteredFModule,
};
use crate::frames::{
    build_frame, Frame, FrameEl, FrameMorphism, FrameSpec, RingSpec, SmallWittFrame,
    TautologicalFrame, Witness,
};
use crate::padic::{LocalRing, Mat, RingEl, RingError};
use std::collections::BTreeMap;
use std::rc::Rc;

/// One named pass/fail verdict with the precision it was checked at.
#[derive(Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub precision: u32,
    pub notes: Vec<String>,
}

fn record(name: &str, precision: u32, r: Result<(bool, Vec<String>), String>) -> CheckRecord {
    match r {
        Ok((pass, notes)) => CheckRecord { name: name.into(), pass, precision, notes },
        Err(e) => CheckRecord { name: name.into(), pass: false, precision, notes: vec![e] },
    }
}

fn err_str<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Rebuild a morphism from a stored matrix and its divided preimages.
/// Exponent-raising entries get their stored witness, zeros a zero witness;
/// anything else is left bare and fails the grading check downstream.
pub(crate) fn hom_from_parts(
    fr: &dyn Frame,
    mat: &Mat<FrameEl>,
    pres: &BTreeMap<(usize, usize), FrameEl>,
    src_degs: &[i64],
    dst_degs: &[i64],
) -> DisplayHom {
    let mut wit = BTreeMap::new();
    for (i, &di) in dst_degs.iter().enumerate() {
        for (j, &dj) in src_degs.iter().enumerate() {
            let tau = dj - di;
            if tau >= 1 {
                if let Some(pre) = pres.get(&(i, j)) {
                    wit.insert((i, j), Witness { pre: pre.clone(), s: tau as u32 });
                } else if fr.is_zero(mat.at(i, j)) {
                    wit.insert((i, j), fr.witness_zero(tau as u32));
                }
            }
        }
    }
    DisplayHom { mat: mat.clone(), wit }
}

fn bare_hom(mat: &Mat<FrameEl>) -> DisplayHom {
    DisplayHom { mat: mat.clone(), wit: BTreeMap::new() }
}

fn rebuild(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> Result<(Display, Display, Display), String> {
    let sub = make_display(fr.clone(), c.sub_degs.clone(), c.sub_phi.clone()).map_err(err_str)?;
    let k = make_display(fr.clone(), c.k_degs.clone(), c.k_phi.clone()).map_err(err_str)?;
    let quo = make_display(fr.clone(), c.quo_degs.clone(), c.quo_phi.clone()).map_err(err_str)?;
    Ok((sub, k, quo))
}

/// C1: the stored inclusion and projection form a short exact sequence of
/// displays, degreewise over the residue field.
pub(crate) fn check_c1(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> CheckRecord {
    let prec = c.problem.prec;
    record("exact-sequence", prec, (|| {
        let (sub, k, quo) = rebuild(c, fr)?;
        let f = bare_hom(&c.inj_sub);
        let g = bare_hom(&c.proj_quo);
        let rep = check_exact(&f, &g, &sub, &k, &quo).map_err(err_str)?;
        Ok((rep.pass(), rep.notes))
    })())
}

/// C2: the quotient inclusion splits the projection, and both legs are
/// morphisms of displays.
pub(crate) fn check_c2(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> CheckRecord {
    let prec = c.problem.prec;
    record("quotient-section", prec, (|| {
        let (_, k, quo) = rebuild(c, fr)?;
        let frd = fr.as_ref();
        let comp = c.proj_quo.mul(frd, &c.inj_quo);
        let mut notes = Vec::new();
        let split = comp.eq(frd, &Mat::identity(frd, quo.rank()));
        if !split {
            notes.push("projection times inclusion is not the identity".into());
        }
        let inj = hom_from_parts(frd, &c.inj_quo, &BTreeMap::new(), &c.quo_degs, &c.k_degs);
        let irep = check_morphism(&inj, &quo, &k).map_err(err_str)?;
        if !irep.pass() {
            notes.push(format!("inclusion leg: {:?}", irep.notes));
        }
        let prj = hom_from_parts(frd, &c.proj_quo, &BTreeMap::new(), &c.k_degs, &c.quo_degs);
        let prep = check_morphism(&prj, &k, &quo).map_err(err_str)?;
        if !prep.pass() {
            notes.push(format!("projection leg: {:?}", prep.notes));
        }
        Ok((split && irep.pass() && prep.pass(), notes))
    })())
}

/// C3: the stored filtration labels match the display exponents and single
/// out the expected one-dimensional top piece through the quotient.
pub(crate) fn check_c3(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> CheckRecord {
    let prec = c.problem.prec;
    record("hodge-labels", prec, (|| {
        let frd = fr.as_ref();
        let n = c.k_degs.len();
        let mut notes = Vec::new();
        let mut ok = true;
        if c.hodge_labels != c.k_degs {
            ok = false;
            notes.push("labels disagree with the display exponents".into());
        }
        let count = |v: &[i64], d: i64| v.iter().filter(|&&x| x == d).count();
        if count(&c.hodge_labels, 0) != 1
            || count(&c.hodge_labels, 1) != n - 2
            || count(&c.hodge_labels, 2) != 1
        {
            ok = false;
            notes.push(format!(
                "label profile is not (1, {}, 1): {:?}",
                n - 2,
                c.hodge_labels
            ));
        }
        if c.sub_degs.iter().any(|&d| d >= 2) {
            ok = false;
            notes.push("sub-display reaches filtration level two".into());
        }
        if count(&c.quo_degs, 2) != 1 {
            ok = false;
            notes.push("quotient does not carry exactly one level-two line".into());
        }
        // the level-two line must map to the quotient's level-two line by a unit
        if let Some(c2) = c.hodge_labels.iter().position(|&d| d == 2) {
            let col = c2;
            let mut hits = Vec::new();
            for r in 0..c.quo_degs.len() {
                if !frd.is_zero(c.proj_quo.at(r, col)) {
                    hits.push(r);
                }
            }
            let good = hits.len() == 1
                && c.quo_degs[hits[0]] == 2
                && frd.is_unit(c.proj_quo.at(hits[0], col));
            if !good {
                ok = false;
                notes.push("top filtration line does not project isomorphically".into());
            }
        } else {
            ok = false;
        }
        Ok((ok, notes))
    })())
}

/// C4: the pairing is symmetric, perfect, compatible with F, and the stored
/// similitude is a morphism scaling it by the prescribed p-power.
pub(crate) fn check_c4(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> CheckRecord {
    let prec = c.problem.prec;
    record("pairing-similitude", prec, (|| {
        let (_, k, _) = rebuild(c, fr)?;
        let frd = fr.as_ref();
        let mut notes = Vec::new();
        let prep = check_pairing(&k, &c.gram).map_err(err_str)?;
        if !prep.pass() {
            notes.push(format!("pairing: {:?}", prep.notes));
        }
        let psi = hom_from_parts(frd, &c.psi_mat, &c.psi_pres, &c.k_degs, &c.k_degs);
        let mrep = check_morphism(&psi, &k, &k).map_err(err_str)?;
        if !mrep.pass() {
            notes.push(format!("similitude is not a morphism: {:?}", mrep.notes));
        }
        let lhs = c.psi_mat.transpose().mul(frd, &c.gram).mul(frd, &c.psi_mat);
        let rhs = c.gram.scale(frd, &fr.p_power(c.manifest.similitude_exponent));
        let simil = lhs.eq(frd, &rhs);
        if !simil {
            notes.push(format!(
                "similitude multiplier is not p^{}",
                c.manifest.similitude_exponent
            ));
        }
        Ok((prep.pass() && mrep.pass() && simil, notes))
    })())
}

/// w-parts of a structure matrix, transported into an unramified model.
pub(crate) fn wpart_matrix(
    fr: &dyn Frame,
    mat: &Mat<FrameEl>,
    dst: &LocalRing,
) -> Result<Mat<RingEl>, RingError> {
    if let Some(sf) = fr.as_any().downcast_ref::<SmallWittFrame>() {
        mat.try_map_to(|e| sf.cx.wk.transport(dst, &e.as_sw().w, false))
    } else if let Some(tf) = fr.as_any().downcast_ref::<TautologicalFrame>() {
        mat.try_map_to(|e| tf.ring.transport(dst, e.as_ring(), false))
    } else {
        Err(RingError::Shape("unknown frame kind".into()))
    }
}

/// C5: the unramified avatar of the ambient display is strongly divisible
/// for the stored filtration, with the expected degree profile.
pub(crate) fn check_c5(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> CheckRecord {
    record("strong-divisibility", c.avatar_prec, (|| {
        let p = c.problem.p;
        let m = c.problem.m;
        let ring = LocalRing::unramified(p, m, c.avatar_prec).map_err(err_str)?;
        let mut notes = Vec::new();
        // the stored avatar must be the w-part of the ambient display
        let w = wpart_matrix(fr.as_ref(), &c.k_phi, &ring).map_err(err_str)?;
        let dp = Mat::from_fn(c.k_degs.len(), c.k_degs.len(), |i, j| {
            if i == j {
                let mut e = ring.one();
                for _ in 0..c.k_degs[i] {
                    e = ring.mul_pow_p(&e, 1);
                }
                e
            } else {
                ring.zero()
            }
        });
        let expect = w.mul(&ring, &dp);
        let consistent = expect.eq(&ring, &c.avatar_fmat);
        if !consistent {
            notes.push("stored avatar differs from the ambient reduction".into());
        }
        let fm = FilteredFModule::new(&ring, c.avatar_fmat.clone(), c.avatar_steps.clone())
            .map_err(err_str)?;
        let taut: Rc<dyn Frame> = build_frame(&FrameSpec {
            kind: "tautological".into(),
            p,
            m,
            prec: c.avatar_prec,
            eta_len: 0,
            ring: RingSpec::Unramified,
        })
        .map_err(err_str)?;
        let rep = strong_divisibility_check(&fm, taut).map_err(err_str)?;
        if !rep.pass() {
            notes.push(format!("divisibility: {:?} {:?}", rep.divisible, rep.notes));
        }
        let mut profile_ok = false;
        if let Some(d) = &rep.display {
            let prof = d.reduction_profile().map_err(err_str)?;
            let n = c.k_degs.len();
            profile_ok = prof == vec![(0, 1), (1, n - 2), (2, 1)];
            if !profile_ok {
                notes.push(format!("avatar profile {prof:?}"));
            }
        } else if rep.pass() {
            notes.push("no adapted display produced".into());
        }
        Ok((consistent && rep.pass() && profile_ok, notes))
    })())
}

/// C6: the per-stage records cohere: each stage is a display with an exact
/// endomorphism, adjacent stages are reductions of one another, the top
/// stage is the certified lift, and the lowest stage reduces to the integer
/// seed over the residue Witt model.
pub(crate) fn check_c6(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> CheckRecord {
    let prec = c.problem.prec;
    record("tower-coherence", prec, (|| {
        let p = c.problem.p;
        let m = c.problem.m;
        let h = c.problem.h;
        let mut notes = Vec::new();
        let mut ok = true;
        if c.stages.is_empty() {
            return Ok((false, vec!["no stage records".into()]));
        }
        let mut frames: Vec<Rc<dyn Frame>> = Vec::new();
        for st in &c.stages {
            frames.push(build_frame(&stage_spec(&c.frame_spec, st.quot)).map_err(err_str)?);
        }
        for (st, sfr) in c.stages.iter().zip(frames.iter()) {
            let g = make_display(sfr.clone(), c.g_degs.clone(), st.g_phi.clone())
                .map_err(|e| format!("stage {}: {e}", st.quot))?;
            let endo = hom_from_parts(sfr.as_ref(), &st.endo_mat, &st.endo_pres, &c.g_degs, &c.g_degs);
            let rep = check_morphism(&endo, &g, &g).map_err(err_str)?;
            if !rep.pass() {
                ok = false;
                notes.push(format!("stage {}: endomorphism fails: {:?}", st.quot, rep.notes));
            }
            make_display(sfr.clone(), c.k_degs.clone(), st.k_phi.clone())
                .map_err(|e| format!("stage {}: ambient: {e}", st.quot))?;
        }
        // adjacent stages glue along the reduction maps
        for i in 0..c.stages.len() - 1 {
            let up = &c.stages[i + 1];
            let dn = &c.stages[i];
            let red = FrameMorphism::reduction(frames[i + 1].clone(), frames[i].clone())
                .map_err(err_str)?;
            let down = |mat: &Mat<FrameEl>| mat.try_map(|e| red.apply(e));
            let frd = frames[i].as_ref();
            if !down(&up.g_phi).map_err(err_str)?.eq(frd, &dn.g_phi)
                || !down(&up.endo_mat).map_err(err_str)?.eq(frd, &dn.endo_mat)
                || !down(&up.k_phi).map_err(err_str)?.eq(frd, &dn.k_phi)
            {
                ok = false;
                notes.push(format!("stages {} -> {} do not glue", up.quot, dn.quot));
            }
            for (key, pre) in &up.endo_pres {
                let moved = red.apply(pre).map_err(err_str)?;
                match dn.endo_pres.get(key) {
                    Some(dpre) if frd.eq(&moved, dpre) => {}
                    _ => {
                        ok = false;
                        notes.push(format!(
                            "witness {key:?} does not glue between stages {} and {}",
                            up.quot, dn.quot
                        ));
                    }
                }
            }
        }
        // top stage is the certified lift itself
        let top = c.stages.last().unwrap();
        let frd = fr.as_ref();
        if top.quot != c.problem.n + 1
            || !top.g_phi.eq(frd, &c.g_phi)
            || !top.endo_mat.eq(frd, &c.endo_mat)
            || !top.k_phi.eq(frd, &c.k_phi)
        {
            ok = false;
            notes.push("top stage disagrees with the certificate".into());
        }
        // lowest stage reduces to the integer seed over W(k)
        let taut: Rc<dyn Frame> = build_frame(&FrameSpec {
            kind: "tautological".into(),
            p,
            m,
            prec: c.problem.prec,
            eta_len: 0,
            ring: RingSpec::Unramified,
        })
        .map_err(err_str)?;
        let base = FrameMorphism::to_base(frames[0].clone(), taut.clone()).map_err(err_str)?;
        let frt = taut.as_ref();
        let hs = h as usize;
        let cyc = cyclic_phi_int(h);
        let fm = frobenius_power_int(h, p, m);
        let want_g = Mat::from_fn(hs, hs, |i, j| frt.from_int(cyc[i][j]));
        let want_e = Mat::from_fn(hs, hs, |i, j| frt.from_int(fm[i][j]));
        let got_g = c.stages[0].g_phi.try_map(|e| base.apply(e)).map_err(err_str)?;
        let got_e = c.stages[0].endo_mat.try_map(|e| base.apply(e)).map_err(err_str)?;
        if !got_g.eq(frt, &want_g) || !got_e.eq(frt, &want_e) {
            ok = false;
            notes.push("lowest stage does not reduce to the integer seed".into());
        }
        Ok((ok, notes))
    })())
}

fn slope_sort(v: &mut [Slope]) {
    v.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
}

/// Slope multiset of the ambient module, computed blockwise: honest Newton
/// slopes of the connected block over an unramified model of sufficient
/// precision, unit slopes for the (invertible) middle, and the `2 - lambda`
/// mirror for the dual block.
pub(crate) fn blockwise_slopes(
    fr: &dyn Frame,
    g_phi: &Mat<FrameEl>,
    g_degs: &[i64],
    h_phi: &Mat<FrameEl>,
    p: u64,
    m: usize,
    h: u32,
) -> Result<Vec<Slope>, String> {
    let sprec = ((m as u32) * h + 2).max(3);
    let sring = LocalRing::unramified(p, m, sprec).map_err(err_str)?;
    let hs = h as usize;
    let w = wpart_matrix(fr, g_phi, &sring).map_err(err_str)?;
    let dp = Mat::from_fn(hs, hs, |i, j| {
        if i == j {
            let mut e = sring.one();
            for _ in 0..g_degs[i] {
                e = sring.mul_pow_p(&e, 1);
            }
            e
        } else {
            sring.zero()
        }
    });
    let dm = DieudonneModule::new(&sring, w.mul(&sring, &dp)).map_err(err_str)?;
    let conn = dm.newton_slopes().map_err(err_str)?;
    let mut slopes = conn.clone();
    // middle block: the halved operator is invertible, so every slope is one
    let small = LocalRing::unramified(p, m, 2).map_err(err_str)?;
    let hw = wpart_matrix(fr, h_phi, &small).map_err(err_str)?;
    if !hw.is_invertible(&small) {
        return Err("middle block is not invertible over the residue Witt model".into());
    }
    slopes.extend(std::iter::repeat((1, 1)).take(h_phi.rows));
    // dual block mirrors the connected block at 2 - lambda
    slopes.extend(conn.iter().map(|&(n, d)| reduce_slope(2 * d - n, d)));
    slope_sort(&mut slopes);
    Ok(slopes)
}

/// Blockwise slope multiset of the certified ambient module, compared
/// against the stored claim and the expected pattern.
pub(crate) fn check_slopes(c: &LiftCertificate, fr: &Rc<dyn Frame>) -> CheckRecord {
    let p = c.problem.p;
    let m = c.problem.m;
    let h = c.problem.h;
    let sprec = (m as u32) * h + 2;
    record("newton-slopes", sprec, (|| {
        let mut notes = Vec::new();
        let slopes =
            blockwise_slopes(fr.as_ref(), &c.g_phi, &c.g_degs, &c.h_phi, p, m, h)?;
        let mut claimed = c.slopes.clone();
        slope_sort(&mut claimed);
        let mut expected = expected_k3_slopes(h);
        slope_sort(&mut expected);
        let match_claim = slopes == claimed;
        let match_expected = slopes == expected;
        if !match_claim {
            notes.push(format!("computed {slopes:?} differs from stored {claimed:?}"));
        }
        if !match_expected {
            notes.push(format!("computed {slopes:?} differs from expected {expected:?}"));
        }
        Ok((match_claim && match_expected, notes))
    })())
}

/// The stored rigidity probe outcome as a record.
pub(crate) fn check_probe(c: &LiftCertificate) -> CheckRecord {
    let mut notes = vec![format!("converged after {} iterations", c.probe.iterations)];
    if !c.probe.attempted {
        notes.push("probe was not attempted".into());
    }
    CheckRecord {
        name: "rigidity-probe".into(),
        pass: c.probe.pass(),
        precision: c.problem.prec,
        notes,
    }
}

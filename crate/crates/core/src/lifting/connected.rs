//! Lifting the connected block together with its Frobenius endomorphism.
//!
//! Over an Artin quotient `R = V/pi^q` the pair (structure matrix, twisted
//! endomorphism) exists in closed form.  On `W(R)[T]/(T^h - p)` the basis
//! `e, Te - [pi]e, ..., T^(h-1)e - [pi^(h-1)]e` is adapted to the exponent
//! filtration and stable under multiplication by `T`, so `T` induces an
//! exact display endomorphism `tau` with `tau^h = p`.  The Frobenius
//! endomorphism is `tau^(m(h-1))`; it reduces to the integer seed power over
//! the residue Witt model, and `p^(m + m/h) tau^(m mod h)` transposed
//! inverts it up to `p^(2m)`, which the dual block of the ambient lattice
//! consumes as is.  Every entry is an integer combination of Teichmueller
//! powers of the uniformizer — no division, no approximation — provided
//! `pi^(ph)` vanishes in `R`, i.e. `q <= ph`.

use super::LiftError;
use crate::displays::{check_morphism, make_display, Display, DisplayHom};
use crate::frames::{Frame, FrameEl, SmallWittFrame, Witness};
use crate::padic::Mat;
use crate::witt::small::SwCtx;
use std::collections::BTreeMap;
use std::rc::Rc;

/// A lifted connected block: display, Frobenius endomorphism with the
/// divided preimages behind its witnessed entries, the uniformizer action,
/// and the transposed companion consumed by the dual block.
pub struct ConnectedLift {
    pub display: Display,
    pub endo: DisplayHom,
    pub pres: BTreeMap<(usize, usize), FrameEl>,
    /// multiplication by the uniformizer; `tau^h = p` exactly
    pub tau: Mat<FrameEl>,
    /// `p^(m + m/h) tau^(m mod h)` transposed; `endo^T * dual_endo = p^(2m)`
    pub dual_endo: Mat<FrameEl>,
}

/// Exponent sequence of the connected block: one `0`, then `h - 1` ones.
pub fn formal_degs(h: u32) -> Vec<i64> {
    let mut d = vec![0i64];
    d.extend(std::iter::repeat(1).take(h as usize - 1));
    d
}

/// Structure matrix of the connected block in the adapted basis: a cyclic
/// permutation (all p-powers divided out into the exponents).
pub fn cyclic_phi_int(h: u32) -> Vec<Vec<i64>> {
    let hs = h as usize;
    let mut phi = vec![vec![0i64; hs]; hs];
    for j in 0..hs {
        phi[(j + 1) % hs][j] = 1;
    }
    phi
}

fn int_matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// The undivided operator matrix `A = Phi * diag(p^deg)` raised to the m-th
/// power.  All entries are p-powers, so every twist acts trivially and the
/// result commutes with `A` on the nose.
pub fn frobenius_power_int(h: u32, p: u64, m: usize) -> Vec<Vec<i64>> {
    let hs = h as usize;
    let degs = formal_degs(h);
    let phi = cyclic_phi_int(h);
    let mut a = vec![vec![0i64; hs]; hs];
    for i in 0..hs {
        for j in 0..hs {
            a[i][j] = phi[i][j] * (p as i64).pow(degs[j] as u32);
        }
    }
    let mut acc = vec![vec![0i64; hs]; hs];
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = 1;
    }
    for _ in 0..m {
        acc = int_matmul(&acc, &a);
    }
    acc
}

/// The integer seed as a display over any frame.
pub fn lift_formal_group(frame: &Rc<dyn Frame>, h: u32) -> Result<Display, LiftError> {
    if h == 0 {
        return Err(LiftError::BadProblem("height must be positive".into()));
    }
    let ints = cyclic_phi_int(h);
    let hs = h as usize;
    let phi = Mat::from_fn(hs, hs, |i, j| frame.from_int(ints[i][j]));
    Ok(make_display(frame.clone(), formal_degs(h), phi)?)
}

fn sw_ctx(frame: &dyn Frame) -> Result<&SwCtx, LiftError> {
    frame
        .as_any()
        .downcast_ref::<SmallWittFrame>()
        .map(|f| &f.cx)
        .ok_or_else(|| LiftError::Internal("connected lifting needs a split-Witt frame".into()))
}

/// Teichmueller powers `[pi^0], ..., [pi^max]` of the uniformizer.
fn teich_powers(cx: &SwCtx, max: u32) -> Result<Vec<FrameEl>, LiftError> {
    let pi = cx.ring.gen_pi()?;
    let mut out = Vec::with_capacity(max as usize + 1);
    for k in 0..=max {
        out.push(FrameEl::SmallWitt(cx.teich(&cx.ring.pow_u(&pi, k as u64))?));
    }
    Ok(out)
}

/// Structure matrix in the adapted basis.  Column 0 is the Frobenius image
/// of the exponent-zero vector; column `l >= 1` is the exact V-division of
/// the vector it carries.  Writing `x = [pi]`, the entries are
///
/// ```text
/// phi[0][l] = sum_(s=0)^(h-l-1) x^(p(h-l-1-s)+s)      (l = 0 included)
/// phi[k][0] = x^(p(k-1))                               k >= 1
/// phi[k][l] = x^(p(k-l-1))                             k >= l+1 >= 2
/// ```
///
/// and zero elsewhere; the reduction `x -> 0` is the cyclic permutation.
fn closed_phi(
    fr: &(dyn Frame + 'static),
    xs: &[FrameEl],
    p: u64,
    h: u32,
) -> Result<Mat<FrameEl>, LiftError> {
    let hs = h as usize;
    let pu = p as usize;
    let mut phi = Mat::from_fn(hs, hs, |_, _| fr.zero());
    for l in 0..hs {
        for k in 0..hs {
            let e = if k == 0 {
                let mut acc = fr.zero();
                for s in 0..hs - l {
                    acc = fr.add(&acc, &xs[pu * (hs - l - 1 - s) + s])?;
                }
                acc
            } else if l == 0 {
                xs[pu * (k - 1)].clone()
            } else if k >= l + 1 {
                xs[pu * (k - l - 1)].clone()
            } else {
                fr.zero()
            };
            phi.set(k, l, e);
        }
    }
    Ok(phi)
}

/// Matrix of multiplication by `T` in the adapted basis.  Entry `(0, 1)` is
/// `p - x^h`, which lies in the V-ideal on the nose; every other entry is a
/// signed Teichmueller power or zero.
fn uniformizer_action(
    fr: &(dyn Frame + 'static),
    xs: &[FrameEl],
    h: u32,
) -> Result<Mat<FrameEl>, LiftError> {
    let hs = h as usize;
    let mut tau = Mat::from_fn(hs, hs, |_, _| fr.zero());
    if hs == 1 {
        tau.set(0, 0, fr.p_power(1));
        return Ok(tau);
    }
    tau.set(0, 0, xs[1].clone());
    tau.set(hs - 1, 0, fr.one());
    tau.set(0, 1, fr.add(&fr.p_power(1), &fr.neg(&xs[hs]))?);
    tau.set(hs - 1, 1, fr.neg(&xs[hs - 1]));
    for l in 2..hs {
        tau.set(l - 1, l, fr.one());
        tau.set(hs - 1, l, fr.neg(&xs[hs - l]));
    }
    Ok(tau)
}

fn mat_pow(fr: &(dyn Frame + 'static), a: &Mat<FrameEl>, e: u32) -> Mat<FrameEl> {
    let mut acc = Mat::identity(fr, a.rows);
    for _ in 0..e {
        acc = acc.mul(fr, a);
    }
    acc
}

/// Witnesses for the exponent-drop-one positions (row 0, columns `>= 1` in
/// the adapted grading): a zero witness where the entry vanishes, an exact
/// divided preimage everywhere else.
fn drop_one_witnesses(
    fr: &(dyn Frame + 'static),
    mat: &Mat<FrameEl>,
) -> Result<(BTreeMap<(usize, usize), Witness>, BTreeMap<(usize, usize), FrameEl>), LiftError> {
    let mut wit = BTreeMap::new();
    let mut pres = BTreeMap::new();
    for l in 1..mat.cols {
        let e = mat.at(0, l);
        if fr.is_zero(e) {
            wit.insert((0, l), fr.witness_zero(1));
        } else {
            let w = fr.witness_solve(e, 1).ok_or_else(|| {
                LiftError::Internal(format!("entry (0, {l}) has no exact divided preimage"))
            })?;
            pres.insert((0, l), w.pre.clone());
            wit.insert((0, l), w);
        }
    }
    Ok((wit, pres))
}

fn certified_endo(
    fr: &(dyn Frame + 'static),
    display: &Display,
    mat: &Mat<FrameEl>,
    what: &str,
) -> Result<(DisplayHom, BTreeMap<(usize, usize), FrameEl>), LiftError> {
    let (wit, pres) = drop_one_witnesses(fr, mat)?;
    let hom = DisplayHom { mat: mat.clone(), wit };
    let rep = check_morphism(&hom, display, display)?;
    if !rep.pass() {
        return Err(LiftError::Internal(format!(
            "{what} fails its own morphism check: {:?}",
            rep.notes
        )));
    }
    Ok((hom, pres))
}

/// Lift the connected block and its Frobenius endomorphism over a split-Witt
/// frame whose base is `V/pi^q` with the Eisenstein unit one.  Closed form:
/// the result is exactly equivariant — the defect is zero on the nose, not
/// merely small — and the returned companion satisfies
/// `endo^T * dual_endo = p^(2m)` exactly.
pub fn lift_frobenius_endo(frame: &Rc<dyn Frame>, h: u32) -> Result<ConnectedLift, LiftError> {
    if h == 0 {
        return Err(LiftError::BadProblem("height must be positive".into()));
    }
    let cx = sw_ctx(frame.as_ref())?;
    let (quot, teich_unit) = match &frame.spec().ring {
        crate::frames::RingSpec::Eisenstein { quot: Some(q), teich_unit, .. } => (*q, *teich_unit),
        _ => {
            return Err(LiftError::Internal(
                "connected lifting needs an Eisenstein Artin quotient base".into(),
            ))
        }
    };
    if teich_unit {
        return Err(LiftError::BadProblem(
            "the adapted basis needs the Eisenstein unit normalized to one".into(),
        ));
    }
    if quot < h {
        return Err(LiftError::BadProblem(format!(
            "quotient exponent {quot} keeps no room for height {h}; need at least {h}"
        )));
    }
    let p = frame.p();
    if h >= 2 && quot as u64 > p * h as u64 {
        return Err(LiftError::BadProblem(format!(
            "quotient exponent {quot} exceeds p*h = {}; pi^(ph) must vanish in the base",
            p * h as u64
        )));
    }
    let m = cx.ring.m;
    let hs = h as usize;
    let frd: &(dyn Frame + 'static) = frame.as_ref();

    let max_pow = ((p as u32) * (h - 1)).max(h);
    let xs = teich_powers(cx, max_pow)?;

    let phi = closed_phi(frd, &xs, p, h)?;
    let display = make_display(frame.clone(), formal_degs(h), phi)?;

    // the uniformizer action is itself an exact endomorphism, with tau^h = p
    let tau = uniformizer_action(frd, &xs, h)?;
    certified_endo(frd, &display, &tau, "the uniformizer action")?;
    let p_id = Mat::identity(frd, hs).scale(frd, &frd.p_power(1));
    if !mat_pow(frd, &tau, h).eq(frd, &p_id) {
        return Err(LiftError::Internal(
            "the uniformizer action does not raise to p times the identity".into(),
        ));
    }

    // Frobenius endomorphism and its transposed companion
    let psi = mat_pow(frd, &tau, m as u32 * (h - 1));
    let (endo, pres) = certified_endo(frd, &display, &psi, "the lifted endomorphism")?;
    let mm = m as u32;
    let dual_endo = mat_pow(frd, &tau, mm % h)
        .scale(frd, &frd.p_power(mm + mm / h))
        .transpose();
    let want = Mat::identity(frd, hs).scale(frd, &frd.p_power(2 * mm));
    if !psi.transpose().mul(frd, &dual_endo).eq(frd, &want) {
        return Err(LiftError::Internal(
            "the companion fails the p^(2m) inversion identity".into(),
        ));
    }

    Ok(ConnectedLift { display, endo, pres, tau, dual_endo })
}

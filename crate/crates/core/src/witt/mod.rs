//! Truncated Witt vectors with values in a local coefficient ring.
//!
//! A length-`n` Witt vector is a plain `Vec<RingEl>` of digits. All ring
//! operations go through ghost coordinates, which is only valid in a
//! p-torsion-free ring: callers compute in a quotient-free cover of their
//! working ring and project digits back at the end (digit formulas are
//! universal integer polynomials, so the projection commutes with
//! everything).
//!
//! Precision bookkeeping is automatic via `RingEl::prec`. The key invariant:
//! if every input digit is known mod `p^e`, ghost `i` comes out mod
//! `p^(e+i)` (each term gains `i-j` from p-th powers and `j` from the
//! explicit `p^j` factor), and after the recursion divides by `p^i` every
//! output digit is again known mod `p^e`. The section digits of
//! [`delta_digits`] instead decay one step per index, which is the true
//! information content: digit `i` of the canonical section depends on its
//! argument only mod `p^(e-i)`... callers compensate by carrying the
//! argument at cover precision.

pub mod small;
pub mod universal;

use crate::padic::{LocalRing, RingEl, RingError};

/// Ghost coordinates `g_i = sum_{j<=i} p^j x_j^{p^(i-j)}`.
pub fn ghost_all(ring: &LocalRing, x: &[RingEl]) -> Vec<RingEl> {
    let n = x.len();
    let mut pw: Vec<RingEl> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        for p in pw.iter_mut() {
            *p = ring.pow_p(p);
        }
        pw.push(x[i].clone());
        let mut g = ring.mul_pow_p(&pw[i], i as u32);
        for (j, p) in pw.iter().enumerate().take(i) {
            g = ring.add(&g, &ring.mul_pow_p(p, j as u32));
        }
        out.push(g);
    }
    out
}

/// Inverts [`ghost_all`]: reconstructs digits from ghost coordinates.
/// Every division must be exact; a failure means the ghosts did not come
/// from an actual Witt vector (or precision ran out).
pub fn from_ghosts(ring: &LocalRing, g: &[RingEl]) -> Result<Vec<RingEl>, RingError> {
    let n = g.len();
    let mut w: Vec<RingEl> = Vec::with_capacity(n);
    let mut pw: Vec<RingEl> = Vec::with_capacity(n);
    for i in 0..n {
        for p in pw.iter_mut() {
            *p = ring.pow_p(p);
        }
        let mut t = g[i].clone();
        for (j, p) in pw.iter().enumerate() {
            t = ring.sub(&t, &ring.mul_pow_p(p, j as u32));
        }
        let wi = ring.divide_p(&t, i as u32)?;
        pw.push(wi.clone());
        w.push(wi);
    }
    Ok(w)
}

fn zip_ghost(
    ring: &LocalRing,
    x: &[RingEl],
    y: &[RingEl],
    f: impl Fn(&RingEl, &RingEl) -> RingEl,
) -> Result<Vec<RingEl>, RingError> {
    let n = x.len().min(y.len());
    let gx = ghost_all(ring, &x[..n]);
    let gy = ghost_all(ring, &y[..n]);
    let g: Vec<RingEl> = gx.iter().zip(&gy).map(|(a, b)| f(a, b)).collect();
    from_ghosts(ring, &g)
}

/// Witt sum, truncated to the shorter operand.
pub fn wadd(ring: &LocalRing, x: &[RingEl], y: &[RingEl]) -> Result<Vec<RingEl>, RingError> {
    zip_ghost(ring, x, y, |a, b| ring.add(a, b))
}

/// Witt product, truncated to the shorter operand.
pub fn wmul(ring: &LocalRing, x: &[RingEl], y: &[RingEl]) -> Result<Vec<RingEl>, RingError> {
    zip_ghost(ring, x, y, |a, b| ring.mul(a, b))
}

/// Witt negation; coordinatewise because `p` is odd.
pub fn wneg(ring: &LocalRing, x: &[RingEl]) -> Vec<RingEl> {
    x.iter().map(|d| ring.neg(d)).collect()
}

pub fn wsub(ring: &LocalRing, x: &[RingEl], y: &[RingEl]) -> Result<Vec<RingEl>, RingError> {
    zip_ghost(ring, x, y, |a, b| ring.sub(a, b))
}

/// Frobenius: the unique operator with `ghost_i(F x) = ghost_(i+1)(x)`.
/// Output is one digit shorter.
pub fn wfrob(ring: &LocalRing, x: &[RingEl]) -> Result<Vec<RingEl>, RingError> {
    if x.is_empty() {
        return Ok(Vec::new());
    }
    let g = ghost_all(ring, x);
    from_ghosts(ring, &g[1..])
}

/// Verschiebung: shift digits up. Output is one digit longer; callers
/// truncate as needed.
pub fn wver(ring: &LocalRing, x: &[RingEl]) -> Vec<RingEl> {
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(ring.zero());
    out.extend_from_slice(x);
    out
}

/// Teichmueller digits `(r, 0, ..., 0)`.
pub fn wteich(ring: &LocalRing, r: &RingEl, len: usize) -> Vec<RingEl> {
    let mut out = vec![ring.zero(); len];
    if len > 0 {
        out[0] = r.clone();
    }
    out
}

/// The integer `n` as a Witt vector: constant ghost coordinates `(n,...,n)`.
pub fn wint(ring: &LocalRing, n: i64, len: usize) -> Result<Vec<RingEl>, RingError> {
    let g: Vec<RingEl> = (0..len).map(|_| ring.from_i64(n)).collect();
    from_ghosts(ring, &g)
}

pub fn wis_zero(ring: &LocalRing, x: &[RingEl]) -> bool {
    x.iter().all(|d| ring.is_zero(d))
}

/// Digit-wise equality on the common length.
pub fn weq(ring: &LocalRing, x: &[RingEl], y: &[RingEl]) -> bool {
    let n = x.len().min(y.len());
    x[..n].iter().zip(&y[..n]).all(|(a, b)| ring.eq(a, b))
}

// ---- conversions between the polynomial model of W(k) and Witt digits ----

/// Peels the digits of a polynomial-model element of `W(k)`:
/// `a = sum p^i sigma^(-i)([a_i])`. Requires `len <= a.prec`.
pub fn model_to_kdigits(
    wk: &LocalRing,
    a: &RingEl,
    len: usize,
) -> Result<Vec<Vec<u64>>, RingError> {
    let mut out = Vec::with_capacity(len);
    let mut y = a.clone();
    for i in 0..len {
        let r = wk.residue(&y);
        out.push(r.clone());
        if i + 1 < len {
            let t = wk.teichmuller(&r)?;
            y = wk.sigma(&wk.divide_p(&wk.sub(&y, &t), 1)?)?;
        }
    }
    Ok(out)
}

/// Inverse of [`model_to_kdigits`]: rebuilds `sum p^i sigma^(-i)([a_i])`.
pub fn kdigits_to_model(wk: &LocalRing, digits: &[Vec<u64>]) -> Result<RingEl, RingError> {
    let mut acc = wk.zero();
    for (i, d) in digits.iter().enumerate() {
        if wk.k_is_zero(d) {
            continue;
        }
        let t = wk.sigma_pow(&wk.teichmuller(d)?, -(i as i64))?;
        acc = wk.add(&acc, &wk.mul_pow_p(&t, i as u32));
    }
    Ok(acc)
}

/// Digits of the canonical multiplicative section `W(k) -> W(R)` applied to
/// `a`, characterized by `ghost_i = sigma^i(a)`. Computed entirely inside
/// the polynomial model; callers embed the digits wherever needed. Digit `i`
/// comes out with precision `a.prec - i`.
pub fn delta_digits(wk: &LocalRing, a: &RingEl, len: usize) -> Result<Vec<RingEl>, RingError> {
    let mut d: Vec<RingEl> = Vec::with_capacity(len);
    let mut pw: Vec<RingEl> = Vec::with_capacity(len);
    let mut si = a.clone();
    for i in 0..len {
        if i > 0 {
            si = wk.sigma(&si)?;
        }
        for p in pw.iter_mut() {
            *p = wk.pow_p(p);
        }
        let mut t = si.clone();
        for (j, p) in pw.iter().enumerate() {
            t = wk.sub(&t, &wk.mul_pow_p(p, j as u32));
        }
        let di = wk.divide_p(&t, i as u32)?;
        pw.push(di.clone());
        d.push(di);
    }
    Ok(d)
}

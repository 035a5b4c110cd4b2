//! Universal addition and multiplication polynomials for Witt vectors,
//! computed symbolically over the integers.
//!
//! This is deliberately a second, independent route to Witt arithmetic: the
//! runtime path works with ghost values in a torsion-free cover, while here
//! the ghost recursion runs on sparse integer polynomials and the exactness
//! of every division is checked on coefficients. Only small lengths are
//! practical (the tests use length 3), which is all an oracle needs.
//!
//! Variables `0..n` are the digits of the first operand, `n..2n` of the
//! second.

use crate::padic::{LocalRing, RingEl};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Sparse polynomial: exponent vector (length `2n`) -> coefficient.
pub type Poly = BTreeMap<Vec<u32>, BigInt>;

fn bpow(p: u64, e: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for _ in 0..e {
        acc *= p;
    }
    acc
}

fn pvar(nv: usize, i: usize, e: u32) -> Poly {
    let mut key = vec![0u32; nv];
    key[i] = e;
    let mut m = BTreeMap::new();
    m.insert(key, BigInt::from(1));
    m
}

fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(k.clone()).or_insert_with(BigInt::zero);
        *e += v;
        if e.is_zero() {
            out.remove(k);
        }
    }
    out
}

fn pneg(a: &Poly) -> Poly {
    a.iter().map(|(k, v)| (k.clone(), -v)).collect()
}

fn pscale(a: &Poly, c: &BigInt) -> Poly {
    if c.is_zero() {
        return Poly::new();
    }
    a.iter().map(|(k, v)| (k.clone(), v * c)).collect()
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let key: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            let e = out.entry(key).or_insert_with(BigInt::zero);
            *e += va * vb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn ppow(a: &Poly, e: u32) -> Poly {
    let nv = a.keys().next().map(|k| k.len()).unwrap_or(0);
    let mut acc = {
        let mut m = BTreeMap::new();
        m.insert(vec![0u32; nv], BigInt::from(1));
        m
    };
    let mut base = a.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = pmul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = pmul(&base, &base);
        }
    }
    acc
}

fn pdiv_exact(a: &Poly, d: &BigInt) -> Poly {
    a.iter()
        .map(|(k, v)| {
            let (q, r) = (v / d, v % d);
            assert!(r.is_zero(), "inexact coefficient division in Witt recursion");
            (k.clone(), q)
        })
        .collect()
}

/// Ghost polynomial `g_i` in the variable block starting at `base`.
fn ghost(nv: usize, base: usize, i: usize, p: u64) -> Poly {
    let mut g = Poly::new();
    for j in 0..=i {
        let power = (p as u128).pow((i - j) as u32);
        let mon = pvar(nv, base + j, power as u32);
        g = padd(&g, &pscale(&mon, &bpow(p, j as u32)));
    }
    g
}

fn witt_polys(p: u64, n: usize, product: bool) -> Vec<Poly> {
    let nv = 2 * n;
    let mut out: Vec<Poly> = Vec::with_capacity(n);
    for i in 0..n {
        let gx = ghost(nv, 0, i, p);
        let gy = ghost(nv, n, i, p);
        let mut t = if product { pmul(&gx, &gy) } else { padd(&gx, &gy) };
        for (j, s) in out.iter().enumerate() {
            let power = (p as u128).pow((i - j) as u32) as u32;
            t = padd(&t, &pneg(&pscale(&ppow(s, power), &bpow(p, j as u32))));
        }
        out.push(pdiv_exact(&t, &bpow(p, i as u32)));
    }
    out
}

/// Digit polynomials of the Witt sum.
pub fn sum_polys(p: u64, n: usize) -> Vec<Poly> {
    witt_polys(p, n, false)
}

/// Digit polynomials of the Witt product.
pub fn prod_polys(p: u64, n: usize) -> Vec<Poly> {
    witt_polys(p, n, true)
}

/// Evaluates a universal polynomial at ring elements (variable `i` takes
/// `vals[i]`). Coefficients are reduced into the ring first.
pub fn eval_poly(ring: &LocalRing, poly: &Poly, vals: &[RingEl]) -> RingEl {
    let md = BigInt::from(ring.ppow(ring.prec));
    let mut acc = ring.zero();
    for (expo, coeff) in poly {
        let mut r = coeff % &md;
        if r.is_negative() {
            r += &md;
        }
        let v = r.to_u128().expect("reduced coefficient fits");
        assert!(v <= u64::MAX as u128, "modulus exceeds evaluation range");
        let mut term = ring.from_u64(v as u64);
        for (idx, &e) in expo.iter().enumerate() {
            if e > 0 {
                term = ring.mul(&term, &ring.pow_u(&vals[idx], e as u64));
            }
        }
        acc = ring.add(&acc, &term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_digits_match_textbook_forms() {
        // S_0 = X_0 + Y_0; S_1 = X_1 + Y_1 - sum of binomials / p.
        let s = sum_polys(3, 2);
        assert_eq!(s[0].len(), 2);
        // (X_0 + Y_0)^3 expands to 4 terms; minus X_0^3, Y_0^3 leaves the two
        // mixed ones, so S_1 has 2 + 2 = 4 terms.
        assert_eq!(s[1].len(), 4);
        let m = prod_polys(3, 2);
        // P_0 = X_0 Y_0; P_1 = X_0^3 Y_1 + X_1 Y_0^3 + 3 X_1 Y_1.
        assert_eq!(m[0].len(), 1);
        assert_eq!(m[1].len(), 3);
        let three = m[1]
            .iter()
            .find(|(k, _)| k.iter().sum::<u32>() == 2)
            .unwrap();
        assert_eq!(three.1, &BigInt::from(3));
    }
}

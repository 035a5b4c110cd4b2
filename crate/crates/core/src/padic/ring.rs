//! Local coefficient rings in exact polynomial normal form.

use super::RingError;
use rand::RngCore;

/// Modular addition for moduli below `2^127`.
#[inline]
pub(crate) fn addmod(a: u128, b: u128, md: u128) -> u128 {
    let s = a + b;
    if s >= md {
        s - md
    } else {
        s
    }
}

#[inline]
pub(crate) fn submod(a: u128, b: u128, md: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        md - (b - a)
    }
}

/// Modular multiplication. Fast path when the modulus fits in 64 bits,
/// shift-and-add otherwise (moduli stay below `2^127`, so sums never overflow).
pub(crate) fn mulmod(a: u128, b: u128, md: u128) -> u128 {
    debug_assert!(md > 0);
    if md <= u64::MAX as u128 {
        return (a % md) * (b % md) % md;
    }
    let mut a = a % md;
    let mut b = b % md;
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = addmod(acc, a, md);
        }
        a = addmod(a, a, md);
        b >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn modinv_u64(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a is nonzero mod p.
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

// ---- dense polynomials over F_p (used for residue-field arithmetic) ----

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn poly_rem(mut a: Vec<u64>, f: &[u64], p: u64) -> Vec<u64> {
    // f monic
    let df = f.len() - 1;
    while a.len() > df {
        let d = a.len() - 1;
        let c = a[d];
        a.pop();
        if c != 0 {
            for i in 0..df {
                let t = a[d - df + i];
                a[d - df + i] = (t + p - c * f[i] % p) % p;
            }
        }
    }
    while a.len() < df {
        a.push(0);
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] = (acc[i + j] + x * y) % p;
        }
    }
    poly_rem(acc, f, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // monicize b, then reduce a mod b
        let lead = *b.last().unwrap();
        if lead != 1 {
            let inv = modinv_u64(lead, p);
            for c in b.iter_mut() {
                *c = *c * inv % p;
            }
        }
        let r = {
            let mut r = a.clone();
            let db = b.len() - 1;
            if db == 0 {
                vec![0]
            } else {
                while r.len() > db {
                    let d = r.len() - 1;
                    let c = r[d];
                    r.pop();
                    if c != 0 {
                        for i in 0..db {
                            let t = r[d - db + i];
                            r[d - db + i] = (t + p - c * b[i] % p) % p;
                        }
                    }
                }
                poly_trim(&mut r);
                r
            }
        };
        a = b;
        b = r;
    }
    poly_trim(&mut a);
    a
}

/// `x^e mod f` over `F_p`.
fn poly_xpow(e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let m = f.len() - 1;
    let mut base = vec![0u64; m.max(2)];
    if m == 1 {
        // x reduces to the constant -f[0]
        base = vec![(p - f[0] % p) % p];
    } else {
        base[1] = 1;
        base.truncate(m);
    }
    let mut acc = vec![0u64; m.max(1)];
    acc[0] = 1;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, f, p);
        }
        base = poly_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc.resize(m.max(1), 0);
    acc
}

/// Smallest monic irreducible of degree `m` over `F_p` in a fixed
/// deterministic enumeration. Degree 1 always returns `x`.
fn find_irreducible(p: u64, m: usize) -> Result<Vec<u64>, RingError> {
    if m == 1 {
        return Ok(vec![0, 1]);
    }
    let mut primes_of_m = vec![];
    let mut mm = m;
    let mut d = 2;
    while d <= mm {
        if mm % d == 0 {
            primes_of_m.push(d);
            while mm % d == 0 {
                mm /= d;
            }
        }
        d += 1;
    }
    let pm = (p as u128).checked_pow(m as u32).ok_or_else(|| {
        RingError::BadParameter("p^m overflows".into())
    })?;
    if pm > u64::MAX as u128 {
        return Err(RingError::BadParameter("residue field too large".into()));
    }
    let mut counter = 0u64;
    loop {
        let mut f = vec![0u64; m + 1];
        f[m] = 1;
        let mut c = counter;
        for fi in f.iter_mut().take(m) {
            *fi = c % p;
            c /= p;
        }
        if c > 0 {
            return Err(RingError::BadParameter(format!(
                "no irreducible of degree {m} found"
            )));
        }
        counter += 1;
        // irreducible iff x^(p^m) = x mod f and gcd(x^(p^(m/l)) - x, f) = 1
        let xq = poly_xpow(pm as u64, &f, p);
        let mut xv = vec![0u64; m];
        xv[1 % m] = if m > 1 { 1 } else { 0 };
        if xq != xv {
            continue;
        }
        let mut ok = true;
        for &l in &primes_of_m {
            let e = (p as u128).pow((m / l) as u32) as u64;
            let mut g = poly_xpow(e, &f, p);
            // g - x
            let t = g[1];
            g[1] = (t + p - 1) % p;
            let gc = poly_gcd(&g, &f, p);
            if gc.len() > 1 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(f);
        }
    }
}

/// Which unit sits in the Eisenstein relation `pi^h = p * u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EisUnit {
    One,
    /// Teichmueller lift of a fixed multiplicative generator of `k*`.
    TeichGenerator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArtinPart {
    None,
    Monomial {
        nilp: Vec<u32>,
        vanishing: Vec<Vec<u32>>,
        mons: Vec<Vec<u32>>,
        /// flattened `B x B` product table: index of the product monomial, or
        /// `None` when the product falls into the vanishing ideal
        prod: Vec<Option<usize>>,
    },
    Eisenstein {
        h: u32,
        unit_kind: EisUnit,
        /// coefficients of the unit `u` in the `W_N(k)` model (length `m`)
        unit: Vec<u128>,
        quot: Option<u32>,
    },
}

/// A local coefficient ring; see the module docs for the three shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRing {
    pub p: u64,
    pub prec: u32,
    pub m: usize,
    fpoly: Vec<u64>,
    ppows: Vec<u128>,
    sigma_mat: Vec<u128>,
    sigma_inv_mat: Vec<u128>,
    pub artin: ArtinPart,
    caps: Vec<u32>,
}

/// Element of a [`LocalRing`]: coefficient `c[a*m + i]` is the `u^i` part of
/// basis monomial `a`, stored mod `p^min(prec, cap_a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingEl {
    pub c: Vec<u128>,
    pub prec: u32,
}

impl LocalRing {
    fn validate_pm(p: u64, m: usize, prec: u32) -> Result<(), RingError> {
        if p < 3 || !is_prime_u64(p) {
            return Err(RingError::BadParameter(format!("p = {p} must be an odd prime")));
        }
        if m == 0 || m > 8 {
            return Err(RingError::BadParameter(format!("residue degree m = {m} out of range")));
        }
        if prec == 0 {
            return Err(RingError::BadParameter("precision must be at least 1".into()));
        }
        let mut acc: u128 = 1;
        for _ in 0..prec {
            acc = acc.checked_mul(p as u128).ok_or_else(|| {
                RingError::BadParameter("p^prec overflows".into())
            })?;
            if acc >= (1u128 << 126) {
                return Err(RingError::BadParameter("p^prec too large".into()));
            }
        }
        Ok(())
    }

    fn base(p: u64, m: usize, prec: u32) -> Result<LocalRing, RingError> {
        Self::validate_pm(p, m, prec)?;
        let fpoly = find_irreducible(p, m)?;
        let mut ppows = Vec::with_capacity(prec as usize + 1);
        let mut acc: u128 = 1;
        ppows.push(acc);
        for _ in 0..prec {
            acc *= p as u128;
            ppows.push(acc);
        }
        let mut r = LocalRing {
            p,
            prec,
            m,
            fpoly,
            ppows,
            sigma_mat: vec![],
            sigma_inv_mat: vec![],
            artin: ArtinPart::None,
            caps: vec![prec],
        };
        r.build_sigma()?;
        Ok(r)
    }

    /// `W_N(k)` for `k = F_{p^m}`, `N = prec`.
    pub fn unramified(p: u64, m: usize, prec: u32) -> Result<LocalRing, RingError> {
        Self::base(p, m, prec)
    }

    /// `W_N(k)[t_1..t_r]` with `t_i^nilp_i = 0` plus extra vanishing
    /// monomials, on a standard-monomial basis.
    pub fn artin_monomial(
        p: u64,
        m: usize,
        prec: u32,
        nilp: &[u32],
        vanishing: &[Vec<u32>],
    ) -> Result<LocalRing, RingError> {
        let mut r = Self::base(p, m, prec)?;
        if nilp.is_empty() {
            return Err(RingError::BadParameter("need at least one generator".into()));
        }
        if nilp.iter().any(|&n| n == 0) {
            return Err(RingError::NotLocal(
                "nilpotency order 0 forces 1 = 0".into(),
            ));
        }
        for v in vanishing {
            if v.len() != nilp.len() {
                return Err(RingError::Shape("vanishing monomial arity".into()));
            }
            if v.iter().all(|&e| e == 0) {
                return Err(RingError::NotLocal(
                    "vanishing relation in degree 0 is a unit relation".into(),
                ));
            }
        }
        // enumerate standard monomials in graded-lex order
        let r_vars = nilp.len();
        let mut mons: Vec<Vec<u32>> = vec![];
        let mut stack = vec![vec![]];
        while let Some(cur) = stack.pop() {
            if cur.len() == r_vars {
                let dead = vanishing
                    .iter()
                    .any(|v| v.iter().zip(&cur).all(|(&a, &b)| b >= a));
                if !dead {
                    mons.push(cur);
                }
                continue;
            }
            let i = cur.len();
            for e in (0..nilp[i]).rev() {
                let mut nx = cur.clone();
                nx.push(e);
                stack.push(nx);
            }
        }
        mons.sort_by_key(|v| (v.iter().sum::<u32>(), v.clone()));
        if mons.len() > 64 {
            return Err(RingError::BadParameter(format!(
                "basis of {} monomials is too large",
                mons.len()
            )));
        }
        let b = mons.len();
        let mut prod = vec![None; b * b];
        let idx_of = |v: &Vec<u32>| mons.iter().position(|w| w == v);
        for (i, mi) in mons.iter().enumerate() {
            for (j, mj) in mons.iter().enumerate() {
                let s: Vec<u32> = mi.iter().zip(mj).map(|(a, b)| a + b).collect();
                let alive = s.iter().zip(nilp).all(|(&e, &n)| e < n)
                    && !vanishing
                        .iter()
                        .any(|v| v.iter().zip(&s).all(|(&a, &b)| b >= a));
                prod[i * b + j] = if alive { idx_of(&s) } else { None };
            }
        }
        r.caps = vec![prec; b];
        r.artin = ArtinPart::Monomial {
            nilp: nilp.to_vec(),
            vanishing: vanishing.to_vec(),
            mons,
            prod,
        };
        Ok(r)
    }

    /// `W_N(k)[pi]/(pi^h - p*u)`, optionally with `pi^quot = 0`.
    ///
    /// For `h = 1` this degenerates to `W_N(k)` with `pi = p*u`; the
    /// truncation then caps every coefficient at `p^quot`.
    pub fn eisenstein(
        p: u64,
        m: usize,
        prec: u32,
        h: u32,
        unit_kind: EisUnit,
        quot: Option<u32>,
    ) -> Result<LocalRing, RingError> {
        if h == 0 {
            return Err(RingError::BadParameter("h must be positive".into()));
        }
        if let Some(q) = quot {
            if q == 0 {
                return Err(RingError::NotLocal("pi^0 = 0 kills the ring".into()));
            }
        }
        let mut r = Self::base(p, m, prec)?;
        let unit = match unit_kind {
            EisUnit::One => {
                let mut u = vec![0u128; m];
                u[0] = 1;
                u
            }
            EisUnit::TeichGenerator => {
                let g = r.k_generator()?;
                let t = r.teichmuller(&g)?;
                t.c
            }
        };
        let caps: Vec<u32> = (0..h)
            .map(|a| match quot {
                None => prec,
                Some(q) => {
                    if a >= q {
                        0
                    } else {
                        let need = (q - a).div_ceil(h);
                        need.min(prec)
                    }
                }
            })
            .collect();
        if caps.iter().any(|&c| c == 0) {
            return Err(RingError::BadParameter(
                "quotient kills a basis monomial; lower h or raise quot".into(),
            ));
        }
        r.caps = caps;
        r.artin = ArtinPart::Eisenstein {
            h,
            unit_kind,
            unit,
            quot,
        };
        Ok(r)
    }

    /// Quotient-free model of this ring at precision `prec + extra`; this is
    /// where Witt-vector ghost recursions run.
    pub fn cover(&self, extra: u32) -> Result<LocalRing, RingError> {
        let np = self.prec + extra;
        match &self.artin {
            ArtinPart::None => LocalRing::unramified(self.p, self.m, np),
            ArtinPart::Monomial {
                nilp, vanishing, ..
            } => LocalRing::artin_monomial(self.p, self.m, np, nilp, vanishing),
            ArtinPart::Eisenstein { h, unit_kind, .. } => {
                LocalRing::eisenstein(self.p, self.m, np, *h, *unit_kind, None)
            }
        }
    }

    fn build_sigma(&mut self) -> Result<(), RingError> {
        let m = self.m;
        if m == 1 {
            self.sigma_mat = vec![1];
            self.sigma_inv_mat = vec![1];
            return Ok(());
        }
        // Newton-solve f(t) = 0 with t = u^p mod p.
        let k0 = poly_xpow(self.p, &self.fpoly, self.p);
        let mut t = self.from_residue(&k0);
        let fc: Vec<u64> = self.fpoly.clone();
        let dfc: Vec<u64> = (1..fc.len())
            .map(|i| (i as u64 % self.p) * (fc[i] % self.p) % self.p)
            .collect();
        let iters = 3 + (32 - self.prec.leading_zeros());
        for _ in 0..iters {
            let fv = self.eval_int_poly(&fc, &t);
            if self.is_zero(&fv) {
                break;
            }
            let dv = self.eval_int_poly(&dfc, &t);
            let dinv = self.inv(&dv)?;
            let step = self.mul(&fv, &dinv);
            t = self.sub(&t, &step);
        }
        let fv = self.eval_int_poly(&fc, &t);
        if !self.is_zero(&fv) {
            return Err(RingError::Precision("Frobenius lift did not converge".into()));
        }
        // sigma matrix: columns are t^j
        let mut mat = vec![0u128; m * m];
        let mut pw = self.one();
        for j in 0..m {
            for i in 0..m {
                mat[i * m + j] = pw.c[i];
            }
            if j + 1 < m {
                pw = self.mul(&pw, &t);
            }
        }
        // sigma^(m-1) = sigma^{-1}
        let md = self.ppows[self.prec as usize];
        let matmul = |a: &Vec<u128>, b: &Vec<u128>| -> Vec<u128> {
            let mut o = vec![0u128; m * m];
            for i in 0..m {
                for kk in 0..m {
                    let av = a[i * m + kk];
                    if av == 0 {
                        continue;
                    }
                    for j in 0..m {
                        o[i * m + j] = addmod(o[i * m + j], mulmod(av, b[kk * m + j], md), md);
                    }
                }
            }
            o
        };
        let mut inv = {
            let mut idm = vec![0u128; m * m];
            for i in 0..m {
                idm[i * m + i] = 1;
            }
            idm
        };
        for _ in 0..m - 1 {
            inv = matmul(&inv, &mat);
        }
        // sanity: sigma^m = identity
        let chk = matmul(&inv, &mat);
        for i in 0..m {
            for j in 0..m {
                let want = u128::from(i == j);
                if chk[i * m + j] != want {
                    return Err(RingError::Precision("sigma^m != id".into()));
                }
            }
        }
        self.sigma_mat = mat;
        self.sigma_inv_mat = inv;
        Ok(())
    }

    // ---- basis/bookkeeping ----

    pub fn basis_len(&self) -> usize {
        match &self.artin {
            ArtinPart::None => 1,
            ArtinPart::Monomial { mons, .. } => mons.len(),
            ArtinPart::Eisenstein { h, .. } => *h as usize,
        }
    }

    pub fn cap(&self, slot: usize) -> u32 {
        self.caps[slot]
    }

    pub fn is_capped(&self) -> bool {
        self.caps.iter().any(|&c| c < self.prec)
    }

    pub fn ppow(&self, e: u32) -> u128 {
        self.ppows[e as usize]
    }

    fn norm(&self, el: &mut RingEl) {
        let b = self.basis_len();
        debug_assert_eq!(el.c.len(), b * self.m);
        if el.prec > self.prec {
            el.prec = self.prec;
        }
        for a in 0..b {
            let md = self.ppows[el.prec.min(self.caps[a]) as usize];
            for i in 0..self.m {
                el.c[a * self.m + i] %= md;
            }
        }
    }

    // ---- element constructors ----

    pub fn zero(&self) -> RingEl {
        RingEl {
            c: vec![0; self.basis_len() * self.m],
            prec: self.prec,
        }
    }

    pub fn one(&self) -> RingEl {
        let mut e = self.zero();
        e.c[0] = 1;
        e
    }

    pub fn from_u64(&self, v: u64) -> RingEl {
        let mut e = self.zero();
        e.c[0] = v as u128;
        self.norm(&mut e);
        e
    }

    pub fn from_i64(&self, v: i64) -> RingEl {
        let e = self.from_u64(v.unsigned_abs());
        if v < 0 {
            self.neg(&e)
        } else {
            e
        }
    }

    /// Canonical lift of a residue-field element (coefficients in `[0, p)`).
    pub fn from_residue(&self, kel: &[u64]) -> RingEl {
        let mut e = self.zero();
        for i in 0..self.m {
            e.c[i] = (kel.get(i).copied().unwrap_or(0) % self.p) as u128;
        }
        e
    }

    /// The generator `u` of the unramified part.
    pub fn gen_u(&self) -> RingEl {
        let mut kel = vec![0u64; self.m];
        if self.m > 1 {
            kel[1] = 1;
        }
        self.from_residue(&kel)
    }

    /// The `idx`-th Artin generator `t_idx` (monomial rings only).
    pub fn gen_t(&self, idx: usize) -> Result<RingEl, RingError> {
        let ArtinPart::Monomial { nilp, mons, .. } = &self.artin else {
            return Err(RingError::Shape("not a monomial Artin ring".into()));
        };
        let mut want = vec![0u32; nilp.len()];
        want[idx] = 1;
        let slot = mons
            .iter()
            .position(|v| *v == want)
            .ok_or_else(|| RingError::Shape("generator is already zero".into()))?;
        let mut e = self.zero();
        e.c[slot * self.m] = 1;
        self.norm(&mut e);
        Ok(e)
    }

    /// The uniformizer `pi`. For `h = 1` this is the element `p*u`.
    pub fn gen_pi(&self) -> Result<RingEl, RingError> {
        let ArtinPart::Eisenstein { h, unit, .. } = &self.artin else {
            return Err(RingError::Shape("not an Eisenstein ring".into()));
        };
        let mut e = self.zero();
        if *h == 1 {
            for i in 0..self.m {
                e.c[i] = mulmod(unit[i], self.p as u128, self.ppows[self.prec as usize]);
            }
        } else {
            e.c[self.m] = 1;
        }
        self.norm(&mut e);
        Ok(e)
    }

    // ---- arithmetic ----

    pub fn add(&self, a: &RingEl, b: &RingEl) -> RingEl {
        let prec = a.prec.min(b.prec);
        let mut c = Vec::with_capacity(a.c.len());
        for (x, y) in a.c.iter().zip(&b.c) {
            c.push(x + y);
        }
        let mut e = RingEl { c, prec };
        self.norm(&mut e);
        e
    }

    pub fn neg(&self, a: &RingEl) -> RingEl {
        let mut out = a.clone();
        let b = self.basis_len();
        for slot in 0..b {
            let md = self.ppows[a.prec.min(self.caps[slot]) as usize];
            for i in 0..self.m {
                let v = out.c[slot * self.m + i] % md;
                out.c[slot * self.m + i] = if v == 0 { 0 } else { md - v };
            }
        }
        out.prec = a.prec.min(self.prec);
        out
    }

    pub fn sub(&self, a: &RingEl, b: &RingEl) -> RingEl {
        self.add(a, &self.neg(b))
    }

    /// Multiply two `u`-coefficient polynomials (length `m`) mod `fpoly`.
    fn umul(&self, x: &[u128], y: &[u128], md: u128) -> Vec<u128> {
        let m = self.m;
        if m == 1 {
            return vec![mulmod(x[0], y[0], md)];
        }
        let mut acc = vec![0u128; 2 * m - 1];
        for i in 0..m {
            if x[i] == 0 {
                continue;
            }
            for j in 0..m {
                if y[j] == 0 {
                    continue;
                }
                acc[i + j] = addmod(acc[i + j], mulmod(x[i], y[j], md), md);
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = acc[d];
            acc[d] = 0;
            if c != 0 {
                for i in 0..m {
                    let fi = self.fpoly[i] as u128;
                    if fi != 0 {
                        acc[d - m + i] = submod(acc[d - m + i], mulmod(c, fi, md), md);
                    }
                }
            }
        }
        acc.truncate(m);
        acc
    }

    pub fn mul(&self, a: &RingEl, b: &RingEl) -> RingEl {
        let prec = a.prec.min(b.prec).min(self.prec);
        let md = self.ppows[prec as usize];
        let m = self.m;
        let bl = self.basis_len();
        let mut out = vec![0u128; bl * m];
        match &self.artin {
            ArtinPart::None => {
                let z = self.umul(&a.c, &b.c, md);
                out.copy_from_slice(&z);
            }
            ArtinPart::Monomial { prod, .. } => {
                for sa in 0..bl {
                    if a.c[sa * m..(sa + 1) * m].iter().all(|&v| v == 0) {
                        continue;
                    }
                    for sb in 0..bl {
                        let Some(t) = prod[sa * bl + sb] else { continue };
                        if b.c[sb * m..(sb + 1) * m].iter().all(|&v| v == 0) {
                            continue;
                        }
                        let z = self.umul(&a.c[sa * m..(sa + 1) * m], &b.c[sb * m..(sb + 1) * m], md);
                        for i in 0..m {
                            out[t * m + i] = addmod(out[t * m + i], z[i], md);
                        }
                    }
                }
            }
            ArtinPart::Eisenstein { h, unit, .. } => {
                let h = *h as usize;
                for sa in 0..h {
                    if a.c[sa * m..(sa + 1) * m].iter().all(|&v| v == 0) {
                        continue;
                    }
                    for sb in 0..h {
                        if b.c[sb * m..(sb + 1) * m].iter().all(|&v| v == 0) {
                            continue;
                        }
                        let mut z =
                            self.umul(&a.c[sa * m..(sa + 1) * m], &b.c[sb * m..(sb + 1) * m], md);
                        let t = sa + sb;
                        let slot = if t < h {
                            t
                        } else {
                            // pi^h = p*u
                            z = self.umul(&z, unit, md);
                            for zi in z.iter_mut() {
                                *zi = mulmod(*zi, self.p as u128, md);
                            }
                            t - h
                        };
                        for i in 0..m {
                            out[slot * m + i] = addmod(out[slot * m + i], z[i], md);
                        }
                    }
                }
            }
        }
        let mut e = RingEl { c: out, prec };
        self.norm(&mut e);
        e
    }

    pub fn pow_u(&self, a: &RingEl, e: u64) -> RingEl {
        let mut acc = {
            let mut o = self.one();
            o.prec = a.prec;
            self.norm(&mut o);
            o
        };
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^p`, with the precision gain `e -> min(e+1, prec)`: the canonical
    /// representative is exact and `x = y mod p^e` implies `x^p = y^p mod
    /// p^(e+1)`.
    pub fn pow_p(&self, a: &RingEl) -> RingEl {
        debug_assert!(a.prec >= 1);
        let we = (a.prec + 1).min(self.prec);
        let mut lifted = a.clone();
        lifted.prec = we;
        self.norm(&mut lifted);
        let mut r = self.pow_u(&lifted, self.p);
        r.prec = we;
        self.norm(&mut r);
        r
    }

    /// `a^(p^t)` with precision gain `t`.
    pub fn pow_p_iter(&self, a: &RingEl, t: u32) -> RingEl {
        let mut x = a.clone();
        for _ in 0..t {
            x = self.pow_p(&x);
        }
        x
    }

    /// Multiply by `p^j`; gains `j` digits of precision.
    pub fn mul_pow_p(&self, a: &RingEl, j: u32) -> RingEl {
        let we = (a.prec + j).min(self.prec);
        let md = self.ppows[we as usize];
        let pj = self.ppows[(j.min(self.prec)) as usize];
        let mut out = a.clone();
        for v in out.c.iter_mut() {
            *v = mulmod(*v, pj, md);
        }
        out.prec = we;
        self.norm(&mut out);
        out
    }

    /// Exact division by `p^j`; loses `j` digits. Only legal on quotient-free
    /// rings, where per-slot knowledge is uniform.
    pub fn divide_p(&self, a: &RingEl, j: u32) -> Result<RingEl, RingError> {
        if j == 0 {
            return Ok(a.clone());
        }
        if self.is_capped() {
            return Err(RingError::CappedDivision);
        }
        if a.prec <= j {
            return Err(RingError::Precision(format!(
                "cannot divide by p^{j} at precision {}",
                a.prec
            )));
        }
        let pj = self.ppows[j as usize];
        let mut out = a.clone();
        for v in out.c.iter_mut() {
            if *v % pj != 0 {
                return Err(RingError::InexactDivision(j));
            }
            *v /= pj;
        }
        out.prec = a.prec - j;
        self.norm(&mut out);
        Ok(out)
    }

    /// Frobenius lift on `W_N(k)`; identity on `Z/p^N`.
    pub fn sigma(&self, a: &RingEl) -> Result<RingEl, RingError> {
        match &self.artin {
            ArtinPart::None => Ok(self.apply_coeff_mat(&self.sigma_mat, a)),
            ArtinPart::Monomial {
                nilp,
                vanishing,
                mons,
                ..
            } => {
                // coefficients through the Witt Frobenius, each generator
                // monomial t^alpha to t^(p alpha)
                let m = self.m;
                let p = self.p as u32;
                let md = self.ppows[a.prec.min(self.prec) as usize];
                let mut out = self.zero();
                out.prec = a.prec.min(self.prec);
                for (slot, alpha) in mons.iter().enumerate() {
                    if a.c[slot * m..(slot + 1) * m].iter().all(|&v| v == 0) {
                        continue;
                    }
                    let pa: Vec<u32> = alpha.iter().map(|&e| e * p).collect();
                    let alive = pa.iter().zip(nilp).all(|(&e, &n)| e < n)
                        && !vanishing
                            .iter()
                            .any(|v| v.iter().zip(&pa).all(|(&b, &e)| e >= b));
                    if !alive {
                        continue;
                    }
                    let tgt = mons
                        .iter()
                        .position(|w| *w == pa)
                        .ok_or_else(|| RingError::Shape("missing basis monomial".into()))?;
                    for i in 0..m {
                        let mut acc = 0u128;
                        for j in 0..m {
                            let v = self.sigma_mat[i * m + j];
                            if v != 0 {
                                acc = addmod(acc, mulmod(v, a.c[slot * m + j], md), md);
                            }
                        }
                        out.c[tgt * m + i] = addmod(out.c[tgt * m + i], acc, md);
                    }
                }
                self.norm(&mut out);
                Ok(out)
            }
            ArtinPart::Eisenstein { .. } => Err(RingError::NeedUnramified("sigma".into())),
        }
    }

    pub fn sigma_inv(&self, a: &RingEl) -> Result<RingEl, RingError> {
        if !matches!(self.artin, ArtinPart::None) {
            return Err(RingError::NeedUnramified("sigma_inv".into()));
        }
        Ok(self.apply_coeff_mat(&self.sigma_inv_mat, a))
    }

    /// `sigma^t` (t mod m).
    pub fn sigma_pow(&self, a: &RingEl, t: i64) -> Result<RingEl, RingError> {
        let m = self.m as i64;
        let t = t.rem_euclid(m);
        let mut x = a.clone();
        for _ in 0..t {
            x = self.sigma(&x)?;
        }
        Ok(x)
    }

    fn apply_coeff_mat(&self, mat: &[u128], a: &RingEl) -> RingEl {
        let m = self.m;
        let md = self.ppows[a.prec.min(self.prec) as usize];
        let mut c = vec![0u128; m];
        for i in 0..m {
            for j in 0..m {
                let v = mat[i * m + j];
                if v != 0 {
                    c[i] = addmod(c[i], mulmod(v, a.c[j], md), md);
                }
            }
        }
        let mut e = RingEl { c, prec: a.prec.min(self.prec) };
        self.norm(&mut e);
        e
    }

    pub fn is_zero(&self, a: &RingEl) -> bool {
        a.c.iter().all(|&v| v == 0)
    }

    /// Equality at the common precision of the two operands.
    pub fn eq(&self, a: &RingEl, b: &RingEl) -> bool {
        let e = a.prec.min(b.prec);
        let m = self.m;
        for slot in 0..self.basis_len() {
            let md = self.ppows[e.min(self.caps[slot]) as usize];
            for i in 0..m {
                if a.c[slot * m + i] % md != b.c[slot * m + i] % md {
                    return false;
                }
            }
        }
        true
    }

    /// Residue in `k` (coefficients mod p of the constant basis monomial).
    pub fn residue(&self, a: &RingEl) -> Vec<u64> {
        (0..self.m).map(|i| (a.c[i] % self.p as u128) as u64).collect()
    }

    pub fn is_unit(&self, a: &RingEl) -> bool {
        self.residue(a).iter().any(|&v| v != 0)
    }

    pub fn inv(&self, a: &RingEl) -> Result<RingEl, RingError> {
        if !self.is_unit(a) {
            return Err(RingError::NotAUnit);
        }
        let r = self.residue(a);
        let rinv = self.k_inv(&r)?;
        let mut x = self.from_residue(&rinv);
        x.prec = a.prec;
        let two = self.from_u64(2);
        for _ in 0..64 {
            let ax = self.mul(a, &x);
            if self.eq(&ax, &self.one()) {
                return Ok(x);
            }
            let t = self.sub(&two, &ax);
            x = self.mul(&x, &t);
        }
        Err(RingError::Precision("inverse iteration did not converge".into()))
    }

    /// p-adic valuation on quotient-free unramified rings; `a.prec` plays the
    /// role of infinity.
    pub fn val_p(&self, a: &RingEl) -> Result<u32, RingError> {
        if !matches!(self.artin, ArtinPart::None) {
            return Err(RingError::NeedUnramified("val_p".into()));
        }
        let mut best = a.prec;
        for &c in &a.c {
            if c == 0 {
                continue;
            }
            let mut v = 0u32;
            let mut cc = c;
            while cc % self.p as u128 == 0 {
                v += 1;
                cc /= self.p as u128;
            }
            best = best.min(v);
        }
        Ok(best)
    }

    /// Teichmueller lift in the `W_N(k)` model: the fixed point of `x -> x^(p^m)`
    /// over the canonical residue lift.
    pub fn teichmuller(&self, kel: &[u64]) -> Result<RingEl, RingError> {
        if !matches!(self.artin, ArtinPart::None) {
            return Err(RingError::NeedUnramified("teichmuller".into()));
        }
        let mut x = self.from_residue(kel);
        for _ in 0..self.prec.saturating_sub(1) {
            x = self.pow_p_iter(&x, self.m as u32);
        }
        Ok(x)
    }

    pub fn eval_int_poly(&self, coeffs: &[u64], x: &RingEl) -> RingEl {
        let mut acc = self.zero();
        acc.prec = x.prec;
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &{
                let mut e = self.from_u64(c);
                e.prec = x.prec;
                self.norm(&mut e);
                e
            });
        }
        acc
    }

    // ---- residue field arithmetic on Vec<u64> ----

    pub fn k_zero(&self) -> Vec<u64> {
        vec![0; self.m]
    }

    pub fn k_one(&self) -> Vec<u64> {
        let mut v = vec![0; self.m];
        v[0] = 1;
        v
    }

    pub fn k_is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&v| v == 0)
    }

    pub fn k_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn k_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.p - y % self.p) % self.p)
            .collect()
    }

    pub fn k_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut r = poly_mulmod(a, b, &self.fpoly, self.p);
        r.resize(self.m, 0);
        r
    }

    pub fn k_scale(&self, a: &[u64], s: u64) -> Vec<u64> {
        a.iter().map(|&x| x * (s % self.p) % self.p).collect()
    }

    pub fn k_pow(&self, a: &[u64], e: u64) -> Vec<u64> {
        let mut acc = self.k_one();
        let mut base = a.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.k_mul(&acc, &base);
            }
            base = self.k_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn k_frob(&self, a: &[u64]) -> Vec<u64> {
        self.k_pow(a, self.p)
    }

    pub fn k_inv(&self, a: &[u64]) -> Result<Vec<u64>, RingError> {
        if self.k_is_zero(a) {
            return Err(RingError::NotAUnit);
        }
        let order = (self.p as u128).pow(self.m as u32) - 1;
        // a^(order-1); order fits u64 by construction
        Ok(self.k_pow(a, (order - 1) as u64))
    }

    /// A fixed multiplicative generator of `k*` (smallest in the canonical
    /// enumeration).
    pub fn k_generator(&self) -> Result<Vec<u64>, RingError> {
        let q = (self.p as u128).pow(self.m as u32) as u64;
        let order = q - 1;
        let mut primes = vec![];
        let mut n = order;
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                primes.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        for code in 1..q {
            let mut v = vec![0u64; self.m];
            let mut c = code;
            for vi in v.iter_mut() {
                *vi = c % self.p;
                c /= self.p;
            }
            let ok = primes
                .iter()
                .all(|&l| !self.k_is_zero(&self.k_sub(&self.k_pow(&v, order / l), &self.k_one())));
            if ok {
                return Ok(v);
            }
        }
        Err(RingError::BadParameter("no generator found".into()))
    }

    /// Forget precision down to `e` (no-op if already lower), renormalizing
    /// the stored representative.
    pub fn clip_prec(&self, a: &RingEl, e: u32) -> RingEl {
        let mut out = a.clone();
        if out.prec > e {
            out.prec = e;
            self.norm(&mut out);
        }
        out
    }

    // ---- transport between related rings ----

    /// Reinterpret an element in a ring of the same shape (differing only in
    /// precision and/or quotient caps), or push it one step down a tower of
    /// monomial quotients: when both rings are monomial Artin quotients and
    /// every basis monomial of `dst` is alive in `self`, coefficients move
    /// slot-by-slot and the monomials killed downstairs are dropped. With
    /// `exact`, lifting a full-precision element into a cover treats its
    /// canonical normal form as an exact representative (legitimate for
    /// quotient-ring elements, whose image downstairs is independent of the
    /// chosen lift); without it the precision counter is preserved.
    pub fn transport(
        &self,
        dst: &LocalRing,
        a: &RingEl,
        exact: bool,
    ) -> Result<RingEl, RingError> {
        // src slot -> dst slot; None entries die in the quotient
        let mut slot_map: Option<Vec<Option<usize>>> = None;
        let compatible = self.p == dst.p
            && self.m == dst.m
            && self.fpoly == dst.fpoly
            && match (&self.artin, &dst.artin) {
                (ArtinPart::None, ArtinPart::None) => true,
                (
                    ArtinPart::Monomial { mons: up, .. },
                    ArtinPart::Monomial { mons: down, .. },
                ) => {
                    if up == down {
                        true
                    } else if down.iter().all(|mm| up.contains(mm)) {
                        slot_map = Some(
                            up.iter()
                                .map(|mm| down.iter().position(|x| x == mm))
                                .collect(),
                        );
                        true
                    } else {
                        false
                    }
                }
                (
                    ArtinPart::Eisenstein { h: h1, unit: u1, .. },
                    ArtinPart::Eisenstein { h: h2, unit: u2, .. },
                ) => h1 == h2 && {
                    // units agree mod the smaller precision
                    let md = self.ppows[self.prec.min(dst.prec) as usize];
                    u1.iter().zip(u2).all(|(&x, &y)| x % md == y % md)
                },
                _ => false,
            };
        if !compatible {
            return Err(RingError::Shape("rings are not same-shape".into()));
        }
        let c = match &slot_map {
            None => a.c.clone(),
            Some(map) => {
                let mut c = vec![0u128; dst.basis_len() * dst.m];
                for (s, d) in map.iter().enumerate() {
                    if let Some(d) = d {
                        c[d * dst.m..(d + 1) * dst.m]
                            .copy_from_slice(&a.c[s * self.m..(s + 1) * self.m]);
                    }
                }
                c
            }
        };
        let exact = exact && a.prec >= self.prec;
        let mut out = RingEl {
            c,
            prec: if exact && dst.prec >= self.prec {
                dst.prec
            } else {
                a.prec.min(dst.prec)
            },
        };
        dst.norm(&mut out);
        Ok(out)
    }

    /// Embed a `W_N(k)`-model element as a constant of `dst` (slot 0).
    pub fn embed_constant(&self, dst: &LocalRing, a: &RingEl) -> Result<RingEl, RingError> {
        if !matches!(self.artin, ArtinPart::None) {
            return Err(RingError::NeedUnramified("embed_constant".into()));
        }
        if self.p != dst.p || self.m != dst.m || self.fpoly != dst.fpoly {
            return Err(RingError::Shape("different residue data".into()));
        }
        let mut out = dst.zero();
        out.prec = a.prec.min(dst.prec);
        out.c[..self.m].copy_from_slice(&a.c);
        dst.norm(&mut out);
        Ok(out)
    }

    // ---- randomness (tests, probes) ----

    pub fn random_el(&self, rng: &mut dyn RngCore) -> RingEl {
        let mut e = self.zero();
        for slot in 0..self.basis_len() {
            let md = self.ppows[self.prec.min(self.caps[slot]) as usize];
            for i in 0..self.m {
                let v = ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128;
                e.c[slot * self.m + i] = v % md;
            }
        }
        e
    }

    pub fn random_unit(&self, rng: &mut dyn RngCore) -> RingEl {
        loop {
            let e = self.random_el(rng);
            if self.is_unit(&e) {
                return e;
            }
        }
    }

    /// A random element of the maximal ideal.
    pub fn random_topnil(&self, rng: &mut dyn RngCore) -> RingEl {
        let mut e = self.random_el(rng);
        let r = self.residue(&e);
        let lift = self.from_residue(&r);
        e = self.sub(&e, &lift);
        e
    }
}

//! Division-free characteristic polynomial (Berkowitz) and the adjugate
//! derived from its coefficients.
//!
//! Both work over any commutative coefficient [`Scalar`]; no pivoting, no
//! inverses, so they apply to matrices that are singular modulo `p`.

use crate::padic::{Mat, Scalar};

/// Coefficients `[1, c_1, ..., c_n]` of `det(T*I - A) = T^n + c_1 T^(n-1)
/// + ... + c_n`.
pub fn charpoly<T: Scalar>(cx: &T::Ctx, a: &Mat<T>) -> Vec<T> {
    assert_eq!(a.rows, a.cols, "characteristic polynomial of a square matrix");
    let n = a.rows;
    if n == 0 {
        return vec![T::s_one(cx)];
    }
    let mut v = vec![T::s_one(cx), T::s_neg(cx, a.at(0, 0))];
    for k in 1..n {
        // extend from the k x k to the (k+1) x (k+1) principal submatrix
        let mut t = Vec::with_capacity(k + 2);
        t.push(T::s_one(cx));
        t.push(T::s_neg(cx, a.at(k, k)));
        // w runs through M^i . C; each dot with R gives one Toeplitz entry
        let mut w: Vec<T> = (0..k).map(|i| a.at(i, k).clone()).collect();
        for step in 0..k {
            let mut dot = T::s_zero(cx);
            for j in 0..k {
                let prod = T::s_mul(cx, a.at(k, j), &w[j]);
                dot = T::s_add(cx, &dot, &prod);
            }
            t.push(T::s_neg(cx, &dot));
            if step + 1 < k {
                let mut nw = Vec::with_capacity(k);
                for i in 0..k {
                    let mut acc = T::s_zero(cx);
                    for j in 0..k {
                        let prod = T::s_mul(cx, a.at(i, j), &w[j]);
                        acc = T::s_add(cx, &acc, &prod);
                    }
                    nw.push(acc);
                }
                w = nw;
            }
        }
        // lower-triangular Toeplitz product: v <- T * v
        let mut nv = Vec::with_capacity(k + 2);
        for s in 0..k + 2 {
            let mut acc = T::s_zero(cx);
            for (i, vi) in v.iter().enumerate().take(s + 1) {
                if s - i < t.len() {
                    let prod = T::s_mul(cx, &t[s - i], vi);
                    acc = T::s_add(cx, &acc, &prod);
                }
            }
            nv.push(acc);
        }
        v = nv;
    }
    v
}

/// `det A = (-1)^n c_n`, read off the coefficient vector.
pub fn det_from_charpoly<T: Scalar>(cx: &T::Ctx, coeffs: &[T]) -> T {
    let n = coeffs.len() - 1;
    let c = coeffs[n].clone();
    if n % 2 == 0 {
        c
    } else {
        T::s_neg(cx, &c)
    }
}

/// Adjugate via Cayley-Hamilton: `adj A = (-1)^(n-1) (A^(n-1) + c_1
/// A^(n-2) + ... + c_(n-1) I)`, so `A . adj A = det(A) I` with no
/// division anywhere.
pub fn adjugate<T: Scalar>(cx: &T::Ctx, a: &Mat<T>) -> Mat<T> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    if n == 0 {
        return Mat::from_fn(0, 0, |_, _| T::s_one(cx));
    }
    let coeffs = charpoly(cx, a);
    let mut acc = Mat::identity(cx, n);
    for c in coeffs.iter().take(n).skip(1) {
        let ci = Mat::identity(cx, n).scale(cx, c);
        acc = acc.mul(cx, a).add(cx, &ci);
    }
    if n % 2 == 0 {
        acc = acc.map(|x| T::s_neg(cx, x));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::LocalRing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_by_two_matches_trace_and_det() {
        let r = LocalRing::unramified(5, 1, 6).unwrap();
        let a = Mat {
            rows: 2,
            cols: 2,
            d: vec![r.from_u64(2), r.from_u64(3), r.from_u64(7), r.from_u64(1)],
        };
        let c = charpoly(&r, &a);
        assert!(r.eq(&c[0], &r.one()));
        assert!(r.eq(&c[1], &r.from_i64(-3))); // -(tr)
        assert!(r.eq(&c[2], &r.from_i64(2 * 1 - 3 * 7))); // det
        assert!(r.eq(&det_from_charpoly(&r, &c), &r.from_i64(-19)));
    }

    #[test]
    fn companion_matrix_recovers_its_polynomial() {
        // companion of T^3 - 4T^2 + 2T - 9
        let r = LocalRing::unramified(7, 1, 5).unwrap();
        let z = r.zero();
        let one = r.one();
        let a = Mat {
            rows: 3,
            cols: 3,
            d: vec![
                z.clone(),
                z.clone(),
                r.from_u64(9),
                one.clone(),
                z.clone(),
                r.from_i64(-2),
                z.clone(),
                one.clone(),
                r.from_u64(4),
            ],
        };
        let c = charpoly(&r, &a);
        let want = [1i64, -4, 2, -9];
        for (ci, wi) in c.iter().zip(want) {
            assert!(r.eq(ci, &r.from_i64(wi)));
        }
    }

    #[test]
    fn adjugate_times_matrix_is_det() {
        let r = LocalRing::unramified(3, 2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for n in 1..=4usize {
            let a = Mat::from_fn(n, n, |_, _| r.random_el(&mut rng));
            let adj = adjugate(&r, &a);
            let det = det_from_charpoly(&r, &charpoly(&r, &a));
            let want = Mat::identity(&r, n).scale(&r, &det);
            assert!(a.mul(&r, &adj).eq(&r, &want));
            assert!(adj.mul(&r, &a).eq(&r, &want));
        }
    }
}

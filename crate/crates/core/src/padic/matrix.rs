//! Dense matrices over the crate's coefficient rings.
//!
//! `Scalar` is the minimal ring interface the generic matrix code needs; the
//! context parameter carries the ring (or frame) the elements live in.

use super::ring::{LocalRing, RingEl};
use super::RingError;

pub trait Scalar: Clone + std::fmt::Debug {
    type Ctx: ?Sized;
    fn s_zero(cx: &Self::Ctx) -> Self;
    fn s_one(cx: &Self::Ctx) -> Self;
    fn s_add(cx: &Self::Ctx, a: &Self, b: &Self) -> Self;
    fn s_sub(cx: &Self::Ctx, a: &Self, b: &Self) -> Self;
    fn s_mul(cx: &Self::Ctx, a: &Self, b: &Self) -> Self;
    fn s_neg(cx: &Self::Ctx, a: &Self) -> Self;
    fn s_is_zero(cx: &Self::Ctx, a: &Self) -> bool;
    fn s_is_unit(cx: &Self::Ctx, a: &Self) -> bool;
    fn s_inv(cx: &Self::Ctx, a: &Self) -> Result<Self, RingError>;
    fn s_eq(cx: &Self::Ctx, a: &Self, b: &Self) -> bool;
}

impl Scalar for RingEl {
    type Ctx = LocalRing;
    fn s_zero(cx: &LocalRing) -> Self {
        cx.zero()
    }
    fn s_one(cx: &LocalRing) -> Self {
        cx.one()
    }
    fn s_add(cx: &LocalRing, a: &Self, b: &Self) -> Self {
        cx.add(a, b)
    }
    fn s_sub(cx: &LocalRing, a: &Self, b: &Self) -> Self {
        cx.sub(a, b)
    }
    fn s_mul(cx: &LocalRing, a: &Self, b: &Self) -> Self {
        cx.mul(a, b)
    }
    fn s_neg(cx: &LocalRing, a: &Self) -> Self {
        cx.neg(a)
    }
    fn s_is_zero(cx: &LocalRing, a: &Self) -> bool {
        cx.is_zero(a)
    }
    fn s_is_unit(cx: &LocalRing, a: &Self) -> bool {
        cx.is_unit(a)
    }
    fn s_inv(cx: &LocalRing, a: &Self) -> Result<Self, RingError> {
        cx.inv(a)
    }
    fn s_eq(cx: &LocalRing, a: &Self, b: &Self) -> bool {
        cx.eq(a, b)
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub d: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut d = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                d.push(f(i, j));
            }
        }
        Mat { rows, cols, d }
    }

    pub fn zero(cx: &T::Ctx, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::s_zero(cx))
    }

    pub fn identity(cx: &T::Ctx, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::s_one(cx) } else { T::s_zero(cx) })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.d[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.d[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self
    where
        T: Clone,
    {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, cx: &T::Ctx, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            d: self.d.iter().zip(&o.d).map(|(a, b)| T::s_add(cx, a, b)).collect(),
        }
    }

    pub fn sub(&self, cx: &T::Ctx, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            d: self.d.iter().zip(&o.d).map(|(a, b)| T::s_sub(cx, a, b)).collect(),
        }
    }

    pub fn mul(&self, cx: &T::Ctx, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix dims");
        let mut out: Mat<T> = Mat::zero(cx, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if T::s_is_zero(cx, a) {
                    continue;
                }
                for j in 0..o.cols {
                    let t = T::s_mul(cx, a, o.at(k, j));
                    let cur = out.at(i, j).clone();
                    out.set(i, j, T::s_add(cx, &cur, &t));
                }
            }
        }
        out
    }

    pub fn scale(&self, cx: &T::Ctx, s: &T) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            d: self.d.iter().map(|a| T::s_mul(cx, a, s)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            d: self.d.iter().map(f).collect(),
        }
    }

    pub fn try_map<E>(&self, f: impl Fn(&T) -> Result<T, E>) -> Result<Self, E> {
        let mut d = Vec::with_capacity(self.d.len());
        for v in &self.d {
            d.push(f(v)?);
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            d,
        })
    }

    /// Like `try_map`, but the entry type may change.
    pub fn try_map_to<U, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Mat<U>, E> {
        let mut d = Vec::with_capacity(self.d.len());
        for v in &self.d {
            d.push(f(v)?);
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            d,
        })
    }

    pub fn is_zero(&self, cx: &T::Ctx) -> bool {
        self.d.iter().all(|v| T::s_is_zero(cx, v))
    }

    pub fn eq(&self, cx: &T::Ctx, o: &Self) -> bool {
        self.rows == o.rows
            && self.cols == o.cols
            && self.d.iter().zip(&o.d).all(|(a, b)| T::s_eq(cx, a, b))
    }

    /// Direct sum `diag(self, o)`.
    pub fn block_diag(&self, cx: &T::Ctx, o: &Self) -> Self {
        Mat::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.at(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.at(i - self.rows, j - self.cols).clone()
            } else {
                T::s_zero(cx)
            }
        })
    }

    /// Kronecker product.
    pub fn kronecker(&self, cx: &T::Ctx, o: &Self) -> Self {
        Mat::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            let (i1, i2) = (i / o.rows, i % o.rows);
            let (j1, j2) = (j / o.cols, j % o.cols);
            T::s_mul(cx, self.at(i1, j1), o.at(i2, j2))
        })
    }

    /// Gauss-Jordan inverse using unit pivots; over a local ring this
    /// succeeds exactly when the matrix is invertible.
    pub fn invert(&self, cx: &T::Ctx) -> Result<Self, RingError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(cx, n);
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| T::s_is_unit(cx, a.at(r, col)))
                .ok_or(RingError::NotAUnit)?;
            if piv != col {
                for j in 0..n {
                    a.d.swap(piv * n + j, col * n + j);
                    inv.d.swap(piv * n + j, col * n + j);
                }
            }
            let pi = T::s_inv(cx, a.at(col, col))?;
            for j in 0..n {
                let v = T::s_mul(cx, a.at(col, j), &pi);
                a.set(col, j, v);
                let v = T::s_mul(cx, inv.at(col, j), &pi);
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.at(r, col).clone();
                if T::s_is_zero(cx, &f) {
                    continue;
                }
                for j in 0..n {
                    let t = T::s_mul(cx, &f, a.at(col, j));
                    let v = T::s_sub(cx, a.at(r, j), &t);
                    a.set(r, j, v);
                    let t = T::s_mul(cx, &f, inv.at(col, j));
                    let v = T::s_sub(cx, inv.at(r, j), &t);
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self, cx: &T::Ctx) -> bool {
        self.rows == self.cols && self.invert(cx).is_ok()
    }
}

/// Solve `A x = b` (any rectangular `A`) by elimination with unit pivots.
/// Returns one solution if the triangularization finds unit pivots for every
/// leading column; free columns get zero.
pub fn solve_general<T: Scalar>(
    cx: &T::Ctx,
    a: &Mat<T>,
    b: &Mat<T>,
) -> Result<Mat<T>, RingError> {
    assert_eq!(a.rows, b.rows);
    let (r, c) = (a.rows, a.cols);
    let mut aa = a.clone();
    let mut bb = b.clone();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; c];
    let mut row = 0usize;
    for col in 0..c {
        if row >= r {
            break;
        }
        let Some(piv) = (row..r).find(|&i| T::s_is_unit(cx, aa.at(i, col))) else {
            // the column must already be eliminated below `row`
            if (row..r).any(|i| !T::s_is_zero(cx, aa.at(i, col))) {
                return Err(RingError::NotAUnit);
            }
            continue;
        };
        if piv != row {
            for j in 0..c {
                aa.d.swap(piv * c + j, row * c + j);
            }
            for j in 0..bb.cols {
                bb.d.swap(piv * bb.cols + j, row * bb.cols + j);
            }
        }
        let inv = T::s_inv(cx, aa.at(row, col))?;
        for j in 0..c {
            let v = T::s_mul(cx, aa.at(row, j), &inv);
            aa.set(row, j, v);
        }
        for j in 0..bb.cols {
            let v = T::s_mul(cx, bb.at(row, j), &inv);
            bb.set(row, j, v);
        }
        for i in 0..r {
            if i == row {
                continue;
            }
            let f = aa.at(i, col).clone();
            if T::s_is_zero(cx, &f) {
                continue;
            }
            for j in 0..c {
                let t = T::s_mul(cx, &f, aa.at(row, j));
                let v = T::s_sub(cx, aa.at(i, j), &t);
                aa.set(i, j, v);
            }
            for j in 0..bb.cols {
                let t = T::s_mul(cx, &f, bb.at(row, j));
                let v = T::s_sub(cx, bb.at(i, j), &t);
                bb.set(i, j, v);
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    // consistency: remaining rows of bb must vanish
    for i in row..r {
        for j in 0..bb.cols {
            if !T::s_is_zero(cx, bb.at(i, j)) {
                return Err(RingError::NoSolution);
            }
        }
    }
    let mut x = Mat::zero(cx, c, b.cols);
    for col in 0..c {
        if let Some(rw) = pivot_of_col[col] {
            for j in 0..b.cols {
                x.set(col, j, bb.at(rw, j).clone());
            }
        }
    }
    Ok(x)
}

/// Solve `A x = b` over a quotient-free unramified ring, allowing p-power
/// pivots: when no unit pivot exists the row of smallest valuation is divided
/// through by `p^v` (together with its right-hand side), losing `v` digits of
/// precision in the solution.
pub fn solve_linear(
    ring: &LocalRing,
    a: &Mat<RingEl>,
    b: &Mat<RingEl>,
) -> Result<Mat<RingEl>, RingError> {
    assert_eq!(a.rows, b.rows);
    let (r, c) = (a.rows, a.cols);
    let mut aa = a.clone();
    let mut bb = b.clone();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; c];
    let mut row = 0usize;
    for col in 0..c {
        if row >= r {
            break;
        }
        // best (lowest-valuation) pivot in this column
        let mut best: Option<(u32, usize)> = None;
        for i in row..r {
            let e = aa.at(i, col);
            if ring.is_zero(e) {
                continue;
            }
            let v = ring.val_p(e)?;
            if v < e.prec && best.map(|(bv, _)| v < bv).unwrap_or(true) {
                best = Some((v, i));
            }
        }
        let Some((v, piv)) = best else { continue };
        if piv != row {
            for j in 0..c {
                aa.d.swap(piv * c + j, row * c + j);
            }
            for j in 0..bb.cols {
                bb.d.swap(piv * bb.cols + j, row * bb.cols + j);
            }
        }
        if v > 0 {
            for j in 0..c {
                let e = aa.at(row, j).clone();
                let q = ring.divide_p(&e, v).map_err(|_| RingError::NoSolution)?;
                aa.set(row, j, q);
            }
            for j in 0..bb.cols {
                let e = bb.at(row, j).clone();
                let q = ring.divide_p(&e, v).map_err(|_| RingError::NoSolution)?;
                bb.set(row, j, q);
            }
        }
        let inv = ring.inv(aa.at(row, col))?;
        for j in 0..c {
            let e = ring.mul(aa.at(row, j), &inv);
            aa.set(row, j, e);
        }
        for j in 0..bb.cols {
            let e = ring.mul(bb.at(row, j), &inv);
            bb.set(row, j, e);
        }
        for i in 0..r {
            if i == row {
                continue;
            }
            let f = aa.at(i, col).clone();
            if ring.is_zero(&f) {
                continue;
            }
            for j in 0..c {
                let t = ring.mul(&f, aa.at(row, j));
                let e = ring.sub(aa.at(i, j), &t);
                aa.set(i, j, e);
            }
            for j in 0..bb.cols {
                let t = ring.mul(&f, bb.at(row, j));
                let e = ring.sub(bb.at(i, j), &t);
                bb.set(i, j, e);
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
    }
    for i in row..r {
        for j in 0..bb.cols {
            if !ring.is_zero(bb.at(i, j)) {
                return Err(RingError::NoSolution);
            }
        }
    }
    let mut x = Mat::zero(ring, c, b.cols);
    for col in 0..c {
        if let Some(rw) = pivot_of_col[col] {
            for j in 0..b.cols {
                x.set(col, j, bb.at(rw, j).clone());
            }
        }
    }
    Ok(x)
}

/// Rank of the residue matrix over `k`, via Gaussian elimination in the
/// residue field.
pub fn residue_rank(ring: &LocalRing, a: &Mat<RingEl>) -> usize {
    let (r, c) = (a.rows, a.cols);
    let mut rows: Vec<Vec<Vec<u64>>> = (0..r)
        .map(|i| (0..c).map(|j| ring.residue(a.at(i, j))).collect())
        .collect();
    let mut rank = 0usize;
    for col in 0..c {
        let Some(piv) = (rank..r).find(|&i| !ring.k_is_zero(&rows[i][col])) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = ring.k_inv(&rows[rank][col]).unwrap();
        for j in 0..c {
            rows[rank][j] = ring.k_mul(&rows[rank][j], &inv);
        }
        for i in 0..r {
            if i == rank || ring.k_is_zero(&rows[i][col]) {
                continue;
            }
            let f = rows[i][col].clone();
            for j in 0..c {
                let t = ring.k_mul(&f, &rows[rank][j]);
                rows[i][j] = ring.k_sub(&rows[i][j], &t);
            }
        }
        rank += 1;
        if rank == r {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn invert_random_matrices_multiply_back() {
        let ring = LocalRing::unramified(3, 1, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut done = 0;
        while done < 20 {
            let a = Mat::from_fn(3, 3, |_, _| ring.random_el(&mut rng));
            match a.invert(&ring) {
                Ok(inv) => {
                    let id = Mat::identity(&ring, 3);
                    assert!(a.mul(&ring, &inv).eq(&ring, &id));
                    assert!(inv.mul(&ring, &a).eq(&ring, &id));
                    done += 1;
                }
                Err(_) => continue,
            }
        }
    }

    #[test]
    fn solve_with_p_pivot_loses_precision() {
        let ring = LocalRing::unramified(3, 1, 4).unwrap();
        let a = Mat::from_fn(1, 1, |_, _| ring.from_u64(3));
        let b = Mat::from_fn(1, 1, |_, _| ring.from_u64(3));
        let x = solve_linear(&ring, &a, &b).unwrap();
        assert_eq!(x.at(0, 0).prec, 3);
        assert!(ring.eq(x.at(0, 0), &ring.one()));
        // inconsistent: 3x = 1 has no integral solution
        let b2 = Mat::from_fn(1, 1, |_, _| ring.one());
        assert!(solve_linear(&ring, &a, &b2).is_err());
    }

    #[test]
    fn solve_general_consistency() {
        let ring = LocalRing::unramified(5, 1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = loop {
                let m = Mat::from_fn(3, 3, |_, _| ring.random_el(&mut rng));
                if m.is_invertible(&ring) {
                    break m;
                }
            };
            let x0 = Mat::from_fn(3, 1, |_, _| ring.random_el(&mut rng));
            let b = a.mul(&ring, &x0);
            let x = solve_general(&ring, &a, &b).unwrap();
            assert!(a.mul(&ring, &x).eq(&ring, &b));
        }
    }

    #[test]
    fn residue_rank_counts() {
        let ring = LocalRing::unramified(3, 2, 3).unwrap();
        let id = Mat::identity(&ring, 4);
        assert_eq!(residue_rank(&ring, &id), 4);
        let pm = id.map(|e| ring.mul_pow_p(e, 1));
        assert_eq!(residue_rank(&ring, &pm), 0);
        let mut mixed = id.clone();
        mixed.set(2, 2, ring.from_u64(3));
        assert_eq!(residue_rank(&ring, &mixed), 3);
    }
}

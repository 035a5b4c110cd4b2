//! The rank-22 slope module of a height-`h` K3 crystal: formal part,
//! unit-root middle, and the twisted dual of the formal part, glued with
//! the hyperbolic-plus-middle Gram matrix.

use super::{reduce_slope, DieudonneModule, Slope};
use crate::padic::{LocalRing, Mat, RingEl, RingError};

pub const K3_RANK: usize = 22;

#[derive(Clone, Debug)]
pub struct K3SlopeData {
    pub module: DieudonneModule,
    /// Gram matrix of the crystal pairing in the block basis.
    pub gram: Mat<RingEl>,
    pub h: u32,
}

/// Working precision at which rank-22 slope computations are reliable.
pub fn slope_precision(m: usize) -> u32 {
    m as u32 * K3_RANK as u32 + 2
}

/// Assembles the slope module: formal block of height `h`, middle block
/// `p . U` on the complement of the hyperbolic pair, and the dual block
/// `e*_i -> p e*_(i+1)`, `e*_h -> p^2 e*_1`. `U` must be invertible and
/// preserve the middle Gram matrix `T` up to Frobenius:
/// `U^T T U = sigma(T)`.
pub fn k3_slope_module(
    ring: &LocalRing,
    h: u32,
    u_mid: &Mat<RingEl>,
    t_gram: &Mat<RingEl>,
) -> Result<K3SlopeData, RingError> {
    if h == 0 || h > 10 {
        return Err(RingError::BadParameter(format!(
            "height {h} outside the finite-height range 1..=10"
        )));
    }
    let hs = h as usize;
    let mid = K3_RANK - 2 * hs;
    if u_mid.rows != mid || u_mid.cols != mid || t_gram.rows != mid || t_gram.cols != mid {
        return Err(RingError::Shape(format!("middle blocks must be {mid} x {mid}")));
    }
    if !u_mid.is_invertible(ring) {
        return Err(RingError::Shape("middle operator must be invertible".into()));
    }
    if !t_gram.eq(ring, &t_gram.transpose()) || !t_gram.is_invertible(ring) {
        return Err(RingError::Shape(
            "middle Gram matrix must be symmetric and invertible".into(),
        ));
    }
    let utu = u_mid.transpose().mul(ring, t_gram).mul(ring, u_mid);
    if !utu.eq(ring, &t_gram.try_map(|x| ring.sigma(x))?) {
        return Err(RingError::BadParameter(
            "middle operator does not preserve its pairing".into(),
        ));
    }

    let formal = DieudonneModule::formal_group(ring, h)?;
    let middle = DieudonneModule::new(
        ring,
        u_mid.try_map(|x| Ok::<_, RingError>(ring.mul_pow_p(x, 1)))?,
    )?;
    let mut dual = Mat::zero(ring, hs, hs);
    let p = ring.from_u64(ring.p);
    for j in 0..hs - 1 {
        dual.set(j + 1, j, p.clone());
    }
    dual.set(0, hs - 1, ring.mul_pow_p(&ring.one(), 2));
    let dual = DieudonneModule::new(ring, dual)?;
    let module = formal.direct_sum(&middle)?.direct_sum(&dual)?;

    let gram = Mat::from_fn(K3_RANK, K3_RANK, |i, j| {
        let right = K3_RANK - hs;
        if i < hs && j >= right && j - right == i {
            ring.one()
        } else if j < hs && i >= right && i - right == j {
            ring.one()
        } else if (hs..right).contains(&i) && (hs..right).contains(&j) {
            t_gram.at(i - hs, j - hs).clone()
        } else {
            ring.zero()
        }
    });
    Ok(K3SlopeData { module, gram, h })
}

/// `(F x, F y) = p^2 sigma((x, y))`, i.e. `A^T B A = p^2 sigma(B)`.
pub fn check_crystal_pairing(data: &K3SlopeData) -> Result<bool, RingError> {
    let r = &data.module.ring;
    let a = &data.module.fmat;
    let lhs = a.transpose().mul(r, &data.gram).mul(r, a);
    let rhs = data
        .gram
        .try_map(|x| Ok::<_, RingError>(r.mul_pow_p(&r.sigma(x)?, 2)))?;
    Ok(lhs.eq(r, &rhs))
}

/// The Hodge-type filtration that makes the slope module strongly
/// divisible: step one omits only the last formal basis vector, step two
/// is the line spanned by the last dual basis vector.
pub fn hodge_filtration(ring: &LocalRing, h: u32) -> (Mat<RingEl>, Mat<RingEl>) {
    let hs = h as usize;
    let keep: Vec<usize> = (0..K3_RANK).filter(|&i| i != hs - 1).collect();
    let f1 = Mat::from_fn(K3_RANK, K3_RANK - 1, |i, j| {
        if i == keep[j] {
            ring.one()
        } else {
            ring.zero()
        }
    });
    let f2 = Mat::from_fn(K3_RANK, 1, |i, _| {
        if i == K3_RANK - 1 {
            ring.one()
        } else {
            ring.zero()
        }
    });
    (f1, f2)
}

/// The slope multiset `{1 - 1/h (x h), 1 (x 22-2h), 1 + 1/h (x h)}`,
/// ascending.
pub fn expected_k3_slopes(h: u32) -> Vec<Slope> {
    let hs = h as i64;
    let mut out = vec![reduce_slope(hs - 1, hs); h as usize];
    out.extend(vec![(1, 1); K3_RANK - 2 * h as usize]);
    out.extend(vec![reduce_slope(hs + 1, hs); h as usize]);
    out
}

//! Symmetric pairings into the weight-(-2) twist of the frame.
//!
//! A Gram matrix `B` on an effective display with degrees in `[0,2]` is
//! admissible when its support sits on complementary degrees (`d_i + d_j =
//! 2`), it is symmetric and perfect, and the Frobenius scales it by `p^2`:
//! `D_p phi^T B phi D_p = p^2 sigma_0(B)` with `D_p = diag(p^(d_j))`.

use super::{Display, DisplayError};
use crate::frames::FrameEl;
use crate::padic::Mat;

#[derive(Clone, Debug)]
pub struct PairingReport {
    pub support_ok: bool,
    pub symmetric: bool,
    pub perfect: bool,
    pub f_compatible: bool,
    pub precision: u32,
    pub notes: Vec<String>,
}

impl PairingReport {
    pub fn pass(&self) -> bool {
        self.support_ok && self.symmetric && self.perfect && self.f_compatible
    }
}

pub fn check_pairing(d: &Display, b: &Mat<FrameEl>) -> Result<PairingReport, DisplayError> {
    let n = d.rank();
    if b.rows != n || b.cols != n {
        return Err(DisplayError::Shape(format!(
            "Gram matrix is {}x{}, display has rank {n}",
            b.rows, b.cols
        )));
    }
    if !d.is_effective() || d.degs.iter().any(|&x| x > 2) {
        return Err(DisplayError::NotEffective);
    }
    let fr = d.frame.as_ref();
    let mut notes = Vec::new();

    let mut support_ok = true;
    for i in 0..n {
        for j in 0..n {
            if d.degs[i] + d.degs[j] != 2 && !fr.is_zero(b.at(i, j)) {
                support_ok = false;
                notes.push(format!(
                    "entry ({i},{j}) pairs degrees {} and {}",
                    d.degs[i], d.degs[j]
                ));
            }
        }
    }

    let symmetric = b.eq(fr, &b.transpose());
    if !symmetric {
        notes.push("Gram matrix is not symmetric".into());
    }
    let perfect = b.is_invertible(fr);
    if !perfect {
        notes.push("Gram matrix is not perfect".into());
    }

    let dp = Mat::from_fn(n, n, |i, j| {
        if i == j {
            fr.p_power(d.degs[j] as u32)
        } else {
            fr.zero()
        }
    });
    let lhs = dp
        .mul(fr, &d.phi.transpose())
        .mul(fr, b)
        .mul(fr, &d.phi)
        .mul(fr, &dp);
    let rhs = b
        .try_map(|x| fr.sigma0(x))?
        .scale(fr, &fr.p_power(2));
    let f_compatible = lhs.eq(fr, &rhs);
    if !f_compatible {
        notes.push("D_p phi^T B phi D_p != p^2 sigma(B)".into());
    }

    Ok(PairingReport {
        support_ok,
        symmetric,
        perfect,
        f_compatible,
        precision: fr.spec().prec,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displays::{unit_display, weight_display};
    use crate::frames::{build_frame, FrameSpec, RingSpec};

    #[test]
    fn hyperbolic_plane_passes_and_scaled_gram_fails() {
        for kind in ["tautological", "smallwitt"] {
            let fr = build_frame(&FrameSpec {
                kind: kind.into(),
                p: 3,
                m: 1,
                prec: 4,
                eta_len: 4,
                ring: if kind == "tautological" {
                    RingSpec::Unramified
                } else {
                    RingSpec::Monomial {
                        nilp: vec![2],
                        vanishing: vec![],
                    }
                },
            })
            .unwrap();
            let d = unit_display(fr.clone())
                .direct_sum(&weight_display(fr.clone(), -2))
                .unwrap();
            let anti = Mat::from_fn(2, 2, |i, j| if i + j == 1 { fr.one() } else { fr.zero() });
            let rep = check_pairing(&d, &anti).unwrap();
            assert!(rep.pass(), "{:?} over {}", rep.notes, fr.name());

            let scaled = anti.scale(fr.as_ref(), &fr.from_int(3));
            let rep = check_pairing(&d, &scaled).unwrap();
            assert!(!rep.perfect && rep.symmetric);

            // off-support entry
            let mut bad = anti.clone();
            bad.set(0, 0, fr.one());
            let rep = check_pairing(&d, &bad).unwrap();
            assert!(!rep.support_ok);
        }
    }
}

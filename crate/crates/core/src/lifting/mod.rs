//! End-to-end certified lifting of the ambient quadratic lattice.
//!
//! [`run_pipeline`] takes a problem description, builds the connected-block
//! Frobenius lift over a ramified Artin base in closed form, assembles the
//! full rank-22 display around it (unit-exponent middle, twisted dual,
//! hyperbolic glue), and packages everything into a self-contained
//! certificate.  [`verify_certificate`] re-derives every
//! verdict from the stored data alone — it never re-runs the solver — so a
//! third party can replay the checks.  [`sabotage`] produces surgically
//! corrupted variants of a certificate, one per check, for negative testing.

mod checks;
mod connected;
mod etale;
mod k3;

pub use checks::CheckRecord;
pub use connected::{lift_formal_group, lift_frobenius_endo, ConnectedLift};
pub use etale::{lift_etale, uniqueness_probe, ProbeReport};
pub use k3::{build_k3_display, BlockCols, K3Assembly, AMBIENT_RANK};

use crate::dieudonne::Slope;
use crate::displays::DisplayError;
use crate::frames::{build_frame, FrameEl, FrameMorphism, FrameSpec, RingSpec};
use crate::padic::{LocalRing, Mat, RingEl, RingError};
use std::collections::BTreeMap;

/// Certificate layout version.
pub const CERT_SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LiftError {
    #[error("bad problem: {0}")]
    BadProblem(String),
    #[error("internal: {0}")]
    Internal(String),
    #[error(transparent)]
    Display(#[from] DisplayError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// What to lift: residue field, ramification, refinement depth, and the
/// optional integral descriptors of the middle block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftProblem {
    pub p: u64,
    pub m: usize,
    pub h: u32,
    /// refinement depth; the base is the Artin quotient `V/pi^(n+1)`
    pub n: u32,
    pub prec: u32,
    pub eta_len: usize,
    pub seed: u64,
    /// middle-block structure matrix (defaults to the identity)
    pub u_mid: Option<Vec<Vec<i64>>>,
    /// middle-block Gram matrix (defaults to the identity)
    pub t_gram: Option<Vec<Vec<i64>>>,
}

impl LiftProblem {
    pub fn new(p: u64, m: usize, h: u32, n: u32) -> Self {
        LiftProblem {
            p,
            m,
            h,
            n,
            prec: 8,
            eta_len: 8,
            seed: 0,
            u_mid: None,
            t_gram: None,
        }
    }
}

/// Fixed conventions the verifier must agree on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConventionManifest {
    pub schema: u32,
    /// the similitude scales the pairing by `p^similitude_exponent`
    pub similitude_exponent: u32,
    pub eta_len: usize,
    pub notes: Vec<String>,
}

/// The lift transported into one Artin quotient stage of the tower.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub quot: u32,
    pub g_phi: Mat<FrameEl>,
    pub endo_mat: Mat<FrameEl>,
    pub endo_pres: BTreeMap<(usize, usize), FrameEl>,
    pub k_phi: Mat<FrameEl>,
}

/// Everything a third party needs to replay the checks: the problem, the
/// frame, all display and morphism matrices with their divided preimages,
/// the pairing, the unramified avatar with its filtration, the stage tower,
/// and the recorded verdicts.
#[derive(Clone, Debug)]
pub struct LiftCertificate {
    pub problem: LiftProblem,
    pub unit_teich: bool,
    pub units_tried: Vec<String>,
    pub frame_spec: FrameSpec,
    pub g_degs: Vec<i64>,
    pub g_phi: Mat<FrameEl>,
    pub endo_mat: Mat<FrameEl>,
    pub endo_pres: BTreeMap<(usize, usize), FrameEl>,
    pub h_phi: Mat<FrameEl>,
    pub sub_degs: Vec<i64>,
    pub sub_phi: Mat<FrameEl>,
    pub quo_degs: Vec<i64>,
    pub quo_phi: Mat<FrameEl>,
    pub k_degs: Vec<i64>,
    pub k_phi: Mat<FrameEl>,
    pub inj_sub: Mat<FrameEl>,
    pub inj_quo: Mat<FrameEl>,
    pub proj_sub: Mat<FrameEl>,
    pub proj_quo: Mat<FrameEl>,
    pub gram: Mat<FrameEl>,
    pub psi_mat: Mat<FrameEl>,
    pub psi_pres: BTreeMap<(usize, usize), FrameEl>,
    pub hodge_labels: Vec<i64>,
    pub block_cols: BlockCols,
    pub avatar_prec: u32,
    pub avatar_fmat: Mat<RingEl>,
    pub avatar_steps: Vec<Mat<RingEl>>,
    pub stages: Vec<StageRecord>,
    pub probe: ProbeReport,
    pub slopes: Vec<Slope>,
    pub manifest: ConventionManifest,
    pub checks: Vec<CheckRecord>,
}

impl LiftCertificate {
    pub fn all_green(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// The frame spec of one tower stage: same shape, shallower quotient.
pub(crate) fn stage_spec(top: &FrameSpec, quot: u32) -> FrameSpec {
    let mut sp = top.clone();
    if let RingSpec::Eisenstein { quot: q, .. } = &mut sp.ring {
        *q = Some(quot);
    }
    sp
}

fn identity_ints(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn validate_problem(pr: &LiftProblem) -> Result<(usize, Vec<Vec<i64>>, Vec<Vec<i64>>), LiftError> {
    if pr.p < 3 || pr.p % 2 == 0 {
        return Err(LiftError::BadProblem(format!(
            "p = {} is not an odd prime at least 3",
            pr.p
        )));
    }
    if pr.h == 0 || pr.h as usize * 2 >= AMBIENT_RANK {
        return Err(LiftError::BadProblem(format!(
            "height {} is outside 1..={}",
            pr.h,
            AMBIENT_RANK / 2 - 1
        )));
    }
    if pr.n + 1 < pr.h {
        return Err(LiftError::BadProblem(format!(
            "depth {} is too shallow: the Artin quotient pi^{} would kill a basis monomial \
             at height {}; need n + 1 >= h",
            pr.n,
            pr.n + 1,
            pr.h
        )));
    }
    if pr.h >= 2 && u64::from(pr.n + 1) > pr.p * u64::from(pr.h) {
        return Err(LiftError::BadProblem(format!(
            "depth {} is too deep for height {}: the adapted basis needs n + 1 <= p*h = {}",
            pr.n,
            pr.h,
            pr.p * u64::from(pr.h)
        )));
    }
    if pr.n + 1 > pr.h * pr.prec {
        return Err(LiftError::BadProblem(format!(
            "depth {} exceeds what precision {} can hold at height {}",
            pr.n, pr.prec, pr.h
        )));
    }
    if pr.eta_len < 2 {
        return Err(LiftError::BadProblem("digit length must be at least 2".into()));
    }
    let mid = AMBIENT_RANK - 2 * pr.h as usize;
    let u = pr.u_mid.clone().unwrap_or_else(|| identity_ints(mid));
    let t = pr.t_gram.clone().unwrap_or_else(|| identity_ints(mid));
    for (name, mat) in [("structure", &u), ("Gram", &t)] {
        if mat.len() != mid || mat.iter().any(|r| r.len() != mid) {
            return Err(LiftError::BadProblem(format!(
                "middle {name} matrix must be {mid} x {mid}"
            )));
        }
    }
    for i in 0..mid {
        for j in 0..mid {
            if t[i][j] != t[j][i] {
                return Err(LiftError::BadProblem("middle Gram matrix must be symmetric".into()));
            }
        }
    }
    // the structure matrix must be orthogonal for the Gram matrix, else no
    // similitude can exist
    let mut utu = vec![vec![0i64; mid]; mid];
    for i in 0..mid {
        for j in 0..mid {
            let mut s = 0i64;
            for a in 0..mid {
                for b in 0..mid {
                    s += u[a][i] * t[a][b] * u[b][j];
                }
            }
            utu[i][j] = s;
        }
    }
    if utu != t {
        return Err(LiftError::BadProblem(
            "middle structure matrix is not orthogonal for the Gram matrix".into(),
        ));
    }
    Ok((mid, u, t))
}

fn p_power_diag(ring: &LocalRing, degs: &[i64]) -> Mat<RingEl> {
    Mat::from_fn(degs.len(), degs.len(), |i, j| {
        if i == j {
            ring.mul_pow_p(&ring.one(), degs[i] as u32)
        } else {
            ring.zero()
        }
    })
}

/// Solve the problem end to end and assemble the certificate, including its
/// own verification verdicts.
pub fn run_pipeline(problem: &LiftProblem) -> Result<LiftCertificate, LiftError> {
    let (_, u, t) = validate_problem(problem)?;
    let LiftProblem { p, m, h, n, prec, eta_len, seed, .. } = problem.clone();

    // the connected block in closed form over the unit-one Eisenstein model
    let spec = FrameSpec {
        kind: "smallwitt".into(),
        p,
        m,
        prec,
        eta_len,
        ring: RingSpec::Eisenstein { h, teich_unit: false, quot: Some(n + 1) },
    };
    let fr = build_frame(&spec)
        .map_err(|e| LiftError::BadProblem(format!("cannot build frame: {e}")))?;
    let units_tried = vec!["one".to_string()];
    let unit_teich = false;
    let lift = lift_frobenius_endo(&fr, h)?;

    // middle block and its rigidity probe
    let h_disp = lift_etale(&fr, &u)?;
    let probe = uniqueness_probe(&fr, &h_disp, seed)?;

    // ambient assembly; the connected lift hands over its exact mirror block
    let asm = build_k3_display(
        &lift.display,
        &lift.endo.mat,
        &lift.pres,
        &h_disp,
        &t,
        m,
        Some(&lift.dual_endo),
    )?;

    // tower of Artin stages, lowest first; the top stage is the lift itself
    let mut stages = Vec::new();
    for q in h..=n + 1 {
        let rec = if q == n + 1 {
            StageRecord {
                quot: q,
                g_phi: lift.display.phi.clone(),
                endo_mat: lift.endo.mat.clone(),
                endo_pres: lift.pres.clone(),
                k_phi: asm.k.phi.clone(),
            }
        } else {
            let sfr = build_frame(&stage_spec(&spec, q))?;
            let red = FrameMorphism::reduction(fr.clone(), sfr.clone())?;
            let mut endo_pres = BTreeMap::new();
            for (key, pre) in &lift.pres {
                endo_pres.insert(*key, red.apply(pre)?);
            }
            StageRecord {
                quot: q,
                g_phi: lift.display.phi.try_map(|e| red.apply(e))?,
                endo_mat: lift.endo.mat.try_map(|e| red.apply(e))?,
                endo_pres,
                k_phi: asm.k.phi.try_map(|e| red.apply(e))?,
            }
        };
        stages.push(rec);
    }

    // unramified avatar of the ambient display, with its filtration steps
    let avatar_prec = prec;
    let ring = LocalRing::unramified(p, m, avatar_prec)?;
    let w = checks::wpart_matrix(fr.as_ref(), &asm.k.phi, &ring)?;
    let avatar_fmat = w.mul(&ring, &p_power_diag(&ring, &asm.k.degs));
    let ambient = asm.k.rank();
    let step_for = |min_deg: i64| {
        let cols: Vec<usize> =
            (0..ambient).filter(|&i| asm.k.degs[i] >= min_deg).collect();
        Mat::from_fn(ambient, cols.len(), |i, j| {
            if i == cols[j] {
                ring.one()
            } else {
                ring.zero()
            }
        })
    };
    let avatar_steps = vec![step_for(1), step_for(2)];

    let slopes = checks::blockwise_slopes(
        fr.as_ref(),
        &lift.display.phi,
        &lift.display.degs,
        &h_disp.phi,
        p,
        m,
        h,
    )
    .map_err(LiftError::Internal)?;

    let manifest = ConventionManifest {
        schema: CERT_SCHEMA,
        similitude_exponent: 2 * m as u32,
        eta_len,
        notes: asm.notes.clone(),
    };

    let mut cert = LiftCertificate {
        problem: problem.clone(),
        unit_teich,
        units_tried,
        frame_spec: spec,
        g_degs: lift.display.degs.clone(),
        g_phi: lift.display.phi.clone(),
        endo_mat: lift.endo.mat.clone(),
        endo_pres: lift.pres.clone(),
        h_phi: h_disp.phi.clone(),
        sub_degs: asm.sub.degs.clone(),
        sub_phi: asm.sub.phi.clone(),
        quo_degs: asm.quo.degs.clone(),
        quo_phi: asm.quo.phi.clone(),
        k_degs: asm.k.degs.clone(),
        k_phi: asm.k.phi.clone(),
        inj_sub: asm.inj_sub.mat.clone(),
        inj_quo: asm.inj_quo.mat.clone(),
        proj_sub: asm.proj_sub.mat.clone(),
        proj_quo: asm.proj_quo.mat.clone(),
        gram: asm.gram.clone(),
        psi_mat: asm.psi_mat.clone(),
        psi_pres: asm.psi_pres.clone(),
        hodge_labels: asm.hodge_labels.clone(),
        block_cols: asm.block_cols.clone(),
        avatar_prec,
        avatar_fmat,
        avatar_steps,
        stages,
        probe,
        slopes,
        manifest,
        checks: Vec::new(),
    };
    cert.checks = verify_certificate(&cert)?;
    Ok(cert)
}

/// Replay every check from the stored data.  Pure: no solver, no retries;
/// each record says what held and what did not.
pub fn verify_certificate(cert: &LiftCertificate) -> Result<Vec<CheckRecord>, LiftError> {
    if cert.manifest.schema != CERT_SCHEMA {
        return Err(LiftError::BadProblem(format!(
            "certificate schema version {} is not supported (this build verifies version {CERT_SCHEMA})",
            cert.manifest.schema
        )));
    }
    let fr = build_frame(&cert.frame_spec)
        .map_err(|e| LiftError::BadProblem(format!("cannot rebuild frame: {e}")))?;
    Ok(vec![
        checks::check_c1(cert, &fr),
        checks::check_c2(cert, &fr),
        checks::check_c3(cert, &fr),
        checks::check_c4(cert, &fr),
        checks::check_c5(cert, &fr),
        checks::check_c6(cert, &fr),
        checks::check_slopes(cert, &fr),
        checks::check_probe(cert),
    ])
}

/// One surgical corruption per replayable check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sabotage {
    ExactSequence,
    QuotientSection,
    HodgeLabels,
    Similitude,
    Divisibility,
    Tower,
}

impl Sabotage {
    pub fn all() -> [Sabotage; 6] {
        [
            Sabotage::ExactSequence,
            Sabotage::QuotientSection,
            Sabotage::HodgeLabels,
            Sabotage::Similitude,
            Sabotage::Divisibility,
            Sabotage::Tower,
        ]
    }

    /// Name of the check this corruption must flip.
    pub fn target(&self) -> &'static str {
        match self {
            Sabotage::ExactSequence => "exact-sequence",
            Sabotage::QuotientSection => "quotient-section",
            Sabotage::HodgeLabels => "hodge-labels",
            Sabotage::Similitude => "pairing-similitude",
            Sabotage::Divisibility => "strong-divisibility",
            Sabotage::Tower => "tower-coherence",
        }
    }
}

/// Corrupt one certified fact, leaving everything else byte-identical.  The
/// corrupted certificate is expected to fail exactly the targeted check.
pub fn sabotage(cert: &LiftCertificate, which: Sabotage) -> Result<LiftCertificate, LiftError> {
    let fr = build_frame(&cert.frame_spec)
        .map_err(|e| LiftError::BadProblem(format!("cannot rebuild frame: {e}")))?;
    let frd = fr.as_ref();
    let mut c = cert.clone();
    match which {
        Sabotage::ExactSequence => {
            // a unit leak from the sub-inclusion into the dual line: hits only
            // the composite-zero leg, since it sits outside every square
            // degree block
            let row = c
                .k_degs
                .iter()
                .position(|&d| d == 2)
                .ok_or_else(|| LiftError::Internal("no top-degree line".into()))?;
            let e = frd.add(c.inj_sub.at(row, 0), &frd.one())?;
            c.inj_sub.set(row, 0, e);
        }
        Sabotage::QuotientSection => {
            let pe = fr.p_power(1);
            for r in 0..c.inj_quo.rows {
                let e = frd.mul(c.inj_quo.at(r, 0), &pe)?;
                c.inj_quo.set(r, 0, e);
            }
        }
        Sabotage::HodgeLabels => {
            c.hodge_labels.swap(0, 1);
        }
        Sabotage::Similitude => {
            let pe = fr.p_power(1);
            for &a in &c.block_cols.mid {
                for &b in &c.block_cols.mid {
                    let e = frd.mul(c.psi_mat.at(a, b), &pe)?;
                    c.psi_mat.set(a, b, e);
                }
            }
        }
        Sabotage::Divisibility => {
            // point the top filtration step at a level-one line instead
            let ring = LocalRing::unramified(c.problem.p, c.problem.m, c.avatar_prec)?;
            let wrong = c
                .k_degs
                .iter()
                .position(|&d| d == 1)
                .ok_or_else(|| LiftError::Internal("no level-one line".into()))?;
            let n = c.k_degs.len();
            c.avatar_steps[1] = Mat::from_fn(n, 1, |i, _| {
                if i == wrong {
                    ring.one()
                } else {
                    ring.zero()
                }
            });
        }
        Sabotage::Tower => {
            let st = c
                .stages
                .first_mut()
                .ok_or_else(|| LiftError::Internal("no stage records".into()))?;
            let sfr = build_frame(&stage_spec(&c.frame_spec, st.quot))
                .map_err(|e| LiftError::Internal(e.to_string()))?;
            let e = sfr.add(st.endo_mat.at(0, 0), &sfr.one())?;
            st.endo_mat.set(0, 0, e);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pipeline_height_one_goes_green() {
        let cert = run_pipeline(&LiftProblem::new(3, 1, 1, 1)).unwrap();
        assert_eq!(cert.checks.len(), 8);
        for c in &cert.checks {
            assert!(c.pass, "{}: {:?}", c.name, c.notes);
        }
        assert!(cert.all_green());
        assert_eq!(cert.k_degs.len(), AMBIENT_RANK);
        assert_eq!(cert.stages.len(), 2);
        assert!(!cert.unit_teich);
    }

    #[test]
    fn pipeline_height_two_goes_green() {
        let cert = run_pipeline(&LiftProblem::new(3, 1, 2, 2)).unwrap();
        for c in &cert.checks {
            assert!(c.pass, "{}: {:?}", c.name, c.notes);
        }
        assert!(cert.manifest.notes.is_empty(), "{:?}", cert.manifest.notes);
        assert_eq!(cert.stages.len(), 2);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let a = run_pipeline(&LiftProblem::new(3, 1, 1, 1)).unwrap();
        let b = run_pipeline(&LiftProblem::new(3, 1, 1, 1)).unwrap();
        assert_eq!(a.g_phi, b.g_phi);
        assert_eq!(a.psi_mat, b.psi_mat);
        assert_eq!(a.avatar_fmat, b.avatar_fmat);
        assert_eq!(a.slopes, b.slopes);
    }

    #[test]
    fn verification_is_solver_free_and_stable() {
        let cert = run_pipeline(&LiftProblem::new(3, 1, 1, 1)).unwrap();
        let again = verify_certificate(&cert).unwrap();
        assert_eq!(again.len(), cert.checks.len());
        for (a, b) in cert.checks.iter().zip(&again) {
            assert_eq!(a.pass, b.pass, "{}", a.name);
        }
    }

    #[test]
    fn section_sabotage_flips_only_its_check() {
        let cert = run_pipeline(&LiftProblem::new(3, 1, 1, 1)).unwrap();
        let bad = sabotage(&cert, Sabotage::QuotientSection).unwrap();
        let checks = verify_certificate(&bad).unwrap();
        for c in &checks {
            if c.name == Sabotage::QuotientSection.target() {
                assert!(!c.pass, "target check unexpectedly passed");
            } else {
                assert!(c.pass, "{} flipped collaterally: {:?}", c.name, c.notes);
            }
        }
    }

    #[test]
    fn malformed_problems_are_rejected() {
        assert!(matches!(
            run_pipeline(&LiftProblem::new(2, 1, 1, 1)),
            Err(LiftError::BadProblem(_))
        ));
        assert!(matches!(
            run_pipeline(&LiftProblem::new(3, 1, 11, 11)),
            Err(LiftError::BadProblem(_))
        ));
        assert!(matches!(
            run_pipeline(&LiftProblem::new(3, 1, 3, 1)),
            Err(LiftError::BadProblem(_))
        ));
        assert!(matches!(
            run_pipeline(&LiftProblem::new(3, 1, 2, 6)),
            Err(LiftError::BadProblem(_))
        ));
        let mut pr = LiftProblem::new(3, 1, 2, 2);
        pr.u_mid = Some({
            let mut u = identity_ints(18);
            u[0][1] = 1;
            u
        });
        assert!(matches!(run_pipeline(&pr), Err(LiftError::BadProblem(_))));
    }
}

//! Canonical JSON encoding of certificates and report data.
//!
//! One fixed layout per type.  Keys come out sorted (the underlying map is
//! ordered), every number is an integer — rationals ride as
//! `[numerator, denominator]` pairs — and encoding is deterministic, so the
//! same value always produces the same bytes and outputs can be compared
//! bytewise.  Ring coefficients are rejected if they overflow the canonical
//! integer range, which no supported precision reaches.

use crate::dieudonne::Slope;
use crate::frames::{FrameEl, FrameSpec, RingSpec};
use crate::lifting::{
    BlockCols, CheckRecord, ConventionManifest, LiftCertificate, LiftProblem, ProbeReport,
    StageRecord,
};
use crate::padic::{Mat, RingEl};
use crate::witt::small::SwEl;
use serde_json::{Map, Value};
use std::collections::BTreeMap;

/// Layout version of the value encodings in this module.
pub const VALUE_SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed {0}")]
    Shape(String),
    #[error("coefficient {0} does not fit the canonical integer range")]
    Overflow(u128),
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn get<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| JsonError::Shape(format!("{what}: missing key `{key}`")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64, JsonError> {
    v.as_u64().ok_or_else(|| JsonError::Shape(format!("{what}: expected an unsigned integer")))
}

fn as_u32(v: &Value, what: &str) -> Result<u32, JsonError> {
    u32::try_from(as_u64(v, what)?).map_err(|_| JsonError::Shape(format!("{what}: out of range")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize, JsonError> {
    usize::try_from(as_u64(v, what)?)
        .map_err(|_| JsonError::Shape(format!("{what}: out of range")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64, JsonError> {
    v.as_i64().ok_or_else(|| JsonError::Shape(format!("{what}: expected an integer")))
}

fn as_bool(v: &Value, what: &str) -> Result<bool, JsonError> {
    v.as_bool().ok_or_else(|| JsonError::Shape(format!("{what}: expected a boolean")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, JsonError> {
    v.as_str().ok_or_else(|| JsonError::Shape(format!("{what}: expected a string")))
}

fn as_arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| JsonError::Shape(format!("{what}: expected an array")))
}

fn strings_value(v: &[String]) -> Value {
    Value::Array(v.iter().map(|s| Value::String(s.clone())).collect())
}

fn strings_from(v: &Value, what: &str) -> Result<Vec<String>, JsonError> {
    as_arr(v, what)?.iter().map(|s| Ok(as_str(s, what)?.to_string())).collect()
}

fn i64s_value(v: &[i64]) -> Value {
    Value::Array(v.iter().map(|&x| Value::from(x)).collect())
}

fn i64s_from(v: &Value, what: &str) -> Result<Vec<i64>, JsonError> {
    as_arr(v, what)?.iter().map(|x| as_i64(x, what)).collect()
}

fn usizes_value(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|&x| Value::from(x as u64)).collect())
}

fn usizes_from(v: &Value, what: &str) -> Result<Vec<usize>, JsonError> {
    as_arr(v, what)?.iter().map(|x| as_usize(x, what)).collect()
}

// ---- ring and frame elements ----

pub fn ring_el_value(e: &RingEl) -> Result<Value, JsonError> {
    let mut c = Vec::with_capacity(e.c.len());
    for &x in &e.c {
        c.push(Value::from(u64::try_from(x).map_err(|_| JsonError::Overflow(x))?));
    }
    Ok(obj(vec![("c", Value::Array(c)), ("prec", Value::from(e.prec))]))
}

pub fn ring_el_from(v: &Value, what: &str) -> Result<RingEl, JsonError> {
    let c = as_arr(get(v, "c", what)?, what)?
        .iter()
        .map(|x| Ok(u128::from(as_u64(x, what)?)))
        .collect::<Result<Vec<u128>, JsonError>>()?;
    let prec = as_u32(get(v, "prec", what)?, what)?;
    Ok(RingEl { c, prec })
}

pub fn sw_el_value(e: &SwEl) -> Result<Value, JsonError> {
    let eta = e.eta.iter().map(ring_el_value).collect::<Result<Vec<_>, _>>()?;
    Ok(obj(vec![("eta", Value::Array(eta)), ("w", ring_el_value(&e.w)?)]))
}

pub fn sw_el_from(v: &Value, what: &str) -> Result<SwEl, JsonError> {
    let w = ring_el_from(get(v, "w", what)?, what)?;
    let eta = as_arr(get(v, "eta", what)?, what)?
        .iter()
        .map(|x| ring_el_from(x, what))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SwEl { w, eta })
}

pub fn frame_el_value(e: &FrameEl) -> Result<Value, JsonError> {
    Ok(match e {
        FrameEl::Ring(r) => obj(vec![("ring", ring_el_value(r)?)]),
        FrameEl::SmallWitt(s) => obj(vec![("sw", sw_el_value(s)?)]),
    })
}

pub fn frame_el_from(v: &Value, what: &str) -> Result<FrameEl, JsonError> {
    if let Some(r) = v.get("ring") {
        Ok(FrameEl::Ring(ring_el_from(r, what)?))
    } else if let Some(s) = v.get("sw") {
        Ok(FrameEl::SmallWitt(sw_el_from(s, what)?))
    } else {
        Err(JsonError::Shape(format!("{what}: expected a `ring` or `sw` element")))
    }
}

// ---- matrices ----

pub fn mat_value(m: &Mat<FrameEl>) -> Result<Value, JsonError> {
    let entries = m.d.iter().map(frame_el_value).collect::<Result<Vec<_>, _>>()?;
    Ok(obj(vec![
        ("cols", Value::from(m.cols as u64)),
        ("entries", Value::Array(entries)),
        ("rows", Value::from(m.rows as u64)),
    ]))
}

pub fn mat_from(v: &Value, what: &str) -> Result<Mat<FrameEl>, JsonError> {
    let rows = as_usize(get(v, "rows", what)?, what)?;
    let cols = as_usize(get(v, "cols", what)?, what)?;
    let d = as_arr(get(v, "entries", what)?, what)?
        .iter()
        .map(|x| frame_el_from(x, what))
        .collect::<Result<Vec<_>, _>>()?;
    if d.len() != rows * cols {
        return Err(JsonError::Shape(format!("{what}: {rows}x{cols} needs {} entries", rows * cols)));
    }
    Ok(Mat { rows, cols, d })
}

pub fn ring_mat_value(m: &Mat<RingEl>) -> Result<Value, JsonError> {
    let entries = m.d.iter().map(ring_el_value).collect::<Result<Vec<_>, _>>()?;
    Ok(obj(vec![
        ("cols", Value::from(m.cols as u64)),
        ("entries", Value::Array(entries)),
        ("rows", Value::from(m.rows as u64)),
    ]))
}

pub fn ring_mat_from(v: &Value, what: &str) -> Result<Mat<RingEl>, JsonError> {
    let rows = as_usize(get(v, "rows", what)?, what)?;
    let cols = as_usize(get(v, "cols", what)?, what)?;
    let d = as_arr(get(v, "entries", what)?, what)?
        .iter()
        .map(|x| ring_el_from(x, what))
        .collect::<Result<Vec<_>, _>>()?;
    if d.len() != rows * cols {
        return Err(JsonError::Shape(format!("{what}: {rows}x{cols} needs {} entries", rows * cols)));
    }
    Ok(Mat { rows, cols, d })
}

fn pres_value(p: &BTreeMap<(usize, usize), FrameEl>) -> Result<Value, JsonError> {
    let mut out = Vec::with_capacity(p.len());
    for (&(i, j), e) in p {
        out.push(Value::Array(vec![
            Value::from(i as u64),
            Value::from(j as u64),
            frame_el_value(e)?,
        ]));
    }
    Ok(Value::Array(out))
}

fn pres_from(v: &Value, what: &str) -> Result<BTreeMap<(usize, usize), FrameEl>, JsonError> {
    let mut out = BTreeMap::new();
    for t in as_arr(v, what)? {
        let t = as_arr(t, what)?;
        if t.len() != 3 {
            return Err(JsonError::Shape(format!("{what}: expected [row, col, element]")));
        }
        out.insert(
            (as_usize(&t[0], what)?, as_usize(&t[1], what)?),
            frame_el_from(&t[2], what)?,
        );
    }
    Ok(out)
}

// ---- specs ----

pub fn ring_spec_value(r: &RingSpec) -> Value {
    match r {
        RingSpec::Unramified => obj(vec![("type", Value::from("unramified"))]),
        RingSpec::Monomial { nilp, vanishing } => obj(vec![
            ("nilp", Value::Array(nilp.iter().map(|&x| Value::from(x)).collect())),
            ("type", Value::from("monomial")),
            (
                "vanishing",
                Value::Array(
                    vanishing
                        .iter()
                        .map(|r| Value::Array(r.iter().map(|&x| Value::from(x)).collect()))
                        .collect(),
                ),
            ),
        ]),
        RingSpec::Eisenstein { h, teich_unit, quot } => obj(vec![
            ("h", Value::from(*h)),
            ("quot", quot.map_or(Value::Null, Value::from)),
            ("teich_unit", Value::from(*teich_unit)),
            ("type", Value::from("eisenstein")),
        ]),
    }
}

pub fn ring_spec_from(v: &Value, what: &str) -> Result<RingSpec, JsonError> {
    match as_str(get(v, "type", what)?, what)? {
        "unramified" => Ok(RingSpec::Unramified),
        "monomial" => {
            let nilp = as_arr(get(v, "nilp", what)?, what)?
                .iter()
                .map(|x| as_u32(x, what))
                .collect::<Result<Vec<_>, _>>()?;
            let vanishing = as_arr(get(v, "vanishing", what)?, what)?
                .iter()
                .map(|r| {
                    as_arr(r, what)?.iter().map(|x| as_u32(x, what)).collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RingSpec::Monomial { nilp, vanishing })
        }
        "eisenstein" => {
            let h = as_u32(get(v, "h", what)?, what)?;
            let teich_unit = as_bool(get(v, "teich_unit", what)?, what)?;
            let q = get(v, "quot", what)?;
            let quot = if q.is_null() { None } else { Some(as_u32(q, what)?) };
            Ok(RingSpec::Eisenstein { h, teich_unit, quot })
        }
        other => Err(JsonError::Shape(format!("{what}: unknown ring type `{other}`"))),
    }
}

pub fn frame_spec_value(s: &FrameSpec) -> Value {
    obj(vec![
        ("eta_len", Value::from(s.eta_len as u64)),
        ("kind", Value::from(s.kind.clone())),
        ("m", Value::from(s.m as u64)),
        ("p", Value::from(s.p)),
        ("prec", Value::from(s.prec)),
        ("ring", ring_spec_value(&s.ring)),
    ])
}

pub fn frame_spec_from(v: &Value, what: &str) -> Result<FrameSpec, JsonError> {
    Ok(FrameSpec {
        kind: as_str(get(v, "kind", what)?, what)?.to_string(),
        p: as_u64(get(v, "p", what)?, what)?,
        m: as_usize(get(v, "m", what)?, what)?,
        prec: as_u32(get(v, "prec", what)?, what)?,
        eta_len: as_usize(get(v, "eta_len", what)?, what)?,
        ring: ring_spec_from(get(v, "ring", what)?, what)?,
    })
}

// ---- slopes, reports, problem ----

pub fn slopes_value(s: &[Slope]) -> Value {
    Value::Array(
        s.iter()
            .map(|&(n, d)| Value::Array(vec![Value::from(n), Value::from(d)]))
            .collect(),
    )
}

pub fn slopes_from(v: &Value, what: &str) -> Result<Vec<Slope>, JsonError> {
    as_arr(v, what)?
        .iter()
        .map(|p| {
            let p = as_arr(p, what)?;
            if p.len() != 2 {
                return Err(JsonError::Shape(format!("{what}: a slope is [num, den]")));
            }
            Ok((as_i64(&p[0], what)?, as_i64(&p[1], what)?))
        })
        .collect()
}

fn ints_opt_value(v: &Option<Vec<Vec<i64>>>) -> Value {
    match v {
        None => Value::Null,
        Some(rows) => Value::Array(rows.iter().map(|r| i64s_value(r)).collect()),
    }
}

fn ints_opt_from(v: &Value, what: &str) -> Result<Option<Vec<Vec<i64>>>, JsonError> {
    if v.is_null() {
        return Ok(None);
    }
    Ok(Some(
        as_arr(v, what)?.iter().map(|r| i64s_from(r, what)).collect::<Result<Vec<_>, _>>()?,
    ))
}

pub fn problem_value(p: &LiftProblem) -> Value {
    obj(vec![
        ("eta_len", Value::from(p.eta_len as u64)),
        ("h", Value::from(p.h)),
        ("m", Value::from(p.m as u64)),
        ("n", Value::from(p.n)),
        ("p", Value::from(p.p)),
        ("prec", Value::from(p.prec)),
        ("seed", Value::from(p.seed)),
        ("t_gram", ints_opt_value(&p.t_gram)),
        ("u_mid", ints_opt_value(&p.u_mid)),
    ])
}

pub fn problem_from(v: &Value, what: &str) -> Result<LiftProblem, JsonError> {
    Ok(LiftProblem {
        p: as_u64(get(v, "p", what)?, what)?,
        m: as_usize(get(v, "m", what)?, what)?,
        h: as_u32(get(v, "h", what)?, what)?,
        n: as_u32(get(v, "n", what)?, what)?,
        prec: as_u32(get(v, "prec", what)?, what)?,
        eta_len: as_usize(get(v, "eta_len", what)?, what)?,
        seed: as_u64(get(v, "seed", what)?, what)?,
        u_mid: ints_opt_from(get(v, "u_mid", what)?, what)?,
        t_gram: ints_opt_from(get(v, "t_gram", what)?, what)?,
    })
}

pub fn check_value(c: &CheckRecord) -> Value {
    obj(vec![
        ("name", Value::from(c.name.clone())),
        ("notes", strings_value(&c.notes)),
        ("pass", Value::from(c.pass)),
        ("precision", Value::from(c.precision)),
    ])
}

pub fn check_from(v: &Value, what: &str) -> Result<CheckRecord, JsonError> {
    Ok(CheckRecord {
        name: as_str(get(v, "name", what)?, what)?.to_string(),
        pass: as_bool(get(v, "pass", what)?, what)?,
        precision: as_u32(get(v, "precision", what)?, what)?,
        notes: strings_from(get(v, "notes", what)?, what)?,
    })
}

fn probe_value(p: &ProbeReport) -> Value {
    obj(vec![
        ("attempted", Value::from(p.attempted)),
        ("converged", Value::from(p.converged)),
        ("intertwines", Value::from(p.intertwines)),
        ("iterations", Value::from(p.iterations)),
        ("unipotent", Value::from(p.unipotent)),
    ])
}

fn probe_from(v: &Value, what: &str) -> Result<ProbeReport, JsonError> {
    Ok(ProbeReport {
        attempted: as_bool(get(v, "attempted", what)?, what)?,
        converged: as_bool(get(v, "converged", what)?, what)?,
        iterations: as_u32(get(v, "iterations", what)?, what)?,
        intertwines: as_bool(get(v, "intertwines", what)?, what)?,
        unipotent: as_bool(get(v, "unipotent", what)?, what)?,
    })
}

fn manifest_value(m: &ConventionManifest) -> Value {
    obj(vec![
        ("eta_len", Value::from(m.eta_len as u64)),
        ("notes", strings_value(&m.notes)),
        ("schema", Value::from(m.schema)),
        ("similitude_exponent", Value::from(m.similitude_exponent)),
    ])
}

fn manifest_from(v: &Value, what: &str) -> Result<ConventionManifest, JsonError> {
    Ok(ConventionManifest {
        schema: as_u32(get(v, "schema", what)?, what)?,
        similitude_exponent: as_u32(get(v, "similitude_exponent", what)?, what)?,
        eta_len: as_usize(get(v, "eta_len", what)?, what)?,
        notes: strings_from(get(v, "notes", what)?, what)?,
    })
}

fn stage_value(s: &StageRecord) -> Result<Value, JsonError> {
    Ok(obj(vec![
        ("endo_mat", mat_value(&s.endo_mat)?),
        ("endo_pres", pres_value(&s.endo_pres)?),
        ("g_phi", mat_value(&s.g_phi)?),
        ("k_phi", mat_value(&s.k_phi)?),
        ("quot", Value::from(s.quot)),
    ]))
}

fn stage_from(v: &Value, what: &str) -> Result<StageRecord, JsonError> {
    Ok(StageRecord {
        quot: as_u32(get(v, "quot", what)?, what)?,
        g_phi: mat_from(get(v, "g_phi", what)?, what)?,
        endo_mat: mat_from(get(v, "endo_mat", what)?, what)?,
        endo_pres: pres_from(get(v, "endo_pres", what)?, what)?,
        k_phi: mat_from(get(v, "k_phi", what)?, what)?,
    })
}

fn block_cols_value(b: &BlockCols) -> Value {
    obj(vec![
        ("conn", usizes_value(&b.conn)),
        ("dual", usizes_value(&b.dual)),
        ("mid", usizes_value(&b.mid)),
    ])
}

fn block_cols_from(v: &Value, what: &str) -> Result<BlockCols, JsonError> {
    Ok(BlockCols {
        conn: usizes_from(get(v, "conn", what)?, what)?,
        mid: usizes_from(get(v, "mid", what)?, what)?,
        dual: usizes_from(get(v, "dual", what)?, what)?,
    })
}

// ---- the certificate ----

pub fn certificate_value(c: &LiftCertificate) -> Result<Value, JsonError> {
    let stages = c.stages.iter().map(stage_value).collect::<Result<Vec<_>, _>>()?;
    let steps = c.avatar_steps.iter().map(ring_mat_value).collect::<Result<Vec<_>, _>>()?;
    Ok(obj(vec![
        ("avatar_fmat", ring_mat_value(&c.avatar_fmat)?),
        ("avatar_prec", Value::from(c.avatar_prec)),
        ("avatar_steps", Value::Array(steps)),
        ("block_cols", block_cols_value(&c.block_cols)),
        ("checks", Value::Array(c.checks.iter().map(check_value).collect())),
        ("endo_mat", mat_value(&c.endo_mat)?),
        ("endo_pres", pres_value(&c.endo_pres)?),
        ("frame_spec", frame_spec_value(&c.frame_spec)),
        ("g_degs", i64s_value(&c.g_degs)),
        ("g_phi", mat_value(&c.g_phi)?),
        ("gram", mat_value(&c.gram)?),
        ("h_phi", mat_value(&c.h_phi)?),
        ("hodge_labels", i64s_value(&c.hodge_labels)),
        ("inj_quo", mat_value(&c.inj_quo)?),
        ("inj_sub", mat_value(&c.inj_sub)?),
        ("k_degs", i64s_value(&c.k_degs)),
        ("k_phi", mat_value(&c.k_phi)?),
        ("manifest", manifest_value(&c.manifest)),
        ("probe", probe_value(&c.probe)),
        ("problem", problem_value(&c.problem)),
        ("proj_quo", mat_value(&c.proj_quo)?),
        ("proj_sub", mat_value(&c.proj_sub)?),
        ("psi_mat", mat_value(&c.psi_mat)?),
        ("psi_pres", pres_value(&c.psi_pres)?),
        ("quo_degs", i64s_value(&c.quo_degs)),
        ("quo_phi", mat_value(&c.quo_phi)?),
        ("slopes", slopes_value(&c.slopes)),
        ("stages", Value::Array(stages)),
        ("sub_degs", i64s_value(&c.sub_degs)),
        ("sub_phi", mat_value(&c.sub_phi)?),
        ("unit_teich", Value::from(c.unit_teich)),
        ("units_tried", strings_value(&c.units_tried)),
    ]))
}

pub fn certificate_from(v: &Value) -> Result<LiftCertificate, JsonError> {
    let w = "certificate";
    Ok(LiftCertificate {
        problem: problem_from(get(v, "problem", w)?, "problem")?,
        unit_teich: as_bool(get(v, "unit_teich", w)?, w)?,
        units_tried: strings_from(get(v, "units_tried", w)?, w)?,
        frame_spec: frame_spec_from(get(v, "frame_spec", w)?, "frame_spec")?,
        g_degs: i64s_from(get(v, "g_degs", w)?, "g_degs")?,
        g_phi: mat_from(get(v, "g_phi", w)?, "g_phi")?,
        endo_mat: mat_from(get(v, "endo_mat", w)?, "endo_mat")?,
        endo_pres: pres_from(get(v, "endo_pres", w)?, "endo_pres")?,
        h_phi: mat_from(get(v, "h_phi", w)?, "h_phi")?,
        sub_degs: i64s_from(get(v, "sub_degs", w)?, "sub_degs")?,
        sub_phi: mat_from(get(v, "sub_phi", w)?, "sub_phi")?,
        quo_degs: i64s_from(get(v, "quo_degs", w)?, "quo_degs")?,
        quo_phi: mat_from(get(v, "quo_phi", w)?, "quo_phi")?,
        k_degs: i64s_from(get(v, "k_degs", w)?, "k_degs")?,
        k_phi: mat_from(get(v, "k_phi", w)?, "k_phi")?,
        inj_sub: mat_from(get(v, "inj_sub", w)?, "inj_sub")?,
        inj_quo: mat_from(get(v, "inj_quo", w)?, "inj_quo")?,
        proj_sub: mat_from(get(v, "proj_sub", w)?, "proj_sub")?,
        proj_quo: mat_from(get(v, "proj_quo", w)?, "proj_quo")?,
        gram: mat_from(get(v, "gram", w)?, "gram")?,
        psi_mat: mat_from(get(v, "psi_mat", w)?, "psi_mat")?,
        psi_pres: pres_from(get(v, "psi_pres", w)?, "psi_pres")?,
        hodge_labels: i64s_from(get(v, "hodge_labels", w)?, "hodge_labels")?,
        block_cols: block_cols_from(get(v, "block_cols", w)?, "block_cols")?,
        avatar_prec: as_u32(get(v, "avatar_prec", w)?, w)?,
        avatar_fmat: ring_mat_from(get(v, "avatar_fmat", w)?, "avatar_fmat")?,
        avatar_steps: as_arr(get(v, "avatar_steps", w)?, w)?
            .iter()
            .map(|s| ring_mat_from(s, "avatar_steps"))
            .collect::<Result<Vec<_>, _>>()?,
        stages: as_arr(get(v, "stages", w)?, w)?
            .iter()
            .map(|s| stage_from(s, "stages"))
            .collect::<Result<Vec<_>, _>>()?,
        probe: probe_from(get(v, "probe", w)?, "probe")?,
        slopes: slopes_from(get(v, "slopes", w)?, "slopes")?,
        manifest: manifest_from(get(v, "manifest", w)?, "manifest")?,
        checks: as_arr(get(v, "checks", w)?, w)?
            .iter()
            .map(|c| check_from(c, "checks"))
            .collect::<Result<Vec<_>, _>>()?,
    })
}

/// Canonical bytes of a value: sorted keys, two-space indentation, one
/// trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serialization");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::{run_pipeline, verify_certificate};

    #[test]
    fn certificate_roundtrip_is_bytewise_stable() {
        let cert = run_pipeline(&LiftProblem::new(3, 1, 1, 1)).unwrap();
        let v = certificate_value(&cert).unwrap();
        let s1 = to_canonical_string(&v);
        let back = certificate_from(&serde_json::from_str(&s1).unwrap()).unwrap();
        let s2 = to_canonical_string(&certificate_value(&back).unwrap());
        assert_eq!(s1, s2);
        // the decoded certificate still verifies with identical verdicts
        let again = verify_certificate(&back).unwrap();
        assert_eq!(again.len(), cert.checks.len());
        for (a, b) in cert.checks.iter().zip(&again) {
            assert_eq!(a.pass, b.pass, "{}", a.name);
        }
    }

    #[test]
    fn ramified_certificate_roundtrips_too() {
        let cert = run_pipeline(&LiftProblem::new(3, 1, 2, 2)).unwrap();
        let v = certificate_value(&cert).unwrap();
        let back = certificate_from(&v).unwrap();
        assert_eq!(to_canonical_string(&v), to_canonical_string(&certificate_value(&back).unwrap()));
        assert!(verify_certificate(&back).unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn malformed_values_are_rejected_with_context() {
        let e = certificate_from(&serde_json::json!({"schema": 1})).unwrap_err();
        assert!(e.to_string().contains("problem"));
        let e = frame_el_from(&serde_json::json!({"x": 1}), "entry").unwrap_err();
        assert!(e.to_string().contains("entry"));
        let e = ring_spec_from(&serde_json::json!({"type": "nope"}), "ring").unwrap_err();
        assert!(e.to_string().contains("nope"));
    }
}

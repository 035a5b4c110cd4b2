//! Command-line front end: evaluate Witt arithmetic, exercise frames,
//! transform displays, read off Newton slopes, and drive the lifting
//! pipeline end to end.
//!
//! Exit codes: 0 when everything checks out, 1 for usage errors (bad
//! flags, unreadable or wrong-version input files, parameters outside
//! the supported range), 2 when the input was well-formed but a
//! mathematical check failed.

use clap::{Args, Parser, Subcommand};
use qclift_core::dieudonne::{DieudonneModule, Slope};
use qclift_core::displays::{
    make_display, random_display, unit_display, weight_display, Display, DisplayError,
};
use qclift_core::frames::{build_frame, Frame, FrameSpec, RingSpec};
use qclift_core::jsonio::{
    certificate_from, certificate_value, frame_spec_from, frame_spec_value, mat_from, mat_value,
    to_canonical_string, JsonError, VALUE_SCHEMA,
};
use qclift_core::lifting::{run_pipeline, verify_certificate, LiftError, LiftProblem};
use qclift_core::padic::{LocalRing, Mat, RingEl};
use qclift_core::witt;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};
use std::process::ExitCode;
use std::rc::Rc;

#[derive(Parser)]
#[command(name = "qclift", version, about = "Exact arithmetic for frames, displays and lifts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate truncated Witt-vector arithmetic and its ghost image
    WittEval(WittEvalArgs),
    /// Build a frame and spot-check its structure maps on random elements
    FrameCheck(FrameCheckArgs),
    /// Generate a display and write it as JSON
    DisplayGen(DisplayGenArgs),
    /// Apply an operation to a display read from JSON
    DisplayOp(DisplayOpArgs),
    /// Newton slopes of an integer Frobenius matrix
    Dieudonne(DieudonneArgs),
    /// Run the full lifting pipeline and emit a certificate
    Lift(LiftArgs),
    /// Re-check a certificate without re-running any solver
    Verify(VerifyArgs),
    /// Run the pipeline across a small parameter grid
    Sweep(SweepArgs),
}

#[derive(Args)]
struct WittEvalArgs {
    /// Odd prime
    #[arg(long)]
    p: u64,
    /// Residue field degree
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Witt vector length
    #[arg(long, default_value_t = 3)]
    len: usize,
    /// Base ring precision (defaults to len + 2)
    #[arg(long)]
    prec: Option<u32>,
    /// First operand, comma-separated integer components
    #[arg(long, value_delimiter = ',', required = true)]
    a: Vec<i64>,
    /// Second operand, comma-separated integer components
    #[arg(long, value_delimiter = ',', required = true)]
    b: Vec<i64>,
}

#[derive(Args)]
struct FrameSpecArgs {
    /// Frame spec JSON file (overrides the individual flags)
    #[arg(long)]
    spec: Option<String>,
    /// Frame kind registered in the library
    #[arg(long, default_value = "smallwitt")]
    kind: String,
    /// Odd prime
    #[arg(long, default_value_t = 3)]
    p: u64,
    /// Residue field degree
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Base ring precision
    #[arg(long)]
    prec: Option<u32>,
    /// Length of the correction component
    #[arg(long, default_value_t = 4)]
    eta_len: usize,
    /// Ramification index for an extension base (omit for the unramified base)
    #[arg(long)]
    eis_h: Option<u32>,
    /// Quotient exponent for the extension base
    #[arg(long)]
    eis_quot: Option<u32>,
}

#[derive(Args)]
struct FrameCheckArgs {
    #[command(flatten)]
    frame: FrameSpecArgs,
    /// Number of random samples per identity
    #[arg(long, default_value_t = 100)]
    samples: u32,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DisplayGenArgs {
    #[command(flatten)]
    frame: FrameSpecArgs,
    /// Generator: unit, weight, or random
    #[arg(long, default_value = "random")]
    gen: String,
    /// Weight for the weight generator
    #[arg(long, default_value_t = 1)]
    k: i64,
    /// Hodge degrees, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = [0i64, 1])]
    degs: Vec<i64>,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct DisplayOpArgs {
    /// Input display JSON file
    #[arg(long = "in")]
    input: String,
    /// Operation: dual, twist, tensor, sum, or check
    #[arg(long)]
    op: String,
    /// Twist amount
    #[arg(long, default_value_t = 1)]
    k: i64,
    /// Second operand file for tensor and sum
    #[arg(long)]
    rhs: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct DieudonneArgs {
    /// Odd prime
    #[arg(long)]
    p: u64,
    /// Residue field degree
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Working precision (defaults to rank*m + 2)
    #[arg(long)]
    prec: Option<u32>,
    /// Frobenius matrix as JSON rows of integers, e.g. [[0,3],[1,0]]
    #[arg(long)]
    mat: Option<String>,
    /// Shortcut: one-dimensional formal group of this height
    #[arg(long)]
    formal_h: Option<u32>,
}

#[derive(Args)]
struct LiftArgs {
    /// Odd prime
    #[arg(long)]
    p: u64,
    /// Residue field degree
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Height of the connected part
    #[arg(long)]
    h: u32,
    /// Thickening depth: the lift is built over the depth-(n+1) quotient
    #[arg(long)]
    n: u32,
    /// Working precision
    #[arg(long)]
    prec: Option<u32>,
    /// Length of the correction component
    #[arg(long)]
    eta_len: Option<usize>,
    /// Random seed for the rigidity probe
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the certificate here
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate JSON file
    #[arg(long)]
    cert: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Primes to try
    #[arg(long, value_delimiter = ',', default_values_t = [3u64, 5])]
    p: Vec<u64>,
    /// Residue field degrees to try
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    m: Vec<usize>,
    /// Heights to try
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2])]
    h: Vec<u32>,
    /// Depth n for every run (defaults to h for each height)
    #[arg(long)]
    depth: Option<u32>,
    /// Working precision
    #[arg(long)]
    prec: Option<u32>,
    /// Write a JSON summary here
    #[arg(long)]
    out: Option<String>,
}

enum CmdError {
    Usage(String),
    Math(String),
}

impl From<JsonError> for CmdError {
    fn from(e: JsonError) -> Self {
        CmdError::Usage(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CmdError> {
    Err(CmdError::Usage(msg.into()))
}

fn env_precision() -> Result<Option<u32>, CmdError> {
    match std::env::var("QCLIFT_PRECISION") {
        Ok(s) => match s.trim().parse::<u32>() {
            Ok(v) if v > 0 => Ok(Some(v)),
            _ => usage(format!("QCLIFT_PRECISION must be a positive integer, got `{s}`")),
        },
        Err(_) => Ok(None),
    }
}

/// Flag value, then the environment override, then the built-in default.
fn resolve_prec(flag: Option<u32>, default: u32) -> Result<u32, CmdError> {
    Ok(flag.or(env_precision()?).unwrap_or(default))
}

fn read_json(path: &str) -> Result<Value, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CmdError::Usage(format!("{path} is not JSON: {e}")))
}

fn write_out(path: &Option<String>, text: &str) -> Result<(), CmdError> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CmdError::Usage(format!("cannot write {p}: {e}"))),
    }
}

fn check_schema(v: &Value, what: &str) -> Result<(), CmdError> {
    let found = v
        .get("schema")
        .and_then(Value::as_u64)
        .ok_or_else(|| CmdError::Usage(format!("{what}: missing schema version")))?;
    if found != u64::from(VALUE_SCHEMA) {
        return usage(format!(
            "{what}: schema version {found} is not supported (this build reads version {VALUE_SCHEMA})"
        ));
    }
    Ok(())
}

fn frame_from_args(a: &FrameSpecArgs) -> Result<(Rc<dyn Frame>, FrameSpec), CmdError> {
    let spec = match &a.spec {
        Some(path) => frame_spec_from(&read_json(path)?, "frame spec")?,
        None => {
            let ring = match a.eis_h {
                None => RingSpec::Unramified,
                Some(h) => RingSpec::Eisenstein { h, teich_unit: false, quot: a.eis_quot },
            };
            FrameSpec {
                kind: a.kind.clone(),
                p: a.p,
                m: a.m,
                prec: resolve_prec(a.prec, 6)?,
                eta_len: a.eta_len,
                ring,
            }
        }
    };
    let frame = build_frame(&spec)
        .map_err(|e| CmdError::Usage(format!("cannot build the requested frame: {e}")))?;
    Ok((frame, spec))
}

fn display_value(d: &Display) -> Result<Value, CmdError> {
    let mut m = Map::new();
    m.insert("degs".into(), Value::from(d.degs.clone()));
    m.insert("frame".into(), frame_spec_value(&d.frame.spec()));
    m.insert("phi".into(), mat_value(&d.phi)?);
    m.insert("schema".into(), Value::from(VALUE_SCHEMA));
    Ok(Value::Object(m))
}

/// Reads a display file; with `base` given, the display is rebuilt over that
/// frame so both operands of a binary operation share one frame object.
fn read_display(path: &str, base: Option<&Rc<dyn Frame>>) -> Result<Display, CmdError> {
    let v = read_json(path)?;
    check_schema(&v, path)?;
    let spec = frame_spec_from(
        v.get("frame").ok_or_else(|| CmdError::Usage(format!("{path}: missing frame")))?,
        "frame",
    )?;
    let frame = match base {
        Some(fr) => {
            let lhs = to_canonical_string(&frame_spec_value(&fr.spec()));
            let rhs = to_canonical_string(&frame_spec_value(&spec));
            if lhs != rhs {
                return usage(format!("{path}: operand displays live over different frames"));
            }
            fr.clone()
        }
        None => build_frame(&spec)
            .map_err(|e| CmdError::Usage(format!("{path}: cannot build the frame: {e}")))?,
    };
    let degs = v
        .get("degs")
        .and_then(Value::as_array)
        .ok_or_else(|| CmdError::Usage(format!("{path}: missing degs")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| CmdError::Usage(format!("{path}: bad degree"))))
        .collect::<Result<Vec<i64>, _>>()?;
    let phi = mat_from(
        v.get("phi").ok_or_else(|| CmdError::Usage(format!("{path}: missing phi")))?,
        "phi",
    )?;
    make_display(frame, degs, phi).map_err(|e| match e {
        DisplayError::Shape(s) => CmdError::Usage(format!("{path}: {s}")),
        other => CmdError::Math(format!("{path}: the display fails validation: {other}")),
    })
}

fn math_err(e: impl std::fmt::Display) -> CmdError {
    CmdError::Math(e.to_string())
}

fn slope_summary(slopes: &[Slope]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < slopes.len() {
        let mut j = i;
        while j < slopes.len() && slopes[j] == slopes[i] {
            j += 1;
        }
        parts.push(format!("{}/{}x{}", slopes[i].0, slopes[i].1, j - i));
        i = j;
    }
    parts.join(" ")
}

// ---- subcommands ----

fn cmd_witt_eval(a: &WittEvalArgs) -> Result<(), CmdError> {
    if a.a.len() != a.len || a.b.len() != a.len {
        return usage(format!("operands must have exactly {} components", a.len));
    }
    let prec = resolve_prec(a.prec, a.len as u32 + 2)?;
    let ring = LocalRing::unramified(a.p, a.m, prec)
        .map_err(|e| CmdError::Usage(format!("cannot build the base ring: {e}")))?;
    let lift = |v: &[i64]| -> Vec<RingEl> { v.iter().map(|&x| ring.from_i64(x)).collect() };
    let (x, y) = (lift(&a.a), lift(&a.b));

    let sum = witt::wadd(&ring, &x, &y).map_err(math_err)?;
    let prod = witt::wmul(&ring, &x, &y).map_err(math_err)?;
    let frob = witt::wfrob(&ring, &x).map_err(math_err)?;
    let ver = witt::wver(&ring, &x);
    let fv = witt::wfrob(&ring, &ver).map_err(math_err)?;
    let p_el = witt::wint(&ring, a.p as i64, a.len).map_err(math_err)?;
    let px = witt::wmul(&ring, &p_el, &x).map_err(math_err)?;

    let gx = witt::ghost_all(&ring, &x);
    let gy = witt::ghost_all(&ring, &y);
    let gsum = witt::ghost_all(&ring, &sum);
    let gprod = witt::ghost_all(&ring, &prod);
    let ghost_add = (0..a.len).all(|i| ring.eq(&gsum[i], &ring.add(&gx[i], &gy[i])));
    let ghost_mul = (0..a.len).all(|i| ring.eq(&gprod[i], &ring.mul(&gx[i], &gy[i])));
    let fv_is_p = witt::weq(&ring, &fv, &px);

    let rels = |v: &[RingEl]| -> Result<Value, JsonError> {
        Ok(Value::Array(
            v.iter().map(qclift_core::jsonio::ring_el_value).collect::<Result<Vec<_>, _>>()?,
        ))
    };
    let mut out = Map::new();
    out.insert("a".into(), Value::from(a.a.clone()));
    out.insert("b".into(), Value::from(a.b.clone()));
    out.insert(
        "checks".into(),
        Value::Array(
            [("fv-is-p", fv_is_p), ("ghost-additive", ghost_add), ("ghost-multiplicative", ghost_mul)]
                .iter()
                .map(|(n, p)| {
                    let mut c = Map::new();
                    c.insert("name".into(), Value::from(*n));
                    c.insert("pass".into(), Value::from(*p));
                    Value::Object(c)
                })
                .collect(),
        ),
    );
    out.insert("frobenius_a".into(), rels(&frob)?);
    out.insert("ghost_a".into(), rels(&gx)?);
    out.insert("ghost_b".into(), rels(&gy)?);
    out.insert("len".into(), Value::from(a.len as u64));
    out.insert("m".into(), Value::from(a.m as u64));
    out.insert("p".into(), Value::from(a.p));
    out.insert("prec".into(), Value::from(prec));
    out.insert("prod".into(), rels(&prod)?);
    out.insert("sum".into(), rels(&sum)?);
    out.insert("verschiebung_a".into(), rels(&ver)?);
    print!("{}", to_canonical_string(&Value::Object(out)));

    if ghost_add && ghost_mul && fv_is_p {
        Ok(())
    } else {
        Err(CmdError::Math("a Witt arithmetic identity failed".into()))
    }
}

fn cmd_frame_check(a: &FrameCheckArgs) -> Result<(), CmdError> {
    let (frame, spec) = frame_from_args(&a.frame)?;
    let fr = frame.as_ref();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);

    let mut sigma_add = true;
    let mut sigma_mul = true;
    let mut witness_ok = true;
    let mut int_hom = true;
    let mut witness_hits = 0u32;
    for _ in 0..a.samples {
        let x = fr.random_el(&mut rng);
        let y = fr.random_el(&mut rng);
        let eq = |u: &qclift_core::frames::FrameEl, v: &qclift_core::frames::FrameEl| {
            fr.add(u, &fr.neg(v)).map(|d| fr.is_zero(&d))
        };
        let s = fr.add(&x, &y).map_err(math_err)?;
        let pr = fr.mul(&x, &y).map_err(math_err)?;
        let lhs = fr.sigma0(&s).map_err(math_err)?;
        let rhs = fr
            .add(&fr.sigma0(&x).map_err(math_err)?, &fr.sigma0(&y).map_err(math_err)?)
            .map_err(math_err)?;
        sigma_add &= eq(&lhs, &rhs).map_err(math_err)?;
        let lhs = fr.sigma0(&pr).map_err(math_err)?;
        let rhs = fr
            .mul(&fr.sigma0(&x).map_err(math_err)?, &fr.sigma0(&y).map_err(math_err)?)
            .map_err(math_err)?;
        sigma_mul &= eq(&lhs, &rhs).map_err(math_err)?;
        // realize a hand-built witness, then ask the solver to recover one
        let seed = qclift_core::frames::Witness { pre: x.clone(), s: 1 };
        let e = fr.realize(&seed).map_err(math_err)?;
        match fr.witness_solve(&e, 1) {
            Some(w) => {
                witness_hits += 1;
                witness_ok &= eq(&fr.realize(&w).map_err(math_err)?, &e).map_err(math_err)?;
            }
            None => witness_ok = false,
        }
        let (u, v) = (i64::from(rng.next_u32() as u8) - 128, i64::from(rng.next_u32() as u8) - 128);
        int_hom &= eq(&fr.from_int(u + v), &fr.add(&fr.from_int(u), &fr.from_int(v)).map_err(math_err)?)
            .map_err(math_err)?;
        int_hom &= eq(&fr.from_int(u * v), &fr.mul(&fr.from_int(u), &fr.from_int(v)).map_err(math_err)?)
            .map_err(math_err)?;
    }
    let one_fixed = {
        let one = fr.one();
        let s1 = fr.sigma0(&one).map_err(math_err)?;
        fr.add(&s1, &fr.neg(&one)).map(|d| fr.is_zero(&d)).map_err(math_err)?
    };
    let zero_witness = (1..=2).all(|s| {
        fr.realize(&fr.witness_zero(s)).map(|z| fr.is_zero(&z)).unwrap_or(false)
    });

    let idents = [
        ("from-int-ring-hom", int_hom),
        ("sigma0-additive", sigma_add),
        ("sigma0-multiplicative", sigma_mul),
        ("sigma0-unit-fixed", one_fixed),
        ("witness-roundtrip", witness_ok),
        ("zero-witness-realizes", zero_witness),
    ];
    let mut out = Map::new();
    out.insert(
        "identities".into(),
        Value::Array(
            idents
                .iter()
                .map(|(n, p)| {
                    let mut c = Map::new();
                    c.insert("name".into(), Value::from(*n));
                    c.insert("pass".into(), Value::from(*p));
                    Value::Object(c)
                })
                .collect(),
        ),
    );
    out.insert("samples".into(), Value::from(a.samples));
    out.insert("seed".into(), Value::from(a.seed));
    out.insert("spec".into(), frame_spec_value(&spec));
    out.insert("witness_hits".into(), Value::from(witness_hits));
    print!("{}", to_canonical_string(&Value::Object(out)));

    if idents.iter().all(|(_, p)| *p) {
        Ok(())
    } else {
        Err(CmdError::Math("a frame identity failed".into()))
    }
}

fn cmd_display_gen(a: &DisplayGenArgs) -> Result<(), CmdError> {
    let (frame, _) = frame_from_args(&a.frame)?;
    let d = match a.gen.as_str() {
        "unit" => unit_display(frame),
        "weight" => weight_display(frame, a.k),
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            random_display(frame, a.degs.clone(), &mut rng)
        }
        other => return usage(format!("unknown generator `{other}`")),
    };
    write_out(&a.out, &to_canonical_string(&display_value(&d)?))
}

fn cmd_display_op(a: &DisplayOpArgs) -> Result<(), CmdError> {
    let d = read_display(&a.input, None)?;
    let result = match a.op.as_str() {
        "dual" => d.dual().map_err(math_err)?,
        "twist" => d.twist(a.k),
        "tensor" | "sum" => {
            let rhs_path = a.rhs.as_ref().ok_or_else(|| {
                CmdError::Usage(format!("--op {} needs --rhs", a.op))
            })?;
            let rhs = read_display(rhs_path, Some(&d.frame))?;
            if a.op == "tensor" {
                d.tensor(&rhs).map_err(math_err)?
            } else {
                d.direct_sum(&rhs).map_err(math_err)?
            }
        }
        "check" => {
            let profile = d.reduction_profile().map_err(math_err)?;
            let mut out = Map::new();
            out.insert("degs".into(), Value::from(d.degs.clone()));
            out.insert(
                "profile".into(),
                Value::Array(
                    profile
                        .iter()
                        .map(|&(deg, n)| {
                            Value::Array(vec![Value::from(deg), Value::from(n as u64)])
                        })
                        .collect(),
                ),
            );
            out.insert("rank".into(), Value::from(d.rank() as u64));
            return write_out(&a.out, &to_canonical_string(&Value::Object(out)));
        }
        other => return usage(format!("unknown operation `{other}`")),
    };
    write_out(&a.out, &to_canonical_string(&display_value(&result)?))
}

fn cmd_dieudonne(a: &DieudonneArgs) -> Result<(), CmdError> {
    let module = match (&a.mat, a.formal_h) {
        (Some(_), Some(_)) | (None, None) => {
            return usage("give exactly one of --mat or --formal-h")
        }
        (Some(text), None) => {
            let rows: Vec<Vec<i64>> = serde_json::from_str(text)
                .map_err(|e| CmdError::Usage(format!("--mat is not an integer matrix: {e}")))?;
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return usage("--mat must be a nonempty square matrix");
            }
            let prec = resolve_prec(a.prec, (n * a.m) as u32 + 2)?;
            let ring = LocalRing::unramified(a.p, a.m, prec)
                .map_err(|e| CmdError::Usage(format!("cannot build the base ring: {e}")))?;
            let fmat = Mat::from_fn(n, n, |i, j| ring.from_i64(rows[i][j]));
            DieudonneModule::new(&ring, fmat).map_err(math_err)?
        }
        (None, Some(h)) => {
            if h == 0 {
                return usage("--formal-h must be positive");
            }
            let prec = resolve_prec(a.prec, (h as usize * a.m) as u32 + 2)?;
            let ring = LocalRing::unramified(a.p, a.m, prec)
                .map_err(|e| CmdError::Usage(format!("cannot build the base ring: {e}")))?;
            DieudonneModule::formal_group(&ring, h).map_err(math_err)?
        }
    };
    let slopes = module.newton_slopes().map_err(math_err)?;
    let mut out = Map::new();
    out.insert("m".into(), Value::from(a.m as u64));
    out.insert("p".into(), Value::from(a.p));
    out.insert("rank".into(), Value::from(module.rank() as u64));
    out.insert("slopes".into(), qclift_core::jsonio::slopes_value(&slopes));
    print!("{}", to_canonical_string(&Value::Object(out)));
    Ok(())
}

fn lift_problem(p: u64, m: usize, h: u32, n: u32, prec: Option<u32>, eta_len: Option<usize>, seed: u64)
    -> Result<LiftProblem, CmdError>
{
    let mut pr = LiftProblem::new(p, m, h, n);
    pr.prec = resolve_prec(prec, pr.prec)?;
    if let Some(e) = eta_len {
        pr.eta_len = e;
    }
    pr.seed = seed;
    Ok(pr)
}

fn print_checks(checks: &[qclift_core::lifting::CheckRecord]) -> bool {
    let mut all = true;
    for c in checks {
        println!("check {}: {}", c.name, if c.pass { "pass" } else { "FAIL" });
        for n in &c.notes {
            println!("  note: {n}");
        }
        all &= c.pass;
    }
    all
}

fn cmd_lift(a: &LiftArgs) -> Result<(), CmdError> {
    let pr = lift_problem(a.p, a.m, a.h, a.n, a.prec, a.eta_len, a.seed)?;
    let cert = run_pipeline(&pr).map_err(|e| match e {
        LiftError::BadProblem(msg) => CmdError::Usage(msg),
        other => CmdError::Math(other.to_string()),
    })?;
    let all = print_checks(&cert.checks);
    println!("slopes: {}", slope_summary(&cert.slopes));
    if let Some(path) = &a.out {
        std::fs::write(path, to_canonical_string(&certificate_value(&cert)?))
            .map_err(|e| CmdError::Usage(format!("cannot write {path}: {e}")))?;
        println!("certificate written to {path}");
    }
    if all {
        Ok(())
    } else {
        Err(CmdError::Math("one or more checks failed".into()))
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CmdError> {
    let cert = certificate_from(&read_json(&a.cert)?)?;
    let checks = verify_certificate(&cert).map_err(|e| match e {
        LiftError::BadProblem(msg) => CmdError::Usage(msg),
        other => CmdError::Math(other.to_string()),
    })?;
    let all = print_checks(&checks);
    for (stored, fresh) in cert.checks.iter().zip(&checks) {
        if stored.name == fresh.name && stored.pass != fresh.pass {
            println!("note: stored verdict for {} disagrees with this re-check", fresh.name);
        }
    }
    if all {
        Ok(())
    } else {
        Err(CmdError::Math("one or more checks failed".into()))
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CmdError> {
    let mut rows = Vec::new();
    let mut reds = 0u32;
    for &p in &a.p {
        for &m in &a.m {
            for &h in &a.h {
                let n = a.depth.unwrap_or(h);
                let pr = lift_problem(p, m, h, n, a.prec, None, 0)?;
                let label = format!("p={p} m={m} h={h} n={n}");
                let mut row = Map::new();
                row.insert("h".into(), Value::from(h));
                row.insert("m".into(), Value::from(m as u64));
                row.insert("n".into(), Value::from(n));
                row.insert("p".into(), Value::from(p));
                match run_pipeline(&pr) {
                    Err(LiftError::BadProblem(msg)) => {
                        println!("{label}: skipped ({msg})");
                        row.insert("status".into(), Value::from("skipped"));
                        row.insert("reason".into(), Value::from(msg));
                    }
                    Err(other) => {
                        println!("{label}: red ({other})");
                        row.insert("status".into(), Value::from("red"));
                        row.insert("reason".into(), Value::from(other.to_string()));
                        reds += 1;
                    }
                    Ok(cert) => {
                        let failed: Vec<&str> = cert
                            .checks
                            .iter()
                            .filter(|c| !c.pass)
                            .map(|c| c.name.as_str())
                            .collect();
                        if failed.is_empty() {
                            println!("{label}: green slopes={}", slope_summary(&cert.slopes));
                            row.insert("status".into(), Value::from("green"));
                        } else {
                            println!("{label}: red (failing: {})", failed.join(", "));
                            row.insert("status".into(), Value::from("red"));
                            row.insert(
                                "failing".into(),
                                Value::Array(failed.iter().map(|&s| Value::from(s)).collect()),
                            );
                            reds += 1;
                        }
                        row.insert(
                            "slopes".into(),
                            qclift_core::jsonio::slopes_value(&cert.slopes),
                        );
                    }
                }
                rows.push(Value::Object(row));
            }
        }
    }
    if let Some(path) = &a.out {
        std::fs::write(path, to_canonical_string(&Value::Array(rows)))
            .map_err(|e| CmdError::Usage(format!("cannot write {path}: {e}")))?;
    }
    if reds == 0 {
        Ok(())
    } else {
        Err(CmdError::Math(format!("{reds} run(s) failed")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.cmd {
        Cmd::WittEval(a) => cmd_witt_eval(a),
        Cmd::FrameCheck(a) => cmd_frame_check(a),
        Cmd::DisplayGen(a) => cmd_display_gen(a),
        Cmd::DisplayOp(a) => cmd_display_op(a),
        Cmd::Dieudonne(a) => cmd_dieudonne(a),
        Cmd::Lift(a) => cmd_lift(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Math(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(2)
        }
    }
}

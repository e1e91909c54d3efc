//! Command dispatch and the JSON run report.

use std::collections::BTreeMap;

use htoeplitz::derive::{reproduce_lemma, run_pipeline, LemmaTag};
use htoeplitz::mellin::{inverse_mellin, mellin};
use htoeplitz::oracle::{apply_numeric, battery, compare, QuadratureConfig};
use htoeplitz::toeplitz::{apply_symbol, commutator_residual, verify_commute};
use htoeplitz::{BasisVector, HarmonicVector, Indeterminate, Symbol};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::parse::{parse_radial, parse_rational_fn, parse_symbol, ParseError};

pub const SCHEMA_VERSION: &str = "1.0";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug)]
pub enum Command {
    Mellin { expr: String },
    InvMellin { expr: String },
    Apply { f: String, v: String, bind: Vec<(Indeterminate, Complex64)>, tol: f64 },
    Commutator { f: String, u: String, v: String },
    Verify { f: String, u: String, n_max: i64 },
    Derive { l: u32, n: i64, k: i64 },
    VerifyPaper { lemma: Option<String> },
    OracleCheck { cases: usize, tol: f64, seed: u64 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mellin { .. } => "mellin",
            Command::InvMellin { .. } => "invmellin",
            Command::Apply { .. } => "apply",
            Command::Commutator { .. } => "commutator",
            Command::Verify { .. } => "verify",
            Command::Derive { .. } => "derive",
            Command::VerifyPaper { .. } => "verify-paper",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }

    fn inputs(&self) -> Value {
        match self {
            Command::Mellin { expr } | Command::InvMellin { expr } => json!({ "expr": expr }),
            Command::Apply { f, v, bind, tol } => json!({
                "f": f,
                "v": v,
                "bind": bind.iter().map(|(x, c)| (x.to_string(), format!("{c}"))).collect::<BTreeMap<_, _>>(),
                "tol": tol,
            }),
            Command::Commutator { f, u, v } => json!({ "f": f, "u": u, "v": v }),
            Command::Verify { f, u, n_max } => json!({ "f": f, "u": u, "nmax": n_max }),
            Command::Derive { l, n, k } => json!({ "L": l, "N": n, "K": k }),
            Command::VerifyPaper { lemma } => json!({ "lemma": lemma }),
            Command::OracleCheck { cases, tol, seed } => json!({ "cases": cases, "tol": tol, "seed": seed }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub warnings: Vec<String>,
    pub error: Option<String>,
    pub exit_status: i32,
    /// Human-readable rendering, printed with `--pretty`.
    #[serde(skip)]
    pub text: String,
}

impl RunReport {
    pub fn to_json(&self, pretty: bool) -> String {
        let out = if pretty { serde_json::to_string_pretty(self) } else { serde_json::to_string(self) };
        out.expect("report serializes")
    }
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Usage(format!("parse error at {e}"))
    }
}

impl From<htoeplitz::Error> for Failure {
    fn from(e: htoeplitz::Error) -> Self {
        match e {
            htoeplitz::Error::Invalid(m) => Failure::Usage(m),
            other => Failure::Math(other.to_string()),
        }
    }
}

struct Outcome {
    result: Value,
    text: String,
    warnings: Vec<String>,
    ok: bool,
}

impl Outcome {
    fn ok(result: Value, text: String) -> Self {
        Self { result, text, warnings: Vec::new(), ok: true }
    }
}

/// Runs one command. The exit status depends only on the mathematical verdict.
pub fn dispatch(cmd: &Command) -> RunReport {
    let (result, text, warnings, error, exit_status) = match run(cmd) {
        Ok(o) => {
            let status = if o.ok { EXIT_OK } else { EXIT_MATH };
            (o.result, o.text, o.warnings, None, status)
        }
        Err(Failure::Usage(m)) => (Value::Null, format!("error: {m}"), Vec::new(), Some(m), EXIT_USAGE),
        Err(Failure::Math(m)) => (Value::Null, format!("error: {m}"), Vec::new(), Some(m), EXIT_MATH),
    };
    RunReport {
        schema_version: SCHEMA_VERSION,
        command: cmd.name().to_string(),
        inputs: cmd.inputs(),
        result,
        warnings,
        error,
        exit_status,
        text,
    }
}

fn basis(v: &str) -> Result<BasisVector, Failure> {
    BasisVector::parse(v).map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Mellin { expr } => {
            let phi = parse_radial(expr)?;
            let m = mellin(&phi);
            let text = format!("M[{phi}](z) = {m}");
            Ok(Outcome::ok(json!({ "result": m.to_string(), "transform": m.to_json() }), text))
        }
        Command::InvMellin { expr } => {
            let f = parse_rational_fn(expr)?;
            let phi = inverse_mellin(&f)?;
            let text = format!("M^-1[{f}] = {phi}");
            Ok(Outcome::ok(json!({ "result": phi.to_string(), "radial": phi.to_json() }), text))
        }
        Command::Apply { f, v, bind, tol } => apply(f, v, bind, *tol),
        Command::Commutator { f, u, v } => {
            let (f, u, v) = (parse_symbol(f)?, parse_symbol(u)?, basis(v)?);
            let res = commutator_residual(&f, &u, v)?;
            let text = format!("[T_f, T_u]({}) = {res}", v.key());
            let ok = res.is_zero();
            Ok(Outcome { result: json!({ "result": res.to_string(), "residual": res.to_json(), "zero": ok }), text, warnings: Vec::new(), ok })
        }
        Command::Verify { f, u, n_max } => {
            let (f, u) = (parse_symbol(f)?, parse_symbol(u)?);
            let rep = verify_commute(&f, &u, *n_max)?;
            let mut text = format!(
                "verdict: {}\nthreshold: {}\nchecked up to: {}\n",
                if rep.commutes { "commutes" } else { "fails" },
                rep.threshold,
                rep.checked_up_to
            );
            for g in rep.generic.iter().filter(|g| !g.residual.is_zero()) {
                text.push_str(&format!("generic {:?} offset {}: {}\n", g.side, g.offset, g.residual.render("n")));
            }
            if let Some(w) = rep.concrete_failures.first().or(rep.witness.as_ref()) {
                text.push_str(&format!("witness [T_f, T_u]({}) = {}\n", w.input.key(), w.residual));
            }
            Ok(Outcome { result: rep.to_json(), text, warnings: Vec::new(), ok: rep.commutes })
        }
        Command::Derive { l, n, k } => {
            if *l < 1 {
                return Err(Failure::Usage("--L must be at least 1".into()));
            }
            let rep = run_pipeline(&Symbol::u(*l), *n, *k)?;
            let mut text = String::new();
            for r in &rep.restarts {
                text.push_str(&format!("restart: top {} -> {}\n", r.from_top, r.to_top));
            }
            for s in &rep.stages {
                text.push_str(&format!("f{} = {}\n", s.degree, s.solved));
                for fc in &s.forced {
                    text.push_str(&format!("  forces {} = 0 via {}\n", fc.constant, fc.key.render()));
                }
            }
            let survivors: Vec<String> = rep.survivors.iter().map(|x| x.to_string()).collect();
            text.push_str(&format!("f = {}\nsurvivors: {}\nverdict: {}\n", rep.symbol, survivors.join(", "), if rep.commutes() { "commutes" } else { "fails" }));
            Ok(Outcome { result: rep.to_json(), text, warnings: Vec::new(), ok: rep.commutes() })
        }
        Command::VerifyPaper { lemma } => {
            let tags = match lemma {
                Some(t) => vec![t.parse::<LemmaTag>()?],
                None => LemmaTag::all(),
            };
            let mut reports = Vec::new();
            let mut warnings = Vec::new();
            let mut text = String::new();
            let mut ok = true;
            for tag in tags {
                let rep = reproduce_lemma(tag)?;
                ok &= rep.derived_satisfies;
                if !rep.matches {
                    warnings.push(format!("{tag}: printed formula differs from derivation by {}", rep.discrepancy));
                }
                text.push_str(&format!(
                    "{tag}: {}\n  derived: {}\n",
                    if rep.matches { "match" } else { "discrepancy" },
                    rep.derived
                ));
                if !rep.matches {
                    text.push_str(&format!(
                        "  printed: {}\n  derived - printed: {}\n  identity holds: derived {}, printed {}\n",
                        rep.paper_form, rep.discrepancy, rep.derived_satisfies, rep.paper_satisfies
                    ));
                }
                reports.push(rep.to_json());
            }
            Ok(Outcome { result: json!({ "lemmas": reports }), text, warnings, ok })
        }
        Command::OracleCheck { cases, tol, seed } => {
            let rep = battery(*cases, *seed, *tol, &QuadratureConfig::default())?;
            let text = format!(
                "{} cases, seed {}, tol {:e}: {} failures, max diff {:.3e}\n",
                rep.cases, rep.seed, rep.tol, rep.failures, rep.max_diff
            );
            let ok = rep.failures == 0;
            Ok(Outcome { result: serde_json::to_value(&rep).expect("battery serializes"), text, warnings: Vec::new(), ok })
        }
    }
}

fn apply(f: &str, v: &str, bind: &[(Indeterminate, Complex64)], tol: f64) -> Result<Outcome, Failure> {
    let (f, v) = (parse_symbol(f)?, basis(v)?);
    let out = apply_symbol(&f, &HarmonicVector::basis(v))?;
    let mut text = format!("T_f({}) = {out}\n", v.key());
    let mut result = json!({ "result": out.to_string(), "vector": out.to_json() });
    let mut ok = true;
    if !bind.is_empty() {
        let bindings: BTreeMap<_, _> = bind.iter().copied().collect();
        let cfg = QuadratureConfig::default();
        let mut numeric: BTreeMap<BasisVector, Complex64> = BTreeMap::new();
        for (k, phi) in f.components() {
            for (w, c) in apply_numeric(k, phi, v, &bindings, &cfg)? {
                *numeric.entry(w).or_default() += c;
            }
        }
        let cmp = compare(&out, &numeric, &bindings, tol)?;
        text.push_str(&format!("oracle max diff {:.3e} ({})\n", cmp.max_diff, if cmp.pass { "pass" } else { "fail" }));
        ok = cmp.pass;
        result["oracle"] = json!({
            "numeric": numeric.iter().map(|(w, c)| (w.key(), json!([c.re, c.im]))).collect::<BTreeMap<_, _>>(),
            "compare": serde_json::to_value(&cmp).expect("compare serializes"),
        });
    }
    Ok(Outcome { result, text, warnings: Vec::new(), ok })
}

//! Floating-point cross-checks for the exact engine.
//!
//! Radial integrals `int_0^1 r^a (ln r)^b r^(s-1) dr` are evaluated after the
//! substitution `r = e^{-t}`, which turns them into
//! `int_0^inf (-t)^b e^{-(a+s)t} dt`. The half line is truncated at
//! `T = -ln(eps)` and `eps` is shrunk geometrically (each step squares it)
//! until the added pieces fall below tolerance.
//! Projections onto the harmonic basis use the angular orthogonality of
//! `e^{ij theta}` and only radial quadrature, never the exact branch formulas.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{int, rat, rational_to_f64, Coeff, Indeterminate};
use crate::radial::{RadialFunction, RadialKey};
use crate::toeplitz::{apply_quasi, BasisVector, HarmonicVector};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// Maximum number of truncation refinements.
    pub max_subdivisions: usize,
    /// Initial endpoint shave `eps`; the integral runs over `r in [eps, 1]`.
    pub endpoint_shave: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, max_subdivisions: 12, endpoint_shave: (-4.0f64).exp() }
    }
}

/// `int_0^1 r^(a + s - 1) (ln r)^b dr` for one basis term.
pub fn radial_integral(exponent: f64, log: u32, cfg: &QuadratureConfig) -> Result<f64> {
    let valid = cfg.abs_tol > 0.0 && cfg.endpoint_shave > 0.0 && cfg.endpoint_shave < 1.0;
    if !valid {
        return Err(Error::Invalid("quadrature configuration".into()));
    }
    let sign = if log % 2 == 1 { -1.0 } else { 1.0 };
    let f = |t: f64| sign * t.powi(log as i32) * (-exponent * t).exp();
    let piece_tol = cfg.abs_tol * 1e-2;
    let mut lo = 0.0;
    let mut hi = -cfg.endpoint_shave.ln();
    let mut total = 0.0;
    let mut quiet = 0;
    for _ in 0..cfg.max_subdivisions {
        let out = quadrature::double_exponential::integrate(f, lo, hi, piece_tol);
        if !out.integral.is_finite() || out.error_estimate > cfg.abs_tol {
            break;
        }
        total += out.integral;
        if out.integral.abs() < cfg.abs_tol {
            quiet += 1;
            if quiet == 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::Quadrature(format!(
        "r^{exponent} ln(r)^{log} did not converge within {} refinements",
        cfg.max_subdivisions
    )))
}

/// `int_0^1 p(r) r^(s-1) dr` with the indeterminates bound.
pub fn mellin_numeric(
    p: &RadialFunction,
    s: f64,
    bindings: &BTreeMap<Indeterminate, Complex64>,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (key, c) in p.terms() {
        let value = c.eval(bindings)?;
        acc += value * radial_integral(rational_to_f64(&key.exp) + s, key.log, cfg)?;
    }
    Ok(acc)
}

/// Projection of `e^{ik theta} phi(r) * v` onto the harmonic basis.
pub fn apply_numeric(
    k: i64,
    phi: &RadialFunction,
    v: BasisVector,
    bindings: &BTreeMap<Indeterminate, Complex64>,
    cfg: &QuadratureConfig,
) -> Result<BTreeMap<BasisVector, Complex64>> {
    let m = v.frequency();
    let j = m + k;
    // <phi r^|m|, r^|j|> / <r^|j|, r^|j|> in L^2(r dr)
    let num = mellin_numeric(phi, (m.abs() + j.abs() + 2) as f64, bindings, cfg)?;
    let den = radial_integral((2 * j.abs() + 2) as f64, 0, cfg)?;
    Ok(BTreeMap::from([(BasisVector::from_frequency(j), num / den)]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub max_diff: f64,
    pub worst: Option<String>,
    pub pass: bool,
}

/// Entrywise comparison, missing entries read as zero.
pub fn compare(
    symbolic: &HarmonicVector,
    numeric: &BTreeMap<BasisVector, Complex64>,
    bindings: &BTreeMap<Indeterminate, Complex64>,
    tol: f64,
) -> Result<CompareReport> {
    let mut keys: Vec<BasisVector> = symbolic.entries().map(|(v, _)| *v).collect();
    keys.extend(numeric.keys().copied());
    keys.sort();
    keys.dedup();
    let mut max_diff = 0.0;
    let mut worst = None;
    for v in keys {
        let exact = symbolic.get(&v).eval(bindings)?;
        let approx = numeric.get(&v).copied().unwrap_or_default();
        let d = (exact - approx).norm();
        if d > max_diff || worst.is_none() && d >= max_diff {
            max_diff = d;
            worst = Some(v.key());
        }
    }
    Ok(CompareReport { max_diff, worst, pass: max_diff <= tol })
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryCase {
    pub k: i64,
    pub phi: String,
    pub input: String,
    pub max_diff: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub cases: usize,
    pub tol: f64,
    pub failures: usize,
    pub max_diff: f64,
    pub worst: Option<BatteryCase>,
}

/// Random bindings for `abar1..abar_l` and the listed constants.
pub fn random_bindings(rng: &mut impl Rng, vars: &[Indeterminate]) -> BTreeMap<Indeterminate, Complex64> {
    vars.iter().map(|x| (*x, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect()
}

fn random_phi(rng: &mut impl Rng) -> RadialFunction {
    let vocabulary = [
        Coeff::one(),
        Coeff::var(Indeterminate::Abar(1)),
        Coeff::var(Indeterminate::Abar(2)),
        &Coeff::var(Indeterminate::C(1)) * &Coeff::var(Indeterminate::Abar(3)),
    ];
    let mut phi = RadialFunction::zero();
    for _ in 0..rng.gen_range(1..4) {
        let exp = if rng.gen_bool(0.2) { rat(rng.gen_range(-1..16), 2) } else { int(rng.gen_range(-1..9)) };
        let key = RadialKey::new(exp, rng.gen_range(0..3));
        let c = vocabulary[rng.gen_range(0..vocabulary.len())].scale_rational(&rat(rng.gen_range(-6..7), rng.gen_range(1..4)));
        phi.add_term(key, c);
    }
    phi
}

/// Engine against quadrature on random `(k, phi, v)` triples.
pub fn battery(cases: usize, seed: u64, tol: f64, cfg: &QuadratureConfig) -> Result<BatteryReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut max_diff = 0.0;
    let mut worst: Option<BatteryCase> = None;
    for _ in 0..cases {
        let k = rng.gen_range(-5..6);
        let phi = random_phi(&mut rng);
        let n = rng.gen_range(0..10);
        let v = if rng.gen_bool(0.5) { BasisVector::analytic(n) } else { BasisVector::conjugate(n.max(1)) };
        let vars = phi.indeterminates();
        let bindings = random_bindings(&mut rng, &vars);
        let exact = apply_quasi(k, &phi, v)?;
        let numeric = apply_numeric(k, &phi, v, &bindings, cfg)?;
        let rep = compare(&exact, &numeric, &bindings, tol)?;
        if !rep.pass {
            failures += 1;
        }
        if worst.is_none() || rep.max_diff > max_diff {
            max_diff = rep.max_diff;
            worst = Some(BatteryCase { k, phi: phi.to_string(), input: v.key(), max_diff: rep.max_diff, pass: rep.pass });
        }
    }
    Ok(BatteryReport { seed, cases, tol, failures, max_diff, worst })
}

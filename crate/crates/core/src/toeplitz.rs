//! Toeplitz operators with quasi-homogeneous symbols on the harmonic basis
//! `{1, z^n, zbar^n}`.
//!
//! A symbol is a finite sum `sum_k e^{ik theta} phi_k(r)`. Its operator is
//! applied either concretely on basis vectors or generically, as a family of
//! rational functions of the basis index `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{int, Coeff, Indeterminate, Rational};
use crate::mellin::mellin;
use crate::radial::{push_signed, RadialFunction};
use crate::ratfun::RationalFn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Analytic,
    Conjugate,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Analytic => "analytic",
            Side::Conjugate => "conjugate",
        })
    }
}

/// `z^n` or `zbar^n`; the constant is always `(Analytic, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisVector {
    side: Side,
    n: i64,
}

impl BasisVector {
    /// Panics on a negative index.
    pub fn new(side: Side, n: i64) -> Self {
        assert!(n >= 0, "basis index must be nonnegative");
        if n == 0 {
            return Self::analytic(0);
        }
        Self { side, n }
    }

    pub fn analytic(n: i64) -> Self {
        assert!(n >= 0, "basis index must be nonnegative");
        Self { side: Side::Analytic, n }
    }

    pub fn conjugate(n: i64) -> Self {
        Self::new(Side::Conjugate, n)
    }

    /// `e^{ij theta}` frequency: `z^n -> n`, `zbar^n -> -n`.
    pub fn from_frequency(j: i64) -> Self {
        if j >= 0 {
            Self::analytic(j)
        } else {
            Self::conjugate(-j)
        }
    }

    pub fn frequency(&self) -> i64 {
        match self.side {
            Side::Analytic => self.n,
            Side::Conjugate => -self.n,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn index(&self) -> i64 {
        self.n
    }

    /// `"z^3"` / `"zbar^2"`.
    pub fn key(&self) -> String {
        match self.side {
            Side::Analytic => format!("z^{}", self.n),
            Side::Conjugate => format!("zbar^{}", self.n),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Invalid(format!("basis vector '{s}'"));
        let (side, rest) = if let Some(rest) = s.strip_prefix("zbar") {
            (Side::Conjugate, rest)
        } else if let Some(rest) = s.strip_prefix("conj(z)") {
            (Side::Conjugate, rest)
        } else if let Some(rest) = s.strip_prefix('z') {
            (Side::Analytic, rest)
        } else if s == "1" {
            return Ok(Self::analytic(0));
        } else {
            return Err(bad());
        };
        let n = if rest.is_empty() {
            1
        } else {
            rest.strip_prefix('^').and_then(|t| t.parse::<i64>().ok()).filter(|n| *n >= 0).ok_or_else(bad)?
        };
        Ok(Self::new(side, n))
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Finite combination of basis vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HarmonicVector {
    entries: BTreeMap<BasisVector, Coeff>,
}

impl HarmonicVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(v: BasisVector) -> Self {
        Self::single(v, Coeff::one())
    }

    pub fn single(v: BasisVector, c: Coeff) -> Self {
        let mut out = Self::zero();
        out.add_entry(v, c);
        out
    }

    pub fn add_entry(&mut self, v: BasisVector, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(v).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.entries.remove(&v);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisVector, &Coeff)> {
        self.entries.iter()
    }

    pub fn get(&self, v: &BasisVector) -> Coeff {
        self.entries.get(v).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Self::zero();
        for (v, x) in &self.entries {
            out.add_entry(*v, x * c);
        }
        out
    }

    pub fn substitute_zero(&self, vars: &[Indeterminate]) -> Self {
        let mut out = Self::zero();
        for (v, x) in &self.entries {
            out.add_entry(*v, x.substitute_zero(vars));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.entries.iter().map(|(v, c)| (v.key(), serde_json::Value::from(c.to_string()))).collect()
    }
}

impl fmt::Display for HarmonicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (v, c) in &self.entries {
            if c.is_single_term() {
                let text = c.to_string();
                let (neg, mag) = match text.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, text),
                };
                let body = if mag == "1" { v.key() } else { format!("{mag}*{}", v.key()) };
                push_signed(&mut out, neg, &body);
            } else {
                push_signed(&mut out, false, &format!("({c})*{}", v.key()));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl<'a> Add<&'a HarmonicVector> for &'a HarmonicVector {
    type Output = HarmonicVector;
    fn add(self, rhs: &'a HarmonicVector) -> HarmonicVector {
        let mut out = self.clone();
        for (v, c) in &rhs.entries {
            out.add_entry(*v, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a HarmonicVector> for &'a HarmonicVector {
    type Output = HarmonicVector;
    fn sub(self, rhs: &'a HarmonicVector) -> HarmonicVector {
        let mut out = self.clone();
        for (v, c) in &rhs.entries {
            out.add_entry(*v, -c);
        }
        out
    }
}

/// `sum_k e^{ik theta} phi_k(r)` with finitely many nonzero components.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbol {
    components: BTreeMap<i64, RadialFunction>,
}

impl Symbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::component(0, RadialFunction::power(0, c))
    }

    pub fn component(k: i64, phi: RadialFunction) -> Self {
        let mut out = Self::zero();
        out.add_component(k, phi);
        out
    }

    pub fn from_components(parts: impl IntoIterator<Item = (i64, RadialFunction)>) -> Self {
        let mut out = Self::zero();
        for (k, phi) in parts {
            out.add_component(k, phi);
        }
        out
    }

    /// `z^p` for `p >= 0`, `zbar^(-p)` for `p < 0`.
    pub fn z_power(p: i64) -> Self {
        Self::component(p, RadialFunction::power(p.abs(), Coeff::one()))
    }

    /// `u = z + sum_{l=1}^{L} abar_l zbar^l`.
    pub fn u(l_max: u32) -> Self {
        let mut out = Self::z_power(1);
        for l in 1..=l_max {
            out.add_component(-(l as i64), RadialFunction::power(l as i64, Coeff::var(Indeterminate::Abar(l))));
        }
        out
    }

    pub fn add_component(&mut self, k: i64, phi: RadialFunction) {
        if phi.is_zero() {
            return;
        }
        let slot = self.components.entry(k).or_default();
        *slot = &*slot + &phi;
        if slot.is_zero() {
            self.components.remove(&k);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (i64, &RadialFunction)> {
        self.components.iter().map(|(k, p)| (*k, p))
    }

    pub fn get(&self, k: i64) -> RadialFunction {
        self.components.get(&k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.components.keys().next_back().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.components.keys().next().copied()
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        Self::from_components(self.components.iter().map(|(k, p)| (*k, p.scale(c))))
    }

    pub fn substitute_zero(&self, vars: &[Indeterminate]) -> Self {
        Self::from_components(self.components.iter().map(|(k, p)| (*k, p.substitute_zero(vars))))
    }

    pub fn indeterminates(&self) -> Vec<Indeterminate> {
        let mut v: Vec<_> = self.components.values().flat_map(RadialFunction::indeterminates).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.components.iter().map(|(k, p)| (k.to_string(), serde_json::Value::from(p.to_string()))).collect()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .rev()
            .map(|(k, p)| if *k == 0 { format!("({p})") } else { format!("e({k})*({p})") })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<'a> Add<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn add(self, rhs: &'a Symbol) -> Symbol {
        let mut out = self.clone();
        for (k, p) in &rhs.components {
            out.add_component(*k, p.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn sub(self, rhs: &'a Symbol) -> Symbol {
        self + &(-rhs)
    }
}

impl Neg for &Symbol {
    type Output = Symbol;
    fn neg(self) -> Symbol {
        Symbol::from_components(self.components.iter().map(|(k, p)| (*k, -p)))
    }
}

/// Pointwise product of symbols.
impl<'a> Mul<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn mul(self, rhs: &'a Symbol) -> Symbol {
        let mut out = Symbol::zero();
        for (j, p) in &self.components {
            for (k, q) in &rhs.components {
                out.add_component(j + k, p * q);
            }
        }
        out
    }
}

/// `T_{e^{ik theta} phi}` on one basis vector.
///
/// With `j` the output frequency `freq(v) + k`, every branch has coefficient
/// `2(|j|+1) * mellin(phi)(|freq(v)| + |j| + 2)`.
pub fn apply_quasi(k: i64, phi: &RadialFunction, v: BasisVector) -> Result<HarmonicVector> {
    apply_with_transform(k, &mellin(phi), v)
}

fn apply_with_transform(k: i64, hat: &RationalFn, v: BasisVector) -> Result<HarmonicVector> {
    let j = v.frequency() + k;
    let at = int(v.index() + j.abs() + 2);
    let value = hat.evaluate_at(&at)?;
    Ok(HarmonicVector::single(BasisVector::from_frequency(j), value.scale_rational(&int(2 * (j.abs() + 1)))))
}

/// `T_f w`, linear over components and entries.
pub fn apply_symbol(f: &Symbol, w: &HarmonicVector) -> Result<HarmonicVector> {
    let hats: Vec<(i64, RationalFn)> = f.components().map(|(k, p)| (k, mellin(p))).collect();
    let mut out = HarmonicVector::zero();
    for (v, c) in w.entries() {
        for (k, hat) in &hats {
            out = &out + &apply_with_transform(*k, hat, *v)?.scale(c);
        }
    }
    Ok(out)
}

/// `T_f T_u v - T_u T_f v`.
pub fn commutator_residual(f: &Symbol, u: &Symbol, v: BasisVector) -> Result<HarmonicVector> {
    let e = HarmonicVector::basis(v);
    let fu = apply_symbol(f, &apply_symbol(u, &e)?)?;
    let uf = apply_symbol(u, &apply_symbol(f, &e)?)?;
    Ok(&fu - &uf)
}

/// Coefficient function and the first index from which it is valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericEntry {
    pub coeff: RationalFn,
    pub threshold: i64,
}

/// Action on `z^n` (or `zbar^n`) for all large `n`, keyed by index offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericAction {
    pub side: Side,
    pub entries: BTreeMap<i64, GenericEntry>,
}

fn raise_past_poles(coeff: &RationalFn, threshold: i64) -> i64 {
    let mut t = threshold;
    for p in coeff.pole_points() {
        if p.is_integer() {
            let p = p.to_integer();
            let p = i64::try_from(p).unwrap_or(i64::MAX - 1);
            if p >= t {
                t = p + 1;
            }
        }
    }
    t
}

impl GenericAction {
    pub fn empty(side: Side) -> Self {
        Self { side, entries: BTreeMap::new() }
    }

    fn accumulate(&mut self, offset: i64, coeff: RationalFn, threshold: i64) {
        match self.entries.get_mut(&offset) {
            Some(e) => {
                e.coeff = &e.coeff + &coeff;
                e.threshold = e.threshold.max(threshold);
            }
            None => {
                self.entries.insert(offset, GenericEntry { coeff, threshold });
            }
        }
    }

    /// Largest threshold over all entries, zero ones included.
    pub fn threshold(&self) -> i64 {
        let floor = match self.side {
            Side::Analytic => 0,
            Side::Conjugate => 1,
        };
        self.entries.values().map(|e| e.threshold).fold(floor, i64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|e| e.coeff.is_zero())
    }

    pub fn get(&self, offset: i64) -> RationalFn {
        self.entries.get(&offset).map(|e| e.coeff.clone()).unwrap_or_else(RationalFn::zero)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(d, e)| (*d, GenericEntry { coeff: e.coeff.scale(c), threshold: e.threshold }))
            .collect();
        Self { side: self.side, entries }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(d, e)| {
                serde_json::json!({
                    "offset": d,
                    "coeff": e.coeff.render("n"),
                    "threshold": e.threshold,
                    "zero": e.coeff.is_zero(),
                })
            })
            .collect();
        serde_json::json!({ "side": self.side, "entries": entries })
    }
}

impl<'a> Sub<&'a GenericAction> for &'a GenericAction {
    type Output = GenericAction;
    fn sub(self, rhs: &'a GenericAction) -> GenericAction {
        assert_eq!(self.side, rhs.side, "generic actions on different sides");
        let mut out = self.clone();
        for (d, e) in &rhs.entries {
            out.accumulate(*d, -&e.coeff, e.threshold);
        }
        out
    }
}

/// `T_f` on `z^n` (analytic) or `zbar^n` (conjugate), uniformly in `n`.
pub fn apply_generic(f: &Symbol, side: Side) -> GenericAction {
    let mut out = GenericAction::empty(side);
    for (k, phi) in f.components() {
        let hat = mellin(phi);
        let (offset, base, floor) = match side {
            // 2(n+k+1) * hat(2n+k+2) at z^{n+k}
            Side::Analytic => (k, k, 0i64.max(-k)),
            // 2(n-k+1) * hat(2n-k+2) at zbar^{n-k}
            Side::Conjugate => (-k, -k, 1i64.max(k + 1)),
        };
        let lin = RationalFn::polynomial(vec![Coeff::integer(2 * (base + 1)), Coeff::integer(2)]);
        let coeff = &lin * &hat.affine_substitute(&int(2), &int(base + 2));
        let threshold = raise_past_poles(&coeff, floor);
        out.accumulate(offset, coeff, threshold);
    }
    out
}

/// `a` after `b`.
pub fn compose_generic(a: &GenericAction, b: &GenericAction) -> Result<GenericAction> {
    if a.side != b.side {
        return Err(Error::IncompatibleShape("generic actions on different sides".into()));
    }
    let mut out = GenericAction::empty(a.side);
    for (db, eb) in &b.entries {
        for (da, ea) in &a.entries {
            let coeff = &eb.coeff * &ea.coeff.shift(&int(*db));
            let threshold = eb.threshold.max(ea.threshold - db);
            out.accumulate(da + db, coeff, threshold);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericResidual {
    pub side: Side,
    pub offset: i64,
    pub residual: RationalFn,
    pub threshold: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteResidual {
    pub input: BasisVector,
    pub residual: HarmonicVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationReport {
    pub generic: Vec<GenericResidual>,
    /// Global generic threshold.
    pub threshold: i64,
    /// Every basis vector with index up to this was checked concretely.
    pub checked_up_to: i64,
    pub concrete_failures: Vec<ConcreteResidual>,
    pub commutes: bool,
    pub witness: Option<ConcreteResidual>,
}

impl CommutationReport {
    pub fn to_json(&self) -> serde_json::Value {
        let generic: Vec<serde_json::Value> = self
            .generic
            .iter()
            .map(|g| {
                serde_json::json!({
                    "side": g.side,
                    "offset": g.offset,
                    "residual": g.residual.render("n"),
                    "zero": g.residual.is_zero(),
                    "threshold": g.threshold,
                })
            })
            .collect();
        let concrete = |c: &ConcreteResidual| serde_json::json!({ "input": c.input.key(), "residual": c.residual.to_json() });
        serde_json::json!({
            "verdict": if self.commutes { "commutes" } else { "fails" },
            "threshold": self.threshold,
            "checked_up_to": self.checked_up_to,
            "generic": generic,
            "concrete_failures": self.concrete_failures.iter().map(concrete).collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(concrete),
        })
    }
}

/// Generic residuals of `[T_f, T_u]` per side, with the global threshold.
pub fn generic_commutator(f: &Symbol, u: &Symbol) -> Result<(Vec<GenericResidual>, i64)> {
    let mut residuals = Vec::new();
    let mut threshold = 1;
    for side in [Side::Analytic, Side::Conjugate] {
        let gf = apply_generic(f, side);
        let gu = apply_generic(u, side);
        let diff = &compose_generic(&gf, &gu)? - &compose_generic(&gu, &gf)?;
        threshold = threshold.max(diff.threshold());
        for (d, e) in diff.entries {
            residuals.push(GenericResidual { side, offset: d, residual: e.coeff, threshold: e.threshold });
        }
    }
    Ok((residuals, threshold))
}

/// Certifies `[T_f, T_u] = 0` on every basis vector: generically from the
/// global threshold on and concretely below it (and up to `n_max`).
pub fn verify_commute(f: &Symbol, u: &Symbol, n_max: i64) -> Result<CommutationReport> {
    let (generic, threshold) = generic_commutator(f, u)?;
    let checked_up_to = n_max.max(threshold - 1);
    let inputs: Vec<BasisVector> = (0..=checked_up_to)
        .flat_map(|n| {
            let mut v = vec![BasisVector::analytic(n)];
            if n > 0 {
                v.push(BasisVector::conjugate(n));
            }
            v
        })
        .collect();
    let results: Vec<Result<ConcreteResidual>> = inputs
        .par_iter()
        .map(|v| commutator_residual(f, u, *v).map(|residual| ConcreteResidual { input: *v, residual }))
        .collect();
    let mut concrete_failures = Vec::new();
    for r in results {
        let r = r?;
        if !r.residual.is_zero() {
            concrete_failures.push(r);
        }
    }
    let generic_zero = generic.iter().all(|g| g.residual.is_zero());
    let mut witness = concrete_failures.first().cloned();
    if witness.is_none() && !generic_zero {
        witness = search_witness(f, u, &generic, checked_up_to + 1)?;
    }
    let commutes = generic_zero && concrete_failures.is_empty();
    Ok(CommutationReport { generic, threshold, checked_up_to, concrete_failures, commutes, witness })
}

/// A nonzero residual function has finitely many integer zeros, so a bounded
/// scan past `from` finds a failing index.
fn search_witness(
    f: &Symbol,
    u: &Symbol,
    generic: &[GenericResidual],
    from: i64,
) -> Result<Option<ConcreteResidual>> {
    let span: usize = generic.iter().map(|g| g.residual.num().len() + 1).sum();
    for n in from..from + span as i64 + 1 {
        for v in [BasisVector::analytic(n), BasisVector::conjugate(n)] {
            let residual = commutator_residual(f, u, v)?;
            if !residual.is_zero() {
                return Ok(Some(ConcreteResidual { input: v, residual }));
            }
        }
    }
    Ok(None)
}

/// Evaluates a generic action at a concrete index as a harmonic vector.
pub fn evaluate_generic(g: &GenericAction, n: i64) -> Result<HarmonicVector> {
    let mut out = HarmonicVector::zero();
    let sign = match g.side {
        Side::Analytic => 1,
        Side::Conjugate => -1,
    };
    for (d, e) in &g.entries {
        if n < e.threshold {
            return Err(Error::Invalid(format!("index {n} below threshold {}", e.threshold)));
        }
        let value = e.coeff.evaluate_at(&Rational::from_integer((n).into()))?;
        out.add_entry(BasisVector::from_frequency(sign * (n + d)), value);
    }
    Ok(out)
}

impl Default for GenericAction {
    fn default() -> Self {
        Self::empty(Side::Analytic)
    }
}

//! Radial functions in the span of `r^a (ln r)^b`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::exactalg::{fmt_rational, int, rational_to_f64, Coeff, GaussianRational, Indeterminate, Monomial, Rational};

/// Exponent pair of a basis term `r^exp (ln r)^log`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RadialKey {
    pub exp: Rational,
    pub log: u32,
}

impl RadialKey {
    pub fn new(exp: Rational, log: u32) -> Self {
        Self { exp, log }
    }

    pub fn power(a: i64) -> Self {
        Self { exp: int(a), log: 0 }
    }

    /// `r^a (ln r)^b` is in `L^1([0,1), r dr)` iff `a > -2`.
    pub fn is_integrable(&self) -> bool {
        self.exp > int(-2)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if !self.exp.is_zero() {
            if self.exp.is_one() {
                parts.push("r".to_string());
            } else if self.exp.is_integer() {
                parts.push(format!("r^{}", self.exp.numer()));
            } else {
                parts.push(format!("r^({})", fmt_rational(&self.exp)));
            }
        }
        match self.log {
            0 => {}
            1 => parts.push("ln(r)".to_string()),
            b => parts.push(format!("ln(r)^{b}")),
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for RadialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Finite sum `sum c_{a,b} r^a (ln r)^b` with [`Coeff`] coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RadialFunction {
    terms: BTreeMap<RadialKey, Coeff>,
}

impl RadialFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(key: RadialKey, c: Coeff) -> Self {
        let mut p = Self::default();
        p.add_term(key, c);
        p
    }

    /// `c * r^a`.
    pub fn power(a: i64, c: Coeff) -> Self {
        Self::term(RadialKey::power(a), c)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (RadialKey, Coeff)>) -> Self {
        let mut p = Self::default();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, key: RadialKey, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RadialKey, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &RadialKey) -> Coeff {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplication by `r^j`.
    pub fn shift(&self, j: &Rational) -> RadialFunction {
        RadialFunction {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (RadialKey::new(&k.exp + j, k.log), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> RadialFunction {
        RadialFunction::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), v * c)))
    }

    pub fn is_integrable(&self) -> bool {
        self.terms.keys().all(RadialKey::is_integrable)
    }

    /// Terms with exponent `a <= -2`.
    pub fn non_integrable_terms(&self) -> Vec<(RadialKey, Coeff)> {
        self.terms
            .iter()
            .filter(|(k, _)| !k.is_integrable())
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect()
    }

    pub fn substitute_zero(&self, vars: &[Indeterminate]) -> RadialFunction {
        RadialFunction::from_terms(self.terms.iter().map(|(k, c)| (k.clone(), c.substitute_zero(vars))))
    }

    pub fn indeterminates(&self) -> Vec<Indeterminate> {
        let mut v: Vec<_> = self.terms.values().flat_map(Coeff::indeterminates).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn min_exponent(&self) -> Option<&Rational> {
        self.terms.keys().map(|k| &k.exp).min()
    }

    /// Floating evaluation at `0 < r < 1`.
    pub fn eval_numeric(&self, r: f64, bindings: &BTreeMap<Indeterminate, Complex64>) -> Result<Complex64> {
        let ln_r = r.ln();
        let mut total = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let value = c.eval(bindings)?;
            total += value * r.powf(rational_to_f64(&k.exp)) * ln_r.powi(k.log as i32);
        }
        Ok(total)
    }

    /// Regroups by coefficient monomial: monomial -> (key -> scalar).
    fn grouped(&self) -> BTreeMap<Monomial, Vec<(RadialKey, GaussianRational)>> {
        let mut groups: BTreeMap<Monomial, Vec<(RadialKey, GaussianRational)>> = BTreeMap::new();
        for (k, c) in &self.terms {
            for (m, s) in c.terms() {
                groups.entry(m.clone()).or_default().push((k.clone(), s.clone()));
            }
        }
        for terms in groups.values_mut() {
            // Descending exponent, ascending log power.
            terms.sort_by(|(a, _), (b, _)| b.exp.cmp(&a.exp).then(a.log.cmp(&b.log)));
        }
        groups
    }

    /// JSON term list `[{a, b, coeff}]`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term {
            a: String,
            b: u32,
            coeff: String,
        }
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(k, c)| Term { a: fmt_rational(&k.exp), b: k.log, coeff: c.to_string() })
            .collect();
        serde_json::to_value(terms).expect("term list serializes")
    }
}

/// One signed summand of a rendering.
pub(crate) fn push_signed(out: &mut String, negative: bool, text: &str) {
    match (out.is_empty(), negative) {
        (true, false) => out.push_str(text),
        (true, true) => {
            out.push('-');
            out.push_str(text);
        }
        (false, false) => {
            out.push_str(" + ");
            out.push_str(text);
        }
        (false, true) => {
            out.push_str(" - ");
            out.push_str(text);
        }
    }
}

/// Renders `s * key` with the sign split off.
fn scalar_term(s: &GaussianRational, key: &RadialKey) -> (bool, String) {
    let negative = s.is_negative_leading();
    let mag = if negative { -s } else { s.clone() };
    let base = key.render();
    let text = if mag.is_one() {
        base
    } else if base == "1" {
        mag.to_string()
    } else {
        format!("{mag}*{base}")
    };
    (negative, text)
}

impl fmt::Display for RadialFunction {
    /// Paper-style rendering grouped by coefficient monomial, e.g.
    /// `C1*r + C3*abar1*(r^3 + 3*r + 2*r*ln(r) - r^-1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (m, terms) in self.grouped() {
            if m.is_one() {
                for (k, s) in &terms {
                    let (neg, text) = scalar_term(s, k);
                    push_signed(&mut out, neg, &text);
                }
            } else if terms.len() == 1 {
                let (k, s) = &terms[0];
                let (neg, text) = scalar_term(s, k);
                let text = match text.as_str() {
                    "1" => m.to_string(),
                    _ if k.exp.is_zero() && k.log == 0 => format!("{text}*{m}"),
                    _ => {
                        // Put the monomial between the scalar and the r-factor.
                        let base = k.render();
                        match text.strip_suffix(&base) {
                            Some(prefix) => format!("{prefix}{m}*{base}"),
                            None => format!("{m}*{text}"),
                        }
                    }
                };
                push_signed(&mut out, neg, &text);
            } else {
                let mut inner = String::new();
                for (k, s) in &terms {
                    let (neg, text) = scalar_term(s, k);
                    push_signed(&mut inner, neg, &text);
                }
                push_signed(&mut out, false, &format!("{m}*({inner})"));
            }
        }
        f.write_str(&out)
    }
}

impl<'a> Add<&'a RadialFunction> for &'a RadialFunction {
    type Output = RadialFunction;
    fn add(self, rhs: &'a RadialFunction) -> RadialFunction {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a RadialFunction> for &'a RadialFunction {
    type Output = RadialFunction;
    fn sub(self, rhs: &'a RadialFunction) -> RadialFunction {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Add for RadialFunction {
    type Output = RadialFunction;
    fn add(self, rhs: RadialFunction) -> RadialFunction {
        &self + &rhs
    }
}

impl Sub for RadialFunction {
    type Output = RadialFunction;
    fn sub(self, rhs: RadialFunction) -> RadialFunction {
        &self - &rhs
    }
}

impl Neg for &RadialFunction {
    type Output = RadialFunction;
    fn neg(self) -> RadialFunction {
        RadialFunction::from_terms(self.terms.iter().map(|(k, c)| (k.clone(), -c)))
    }
}

/// Pointwise product; exponents and log powers add.
impl<'a> Mul<&'a RadialFunction> for &'a RadialFunction {
    type Output = RadialFunction;
    fn mul(self, rhs: &'a RadialFunction) -> RadialFunction {
        let mut out = RadialFunction::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.add_term(RadialKey::new(&k1.exp + &k2.exp, k1.log + k2.log), c1 * c2);
            }
        }
        out
    }
}

impl serde::Serialize for RadialFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use proptest::prelude::*;

    fn cv(k: i64) -> Coeff {
        Coeff::var(Indeterminate::C(k))
    }
    fn av(l: u32) -> Coeff {
        Coeff::var(Indeterminate::Abar(l))
    }
    fn r(a: i64) -> RadialFunction {
        RadialFunction::power(a, Coeff::one())
    }
    fn rlog(a: i64, b: u32) -> RadialFunction {
        RadialFunction::term(RadialKey::new(int(a), b), Coeff::one())
    }

    #[test]
    fn combine() {
        assert_eq!(&(&r(1) + &r(3)) + &(-&r(1)), r(3));
        let p = r(5) + rlog(2, 1);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn combine_with_coefficients() {
        let c3a1 = &cv(3) * &av(1);
        let lhs = r(1).scale(&cv(1)) + (r(3) + r(1).scale(&Coeff::integer(3))).scale(&c3a1);
        let expected = RadialFunction::from_terms([
            (RadialKey::power(3), c3a1.clone()),
            (RadialKey::power(1), &cv(1) + &c3a1.scale_rational(&int(3))),
        ]);
        assert_eq!(lhs, expected);
    }

    #[test]
    fn shifting() {
        let c1a4 = &cv(1) * &av(4);
        let f_m4 = r(-4).scale(&cv(-4)) + r(4).scale(&c1a4);
        assert_eq!(f_m4.shift(&int(4)), r(0).scale(&cv(-4)) + r(8).scale(&c1a4));
        assert_eq!(f_m4.shift(&int(0)), f_m4);
        assert_eq!(rlog(0, 1).shift(&int(2)), rlog(2, 1));
    }

    #[test]
    fn integrability() {
        assert!(r(-1).is_integrable());
        assert!(!r(-2).is_integrable());
        assert!(!rlog(-2, 1).is_integrable());
        assert!(rlog(0, 1).is_integrable());
        assert!(RadialFunction::term(RadialKey::new(rat(-3, 2), 0), Coeff::one()).is_integrable());
        // Cancellation before testing.
        let cancelled = &(r(-2).scale(&cv(-2)) + r(1)) - &r(-2).scale(&cv(-2));
        assert!(cancelled.is_integrable());
    }

    #[test]
    fn numeric_evaluation() {
        let none = BTreeMap::new();
        assert!((r(3).eval_numeric(0.5, &none).unwrap().re - 0.125).abs() < 1e-15);
        let e_inv = (-1.0f64).exp();
        let v = rlog(1, 1).scale(&Coeff::integer(2)).eval_numeric(e_inv, &none).unwrap();
        assert!((v.re - (-0.7357588823428847)).abs() < 1e-12);
        let b = BTreeMap::from([(Indeterminate::C(1), Complex64::new(2.0, 0.0))]);
        assert!((r(1).scale(&cv(1)).eval_numeric(0.25, &b).unwrap().re - 0.5).abs() < 1e-15);
        assert_eq!(r(1).scale(&cv(1)).eval_numeric(0.25, &none), Err(crate::Error::Unbound("C1".into())));
    }

    #[test]
    fn rendering() {
        let c3a1 = &cv(3) * &av(1);
        let f1 = r(1).scale(&cv(1))
            + (r(3) + r(1).scale(&Coeff::integer(3)) + rlog(1, 1).scale(&Coeff::integer(2)) - r(-1)).scale(&c3a1);
        assert_eq!(f1.to_string(), "C1*r + C3*abar1*(r^3 + 3*r + 2*r*ln(r) - r^-1)");
        assert_eq!(r(-1).scale(&cv(-1).scale_rational(&rat(-1, 2))).to_string(), "-1/2*Cm1*r^-1");
        assert_eq!(r(0).scale(&cv(0)).to_string(), "C0");
        assert_eq!(RadialFunction::zero().to_string(), "0");
    }

    fn arb_radial() -> impl Strategy<Value = RadialFunction> {
        prop::collection::vec((-6i64..9, 0u32..3, -5i64..6, 0usize..3), 0..6).prop_map(|v| {
            let monos = [Coeff::one(), cv(2), &cv(1) * &av(1)];
            RadialFunction::from_terms(
                v.into_iter().map(|(a, b, s, m)| (RadialKey::new(int(a), b), monos[m].scale_rational(&int(s)))),
            )
        })
    }

    proptest! {
        #[test]
        fn shift_inverse(p in arb_radial(), j in -5i64..5) {
            prop_assert_eq!(p.shift(&int(j)).shift(&int(-j)), p);
        }

        #[test]
        fn sum_decomposes_uniquely(p in arb_radial(), q in arb_radial()) {
            let s = &p + &q;
            prop_assert_eq!(&s - &q, p);
        }

        #[test]
        fn integrable_additions_never_rescue(p in arb_radial(), q in arb_radial()) {
            // Keep only integrable terms of q on keys disjoint from p.
            let q = RadialFunction::from_terms(
                q.terms().filter(|(k, _)| k.is_integrable() && p.coeff(k).is_zero()).map(|(k, c)| (k.clone(), c.clone())),
            );
            prop_assert_eq!((&p + &q).is_integrable(), p.is_integrable());
        }
    }
}

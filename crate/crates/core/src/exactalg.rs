//! Exact scalars and coefficient polynomials.
//!
//! [`GaussianRational`] is the scalar field `Q(i)`. [`Coeff`] is a polynomial
//! ring over it in the formal indeterminates `C_k` (constants produced by the
//! telescoping solver) and `abar_l` (conjugated Taylor coefficients of `g`).
//!
//! Canonical text grammar for coefficients:
//!
//! ```text
//! coeff    := "0" | term (( " + " | " - " ) term)*
//! term     := "-"? (scalar "*")? monomial | "-"? scalar
//! monomial := indet ("^" exp)? ("*" indet ("^" exp)?)*
//! indet    := "C" index | "abar" digits        index := digits | "m" digits
//! scalar   := p | p/q | "(" re ("+"|"-") im "*i)" | im "*i"
//! ```
//!
//! `C_{-k}` is written `Cmk` so that the rendering stays unambiguous inside sums.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    // Large numerators and denominators are divided as floats separately.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) => n / d,
        _ => f64::NAN,
    }
}

/// Complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(Self { re: &self.re / &norm, im: -&self.im / &norm })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// True when the rendering needs no parentheses in a product.
    fn is_atomic(&self) -> bool {
        self.re.is_zero() || self.im.is_zero()
    }

    /// True when the rendering starts with a minus sign that can be pulled out.
    pub fn is_negative_leading(&self) -> bool {
        if self.im.is_zero() {
            self.re.is_negative()
        } else {
            self.re.is_zero() && self.im.is_negative()
        }
    }
}

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::real(int(n))
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero, like the integer types.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> GaussianRational {
        self * &rhs.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}*i", fmt_rational(&self.im))
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(
                f,
                "({}{}{}*i)",
                fmt_rational(&self.re),
                sign,
                fmt_rational(&self.im.abs())
            )
        }
    }
}

/// A formal constant: `C_k` for any integer `k`, or `abar_l` for `l >= 1`.
///
/// The derived order (all `C` before all `abar`, then by index) is the fixed
/// global order used by canonical forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indeterminate {
    C(i64),
    Abar(u32),
}

impl Indeterminate {
    pub fn is_constant(&self) -> bool {
        matches!(self, Indeterminate::C(_))
    }
}

impl fmt::Display for Indeterminate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Indeterminate::C(k) if *k < 0 => write!(f, "Cm{}", -k),
            Indeterminate::C(k) => write!(f, "C{k}"),
            Indeterminate::Abar(l) => write!(f, "abar{l}"),
        }
    }
}

impl FromStr for Indeterminate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown identifier `{s}`"));
        if let Some(rest) = s.strip_prefix("abar") {
            let l: u32 = rest.parse().map_err(|_| bad())?;
            if l == 0 {
                return Err(bad());
            }
            Ok(Indeterminate::Abar(l))
        } else if let Some(rest) = s.strip_prefix("Cm") {
            let k: i64 = rest.parse().map_err(|_| bad())?;
            Ok(Indeterminate::C(-k))
        } else if let Some(rest) = s.strip_prefix('C') {
            if rest.starts_with(['+', '-']) {
                return Err(bad());
            }
            let k: i64 = rest.parse().map_err(|_| bad())?;
            Ok(Indeterminate::C(k))
        } else {
            Err(bad())
        }
    }
}

/// Product of indeterminates with positive exponents, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<Indeterminate, u32>);

impl Monomial {
    pub fn one() -> Self {
        Self(BTreeMap::new())
    }

    pub fn var(x: Indeterminate) -> Self {
        Self(BTreeMap::from([(x, 1)]))
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Indeterminate, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (x, e) in powers {
            if e > 0 {
                *m.entry(x).or_insert(0) += e;
            }
        }
        Self(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> impl Iterator<Item = (Indeterminate, u32)> + '_ {
        self.0.iter().map(|(x, e)| (*x, *e))
    }

    pub fn degree_in(&self, x: Indeterminate) -> u32 {
        self.0.get(&x).copied().unwrap_or(0)
    }

    pub fn contains(&self, x: Indeterminate) -> bool {
        self.0.contains_key(&x)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (x, e) in &other.0 {
            *m.entry(*x).or_insert(0) += e;
        }
        Monomial(m)
    }

    /// Splits into the part made of `C_k` and the part made of `abar_l`.
    pub fn split_constants(&self) -> (Monomial, Monomial) {
        let (c, a): (BTreeMap<_, _>, BTreeMap<_, _>) =
            self.0.iter().partition(|(x, _)| x.is_constant());
        (Monomial(c), Monomial(a))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (x, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{x}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in the formal indeterminates with Gaussian-rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coeff {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Coeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(GaussianRational::one())
    }

    pub fn scalar(s: GaussianRational) -> Self {
        let mut c = Self::default();
        c.add_term(Monomial::one(), s);
        c
    }

    pub fn rational(r: Rational) -> Self {
        Self::scalar(GaussianRational::real(r))
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn var(x: Indeterminate) -> Self {
        Self::monomial(Monomial::var(x), GaussianRational::one())
    }

    pub fn monomial(m: Monomial, s: GaussianRational) -> Self {
        let mut c = Self::default();
        c.add_term(m, s);
        c
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, GaussianRational)>) -> Self {
        let mut c = Self::default();
        for (m, s) in terms {
            c.add_term(m, s);
        }
        c
    }

    fn add_term(&mut self, m: Monomial, s: GaussianRational) {
        if s.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(s);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &s;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the coefficient contains no indeterminates.
    pub fn as_scalar(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, s) = self.terms.iter().next().unwrap();
                m.is_one().then(|| s.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Coeff {
        if s.is_zero() {
            return Coeff::zero();
        }
        Coeff { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn scale_rational(&self, r: &Rational) -> Coeff {
        self.scale(&GaussianRational::real(r.clone()))
    }

    pub fn indeterminates(&self) -> Vec<Indeterminate> {
        let mut v: Vec<_> = self.terms.keys().flat_map(|m| m.powers().map(|(x, _)| x)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Sets every listed indeterminate to zero.
    pub fn substitute_zero(&self, vars: &[Indeterminate]) -> Coeff {
        Coeff {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !vars.iter().any(|x| m.contains(*x)))
                .map(|(m, s)| (m.clone(), s.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, bindings: &BTreeMap<Indeterminate, Complex64>) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, s) in &self.terms {
            let mut value = s.to_complex();
            for (x, e) in m.powers() {
                let b = bindings.get(&x).ok_or_else(|| Error::Unbound(x.to_string()))?;
                value *= b.powi(e as i32);
            }
            total += value;
        }
        Ok(total)
    }

    /// Renders a term with its sign stripped; returns (is_negative, text).
    fn fmt_term(m: &Monomial, s: &GaussianRational) -> (bool, String) {
        let negative = s.is_negative_leading();
        let mag = if negative { -s } else { s.clone() };
        let text = if m.is_one() {
            mag.to_string()
        } else if mag.is_one() {
            m.to_string()
        } else {
            format!("{mag}*{m}")
        };
        (negative, text)
    }

    /// True when the rendering is a single signed product (no top-level sum).
    pub fn is_single_term(&self) -> bool {
        self.terms.len() <= 1
            && self.terms.values().all(GaussianRational::is_atomic)
    }
}

impl From<GaussianRational> for Coeff {
    fn from(s: GaussianRational) -> Self {
        Coeff::scalar(s)
    }
}

impl From<Indeterminate> for Coeff {
    fn from(x: Indeterminate) -> Self {
        Coeff::var(x)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, s)) in self.terms.iter().enumerate() {
            let (negative, text) = Coeff::fmt_term(m, s);
            match (i, negative) {
                (0, false) => write!(f, "{text}")?,
                (0, true) => write!(f, "-{text}")?,
                (_, false) => write!(f, " + {text}")?,
                (_, true) => write!(f, " - {text}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, rhs: &'a Coeff) -> Coeff {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(mut self, rhs: Coeff) -> Coeff {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &'a Coeff) {
        for (m, s) in &rhs.terms {
            self.add_term(m.clone(), s.clone());
        }
    }
}

impl<'a> SubAssign<&'a Coeff> for Coeff {
    fn sub_assign(&mut self, rhs: &'a Coeff) {
        for (m, s) in &rhs.terms {
            self.add_term(m.clone(), -s);
        }
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &'a Coeff) -> Coeff {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(mut self, rhs: Coeff) -> Coeff {
        self -= &rhs;
        self
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &'a Coeff) -> Coeff {
        let mut out = Coeff::zero();
        for (m1, s1) in &self.terms {
            for (m2, s2) in &rhs.terms {
                out.add_term(m1.mul(m2), s1 * s2);
            }
        }
        out
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        &self * &rhs
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { terms: self.terms.into_iter().map(|(m, s)| (m, -s)).collect() }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -(self.clone())
    }
}

impl serde::Serialize for Coeff {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

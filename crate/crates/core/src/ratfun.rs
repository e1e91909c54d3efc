//! Univariate rational functions over [`Coeff`] whose poles sit at concrete
//! rational points.
//!
//! A [`RationalFn`] is stored as `num(z) / prod (z + q)^m` with a dense
//! numerator and a monic factored denominator. Values are kept canonical:
//! whenever the numerator vanishes to full order at a pole the common factor
//! is divided out, so structural equality is mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{fmt_rational, int, Coeff, GaussianRational, Indeterminate, Rational};

/// Dense polynomial, index = power.
pub type Poly = Vec<Coeff>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(Coeff::is_zero) {
        p.pop();
    }
}

fn poly_add(a: &[Coeff], b: &[Coeff]) -> Poly {
    let mut out: Poly = (0..a.len().max(b.len()))
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => Coeff::zero(),
        })
        .collect();
    trim(&mut out);
    out
}

fn poly_neg(a: &[Coeff]) -> Poly {
    a.iter().map(|c| -c).collect()
}

fn poly_mul(a: &[Coeff], b: &[Coeff]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Coeff::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    trim(&mut out);
    out
}

fn poly_scale(a: &[Coeff], s: &Coeff) -> Poly {
    let mut out: Poly = a.iter().map(|c| c * s).collect();
    trim(&mut out);
    out
}

pub fn poly_eval(p: &[Coeff], x: &Rational) -> Coeff {
    let mut acc = Coeff::zero();
    for c in p.iter().rev() {
        acc = &acc.scale_rational(x) + c;
    }
    acc
}

/// `z + q`.
fn linear(q: &Rational) -> Poly {
    vec![Coeff::rational(q.clone()), Coeff::one()]
}

/// `p(alpha * w + beta)`.
fn poly_compose_affine(p: &[Coeff], alpha: &Rational, beta: &Rational) -> Poly {
    let lin = vec![Coeff::rational(beta.clone()), Coeff::rational(alpha.clone())];
    let mut acc: Poly = Vec::new();
    for c in p.iter().rev() {
        acc = poly_add(&poly_mul(&acc, &lin), std::slice::from_ref(c));
    }
    acc
}

/// Exact division by the monic factor `z + q`; the caller guarantees `p(-q) = 0`.
fn divide_linear(p: &[Coeff], q: &Rational) -> Poly {
    if p.is_empty() {
        return Vec::new();
    }
    // Synthetic division by (z - root) with root = -q.
    let root = -q;
    let n = p.len() - 1;
    let mut out = vec![Coeff::zero(); n];
    let mut carry = Coeff::zero();
    for i in (1..=n).rev() {
        carry = &p[i] + &carry.scale_rational(&root);
        out[i - 1] = carry.clone();
    }
    trim(&mut out);
    out
}

/// Long division by a monic polynomial.
fn divmod_monic(p: &[Coeff], d: &[Coeff]) -> (Poly, Poly) {
    let dn = d.len() - 1;
    let mut rem = p.to_vec();
    if rem.len() <= dn {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Coeff::zero(); rem.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in d.iter().enumerate() {
            rem[i + j] -= &(&c * dj);
        }
        quot[i] = c;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

fn expand_den(den: &BTreeMap<Rational, u32>) -> Poly {
    let mut out = vec![Coeff::one()];
    for (q, m) in den {
        for _ in 0..*m {
            out = poly_mul(&out, &linear(q));
        }
    }
    out
}

fn fmt_factor(q: &Rational, var: &str) -> String {
    if q.is_zero() {
        var.to_string()
    } else if q.is_negative() {
        format!("({var}-{})", fmt_rational(&-q))
    } else {
        format!("({var}+{})", fmt_rational(q))
    }
}

fn fmt_factor_pow(q: &Rational, m: u32, var: &str) -> String {
    let f = fmt_factor(q, var);
    if m == 1 {
        f
    } else {
        format!("{f}^{m}")
    }
}

/// Renders `c * var^k` with sign split off.
fn fmt_poly_term(c: &Coeff, k: usize, var: &str) -> (bool, String) {
    let power = match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    };
    if !c.is_single_term() {
        return if power.is_empty() { (false, format!("({c})")) } else { (false, format!("({c})*{power}")) };
    }
    let text = c.to_string();
    let (negative, mag) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, text),
    };
    let body = match (mag.as_str(), power.is_empty()) {
        (_, true) => mag,
        ("1", false) => power,
        (_, false) => format!("{mag}*{power}"),
    };
    (negative, body)
}

fn fmt_poly(p: &[Coeff], var: &str) -> (String, usize) {
    let mut out = String::new();
    let mut count = 0;
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let (neg, text) = fmt_poly_term(c, k, var);
        crate::radial::push_signed(&mut out, neg, &text);
        count += 1;
    }
    if out.is_empty() {
        out.push('0');
    }
    (out, count)
}

/// Rational function `num(z) / prod (z + q)^m`.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: Poly,
    den: BTreeMap<Rational, u32>,
    pf: OnceLock<PartialFractions>,
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for RationalFn {}

impl RationalFn {
    /// Builds and canonicalizes `num / prod (z + q)^m`.
    pub fn new(num: Poly, den: BTreeMap<Rational, u32>) -> Self {
        let mut num = num;
        trim(&mut num);
        let mut den: BTreeMap<Rational, u32> = den.into_iter().filter(|(_, m)| *m > 0).collect();
        if num.is_empty() {
            den.clear();
        }
        for (q, m) in den.iter_mut() {
            while *m > 0 && poly_eval(&num, &-q).is_zero() {
                num = divide_linear(&num, q);
                *m -= 1;
            }
        }
        den.retain(|_, m| *m > 0);
        Self { num, den, pf: OnceLock::new() }
    }

    pub fn zero() -> Self {
        Self::new(Vec::new(), BTreeMap::new())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::new(vec![c], BTreeMap::new())
    }

    pub fn polynomial(p: Poly) -> Self {
        Self::new(p, BTreeMap::new())
    }

    /// The identity function `z`.
    pub fn var() -> Self {
        Self::polynomial(vec![Coeff::zero(), Coeff::one()])
    }

    /// `z + q`.
    pub fn linear(q: Rational) -> Self {
        Self::polynomial(linear(&q))
    }

    /// `c / (z + q)^j`.
    pub fn pole_term(c: Coeff, q: Rational, j: u32) -> Self {
        Self::new(vec![c], BTreeMap::from([(q, j)]))
    }

    pub fn num(&self) -> &[Coeff] {
        &self.num
    }

    pub fn den(&self) -> &BTreeMap<Rational, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// Pole locations as points `z = -q`.
    pub fn pole_points(&self) -> impl Iterator<Item = Rational> + '_ {
        self.den.keys().map(|q| -q)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        Self::new(poly_scale(&self.num, c), self.den.clone())
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&Coeff::rational(r.clone()))
    }

    pub fn substitute_zero(&self, vars: &[Indeterminate]) -> Self {
        Self::new(self.num.iter().map(|c| c.substitute_zero(vars)).collect(), self.den.clone())
    }

    pub fn indeterminates(&self) -> Vec<Indeterminate> {
        let mut v: Vec<_> = self.num.iter().flat_map(Coeff::indeterminates).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `self(alpha * w + beta)` as a function of `w`; `alpha` must be nonzero.
    pub fn affine_substitute(&self, alpha: &Rational, beta: &Rational) -> Self {
        assert!(!alpha.is_zero(), "affine substitution needs a nonzero slope");
        let mut num = poly_compose_affine(&self.num, alpha, beta);
        let mut den = BTreeMap::new();
        let mut total = 0u32;
        for (q, m) in &self.den {
            // alpha*w + beta + q = alpha * (w + (beta + q)/alpha)
            *den.entry((beta + q) / alpha).or_insert(0) += m;
            total += m;
        }
        let factor = num_traits::pow(alpha.clone(), total as usize);
        num = poly_scale(&num, &Coeff::rational(Rational::one() / factor));
        Self::new(num, den)
    }

    /// `self(z + s)`.
    pub fn shift(&self, s: &Rational) -> Self {
        self.affine_substitute(&Rational::one(), s)
    }

    pub fn evaluate_at(&self, x: &Rational) -> Result<Coeff> {
        let mut den = Rational::one();
        for (q, m) in &self.den {
            let f = x + q;
            if f.is_zero() {
                return Err(Error::Pole(fmt_rational(x)));
            }
            den *= num_traits::pow(f, *m as usize);
        }
        Ok(poly_eval(&self.num, x).scale_rational(&(Rational::one() / den)))
    }

    /// Partial-fraction decomposition, computed once per value.
    pub fn partial_fractions(&self) -> &PartialFractions {
        self.pf.get_or_init(|| self.compute_partial_fractions())
    }

    fn compute_partial_fractions(&self) -> PartialFractions {
        let full = expand_den(&self.den);
        let (poly_part, rem) = divmod_monic(&self.num, &full);
        let mut fractions = BTreeMap::new();
        for (q, m) in &self.den {
            let mut rest = self.den.clone();
            rest.remove(q);
            // Expand rem / rest around z = -q in w = z + q.
            let r = poly_compose_affine(&rem, &Rational::one(), &-q);
            let h = poly_compose_affine(&expand_den(&rest), &Rational::one(), &-q);
            let h0 = h[0].as_scalar().expect("denominator has rational coefficients");
            let h0_inv = Coeff::scalar(h0.inv().expect("poles are distinct"));
            let mut series: Vec<Coeff> = Vec::with_capacity(*m as usize);
            for i in 0..*m as usize {
                let mut acc = r.get(i).cloned().unwrap_or_default();
                for j in 1..=i {
                    if let Some(hj) = h.get(j) {
                        acc -= &(hj * &series[i - j]);
                    }
                }
                series.push(&acc * &h0_inv);
            }
            for (i, s) in series.into_iter().enumerate() {
                if !s.is_zero() {
                    fractions.insert((q.clone(), *m - i as u32), s);
                }
            }
        }
        PartialFractions { poly_part, fractions }
    }

    /// Rendering with a chosen variable name.
    pub fn render(&self, var: &str) -> String {
        let (num, count) = fmt_poly(&self.num, var);
        if self.den.is_empty() {
            return num;
        }
        let num = if count > 1 {
            format!("({num})")
        } else {
            num
        };
        let factors: Vec<String> = self.den.iter().map(|(q, m)| fmt_factor_pow(q, *m, var)).collect();
        if factors.len() == 1 {
            format!("{num}/{}", factors[0])
        } else {
            format!("{num}/({})", factors.join("*"))
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let den: serde_json::Map<String, serde_json::Value> =
            self.den.iter().map(|(q, m)| (fmt_rational(q), serde_json::Value::from(*m))).collect();
        serde_json::json!({
            "text": self.to_string(),
            "num": self.num.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "den": den,
        })
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("z"))
    }
}

impl From<Coeff> for RationalFn {
    fn from(c: Coeff) -> Self {
        RationalFn::constant(c)
    }
}

impl<'a> Add<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &'a RationalFn) -> RationalFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let mut common = self.den.clone();
        for (q, m) in &rhs.den {
            let e = common.entry(q.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        let extra = |den: &BTreeMap<Rational, u32>| -> Poly {
            expand_den(
                &common
                    .iter()
                    .map(|(q, m)| (q.clone(), m - den.get(q).copied().unwrap_or(0)))
                    .collect(),
            )
        };
        let num = poly_add(&poly_mul(&self.num, &extra(&self.den)), &poly_mul(&rhs.num, &extra(&rhs.den)));
        RationalFn::new(num, common)
    }
}

impl<'a> Sub<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &'a RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    // Denominator multiplicities add.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &'a RationalFn) -> RationalFn {
        let mut den = self.den.clone();
        for (q, m) in &rhs.den {
            *den.entry(q.clone()).or_insert(0) += m;
        }
        RationalFn::new(poly_mul(&self.num, &rhs.num), den)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn::new(poly_neg(&self.num), self.den.clone())
    }
}

impl Add for RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: RationalFn) -> RationalFn {
        &self + &rhs
    }
}

impl Sub for RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: RationalFn) -> RationalFn {
        &self - &rhs
    }
}

impl Mul for RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: RationalFn) -> RationalFn {
        &self * &rhs
    }
}

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        -&self
    }
}

/// `poly_part(z) + sum c_{q,j} / (z + q)^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub poly_part: Poly,
    /// (pole parameter q, power j) -> nonzero coefficient.
    pub fractions: BTreeMap<(Rational, u32), Coeff>,
}

impl PartialFractions {
    pub fn recombine(&self) -> RationalFn {
        let mut acc = RationalFn::polynomial(self.poly_part.clone());
        for ((q, j), c) in &self.fractions {
            acc = &acc + &RationalFn::pole_term(c.clone(), q.clone(), *j);
        }
        acc
    }

    pub fn has_poly_part(&self) -> bool {
        !self.poly_part.is_empty()
    }

    /// Termwise evaluation, used to cross-check [`RationalFn::evaluate_at`].
    pub fn evaluate_at(&self, x: &Rational) -> Result<Coeff> {
        let mut acc = poly_eval(&self.poly_part, x);
        for ((q, j), c) in &self.fractions {
            let f = x + q;
            if f.is_zero() {
                return Err(Error::Pole(fmt_rational(x)));
            }
            acc += &c.scale_rational(&(Rational::one() / num_traits::pow(f, *j as usize)));
        }
        Ok(acc)
    }

    pub fn render(&self, var: &str) -> String {
        let mut out = String::new();
        let (poly, count) = fmt_poly(&self.poly_part, var);
        if count > 0 {
            out.push_str(&poly);
        }
        for ((q, j), c) in &self.fractions {
            let factor = fmt_factor_pow(q, *j, var);
            if c.is_single_term() {
                let text = c.to_string();
                let (neg, mag) = match text.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, text),
                };
                crate::radial::push_signed(&mut out, neg, &format!("{mag}/{factor}"));
            } else {
                crate::radial::push_signed(&mut out, false, &format!("({c})/{factor}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for PartialFractions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("z"))
    }
}

/// Convenience for `p/q` coefficients in tests and tables.
pub fn rc(n: i64, d: i64) -> Coeff {
    Coeff::scalar(GaussianRational::real(crate::exactalg::rat(n, d)))
}

/// `(z + a) / (z + b)`.
pub fn ratio(a: i64, b: i64) -> RationalFn {
    &RationalFn::linear(int(a)) * &RationalFn::pole_term(Coeff::one(), int(b), 1)
}

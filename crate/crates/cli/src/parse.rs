//! Expression parsers for symbols and for rational functions of `z`.
//!
//! Symbols:
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power ('*' power)*
//! power  := atom ['^' exp]
//! atom   := int ['/' int] | 'i' | Ck | Cmk | abarl | 'z' | 'conj(z)' | 'e(' int ')'
//!         | 'r' | 'ln(r)' | '(' expr ')'
//! exp    := ['-'] int | '(' ['-'] int ['/' int] ')'
//! ```
//!
//! Only `r` takes negative or fractional exponents.

use std::collections::BTreeMap;
use std::str::FromStr;

use htoeplitz::exactalg::{int, Coeff, GaussianRational, Indeterminate, Rational};
use htoeplitz::{RadialFunction, RadialKey, RationalFn, Symbol};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(num_bigint::BigInt),
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            Tok::Int(digits.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if "+-*/^()".contains(c) {
            i += 1;
            Tok::Op(c)
        } else {
            return Err(ParseError { line: l, column: col, message: format!("unexpected character '{c}'") });
        };
        column += i - start;
        out.push(Spanned { tok, line: l, column: col });
    }
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Self { toks: tokenize(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    /// Steps back over a token taken by `next`.
    fn back(&mut self, t: &Tok) {
        if *t != Tok::End {
            self.pos -= 1;
        }
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError { line: s.line, column: s.column, message: message.into() }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == name => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected '{name}'"))),
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat('-');
        match self.next() {
            Tok::Int(n) => {
                let n: i64 = n.try_into().map_err(|_| self.error("integer out of range"))?;
                Ok(if neg { -n } else { n })
            }
            t => {
                self.back(&t);
                Err(self.error("expected integer"))
            }
        }
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        if self.eat('(') {
            let p = self.integer()?;
            let q = if self.eat('/') { self.integer()? } else { 1 };
            if q == 0 {
                return Err(self.error("zero denominator"));
            }
            self.expect(')')?;
            Ok(Rational::new(p.into(), q.into()))
        } else {
            Ok(int(self.integer()?))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(self.error(format!("unexpected {}", describe(t)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number {n}"),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Op(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

fn indeterminate(name: &str) -> Option<Indeterminate> {
    Indeterminate::from_str(name).ok()
}

fn radial_symbol(key: RadialKey) -> Symbol {
    Symbol::component(0, RadialFunction::term(key, Coeff::one()))
}

fn scalar_symbol(c: Coeff) -> Symbol {
    Symbol::constant(c)
}

fn non_negative(cur: &Cursor, e: &Rational) -> Result<u32, ParseError> {
    if !e.is_integer() || e < &Rational::zero() {
        return Err(cur.error("only r takes negative or fractional exponents"));
    }
    e.to_integer().try_into().map_err(|_| cur.error("exponent too large"))
}

fn pow<T: Clone>(base: &T, n: u32, one: T, mul: impl Fn(&T, &T) -> T) -> T {
    (0..n).fold(one, |acc, _| mul(&acc, base))
}

/// Parses a symbol expression into its canonical [`Symbol`].
pub fn parse_symbol(text: &str) -> Result<Symbol, ParseError> {
    let mut cur = Cursor::new(text)?;
    let s = symbol_expr(&mut cur)?;
    cur.finish()?;
    Ok(s)
}

fn symbol_expr(cur: &mut Cursor) -> Result<Symbol, ParseError> {
    let negate = if cur.eat('-') {
        true
    } else {
        cur.eat('+');
        false
    };
    let first = symbol_term(cur)?;
    let mut acc = if negate { -&first } else { first };
    loop {
        if cur.eat('+') {
            acc = &acc + &symbol_term(cur)?;
        } else if cur.eat('-') {
            acc = &acc - &symbol_term(cur)?;
        } else {
            return Ok(acc);
        }
    }
}

fn symbol_term(cur: &mut Cursor) -> Result<Symbol, ParseError> {
    let mut acc = symbol_power(cur)?;
    while cur.eat('*') {
        acc = &acc * &symbol_power(cur)?;
    }
    Ok(acc)
}

fn symbol_power(cur: &mut Cursor) -> Result<Symbol, ParseError> {
    if let Tok::Ident(name) = cur.peek() {
        if name == "r" {
            cur.next();
            let exp = if cur.eat('^') { cur.exponent()? } else { Rational::one() };
            return Ok(radial_symbol(RadialKey::new(exp, 0)));
        }
    }
    let base = symbol_atom(cur)?;
    if cur.eat('^') {
        let e = cur.exponent()?;
        let n = non_negative(cur, &e)?;
        return Ok(pow(&base, n, Symbol::one(), |a, b| a * b));
    }
    Ok(base)
}

fn symbol_atom(cur: &mut Cursor) -> Result<Symbol, ParseError> {
    match cur.next() {
        Tok::Int(n) => {
            let mut value = Rational::from_integer(n);
            if cur.eat('/') {
                match cur.next() {
                    Tok::Int(d) if !d.is_zero() => value /= Rational::from_integer(d),
                    t => {
                        cur.back(&t);
                        return Err(cur.error("expected nonzero denominator"));
                    }
                }
            }
            Ok(scalar_symbol(Coeff::rational(value)))
        }
        Tok::Op('(') => {
            let inner = symbol_expr(cur)?;
            cur.expect(')')?;
            Ok(inner)
        }
        Tok::Ident(name) => match name.as_str() {
            "i" => Ok(scalar_symbol(Coeff::scalar(GaussianRational::new(int(0), int(1))))),
            "z" => Ok(Symbol::z_power(1)),
            "conj" => {
                cur.expect('(')?;
                cur.expect_ident("z")?;
                cur.expect(')')?;
                Ok(Symbol::component(-1, RadialFunction::power(1, Coeff::one())))
            }
            "e" => {
                cur.expect('(')?;
                let k = cur.integer()?;
                cur.expect(')')?;
                Ok(Symbol::component(k, RadialFunction::power(0, Coeff::one())))
            }
            "ln" => {
                cur.expect('(')?;
                cur.expect_ident("r")?;
                cur.expect(')')?;
                Ok(radial_symbol(RadialKey::new(int(0), 1)))
            }
            other => match indeterminate(other) {
                Some(x) => Ok(scalar_symbol(Coeff::var(x))),
                None => {
                    cur.pos -= 1;
                    Err(cur.error(format!("unknown identifier '{other}'")))
                }
            },
        },
        t => {
            cur.back(&t);
            Err(cur.error(format!("unexpected {}", describe(&t))))
        }
    }
}

/// Parses a radial expression (a symbol with only the `k = 0` component).
pub fn parse_radial(text: &str) -> Result<RadialFunction, ParseError> {
    let s = parse_symbol(text)?;
    if s.components().any(|(k, _)| k != 0) {
        return Err(ParseError { line: 1, column: 1, message: "expected a radial expression (no z, conj(z), e(k))".into() });
    }
    Ok(s.get(0))
}

/// Parses a rational function of `z`, e.g. `-1/(z+4)^2`.
pub fn parse_rational_fn(text: &str) -> Result<RationalFn, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = rf_expr(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

fn rf_expr(cur: &mut Cursor) -> Result<RationalFn, ParseError> {
    let negate = if cur.eat('-') {
        true
    } else {
        cur.eat('+');
        false
    };
    let first = rf_term(cur)?;
    let mut acc = if negate { -&first } else { first };
    loop {
        if cur.eat('+') {
            acc = &acc + &rf_term(cur)?;
        } else if cur.eat('-') {
            acc = &acc - &rf_term(cur)?;
        } else {
            return Ok(acc);
        }
    }
}

fn rf_term(cur: &mut Cursor) -> Result<RationalFn, ParseError> {
    let (base, n) = rf_power(cur)?;
    let mut acc = pow(&base, n, RationalFn::constant(Coeff::one()), |a, b| a * b);
    loop {
        if cur.eat('*') {
            let (base, n) = rf_power(cur)?;
            acc = &acc * &pow(&base, n, RationalFn::constant(Coeff::one()), |a, b| a * b);
        } else if cur.eat('/') {
            let (base, n) = rf_power(cur)?;
            let inv = reciprocal(&base).ok_or_else(|| cur.error(format!("cannot divide by {base}")))?;
            acc = &acc * &pow(&inv, n, RationalFn::constant(Coeff::one()), |a, b| a * b);
        } else {
            return Ok(acc);
        }
    }
}

fn rf_power(cur: &mut Cursor) -> Result<(RationalFn, u32), ParseError> {
    let base = rf_atom(cur)?;
    if cur.eat('^') {
        let e = Rational::from_integer(cur.integer()?.into());
        let n = non_negative(cur, &e)?;
        return Ok((base, n));
    }
    Ok((base, 1))
}

fn rf_atom(cur: &mut Cursor) -> Result<RationalFn, ParseError> {
    match cur.next() {
        Tok::Int(n) => Ok(RationalFn::constant(Coeff::rational(Rational::from_integer(n)))),
        Tok::Op('(') => {
            let inner = rf_expr(cur)?;
            cur.expect(')')?;
            Ok(inner)
        }
        Tok::Ident(name) => match name.as_str() {
            "z" => Ok(RationalFn::var()),
            "i" => Ok(RationalFn::constant(Coeff::scalar(GaussianRational::new(int(0), int(1))))),
            other => match indeterminate(other) {
                Some(x) => Ok(RationalFn::constant(Coeff::var(x))),
                None => {
                    cur.pos -= 1;
                    Err(cur.error(format!("unknown identifier '{other}'")))
                }
            },
        },
        t => {
            cur.back(&t);
            Err(cur.error(format!("unexpected {}", describe(&t))))
        }
    }
}

/// `1/f` when the numerator of `f` splits into linear factors over the
/// rationals, up to a scalar.
fn reciprocal(f: &RationalFn) -> Option<RationalFn> {
    let scalars: Option<Vec<GaussianRational>> = f.num().iter().map(|c| c.as_scalar()).collect();
    let scalars = scalars?;
    let lead = scalars.last()?.clone();
    let inv_lead = lead.inv()?;
    // Monic numerator with rational coefficients, lowest degree first.
    let mut monic = Vec::with_capacity(scalars.len());
    for c in &scalars {
        let c = c * &inv_lead;
        if !c.is_real() {
            return None;
        }
        monic.push(c.re().clone());
    }
    let mut out = RationalFn::constant(Coeff::scalar(inv_lead));
    for (q, j) in f.den() {
        for _ in 0..*j {
            out = &out * &RationalFn::linear(q.clone());
        }
    }
    while monic.len() > 1 {
        let root = rational_root(&monic)?;
        monic = deflate(&monic, &root);
        out = &out * &RationalFn::pole_term(Coeff::one(), -root, 1);
    }
    Some(out)
}

fn poly_at(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Divides `p` by `z - root`.
fn deflate(p: &[Rational], root: &Rational) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.len() - 1];
    let mut carry = Rational::zero();
    for i in (1..p.len()).rev() {
        carry = &p[i] + &carry * root;
        out[i - 1] = carry.clone();
    }
    out
}

fn divisors(n: &num_bigint::BigInt) -> Option<Vec<num_bigint::BigInt>> {
    use num_traits::{Signed, ToPrimitive};
    let n = n.abs().to_u64().filter(|n| *n <= 1 << 40)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d.into());
            out.push((n / d).into());
        }
        d += 1;
    }
    Some(out)
}

fn rational_root(p: &[Rational]) -> Option<Rational> {
    if p[0].is_zero() {
        return Some(Rational::zero());
    }
    let scale = p.iter().fold(num_bigint::BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    let ints: Vec<num_bigint::BigInt> = p.iter().map(|c| (c * Rational::from_integer(scale.clone())).to_integer()).collect();
    for num in divisors(&ints[0])? {
        for den in divisors(ints.last()?)? {
            for sign in [1, -1] {
                let x = Rational::new(num.clone() * sign, den.clone());
                if poly_at(p, &x).is_zero() {
                    return Some(x);
                }
            }
        }
    }
    None
}

/// Parses `name=value` bindings such as `abar1=0.3+0.1i`.
pub fn parse_binding(text: &str) -> Result<(Indeterminate, num_complex::Complex64), String> {
    let (name, value) = text.split_once('=').ok_or_else(|| format!("binding '{text}' is not name=value"))?;
    let x = indeterminate(name.trim()).ok_or_else(|| format!("unknown identifier '{}'", name.trim()))?;
    let v: num_complex::Complex64 =
        value.trim().parse().map_err(|_| format!("cannot read '{}' as a complex number", value.trim()))?;
    Ok((x, v))
}

pub fn parse_bindings(items: &[String]) -> Result<BTreeMap<Indeterminate, num_complex::Complex64>, String> {
    items.iter().map(|s| parse_binding(s)).collect()
}

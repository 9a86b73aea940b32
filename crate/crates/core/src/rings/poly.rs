//! Sparse multivariate polynomials over the integers.
//!
//! Terms live in a `BTreeMap` from monomials to nonzero `BigInt`
//! coefficients, so equal polynomials have identical representations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A polynomial variable. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Natural ordering: `a_2 < a_10`, used for rendering.
    pub fn natural_cmp(&self, other: &Var) -> Ordering {
        natural_key(&self.0).cmp(&natural_key(&other.0))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Chunk<'a> {
    Num(u128, &'a str),
    Text(&'a str),
}

fn natural_key(s: &str) -> Vec<Chunk<'_>> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let digit = bytes[i].is_ascii_digit();
        while i < bytes.len() && bytes[i].is_ascii_digit() == digit {
            i += 1;
        }
        let piece = &s[start..i];
        if digit {
            out.push(Chunk::Num(piece.parse().unwrap_or(u128::MAX), piece));
        } else {
            out.push(Chunk::Text(piece));
        }
    }
    out
}

/// A monomial as a sorted list of `(variable, exponent)` with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn scale_exponents(&self, p: u32) -> Monomial {
        Monomial(self.0.iter().map(|(v, e)| (v.clone(), e * p)).collect())
    }

    /// Exponent vector comparison in natural variable order (lex).
    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let mut a: Vec<&(Var, u32)> = self.0.iter().collect();
        let mut b: Vec<&(Var, u32)> = other.0.iter().collect();
        a.sort_by(|x, y| x.0.natural_cmp(&y.0));
        b.sort_by(|x, y| x.0.natural_cmp(&y.0));
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(x), Some(y)) => match x.0.natural_cmp(&y.0) {
                    // x's variable comes first and is absent from b: a has the larger exponent there
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if x.1 != y.1 {
                            return x.1.cmp(&y.1);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }

    /// Graded-lex: higher total degree first, then lex on exponent vectors.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors: Vec<&(Var, u32)> = self.0.iter().collect();
        factors.sort_by(|x, y| x.0.natural_cmp(&y.0));
        for (k, (v, e)) in factors.into_iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(Var::new(name), 1), BigInt::one());
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(it: I) -> Self {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in it {
            *acc.entry(m).or_insert_with(BigInt::zero) += c;
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// The constant value, if this polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(x) => {
                    *x += c;
                    if x.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        Poly { terms }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        // a single term raises termwise
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let e32 = u32::try_from(e).expect("exponent fits in u32");
            let mono = Monomial(m.0.iter().map(|(v, x)| (v.clone(), x * e32)).collect());
            let mut terms = BTreeMap::new();
            terms.insert(mono, num_traits::pow(c.clone(), e as usize));
            return Poly { terms };
        }
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Divides every coefficient by `n`; on failure returns the first
    /// coefficient (in term order) that is not divisible.
    pub fn div_exact(&self, n: &BigInt) -> Result<Poly, BigInt> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(n);
            if !r.is_zero() {
                return Err(c.clone());
            }
            terms.insert(m.clone(), q);
        }
        Ok(Poly { terms })
    }

    /// True when every coefficient is divisible by `n`.
    pub fn divisible_by(&self, n: &BigInt) -> bool {
        self.terms.values().all(|c| c.is_multiple_of(n))
    }

    /// Substitutes `v -> v^p` for every variable.
    pub fn frobenius(&self, p: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.scale_exponents(p), c.clone()))
                .collect(),
        }
    }

    /// Renames variables through `f`.
    pub fn rename(&self, f: impl Fn(&Var) -> Var) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut fs: Vec<(Var, u32)> = m.0.iter().map(|(v, e)| (f(v), *e)).collect();
            fs.sort();
            let mut merged: Vec<(Var, u32)> = Vec::with_capacity(fs.len());
            for (v, e) in fs {
                match merged.last_mut() {
                    Some(last) if last.0 == v => last.1 += e,
                    _ => merged.push((v, e)),
                }
            }
            (Monomial(merged), c.clone())
        }))
    }

    /// Terms sorted for display (graded-lex, largest first).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &BigInt)> {
        let mut ts: Vec<(&Monomial, &BigInt)> = self.terms.iter().collect();
        ts.sort_by(|a, b| b.0.grlex_cmp(a.0));
        ts
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Parses polynomial text: integers, identifiers, `+ - * ^` and parentheses.
pub fn parse_poly(text: &str) -> Result<Poly, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: u64 = digits
                .parse()
                .map_err(|_| self.err("expected a non-negative exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Poly::constant(digits.parse::<BigInt>().unwrap()))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Poly::var(name))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn square_of_binomial() {
        let ab = p("a + b");
        assert_eq!(ab.pow(2), p("a^2 + 2*a*b + b^2"));
        assert_eq!(ab.pow(2).to_string(), "a^2 + 2*a*b + b^2");
    }

    #[test]
    fn rendering_is_graded_lex_with_natural_names() {
        let q = p("2*a_2 + a_1^2");
        assert_eq!(q.to_string(), "a_1^2 + 2*a_2");
        let r = p("a_10 - a_2 + 3");
        assert_eq!(r.to_string(), "-a_2 + a_10 + 3");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(p("-7").to_string(), "-7");
    }

    #[test]
    fn div_exact_and_frobenius() {
        assert_eq!(
            p("2*a + 4*b").div_exact(&BigInt::from(2)).unwrap(),
            p("a + 2*b")
        );
        assert_eq!(
            p("2*a + 3*b").div_exact(&BigInt::from(2)),
            Err(BigInt::from(3))
        );
        assert_eq!(p("a + b").frobenius(2), p("a^2 + b^2"));
        assert_eq!(p("3").frobenius(5), p("3"));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = parse_poly("a + * b").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_poly("(a + b").is_err());
        assert!(parse_poly("a^").is_err());
        assert!(parse_poly("").is_err());
    }

    #[test]
    fn cancellation_prunes_terms() {
        let q = p("a*b - b*a");
        assert!(q.is_zero());
        assert_eq!(p("(a - b)*(a + b)"), p("a^2 - b^2"));
    }

    #[test]
    fn rename_merges_factors() {
        let q = p("x*y").rename(|_| Var::new("z"));
        assert_eq!(q, p("z^2"));
    }
}

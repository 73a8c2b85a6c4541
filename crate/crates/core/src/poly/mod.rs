//! Exact rationals and a sparse multivariate polynomial ring over weight
//! symbols. Monomial exponents double as predicate cardinalities.

mod weights;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::logic::Signature;

pub use weights::{
    filter_cardinality, filter_cardinality_with, monomial_cardinality, one_type_weight, two_table_weight,
    PredicateCardinality, WeightFunction, WeightPair, WeightValue,
};

pub type Integer = BigInt;
pub type Rational = num_rational::BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

/// Parses `"3"`, `"-1"`, `"2/5"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Weight(format!("cannot parse `{text}` as a rational"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Weight(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    Ok(Rational::from_integer(t.parse().map_err(|_| bad())?))
}

/// `2·p + 0` for the positive weight of predicate `p`, `2·p + 1` for the
/// negative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

/// One of the two weights `w(P)`, `w̄(P)` of a predicate, by signature index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightSymbol {
    pub predicate: usize,
    pub polarity: Polarity,
}

impl WeightSymbol {
    pub fn positive(predicate: usize) -> Self {
        WeightSymbol {
            predicate,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(predicate: usize) -> Self {
        WeightSymbol {
            predicate,
            polarity: Polarity::Negative,
        }
    }

    pub fn id(self) -> SymbolId {
        SymbolId(2 * self.predicate as u32 + u32::from(self.polarity == Polarity::Negative))
    }
}

impl From<SymbolId> for WeightSymbol {
    fn from(id: SymbolId) -> Self {
        WeightSymbol {
            predicate: (id.0 / 2) as usize,
            polarity: if id.0.is_multiple_of(2) {
                Polarity::Positive
            } else {
                Polarity::Negative
            },
        }
    }
}

/// Product of symbols with positive exponents, sorted by symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(SymbolId, u32); 2]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(s: SymbolId, exp: u32) -> Self {
        let mut m = Monomial::one();
        if exp > 0 {
            m.0.push((s, exp));
        }
        m
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (SymbolId, u32)>) -> Self {
        pairs
            .into_iter()
            .fold(Monomial::one(), |acc, (s, e)| acc.mul(&Monomial::var(s, e)))
    }

    pub fn exponent(&self, s: SymbolId) -> u32 {
        self.0.iter().find(|(t, _)| *t == s).map_or(0, |(_, e)| *e)
    }

    pub fn factors(&self) -> &[(SymbolId, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| u64::from(*e)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(s, x)| (s, x * e)).collect())
    }

    fn within(&self, caps: &DegreeCaps) -> bool {
        caps.is_empty() || self.0.iter().all(|&(s, e)| caps.allows(s, e))
    }
}

/// Upper bounds on symbol exponents. Multiplying under caps computes in the
/// quotient ring where `s^(cap+1) = 0`; since no operation lowers exponents,
/// every surviving coefficient is exact.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeCaps(BTreeMap<SymbolId, u32>);

impl DegreeCaps {
    pub fn none() -> Self {
        DegreeCaps::default()
    }

    pub fn set(&mut self, s: SymbolId, cap: u32) {
        let e = self.0.entry(s).or_insert(cap);
        *e = (*e).min(cap);
    }

    pub fn get(&self, s: SymbolId) -> Option<u32> {
        self.0.get(&s).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn allows(&self, s: SymbolId, e: u32) -> bool {
        self.0.get(&s).is_none_or(|&c| e <= c)
    }
}

/// Sparse polynomial with exact rational coefficients. No zero coefficient
/// is ever stored, so equal polynomials have equal representations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl WeightPolynomial {
    pub fn zero() -> Self {
        WeightPolynomial::default()
    }

    pub fn one() -> Self {
        WeightPolynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        WeightPolynomial::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        WeightPolynomial { terms }
    }

    pub fn symbol(s: SymbolId) -> Self {
        WeightPolynomial::term(Monomial::var(s, 1), Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = WeightPolynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    /// The coefficient of `m`.
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if the polynomial has no symbols.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &WeightPolynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &WeightPolynomial, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * k);
        }
    }

    pub fn scale(&self, k: &Rational) -> WeightPolynomial {
        if k.is_zero() {
            return WeightPolynomial::zero();
        }
        WeightPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_truncated(&self, other: &WeightPolynomial, caps: &DegreeCaps) -> WeightPolynomial {
        if self.is_zero() || other.is_zero() {
            return WeightPolynomial::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = WeightPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if m.within(caps) {
                    out.add_term(m, ca * cb);
                }
            }
        }
        out
    }

    pub fn pow_truncated(&self, mut e: u64, caps: &DegreeCaps) -> WeightPolynomial {
        if e == 0 {
            return WeightPolynomial::one();
        }
        if let Some(c) = self.as_constant() {
            return WeightPolynomial::constant(rational_pow(&c, e));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().expect("one term");
            if let Ok(e32) = u32::try_from(e) {
                let m = m.pow(e32);
                if !m.within(caps) {
                    return WeightPolynomial::zero();
                }
                return WeightPolynomial::term(m, rational_pow(c, e));
            }
        }
        let mut base = self.clone();
        let mut acc = WeightPolynomial::one();
        loop {
            if e & 1 == 1 {
                acc = acc.mul_truncated(&base, caps);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul_truncated(&base, caps);
        }
        acc
    }

    pub fn pow(&self, e: u64) -> WeightPolynomial {
        self.pow_truncated(e, &DegreeCaps::none())
    }

    pub fn truncate(&self, caps: &DegreeCaps) -> WeightPolynomial {
        WeightPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.within(caps))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> WeightPolynomial {
        WeightPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Replaces each symbol for which `value` returns a number.
    pub fn substitute(&self, value: &impl Fn(SymbolId) -> Option<Rational>) -> WeightPolynomial {
        let mut out = WeightPolynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Monomial::one();
            for &(s, e) in m.factors() {
                match value(s) {
                    Some(v) => coeff *= rational_pow(&v, u64::from(e)),
                    None => rest.0.push((s, e)),
                }
            }
            out.add_term(rest, coeff);
        }
        out
    }

    /// Full numeric substitution.
    pub fn evaluate(&self, value: &impl Fn(SymbolId) -> Option<Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(s, e) in m.factors() {
                let v = value(s).ok_or_else(|| Error::MissingWeight(format!("#{}", s.0)))?;
                t *= rational_pow(&v, u64::from(e));
            }
            total += t;
        }
        Ok(total)
    }

    /// Groups terms by the exponent of `s`, dropping `s` from the monomials.
    pub fn collect_by(&self, s: SymbolId) -> BTreeMap<u32, WeightPolynomial> {
        let mut out: BTreeMap<u32, WeightPolynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            let rest = Monomial(m.0.iter().copied().filter(|(t, _)| *t != s).collect());
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn symbols(&self) -> Vec<SymbolId> {
        let mut v: Vec<SymbolId> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(s, _)| *s))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        PolyDisplay { p: self, sig }
    }
}

/// Higher total degree first, then higher exponents on lower symbols first.
fn graded_lex(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    b.degree().cmp(&a.degree()).then_with(|| {
        let (x, y) = (a.factors(), b.factors());
        for k in 0..x.len().max(y.len()) {
            match (x.get(k), y.get(k)) {
                (Some(p), Some(q)) if p == q => continue,
                (Some(p), Some(q)) if p.0 == q.0 => return q.1.cmp(&p.1),
                (Some(p), Some(q)) => return p.0.cmp(&q.0),
                (Some(_), None) => return std::cmp::Ordering::Less,
                (None, Some(_)) => return std::cmp::Ordering::Greater,
                (None, None) => break,
            }
        }
        std::cmp::Ordering::Equal
    })
}

pub fn rational_pow(base: &Rational, e: u64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    if base.is_zero() || base.is_one() {
        return base.clone();
    }
    let e32 = e.to_u32().expect("exponent fits in u32");
    Rational::new_raw(base.numer().pow(e32), base.denom().pow(e32))
}

impl Add for &WeightPolynomial {
    type Output = WeightPolynomial;
    fn add(self, rhs: &WeightPolynomial) -> WeightPolynomial {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Add for WeightPolynomial {
    type Output = WeightPolynomial;
    fn add(mut self, rhs: WeightPolynomial) -> WeightPolynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Neg for &WeightPolynomial {
    type Output = WeightPolynomial;
    fn neg(self) -> WeightPolynomial {
        WeightPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Sub for &WeightPolynomial {
    type Output = WeightPolynomial;
    fn sub(self, rhs: &WeightPolynomial) -> WeightPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &WeightPolynomial {
    type Output = WeightPolynomial;
    fn mul(self, rhs: &WeightPolynomial) -> WeightPolynomial {
        self.mul_truncated(rhs, &DegreeCaps::none())
    }
}

impl Mul for WeightPolynomial {
    type Output = WeightPolynomial;
    fn mul(self, rhs: WeightPolynomial) -> WeightPolynomial {
        &self * &rhs
    }
}

impl From<Rational> for WeightPolynomial {
    fn from(c: Rational) -> Self {
        WeightPolynomial::constant(c)
    }
}

struct PolyDisplay<'a> {
    p: &'a WeightPolynomial,
    sig: &'a Signature,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.p.terms.iter().collect();
        terms.sort_by(|a, b| graded_lex(a.0, b.0));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let a = c.abs();
            let mut parts = Vec::new();
            if !a.is_one() || m.is_one() {
                parts.push(a.to_string());
            }
            for &(s, e) in m.factors() {
                let ws = WeightSymbol::from(s);
                let name = self.sig.predicates().get(ws.predicate).map_or("?", |p| p.name.as_str());
                let base = match ws.polarity {
                    Polarity::Positive => format!("w({name})"),
                    Polarity::Negative => format!("wbar({name})"),
                };
                parts.push(if e == 1 { base } else { format!("{base}^{e}") });
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

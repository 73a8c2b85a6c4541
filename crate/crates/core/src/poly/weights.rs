use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::{Monomial, Polarity, Rational, SymbolId, WeightPolynomial, WeightSymbol};
use crate::constraint::CardinalityConstraint;
use crate::error::{Error, Result};
use crate::logic::{OneType, Signature, TwoTable};

/// A single weight: a number, or a symbol that stays symbolic through the
/// computation (optionally carrying the number substituted at the end).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightValue {
    Num(Rational),
    Sym(Option<Rational>),
}

impl WeightValue {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            WeightValue::Num(r) | WeightValue::Sym(Some(r)) => Some(r),
            WeightValue::Sym(None) => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, WeightValue::Sym(_))
    }

    fn make_symbolic(&mut self) {
        if let WeightValue::Num(r) = self {
            *self = WeightValue::Sym(Some(r.clone()));
        }
    }
}

/// `(w(P), w̄(P))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightPair {
    pub w: WeightValue,
    pub wbar: WeightValue,
}

impl WeightPair {
    pub fn numeric(w: Rational, wbar: Rational) -> Self {
        WeightPair {
            w: WeightValue::Num(w),
            wbar: WeightValue::Num(wbar),
        }
    }

    pub fn unit() -> Self {
        WeightPair::numeric(Rational::one(), Rational::one())
    }

    pub fn symbolic() -> Self {
        WeightPair {
            w: WeightValue::Sym(None),
            wbar: WeightValue::Sym(None),
        }
    }
}

/// Symmetric weight function keyed by predicate name. Predicates without an
/// entry weigh `(1, 1)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightFunction {
    pairs: BTreeMap<String, WeightPair>,
}

impl WeightFunction {
    pub fn unit() -> Self {
        WeightFunction::default()
    }

    pub fn set(&mut self, predicate: &str, w: Rational, wbar: Rational) {
        self.pairs.insert(predicate.to_string(), WeightPair::numeric(w, wbar));
    }

    pub fn with(mut self, predicate: &str, w: Rational, wbar: Rational) -> Self {
        self.set(predicate, w, wbar);
        self
    }

    pub fn set_pair(&mut self, predicate: &str, pair: WeightPair) {
        self.pairs.insert(predicate.to_string(), pair);
    }

    pub fn get(&self, predicate: &str) -> WeightPair {
        self.pairs.get(predicate).cloned().unwrap_or_else(WeightPair::unit)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &WeightPair)> {
        self.pairs.iter()
    }

    /// Keeps `w(P)` symbolic so that `|P|` can be read off monomials; the
    /// numeric value, if any, is retained for the final evaluation.
    pub fn make_symbolic(&mut self, predicate: &str) {
        let e = self.pairs.entry(predicate.to_string()).or_insert_with(WeightPair::unit);
        e.w.make_symbolic();
    }

    pub fn is_symbolic(&self, predicate: &str) -> bool {
        self.pairs.get(predicate).is_some_and(|p| p.w.is_symbolic())
    }

    pub fn value(&self, sig: &Signature, s: SymbolId) -> Option<Rational> {
        let ws = WeightSymbol::from(s);
        let pred = sig.predicates().get(ws.predicate)?;
        let pair = self.get(&pred.name);
        match ws.polarity {
            Polarity::Positive => pair.w.value().cloned(),
            Polarity::Negative => pair.wbar.value().cloned(),
        }
    }

    /// The polynomial factors `(w, w̄)` for each predicate, by index.
    pub fn literal_factors(&self, sig: &Signature) -> Vec<(WeightPolynomial, WeightPolynomial)> {
        sig.predicates()
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let pair = self.get(&p.name);
                let f = |v: &WeightValue, s: WeightSymbol| match v {
                    WeightValue::Num(r) => WeightPolynomial::constant(r.clone()),
                    WeightValue::Sym(_) => WeightPolynomial::symbol(s.id()),
                };
                (
                    f(&pair.w, WeightSymbol::positive(idx)),
                    f(&pair.wbar, WeightSymbol::negative(idx)),
                )
            })
            .collect()
    }

    /// Substitutes every symbol with its numeric value.
    pub fn evaluate(&self, sig: &Signature, p: &WeightPolynomial) -> Result<Rational> {
        p.evaluate(&|s| self.value(sig, s)).map_err(|_| {
            let missing = p
                .symbols()
                .into_iter()
                .find(|&s| self.value(sig, s).is_none())
                .map(|s| symbol_name(sig, s))
                .unwrap_or_default();
            Error::MissingWeight(missing)
        })
    }

    /// Substitutes every symbol except the positive symbols of `keep`.
    pub fn evaluate_except(&self, sig: &Signature, p: &WeightPolynomial, keep: &[usize]) -> WeightPolynomial {
        p.substitute(&|s| {
            let ws = WeightSymbol::from(s);
            if ws.polarity == Polarity::Positive && keep.contains(&ws.predicate) {
                None
            } else {
                self.value(sig, s)
            }
        })
    }
}

pub(crate) fn symbol_name(sig: &Signature, s: SymbolId) -> String {
    let ws = WeightSymbol::from(s);
    let name = sig.predicates().get(ws.predicate).map_or("?", |p| p.name.as_str());
    match ws.polarity {
        Polarity::Positive => format!("w({name})"),
        Polarity::Negative => format!("wbar({name})"),
    }
}

/// Product over single-variable literals of the 1-type.
pub fn one_type_weight(sig: &Signature, t: &OneType, wf: &WeightFunction) -> WeightPolynomial {
    let factors = wf.literal_factors(sig);
    t.literals
        .iter()
        .zip(&factors)
        .fold(WeightPolynomial::one(), |acc, (&v, (w, wbar))| {
            &acc * if v { w } else { wbar }
        })
}

/// Product over two-variable literals of the 2-table.
pub fn two_table_weight(sig: &Signature, l: &TwoTable, wf: &WeightFunction) -> WeightPolynomial {
    let factors = wf.literal_factors(sig);
    let binary: Vec<usize> = sig
        .predicates()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.arity == 2)
        .map(|(i, _)| i)
        .collect();
    l.literals
        .iter()
        .zip(&binary)
        .fold(WeightPolynomial::one(), |acc, (&(xy, yx), &p)| {
            let (w, wbar) = &factors[p];
            let a = if xy { w } else { wbar };
            let b = if yx { w } else { wbar };
            &(&acc * a) * b
        })
}

/// Ground-atom counts per predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredicateCardinality(pub BTreeMap<String, u64>);

impl PredicateCardinality {
    pub fn get(&self, p: &str) -> u64 {
        self.0.get(p).copied().unwrap_or(0)
    }
}

impl fmt::Display for PredicateCardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(p, c)| format!("|{p}| = {c}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// `μ_P` is the exponent of `w(P)`.
pub fn monomial_cardinality(sig: &Signature, m: &Monomial) -> PredicateCardinality {
    let mut out = BTreeMap::new();
    for &(s, e) in m.factors() {
        let ws = WeightSymbol::from(s);
        if ws.polarity == Polarity::Positive {
            if let Some(p) = sig.predicates().get(ws.predicate) {
                out.insert(p.name.clone(), u64::from(e));
            }
        }
    }
    PredicateCardinality(out)
}

/// The terms whose cardinalities satisfy `gamma` at domain size `n`.
pub fn filter_cardinality(
    sig: &Signature,
    p: &WeightPolynomial,
    gamma: &CardinalityConstraint,
    n: usize,
) -> Result<WeightPolynomial> {
    filter_cardinality_with(sig, p, gamma, n, &BTreeMap::new())
}

/// Like [`filter_cardinality`], with the counts of some predicates supplied
/// directly (e.g. unary counts fixed by a cardinality vector).
pub fn filter_cardinality_with(
    sig: &Signature,
    p: &WeightPolynomial,
    gamma: &CardinalityConstraint,
    n: usize,
    fixed: &BTreeMap<String, u64>,
) -> Result<WeightPolynomial> {
    gamma.check(sig)?;
    if gamma.is_trivial() {
        return Ok(p.clone());
    }
    let positive: Vec<(SymbolId, &str)> = gamma
        .predicates()
        .into_iter()
        .filter(|name| !fixed.contains_key(name))
        .map(|name| {
            let idx = sig.index_of(&name).expect("checked");
            (WeightSymbol::positive(idx).id(), sig.predicates()[idx].name.as_str())
        })
        .collect();
    Ok(p.filter(|m| {
        gamma.holds(
            &|name| {
                if let Some(&c) = fixed.get(name) {
                    return c as i64;
                }
                positive
                    .iter()
                    .find(|(_, q)| *q == name)
                    .map_or(0, |(s, _)| i64::from(m.exponent(*s)))
            },
            n as i64,
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{enumerate_one_types, enumerate_two_tables};
    use crate::poly::{int, rational, DegreeCaps};
    use proptest::prelude::*;

    fn graph_poly(sig: &Signature, n: u64) -> WeightPolynomial {
        let r = sig.index_of("R").unwrap();
        let w = WeightPolynomial::symbol(WeightSymbol::positive(r).id());
        let wbar = WeightPolynomial::symbol(WeightSymbol::negative(r).id());
        (&w.pow(2) + &wbar.pow(2)).pow(n * (n - 1) / 2)
    }

    #[test]
    fn cardinality_read_off() {
        let sig = Signature::parse("R/2, S/2").unwrap();
        let m = Monomial::from_pairs([(WeightSymbol::positive(0).id(), 4), (WeightSymbol::negative(0).id(), 8)]);
        assert_eq!(monomial_cardinality(&sig, &m).get("R"), 4);
        assert_eq!(monomial_cardinality(&sig, &Monomial::one()).get("R"), 0);
        let m = Monomial::from_pairs([(WeightSymbol::positive(0).id(), 3), (WeightSymbol::positive(1).id(), 1)]);
        let c = monomial_cardinality(&sig, &m);
        assert_eq!((c.get("R"), c.get("S")), (3, 1));
    }

    #[test]
    fn filtering_graph_polynomial() {
        let sig = Signature::parse("R/2").unwrap();
        let p = graph_poly(&sig, 3);
        let two = CardinalityConstraint::parse("|R| = 2").unwrap();
        let kept = filter_cardinality(&sig, &p, &two, 3).unwrap();
        let expected = Monomial::from_pairs([(WeightSymbol::positive(0).id(), 2), (WeightSymbol::negative(0).id(), 4)]);
        assert_eq!(kept, WeightPolynomial::term(expected, int(3)));
        let t = CardinalityConstraint::True;
        assert_eq!(filter_cardinality(&sig, &p, &t, 3).unwrap(), p);
        let one = CardinalityConstraint::parse("|R| = 1").unwrap();
        assert!(filter_cardinality(&sig, &p, &one, 3).unwrap().is_zero());
        let bad = CardinalityConstraint::parse("|Q| = 1").unwrap();
        assert!(filter_cardinality(&sig, &p, &bad, 3).is_err());
    }

    #[test]
    fn literal_weights() {
        let sig = Signature::parse("R/2").unwrap();
        let t = &enumerate_one_types(&sig)[1];
        assert_eq!(
            one_type_weight(&sig, t, &WeightFunction::unit()),
            WeightPolynomial::one()
        );

        let sig = Signature::parse("A/1").unwrap();
        let wf = WeightFunction::unit().with("A", int(1), int(-1));
        let t = &enumerate_one_types(&sig)[0];
        assert_eq!(one_type_weight(&sig, t, &wf), WeightPolynomial::constant(int(-1)));

        let sig = Signature::parse("R/2").unwrap();
        let mut wf = WeightFunction::unit();
        wf.set_pair("R", WeightPair::symbolic());
        let l = &enumerate_two_tables(&sig)[0b01];
        let expected = Monomial::from_pairs([(WeightSymbol::positive(0).id(), 1), (WeightSymbol::negative(0).id(), 1)]);
        assert_eq!(two_table_weight(&sig, l, &wf), WeightPolynomial::term(expected, int(1)));
    }

    #[test]
    fn evaluation_through_weight_function() {
        let sig = Signature::parse("R/2").unwrap();
        let mut wf = WeightFunction::unit().with("R", rational(1, 2), int(3));
        wf.make_symbolic("R");
        assert!(wf.is_symbolic("R"));
        let factors = wf.literal_factors(&sig);
        let p = &factors[0].0 + &factors[0].1;
        assert_eq!(wf.evaluate(&sig, &p).unwrap(), rational(7, 2));
        let mut sym = WeightFunction::unit();
        sym.set_pair("R", WeightPair::symbolic());
        assert!(matches!(sym.evaluate(&sig, &p), Err(Error::MissingWeight(_))));
    }

    proptest! {
        #[test]
        fn filters_partition_monomials(n in 2u64..5, d in 0i64..8, op in 0usize..4) {
            let sig = Signature::parse("R/2").unwrap();
            let p = graph_poly(&sig, n);
            let ops = ["=", "<=", ">", "!="];
            let g = CardinalityConstraint::parse(&format!("|R| {} {}", ops[op], d)).unwrap();
            let yes = filter_cardinality(&sig, &p, &g, n as usize).unwrap();
            let no = filter_cardinality(&sig, &p, &g.clone().negate(), n as usize).unwrap();
            let one = |_: SymbolId| Some(int(1));
            prop_assert_eq!(
                yes.evaluate(&one).unwrap() + no.evaluate(&one).unwrap(),
                p.evaluate(&one).unwrap()
            );
            let caps = DegreeCaps::none();
            prop_assert_eq!(&yes + &no, p.truncate(&caps));
        }
    }
}

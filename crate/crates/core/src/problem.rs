//! End-to-end counting: a sentence with axioms, cardinality constraints and
//! weights, reduced and dispatched to the matching engine.

use std::collections::{BTreeMap, BTreeSet};

use crate::axiom::AxiomSpec;
use crate::constraint::CardinalityConstraint;
use crate::error::{Error, Result};
use crate::fo2::{iterate_vectors, par_map, TypeSpace};
use crate::graph::{graded_vectors, repair_dag, repair_undirected, MemoTable, SplitEngine};
use crate::logic::{parse, Formula, Sentence, Signature};
use crate::numeric::{Budget, Factorials};
use crate::poly::{
    filter_cardinality_with, DegreeCaps, Rational, SymbolId, WeightFunction, WeightPolynomial, WeightSymbol,
};
use crate::reductions::{reduce, BaseAxiom, ReductionResult};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Drop 1-types that violate `Φ(x,x)`.
    pub prune: bool,
    pub budget: Budget,
    /// Handle unary cardinality constraints through symbolic weights
    /// instead of filtering cardinality vectors.
    pub unary_via_symbols: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            prune: true,
            budget: Budget::unlimited(),
            unary_via_symbols: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub signature: Signature,
    pub sentence: Sentence,
    pub axioms: Vec<AxiomSpec>,
    pub constraints: Vec<CardinalityConstraint>,
    pub weights: WeightFunction,
}

enum Statistic {
    ByVector(String),
    ByMonomial(SymbolId),
}

impl Problem {
    pub fn new(signature: Signature) -> Self {
        Problem {
            signature,
            sentence: Sentence::default(),
            axioms: Vec::new(),
            constraints: Vec::new(),
            weights: WeightFunction::unit(),
        }
    }

    /// From a signature declaration and sentence text (empty means `true`).
    pub fn parse(signature: &str, sentence: &str) -> Result<Self> {
        let sig = Signature::parse(signature)?;
        let s = if sentence.trim().is_empty() {
            Sentence::default()
        } else {
            parse(sentence, &sig)?
        };
        Ok(Problem::new(sig).with_sentence(s))
    }

    pub fn with_sentence(mut self, s: Sentence) -> Self {
        self.sentence = s;
        self
    }

    pub fn with_clause(mut self, text: &str) -> Result<Self> {
        let s = parse(text, &self.signature)?;
        self.sentence = self.sentence.and(s);
        Ok(self)
    }

    pub fn with_axiom(mut self, a: AxiomSpec) -> Self {
        self.axioms.push(a);
        self
    }

    pub fn with_constraint(mut self, c: CardinalityConstraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_weights(mut self, wf: WeightFunction) -> Self {
        self.weights = wf;
        self
    }

    pub fn with_weight(mut self, p: &str, w: Rational, wbar: Rational) -> Self {
        self.weights.set(p, w, wbar);
        self
    }

    /// Checks every component against the signature.
    pub fn validate(&self) -> Result<ReductionResult> {
        self.sentence.check(&self.signature)?;
        for (p, _) in self.weights.entries() {
            if self.signature.get(p).is_none() {
                return Err(Error::Weight(format!("unknown predicate `{p}`")));
            }
        }
        let red = reduce(&self.signature, &self.sentence, &self.axioms)?;
        for c in &self.constraints {
            c.check(&red.signature)?;
        }
        let mut bound = red.signature.clone();
        for a in &self.axioms {
            a.bind(&mut bound)?;
        }
        Ok(red)
    }

    /// The exact weighted count at domain size `n`.
    pub fn count(&self, n: usize) -> Result<Rational> {
        self.count_with(n, &SolveOptions::default())
    }

    pub fn count_with(&self, n: usize, opts: &SolveOptions) -> Result<Rational> {
        let red = self.validate()?;
        let p = self.polynomial_with(n, opts)?;
        let wf = red.weight_function(&self.weights);
        p.as_constant().map_or_else(|| wf.evaluate(&red.signature, &p), Ok)
    }

    /// The count as a polynomial in the weight symbols that have no numeric
    /// value (a constant when every weight is numeric).
    pub fn polynomial_with(&self, n: usize, opts: &SolveOptions) -> Result<WeightPolynomial> {
        let buckets = self.buckets(n, None, opts)?;
        Ok(buckets.into_values().fold(WeightPolynomial::zero(), |a, b| a + b))
    }

    /// Weighted mass of the models with `|P| = s`, for every `s`.
    pub fn statistic(&self, n: usize, predicate: &str, opts: &SolveOptions) -> Result<BTreeMap<u64, Rational>> {
        let red = self.validate()?;
        let wf = red.weight_function(&self.weights);
        self.buckets(n, Some(predicate), opts)?
            .into_iter()
            .map(|(s, p)| {
                let v = p.as_constant().map_or_else(|| wf.evaluate(&red.signature, &p), Ok)?;
                Ok((s, v))
            })
            .filter(|r| r.as_ref().map_or(true, |(_, v)| !num_traits::Zero::is_zero(v)))
            .collect()
    }

    fn buckets(&self, n: usize, stat: Option<&str>, opts: &SolveOptions) -> Result<BTreeMap<u64, WeightPolynomial>> {
        let red = self.validate()?;
        let sig = red.signature.clone();
        let gamma =
            CardinalityConstraint::conjunction(self.constraints.iter().cloned().chain(red.constraints.iter().cloned()));
        let base = red.axiom.clone();
        let mut phi = red.matrix();
        if let Some(a) = &base {
            phi = match a {
                BaseAxiom::Dag(r) => repair_dag(&sig, &phi, r)?.0,
                BaseAxiom::Connected(r) | BaseAxiom::Forest(r) => repair_undirected(&sig, &phi, r)?.0,
            };
        }

        let mut wf = red.weight_function(&self.weights);
        let original = wf.clone();
        let constrained = gamma.predicates();
        let arity = |p: &str| sig.arity_of(p);
        let mut fixed_unary = BTreeSet::new();
        for p in &constrained {
            if arity(p)? == 2 || opts.unary_via_symbols {
                wf.make_symbolic(p);
            } else {
                fixed_unary.insert(p.clone());
            }
        }
        let statistic = match stat {
            None => None,
            Some(p) => {
                let a = arity(p)?;
                if a == 1 && !opts.unary_via_symbols {
                    Some(Statistic::ByVector(p.to_string()))
                } else {
                    wf.make_symbolic(p);
                    let idx = sig.index_of(p).expect("checked");
                    Some(Statistic::ByMonomial(WeightSymbol::positive(idx).id()))
                }
            }
        };
        if let Some(BaseAxiom::Forest(r)) = &base {
            wf.make_symbolic(r);
        }

        let mut caps = DegreeCaps::none();
        let max_count = |p: &str| {
            let a = sig.get(p).map_or(1, |q| q.arity as u32);
            (n as i64).saturating_pow(a)
        };
        for (p, bound) in gamma.upper_bounds(n as i64, &max_count) {
            if wf.is_symbolic(&p) {
                let idx = sig.index_of(&p).expect("checked");
                caps.set(WeightSymbol::positive(idx).id(), bound.clamp(0, u32::MAX as i64) as u32);
            }
        }
        if let Some(BaseAxiom::Forest(r)) = &base {
            let idx = sig.index_of(r).expect("checked");
            caps.set(WeightSymbol::positive(idx).id(), 2 * n.saturating_sub(1) as u32);
        }

        let space = TypeSpace::new(&sig, &phi, &wf, opts.prune)?.with_caps(caps);
        let u = space.u();
        let top: Vec<Vec<usize>> = iterate_vectors(n, u);
        let unary_only = constrained.iter().all(|p| fixed_unary.contains(p));
        let counts_of = |k: &[usize]| -> BTreeMap<String, u64> {
            space
                .unary_counts(k)
                .into_iter()
                .filter(|(p, _)| fixed_unary.contains(p))
                .collect()
        };
        let admissible = |k: &[usize]| -> bool {
            if !unary_only || gamma.is_trivial() {
                return true;
            }
            let c = counts_of(k);
            gamma.holds(&|p| c.get(p).copied().unwrap_or(0) as i64, n as i64)
        };
        let top: Vec<Vec<usize>> = top.into_iter().filter(|k| admissible(k)).collect();

        let table: Option<MemoTable> = match &base {
            None => None,
            Some(a) => {
                let engine = SplitEngine::new(&space, a.edge(), n, opts.budget)?;
                let vectors = graded_vectors(n, u);
                Some(match a {
                    BaseAxiom::Dag(_) => engine.dag(&vectors)?,
                    BaseAxiom::Connected(_) => engine.connected(&vectors)?,
                    BaseAxiom::Forest(_) => {
                        let connected = engine.connected(&vectors)?;
                        engine.forest(&vectors, &connected)?
                    }
                })
            }
        };
        let r_full = if table.is_none() {
            Some(space.r_matrix(&Formula::True)?)
        } else {
            None
        };
        let facts = Factorials::new(n);
        let keep_symbol = match &statistic {
            Some(Statistic::ByMonomial(s)) => Some(*s),
            _ => None,
        };
        let values = |p: WeightPolynomial| {
            p.substitute(&|s| {
                if Some(s) == keep_symbol {
                    None
                } else {
                    original.value(&sig, s)
                }
            })
        };

        let parts = par_map(&top, |k| {
            opts.budget.check()?;
            let p = match (&table, &r_full) {
                (Some(t), _) => t
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::Internal(format!("missing memo entry {k:?}")))?,
                (None, Some(r)) => space.wfomc_k(r, k, &facts),
                _ => unreachable!(),
            };
            let p = if gamma.is_trivial() {
                p
            } else {
                let fixed = counts_of(k);
                filter_cardinality_with(&sig, &p, &gamma, n, &fixed)?
            };
            let p = values(p);
            let mut out: Vec<(u64, WeightPolynomial)> = Vec::new();
            match &statistic {
                None => out.push((0, p)),
                Some(Statistic::ByVector(name)) => {
                    let c = space.unary_counts(k).get(name).copied().unwrap_or(0);
                    out.push((c, p));
                }
                Some(Statistic::ByMonomial(s)) => {
                    for (e, q) in p.collect_by(*s) {
                        out.push((u64::from(e), q));
                    }
                }
            }
            Ok(out)
        })?;

        let mut buckets: BTreeMap<u64, WeightPolynomial> = BTreeMap::new();
        for (s, p) in parts.into_iter().flatten() {
            if p.is_zero() {
                continue;
            }
            buckets
                .entry(s)
                .or_insert_with(WeightPolynomial::zero)
                .add_assign_ref(&p);
        }
        buckets.retain(|_, p| !p.is_zero());
        if stat.is_none() && buckets.is_empty() {
            buckets.insert(0, WeightPolynomial::zero());
        }
        Ok(buckets)
    }
}

//! Count-preserving rewrites onto `∀xy` sentences plus one of the base
//! axioms (DAG, Connected, Forest) and cardinality constraints.

use std::fmt;

use crate::axiom::AxiomSpec;
use crate::constraint::{CardinalityConstraint, LinearExpr};
use crate::error::{Error, Result};
use crate::logic::{Clause, Formula, Predicate, Sentence, Signature, Var};
use crate::poly::{filter_cardinality, int, Rational, WeightFunction, WeightPair, WeightPolynomial};

/// The axioms the splitting engines handle directly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseAxiom {
    Dag(String),
    Connected(String),
    Forest(String),
}

impl BaseAxiom {
    pub fn edge(&self) -> &str {
        match self {
            BaseAxiom::Dag(r) | BaseAxiom::Connected(r) | BaseAxiom::Forest(r) => r,
        }
    }
}

impl fmt::Display for BaseAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseAxiom::Dag(r) => write!(f, "dag({r})"),
            BaseAxiom::Connected(r) => write!(f, "connected({r})"),
            BaseAxiom::Forest(r) => write!(f, "forest({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReductionResult {
    /// The input signature extended with every fresh predicate.
    pub signature: Signature,
    /// Only `∀xy` clauses once skolemized.
    pub sentence: Sentence,
    pub axiom: Option<BaseAxiom>,
    pub constraints: Vec<CardinalityConstraint>,
    pub weights: Vec<(String, WeightPair)>,
    pub fresh: Vec<Predicate>,
}

impl ReductionResult {
    fn new(sig: &Signature) -> Self {
        ReductionResult {
            signature: sig.clone(),
            ..Default::default()
        }
    }

    fn fresh(&mut self, stem: &str, arity: u8) -> String {
        let name = self.signature.add_fresh(stem, arity);
        self.fresh.push(Predicate::new(name.clone(), arity));
        name
    }

    fn set_axiom(&mut self, a: BaseAxiom) -> Result<()> {
        match &self.axiom {
            Some(b) if *b != a => Err(Error::Unsupported(format!("combining the axioms {b} and {a}"))),
            _ => {
                self.axiom = Some(a);
                Ok(())
            }
        }
    }

    /// Applies the weights to a copy of `wf`.
    pub fn weight_function(&self, wf: &WeightFunction) -> WeightFunction {
        let mut out = wf.clone();
        for (p, pair) in &self.weights {
            out.set_pair(p, pair.clone());
        }
        out
    }

    /// The combined cardinality constraint.
    pub fn constraint(&self) -> CardinalityConstraint {
        CardinalityConstraint::conjunction(self.constraints.iter().cloned())
    }

    /// The conjunction of all universal matrices.
    pub fn matrix(&self) -> Formula {
        self.sentence.universal_matrix()
    }

    fn merge(&mut self, other: ReductionResult) -> Result<()> {
        self.signature = other.signature;
        self.sentence = std::mem::take(&mut self.sentence).and(other.sentence);
        if let Some(a) = other.axiom {
            self.set_axiom(a)?;
        }
        self.constraints.extend(other.constraints);
        self.weights.extend(other.weights);
        self.fresh.extend(other.fresh);
        Ok(())
    }
}

fn atom(p: &str, args: &[Var]) -> Formula {
    Formula::atom(p, args)
}

fn ensure_predicate(sig: &mut Signature, name: &str, arity: u8) -> Result<()> {
    match sig.get(name) {
        Some(p) if p.arity == arity => Ok(()),
        Some(p) => Err(Error::ArityMismatch {
            name: name.to_string(),
            expected: arity,
            found: p.arity as usize,
        }),
        None => sig.add(Predicate::new(name, arity)),
    }
}

/// Replaces every `∀x∃y. ψ` by `∀xy. S(x) ∨ ¬ψ` with a fresh `S` weighted
/// `(1, -1)`.
pub fn skolemize(sig: &Signature, s: &Sentence) -> Result<ReductionResult> {
    s.check(sig)?;
    let mut out = ReductionResult::new(sig);
    let mut clauses = Vec::with_capacity(s.clauses.len());
    for c in &s.clauses {
        match c {
            Clause::ForallXY(m) => clauses.push(Clause::ForallXY(m.clone())),
            Clause::ForallXExistsY(psi) => {
                let sk = out.fresh("sk", 1);
                out.weights.push((sk.clone(), WeightPair::numeric(int(1), int(-1))));
                clauses.push(Clause::ForallXY(atom(&sk, &[Var::X]).or(psi.clone().not())));
            }
        }
    }
    out.sentence = Sentence::new(clauses);
    Ok(out)
}

fn require_binary(sig: &Signature, r: &str) -> Result<()> {
    let arity = sig.arity_of(r)?;
    if arity != 2 {
        return Err(Error::ArityMismatch {
            name: r.to_string(),
            expected: 2,
            found: arity as usize,
        });
    }
    Ok(())
}

fn edges(r: &str) -> LinearExpr {
    LinearExpr::count(r)
}

/// `Tree(R)` as `Connected(R) ∧ |R| = 2n - 2` (each undirected edge is two
/// ground atoms).
pub fn reduce_tree(sig: &Signature, r: &str) -> Result<ReductionResult> {
    require_binary(sig, r)?;
    let mut out = ReductionResult::new(sig);
    out.axiom = Some(BaseAxiom::Connected(r.to_string()));
    out.constraints.push(CardinalityConstraint::eq(
        edges(r),
        LinearExpr::domain().scaled(2).plus(&LinearExpr::constant(-2)),
    ));
    Ok(out)
}

/// `DAG(R)`, `Root(x) → ¬R(y,x)`, `¬Root(x) → ∃y. R(y,x)`, `|Root| = 1`
/// and `|R| = n - |Root|`.
pub fn reduce_directed_tree(sig: &Signature, r: &str, root: &str) -> Result<ReductionResult> {
    require_binary(sig, r)?;
    let mut sig = sig.clone();
    ensure_predicate(&mut sig, root, 1)?;
    let rooted = Sentence::new(vec![
        Clause::ForallXY(atom(root, &[Var::X]).implies(atom(r, &[Var::Y, Var::X]).not())),
        Clause::ForallXExistsY(atom(root, &[Var::X]).not().implies(atom(r, &[Var::Y, Var::X]))),
    ]);
    let mut out = skolemize(&sig, &rooted)?;
    out.axiom = Some(BaseAxiom::Dag(r.to_string()));
    out.constraints.push(CardinalityConstraint::eq(
        LinearExpr::count(root),
        LinearExpr::constant(1),
    ));
    out.constraints.push(CardinalityConstraint::eq(
        edges(r),
        LinearExpr::domain().minus(&LinearExpr::count(root)),
    ));
    Ok(out)
}

/// `DAG(R)` with a fresh `P`: `R(y,x) → P(x)`, `P(x) → ∃y. R(y,x)` and
/// `|R| = |P|`.
pub fn reduce_directed_forest(sig: &Signature, r: &str) -> Result<ReductionResult> {
    require_binary(sig, r)?;
    let mut out = ReductionResult::new(sig);
    let p = out.fresh("p", 1);
    let clauses = Sentence::new(vec![
        Clause::ForallXY(atom(r, &[Var::Y, Var::X]).implies(atom(&p, &[Var::X]))),
        Clause::ForallXExistsY(atom(&p, &[Var::X]).implies(atom(r, &[Var::Y, Var::X]))),
    ]);
    let sk = skolemize(&out.signature, &clauses)?;
    out.merge(sk)?;
    out.set_axiom(BaseAxiom::Dag(r.to_string()))?;
    out.constraints
        .push(CardinalityConstraint::eq(edges(r), LinearExpr::count(&p)));
    Ok(out)
}

/// `DAG(R)` with `Source(x) ↔ ¬∃y. R(y,x)` and `Sink(x) ↔ ¬∃y. R(x,y)`.
pub fn reduce_source_sink(
    sig: &Signature,
    r: &str,
    source: Option<&str>,
    sink: Option<&str>,
) -> Result<ReductionResult> {
    require_binary(sig, r)?;
    let mut sig = sig.clone();
    let mut clauses = Vec::new();
    if let Some(s) = source {
        ensure_predicate(&mut sig, s, 1)?;
        clauses.push(Clause::ForallXY(
            atom(r, &[Var::Y, Var::X]).implies(atom(s, &[Var::X]).not()),
        ));
        clauses.push(Clause::ForallXExistsY(
            atom(s, &[Var::X]).not().implies(atom(r, &[Var::Y, Var::X])),
        ));
    }
    if let Some(t) = sink {
        ensure_predicate(&mut sig, t, 1)?;
        clauses.push(Clause::ForallXY(
            atom(r, &[Var::X, Var::Y]).implies(atom(t, &[Var::X]).not()),
        ));
        clauses.push(Clause::ForallXExistsY(
            atom(t, &[Var::X]).not().implies(atom(r, &[Var::X, Var::Y])),
        ));
    }
    let mut out = skolemize(&sig, &Sentence::new(clauses))?;
    out.axiom = Some(BaseAxiom::Dag(r.to_string()));
    Ok(out)
}

/// The reduction of a single axiom.
pub fn reduce_axiom(sig: &Signature, a: &AxiomSpec) -> Result<ReductionResult> {
    let r = a.edge();
    require_binary(sig, r)?;
    match a {
        AxiomSpec::Dag { .. } => {
            let mut out = ReductionResult::new(sig);
            out.axiom = Some(BaseAxiom::Dag(r.to_string()));
            Ok(out)
        }
        AxiomSpec::Connected { .. } => {
            let mut out = ReductionResult::new(sig);
            out.axiom = Some(BaseAxiom::Connected(r.to_string()));
            Ok(out)
        }
        AxiomSpec::Forest { .. } => {
            let mut out = ReductionResult::new(sig);
            out.axiom = Some(BaseAxiom::Forest(r.to_string()));
            Ok(out)
        }
        AxiomSpec::Tree { .. } => reduce_tree(sig, r),
        AxiomSpec::DirectedTree { root, .. } => reduce_directed_tree(sig, r, root),
        AxiomSpec::DirectedForest { .. } => reduce_directed_forest(sig, r),
        AxiomSpec::SourceSinkDag { source, sink, .. } => reduce_source_sink(sig, r, source.as_deref(), sink.as_deref()),
    }
}

/// Skolemizes `s` and reduces every axiom, accumulating fresh predicates,
/// weights and constraints. At most one base axiom may result.
pub fn reduce(sig: &Signature, s: &Sentence, axioms: &[AxiomSpec]) -> Result<ReductionResult> {
    let mut out = skolemize(sig, s)?;
    for a in axioms {
        let r = reduce_axiom(&out.signature, a)?;
        out.merge(r)?;
    }
    Ok(out)
}

/// Filters `p` by `gamma` at domain size `n` and evaluates it under `wf`.
/// Every binary predicate in `gamma` must have been carried symbolically.
pub fn apply_cardinality(
    sig: &Signature,
    p: &WeightPolynomial,
    gamma: &CardinalityConstraint,
    n: usize,
    wf: &WeightFunction,
) -> Result<Rational> {
    for name in gamma.predicates() {
        if sig.arity_of(&name)? == 2 && !wf.is_symbolic(&name) {
            return Err(Error::Constraint(format!(
                "`{name}` is constrained but its weight was not kept symbolic"
            )));
        }
    }
    let kept = filter_cardinality(sig, p, gamma, n)?;
    wf.evaluate(sig, &kept)
}

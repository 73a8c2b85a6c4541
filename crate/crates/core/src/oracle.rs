//! Brute-force ground truth: enumerate every interpretation on a small
//! domain and sum the weights of the models.

use std::collections::HashMap;

use crate::axiom::AxiomSpec;
use crate::constraint::CardinalityConstraint;
use crate::error::{Error, Result};
use crate::fo2::par_map;
use crate::logic::{Clause, CompiledFormula, Formula, Sentence, Signature};
use crate::poly::{Rational, WeightFunction, WeightPolynomial};

/// Largest number of ground atoms the oracle will enumerate.
pub const ATOM_CAP: usize = 28;

/// A truth assignment to every ground atom over `0..n`, stored in canonical
/// order: by predicate, then by argument tuple lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    n: usize,
    arities: Vec<u8>,
    offsets: Vec<usize>,
    bits: Vec<bool>,
}

impl Interpretation {
    /// The all-false interpretation.
    pub fn empty(sig: &Signature, n: usize) -> Self {
        let arities: Vec<u8> = sig.predicates().iter().map(|p| p.arity).collect();
        let mut offsets = Vec::with_capacity(arities.len());
        let mut total = 0;
        for &a in &arities {
            offsets.push(total);
            total += n.pow(u32::from(a));
        }
        Interpretation {
            n,
            arities,
            offsets,
            bits: vec![false; total],
        }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn atom_count(&self) -> usize {
        self.bits.len()
    }

    /// Canonical position of `P(a)` or `P(a, b)`.
    pub fn position(&self, p: usize, a: usize, b: usize) -> usize {
        if self.arities[p] == 1 {
            self.offsets[p] + a
        } else {
            self.offsets[p] + a * self.n + b
        }
    }

    /// `P(a, b)`; unary predicates ignore `b`.
    pub fn holds(&self, p: usize, a: usize, b: usize) -> bool {
        self.bits[self.position(p, a, b)]
    }

    pub fn set(&mut self, p: usize, a: usize, b: usize, v: bool) {
        let i = self.position(p, a, b);
        self.bits[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of true ground atoms of predicate `p`.
    pub fn count(&self, p: usize) -> usize {
        let len = self.n.pow(u32::from(self.arities[p]));
        self.bits[self.offsets[p]..self.offsets[p] + len]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    /// The interpretation induced on `subset`, whose elements are relabeled
    /// `0..subset.len()` in the given order.
    pub fn project(&self, subset: &[usize]) -> Interpretation {
        let m = subset.len();
        let mut out = Interpretation {
            n: m,
            arities: self.arities.clone(),
            offsets: Vec::new(),
            bits: Vec::new(),
        };
        let mut total = 0;
        for &a in &self.arities {
            out.offsets.push(total);
            total += m.pow(u32::from(a));
        }
        out.bits = vec![false; total];
        for p in 0..self.arities.len() {
            for (i, &a) in subset.iter().enumerate() {
                if self.arities[p] == 1 {
                    out.set(p, i, i, self.holds(p, a, a));
                } else {
                    for (j, &b) in subset.iter().enumerate() {
                        out.set(p, i, j, self.holds(p, a, b));
                    }
                }
            }
        }
        out
    }

    /// Relabels element `a` as `perm[a]`.
    pub fn permute(&self, perm: &[usize]) -> Interpretation {
        let mut out = self.clone();
        for p in 0..self.arities.len() {
            for a in 0..self.n {
                if self.arities[p] == 1 {
                    out.set(p, perm[a], perm[a], self.holds(p, a, a));
                } else {
                    for b in 0..self.n {
                        out.set(p, perm[a], perm[b], self.holds(p, a, b));
                    }
                }
            }
        }
        out
    }

    fn adjacency(&self, r: usize) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.holds(r, a, b)).collect())
            .collect()
    }
}

fn index(sig: &Signature, name: &str) -> Result<usize> {
    sig.index_of(name)
        .ok_or_else(|| Error::UnknownPredicate(name.to_string()))
}

fn is_acyclic(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut indeg: Vec<usize> = (0..n).map(|b| (0..n).filter(|&a| adj[a][b]).count()).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for w in 0..n {
            if adj[v][w] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
    }
    seen == n
}

fn is_simple_graph(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    (0..n).all(|a| !adj[a][a] && (0..n).all(|b| adj[a][b] == adj[b][a]))
}

fn components(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if adj[v][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

fn undirected_edges(adj: &[Vec<bool>]) -> usize {
    adj.iter().flatten().filter(|&&b| b).count() / 2
}

/// Whether the projection of `omega` onto the axiom's predicates belongs to
/// the graph class. Undirected classes require a symmetric, irreflexive
/// relation; the connected and tree classes are empty on the empty domain.
pub fn check_axiom(omega: &Interpretation, sig: &Signature, a: &AxiomSpec) -> Result<bool> {
    let r = index(sig, a.edge())?;
    let adj = omega.adjacency(r);
    let n = omega.n;
    let indeg = |b: usize| (0..n).filter(|&x| adj[x][b]).count();
    let outdeg = |x: usize| (0..n).filter(|&b| adj[x][b]).count();
    let ok = match a {
        AxiomSpec::Dag { .. } => is_acyclic(&adj),
        AxiomSpec::Connected { .. } => is_simple_graph(&adj) && n > 0 && components(&adj) == 1,
        AxiomSpec::Forest { .. } => is_simple_graph(&adj) && undirected_edges(&adj) + components(&adj) == n,
        AxiomSpec::Tree { .. } => {
            is_simple_graph(&adj) && n > 0 && components(&adj) == 1 && undirected_edges(&adj) == n - 1
        }
        AxiomSpec::DirectedForest { .. } => is_acyclic(&adj) && (0..n).all(|b| indeg(b) <= 1),
        AxiomSpec::DirectedTree { root, .. } => {
            let root = index(sig, root)?;
            is_acyclic(&adj)
                && (0..n).all(|b| indeg(b) <= 1)
                && (0..n).filter(|&b| indeg(b) == 0).count() == 1
                && (0..n).all(|b| omega.holds(root, b, b) == (indeg(b) == 0))
        }
        AxiomSpec::SourceSinkDag { source, sink, .. } => {
            let mut ok = is_acyclic(&adj);
            if let Some(s) = source {
                let s = index(sig, s)?;
                ok &= (0..n).all(|b| omega.holds(s, b, b) == (indeg(b) == 0));
            }
            if let Some(t) = sink {
                let t = index(sig, t)?;
                ok &= (0..n).all(|b| omega.holds(t, b, b) == (outdeg(b) == 0));
            }
            ok
        }
    };
    Ok(ok)
}

/// Whether `omega` satisfies every clause of `s`.
pub fn satisfies(omega: &Interpretation, sig: &Signature, s: &Sentence) -> Result<bool> {
    let holds = |p: usize, a: usize, b: usize| omega.holds(p, a, b);
    for c in &s.clauses {
        let f = CompiledFormula::new(c.matrix(), sig)?;
        let ok = match c {
            Clause::ForallXY(_) => (0..omega.n).all(|a| (0..omega.n).all(|b| f.eval(a, b, &holds))),
            Clause::ForallXExistsY(_) => (0..omega.n).all(|a| (0..omega.n).any(|b| f.eval(a, b, &holds))),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Everything a model must satisfy.
struct Query<'a> {
    sig: &'a Signature,
    n: usize,
    universal: CompiledFormula,
    existential: Vec<CompiledFormula>,
    axioms: &'a [AxiomSpec],
    gamma: CardinalityConstraint,
    /// Canonical atom positions in enumeration order: element by element,
    /// so that every atom among `0..=e` precedes those mentioning `e + 1`.
    order: Vec<usize>,
    /// `layer_end[e]` is the first order position after element `e`'s atoms.
    layer_end: Vec<usize>,
}

impl<'a> Query<'a> {
    fn new(
        sig: &'a Signature,
        s: &Sentence,
        axioms: &'a [AxiomSpec],
        constraints: &[CardinalityConstraint],
        n: usize,
    ) -> Result<Self> {
        s.check(sig)?;
        let template = Interpretation::empty(sig, n);
        if template.atom_count() > ATOM_CAP {
            return Err(Error::OracleCap {
                atoms: template.atom_count(),
                cap: ATOM_CAP,
            });
        }
        for a in axioms {
            let mut bound = sig.clone();
            a.bind(&mut bound)?;
        }
        let gamma = CardinalityConstraint::conjunction(constraints.iter().cloned());
        gamma.check(sig)?;
        let existential = s
            .clauses
            .iter()
            .filter_map(|c| match c {
                Clause::ForallXExistsY(m) => Some(CompiledFormula::new(m, sig)),
                Clause::ForallXY(_) => None,
            })
            .collect::<Result<Vec<_>>>()?;
        let mut order = Vec::with_capacity(template.atom_count());
        let mut layer_end = Vec::with_capacity(n);
        for e in 0..n {
            for (p, pred) in sig.predicates().iter().enumerate() {
                if pred.arity == 1 {
                    order.push(template.position(p, e, e));
                } else {
                    order.push(template.position(p, e, e));
                    for a in 0..e {
                        order.push(template.position(p, a, e));
                        order.push(template.position(p, e, a));
                    }
                }
            }
            layer_end.push(order.len());
        }
        Ok(Query {
            sig,
            n,
            universal: CompiledFormula::new(&s.universal_matrix(), sig)?,
            existential,
            axioms,
            gamma,
            order,
            layer_end,
        })
    }

    /// The universal clauses on every pair that involves `e` and elements
    /// before it.
    fn layer_ok(&self, omega: &Interpretation, e: usize) -> bool {
        let holds = |p: usize, a: usize, b: usize| omega.holds(p, a, b);
        (0..=e).all(|a| self.universal.eval(a, e, &holds) && self.universal.eval(e, a, &holds))
    }

    fn leaf_ok(&self, omega: &Interpretation) -> Result<bool> {
        let holds = |p: usize, a: usize, b: usize| omega.holds(p, a, b);
        for f in &self.existential {
            if !(0..self.n).all(|a| (0..self.n).any(|b| f.eval(a, b, &holds))) {
                return Ok(false);
            }
        }
        if !self.gamma.is_trivial() {
            let count = |name: &str| self.sig.index_of(name).map_or(0, |p| omega.count(p) as i64);
            if !self.gamma.holds(&count, self.n as i64) {
                return Ok(false);
            }
        }
        for a in self.axioms {
            if !check_axiom(omega, self.sig, a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn dfs(&self, pos: usize, omega: &mut Interpretation, visit: &mut dyn FnMut(&Interpretation)) -> Result<()> {
        if let Some(e) = self.layer_end.iter().position(|&end| end == pos) {
            if !self.layer_ok(omega, e) {
                return Ok(());
            }
        }
        if pos == self.order.len() {
            if self.leaf_ok(omega)? {
                visit(omega);
            }
            return Ok(());
        }
        let i = self.order[pos];
        omega.bits[i] = false;
        self.dfs(pos + 1, omega, visit)?;
        omega.bits[i] = true;
        self.dfs(pos + 1, omega, visit)?;
        omega.bits[i] = false;
        Ok(())
    }

    /// Runs the enumeration split into independent prefixes.
    fn run<T: Send>(
        &self,
        init: impl Fn() -> T + Sync + Send,
        visit: impl Fn(&mut T, &Interpretation) + Sync + Send,
    ) -> Result<Vec<T>> {
        let split = self.order.len().min(8);
        let prefixes: Vec<u32> = (0..1u32 << split).collect();
        par_map(&prefixes, |&mask| {
            let mut omega = Interpretation::empty(self.sig, self.n);
            for k in 0..split {
                omega.bits[self.order[k]] = (mask >> k) & 1 == 1;
            }
            for (e, &end) in self.layer_end.iter().enumerate() {
                if end < split && !self.layer_ok(&omega, e) {
                    return Ok(init());
                }
            }
            let mut acc = init();
            self.dfs(split, &mut omega, &mut |w| visit(&mut acc, w))?;
            Ok(acc)
        })
    }
}

/// Calls `visit` on every model (in no particular order).
pub fn for_each_model(
    sig: &Signature,
    s: &Sentence,
    axioms: &[AxiomSpec],
    constraints: &[CardinalityConstraint],
    n: usize,
    mut visit: impl FnMut(&Interpretation),
) -> Result<()> {
    let q = Query::new(sig, s, axioms, constraints, n)?;
    let mut omega = Interpretation::empty(sig, n);
    q.dfs(0, &mut omega, &mut visit)
}

/// Number of models per vector of predicate counts.
fn count_profiles(
    sig: &Signature,
    s: &Sentence,
    axioms: &[AxiomSpec],
    constraints: &[CardinalityConstraint],
    n: usize,
) -> Result<HashMap<Vec<usize>, u64>> {
    let q = Query::new(sig, s, axioms, constraints, n)?;
    let parts = q.run(HashMap::<Vec<usize>, u64>::new, |acc, w| {
        let mu: Vec<usize> = (0..sig.len()).map(|p| w.count(p)).collect();
        *acc.entry(mu).or_insert(0) += 1;
    })?;
    let mut total = HashMap::new();
    for part in parts {
        for (k, v) in part {
            *total.entry(k).or_insert(0) += v;
        }
    }
    Ok(total)
}

/// The weighted model count as a polynomial; predicates with symbolic
/// weights keep their symbols.
pub fn enumerate_polynomial(
    sig: &Signature,
    s: &Sentence,
    axioms: &[AxiomSpec],
    constraints: &[CardinalityConstraint],
    n: usize,
    wf: &WeightFunction,
) -> Result<WeightPolynomial> {
    let profiles = count_profiles(sig, s, axioms, constraints, n)?;
    let factors = wf.literal_factors(sig);
    let ground: Vec<u64> = sig
        .predicates()
        .iter()
        .map(|p| (n as u64).pow(u32::from(p.arity)))
        .collect();
    let mut total = WeightPolynomial::zero();
    for (mu, c) in profiles {
        let mut term = WeightPolynomial::constant(Rational::from_integer(c.into()));
        for (p, &m) in mu.iter().enumerate() {
            let (w, wbar) = &factors[p];
            term = &term * &w.pow(m as u64);
            term = &term * &wbar.pow(ground[p] - m as u64);
        }
        total = total + term;
    }
    Ok(total)
}

/// The weighted model count with every weight numeric.
pub fn enumerate_weighted(
    sig: &Signature,
    s: &Sentence,
    axioms: &[AxiomSpec],
    constraints: &[CardinalityConstraint],
    n: usize,
    wf: &WeightFunction,
) -> Result<Rational> {
    let p = enumerate_polynomial(sig, s, axioms, constraints, n, wf)?;
    wf.evaluate(sig, &p)
}

/// Convenience for a single `∀xy` matrix without axioms.
pub fn count_universal(sig: &Signature, phi: &Formula, n: usize, wf: &WeightFunction) -> Result<Rational> {
    enumerate_weighted(sig, &Sentence::forall(phi.clone()), &[], &[], n, wf)
}

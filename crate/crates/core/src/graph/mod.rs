//! Counting by splitting: memoized WFOMC under DAG, connectivity and forest
//! axioms, plus the plain integer recursions they specialize to.

mod counts;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fo2::{par_map, CardinalityVector, RMatrix, TypeSpace};
use crate::logic::{CompiledFormula, Formula, Signature, TwoType, Var};
use crate::numeric::{Budget, Factorials};
use crate::poly::{DegreeCaps, Rational, WeightFunction, WeightPolynomial, WeightSymbol};

pub use counts::{count_connected, count_dags, count_forests};

/// `A[p]` for every cardinality vector computed so far.
#[derive(Debug, Clone, Default)]
pub struct MemoTable {
    entries: HashMap<CardinalityVector, WeightPolynomial>,
}

impl MemoTable {
    pub fn get(&self, p: &[usize]) -> Option<&WeightPolynomial> {
        self.entries.get(p)
    }

    /// Lookup that treats a missing entry as a broken dependency order.
    fn at(&self, p: &[usize]) -> Result<&WeightPolynomial> {
        self.entries
            .get(p)
            .ok_or_else(|| Error::Internal(format!("memo entry {p:?} requested before it was computed")))
    }

    pub fn insert(&mut self, p: CardinalityVector, v: WeightPolynomial) {
        self.entries.insert(p, v);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fills the table level by level in `|p|`; entries of one level only
    /// depend on strictly smaller levels, so each level runs in parallel.
    fn fill(
        &mut self,
        vectors: &[CardinalityVector],
        budget: &Budget,
        f: impl Fn(&MemoTable, &[usize]) -> Result<WeightPolynomial> + Sync + Send,
    ) -> Result<()> {
        let mut levels: Vec<Vec<CardinalityVector>> = Vec::new();
        for p in vectors {
            if self.entries.contains_key(p) {
                continue;
            }
            let s: usize = p.iter().sum();
            if levels.len() <= s {
                levels.resize(s + 1, Vec::new());
            }
            levels[s].push(p.clone());
        }
        for level in levels {
            budget.check()?;
            let table = &*self;
            let values = par_map(&level, |p| f(table, p))?;
            for (p, v) in level.into_iter().zip(values) {
                self.entries.insert(p, v);
            }
        }
        Ok(())
    }
}

/// Which sub-theory constrains a block when counting by splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockAxiom {
    /// `∀xy. ¬R(x,y)`
    NoEdges,
    Dag,
    Connected,
    Tree,
    Forest,
    /// No axiom beyond `Φ`.
    Free,
}

/// One row of the splitting table: the axioms for the `[m]` block and its
/// complement, and the condition on every cross pair `(x ∈ [m], y ∉ [m])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub prime: BlockAxiom,
    pub double: BlockAxiom,
    pub theta: Formula,
}

impl SplitSpec {
    pub fn dag(r: &str) -> Self {
        SplitSpec {
            prime: BlockAxiom::NoEdges,
            double: BlockAxiom::Dag,
            theta: Formula::atom(r, &[Var::Y, Var::X]).not(),
        }
    }

    pub fn connected(r: &str) -> Self {
        SplitSpec {
            prime: BlockAxiom::Connected,
            double: BlockAxiom::Free,
            theta: Formula::atom(r, &[Var::X, Var::Y]).not(),
        }
    }

    pub fn forest(r: &str) -> Self {
        SplitSpec {
            prime: BlockAxiom::Tree,
            double: BlockAxiom::Forest,
            theta: Formula::atom(r, &[Var::X, Var::Y]).not(),
        }
    }
}

impl fmt::Display for BlockAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockAxiom::NoEdges => "forall x y. ~R(x,y)",
            BlockAxiom::Dag => "DAG(R)",
            BlockAxiom::Connected => "Connected(R)",
            BlockAxiom::Tree => "Tree(R)",
            BlockAxiom::Forest => "Forest(R)",
            BlockAxiom::Free => "true",
        })
    }
}

/// `Σ_{k'+k''=k, |k'|=m} F'(k') · F''(k'') · Π_{i,j} r_ij^{k'_i k''_j}`.
pub fn split_sum(
    prime: &dyn Fn(&[usize]) -> Result<WeightPolynomial>,
    double: &dyn Fn(&[usize]) -> Result<WeightPolynomial>,
    r: &RMatrix,
    k: &[usize],
    m: usize,
    caps: &DegreeCaps,
) -> Result<WeightPolynomial> {
    let mut total = WeightPolynomial::zero();
    for s1 in bounded_compositions(k, m) {
        let s2: Vec<usize> = k.iter().zip(&s1).map(|(a, b)| a - b).collect();
        let a = prime(&s1)?;
        if a.is_zero() {
            continue;
        }
        let b = double(&s2)?;
        if b.is_zero() {
            continue;
        }
        let mut term = a.mul_truncated(&b, caps);
        'outer: for (i, &x) in s1.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in s2.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                term = term.mul_truncated(&r.pow(i, j, (x * y) as u64, caps), caps);
                if term.is_zero() {
                    break 'outer;
                }
            }
        }
        total = total + term;
    }
    Ok(total)
}

/// All `s ≤ k` componentwise with `|s| = m`, lexicographically.
pub fn bounded_compositions(k: &[usize], m: usize) -> Vec<CardinalityVector> {
    fn rec(k: &[usize], m: usize, suffix_cap: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = prefix.len();
        if i == k.len() {
            if m == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let rest = suffix_cap[i + 1];
        let lo = m.saturating_sub(rest);
        let hi = k[i].min(m);
        for v in lo..=hi {
            prefix.push(v);
            rec(k, m - v, suffix_cap, prefix, out);
            prefix.pop();
        }
    }
    let mut suffix_cap = vec![0; k.len() + 1];
    for i in (0..k.len()).rev() {
        suffix_cap[i] = suffix_cap[i + 1] + k[i];
    }
    let mut out = Vec::new();
    if m <= suffix_cap[0] {
        rec(k, m, &suffix_cap, &mut Vec::with_capacity(k.len()), &mut out);
    }
    out
}

/// Every vector of length `u` with `|p| ≤ n`, by level then lexicographically.
pub fn graded_vectors(n: usize, u: usize) -> Vec<CardinalityVector> {
    (0..=n).flat_map(|s| crate::fo2::iterate_vectors(s, u)).collect()
}

/// Memoized engines over one type space with a distinguished binary
/// predicate `R`.
pub struct SplitEngine<'a> {
    space: &'a TypeSpace,
    r: usize,
    r_name: String,
    facts: Factorials,
    budget: Budget,
}

impl<'a> SplitEngine<'a> {
    pub fn new(space: &'a TypeSpace, r: &str, max_n: usize, budget: Budget) -> Result<Self> {
        let sig = space.signature();
        let idx = sig.index_of(r).ok_or_else(|| Error::UnknownPredicate(r.to_string()))?;
        if sig.predicates()[idx].arity != 2 {
            return Err(Error::ArityMismatch {
                name: r.to_string(),
                expected: 2,
                found: 1,
            });
        }
        Ok(SplitEngine {
            space,
            r: idx,
            r_name: r.to_string(),
            facts: Factorials::new(max_n),
            budget,
        })
    }

    fn atom(&self, a: Var, b: Var) -> Formula {
        Formula::atom(self.r_name.clone(), &[a, b])
    }

    fn binom(&self, n: usize, k: usize) -> Rational {
        Rational::from_integer(self.facts.binomial(n, k))
    }

    /// `A[p] = wfomc(Φ ∧ DAG(R), p)` for every `p` in `vectors` (which must
    /// be closed under taking smaller vectors).
    pub fn dag(&self, vectors: &[CardinalityVector]) -> Result<MemoTable> {
        let caps = self.space.caps();
        let no_edges = self.atom(Var::X, Var::Y).not().and(self.atom(Var::Y, Var::X).not());
        let r_prime = self.space.r_matrix(&no_edges)?;
        let r_cross = self.space.r_matrix(&SplitSpec::dag(&self.r_name).theta)?;
        let mut table = MemoTable::default();
        table.insert(vec![0; self.space.u()], WeightPolynomial::one());
        table.fill(vectors, &self.budget, |table, p| {
            let size: usize = p.iter().sum();
            let prime = |s: &[usize]| Ok(self.space.wfomc_k(&r_prime, s, &self.facts));
            let double = |s: &[usize]| table.at(s).cloned();
            let mut acc = WeightPolynomial::zero();
            for l in 0..size {
                let psi = split_sum(&prime, &double, &r_cross, p, size - l, caps)?;
                let mut c = self.binom(size, l);
                if (size - l + 1) % 2 == 1 {
                    c = -c;
                }
                acc.add_scaled(&psi, &c);
            }
            Ok(acc)
        })?;
        Ok(table)
    }

    /// `A[p] = wfomc(Φ ∧ Connected(R), p)`; `A[0] = 0`.
    pub fn connected(&self, vectors: &[CardinalityVector]) -> Result<MemoTable> {
        let caps = self.space.caps();
        let r_full = self.space.r_matrix(&Formula::True)?;
        let r_cross = self.space.r_matrix(&SplitSpec::connected(&self.r_name).theta)?;
        let integral = self.space.integral_weights();
        let mut table = MemoTable::default();
        table.insert(vec![0; self.space.u()], WeightPolynomial::zero());
        table.fill(vectors, &self.budget, |table, p| {
            let size: usize = p.iter().sum();
            let all = self.space.wfomc_k(&r_full, p, &self.facts);
            let prime = |s: &[usize]| table.at(s).cloned();
            let double = |s: &[usize]| Ok(self.space.wfomc_k(&r_full, s, &self.facts));
            let mut rooted = WeightPolynomial::zero();
            for m in 1..size {
                let psi = split_sum(&prime, &double, &r_cross, p, m, caps)?;
                rooted.add_scaled(&psi, &(self.binom(size, m) * Rational::from_integer(m.into())));
            }
            let value = &all - &rooted.scale(&Rational::new(1.into(), (size as i64).into()));
            if integral && value.terms().any(|(_, c)| !c.is_integer()) {
                return Err(Error::Internal(format!("non-integral connected count at {p:?}")));
            }
            Ok(value)
        })?;
        Ok(table)
    }

    /// `A[p] = wfomc(Φ ∧ Forest(R), p)`. Requires `w(R)` to be symbolic so
    /// that trees can be selected by edge count; `connected` must cover
    /// the same vectors.
    pub fn forest(&self, vectors: &[CardinalityVector], connected: &MemoTable) -> Result<MemoTable> {
        if !self.space.is_symbolic(self.r) {
            return Err(Error::Internal(
                "forest recursion needs a symbolic weight for the edge predicate".into(),
            ));
        }
        let caps = self.space.caps();
        let w_r = WeightSymbol::positive(self.r).id();
        let r_cross = self.space.r_matrix(&SplitSpec::forest(&self.r_name).theta)?;
        let mut table = MemoTable::default();
        table.insert(vec![0; self.space.u()], WeightPolynomial::one());
        table.fill(vectors, &self.budget, |table, p| {
            let size: usize = p.iter().sum();
            let prime = |s: &[usize]| {
                let edges = 2 * (s.iter().sum::<usize>() as u32 - 1);
                Ok(connected.at(s)?.filter(|m| m.exponent(w_r) == edges))
            };
            let double = |s: &[usize]| table.at(s).cloned();
            let mut acc = WeightPolynomial::zero();
            for m in 1..=size {
                let psi = split_sum(&prime, &double, &r_cross, p, m, caps)?;
                acc.add_scaled(&psi, &self.binom(size - 1, m - 1));
            }
            Ok(acc)
        })?;
        Ok(table)
    }
}

/// `Φ ∧ ¬R(x,x)`, reporting whether `Φ` failed to entail the conjunct.
pub fn repair_dag(sig: &Signature, phi: &Formula, r: &str) -> Result<(Formula, bool)> {
    let irreflexive = Formula::atom(r, &[Var::X, Var::X]).not();
    let compiled = CompiledFormula::new(phi, sig)?;
    let r_idx = sig.index_of(r).ok_or_else(|| Error::UnknownPredicate(r.to_string()))?;
    let entails = (0..1usize << sig.len())
        .filter(|t| (t >> r_idx) & 1 == 1)
        .all(|t| !compiled.holds_on_element(t));
    if entails {
        Ok((phi.clone(), false))
    } else {
        log::warn!("conjoining ~{r}(x,x) to the formula as the DAG axiom requires");
        Ok((phi.clone().and(irreflexive), true))
    }
}

/// `Φ ∧ ¬R(x,x) ∧ (R(x,y) → R(y,x))`, reporting whether a conjunct was
/// missing.
pub fn repair_undirected(sig: &Signature, phi: &Formula, r: &str) -> Result<(Formula, bool)> {
    let (with_irreflexive, mut repaired) = repair_dag(sig, phi, r)?;
    let compiled = CompiledFormula::new(&with_irreflexive, sig)?;
    let r_idx = sig.index_of(r).expect("checked by repair_dag");
    let slot = sig.predicates()[..r_idx].iter().filter(|p| p.arity == 2).count();
    let u = 1usize << sig.len();
    let b = 1usize << (2 * sig.binary().count());
    let symmetric = (0..u).all(|i| {
        (0..u).all(|j| {
            (0..b).all(|l| {
                let asym = ((l >> (2 * slot)) & 1) != ((l >> (2 * slot + 1)) & 1);
                !asym || !compiled.holds_on_pair(TwoType { i, j, l })
            })
        })
    });
    if symmetric {
        return Ok((with_irreflexive, repaired));
    }
    log::warn!("conjoining {r}(x,y) -> {r}(y,x) to the formula as the axiom requires");
    repaired = true;
    let sym = Formula::atom(r, &[Var::X, Var::Y]).implies(Formula::atom(r, &[Var::Y, Var::X]));
    Ok((with_irreflexive.and(sym), repaired))
}

fn summed_over(space: &TypeSpace, table: &MemoTable, k: &[usize]) -> Result<WeightPolynomial> {
    debug_assert_eq!(k.len(), space.u());
    table.at(k).cloned()
}

fn full_vectors(k: &[usize]) -> Vec<CardinalityVector> {
    crate::fo2::iterate_bounded(k)
}

/// WFOMC of `∀xy. Φ ∧ DAG(R)` at a full-length 1-type cardinality vector.
pub fn wfomc_dag_k(
    sig: &Signature,
    phi: &Formula,
    r: &str,
    k: &[usize],
    wf: &WeightFunction,
) -> Result<WeightPolynomial> {
    let (phi, _) = repair_dag(sig, phi, r)?;
    let space = TypeSpace::new(sig, &phi, wf, false)?;
    let engine = SplitEngine::new(&space, r, k.iter().sum(), Budget::unlimited())?;
    let table = engine.dag(&full_vectors(k))?;
    summed_over(&space, &table, k)
}

/// WFOMC of `∀xy. Φ ∧ Connected(R)` at a full-length cardinality vector.
pub fn wfomc_connected_k(
    sig: &Signature,
    phi: &Formula,
    r: &str,
    k: &[usize],
    wf: &WeightFunction,
) -> Result<WeightPolynomial> {
    let (phi, _) = repair_undirected(sig, phi, r)?;
    let space = TypeSpace::new(sig, &phi, wf, false)?;
    let engine = SplitEngine::new(&space, r, k.iter().sum(), Budget::unlimited())?;
    let table = engine.connected(&full_vectors(k))?;
    summed_over(&space, &table, k)
}

/// WFOMC of `∀xy. Φ ∧ Forest(R)` at a full-length cardinality vector. A
/// numeric `w(R)` is made symbolic internally and substituted at the end.
pub fn wfomc_forest_k(
    sig: &Signature,
    phi: &Formula,
    r: &str,
    k: &[usize],
    wf: &WeightFunction,
) -> Result<WeightPolynomial> {
    let (phi, _) = repair_undirected(sig, phi, r)?;
    let was_symbolic = wf.is_symbolic(r);
    let mut inner = wf.clone();
    inner.make_symbolic(r);
    let space = TypeSpace::new(sig, &phi, &inner, false)?;
    let engine = SplitEngine::new(&space, r, k.iter().sum(), Budget::unlimited())?;
    let vectors = full_vectors(k);
    let connected = engine.connected(&vectors)?;
    let table = engine.forest(&vectors, &connected)?;
    let p = summed_over(&space, &table, k)?;
    if was_symbolic {
        return Ok(p);
    }
    let idx = sig.index_of(r).expect("checked");
    let w = WeightSymbol::positive(idx).id();
    let value = wf.get(r).w.value().cloned();
    Ok(p.substitute(&|s| if s == w { value.clone() } else { None }))
}

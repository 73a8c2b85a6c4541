//! Closed-form WFOMC of `∀xy. Φ(x,y)` per 1-type cardinality vector, the
//! r-matrix shared with the splitting kernels, and vector enumeration.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::One;

use crate::error::Result;
use crate::logic::{CompiledFormula, Formula, Signature, TwoType};
use crate::numeric::{Budget, Factorials};
use crate::poly::{DegreeCaps, Rational, WeightFunction, WeightPolynomial};

/// Counts of domain elements per 1-type, aligned with a [`TypeSpace`].
pub type CardinalityVector = Vec<usize>;

/// `r_ij = Σ_l n_ijl · v_l` for a pair formula and a cross-pair filter.
pub struct RMatrix {
    u: usize,
    entries: Vec<WeightPolynomial>,
    powers: Mutex<HashMap<(usize, u64), WeightPolynomial>>,
}

impl RMatrix {
    fn new(u: usize, entries: Vec<WeightPolynomial>) -> Self {
        RMatrix {
            u,
            entries,
            powers: Mutex::new(HashMap::new()),
        }
    }

    pub fn size(&self) -> usize {
        self.u
    }

    pub fn get(&self, i: usize, j: usize) -> &WeightPolynomial {
        &self.entries[i * self.u + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(WeightPolynomial::is_zero)
    }

    /// `r_ij^e`, memoized.
    pub fn pow(&self, i: usize, j: usize, e: u64, caps: &DegreeCaps) -> WeightPolynomial {
        if e == 0 {
            return WeightPolynomial::one();
        }
        let base = self.get(i, j);
        if let Some(c) = base.as_constant() {
            if c.is_one() {
                return WeightPolynomial::one();
            }
        }
        let key = (i * self.u + j, e);
        if let Some(p) = self.powers.lock().expect("poisoned").get(&key) {
            return p.clone();
        }
        let p = base.pow_truncated(e, caps);
        self.powers.lock().expect("poisoned").insert(key, p.clone());
        p
    }
}

impl Clone for RMatrix {
    fn clone(&self) -> Self {
        RMatrix::new(self.u, self.entries.clone())
    }
}

impl std::fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RMatrix")
            .field("u", &self.u)
            .field("entries", &self.entries)
            .finish()
    }
}

/// The 1-types a computation ranges over, with their weights and the
/// weights of every 2-table.
#[derive(Debug, Clone)]
pub struct TypeSpace {
    sig: Signature,
    phi: CompiledFormula,
    types: Vec<usize>,
    self_consistent: Vec<bool>,
    weights: Vec<WeightPolynomial>,
    table_weights: Vec<WeightPolynomial>,
    positive_symbolic: Vec<bool>,
    caps: DegreeCaps,
}

impl TypeSpace {
    /// With `prune`, 1-types violating `Φ(x,x)` are dropped; they can never
    /// be realized, so every count is unchanged.
    pub fn new(sig: &Signature, phi: &Formula, wf: &WeightFunction, prune: bool) -> Result<Self> {
        let compiled = CompiledFormula::new(phi, sig)?;
        let factors = wf.literal_factors(sig);
        let binary: Vec<usize> = sig
            .predicates()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.arity == 2)
            .map(|(i, _)| i)
            .collect();
        let u = 1usize << sig.len();
        let b = 1usize << (2 * binary.len());

        let mut types = Vec::new();
        let mut self_consistent = Vec::new();
        let mut weights = Vec::new();
        for t in 0..u {
            let ok = compiled.holds_on_element(t);
            if prune && !ok {
                continue;
            }
            types.push(t);
            self_consistent.push(ok);
            let w = factors
                .iter()
                .enumerate()
                .fold(WeightPolynomial::one(), |acc, (p, (w, wbar))| {
                    &acc * if (t >> p) & 1 == 1 { w } else { wbar }
                });
            weights.push(w);
        }
        let table_weights = (0..b)
            .map(|l| {
                binary.iter().enumerate().fold(WeightPolynomial::one(), |acc, (s, &p)| {
                    let (w, wbar) = &factors[p];
                    let xy = if (l >> (2 * s)) & 1 == 1 { w } else { wbar };
                    let yx = if (l >> (2 * s + 1)) & 1 == 1 { w } else { wbar };
                    &(&acc * xy) * yx
                })
            })
            .collect();
        Ok(TypeSpace {
            sig: sig.clone(),
            phi: compiled,
            types,
            self_consistent,
            weights,
            table_weights,
            positive_symbolic: sig.predicates().iter().map(|p| wf.is_symbolic(&p.name)).collect(),
            caps: DegreeCaps::none(),
        })
    }

    pub fn with_caps(mut self, caps: DegreeCaps) -> Self {
        self.caps = caps;
        self
    }

    pub fn caps(&self) -> &DegreeCaps {
        &self.caps
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Number of 1-types in the space.
    pub fn u(&self) -> usize {
        self.types.len()
    }

    /// The 1-type index (in full enumeration order) of position `i`.
    pub fn type_index(&self, i: usize) -> usize {
        self.types[i]
    }

    /// Whether `w(P)` of predicate index `p` is carried as a symbol.
    pub fn is_symbolic(&self, p: usize) -> bool {
        self.positive_symbolic[p]
    }

    pub fn weight(&self, i: usize) -> &WeightPolynomial {
        &self.weights[i]
    }

    /// Whether every 1-type and 2-table weight has integer coefficients.
    pub fn integral_weights(&self) -> bool {
        self.weights
            .iter()
            .chain(&self.table_weights)
            .all(|w| w.terms().all(|(_, c)| c.is_integer()))
    }

    /// `r_ij` over 2-tables with `Φ({x,y})` and `Θ(x,y)`.
    pub fn r_matrix(&self, theta: &Formula) -> Result<RMatrix> {
        let theta = match theta {
            Formula::True => None,
            t => Some(CompiledFormula::new(t, &self.sig)?),
        };
        let u = self.u();
        let mut entries = Vec::with_capacity(u * u);
        for a in 0..u {
            for c in 0..u {
                let mut acc = WeightPolynomial::zero();
                for (l, v) in self.table_weights.iter().enumerate() {
                    let t = TwoType {
                        i: self.types[a],
                        j: self.types[c],
                        l,
                    };
                    if self.phi.holds_on_pair(t) && theta.as_ref().is_none_or(|th| th.eval_two_type(t, 0, 1)) {
                        acc.add_assign_ref(v);
                    }
                }
                entries.push(acc);
            }
        }
        Ok(RMatrix::new(u, entries))
    }

    /// `multinomial(|k|; k) · Π w_i^{k_i} · Π_{i≤j} r_ij^{k(i,j)}`, zero if a
    /// realized 1-type violates `Φ(x,x)`.
    pub fn wfomc_k(&self, r: &RMatrix, k: &[usize], facts: &Factorials) -> WeightPolynomial {
        debug_assert_eq!(k.len(), self.u());
        if k.iter().zip(&self.self_consistent).any(|(&ki, &ok)| ki > 0 && !ok) {
            return WeightPolynomial::zero();
        }
        let mut acc = WeightPolynomial::constant(Rational::from_integer(facts.multinomial(k)));
        for (i, &ki) in k.iter().enumerate() {
            if ki > 0 {
                acc = acc.mul_truncated(&self.weights[i].pow_truncated(ki as u64, &self.caps), &self.caps);
            }
        }
        for i in 0..k.len() {
            if k[i] == 0 {
                continue;
            }
            for j in i..k.len() {
                let e = if i == j {
                    (k[i] * (k[i] - 1) / 2) as u64
                } else {
                    (k[i] * k[j]) as u64
                };
                if e == 0 {
                    continue;
                }
                acc = acc.mul_truncated(&r.pow(i, j, e, &self.caps), &self.caps);
                if acc.is_zero() {
                    return acc;
                }
            }
        }
        acc
    }

    /// `Σ_{|k| = n} wfomc_k`, restricted to vectors passing `keep`.
    pub fn wfomc_n(&self, n: usize, keep: &VectorFilter, budget: &Budget) -> Result<WeightPolynomial> {
        let r = self.r_matrix(&Formula::True)?;
        let facts = Factorials::new(n);
        let ks: Vec<CardinalityVector> = iterate_vectors(n, self.u()).into_iter().filter(|k| keep(k)).collect();
        par_sum(&ks, |k| {
            budget.check()?;
            Ok(self.wfomc_k(&r, k, &facts))
        })
    }

    /// Counts of true ground atoms of each unary predicate implied by `k`.
    pub fn unary_counts(&self, k: &[usize]) -> BTreeMap<String, u64> {
        self.sig
            .predicates()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.arity == 1)
            .map(|(p, pred)| {
                let c = k
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (self.types[*i] >> p) & 1 == 1)
                    .map(|(_, &ki)| ki as u64)
                    .sum();
                (pred.name.clone(), c)
            })
            .collect()
    }

    /// Re-indexes a vector over this space into the full 1-type order.
    pub fn expand(&self, k: &[usize]) -> Vec<usize> {
        let mut full = vec![0; 1 << self.sig.len()];
        for (i, &ki) in k.iter().enumerate() {
            full[self.types[i]] = ki;
        }
        full
    }
}

/// Sums `f` over `items`, in parallel when the feature is enabled.
pub(crate) fn par_sum<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> Result<WeightPolynomial> + Sync + Send,
) -> Result<WeightPolynomial> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if items.len() > 1 {
            return items
                .par_iter()
                .map(&f)
                .try_reduce(WeightPolynomial::zero, |a, b| Ok(a + b));
        }
    }
    items
        .iter()
        .try_fold(WeightPolynomial::zero(), |acc, x| Ok(acc + f(x)?))
}

/// Maps `f` over `items`, in parallel when the feature is enabled, keeping
/// the input order.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if items.len() > 1 {
            return items.par_iter().map(&f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// All compositions of `n` into `u` non-negative parts, lexicographically.
pub fn iterate_vectors(n: usize, u: usize) -> Vec<CardinalityVector> {
    fn rec(n: usize, u: usize, prefix: &mut Vec<usize>, out: &mut Vec<CardinalityVector>) {
        if u == 0 {
            if n == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if u == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=n {
            prefix.push(first);
            rec(n - first, u - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, u, &mut Vec::with_capacity(u), &mut out);
    out
}

/// All `p` with `0 ≤ p ≤ k` componentwise, lexicographically.
pub fn iterate_bounded(k: &[usize]) -> Vec<CardinalityVector> {
    let mut out = vec![Vec::with_capacity(k.len())];
    for &ki in k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=ki).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// The r-matrix over all `u` 1-types.
pub fn r_matrix(sig: &Signature, phi: &Formula, theta: &Formula, wf: &WeightFunction) -> Result<RMatrix> {
    TypeSpace::new(sig, phi, wf, false)?.r_matrix(theta)
}

/// Closed form at a full-length cardinality vector.
pub fn wfomc_k(sig: &Signature, phi: &Formula, k: &[usize], wf: &WeightFunction) -> Result<WeightPolynomial> {
    let space = TypeSpace::new(sig, phi, wf, false)?;
    let r = space.r_matrix(&Formula::True)?;
    let facts = Factorials::new(k.iter().sum());
    Ok(space.wfomc_k(&r, k, &facts))
}

/// A predicate on cardinality vectors.
pub type VectorFilter = dyn Fn(&[usize]) -> bool + Sync;

/// WFOMC of `∀xy. Φ` on a domain of size `n`, optionally restricted to
/// cardinality vectors (full 1-type order) passing `unary_filter`.
pub fn wfomc_n(
    sig: &Signature,
    phi: &Formula,
    n: usize,
    wf: &WeightFunction,
    unary_filter: Option<&VectorFilter>,
) -> Result<WeightPolynomial> {
    let space = TypeSpace::new(sig, phi, wf, false)?;
    match unary_filter {
        Some(f) => space.wfomc_n(n, f, &Budget::unlimited()),
        None => space.wfomc_n(n, &|_| true, &Budget::unlimited()),
    }
}

#![allow(dead_code)]

pub mod criteria;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use wfomc_core::axiom::AxiomSpec;
use wfomc_core::constraint::CardinalityConstraint;
use wfomc_core::logic::{parse, Formula, Signature, Var};
use wfomc_core::oracle::{enumerate_polynomial, enumerate_weighted, for_each_model};
use wfomc_core::poly::{parse_rational, Rational, WeightFunction, WeightPair, WeightPolynomial};
use wfomc_core::problem::{Problem, SolveOptions};
use wfomc_core::Result;

/// A counting job shared by the engine and the brute-force oracle.
#[derive(Debug, Clone)]
pub struct Job {
    pub sig: &'static str,
    pub sentence: &'static str,
    pub axioms: Vec<String>,
    pub constraints: Vec<String>,
    /// `(predicate, w, w̄)` as rational literals.
    pub weights: Vec<(&'static str, &'static str, &'static str)>,
    /// Predicates whose weights stay symbolic.
    pub symbolic: Vec<&'static str>,
}

impl Job {
    pub fn new(sig: &'static str, sentence: &'static str) -> Self {
        Job {
            sig,
            sentence,
            axioms: Vec::new(),
            constraints: Vec::new(),
            weights: Vec::new(),
            symbolic: Vec::new(),
        }
    }

    pub fn axiom(mut self, a: &str) -> Self {
        self.axioms.push(a.to_string());
        self
    }

    pub fn card(mut self, c: &str) -> Self {
        self.constraints.push(c.to_string());
        self
    }

    pub fn weight(mut self, p: &'static str, w: &'static str, wbar: &'static str) -> Self {
        self.weights.push((p, w, wbar));
        self
    }

    pub fn symbolic(mut self, p: &'static str) -> Self {
        self.symbolic.push(p);
        self
    }

    pub fn signature(&self) -> Signature {
        Signature::parse(self.sig).unwrap()
    }

    pub fn weight_function(&self) -> WeightFunction {
        let mut wf = WeightFunction::unit();
        for (p, w, wbar) in &self.weights {
            wf.set(p, parse_rational(w).unwrap(), parse_rational(wbar).unwrap());
        }
        for p in &self.symbolic {
            wf.set_pair(p, WeightPair::symbolic());
        }
        wf
    }

    pub fn axiom_specs(&self) -> Vec<AxiomSpec> {
        self.axioms.iter().map(|a| AxiomSpec::parse(a).unwrap()).collect()
    }

    pub fn constraint_specs(&self) -> Vec<CardinalityConstraint> {
        self.constraints
            .iter()
            .map(|c| CardinalityConstraint::parse(c).unwrap())
            .collect()
    }

    pub fn problem(&self) -> Problem {
        let mut p = Problem::parse(self.sig, self.sentence)
            .unwrap()
            .with_weights(self.weight_function());
        for a in self.axiom_specs() {
            p = p.with_axiom(a);
        }
        for c in self.constraint_specs() {
            p = p.with_constraint(c);
        }
        p
    }

    pub fn engine(&self, n: usize) -> Result<Rational> {
        self.problem().count(n)
    }

    pub fn engine_polynomial(&self, n: usize) -> Result<WeightPolynomial> {
        self.problem().polynomial_with(n, &SolveOptions::default())
    }

    pub fn oracle(&self, n: usize) -> Result<Rational> {
        let sig = self.signature();
        let s = parse(self.sentence, &sig)?;
        enumerate_weighted(
            &sig,
            &s,
            &self.axiom_specs(),
            &self.constraint_specs(),
            n,
            &self.weight_function(),
        )
    }

    pub fn oracle_polynomial(&self, n: usize) -> Result<WeightPolynomial> {
        let sig = self.signature();
        let s = parse(self.sentence, &sig)?;
        enumerate_polynomial(
            &sig,
            &s,
            &self.axiom_specs(),
            &self.constraint_specs(),
            n,
            &self.weight_function(),
        )
    }

    /// Number of models per value of `|P|`.
    pub fn oracle_histogram(&self, n: usize, predicate: &str) -> BTreeMap<usize, u64> {
        let sig = self.signature();
        let s = parse(self.sentence, &sig).unwrap();
        let p = sig.index_of(predicate).unwrap();
        let mut out = BTreeMap::new();
        for_each_model(&sig, &s, &self.axiom_specs(), &self.constraint_specs(), n, |w| {
            *out.entry(w.count(p)).or_insert(0) += 1;
        })
        .unwrap();
        out
    }
}

pub const UNDIRECTED: &str = "forall x y. ~R(x,x) & (R(x,y) -> R(y,x))";

pub const THREE_COLORED: &str = "forall x. (A(x) | B(x) | C(x)) & ~(A(x) & B(x)) & ~(A(x) & C(x)) & ~(B(x) & C(x)) \
     & forall x y. (A(x) & R(x,y) -> ~A(y)) & (B(x) & R(x,y) -> ~B(y)) & (C(x) & R(x,y) -> ~C(y))";

pub fn dag() -> Job {
    Job::new("R/2", "forall x y. ~R(x,x)").axiom("dag(R)")
}

pub fn connected() -> Job {
    Job::new("R/2", UNDIRECTED).axiom("connected(R)")
}

pub fn forest() -> Job {
    Job::new("R/2", UNDIRECTED).axiom("forest(R)")
}

pub fn tree() -> Job {
    Job::new("R/2", UNDIRECTED).axiom("tree(R)")
}

pub fn dag_one_source() -> Job {
    Job::new("R/2, Src/1", "forall x y. ~R(x,x)")
        .axiom("dag(R, Src)")
        .card("|Src| = 1")
}

pub fn forest_without_isolated() -> Job {
    Job::new("R/2", "forall x. exists y. R(x,y)").axiom("forest(R)")
}

pub fn three_colored_connected() -> Job {
    Job::new("R/2, A/1, B/1, C/1", THREE_COLORED).axiom("connected(R)")
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Data rows of a committed CSV fixture, header skipped.
pub fn read_fixture(name: &str) -> Vec<Vec<String>> {
    let text = fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"));
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|c| c.trim().to_string()).collect())
        .collect()
}

/// `(n, count)` pairs of a two-column fixture.
pub fn read_sequence(name: &str) -> Vec<(usize, String)> {
    read_fixture(name)
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), r[1].clone()))
        .collect()
}

/// `(n, d, count)` triples of a three-column fixture.
pub fn read_table(name: &str) -> Vec<(usize, usize, String)> {
    read_fixture(name)
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].clone()))
        .collect()
}

/// A committed fixture and the brute-force computation that produces it.
pub struct Fixture {
    pub file: &'static str,
    pub header: &'static str,
    pub generate: fn() -> Vec<String>,
}

fn sequence(job: Job, ns: std::ops::RangeInclusive<usize>) -> Vec<String> {
    ns.map(|n| format!("{n},{}", job.oracle(n).unwrap())).collect()
}

fn edge_table(job: Job, ns: std::ops::RangeInclusive<usize>, per_edge: usize) -> Vec<String> {
    let mut rows = Vec::new();
    for n in ns {
        let h = job.oracle_histogram(n, "R");
        for d in 0..=n * n.saturating_sub(1) / 2 {
            let c = h.get(&(d * per_edge)).copied().unwrap_or(0);
            rows.push(format!("{n},{d},{c}"));
        }
    }
    rows
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            file: "dags.csv",
            header: "n,count",
            generate: || sequence(dag(), 1..=4),
        },
        Fixture {
            file: "connected_graphs.csv",
            header: "n,count",
            generate: || sequence(connected(), 1..=5),
        },
        Fixture {
            file: "forests.csv",
            header: "n,count",
            generate: || sequence(forest(), 1..=5),
        },
        Fixture {
            file: "trees.csv",
            header: "n,count",
            generate: || sequence(tree(), 1..=5),
        },
        Fixture {
            file: "a081064_dags_by_edges.csv",
            header: "n,edges,count",
            generate: || edge_table(dag(), 1..=4, 1),
        },
        Fixture {
            file: "a062734_connected_by_edges.csv",
            header: "n,edges,count",
            generate: || edge_table(connected(), 1..=5, 2),
        },
        Fixture {
            file: "a003025_dags_one_source.csv",
            header: "n,count",
            generate: || sequence(dag_one_source(), 1..=4),
        },
        Fixture {
            file: "a105784_forests_without_isolated.csv",
            header: "n,count",
            generate: || sequence(forest_without_isolated(), 1..=5),
        },
        Fixture {
            file: "a002028_three_colored_connected.csv",
            header: "n,count",
            generate: || sequence(three_colored_connected(), 1..=4),
        },
    ]
}

pub fn render(f: &Fixture) -> String {
    let mut out = String::from(f.header);
    out.push('\n');
    for r in (f.generate)() {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

/// A named job checked against the oracle for every `n` up to `max_n`.
pub struct Case {
    pub name: &'static str,
    pub job: Job,
    pub max_n: usize,
}

fn case(name: &'static str, max_n: usize, job: Job) -> Case {
    Case { name, job, max_n }
}

/// Combinations of sentences, axioms, constraints and weights spanning
/// every axiom, numeric and symbolic weights, one or two binary predicates.
pub fn oracle_cases() -> Vec<Case> {
    vec![
        case(
            "dag closed under successors",
            4,
            Job::new("R/2, A/1", "forall x y. A(x) & R(x,y) -> A(y)")
                .axiom("dag(R)")
                .weight("A", "2", "1/3")
                .weight("R", "3/2", "1"),
        ),
        case(
            "dag with n-1 edges and a negative weight",
            4,
            Job::new("R/2, A/1", "forall x y. R(x,y) -> A(x) | A(y)")
                .axiom("dag(R)")
                .card("|R| = n - 1")
                .weight("A", "-1/2", "1"),
        ),
        case(
            "dag symbolic",
            4,
            Job::new("R/2, A/1", "forall x y. A(x) -> ~R(x,y)")
                .axiom("dag(R)")
                .symbolic("R")
                .symbolic("A"),
        ),
        case(
            "connected two-colored",
            4,
            Job::new("R/2, A/1", "forall x y. A(x) & R(x,y) -> ~A(y)")
                .axiom("connected(R)")
                .weight("R", "2", "1")
                .weight("A", "1/2", "3"),
        ),
        case(
            "connected dense with one marked node",
            4,
            Job::new("R/2, A/1", UNDIRECTED)
                .axiom("connected(R)")
                .card("|R| >= 2*n")
                .card("|A| <= 1")
                .weight("R", "1/3", "2"),
        ),
        case(
            "connected symbolic",
            4,
            Job::new("R/2, A/1, B/1", "forall x y. A(x) -> B(x)")
                .axiom("connected(R)")
                .symbolic("A")
                .symbolic("R"),
        ),
        case(
            "forest with independent marks",
            4,
            Job::new("R/2, A/1", "forall x y. A(x) & A(y) -> ~R(x,y)")
                .axiom("forest(R)")
                .weight("R", "2", "1")
                .weight("A", "3", "1"),
        ),
        case(
            "forest with two marked nodes",
            4,
            Job::new("R/2, A/1, B/1", "forall x y. R(x,y) & A(x) -> B(y)")
                .axiom("forest(R)")
                .card("|A| = 2")
                .weight("B", "-1", "2"),
        ),
        case(
            "forest symbolic with existential",
            4,
            Job::new("R/2, A/1", "forall x. exists y. R(x,y) | A(x)")
                .axiom("forest(R)")
                .symbolic("A"),
        ),
        case(
            "tree two-colored",
            4,
            Job::new("R/2, A/1", "forall x y. A(x) & R(x,y) -> ~A(y)")
                .axiom("tree(R)")
                .weight("A", "2", "1/2")
                .weight("R", "3", "1"),
        ),
        case(
            "directed tree with marked root",
            4,
            Job::new("R/2, Root/1, A/1", "forall x y. Root(x) -> A(x)")
                .axiom("directed_tree(R, Root)")
                .weight("A", "2", "1")
                .weight("R", "1/2", "1"),
        ),
        case(
            "directed forest closed under successors",
            4,
            Job::new("R/2, A/1", "forall x y. A(x) & R(x,y) -> A(y)")
                .axiom("directed_forest(R)")
                .weight("A", "2", "1")
                .weight("R", "3", "2"),
        ),
        case(
            "dag with sources and sinks",
            4,
            Job::new("R/2, S/1, T/1", "forall x y. ~(S(x) & T(x))")
                .axiom("dag(R, S, T)")
                .weight("S", "2", "1")
                .weight("T", "1/2", "1")
                .weight("R", "2", "1"),
        ),
        case(
            "dag with one source",
            4,
            Job::new("R/2, S/1", "forall x y. true")
                .axiom("dag(R, S)")
                .card("|S| = 1")
                .weight("R", "2", "1"),
        ),
        case(
            "dag with sinks symbolic",
            4,
            Job::new("R/2, T/1, A/1", "forall x y. T(x) -> A(x)")
                .axiom("dag(R, _, T)")
                .symbolic("A"),
        ),
        case(
            "plain sentence with existential",
            4,
            Job::new(
                "R/2, A/1",
                "forall x y. A(x) -> R(x,y) & forall x. exists y. R(x,y) & ~A(y)",
            )
            .weight("R", "-1", "2")
            .weight("A", "3", "1"),
        ),
        case(
            "dag covering a second relation",
            3,
            Job::new("R/2, E/2", "forall x y. E(x,y) -> R(x,y) | R(y,x)")
                .axiom("dag(R)")
                .weight("E", "2", "1")
                .weight("R", "1/2", "1"),
        ),
        case(
            "connected containing a second relation",
            3,
            Job::new("R/2, F/2, A/1", "forall x y. F(x,y) -> R(x,y) & A(x)")
                .axiom("connected(R)")
                .card("|F| <= 2")
                .weight("F", "3", "1")
                .weight("A", "1/2", "1"),
        ),
        case(
            "forest avoiding a second relation symbolic",
            3,
            Job::new("R/2, E/2", "forall x y. E(x,y) -> ~R(x,y)")
                .axiom("forest(R)")
                .symbolic("E"),
        ),
        case(
            "directed forest inside a second relation",
            3,
            Job::new("R/2, E/2", "forall x y. R(x,y) -> E(x,y)")
                .axiom("directed_forest(R)")
                .weight("E", "2", "1"),
        ),
    ]
}

/// Engine and oracle agree exactly on `c` for every `n` up to `max_n`.
pub fn check_case(c: &Case) -> std::result::Result<(), String> {
    for n in 0..=c.max_n {
        if c.job.symbolic.is_empty() {
            let e = c.job.engine(n).map_err(|e| format!("{} n={n}: engine {e}", c.name))?;
            let o = c.job.oracle(n).map_err(|e| format!("{} n={n}: oracle {e}", c.name))?;
            if e != o {
                return Err(format!("{} n={n}: engine {e}, oracle {o}", c.name));
            }
        } else {
            let e = c
                .job
                .engine_polynomial(n)
                .map_err(|e| format!("{} n={n}: engine {e}", c.name))?;
            let o = c
                .job
                .oracle_polynomial(n)
                .map_err(|e| format!("{} n={n}: oracle {e}", c.name))?;
            if e != o {
                let sig = c.job.signature();
                return Err(format!(
                    "{} n={n}: engine {}, oracle {}",
                    c.name,
                    e.display(&sig),
                    o.display(&sig)
                ));
            }
        }
    }
    Ok(())
}

/// Every atom over `x, y` of the predicates in `sig`.
pub fn atoms(sig: &Signature) -> Vec<Formula> {
    let mut out = Vec::new();
    for p in sig.predicates() {
        if p.arity == 1 {
            out.push(Formula::atom(&p.name, &[Var::X]));
            out.push(Formula::atom(&p.name, &[Var::Y]));
        } else {
            for a in [Var::X, Var::Y] {
                for b in [Var::X, Var::Y] {
                    out.push(Formula::atom(&p.name, &[a, b]));
                }
            }
        }
    }
    out
}

/// Random quantifier-free formulas over `atoms`.
pub fn arb_formula(atoms: Vec<Formula>) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        8 => proptest::sample::select(atoms),
        1 => Just(Formula::True),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.iff(b)),
        ]
    })
}

/// Random rational weights, zero and negative values included.
pub fn arb_weight() -> impl Strategy<Value = Rational> {
    proptest::sample::select(vec!["1", "2", "1/2", "-1", "3/2", "0", "-2/3"]).prop_map(|w| parse_rational(w).unwrap())
}

/// A weight function with a random pair for every predicate of `sig`.
pub fn arb_weights(sig: &Signature) -> impl Strategy<Value = WeightFunction> {
    let names: Vec<String> = sig.predicates().iter().map(|p| p.name.clone()).collect();
    proptest::collection::vec((arb_weight(), arb_weight()), names.len()).prop_map(move |ws| {
        let mut wf = WeightFunction::unit();
        for (p, (w, wbar)) in names.iter().zip(ws) {
            wf.set(p, w, wbar);
        }
        wf
    })
}

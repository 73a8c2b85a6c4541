mod common;

use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;
use wfomc_core::fo2::{wfomc_n, TypeSpace};
use wfomc_core::logic::{is_consistent, CompiledFormula, Formula, Sentence, Signature, TwoType};
use wfomc_core::oracle::{count_universal, for_each_model, satisfies, Interpretation};
use wfomc_core::poly::{int, WeightFunction, WeightPair};
use wfomc_core::problem::{Problem, SolveOptions};

fn sig(s: &str) -> Signature {
    Signature::parse(s).unwrap()
}

fn two_type(omega: &Interpretation, sig: &Signature) -> TwoType {
    let one = |a: usize| {
        (0..sig.len())
            .filter(|&p| omega.holds(p, a, a))
            .fold(0, |t, p| t | 1 << p)
    };
    let mut l = 0;
    for (s, (p, _)) in sig
        .predicates()
        .iter()
        .enumerate()
        .filter(|(_, q)| q.arity == 2)
        .enumerate()
    {
        if omega.holds(p, 0, 1) {
            l |= 1 << (2 * s);
        }
        if omega.holds(p, 1, 0) {
            l |= 1 << (2 * s + 1);
        }
    }
    TwoType {
        i: one(0),
        j: one(1),
        l,
    }
}

fn models(sig: &Signature, phi: &Formula, n: usize) -> Vec<Interpretation> {
    let mut out = Vec::new();
    for_each_model(sig, &Sentence::forall(phi.clone()), &[], &[], n, |w| {
        out.push(w.clone())
    })
    .unwrap();
    out
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..1usize << n).map(move |m| (0..n).filter(|i| (m >> i) & 1 == 1).collect())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_matches_oracle_one_binary(
        phi in common::arb_formula(common::atoms(&sig("R/2, A/1"))),
        wf in common::arb_weights(&sig("R/2, A/1")),
        n in 0usize..=4,
    ) {
        let s = sig("R/2, A/1");
        let engine = wfomc_n(&s, &phi, n, &wf, None).unwrap().as_constant().unwrap();
        prop_assert_eq!(engine, count_universal(&s, &phi, n, &wf).unwrap());
    }

    #[test]
    fn closed_form_matches_oracle_two_binaries(
        phi in common::arb_formula(common::atoms(&sig("R/2, E/2"))),
        wf in common::arb_weights(&sig("R/2, E/2")),
        n in 0usize..=3,
    ) {
        let s = sig("R/2, E/2");
        let engine = wfomc_n(&s, &phi, n, &wf, None).unwrap().as_constant().unwrap();
        prop_assert_eq!(engine, count_universal(&s, &phi, n, &wf).unwrap());
    }

    #[test]
    fn symbolic_polynomial_evaluates_to_numeric_count(
        phi in common::arb_formula(common::atoms(&sig("R/2, A/1, B/1"))),
        wf in common::arb_weights(&sig("R/2, A/1, B/1")),
        n in 0usize..=4,
    ) {
        let s = sig("R/2, A/1, B/1");
        let mut free = WeightFunction::unit();
        for p in s.predicates() {
            free.set_pair(&p.name, WeightPair::symbolic());
        }
        let numeric = Problem::new(s.clone())
            .with_sentence(Sentence::forall(phi.clone()))
            .with_weights(wf.clone());
        let symbolic = numeric.clone().with_weights(free);
        let p = symbolic.polynomial_with(n, &SolveOptions::default()).unwrap();
        prop_assert_eq!(wf.evaluate(&s, &p).unwrap(), numeric.count(n).unwrap());
    }

    #[test]
    fn consistency_agrees_with_two_element_models(
        phi in common::arb_formula(common::atoms(&sig("R/2, A/1, E/2"))),
    ) {
        let s = sig("R/2, A/1, E/2");
        let compiled = CompiledFormula::new(&phi, &s).unwrap();
        let sentence = Sentence::forall(phi.clone());
        let omega = Interpretation::empty(&s, 2);
        let atoms = omega.atom_count();
        for bits in 0u32..1 << atoms {
            let mut w = Interpretation::empty(&s, 2);
            for (pos, p, a, b) in positions(&s, 2) {
                debug_assert!(pos < atoms);
                w.set(p, a, b, (bits >> pos) & 1 == 1);
            }
            prop_assert_eq!(
                satisfies(&w, &s, &sentence).unwrap(),
                is_consistent(two_type(&w, &s), &compiled)
            );
        }
    }

    #[test]
    fn projections_of_models_are_models(
        phi in common::arb_formula(common::atoms(&sig("R/2, A/1"))),
    ) {
        let s = sig("R/2, A/1");
        let sentence = Sentence::forall(phi.clone());
        for w in models(&s, &phi, 3) {
            for sub in subsets(3) {
                prop_assert!(satisfies(&w.project(&sub), &s, &sentence).unwrap());
            }
        }
    }
}

/// `(canonical position, predicate, a, b)` of every ground atom.
fn positions(sig: &Signature, n: usize) -> Vec<(usize, usize, usize, usize)> {
    let w = Interpretation::empty(sig, n);
    let mut out = Vec::new();
    for (p, q) in sig.predicates().iter().enumerate() {
        for a in 0..n {
            if q.arity == 1 {
                out.push((w.position(p, a, a), p, a, a));
            } else {
                for b in 0..n {
                    out.push((w.position(p, a, b), p, a, b));
                }
            }
        }
    }
    out
}

#[test]
fn projections_at_four_elements() {
    let s = sig("R/2, A/1");
    for text in [
        "A(x) & R(x,y) -> A(y)",
        "~R(x,x) & (R(x,y) -> R(y,x))",
        "R(x,y) | R(y,x) | A(x)",
        "(A(x) <-> ~A(y)) -> ~R(x,y)",
    ] {
        let phi = wfomc_core::logic::parse_formula(text, &s).unwrap();
        let sentence = Sentence::forall(phi.clone());
        let ms = models(&s, &phi, 4);
        assert!(!ms.is_empty());
        for w in &ms {
            for sub in subsets(4) {
                assert!(satisfies(&w.project(&sub), &s, &sentence).unwrap(), "{text}");
            }
        }
    }
}

#[test]
fn model_sets_are_permutation_invariant() {
    for c in common::oracle_cases() {
        let job = &c.job;
        let s = job.signature();
        let sentence = wfomc_core::logic::parse(job.sentence, &s).unwrap();
        let mut set = HashSet::new();
        for_each_model(&s, &sentence, &job.axiom_specs(), &job.constraint_specs(), 3, |w| {
            set.insert(w.clone());
        })
        .unwrap();
        for perm in permutations(3) {
            let image: HashSet<Interpretation> = set.iter().map(|w| w.permute(&perm)).collect();
            assert_eq!(image, set, "{} under {perm:?}", c.name);
        }
        for w in &set {
            for perm in permutations(3) {
                let v = w.permute(&perm);
                for p in 0..s.len() {
                    assert_eq!(v.count(p), w.count(p));
                }
            }
        }
    }
}

/// Extensions of a pair of models on `{0, 1}` and `{2, 3}` over the cross
/// atoms number `Π r(t(a), t(b))`.
#[test]
fn cross_extensions_follow_the_r_matrix() {
    let s = sig("R/2, A/1");
    for text in [
        "true",
        "A(x) & R(x,y) -> A(y)",
        "~R(x,y) | ~R(y,x)",
        "A(x) -> R(x,y) | A(y)",
    ] {
        let phi = wfomc_core::logic::parse_formula(text, &s).unwrap();
        let space = TypeSpace::new(&s, &phi, &WeightFunction::unit(), false).unwrap();
        let r = space.r_matrix(&Formula::True).unwrap();
        let left = [0, 1];
        let right = [2, 3];
        let mut extensions: BTreeMap<(Vec<bool>, Vec<bool>), u64> = BTreeMap::new();
        for w in models(&s, &phi, 4) {
            let key = (w.project(&left).bits().to_vec(), w.project(&right).bits().to_vec());
            *extensions.entry(key).or_insert(0) += 1;
        }
        let parts = models(&s, &phi, 2);
        let type_of =
            |w: &Interpretation, a: usize| (0..s.len()).filter(|&p| w.holds(p, a, a)).fold(0, |t, p| t | 1 << p);
        for a in &parts {
            for b in &parts {
                let mut expected = int(1);
                for x in 0..2 {
                    for y in 0..2 {
                        let rij = r.get(type_of(a, x), type_of(b, y)).as_constant().unwrap();
                        expected *= rij;
                    }
                }
                let found = extensions
                    .get(&(a.bits().to_vec(), b.bits().to_vec()))
                    .copied()
                    .unwrap_or(0);
                assert_eq!(expected, int(found), "{text}");
                if text == "true" {
                    assert_eq!(found, 1 << 8);
                }
            }
        }
    }
}

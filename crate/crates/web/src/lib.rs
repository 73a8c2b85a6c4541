//! Browser bindings: every export takes plain values and returns a JSON
//! string, either a result object or `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use wfomc_core::axiom::AxiomSpec;
use wfomc_core::constraint::CardinalityConstraint;
use wfomc_core::mln::{presets, Distribution};
use wfomc_core::numeric::to_decimal;
use wfomc_core::poly::parse_rational;
use wfomc_core::problem::Problem;

/// Largest domain size the page accepts; larger inputs would stall the tab.
pub const MAX_N: usize = 40;
const PLACES: usize = 6;

type Result<T> = std::result::Result<T, String>;

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        Err(format!("domain size {n} is above the limit of {MAX_N}"))
    } else {
        Ok(())
    }
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty())
}

/// Counts for every domain size in `lo..=hi`. Axioms and cardinality
/// constraints are given one per line.
pub fn sequence(sig: &str, formula: &str, axioms: &str, cards: &str, lo: usize, hi: usize) -> Result<Value> {
    check_n(hi)?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    let mut p = Problem::parse(sig, formula).map_err(|e| e.to_string())?;
    for a in lines(axioms) {
        p = p.with_axiom(AxiomSpec::parse(a).map_err(|e| e.to_string())?);
    }
    for c in lines(cards) {
        p = p.with_constraint(CardinalityConstraint::parse(c).map_err(|e| e.to_string())?);
    }
    p.validate().map_err(|e| e.to_string())?;
    let rows = (lo..=hi)
        .map(|n| {
            p.count(n)
                .map(|c| json!({"n": n, "count": c.to_string()}))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "rows": rows }))
}

fn distribution_json(d: &Distribution) -> Value {
    let rows: Vec<Value> = d
        .rows(PLACES)
        .into_iter()
        .map(|(v, p, dec)| json!({"value": v, "probability": p.to_string(), "decimal": dec}))
        .collect();
    json!({
        "rows": rows,
        "expectation": to_decimal(&d.expectation(), PLACES),
    })
}

/// Distribution of the number of edges under one of the edge presets with
/// soft weight `weight` on `R(x,y)`. Undirected variants count each edge once.
pub fn edges(variant: &str, n: usize, weight: &str) -> Result<Value> {
    check_n(n)?;
    let w = parse_rational(weight).map_err(|e| e.to_string())?;
    let m = presets::edges(variant, w).map_err(|e| e.to_string())?;
    let directed = matches!(variant, "directed" | "dag" | "dag-approx");
    let d = m
        .statistic_distribution("R", n)
        .and_then(|d| if directed { Ok(d) } else { d.divided(2) })
        .map_err(|e| e.to_string())?;
    Ok(distribution_json(&d))
}

/// Distribution of the number of smokers under one of the smokers presets.
pub fn smokers(variant: &str, n: usize, w_smokes: &str, w_friends: &str, w_rule: &str) -> Result<Value> {
    check_n(n)?;
    let parse = |s: &str| parse_rational(s).map_err(|e| e.to_string());
    let m =
        presets::smokers(variant, parse(w_smokes)?, parse(w_friends)?, parse(w_rule)?).map_err(|e| e.to_string())?;
    let d = m.statistic_distribution("S", n).map_err(|e| e.to_string())?;
    Ok(distribution_json(&d))
}

fn render(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn count_sequence(sig: &str, formula: &str, axioms: &str, cards: &str, lo: usize, hi: usize) -> String {
    render(sequence(sig, formula, axioms, cards, lo, hi))
}

#[wasm_bindgen]
pub fn edge_distribution(variant: &str, n: usize, weight: &str) -> String {
    render(edges(variant, n, weight))
}

#[wasm_bindgen]
pub fn smokers_distribution(variant: &str, n: usize, w_smokes: &str, w_friends: &str, w_rule: &str) -> String {
    render(smokers(variant, n, w_smokes, w_friends, w_rule))
}

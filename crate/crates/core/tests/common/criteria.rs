//! The acceptance checks. Each returns a one-line summary on success.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use wfomc_core::axiom::AxiomSpec;
use wfomc_core::graph::{count_connected, count_dags, count_forests};
use wfomc_core::mln::presets;
use wfomc_core::numeric::{to_decimal, Budget};
use wfomc_core::poly::{int, Rational};
use wfomc_core::problem::SolveOptions;

use super::{read_sequence, read_table, Job};

pub type Outcome = std::result::Result<String, String>;

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub limit: Duration,
    pub check: fn() -> Outcome,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const SCALING_BUDGET: Duration = secs(100);
/// Largest allowed `t(n + 5) / t(n)`; doubling on every step would be 32.
pub const MAX_GROWTH_RATIO: f64 = 16.0;
/// Times below this floor are rounded up before taking ratios.
pub const TIMING_FLOOR: Duration = Duration::from_millis(20);

pub fn all() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            title: "oracle equivalence suite",
            limit: secs(300),
            check: oracle_equivalence,
        },
        Criterion {
            id: 2,
            title: "DAG counts",
            limit: secs(10),
            check: dag_counts,
        },
        Criterion {
            id: 3,
            title: "connected graph counts",
            limit: secs(30),
            check: connected_counts,
        },
        Criterion {
            id: 4,
            title: "trees through the reduction",
            limit: secs(60),
            check: tree_counts,
        },
        Criterion {
            id: 5,
            title: "forests and forests without isolated vertices",
            limit: secs(60),
            check: forest_counts,
        },
        Criterion {
            id: 6,
            title: "edge-parameterized DAGs and connected graphs",
            limit: secs(120),
            check: edge_tables,
        },
        Criterion {
            id: 7,
            title: "DAGs with one source",
            limit: secs(120),
            check: one_source,
        },
        Criterion {
            id: 8,
            title: "3-colored connected graphs",
            limit: secs(120),
            check: three_colored,
        },
        Criterion {
            id: 9,
            title: "MLN properties",
            limit: secs(300),
            check: mln_properties,
        },
        Criterion {
            id: 10,
            title: "scalability",
            limit: secs(220),
            check: scalability,
        },
    ]
}

fn expect_eq(what: &str, found: &Rational, expected: &Rational) -> Result<(), String> {
    if found == expected {
        Ok(())
    } else {
        Err(format!("{what}: got {found}, expected {expected}"))
    }
}

fn big(v: &BigInt) -> Rational {
    int(v.clone())
}

fn fixture_value(s: &str) -> Rational {
    wfomc_core::poly::parse_rational(s).unwrap()
}

fn engine(job: &Job, n: usize) -> Result<Rational, String> {
    job.engine(n).map_err(|e| format!("n={n}: {e}"))
}

fn oracle_equivalence() -> Outcome {
    let cases = super::oracle_cases();
    if cases.len() < 12 {
        return Err(format!("only {} cases", cases.len()));
    }
    let mut covered = std::collections::BTreeSet::new();
    let (mut numeric, mut symbolic) = (0, 0);
    for c in &cases {
        super::check_case(c)?;
        for a in c.job.axiom_specs() {
            covered.insert(axiom_kind(&a));
        }
        if c.job.symbolic.is_empty() {
            numeric += 1;
        } else {
            symbolic += 1;
        }
    }
    let kinds = [
        "dag",
        "connected",
        "forest",
        "tree",
        "directed tree",
        "directed forest",
        "source/sink dag",
    ];
    if let Some(k) = kinds.iter().find(|k| !covered.contains(*k)) {
        return Err(format!("no case covers {k}"));
    }
    if numeric == 0 || symbolic == 0 {
        return Err("both weight modes must be covered".into());
    }
    Ok(format!(
        "{} cases ({numeric} numeric, {symbolic} symbolic) exact for every n up to 4 (3 with two binary predicates)",
        cases.len()
    ))
}

fn axiom_kind(a: &AxiomSpec) -> &'static str {
    match a {
        AxiomSpec::Dag { .. } => "dag",
        AxiomSpec::Connected { .. } => "connected",
        AxiomSpec::Forest { .. } => "forest",
        AxiomSpec::Tree { .. } => "tree",
        AxiomSpec::DirectedTree { .. } => "directed tree",
        AxiomSpec::DirectedForest { .. } => "directed forest",
        AxiomSpec::SourceSinkDag { .. } => "source/sink dag",
    }
}

fn dag_counts() -> Outcome {
    let expected = [1u64, 3, 25, 543, 29281];
    let recursion = count_dags(5);
    let fixture = read_sequence("dags.csv");
    let job = super::dag();
    for n in 1..=5 {
        let e = engine(&job, n)?;
        expect_eq(&format!("n={n} vs listed value"), &e, &int(expected[n - 1]))?;
        expect_eq(&format!("n={n} vs recursion"), &e, &big(&recursion[n]))?;
    }
    for (n, v) in fixture {
        expect_eq(&format!("n={n} vs brute force"), &engine(&job, n)?, &fixture_value(&v))?;
    }
    Ok("1, 3, 25, 543, 29281 for n = 1..5; recursion and brute force agree".into())
}

fn connected_counts() -> Outcome {
    let expected = [1u64, 1, 4, 38, 728, 26704];
    let recursion = count_connected(6);
    let job = super::connected();
    for n in 1..=6 {
        let e = engine(&job, n)?;
        expect_eq(&format!("n={n} vs listed value"), &e, &int(expected[n - 1]))?;
        expect_eq(&format!("n={n} vs recursion"), &e, &big(&recursion[n]))?;
    }
    for (n, v) in read_sequence("connected_graphs.csv") {
        expect_eq(&format!("n={n} vs brute force"), &engine(&job, n)?, &fixture_value(&v))?;
    }
    Ok("1, 1, 4, 38, 728, 26704 for n = 1..6; recursion and brute force (n <= 5) agree".into())
}

fn tree_counts() -> Outcome {
    let job = super::tree();
    for n in 2..=12 {
        let expected = int(BigInt::from(n).pow(n as u32 - 2));
        expect_eq(&format!("n={n}"), &engine(&job, n)?, &expected)?;
    }
    Ok("n^(n-2) for n = 2..12".into())
}

fn forest_counts() -> Outcome {
    let recursion = count_forests(10);
    let job = super::forest();
    for (n, expected) in recursion.iter().enumerate().skip(1) {
        expect_eq(&format!("forests n={n}"), &engine(&job, n)?, &big(expected))?;
    }
    for (n, v) in read_sequence("forests.csv") {
        expect_eq(
            &format!("forests n={n} vs brute force"),
            &engine(&job, n)?,
            &fixture_value(&v),
        )?;
    }
    let ex = super::forest_without_isolated();
    let fixture = read_sequence("a105784_forests_without_isolated.csv");
    if fixture.len() < 5 {
        return Err("fewer than 5 brute-force terms".into());
    }
    let mut terms = Vec::new();
    for (n, v) in fixture.iter().take(5) {
        let e = engine(&ex, *n)?;
        expect_eq(&format!("no isolated vertices n={n}"), &e, &fixture_value(v))?;
        terms.push(e.to_string());
    }
    Ok(format!(
        "recursion values for n = 1..10 ({} at n = 10); without isolated vertices: {}",
        recursion[10],
        terms.join(", ")
    ))
}

fn edge_tables() -> Outcome {
    let dag = super::dag();
    let rows = read_table("a081064_dags_by_edges.csv");
    for (n, d, v) in &rows {
        let job = dag.clone().card(&format!("|R| = {d}"));
        expect_eq(&format!("DAG n={n} |R|={d}"), &engine(&job, *n)?, &fixture_value(v))?;
    }
    let connected = super::connected();
    let rows2 = read_table("a062734_connected_by_edges.csv");
    for (n, d, v) in &rows2 {
        let job = connected.clone().card(&format!("|R| = {}", 2 * d));
        expect_eq(
            &format!("connected n={n} |R|={}", 2 * d),
            &engine(&job, *n)?,
            &fixture_value(v),
        )?;
    }
    Ok(format!(
        "{} DAG rows (n <= 4) and {} connected rows (n <= 5) match brute force",
        rows.len(),
        rows2.len()
    ))
}

fn one_source() -> Outcome {
    let job = super::dag_one_source();
    let fixture = read_sequence("a003025_dags_one_source.csv");
    let expected = [1u64, 2, 15, 316];
    let mut terms = Vec::new();
    for (n, v) in &fixture {
        let e = engine(&job, *n)?;
        expect_eq(&format!("n={n} vs brute force"), &e, &fixture_value(v))?;
        expect_eq(&format!("n={n} vs listed value"), &e, &int(expected[n - 1]))?;
        terms.push(e.to_string());
    }
    Ok(terms.join(", "))
}

fn three_colored() -> Outcome {
    let job = super::three_colored_connected();
    let mut terms = Vec::new();
    for (n, v) in read_sequence("a002028_three_colored_connected.csv") {
        let e = engine(&job, n)?;
        expect_eq(&format!("n={n} vs brute force"), &e, &fixture_value(&v))?;
        terms.push(e.to_string());
    }
    Ok(format!("{} for n = 1..4", terms.join(", ")))
}

fn mln_properties() -> Outcome {
    let n = 10;
    let one = int(1);
    for v in ["free", "connected", "card"] {
        let m = presets::smokers(v, one.clone(), presets::exp_minus_one(), presets::exp_three())
            .map_err(|e| e.to_string())?;
        let d = m.statistic_distribution("S", n).map_err(|e| e.to_string())?;
        if d.total() != one {
            return Err(format!("smokers {v}: masses sum to {}", d.total()));
        }
        if !d.is_symmetric(n as u64) {
            return Err(format!("smokers {v}: |S| distribution is not symmetric"));
        }
    }
    let r = presets::exp_minus_one();
    let mut e = std::collections::BTreeMap::new();
    for v in ["directed", "dag", "undirected", "connected", "forest"] {
        let d = presets::edges(v, r.clone())
            .and_then(|m| m.statistic_distribution("R", n))
            .map_err(|e| e.to_string())?;
        if d.total() != one {
            return Err(format!("edges {v}: masses sum to {}", d.total()));
        }
        e.insert(v, d.expectation());
    }
    let strict = |a: &str, b: &str| -> Result<(), String> {
        if e[a] < e[b] {
            Ok(())
        } else {
            Err(format!(
                "expected E[{a}] < E[{b}], got {} and {}",
                to_decimal(&e[a], 4),
                to_decimal(&e[b], 4)
            ))
        }
    };
    strict("dag", "directed")?;
    strict("forest", "undirected")?;
    strict("undirected", "connected")?;
    Ok(format!(
        "symmetric |S| at n = 10 for free, connected, card; E[|R|]: dag {} < directed {}, forest {} < undirected {} < connected {}",
        to_decimal(&e["dag"], 4),
        to_decimal(&e["directed"], 4),
        to_decimal(&e["forest"], 4),
        to_decimal(&e["undirected"], 4),
        to_decimal(&e["connected"], 4),
    ))
}

fn timed(job: &Job, n: usize) -> Result<Duration, String> {
    let opts = SolveOptions {
        budget: Budget::within(SCALING_BUDGET),
        ..SolveOptions::default()
    };
    let start = Instant::now();
    job.problem().count_with(n, &opts).map_err(|e| format!("n={n}: {e}"))?;
    Ok(start.elapsed())
}

fn growth(job: &Job, n: usize, what: &str) -> Result<(Duration, f64), String> {
    let a = timed(job, n - 5)?.max(TIMING_FLOOR);
    let b = timed(job, n)?;
    if b > SCALING_BUDGET {
        return Err(format!("{what} n={n} took {b:?}"));
    }
    let ratio = b.max(TIMING_FLOOR).as_secs_f64() / a.as_secs_f64();
    if ratio > MAX_GROWTH_RATIO {
        return Err(format!("{what}: t({n}) / t({}) = {ratio:.1}", n - 5));
    }
    Ok((b, ratio))
}

fn scalability() -> Outcome {
    let (t_tree, r_tree) = growth(&super::tree(), 30, "tree")?;
    let dag = super::Job::new("R/2", "forall x y. ~R(x,x)")
        .axiom("dag(R)")
        .card("|R| = 2*n");
    let (t_dag, r_dag) = growth(&dag, 15, "DAG with |R| = 2n")?;
    Ok(format!(
        "tree n=30 in {:.2}s (x{r_tree:.1} over n=25); DAG |R|=2n n=15 in {:.2}s (x{r_dag:.1} over n=10)",
        t_tree.as_secs_f64(),
        t_dag.as_secs_f64()
    ))
}

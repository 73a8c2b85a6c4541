//! Markov Logic Networks compiled to weighted model counting: partition
//! functions, query probabilities and distributions of predicate counts.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::axiom::AxiomSpec;
use crate::constraint::CardinalityConstraint;
use crate::error::{Error, Result};
use crate::logic::{parse, parse_formula, Clause, Formula, Sentence, Signature, Var};
use crate::numeric::to_decimal;
use crate::poly::{parse_rational, Rational, WeightFunction};
use crate::problem::{Problem, SolveOptions};

/// A weighted formula: every true grounding multiplies a world's weight by
/// `weight` (the user's rational stand-in for `exp(w)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SoftFormula {
    pub weight: Rational,
    pub formula: Formula,
}

/// A hard constraint of an MLN or a query.
#[derive(Debug, Clone, PartialEq)]
pub enum Hard {
    Sentence(Sentence),
    Axiom(AxiomSpec),
    Constraint(CardinalityConstraint),
}

impl Hard {
    /// An axiom such as `dag(R)`, a sentence starting with `forall`, a
    /// cardinality constraint, or else a quantifier-free formula read as
    /// universally closed.
    pub fn parse(text: &str, sig: &Signature) -> Result<Self> {
        let t = text.trim();
        if let Ok(a) = AxiomSpec::parse(t) {
            return Ok(Hard::Axiom(a));
        }
        if t.starts_with("forall") {
            return Ok(Hard::Sentence(parse(t, sig)?));
        }
        if t.contains('|') {
            if let Ok(c) = CardinalityConstraint::parse(t) {
                c.check(sig)?;
                return Ok(Hard::Constraint(c));
            }
        }
        Ok(Hard::Sentence(Sentence::forall(parse_formula(t, sig)?)))
    }
}

impl fmt::Display for Hard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hard::Sentence(s) => write!(f, "{s}"),
            Hard::Axiom(a) => write!(f, "{a}"),
            Hard::Constraint(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlnModel {
    pub signature: Signature,
    pub soft: Vec<SoftFormula>,
    pub hard: Vec<Hard>,
}

/// Probability of each value of a statistic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub probabilities: BTreeMap<u64, Rational>,
}

impl Distribution {
    pub fn total(&self) -> Rational {
        self.probabilities.values().cloned().sum()
    }

    pub fn expectation(&self) -> Rational {
        self.probabilities
            .iter()
            .map(|(&s, p)| p * Rational::from_integer(s.into()))
            .sum()
    }

    pub fn get(&self, s: u64) -> Rational {
        self.probabilities.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    /// `P(s) = P(max - s)` for every `s`.
    pub fn is_symmetric(&self, max: u64) -> bool {
        (0..=max).all(|s| self.get(s) == self.get(max - s))
    }

    /// The distribution of `s / d` (e.g. undirected edges from the atom
    /// count); every value must be divisible by `d`.
    pub fn divided(&self, d: u64) -> Result<Distribution> {
        let mut out = BTreeMap::new();
        for (&s, p) in &self.probabilities {
            if s % d != 0 {
                return Err(Error::Internal(format!("value {s} not divisible by {d}")));
            }
            out.insert(s / d, p.clone());
        }
        Ok(Distribution { probabilities: out })
    }

    /// `(value, exact probability, decimal)` rows.
    pub fn rows(&self, places: usize) -> Vec<(u64, Rational, String)> {
        self.probabilities
            .iter()
            .map(|(&s, p)| (s, p.clone(), to_decimal(p, places)))
            .collect()
    }
}

impl MlnModel {
    pub fn new(signature: Signature) -> Self {
        MlnModel {
            signature,
            soft: Vec::new(),
            hard: Vec::new(),
        }
    }

    pub fn soft(mut self, weight: Rational, formula: &str) -> Result<Self> {
        let f = parse_formula(formula, &self.signature)?;
        self.soft.push(SoftFormula { weight, formula: f });
        Ok(self)
    }

    pub fn hard(mut self, text: &str) -> Result<Self> {
        let h = Hard::parse(text, &self.signature)?;
        self.hard.push(h);
        Ok(self)
    }

    pub fn with_hard(mut self, h: Hard) -> Self {
        self.hard.push(h);
        self
    }

    /// Parses the line format:
    ///
    /// ```text
    /// sig: S/1, F/2
    /// 3679/10000 : F(x,y)
    /// hard: forall x y. ~F(x,x)
    /// hard: connected(F)
    /// hard: |F| >= 2*n - 2
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut sig = None;
        let mut body = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::syntax(i + 1, 1, "expected `sig:`, `hard:` or `weight : formula`"))?;
            let head = head.trim();
            match head {
                "sig" | "signature" => sig = Some(Signature::parse(rest)?),
                _ => body.push((i + 1, head.to_string(), rest.trim().to_string())),
            }
        }
        let sig = sig.ok_or_else(|| Error::syntax(1, 1, "missing `sig:` line"))?;
        let mut m = MlnModel::new(sig);
        for (line, head, rest) in body {
            let relocate = |e: Error| match e {
                Error::Syntax { column, message, .. } => Error::syntax(line, column, message),
                other => other,
            };
            if head == "hard" {
                m = m.hard(&rest).map_err(relocate)?;
            } else {
                let w = parse_rational(&head)
                    .map_err(|_| Error::syntax(line, 1, format!("`{head}` is not a rational weight")))?;
                m = m.soft(w, &rest).map_err(relocate)?;
            }
        }
        Ok(m)
    }

    /// The count problem: a fresh `@P_i` per soft formula with
    /// `∀xy. P_i ↔ φ_i`, `w(P_i)` the soft weight and `w̄(P_i) = 1`.
    pub fn compile(&self) -> Result<Problem> {
        let mut sig = self.signature.clone();
        let mut clauses = Vec::new();
        let mut wf = WeightFunction::unit();
        for s in &self.soft {
            if !s.weight.is_positive() {
                return Err(Error::Weight(format!(
                    "soft weights are multiplicative and must be positive, got {}",
                    s.weight
                )));
            }
            let vars = s.formula.free_vars();
            let (arity, args, phi) = match (vars.contains(&Var::X), vars.contains(&Var::Y)) {
                (true, true) => (2, vec![Var::X, Var::Y], s.formula.clone()),
                (true, false) => (1, vec![Var::X], s.formula.clone()),
                (false, true) => (1, vec![Var::X], s.formula.swap_vars()),
                (false, false) => {
                    return Err(Error::Unsupported(format!(
                        "soft formula `{}` has no free variables",
                        s.formula
                    )))
                }
            };
            let p = sig.add_fresh("P", arity);
            clauses.push(Clause::ForallXY(Formula::atom(&p, &args).iff(phi)));
            wf.set(&p, s.weight.clone(), Rational::one());
        }
        let mut problem = Problem::new(sig).with_weights(wf);
        problem.sentence = Sentence::new(clauses);
        for h in &self.hard {
            problem = add_hard(problem, h);
        }
        Ok(problem)
    }

    pub fn partition(&self, n: usize) -> Result<Rational> {
        self.partition_with(n, &SolveOptions::default())
    }

    pub fn partition_with(&self, n: usize, opts: &SolveOptions) -> Result<Rational> {
        self.compile()?.count_with(n, opts)
    }

    /// `Z(hard ∧ query) / Z(hard)`.
    pub fn query_probability(&self, query: &Hard, n: usize) -> Result<Rational> {
        let z = self.partition(n)?;
        if z.is_zero() {
            return Err(Error::ZeroPartition);
        }
        let with = add_hard(self.compile()?, query).count(n)?;
        Ok(with / z)
    }

    /// The distribution of `|P|` for a predicate of the model.
    pub fn statistic_distribution(&self, predicate: &str, n: usize) -> Result<Distribution> {
        self.statistic_distribution_with(predicate, n, &SolveOptions::default())
    }

    pub fn statistic_distribution_with(&self, predicate: &str, n: usize, opts: &SolveOptions) -> Result<Distribution> {
        self.signature.arity_of(predicate)?;
        let masses = self.compile()?.statistic(n, predicate, opts)?;
        let z: Rational = masses.values().cloned().sum();
        if z.is_zero() {
            return Err(Error::ZeroPartition);
        }
        Ok(Distribution {
            probabilities: masses.into_iter().map(|(s, m)| (s, m / &z)).collect(),
        })
    }
}

fn add_hard(mut p: Problem, h: &Hard) -> Problem {
    match h {
        Hard::Sentence(s) => p.sentence = p.sentence.and(s.clone()),
        Hard::Axiom(a) => p.axioms.push(a.clone()),
        Hard::Constraint(c) => p.constraints.push(c.clone()),
    }
    p
}

/// Models used in the experiments; weights are rational approximations of
/// `exp(w)`.
pub mod presets {
    use super::*;

    /// `exp(-1) ≈ 0.3679`.
    pub fn exp_minus_one() -> Rational {
        Rational::new(3679.into(), 10000.into())
    }

    /// `exp(3) ≈ 20.0855`.
    pub fn exp_three() -> Rational {
        Rational::new(200855.into(), 10000.into())
    }

    pub const UNDIRECTED: &str = "forall x y. ~R(x,x) & (R(x,y) -> R(y,x))";

    /// `r : R(x,y)` over `R/2` with one of the hard variants by name.
    pub fn edges(variant: &str, r: Rational) -> Result<MlnModel> {
        let sig = Signature::parse("R/2")?;
        let m = MlnModel::new(sig).soft(r, "R(x,y)")?;
        let m = match variant {
            "directed" => m.hard("forall x y. ~R(x,x)")?,
            "dag" => m.hard("forall x y. ~R(x,x)")?.hard("dag(R)")?,
            "dag-approx" => m.hard("forall x y. ~R(x,x) & (R(x,y) -> ~R(y,x))")?,
            "undirected" => m.hard(UNDIRECTED)?,
            "connected" => m.hard(UNDIRECTED)?.hard("connected(R)")?,
            "connected-approx" => m.hard(UNDIRECTED)?.hard("forall x. exists y. R(x,y)")?,
            "connected-card" => m.hard(UNDIRECTED)?.hard("|R| >= 2*n - 2")?,
            "forest" => m.hard(UNDIRECTED)?.hard("forest(R)")?,
            "forest-card" => m.hard(UNDIRECTED)?.hard("|R| <= 2*n - 2")?,
            _ => return Err(Error::Unsupported(format!("unknown edges preset `{variant}`"))),
        };
        Ok(m)
    }

    pub const EDGE_VARIANTS: [&str; 9] = [
        "directed",
        "dag",
        "dag-approx",
        "undirected",
        "connected",
        "connected-approx",
        "connected-card",
        "forest",
        "forest-card",
    ];

    /// Smokers and friends over an undirected friendship graph, with hard
    /// variant `free`, `connected`, `card` (`|F| >= 2n - 2`) or `forest`.
    pub fn smokers(variant: &str, ws: Rational, wf: Rational, wp: Rational) -> Result<MlnModel> {
        let sig = Signature::parse("S/1, F/2")?;
        let m = MlnModel::new(sig)
            .soft(ws, "S(x)")?
            .soft(wf, "F(x,y)")?
            .soft(wp, "S(x) & F(x,y) -> S(y)")?
            .hard("forall x y. ~F(x,x) & (F(x,y) -> F(y,x))")?;
        let m = match variant {
            "free" => m,
            "connected" => m.hard("connected(F)")?,
            "card" => m.hard("|F| >= 2*n - 2")?,
            "forest" => m.hard("forest(F)")?,
            _ => return Err(Error::Unsupported(format!("unknown smokers preset `{variant}`"))),
        };
        Ok(m)
    }

    pub const SMOKERS_VARIANTS: [&str; 4] = ["free", "connected", "card", "forest"];
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rational};

    #[test]
    fn compile_shapes() {
        let m = presets::smokers("free", int(1), int(2), int(3)).unwrap();
        let p = m.compile().unwrap();
        assert_eq!(p.signature.len(), 5);
        assert_eq!(p.sentence.clauses.len(), 4);
        assert_eq!(
            p.sentence.clauses[2].to_string(),
            "forall x y. @P2(x,y) <-> S(x) & F(x,y) -> S(y)"
        );
        let bad = MlnModel::new(Signature::parse("A/1").unwrap())
            .soft(int(0), "A(x)")
            .unwrap();
        assert!(bad.compile().is_err());
    }

    #[test]
    fn partitions() {
        let m = MlnModel::new(Signature::parse("A/1").unwrap());
        assert_eq!(m.partition(3).unwrap(), int(8));
        let m = MlnModel::new(Signature::parse("R/2").unwrap());
        assert_eq!(m.partition(2).unwrap(), int(16));
        let r = rational(3, 7);
        let m = presets::edges("undirected", r.clone()).unwrap();
        assert_eq!(m.partition(2).unwrap(), int(1) + &r * &r);
        let m = MlnModel::new(Signature::parse("F/2").unwrap())
            .hard(presets::UNDIRECTED.replace('R', "F").as_str())
            .unwrap()
            .hard("connected(F)")
            .unwrap();
        assert_eq!(m.partition(4).unwrap(), int(38));
    }

    #[test]
    fn queries() {
        let m = MlnModel::new(Signature::parse("F/2").unwrap())
            .hard(&presets::UNDIRECTED.replace('R', "F"))
            .unwrap();
        let sig = &m.signature;
        assert_eq!(
            m.query_probability(&Hard::parse("true", sig).unwrap(), 4).unwrap(),
            int(1)
        );
        assert_eq!(
            m.query_probability(&Hard::parse("connected(F)", sig).unwrap(), 4)
                .unwrap(),
            rational(38, 64)
        );
        let empty = m.clone().hard("|F| = 1").unwrap();
        assert!(matches!(
            empty.query_probability(&Hard::parse("true", sig).unwrap(), 3),
            Err(Error::ZeroPartition)
        ));
    }

    #[test]
    fn distributions() {
        let m = MlnModel::new(Signature::parse("A/1").unwrap());
        let d = m.statistic_distribution("A", 3).unwrap();
        assert_eq!(
            d.probabilities.values().cloned().collect::<Vec<_>>(),
            vec![rational(1, 8), rational(3, 8), rational(3, 8), rational(1, 8)]
        );
        assert_eq!(d.total(), int(1));
        assert_eq!(d.expectation(), rational(3, 2));
        let s = presets::smokers("free", int(1), rational(1, 2), int(3)).unwrap();
        let d = s.statistic_distribution("S", 4).unwrap();
        assert!(d.is_symmetric(4));
        assert_eq!(d.total(), int(1));
    }

    #[test]
    fn file_format() {
        let text = "# model\nsig: S/1, F/2\n1/2 : F(x,y)\n2 : S(x)\nhard: ~F(x,x)\nhard: |F| <= 4\nhard: dag(F)\n";
        let m = MlnModel::parse(text).unwrap();
        assert_eq!(m.soft.len(), 2);
        assert_eq!(m.hard.len(), 3);
        assert!(matches!(m.hard[2], Hard::Axiom(_)));
        let err = MlnModel::parse("sig: A/1\n1 : B(x)").unwrap_err();
        assert!(matches!(err, Error::UnknownPredicate(_)));
        let err = MlnModel::parse("sig: A/1\n1 : A(x) &").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
    }
}

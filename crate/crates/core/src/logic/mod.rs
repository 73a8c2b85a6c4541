//! Signatures, quantifier-free FO² formulas and sentences, plus the 1-type /
//! 2-table machinery the lifted engines are indexed by.

mod parser;
mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub use parser::{parse, parse_formula};
pub use types::{
    enumerate_one_types, enumerate_two_tables, is_consistent, CompiledFormula, OneType, TwoTable, TwoType,
};

/// Prefix reserved for predicates introduced by rewrites; the user-facing
/// parser cannot produce it.
pub const RESERVED_PREFIX: char = '@';

const KEYWORDS: &[&str] = &["forall", "exists", "true", "false", "x", "y"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: u8,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: u8) -> Self {
        Predicate {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Roles a graph axiom can assign to predicates of the signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Edge,
    Root,
    Source,
    Sink,
}

impl Role {
    fn arity(self) -> u8 {
        match self {
            Role::Edge => 2,
            Role::Root | Role::Source | Role::Sink => 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    predicates: Vec<Predicate>,
    distinguished: BTreeMap<Role, String>,
}

impl Signature {
    pub fn new(predicates: impl IntoIterator<Item = Predicate>) -> Result<Self> {
        let mut sig = Signature::default();
        for p in predicates {
            sig.add(p)?;
        }
        Ok(sig)
    }

    /// Parses a declaration such as `"R/2, A/1"`. An empty string gives the
    /// empty signature.
    pub fn parse(decl: &str) -> Result<Self> {
        let mut sig = Signature::default();
        for item in decl.split([',', ';', ' ']).filter(|s| !s.trim().is_empty()) {
            let item = item.trim();
            let (name, arity) = item
                .split_once('/')
                .ok_or_else(|| Error::Signature(format!("expected NAME/ARITY, got `{item}`")))?;
            let arity: u8 = arity
                .trim()
                .parse()
                .map_err(|_| Error::Signature(format!("bad arity in `{item}`")))?;
            let name = name.trim();
            if !is_identifier(name) {
                return Err(Error::Signature(format!("bad predicate name `{name}`")));
            }
            sig.add(Predicate::new(name, arity))?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, p: Predicate) -> Result<()> {
        if p.arity != 1 && p.arity != 2 {
            return Err(Error::Signature(format!("predicate {} must have arity 1 or 2", p)));
        }
        if self.get(&p.name).is_some() {
            return Err(Error::Signature(format!("duplicate predicate `{}`", p.name)));
        }
        self.predicates.push(p);
        Ok(())
    }

    /// Adds a fresh predicate named `@{stem}{i}` and returns its name.
    pub fn add_fresh(&mut self, stem: &str, arity: u8) -> String {
        let mut i = 0;
        loop {
            let name = format!("{RESERVED_PREFIX}{stem}{i}");
            if self.get(&name).is_none() {
                self.predicates.push(Predicate::new(name.clone(), arity));
                return name;
            }
            i += 1;
        }
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Predicate> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn arity_of(&self, name: &str) -> Result<u8> {
        self.get(name)
            .map(|p| p.arity)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))
    }

    pub fn binary(&self) -> impl Iterator<Item = &Predicate> {
        self.predicates.iter().filter(|p| p.arity == 2)
    }

    pub fn set_distinguished(&mut self, role: Role, name: &str) -> Result<()> {
        let arity = self.arity_of(name)?;
        if arity != role.arity() {
            return Err(Error::ArityMismatch {
                name: name.to_string(),
                expected: role.arity(),
                found: arity as usize,
            });
        }
        self.distinguished.insert(role, name.to_string());
        Ok(())
    }

    pub fn distinguished(&self, role: Role) -> Option<&str> {
        self.distinguished.get(&role).map(String::as_str)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.predicates.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::X => "x",
            Var::Y => "y",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Var>,
}

/// Quantifier-free formula over the variables `x` and `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn atom(predicate: impl Into<String>, args: &[Var]) -> Formula {
        Formula::Atom(Atom {
            predicate: predicate.into(),
            args: args.to_vec(),
        })
    }

    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    /// Left-folded conjunction; `True` for an empty iterator.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Renames variables through `map`.
    pub fn rename(&self, map: &impl Fn(Var) -> Var) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(Atom {
                predicate: a.predicate.clone(),
                args: a.args.iter().map(|&v| map(v)).collect(),
            }),
            Formula::Not(a) => a.rename(map).not(),
            Formula::And(a, b) => a.rename(map).and(b.rename(map)),
            Formula::Or(a, b) => a.rename(map).or(b.rename(map)),
            Formula::Implies(a, b) => a.rename(map).implies(b.rename(map)),
            Formula::Iff(a, b) => a.rename(map).iff(b.rename(map)),
        }
    }

    pub fn swap_vars(&self) -> Formula {
        self.rename(&Var::other)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| out.extend(a.args.iter().copied()));
        out
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a.predicate.clone());
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(a) => a.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Checks every atom against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        let mut err = None;
        self.visit_atoms(&mut |a| {
            if err.is_some() {
                return;
            }
            match sig.get(&a.predicate) {
                None => err = Some(Error::UnknownPredicate(a.predicate.clone())),
                Some(p) if p.arity as usize != a.args.len() => {
                    err = Some(Error::ArityMismatch {
                        name: a.predicate.clone(),
                        expected: p.arity,
                        found: a.args.len(),
                    })
                }
                _ => {}
            }
        });
        err.map_or(Ok(()), Err)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            _ => 6,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, v) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        let (a, b, op, right_assoc) = match self {
            Formula::True => return f.write_str("true"),
            Formula::False => return f.write_str("false"),
            Formula::Atom(a) => return write!(f, "{a}"),
            Formula::Not(a) => {
                f.write_str("~")?;
                return write_operand(f, a, a.precedence() < prec);
            }
            Formula::And(a, b) => (a, b, " & ", false),
            Formula::Or(a, b) => (a, b, " | ", false),
            Formula::Implies(a, b) => (a, b, " -> ", true),
            Formula::Iff(a, b) => (a, b, " <-> ", false),
        };
        let (lp, rp) = if right_assoc {
            (a.precedence() <= prec, b.precedence() < prec)
        } else {
            (a.precedence() < prec, b.precedence() <= prec)
        };
        write_operand(f, a, lp)?;
        f.write_str(op)?;
        write_operand(f, b, rp)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Clause {
    /// `∀x∀y. φ(x, y)`
    ForallXY(Formula),
    /// `∀x∃y. φ(x, y)`
    ForallXExistsY(Formula),
}

impl Clause {
    pub fn matrix(&self) -> &Formula {
        match self {
            Clause::ForallXY(f) | Clause::ForallXExistsY(f) => f,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::ForallXY(m) => write!(f, "forall x y. {m}"),
            Clause::ForallXExistsY(m) => write!(f, "forall x. exists y. {m}"),
        }
    }
}

/// Conjunction of clauses. The empty sentence is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Sentence {
    pub clauses: Vec<Clause>,
}

impl Sentence {
    pub fn new(clauses: Vec<Clause>) -> Self {
        Sentence { clauses }
    }

    pub fn forall(matrix: Formula) -> Self {
        Sentence::new(vec![Clause::ForallXY(matrix)])
    }

    pub fn and(mut self, other: Sentence) -> Sentence {
        self.clauses.extend(other.clauses);
        self
    }

    pub fn is_universal(&self) -> bool {
        self.clauses.iter().all(|c| matches!(c, Clause::ForallXY(_)))
    }

    /// Conjunction of all universal matrices.
    pub fn universal_matrix(&self) -> Formula {
        Formula::conjunction(self.clauses.iter().filter_map(|c| match c {
            Clause::ForallXY(m) => Some(m.clone()),
            Clause::ForallXExistsY(_) => None,
        }))
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        self.clauses.iter().try_for_each(|c| c.matrix().check(sig))
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("forall x y. true");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

use std::fmt;

use super::{Formula, Signature, Var};
use crate::error::{Error, Result};

/// Largest signature the bit-packed type indices support.
pub const MAX_PREDICATES: usize = 24;

#[derive(Debug, Clone, Copy)]
enum Node {
    Const(bool),
    Atom { pred: u16, args: [Var; 2] },
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Implies(u32, u32),
    Iff(u32, u32),
}

/// A formula flattened into an index-based node array, with atoms resolved
/// to predicate positions in a signature.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    root: u32,
    arity: Vec<u8>,
    binary_slot: Vec<u16>,
}

impl CompiledFormula {
    pub fn new(formula: &Formula, sig: &Signature) -> Result<Self> {
        if sig.len() > MAX_PREDICATES {
            return Err(Error::Unsupported(format!(
                "signatures with more than {MAX_PREDICATES} predicates"
            )));
        }
        formula.check(sig)?;
        let mut slot = 0u16;
        let binary_slot = sig
            .predicates()
            .iter()
            .map(|p| {
                let s = slot;
                if p.arity == 2 {
                    slot += 1;
                }
                s
            })
            .collect();
        let mut c = CompiledFormula {
            nodes: Vec::new(),
            root: 0,
            arity: sig.predicates().iter().map(|p| p.arity).collect(),
            binary_slot,
        };
        c.root = c.push(formula, sig);
        Ok(c)
    }

    fn push(&mut self, f: &Formula, sig: &Signature) -> u32 {
        let node = match f {
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Atom(a) => {
                let pred = sig.index_of(&a.predicate).expect("checked") as u16;
                let args = [a.args[0], *a.args.get(1).unwrap_or(&a.args[0])];
                Node::Atom { pred, args }
            }
            Formula::Not(a) => Node::Not(self.push(a, sig)),
            Formula::And(a, b) => Node::And(self.push(a, sig), self.push(b, sig)),
            Formula::Or(a, b) => Node::Or(self.push(a, sig), self.push(b, sig)),
            Formula::Implies(a, b) => Node::Implies(self.push(a, sig), self.push(b, sig)),
            Formula::Iff(a, b) => Node::Iff(self.push(a, sig), self.push(b, sig)),
        };
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    /// Evaluates with `x` bound to element `x` and `y` to element `y`.
    /// `holds(p, a, b)` reports the ground atom `P(a, b)`; unary atoms are
    /// queried with `a == b`.
    pub fn eval(&self, x: usize, y: usize, holds: &impl Fn(usize, usize, usize) -> bool) -> bool {
        self.eval_node(self.root, x, y, holds)
    }

    fn eval_node(&self, n: u32, x: usize, y: usize, holds: &impl Fn(usize, usize, usize) -> bool) -> bool {
        let elem = |v: Var| if v == Var::X { x } else { y };
        match self.nodes[n as usize] {
            Node::Const(b) => b,
            Node::Atom { pred, args } => {
                let a = elem(args[0]);
                let b = if self.arity[pred as usize] == 2 {
                    elem(args[1])
                } else {
                    a
                };
                holds(pred as usize, a, b)
            }
            Node::Not(a) => !self.eval_node(a, x, y, holds),
            Node::And(a, b) => self.eval_node(a, x, y, holds) && self.eval_node(b, x, y, holds),
            Node::Or(a, b) => self.eval_node(a, x, y, holds) || self.eval_node(b, x, y, holds),
            Node::Implies(a, b) => !self.eval_node(a, x, y, holds) || self.eval_node(b, x, y, holds),
            Node::Iff(a, b) => self.eval_node(a, x, y, holds) == self.eval_node(b, x, y, holds),
        }
    }

    pub fn num_predicates(&self) -> usize {
        self.arity.len()
    }

    /// Evaluates on the two elements of a 2-type, element 0 being `x`.
    pub fn eval_two_type(&self, t: TwoType, x: usize, y: usize) -> bool {
        let one = [t.i, t.j];
        self.eval(x, y, &|p, a, b| {
            if a == b {
                (one[a] >> p) & 1 == 1
            } else {
                let bit = 2 * self.binary_slot[p] as usize + usize::from(a == 1);
                (t.l >> bit) & 1 == 1
            }
        })
    }

    /// `Φ(x,x) ∧ Φ(x,y) ∧ Φ(y,x) ∧ Φ(y,y)` on the 2-type.
    pub fn holds_on_pair(&self, t: TwoType) -> bool {
        self.eval_two_type(t, 0, 0)
            && self.eval_two_type(t, 0, 1)
            && self.eval_two_type(t, 1, 0)
            && self.eval_two_type(t, 1, 1)
    }

    /// `Φ(x,x)` under the 1-type `i`.
    pub fn holds_on_element(&self, i: usize) -> bool {
        self.eval_two_type(TwoType { i, j: i, l: 0 }, 0, 0)
    }
}

/// Complete assignment to the single-variable atoms. Bit `p` of `index` is
/// the truth value of predicate `p`'s atom (`P(x)` or `P(x,x)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneType {
    pub index: usize,
    pub literals: Vec<bool>,
}

/// Complete assignment to the two-variable atoms. For the `s`-th binary
/// predicate `R`, bit `2s` is `R(x,y)` and bit `2s + 1` is `R(y,x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoTable {
    pub index: usize,
    pub literals: Vec<(bool, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoType {
    pub i: usize,
    pub j: usize,
    pub l: usize,
}

pub fn enumerate_one_types(sig: &Signature) -> Vec<OneType> {
    let a1 = sig.len();
    (0..1usize << a1)
        .map(|index| OneType {
            index,
            literals: (0..a1).map(|p| (index >> p) & 1 == 1).collect(),
        })
        .collect()
}

pub fn enumerate_two_tables(sig: &Signature) -> Vec<TwoTable> {
    let nb = sig.binary().count();
    (0..1usize << (2 * nb))
        .map(|index| TwoTable {
            index,
            literals: (0..nb)
                .map(|s| ((index >> (2 * s)) & 1 == 1, (index >> (2 * s + 1)) & 1 == 1))
                .collect(),
        })
        .collect()
}

/// True iff the 2-type satisfies `Φ({x, y})`.
pub fn is_consistent(t: TwoType, phi: &CompiledFormula) -> bool {
    phi.holds_on_pair(t)
}

impl OneType {
    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        LiteralList(
            sig.predicates()
                .iter()
                .zip(&self.literals)
                .map(|(p, &v)| {
                    let args = if p.arity == 2 { "x,x" } else { "x" };
                    (format!("{}({args})", p.name), v)
                })
                .collect(),
        )
    }
}

impl TwoTable {
    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        LiteralList(
            sig.binary()
                .zip(&self.literals)
                .flat_map(|(p, &(xy, yx))| [(format!("{}(x,y)", p.name), xy), (format!("{}(y,x)", p.name), yx)])
                .collect(),
        )
    }
}

struct LiteralList(Vec<(String, bool)>);

impl fmt::Display for LiteralList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("true");
        }
        for (k, (atom, v)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" & ")?;
            }
            if !v {
                f.write_str("~")?;
            }
            f.write_str(atom)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn compile(sig: &Signature, text: &str) -> CompiledFormula {
        CompiledFormula::new(&parse_formula(text, sig).unwrap(), sig).unwrap()
    }

    #[test]
    fn type_counts() {
        let sig = Signature::parse("U/1, R/2").unwrap();
        assert_eq!(enumerate_one_types(&sig).len(), 4);
        assert_eq!(enumerate_two_tables(&sig).len(), 4);
        let sig = Signature::parse("R/2").unwrap();
        assert_eq!(enumerate_one_types(&sig).len(), 2);
        assert_eq!(enumerate_two_tables(&sig).len(), 4);
        let sig = Signature::parse("A/1").unwrap();
        assert_eq!(enumerate_one_types(&sig).len(), 2);
        assert_eq!(enumerate_two_tables(&sig).len(), 1);
        let sig = Signature::parse("A/1, B/1").unwrap();
        assert_eq!(enumerate_two_tables(&sig).len(), 1);
    }

    #[test]
    fn literal_rendering() {
        let sig = Signature::parse("A/1, R/2").unwrap();
        let t = &enumerate_one_types(&sig)[2];
        assert_eq!(t.display(&sig).to_string(), "~A(x) & R(x,x)");
        let l = &enumerate_two_tables(&sig)[1];
        assert_eq!(l.display(&sig).to_string(), "R(x,y) & ~R(y,x)");
    }

    #[test]
    fn consistent_two_type_from_worked_example() {
        let sig = Signature::parse("A/1, R/2").unwrap();
        let phi = compile(&sig, "(A(x) & R(x,y)) -> A(y)");
        // ~A(x) & R(x,x), same for y, ~R(x,y) & R(y,x)
        let t = TwoType {
            i: 0b10,
            j: 0b10,
            l: 0b10,
        };
        assert!(is_consistent(t, &phi));
        // A(x), ~A(y), R(x,y) violates the formula.
        let t = TwoType {
            i: 0b01,
            j: 0b00,
            l: 0b01,
        };
        assert!(!is_consistent(t, &phi));
    }

    #[test]
    fn tautology_and_contradiction() {
        let sig = Signature::parse("A/1, R/2").unwrap();
        let t = compile(&sig, "true");
        let f = compile(&sig, "false");
        for i in 0..4 {
            for j in 0..4 {
                for l in 0..4 {
                    assert!(is_consistent(TwoType { i, j, l }, &t));
                    assert!(!is_consistent(TwoType { i, j, l }, &f));
                }
            }
        }
    }

    #[test]
    fn asymmetric_table_violates_symmetry() {
        let sig = Signature::parse("R/2").unwrap();
        let phi = compile(&sig, "~R(x,x) & (R(x,y) -> R(y,x))");
        assert!(!is_consistent(TwoType { i: 0, j: 0, l: 0b01 }, &phi));
        assert!(is_consistent(TwoType { i: 0, j: 0, l: 0b11 }, &phi));
        assert!(!is_consistent(TwoType { i: 1, j: 0, l: 0b11 }, &phi));
    }
}

//! Boolean combinations of linear (in)equalities over predicate
//! cardinalities `|P|` and the domain size `n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{is_identifier, Signature};

/// `Σ c_P·|P| + c_n·n + c_0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LinearExpr {
    pub terms: BTreeMap<String, i64>,
    pub n: i64,
    pub constant: i64,
}

impl LinearExpr {
    pub fn constant(c: i64) -> Self {
        LinearExpr {
            constant: c,
            ..Default::default()
        }
    }

    pub fn count(p: impl Into<String>) -> Self {
        let mut e = LinearExpr::default();
        e.terms.insert(p.into(), 1);
        e
    }

    pub fn domain() -> Self {
        LinearExpr {
            n: 1,
            ..Default::default()
        }
    }

    pub fn scaled(&self, k: i64) -> Self {
        LinearExpr {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p.clone(), c * k))
                .filter(|(_, c)| *c != 0)
                .collect(),
            n: self.n * k,
            constant: self.constant * k,
        }
    }

    pub fn plus(&self, other: &LinearExpr) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            let e = out.terms.entry(p.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                out.terms.remove(p);
            }
        }
        out.n += other.n;
        out.constant += other.constant;
        out
    }

    pub fn minus(&self, other: &LinearExpr) -> Self {
        self.plus(&other.scaled(-1))
    }

    fn as_constant(&self) -> Option<i64> {
        (self.terms.is_empty() && self.n == 0).then_some(self.constant)
    }

    pub fn eval(&self, count: &impl Fn(&str) -> i64, n: i64) -> i64 {
        self.terms.iter().map(|(p, c)| c * count(p)).sum::<i64>() + self.n * n + self.constant
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(i64, String)> = self.terms.iter().map(|(p, c)| (*c, format!("|{p}|"))).collect();
        if self.n != 0 {
            parts.push((self.n, "n".to_string()));
        }
        if self.constant != 0 || parts.is_empty() {
            parts.push((self.constant, String::new()));
        }
        for (k, (c, atom)) in parts.iter().enumerate() {
            let mag = c.unsigned_abs();
            if k == 0 {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if *c < 0 { " - " } else { " + " })?;
            }
            match (atom.is_empty(), mag) {
                (true, _) => write!(f, "{mag}")?,
                (false, 1) => f.write_str(atom)?,
                (false, _) => write!(f, "{mag}*{atom}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    fn apply(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CardinalityConstraint {
    True,
    False,
    Cmp(LinearExpr, CmpOp, LinearExpr),
    Not(Box<CardinalityConstraint>),
    And(Box<CardinalityConstraint>, Box<CardinalityConstraint>),
    Or(Box<CardinalityConstraint>, Box<CardinalityConstraint>),
}

impl CardinalityConstraint {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = lex(text)?;
        let mut p = CParser { tokens, pos: 0 };
        let c = p.or()?;
        if p.peek() != &CTok::Eof {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(c)
    }

    pub fn eq(a: LinearExpr, b: LinearExpr) -> Self {
        CardinalityConstraint::Cmp(a, CmpOp::Eq, b)
    }

    pub fn and(self, other: Self) -> Self {
        CardinalityConstraint::And(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> Self {
        CardinalityConstraint::Not(Box::new(self))
    }

    pub fn conjunction(parts: impl IntoIterator<Item = Self>) -> Self {
        parts
            .into_iter()
            .reduce(Self::and)
            .unwrap_or(CardinalityConstraint::True)
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, CardinalityConstraint::True)
    }

    pub fn holds(&self, count: &impl Fn(&str) -> i64, n: i64) -> bool {
        match self {
            CardinalityConstraint::True => true,
            CardinalityConstraint::False => false,
            CardinalityConstraint::Cmp(a, op, b) => op.apply(a.eval(count, n), b.eval(count, n)),
            CardinalityConstraint::Not(c) => !c.holds(count, n),
            CardinalityConstraint::And(a, b) => a.holds(count, n) && b.holds(count, n),
            CardinalityConstraint::Or(a, b) => a.holds(count, n) || b.holds(count, n),
        }
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut BTreeSet<String>) {
        match self {
            CardinalityConstraint::True | CardinalityConstraint::False => {}
            CardinalityConstraint::Cmp(a, _, b) => {
                out.extend(a.terms.keys().cloned());
                out.extend(b.terms.keys().cloned());
            }
            CardinalityConstraint::Not(c) => c.collect_predicates(out),
            CardinalityConstraint::And(a, b) | CardinalityConstraint::Or(a, b) => {
                a.collect_predicates(out);
                b.collect_predicates(out);
            }
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        for p in self.predicates() {
            if sig.get(&p).is_none() {
                return Err(Error::Constraint(format!("unknown predicate `{p}`")));
            }
        }
        Ok(())
    }

    /// Upper bounds on `|P|` implied by the top-level conjuncts at domain
    /// size `n`. `max_count(Q)` bounds every other predicate.
    pub fn upper_bounds(&self, n: i64, max_count: &impl Fn(&str) -> i64) -> BTreeMap<String, i64> {
        let mut out = BTreeMap::new();
        self.collect_bounds(n, max_count, &mut out);
        out
    }

    fn collect_bounds(&self, n: i64, max_count: &impl Fn(&str) -> i64, out: &mut BTreeMap<String, i64>) {
        match self {
            CardinalityConstraint::And(a, b) => {
                a.collect_bounds(n, max_count, out);
                b.collect_bounds(n, max_count, out);
            }
            CardinalityConstraint::Cmp(a, op, b) => {
                // Normalize to `e <= 0` (and `-e <= 0` for equalities).
                let d = a.minus(b);
                let forms: Vec<LinearExpr> = match op {
                    CmpOp::Le => vec![d],
                    CmpOp::Lt => vec![d.plus(&LinearExpr::constant(1))],
                    CmpOp::Ge => vec![d.scaled(-1)],
                    CmpOp::Gt => vec![d.scaled(-1).plus(&LinearExpr::constant(1))],
                    CmpOp::Eq => vec![d.clone(), d.scaled(-1)],
                    CmpOp::Ne => vec![],
                };
                for e in forms {
                    for (p, &cp) in &e.terms {
                        if cp <= 0 {
                            continue;
                        }
                        let mut rhs = -(e.n * n + e.constant);
                        for (q, &cq) in &e.terms {
                            if q != p && cq < 0 {
                                rhs += -cq * max_count(q);
                            }
                        }
                        let bound = rhs.div_euclid(cp).max(0);
                        let slot = out.entry(p.clone()).or_insert(bound);
                        *slot = (*slot).min(bound);
                    }
                }
            }
            _ => {}
        }
    }
}

impl fmt::Display for CardinalityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalityConstraint::True => f.write_str("true"),
            CardinalityConstraint::False => f.write_str("false"),
            CardinalityConstraint::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            CardinalityConstraint::Not(c) => write!(f, "not ({c})"),
            CardinalityConstraint::And(a, b) => write!(f, "({a}) and ({b})"),
            CardinalityConstraint::Or(a, b) => write!(f, "({a}) or ({b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum CTok {
    Count(String),
    N,
    Int(i64),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Op(CmpOp),
    And,
    Or,
    Not,
    True,
    False,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(CTok, usize)>> {
    let err = |pos: usize, msg: &str| Error::Constraint(format!("{msg} at column {} in `{text}`", pos + 1));
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        let start = i;
        let two = text.get(i..i + 2).unwrap_or("");
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '|' => {
                let end = text[i + 1..].find('|').ok_or_else(|| err(i, "unterminated `|`"))?;
                let name = text[i + 1..i + 1 + end].trim();
                if !is_identifier(name) && !name.starts_with('@') {
                    return Err(err(i, "expected a predicate name between `|`"));
                }
                i += end + 2;
                CTok::Count(name.to_string())
            }
            '+' => {
                i += 1;
                CTok::Plus
            }
            '-' => {
                i += 1;
                CTok::Minus
            }
            '*' => {
                i += 1;
                CTok::Star
            }
            '(' => {
                i += 1;
                CTok::LParen
            }
            ')' => {
                i += 1;
                CTok::RParen
            }
            '&' => {
                i += if two == "&&" { 2 } else { 1 };
                CTok::And
            }
            '<' | '>' | '=' | '!' => {
                let (op, len) = match two {
                    "<=" => (Some(CmpOp::Le), 2),
                    ">=" => (Some(CmpOp::Ge), 2),
                    "!=" => (Some(CmpOp::Ne), 2),
                    "==" => (Some(CmpOp::Eq), 2),
                    _ => match c {
                        '<' => (Some(CmpOp::Lt), 1),
                        '>' => (Some(CmpOp::Gt), 1),
                        '=' => (Some(CmpOp::Eq), 1),
                        _ => (None, 1),
                    },
                };
                i += len;
                op.map_or(CTok::Not, CTok::Op)
            }
            '0'..='9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                CTok::Int(text[start..i].parse().map_err(|_| err(start, "integer too large"))?)
            }
            c if c.is_ascii_alphabetic() => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                match &text[start..i] {
                    "n" => CTok::N,
                    "and" => CTok::And,
                    "or" => CTok::Or,
                    "not" => CTok::Not,
                    "true" => CTok::True,
                    "false" => CTok::False,
                    w => return Err(err(start, &format!("unexpected word `{w}`"))),
                }
            }
            _ => return Err(err(i, &format!("unexpected character `{c}`"))),
        };
        out.push((tok, start));
    }
    out.push((CTok::Eof, text.len()));
    Ok(out)
}

struct CParser {
    tokens: Vec<(CTok, usize)>,
    pos: usize,
}

impl CParser {
    fn peek(&self) -> &CTok {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> CTok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> Error {
        Error::Constraint(format!("{msg} at column {}", self.tokens[self.pos].1 + 1))
    }

    fn or(&mut self) -> Result<CardinalityConstraint> {
        let mut left = self.and()?;
        while self.peek() == &CTok::Or {
            self.bump();
            let right = self.and()?;
            left = CardinalityConstraint::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<CardinalityConstraint> {
        let mut left = self.unary()?;
        while self.peek() == &CTok::And {
            self.bump();
            let right = self.unary()?;
            left = left.and(right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<CardinalityConstraint> {
        match self.peek() {
            CTok::Not => {
                self.bump();
                Ok(self.unary()?.negate())
            }
            CTok::True => {
                self.bump();
                Ok(CardinalityConstraint::True)
            }
            CTok::False => {
                self.bump();
                Ok(CardinalityConstraint::False)
            }
            CTok::LParen => {
                // Either a parenthesized constraint or the start of an
                // arithmetic expression; try the former first.
                let save = self.pos;
                self.bump();
                if let Ok(c) = self.or() {
                    if self.peek() == &CTok::RParen {
                        self.bump();
                        if !matches!(self.peek(), CTok::Op(_) | CTok::Plus | CTok::Minus | CTok::Star) {
                            return Ok(c);
                        }
                    }
                }
                self.pos = save;
                self.comparison()
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<CardinalityConstraint> {
        let a = self.expr()?;
        let op = match self.bump() {
            CTok::Op(op) => op,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a comparison operator"));
            }
        };
        let b = self.expr()?;
        Ok(CardinalityConstraint::Cmp(a, op, b))
    }

    fn expr(&mut self) -> Result<LinearExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                CTok::Plus => {
                    self.bump();
                    acc = acc.plus(&self.term()?);
                }
                CTok::Minus => {
                    self.bump();
                    acc = acc.minus(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LinearExpr> {
        let mut acc = self.factor()?;
        while self.peek() == &CTok::Star {
            self.bump();
            let rhs = self.factor()?;
            acc = match (acc.as_constant(), rhs.as_constant()) {
                (Some(k), _) => rhs.scaled(k),
                (_, Some(k)) => acc.scaled(k),
                _ => return Err(self.err("only multiplication by a constant is linear")),
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LinearExpr> {
        match self.bump() {
            CTok::Int(k) => Ok(LinearExpr::constant(k)),
            CTok::N => Ok(LinearExpr::domain()),
            CTok::Count(p) => Ok(LinearExpr::count(p)),
            CTok::Minus => Ok(self.factor()?.scaled(-1)),
            CTok::LParen => {
                let e = self.expr()?;
                if self.bump() != CTok::RParen {
                    self.pos -= 1;
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected a number, `n` or `|P|`"))
            }
        }
    }
}

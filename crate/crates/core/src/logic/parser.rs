use super::{Clause, Formula, Sentence, Signature, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token {
                tok,
                line: start.0,
                column: start.1,
            });
            *i += len;
            *col += len;
        };
        let peek = |k: usize| chars.get(i + k).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '~' | '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => {
                let len = if peek(1) == Some('&') { 2 } else { 1 };
                push(Tok::And, len, &mut i, &mut col)
            }
            '|' => {
                let len = if peek(1) == Some('|') { 2 } else { 1 };
                push(Tok::Or, len, &mut i, &mut col)
            }
            '-' if peek(1) == Some('>') => push(Tok::Implies, 2, &mut i, &mut col),
            '=' if peek(1) == Some('>') => push(Tok::Implies, 2, &mut i, &mut col),
            '<' if peek(1) == Some('-') && peek(2) == Some('>') => push(Tok::Iff, 3, &mut i, &mut col),
            '<' if peek(1) == Some('=') && peek(2) == Some('>') => push(Tok::Iff, 3, &mut i, &mut col),
            '=' => return Err(Error::syntax(line, col, "equality atoms are not supported")),
            '@' => return Err(Error::syntax(line, col, "names starting with `@` are reserved")),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                push(Tok::Ident(word), j - i, &mut i, &mut col)
            }
            other => return Err(Error::syntax(line, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::syntax(t.line, t.column, msg))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn var(&mut self) -> Result<Var> {
        match &self.peek().tok {
            Tok::Ident(s) if s == "x" => {
                self.bump();
                Ok(Var::X)
            }
            Tok::Ident(s) if s == "y" => {
                self.bump();
                Ok(Var::Y)
            }
            Tok::Ident(s) => {
                let s = s.clone();
                self.error(format!("variable `{s}` not allowed: only x and y may be used"))
            }
            _ => self.error("expected a variable"),
        }
    }

    fn sentence(&mut self) -> Result<Sentence> {
        let mut clauses = vec![self.clause()?];
        while self.peek().tok == Tok::And {
            self.bump();
            clauses.push(self.clause()?);
        }
        if self.peek().tok != Tok::Eof {
            return self.error("unexpected trailing input");
        }
        Ok(Sentence::new(clauses))
    }

    /// One `forall` block followed by an optional `exists` block and a matrix.
    fn clause(&mut self) -> Result<Clause> {
        if !self.is_keyword("forall") {
            return self.error("expected `forall`");
        }
        let mut universal = Vec::new();
        let mut existential = Vec::new();
        while self.is_keyword("forall") || self.is_keyword("exists") {
            let exists = self.is_keyword("exists");
            if !exists && !existential.is_empty() {
                return self.error(
                    "quantifier alternation beyond forall-exists is not supported; \
                     see the skolemization section of the README",
                );
            }
            self.bump();
            loop {
                let v = self.var()?;
                if universal.contains(&v) || existential.contains(&v) {
                    return self.error(format!("variable `{v}` bound twice"));
                }
                let block = if exists { &mut existential } else { &mut universal };
                block.push(v);
                if self.peek().tok == Tok::Dot {
                    break;
                }
                if self.peek().tok == Tok::Comma {
                    self.bump();
                }
            }
            self.expect(Tok::Dot, "`.` after quantified variables")?;
        }
        let matrix = self.iff()?;
        let bound: Vec<Var> = universal.iter().chain(&existential).copied().collect();
        if let Some(v) = matrix.free_vars().into_iter().find(|v| !bound.contains(v)) {
            return self.error(format!("variable `{v}` is free in the clause"));
        }
        match (universal.as_slice(), existential.as_slice()) {
            (_, []) => Ok(Clause::ForallXY(matrix)),
            ([u], [_]) => {
                if *u == Var::X {
                    Ok(Clause::ForallXExistsY(matrix))
                } else {
                    Ok(Clause::ForallXExistsY(matrix.swap_vars()))
                }
            }
            _ => self.error("only `forall x y.` and `forall x. exists y.` clauses are supported"),
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut left = self.implies()?;
        while self.peek().tok == Tok::Iff {
            self.bump();
            let right = self.implies()?;
            left = left.iff(right);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if self.peek().tok == Tok::Implies {
            self.bump();
            let right = self.implies()?;
            return Ok(left.implies(right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while self.peek().tok == Tok::Or {
            self.bump();
            let right = self.and()?;
            left = left.or(right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.peek().tok == Tok::And && !matches!(self.peek_at(1), Tok::Ident(s) if s == "forall") {
            self.bump();
            let right = self.unary()?;
            left = left.and(right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(ref s) if s == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(ref s) if s == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(ref s) if s == "forall" || s == "exists" => self.error(
                "nested quantifiers are not supported; write top-level \
                 `forall x. exists y.` clauses (see the skolemization section of the README)",
            ),
            Tok::Ident(name) => {
                self.bump();
                if self.peek().tok != Tok::LParen {
                    return Err(Error::syntax(t.line, t.column, format!("expected `(` after `{name}`")));
                }
                self.bump();
                let mut args = vec![self.var()?];
                while self.peek().tok == Tok::Comma {
                    self.bump();
                    args.push(self.var()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                let arity = self.sig.arity_of(&name)?;
                if arity as usize != args.len() {
                    return Err(Error::ArityMismatch {
                        name,
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(Formula::atom(name, &args))
            }
            _ => self.error("expected a formula"),
        }
    }
}

/// Parses a sentence of the clause DSL against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Sentence> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        sig,
    };
    p.sentence()
}

/// Parses a quantifier-free formula whose free variables are drawn from x, y.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        sig,
    };
    let f = p.iff()?;
    if p.peek().tok != Tok::Eof {
        return p.error("unexpected trailing input");
    }
    Ok(f)
}

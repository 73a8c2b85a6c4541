//! Graph axioms on a distinguished binary predicate.

use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{is_identifier, Role, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AxiomSpec {
    Dag {
        edge: String,
    },
    Connected {
        edge: String,
    },
    Forest {
        edge: String,
    },
    Tree {
        edge: String,
    },
    DirectedTree {
        edge: String,
        root: String,
    },
    DirectedForest {
        edge: String,
    },
    /// A DAG whose sources and/or sinks are exactly the true groundings of
    /// the given unary predicates.
    SourceSinkDag {
        edge: String,
        source: Option<String>,
        sink: Option<String>,
    },
}

impl AxiomSpec {
    /// Parses `dag(R)`, `connected(R)`, `forest(R)`, `tree(R)`,
    /// `directed_tree(R, Root)`, `directed_forest(R)` and
    /// `dag(R, Source, Sink)` (either of the last two may be `_`).
    pub fn parse(text: &str) -> Result<Self> {
        let err = |m: &str| Error::Unsupported(format!("axiom `{text}`: {m}"));
        let t = text.trim();
        let open = t.find('(').ok_or_else(|| err("expected `name(args)`"))?;
        if !t.ends_with(')') {
            return Err(err("expected `)` at the end"));
        }
        let name = t[..open].trim().to_ascii_lowercase();
        let args: Vec<&str> = t[open + 1..t.len() - 1].split(',').map(str::trim).collect();
        for a in &args {
            if *a != "_" && !is_identifier(a) {
                return Err(err(&format!("`{a}` is not a predicate name")));
            }
        }
        let edge = args[0].to_string();
        if edge == "_" {
            return Err(err("the edge predicate is required"));
        }
        let opt = |a: &str| (a != "_").then(|| a.to_string());
        let spec = match (name.as_str(), args.len()) {
            ("dag", 1) => AxiomSpec::Dag { edge },
            ("dag", 2) => AxiomSpec::SourceSinkDag {
                edge,
                source: opt(args[1]),
                sink: None,
            },
            ("dag", 3) => AxiomSpec::SourceSinkDag {
                edge,
                source: opt(args[1]),
                sink: opt(args[2]),
            },
            ("connected", 1) => AxiomSpec::Connected { edge },
            ("forest", 1) => AxiomSpec::Forest { edge },
            ("tree", 1) => AxiomSpec::Tree { edge },
            ("directed_tree", 2) if args[1] != "_" => AxiomSpec::DirectedTree {
                edge,
                root: args[1].to_string(),
            },
            ("directed_forest", 1) => AxiomSpec::DirectedForest { edge },
            _ => return Err(err("unknown axiom or wrong number of arguments")),
        };
        Ok(spec)
    }

    pub fn edge(&self) -> &str {
        match self {
            AxiomSpec::Dag { edge }
            | AxiomSpec::Connected { edge }
            | AxiomSpec::Forest { edge }
            | AxiomSpec::Tree { edge }
            | AxiomSpec::DirectedTree { edge, .. }
            | AxiomSpec::DirectedForest { edge }
            | AxiomSpec::SourceSinkDag { edge, .. } => edge,
        }
    }

    /// Unary predicates the axiom refers to, with their roles.
    pub fn unary_roles(&self) -> Vec<(Role, &str)> {
        match self {
            AxiomSpec::DirectedTree { root, .. } => vec![(Role::Root, root)],
            AxiomSpec::SourceSinkDag { source, sink, .. } => source
                .iter()
                .map(|s| (Role::Source, s.as_str()))
                .chain(sink.iter().map(|s| (Role::Sink, s.as_str())))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Whether the edge relation is read as an undirected graph.
    pub fn is_undirected(&self) -> bool {
        matches!(
            self,
            AxiomSpec::Connected { .. } | AxiomSpec::Forest { .. } | AxiomSpec::Tree { .. }
        )
    }

    /// Checks arities against `sig` and records the distinguished roles.
    pub fn bind(&self, sig: &mut Signature) -> Result<()> {
        sig.set_distinguished(Role::Edge, self.edge())?;
        for (role, p) in self.unary_roles() {
            sig.set_distinguished(role, p)?;
        }
        Ok(())
    }
}

impl fmt::Display for AxiomSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomSpec::Dag { edge } => write!(f, "dag({edge})"),
            AxiomSpec::Connected { edge } => write!(f, "connected({edge})"),
            AxiomSpec::Forest { edge } => write!(f, "forest({edge})"),
            AxiomSpec::Tree { edge } => write!(f, "tree({edge})"),
            AxiomSpec::DirectedTree { edge, root } => write!(f, "directed_tree({edge}, {root})"),
            AxiomSpec::DirectedForest { edge } => write!(f, "directed_forest({edge})"),
            AxiomSpec::SourceSinkDag { edge, source, sink } => {
                let s = source.as_deref().unwrap_or("_");
                let t = sink.as_deref().unwrap_or("_");
                write!(f, "dag({edge}, {s}, {t})")
            }
        }
    }
}

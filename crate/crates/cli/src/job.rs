use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Args;
use serde::Deserialize;
use wfomc_core::axiom::AxiomSpec;
use wfomc_core::constraint::CardinalityConstraint;
use wfomc_core::oracle::enumerate_weighted;
use wfomc_core::poly::{parse_rational, Rational, WeightFunction};
use wfomc_core::problem::Problem;

use crate::output::Format;
use crate::CliError;

/// Flags describing a counting job.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    /// Signature declaration, e.g. "R/2, A/1".
    #[arg(long)]
    pub sig: Option<String>,
    /// Sentence text, e.g. "forall x y. ~R(x,x)".
    #[arg(long, conflicts_with = "file")]
    pub formula: Option<String>,
    /// File holding the sentence.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Graph axiom such as dag(R), connected(R), tree(R),
    /// directed_tree(R, Root), directed_forest(R) or dag(R, Src, Sink).
    #[arg(long = "axiom")]
    pub axioms: Vec<String>,
    /// Cardinality constraint such as "|R| = 2*n - 2".
    #[arg(long = "card")]
    pub cards: Vec<String>,
    /// Weights of a predicate: PRED W WBAR, each a rational like 3/2.
    #[arg(long = "weight", num_args = 3, value_names = ["PRED", "W", "WBAR"])]
    pub weights: Vec<String>,
    /// TOML job file; its values win over conflicting flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Wall-clock limit in seconds for the whole command.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Omit wall-clock timings so that output is byte-identical across runs.
    #[arg(long)]
    pub no_timing: bool,
}

/// The TOML form of a job.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub sig: Option<String>,
    pub formula: Option<String>,
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub axioms: Vec<String>,
    #[serde(default)]
    pub cards: Vec<String>,
    #[serde(default)]
    pub weights: Vec<[String; 3]>,
    /// Weights used only by the brute-force side of `oracle`; lets a
    /// fixture check that disagreements are reported.
    #[serde(default)]
    pub oracle_weights: Vec<[String; 3]>,
    pub n: Option<usize>,
    pub range: Option<String>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub budget: Option<f64>,
}

/// A fully resolved job.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub sig: String,
    pub sentence: String,
    pub axioms: Vec<String>,
    pub cards: Vec<String>,
    pub weights: Vec<[String; 3]>,
    pub oracle_weights: Vec<[String; 3]>,
    pub format: Format,
    pub budget: Option<Duration>,
    pub timing: bool,
}

/// Settings that only some subcommands use.
#[derive(Debug, Clone, Default)]
pub struct Extra {
    pub n: Option<usize>,
    pub range: Option<String>,
    pub jobs: Option<usize>,
}

fn merge<T: PartialEq + std::fmt::Debug>(name: &str, flag: Option<T>, config: Option<T>) -> Option<T> {
    match (flag, config) {
        (Some(f), Some(c)) => {
            if f != c {
                log::warn!("config value for `{name}` overrides the command-line flag");
            }
            Some(c)
        }
        (f, c) => c.or(f),
    }
}

fn merge_list<T: PartialEq>(name: &str, flag: Vec<T>, config: Vec<T>) -> Vec<T> {
    if config.is_empty() {
        return flag;
    }
    if !flag.is_empty() && flag != config {
        log::warn!("config value for `{name}` overrides the command-line flag");
    }
    config
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

impl JobArgs {
    /// Merges flags with the optional config file.
    pub fn resolve(self, extra: Extra) -> Result<(JobSpec, Extra), CliError> {
        let config = match &self.config {
            Some(p) => {
                toml::from_str::<Config>(&read(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => Config::default(),
        };
        let flag_weights: Vec<[String; 3]> = self
            .weights
            .chunks(3)
            .map(|c| [c[0].clone(), c[1].clone(), c[2].clone()])
            .collect();
        let sig = merge("sig", self.sig, config.sig).unwrap_or_default();
        let formula = merge("formula", self.formula, config.formula);
        let file = merge("file", self.file, config.file);
        let sentence = match (formula, file) {
            (Some(f), _) => f,
            (None, Some(p)) => read(&p)?,
            (None, None) => String::new(),
        };
        let budget = merge("budget", self.budget, config.budget)
            .map(|s| Duration::try_from_secs_f64(s).map_err(|_| CliError::Usage(format!("invalid budget `{s}`"))))
            .transpose()?;
        let spec = JobSpec {
            sig,
            sentence,
            axioms: merge_list("axioms", self.axioms, config.axioms),
            cards: merge_list("cards", self.cards, config.cards),
            weights: merge_list("weights", flag_weights, config.weights),
            oracle_weights: config.oracle_weights,
            format: merge("format", self.format, config.format).unwrap_or(Format::Json),
            budget,
            timing: !self.no_timing,
        };
        let extra = Extra {
            n: merge("n", extra.n, config.n),
            range: merge("range", extra.range, config.range),
            jobs: merge("jobs", extra.jobs, config.jobs),
        };
        Ok((spec, extra))
    }
}

pub fn weight_function(entries: &[[String; 3]]) -> Result<WeightFunction, CliError> {
    let mut wf = WeightFunction::unit();
    for [p, w, wbar] in entries {
        wf.set(p, parse_rational(w)?, parse_rational(wbar)?);
    }
    Ok(wf)
}

impl JobSpec {
    pub fn problem(&self) -> Result<Problem, CliError> {
        let mut p = Problem::parse(&self.sig, &self.sentence)?.with_weights(weight_function(&self.weights)?);
        for a in &self.axioms {
            p = p.with_axiom(AxiomSpec::parse(a)?);
        }
        for c in &self.cards {
            p = p.with_constraint(CardinalityConstraint::parse(c)?);
        }
        p.validate()?;
        Ok(p)
    }

    /// Brute-force count, with the oracle-only weight overrides applied.
    pub fn oracle(&self, n: usize) -> Result<Rational, CliError> {
        let p = self.problem()?;
        let mut wf = p.weights.clone();
        for [name, w, wbar] in &self.oracle_weights {
            wf.set(name, parse_rational(w)?, parse_rational(wbar)?);
        }
        Ok(enumerate_weighted(
            &p.signature,
            &p.sentence,
            &p.axioms,
            &p.constraints,
            n,
            &wf,
        )?)
    }
}

/// `lo..hi` (inclusive) or a single number.
pub fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("invalid range `{text}`, expected LO..HI"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (text, text),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

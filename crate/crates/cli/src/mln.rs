use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Subcommand};
use wfomc_core::mln::{presets, Hard, MlnModel};
use wfomc_core::numeric::{to_decimal, Budget};
use wfomc_core::problem::SolveOptions;

use crate::output::{single, table, Format, Record};
use crate::CliError;

/// Decimal places in the rendered probabilities.
const PLACES: usize = 6;

#[derive(Debug, Subcommand)]
pub enum MlnCommand {
    /// Partition function of the model.
    Partition {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Probability of a query given the model.
    Query {
        #[command(flatten)]
        model: ModelArgs,
        /// A sentence, axiom or cardinality constraint, e.g. "connected(F)".
        #[arg(long)]
        query: String,
    },
    /// Distribution of the number of true atoms of a predicate.
    Dist {
        #[command(flatten)]
        model: ModelArgs,
        /// Predicate whose atom count is reported.
        #[arg(long)]
        stat: String,
        /// Divide every value, e.g. 2 to count undirected edges.
        #[arg(long, default_value_t = 1)]
        divide: u64,
    },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file with `sig:`, `weight : formula` and `hard:` lines.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    file: Option<PathBuf>,
    /// Built-in model: smokers-{free,connected,card,forest} or
    /// edges-{directed,dag,dag-approx,undirected,connected,connected-approx,
    /// connected-card,forest,forest-card}.
    #[arg(long)]
    preset: Option<String>,
    /// Domain size.
    #[arg(short = 'n', long = "n")]
    n: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Omit wall-clock timings.
    #[arg(long)]
    no_timing: bool,
}

impl ModelArgs {
    fn model(&self) -> Result<MlnModel, CliError> {
        if let Some(p) = &self.file {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            return Ok(MlnModel::parse(&text)?);
        }
        let name = self.preset.as_deref().unwrap_or_default();
        let model = if let Some(v) = name.strip_prefix("smokers-") {
            presets::smokers(
                v,
                wfomc_core::poly::int(1),
                presets::exp_minus_one(),
                presets::exp_three(),
            )
        } else if let Some(v) = name.strip_prefix("edges-") {
            presets::edges(v, presets::exp_minus_one())
        } else {
            return Err(CliError::Usage(format!("unknown preset `{name}`")));
        };
        model.map_err(|e| match e {
            wfomc_core::Error::Unsupported(m) => CliError::Usage(m),
            other => other.into(),
        })
    }

    fn options(&self) -> Result<SolveOptions, CliError> {
        let budget = match self.budget {
            Some(s) => Budget::within(
                Duration::try_from_secs_f64(s).map_err(|_| CliError::Usage(format!("invalid budget `{s}`")))?,
            ),
            None => Budget::unlimited(),
        };
        Ok(SolveOptions {
            budget,
            ..SolveOptions::default()
        })
    }

    fn timed(&self, r: Record, start: Instant) -> Record {
        if self.no_timing {
            r
        } else {
            r.int("wall_time_ms", start.elapsed().as_millis() as u64)
        }
    }
}

pub fn run(command: MlnCommand) -> Result<String, CliError> {
    let start = Instant::now();
    match command {
        MlnCommand::Partition { model } => {
            let z = model.model()?.partition_with(model.n, &model.options()?)?;
            let r = Record::new()
                .int("n", model.n as u64)
                .text("partition", &z)
                .text("decimal", to_decimal(&z, PLACES));
            Ok(single(&model.timed(r, start), model.format))
        }
        MlnCommand::Query { model, query } => {
            let m = model.model()?;
            let h = Hard::parse(&query, &m.signature)?;
            let p = m.query_probability(&h, model.n)?;
            let r = Record::new()
                .int("n", model.n as u64)
                .text("query", &query)
                .text("probability", &p)
                .text("decimal", to_decimal(&p, PLACES));
            Ok(single(&model.timed(r, start), model.format))
        }
        MlnCommand::Dist { model, stat, divide } => {
            if divide == 0 {
                return Err(CliError::Usage("--divide must be positive".into()));
            }
            let d = model
                .model()?
                .statistic_distribution_with(&stat, model.n, &model.options()?)?
                .divided(divide)
                .map_err(|e| CliError::Usage(format!("--divide {divide}: {e}")))?;
            let rows: Vec<Record> = d
                .rows(PLACES)
                .into_iter()
                .map(|(v, p, dec)| {
                    Record::new()
                        .int("value", v)
                        .text("probability", p)
                        .text("decimal", dec)
                })
                .collect();
            if !model.no_timing {
                log::info!("distribution computed in {} ms", start.elapsed().as_millis());
            }
            Ok(table(&rows, model.format))
        }
    }
}

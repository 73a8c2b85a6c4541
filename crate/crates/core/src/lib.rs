pub mod axiom;
pub mod constraint;
pub mod error;
pub mod fo2;
pub mod graph;
pub mod logic;
pub mod mln;
pub mod numeric;
pub mod oracle;
pub mod poly;
pub mod problem;
pub mod reductions;

pub use error::{Error, Result};

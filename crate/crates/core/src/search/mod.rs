//! Feasibility of a design against every condition at once, and a
//! derivative-free search for feasible or margin-optimal designs.

mod feasibility;
mod optimize;
mod space;

use thiserror::Error;

use crate::config::{ConfigError, SystemConfig, Violation};
use crate::options::AnalysisOptions;
use crate::stability::balance_lower_power;

pub use feasibility::{
    constraint_ids, feasibility, Constraint, ConstraintCategory, FeasibilityReport, MARGIN_CAP,
};
pub use optimize::{optimize, write_trace_csv, Objective, OptimizeResult, Phase, Score, TraceRow};
pub use space::{
    parse_search_space, Parameter, SearchSpace, DEFAULT_ITERATIONS, DEFAULT_SAMPLES, DEFAULT_SEED,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("configuration is not admissible: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidConfig(Vec<Violation>),
    #[error("search space: {0}")]
    Space(ConfigError),
}

/// `config` after the adjustments requested in `options` (currently the
/// optional force-balance solve).
pub fn prepare(config: &SystemConfig, options: &AnalysisOptions) -> SystemConfig {
    if options.solve_balance {
        balance_lower_power(config)
    } else {
        config.clone()
    }
}

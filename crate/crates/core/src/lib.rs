//! Design analysis for a mirror levitated between two vertical Fabry-Pérot
//! cavities: optical state of each cavity, mechanical stability of the
//! levitated mirror, the displacement-noise budget against the standard
//! quantum limit, and a constrained search over the design space.

pub mod config;
pub mod constants;
pub mod noise;
pub mod optics;
pub mod options;
pub mod search;
pub mod stability;
pub mod stack;

mod error;

pub use config::{SystemConfig, Side};
pub use error::Error;
pub use options::{AnalysisOptions, CoatingFormula, RocConvention};

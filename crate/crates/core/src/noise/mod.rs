//! Displacement-noise budget of the levitated mirror against the standard
//! quantum limit.
//!
//! All spectra are single-sided displacement PSDs in m²/Hz on a
//! [`FrequencyGrid`] in Hz; CSV export converts them to ASDs.

mod budget;
mod sources;
mod spectrum;

use thiserror::Error;

use crate::optics::OpticsError;
use crate::stability::StabilityError;

pub use budget::{total_budget, BudgetResult, FsqlSummary, NoiseModel};
pub use sources::{
    brownian_noise, brownian_sql_crossing, f_sql_approx, f_sql_free_mass, gas_damping_rate,
    gas_thermal_noise, laser_angular_frequency, laser_frequency_asd, laser_frequency_noise,
    laser_intensity_noise, quantum_noise, required_rin, seismic_asd_at, seismic_noise, sql_psd,
    sql_psd_at, BrownianCoefficients, BrownianSpectra, QuantumModel,
};
pub use spectrum::{write_asd_csv, FrequencyGrid, NoiseSource, NoiseSpectrum, Spacing};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("curves do not intersect between {f_min:.6e} Hz and {f_max:.6e} Hz")]
    NoIntersection { f_min: f64, f_max: f64 },
    #[error("{kind} PSD is {value} at {frequency:.6e} Hz")]
    InvalidSpectrum {
        kind: NoiseSource,
        frequency: f64,
        value: f64,
    },
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

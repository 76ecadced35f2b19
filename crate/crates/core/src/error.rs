use thiserror::Error;

use crate::config::ConfigError;
use crate::noise::NoiseError;
use crate::optics::OpticsError;
use crate::search::SearchError;
use crate::stability::StabilityError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

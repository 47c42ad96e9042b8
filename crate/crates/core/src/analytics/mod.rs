//! Benchmark analytics: circuit feature vectors, PCA, the size of the
//! Trojan placement space and the hide-and-seek game simulator.

mod features;
mod game;
mod pca;
mod space;
mod svg;

use thiserror::Error;

pub use features::{extract_features, FeatureVector, FEATURE_DIM, FEATURE_NAMES, FEATURE_VERSION};
pub use game::{expected_game_length, seek_simulate, GameStats, Strategy};
pub use pca::{pca_fit, pca_project, pca_reconstruct, PcaModel};
pub use space::{binomial, ht_space_size, StrategyProfile};
pub use svg::{scatter_svg, ScatterPoint};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("{components} components requested but at most {max} are available")]
    TooManyComponents { components: usize, max: usize },
    #[error("row {row} has {got} columns, expected {expected}")]
    Dimension { row: usize, expected: usize, got: usize },
    #[error("row {row} contains a non-finite value")]
    NonFinite { row: usize },
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("invalid game: {0}")]
    Game(String),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
}

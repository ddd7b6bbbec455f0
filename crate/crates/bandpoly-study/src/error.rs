use thiserror::Error;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Model {
        stage: &'static str,
        #[source]
        source: bandpoly::Error,
    },
    #[error("need at least 8 points above the floor, have {have}")]
    InsufficientData { have: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, StudyError>;

/// Tags a core error with the stage it came from.
pub(crate) trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> Stage<T> for bandpoly::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| StudyError::Model { stage, source })
    }
}

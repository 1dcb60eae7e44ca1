use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("term {0} is missing from the target basis")]
    MissingTerm(String),

    #[error("wrong family for this operation: {0}")]
    WrongFamily(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("chain map check failed at source basis element {index}: {graph}")]
    ChainMap { index: usize, graph: String },

    #[error("differential does not square to zero between degrees {0} and {1}")]
    NotAComplex(i64, i64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

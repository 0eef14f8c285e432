use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prospect: {0}")]
    InvalidProspect(String),

    #[error("invalid prospect theory parameters: {0}")]
    InvalidParams(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("invalid beliefs: {0}")]
    InvalidBeliefs(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("box collapsed to zero area after clamping")]
    DegenerateBox,
    #[error("netpbm parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("size error: {0}")]
    Size(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("could not find an object to edit in prompt {0:?}")]
    UnparseablePrompt(String),
    #[error("no frame contains a detection for {0:?}; supply a box with an override or check the prompt")]
    NoTargetFound(String),
    #[error("scene spec error: {0}")]
    Scene(String),
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Client(#[from] ClientError),
}

/// Failures reported by detector and attribute-scoring backends.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClientError {
    #[error("service unavailable: {0}")]
    Unavailable(String),
    #[error("protocol error: {0}")]
    Protocol(String),
}

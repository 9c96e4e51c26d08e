//! File formats, service clients and command implementations around
//! [`anchorframe_core`].

pub mod clients;
pub mod commands;
pub mod config;
pub mod error;
pub mod frames;
pub mod output;
pub mod scene;
pub mod tensor;

pub use config::CliConfig;
pub use error::{AppError, Result};

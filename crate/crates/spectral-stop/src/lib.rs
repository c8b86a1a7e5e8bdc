//! File formats, reference solutions and the command-line front end for
//! `spectral-stop-core`.

pub mod blocks;
pub mod cli;
pub mod edgelist;
pub mod error;
pub mod oracle;
pub mod presets;
pub mod records;

pub use error::{AppError, AppResult};

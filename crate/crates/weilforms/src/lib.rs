//! File formats, the density cache, a rayon executor and the command-line
//! front end for `weilforms-core`.

pub mod cli;
pub mod error;
pub mod format;
pub mod par;
pub mod store;

pub use error::CliError;

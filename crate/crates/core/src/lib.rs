//! Accent restoration with decision lists over collocational evidence.

pub mod corpus;
pub mod decision_list;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod model_file;
pub mod restorer;
pub mod synth;
pub mod text;
pub mod train;

pub use error::{Error, Result};

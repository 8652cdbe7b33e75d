//! Model files, reports and the command-line front end for `albtower-core`.

pub mod model_file;
pub mod report;
pub mod source;

pub use model_file::{LocusFile, ModelFile, SCHEMA_VERSION};
pub use source::{parse_builtin, Loaded};

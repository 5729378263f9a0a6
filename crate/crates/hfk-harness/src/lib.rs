//! Driver layer for `hfk-core`: runs, reports, verification, golden tables and batches.

pub mod batch;
pub mod error;
pub mod golden;
pub mod report;
pub mod run;
pub mod simplify;
pub mod verify;

pub use error::HarnessError;
pub use report::KnotReport;
pub use run::{run, KnotRun, RunOptions};

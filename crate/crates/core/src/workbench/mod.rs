//! File ingestion, configuration, reports and the command dispatcher.

pub mod config;
pub mod ingest;
pub mod report;
pub mod run;

pub use config::{ModelConfig, StatEntry};
pub use ingest::{load_dataset, read_edges, read_nodes, write_dataset, Dataset, DatasetPaths, IngestSummary};
pub use report::{render_fit_report, stars, FitReport};
pub use run::{run, run_to_exit, Mode, RunConfig, RunOutcome, RunStatus, WorkbenchError};

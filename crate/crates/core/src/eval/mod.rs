//! Answer extraction, scoring and report aggregation.

pub mod extract;
pub mod report;
pub mod score;

pub use extract::{extract_answer, extract_with, ExtractHints, ExtractionFailed};
pub use report::{aggregate_report, emit_report, CellStats, EvalReport, ReportFormat, RunMeta};
pub use score::{backend_failure, score_instance, score_response, EvalRecord, FailureKind};

//! Ingestion, orchestration, caching and reporting.

mod analysis;
mod cache;
mod records;
mod report;
mod scan;

pub use analysis::{
    analyze_pair, local_table, AnalysisConfig, ConfigEcho, CurveSection, InvariantSummary, LocalRow, Outcome,
    PairReport, Verdicts, SCHEMA_VERSION,
};
pub use cache::{DiskCache, CACHE_DIR_ENV, TOOL_VERSION};
pub use records::{
    bundled_records, find_record, parse_curve_records, parse_curve_records_str, CurveRecord, Provenance,
    BUNDLED_CURVES,
};
pub use report::{emit_report, parse_report, ReportFormat};
pub use scan::{scan, ScanCandidate};

//! Differential code coverage analysis.
//!
//! `covdiff` combines two coverage snapshots (baseline and current), the
//! unified diff between the two source revisions, and per-line edit history
//! to classify every coverpoint into one of twelve differential categories —
//! answering "what changed about coverage" rather than "what is the
//! percentage". Untested *new* code (UNC) and *lost* coverage (LBC) surface
//! even when the overall percentage is unchanged, which makes the category
//! totals suitable as a CI ratchet: `UNC+UIC+LBC == 0` never lets coverage
//! silently regress.
//!
//! The pieces compose as a pipeline, each usable on its own:
//!
//! - [`info`]: parse and write LCOV `.info` trace files ([`model::CoverageSnapshot`])
//! - [`diff`]: parse unified diffs into per-file line maps ([`diff::LineMap`])
//! - [`history`]: per-line owner and last-edit time from blame output or a TSV
//! - [`exclude`]: drop coverpoints by path glob or in-source pragma region
//! - [`categorize`]: label every coverpoint with its differential category
//! - [`binning`]: group categorized points by edit age and owner
//! - [`gate`]: evaluate pass/fail criteria over the category totals
//! - [`report`]: text, JSON, and static-HTML reports from one document
//! - [`pipeline`]: the end-to-end run used by the `covdiff` binary
//!
//! Run `cargo run --example categorize_changes` (or any other example) for a
//! self-contained walkthrough of each capability.

pub mod binning;
pub mod categorize;
pub mod diff;
pub mod exclude;
pub mod gate;
pub mod history;
pub mod info;
pub mod model;
pub mod pipeline;
pub mod report;

pub use binning::{BinnedSummary, DateBinSpec, OwnerMode, OwnerRow, assign_date_bin, bin_file, owner_table};
pub use categorize::{
    CategorizedFile, CategorizedPoint, Revision, categorize_file, categorize_no_baseline,
    categorize_snapshot,
};
pub use diff::{FileDiff, LineMap, build_line_map, parse_unified_diff};
pub use exclude::{ExclusionConfig, ExclusionResult, apply_exclusions};
pub use gate::{GateCriteria, GateVerdict, evaluate_gate, parse_criteria};
pub use history::{AnnotationSet, LineAnnotation, age_days, parse_annotation_tsv, parse_porcelain_blame};
pub use info::{parse_info, serialize_info};
pub use model::{Category, CoverKind, CoverageSnapshot, Coverpoint, FileCoverage, merge_snapshots};
pub use pipeline::{AnnotationSource, Error, RunConfig, RunOutcome, RunStatus, TextTarget, run};
pub use report::{ReportDocument, emit_html, emit_machine, emit_text};

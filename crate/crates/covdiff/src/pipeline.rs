//! End-to-end run orchestration: read inputs, apply exclusions, map and
//! categorize, bin, gate, emit.
//!
//! Degraded input modes follow from what is supplied: without annotations
//! the date/owner tables and gutter disappear; without a baseline everything
//! is GNC/UNC; with neither, only traditional coverage is reported.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{SystemTime, UNIX_EPOCH};

use thiserror::Error;

use crate::binning::{BinnedSummary, DateBinSpec, OwnerMode, bin_file, owner_table};
use crate::categorize::{CategorizeError, categorize_snapshot};
use crate::diff::{DiffError, FileDiff, parse_unified_diff, reconstruct_baseline_text};
use crate::exclude::{ExcludeError, ExclusionConfig, apply_exclusions};
use crate::gate::{ExcludedHit, GateCriteria, evaluate_gate};
use crate::history::{AnnotationSet, HistoryError, parse_annotation_tsv, parse_porcelain_blame};
use crate::info::{InfoError, parse_info};
use crate::model::{Category, CoverageSnapshot, FileCoverage, strip_path_prefix};
use crate::report::{
    DocumentInputs, ReportDocument, ReportMeta, build_document, emit_html, emit_machine, emit_text,
};

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Categorize(#[from] CategorizeError),
    #[error(transparent)]
    Exclude(#[from] ExcludeError),
    #[error("{0}")]
    Config(String),
}

/// Where per-line history comes from.
#[derive(Debug, Clone)]
pub enum AnnotationSource {
    /// Annotation TSV file (`path<TAB>line<TAB>owner<TAB>epoch`).
    Tsv(PathBuf),
    /// Command template run per source file; `{path}` is substituted. The
    /// command must print line-porcelain blame output.
    BlameCommand(String),
}

#[derive(Debug, Clone)]
pub enum TextTarget {
    Stdout,
    File(PathBuf),
}

/// Full configuration of one analysis run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub current_info: PathBuf,
    pub baseline_info: Option<PathBuf>,
    pub diff_file: Option<PathBuf>,
    pub annotations: Option<AnnotationSource>,
    pub date_bins: DateBinSpec,
    pub criteria: Option<GateCriteria>,
    /// Textual form of the criteria, echoed into reports.
    pub criteria_text: Option<String>,
    pub waive: bool,
    pub show_owners: Option<OwnerMode>,
    pub strip_prefix: Option<String>,
    pub exclusions: ExclusionConfig,
    pub source_root: Option<PathBuf>,
    /// Reference time (epoch seconds); wall clock when absent.
    pub reference_time: Option<i64>,
    pub text_out: Option<TextTarget>,
    pub json_out: Option<PathBuf>,
    pub html_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(current_info: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            current_info: current_info.into(),
            baseline_info: None,
            diff_file: None,
            annotations: None,
            date_bins: DateBinSpec::default(),
            criteria: None,
            criteria_text: None,
            waive: false,
            show_owners: None,
            strip_prefix: None,
            exclusions: ExclusionConfig::default(),
            source_root: None,
            reference_time: None,
            text_out: None,
            json_out: None,
            html_out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Passed,
    GateFailed,
}

impl RunStatus {
    /// CI exit code: 0 pass, 2 gate failure. Input and usage errors exit 1
    /// (the caller maps `Err` to that).
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Passed => 0,
            RunStatus::GateFailed => 2,
        }
    }
}

/// The document plus the run outcome, for callers that want to inspect the
/// results in memory.
#[derive(Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub document: ReportDocument,
    pub warnings: Vec<String>,
}

/// Executes the pipeline and writes the requested outputs.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, Error> {
    if cfg.text_out.is_none()
        && cfg.json_out.is_none()
        && cfg.html_out.is_none()
        && cfg.criteria.is_none()
    {
        return Err(Error::Config(
            "nothing to do: request an output (--text-out/--json-out/--html-out) or a gate (--fail-if)"
                .to_string(),
        ));
    }

    let now = match cfg.reference_time {
        Some(t) => t,
        None => SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0),
    };
    let mut warnings = Vec::new();

    let mut current = read_snapshot(&cfg.current_info, cfg.strip_prefix.as_deref())?;
    let mut baseline = cfg
        .baseline_info
        .as_deref()
        .map(|p| read_snapshot(p, cfg.strip_prefix.as_deref()))
        .transpose()?;

    let diffs = match cfg.diff_file.as_deref() {
        Some(path) => parse_unified_diff(&read_text(path)?)?,
        None => Vec::new(),
    };

    let annotations = match &cfg.annotations {
        Some(AnnotationSource::Tsv(path)) => Some(parse_annotation_tsv(&read_text(path)?)?),
        Some(AnnotationSource::BlameCommand(template)) => {
            Some(run_blame(template, &current, cfg.source_root.as_deref(), &mut warnings)?)
        }
        None => None,
    };
    let has_history = annotations.is_some();

    // exclusions: current files use on-disk sources, baseline files the
    // reconstruction of those sources through the diff
    let sources = load_sources(&current, baseline.as_ref(), cfg.source_root.as_deref());
    let mut excluded_hits: Vec<ExcludedHit> = Vec::new();
    apply_snapshot_exclusions(
        &mut current,
        &sources,
        &cfg.exclusions,
        Some(&mut excluded_hits),
        &mut warnings,
    )?;
    if let Some(base) = baseline.as_mut() {
        let base_sources = baseline_sources(base, &sources, &diffs);
        // baseline hits on excluded code predate this run and are not gate
        // violations
        apply_snapshot_exclusions(base, &base_sources, &cfg.exclusions, None, &mut warnings)?;
    }

    let categorized = categorize_snapshot(baseline.as_ref(), &current, &diffs)?;

    let summaries: Option<Vec<BinnedSummary>> = annotations.as_ref().map(|ann| {
        categorized
            .iter()
            .map(|cf| bin_file(cf, ann, None, &cfg.date_bins, now))
            .collect()
    });
    let owner_rows = match (cfg.show_owners, &summaries) {
        (Some(mode), Some(summaries)) => Some(owner_table(summaries, mode)),
        _ => None,
    };

    let verdict = cfg.criteria.as_ref().map(|criteria| {
        let mut totals: BTreeMap<Category, u64> = BTreeMap::new();
        for cf in &categorized {
            for (cat, n) in cf.category_totals() {
                *totals.entry(cat).or_insert(0) += n;
            }
        }
        evaluate_gate(&totals, &excluded_hits, criteria)
    });

    let meta = ReportMeta {
        schema_version: "1",
        current: cfg.current_info.display().to_string(),
        baseline: cfg.baseline_info.as_ref().map(|p| p.display().to_string()),
        diff: cfg.diff_file.as_ref().map(|p| p.display().to_string()),
        annotations: cfg.annotations.as_ref().map(|a| match a {
            AnnotationSource::Tsv(p) => p.display().to_string(),
            AnnotationSource::BlameCommand(c) => format!("blame: {c}"),
        }),
        reference_time: now,
        date_cutoffs: cfg.date_bins.cutoffs().to_vec(),
        bin_labels: cfg.date_bins.labels(),
        bin_edge_rule: "upper-inclusive",
        owner_source: "author",
        strip_prefix: cfg.strip_prefix.clone(),
        excludes: cfg.exclusions.globs().to_vec(),
        criteria: cfg.criteria_text.clone().or_else(|| {
            cfg.criteria.as_ref().map(|c| {
                c.constraints
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            })
        }),
        waive: cfg.waive,
        show_owners: cfg.show_owners.map(|m| {
            match m {
                OwnerMode::AllCode => "all",
                OwnerMode::UntestedOnly => "untested",
            }
            .to_string()
        }),
        has_baseline: baseline.is_some(),
        has_history,
    };

    let document = build_document(DocumentInputs {
        meta,
        categorized: &categorized,
        summaries: summaries.as_deref(),
        bin_spec: &cfg.date_bins,
        owner_rows,
        owner_mode: cfg.show_owners,
        verdict: verdict.as_ref(),
        annotations: annotations.as_ref(),
        sources: &sources,
        now,
    });

    if let Some(target) = &cfg.text_out {
        let text = emit_text(&document);
        match target {
            TextTarget::Stdout => {
                let mut stdout = std::io::stdout();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })?;
            }
            TextTarget::File(path) => write_file(path, text.as_bytes())?,
        }
    }
    if let Some(path) = &cfg.json_out {
        write_file(path, emit_machine(&document).as_bytes())?;
    }
    if let Some(dir) = &cfg.html_out {
        emit_html(&document, dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    }

    let status = match &verdict {
        Some(v) if !v.passed && !cfg.waive => RunStatus::GateFailed,
        _ => RunStatus::Passed,
    };
    Ok(RunOutcome { status, document, warnings })
}

fn read_text(path: &Path) -> Result<String, Error> {
    let bytes =
        fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        }
    }
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn read_snapshot(path: &Path, strip_prefix: Option<&str>) -> Result<CoverageSnapshot, Error> {
    let bytes =
        fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let snapshot = parse_info(&bytes)?;
    Ok(match strip_prefix {
        Some(prefix) => {
            let mut stripped = CoverageSnapshot::new(snapshot.label.clone());
            for (path, fc) in snapshot.files() {
                let new_path = strip_path_prefix(path, prefix);
                let mut moved = FileCoverage::new(new_path);
                for p in fc.points() {
                    moved.insert(p.clone());
                }
                stripped.add_file(moved);
            }
            stripped
        }
        None => snapshot,
    })
}

/// Loads on-disk source text for every path either snapshot mentions.
/// Baseline-only files whose text is unchanged still exist in the tree, so
/// they are scanned for pragmas too.
fn load_sources(
    current: &CoverageSnapshot,
    baseline: Option<&CoverageSnapshot>,
    source_root: Option<&Path>,
) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    let Some(root) = source_root else {
        return out;
    };
    let baseline_paths = baseline.map(|b| b.files().keys()).into_iter().flatten();
    for path in current.files().keys().chain(baseline_paths) {
        if out.contains_key(path) {
            continue;
        }
        let candidate = root.join(path.trim_start_matches('/'));
        if let Ok(bytes) = fs::read(&candidate) {
            let text = String::from_utf8_lossy(&bytes);
            out.insert(path.clone(), text.lines().map(|l| l.to_string()).collect());
        }
    }
    out
}

/// Derives baseline source text per baseline path by running the diff
/// backwards over the current text.
fn baseline_sources(
    baseline: &CoverageSnapshot,
    cur_sources: &BTreeMap<String, Vec<String>>,
    diffs: &[FileDiff],
) -> BTreeMap<String, Vec<String>> {
    let mut by_base: BTreeMap<&str, &FileDiff> = BTreeMap::new();
    for d in diffs {
        if let Some(p) = d.base_path.as_deref() {
            by_base.entry(p).or_insert(d);
        }
    }
    let mut out = BTreeMap::new();
    for path in baseline.files().keys() {
        match by_base.get(path.as_str()) {
            Some(d) => {
                let empty = Vec::new();
                let cur_lines = d
                    .current_path
                    .as_deref()
                    .and_then(|p| cur_sources.get(p))
                    .unwrap_or(&empty);
                if !cur_lines.is_empty() || d.is_deleted() {
                    out.insert(path.clone(), reconstruct_baseline_text(cur_lines, d));
                }
            }
            None => {
                // unchanged file: baseline text equals current text
                if let Some(lines) = cur_sources.get(path) {
                    out.insert(path.clone(), lines.clone());
                }
            }
        }
    }
    out
}

fn apply_snapshot_exclusions(
    snapshot: &mut CoverageSnapshot,
    sources: &BTreeMap<String, Vec<String>>,
    cfg: &ExclusionConfig,
    mut gate_hits: Option<&mut Vec<ExcludedHit>>,
    warnings: &mut Vec<String>,
) -> Result<(), Error> {
    let paths: Vec<String> = snapshot.files().keys().cloned().collect();
    for path in paths {
        let fc = snapshot.file(&path).expect("listed above").clone();
        let result = apply_exclusions(&fc, sources.get(&path).map(|v| v.as_slice()), cfg)?;
        for w in &result.warnings {
            warnings.push(format!("{path}: {w}"));
        }
        if let Some(hits) = gate_hits.as_deref_mut() {
            for (line, hit_count) in result.pragma_hits() {
                hits.push(ExcludedHit { path: path.clone(), line, hit_count });
            }
        }
        if cfg.is_path_excluded(&path) {
            snapshot.remove_file(&path);
        } else {
            snapshot.replace_file(result.retained);
        }
    }
    Ok(())
}

/// Runs the blame command template once per file of the snapshot, feeding
/// each output through the porcelain parser. Failures degrade that file to
/// unannotated with a warning instead of failing the run.
fn run_blame(
    template: &str,
    snapshot: &CoverageSnapshot,
    source_root: Option<&Path>,
    warnings: &mut Vec<String>,
) -> Result<AnnotationSet, Error> {
    let tokens: Vec<&str> = template.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(Error::Config("empty blame command template".to_string()));
    }
    let mut set = AnnotationSet::new();
    for path in snapshot.files().keys() {
        let args: Vec<String> =
            tokens.iter().map(|t| t.replace("{path}", path)).collect();
        let mut command = Command::new(&args[0]);
        command.args(&args[1..]);
        if let Some(root) = source_root {
            command.current_dir(root);
        }
        let output = match command.output() {
            Ok(o) => o,
            Err(err) => {
                warnings.push(format!("blame failed for {path}: {err}"));
                continue;
            }
        };
        if !output.status.success() {
            warnings.push(format!("blame failed for {path}: {}", output.status));
            continue;
        }
        let text = String::from_utf8_lossy(&output.stdout);
        match parse_porcelain_blame(&text, path) {
            Ok(annotations) => {
                set.insert_file(path.clone(), annotations)?;
            }
            Err(err) => warnings.push(format!("blame output for {path} unusable: {err}")),
        }
    }
    Ok(set)
}

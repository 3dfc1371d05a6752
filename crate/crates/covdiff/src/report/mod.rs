//! Report document assembly and the three emitters (text, JSON, HTML).
//!
//! A [`ReportDocument`] is a fully materialized, deterministic view of one
//! analysis run: per-file, per-directory, and project tallies, date-bin and
//! owner tables when history is available, the gate verdict, and per-line
//! listing data for the HTML pages. Every emitter reads only this document,
//! so all output formats agree by construction.

mod html;
mod machine;
mod text;

pub use html::emit_html;
pub use machine::emit_machine;
pub use text::emit_text;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::binning::{BinnedSummary, DateBin, DateBinSpec, OwnerMode, OwnerRow};
use crate::categorize::{CategorizedFile, Revision};
use crate::gate::{GateVerdict, Violation};
use crate::history::AnnotationSet;
use crate::model::{Category, CoverKind, format_percent};

/// Echo of the run configuration plus fixed schema facts.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub schema_version: &'static str,
    pub current: String,
    pub baseline: Option<String>,
    pub diff: Option<String>,
    pub annotations: Option<String>,
    pub reference_time: i64,
    pub date_cutoffs: Vec<f64>,
    pub bin_labels: Vec<String>,
    /// Day-bin boundary rule: an age equal to a cutoff belongs to the lower
    /// bin.
    pub bin_edge_rule: &'static str,
    /// Which VCS identity field owns a line.
    pub owner_source: &'static str,
    pub strip_prefix: Option<String>,
    pub excludes: Vec<String>,
    pub criteria: Option<String>,
    pub waive: bool,
    pub show_owners: Option<String>,
    pub has_baseline: bool,
    pub has_history: bool,
}

/// Per-kind tally: all twelve category counts plus current-revision
/// found/hit.
#[derive(Debug, Clone, Default, Serialize)]
pub struct KindBlock {
    pub found: u64,
    pub hit: u64,
    pub categories: BTreeMap<Category, u64>,
}

impl KindBlock {
    fn add_count(&mut self, category: Category, n: u64) {
        *self.categories.entry(category).or_insert(0) += n;
        if !category.is_baseline_only() {
            self.found += n;
            if matches!(category, Category::Cbc | Category::Gbc | Category::Gnc | Category::Gic) {
                self.hit += n;
            }
        }
    }

    fn absorb(&mut self, other: &KindBlock) {
        for (&cat, &n) in &other.categories {
            *self.categories.entry(cat).or_insert(0) += n;
        }
        self.found += other.found;
        self.hit += other.hit;
    }

    pub fn count(&self, category: Category) -> u64 {
        self.categories.get(&category).copied().unwrap_or(0)
    }

    pub fn percent(&self) -> String {
        format_percent(self.hit, self.found)
    }

    pub fn is_empty(&self) -> bool {
        self.found == 0 && self.categories.values().all(|&n| n == 0)
    }
}

fn full_category_map() -> BTreeMap<Category, u64> {
    Category::ALL.into_iter().map(|c| (c, 0)).collect()
}

fn new_kind_block() -> KindBlock {
    KindBlock { found: 0, hit: 0, categories: full_category_map() }
}

/// Date-bin tally: per category, one count per bin plus a trailing unknown
/// bin. The unknown column is meaningful only when some line had no
/// annotation.
#[derive(Debug, Clone, Serialize)]
pub struct BinTable {
    pub labels: Vec<String>,
    /// `rows[cat]` has `labels.len() + 1` entries; the last is the unknown
    /// bin.
    pub rows: BTreeMap<Category, Vec<u64>>,
    pub any_unknown: bool,
}

impl BinTable {
    fn from_summary(summary: &BinnedSummary, spec: &DateBinSpec) -> BinTable {
        let bin_count = spec.bin_count();
        let mut rows: BTreeMap<Category, Vec<u64>> = BTreeMap::new();
        let mut any_unknown = false;
        for (&(bin, category), &n) in summary.by_date() {
            let row = rows.entry(category).or_insert_with(|| vec![0; bin_count + 1]);
            match bin {
                DateBin::Bin(i) => row[i] += n,
                DateBin::Unknown => {
                    row[bin_count] += n;
                    any_unknown = true;
                }
            }
        }
        BinTable { labels: spec.labels(), rows, any_unknown }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column totals (length `labels.len() + 1`).
    pub fn totals(&self) -> Vec<u64> {
        let mut out = vec![0; self.labels.len() + 1];
        for row in self.rows.values() {
            for (i, n) in row.iter().enumerate() {
                out[i] += n;
            }
        }
        out
    }
}

/// One row of the per-file source listing (current revision).
#[derive(Debug, Clone)]
pub struct LineRow {
    pub line: u32,
    /// Highest-priority category among the points on this line.
    pub category: Category,
    /// Every point on the line: kind, category, key, hits.
    pub points: Vec<(CoverKind, Category, String, u64)>,
    /// Hit count of the line-kind point, when one exists.
    pub line_hits: Option<u64>,
    pub age_days: Option<f64>,
    pub owner: Option<String>,
}

/// A baseline-only point (deleted code): shown separately because its line
/// number refers to the baseline revision.
#[derive(Debug, Clone)]
pub struct BaselineRow {
    pub line: u32,
    pub category: Category,
    pub kind: CoverKind,
    pub key: String,
    pub hits: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileReport {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_path: Option<String>,
    pub lines: KindBlock,
    pub functions: KindBlock,
    pub branches: KindBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date_bins: Option<BinTable>,
    /// Listing data for the HTML emitter.
    #[serde(skip)]
    pub listing: Vec<LineRow>,
    #[serde(skip)]
    pub deleted_rows: Vec<BaselineRow>,
    #[serde(skip)]
    pub source: Option<Vec<String>>,
}

impl FileReport {
    pub fn kind_block(&self, kind: CoverKind) -> &KindBlock {
        match kind {
            CoverKind::Line => &self.lines,
            CoverKind::Function => &self.functions,
            CoverKind::Branch => &self.branches,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DirReport {
    pub path: String,
    pub lines: KindBlock,
    pub functions: KindBlock,
    pub branches: KindBlock,
    pub files: Vec<String>,
}

impl DirReport {
    pub fn kind_block(&self, kind: CoverKind) -> &KindBlock {
        match kind {
            CoverKind::Line => &self.lines,
            CoverKind::Function => &self.functions,
            CoverKind::Branch => &self.branches,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectSummary {
    pub lines: KindBlock,
    pub functions: KindBlock,
    pub branches: KindBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date_bins: Option<BinTable>,
}

impl ProjectSummary {
    pub fn kind_block(&self, kind: CoverKind) -> &KindBlock {
        match kind {
            CoverKind::Line => &self.lines,
            CoverKind::Function => &self.functions,
            CoverKind::Branch => &self.branches,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OwnerRowDoc {
    pub owner: String,
    pub untested: u64,
    pub counts: BTreeMap<Category, u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateDoc {
    pub criteria: String,
    pub passed: bool,
    pub waived: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub meta: ReportMeta,
    /// Overall outcome: true unless a gate was requested and failed without
    /// a waiver.
    pub passed: bool,
    pub project: ProjectSummary,
    pub directories: Vec<DirReport>,
    pub files: Vec<FileReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub owners: Option<Vec<OwnerRowDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateDoc>,
}

impl ReportDocument {
    /// Kinds that occur anywhere in the run, in canonical order. Lines are
    /// always reported.
    pub fn active_kinds(&self) -> Vec<CoverKind> {
        CoverKind::ALL
            .into_iter()
            .filter(|&k| k == CoverKind::Line || !self.project.kind_block(k).is_empty())
            .collect()
    }
}

/// Everything [`build_document`] needs from the pipeline.
pub struct DocumentInputs<'a> {
    pub meta: ReportMeta,
    pub categorized: &'a [CategorizedFile],
    /// Per-file binned summaries, parallel to `categorized`, when history is
    /// available.
    pub summaries: Option<&'a [BinnedSummary]>,
    pub bin_spec: &'a DateBinSpec,
    pub owner_rows: Option<Vec<OwnerRow>>,
    pub owner_mode: Option<OwnerMode>,
    pub verdict: Option<&'a GateVerdict>,
    pub annotations: Option<&'a AnnotationSet>,
    /// Current-revision source text per path, for HTML listings.
    pub sources: &'a BTreeMap<String, Vec<String>>,
    pub now: i64,
}

/// Assembles the report document. Pure: same inputs, same document.
pub fn build_document(inputs: DocumentInputs<'_>) -> ReportDocument {
    let DocumentInputs {
        meta,
        categorized,
        summaries,
        bin_spec,
        owner_rows,
        owner_mode: _,
        verdict,
        annotations,
        sources,
        now,
    } = inputs;

    let mut files = Vec::new();
    let mut dirs: BTreeMap<String, DirReport> = BTreeMap::new();
    let mut project = ProjectSummary {
        lines: new_kind_block(),
        functions: new_kind_block(),
        branches: new_kind_block(),
        date_bins: None,
    };
    let mut project_bins = BinnedSummary::default();

    for (idx, cf) in categorized.iter().enumerate() {
        let mut report = FileReport {
            path: cf.source_path.clone(),
            baseline_path: cf
                .baseline_path
                .clone()
                .filter(|b| *b != cf.source_path),
            lines: new_kind_block(),
            functions: new_kind_block(),
            branches: new_kind_block(),
            date_bins: None,
            listing: Vec::new(),
            deleted_rows: Vec::new(),
            source: sources.get(&cf.source_path).cloned(),
        };
        for kind in CoverKind::ALL {
            for cat in Category::ALL {
                let n = cf.count(kind, cat);
                if n > 0 {
                    match kind {
                        CoverKind::Line => report.lines.add_count(cat, n),
                        CoverKind::Function => report.functions.add_count(cat, n),
                        CoverKind::Branch => report.branches.add_count(cat, n),
                    }
                }
            }
        }
        if let Some(summaries) = summaries {
            let table = BinTable::from_summary(&summaries[idx], bin_spec);
            project_bins.absorb(&summaries[idx]);
            report.date_bins = Some(table);
        }
        build_listing(&mut report, cf, annotations, meta.has_history, now);

        project.lines.absorb(&report.lines);
        project.functions.absorb(&report.functions);
        project.branches.absorb(&report.branches);

        let dir = parent_dir(&report.path);
        let entry = dirs.entry(dir.clone()).or_insert_with(|| DirReport {
            path: dir,
            lines: new_kind_block(),
            functions: new_kind_block(),
            branches: new_kind_block(),
            files: Vec::new(),
        });
        entry.lines.absorb(&report.lines);
        entry.functions.absorb(&report.functions);
        entry.branches.absorb(&report.branches);
        entry.files.push(report.path.clone());

        files.push(report);
    }

    if summaries.is_some() {
        project.date_bins = Some(BinTable::from_summary(&project_bins, bin_spec));
    }

    let owners = owner_rows.map(|rows| {
        rows.into_iter()
            .map(|r| OwnerRowDoc {
                owner: r.owner.display_name().to_string(),
                untested: r.untested,
                counts: r.counts,
            })
            .collect()
    });

    let gate = verdict.map(|v| GateDoc {
        criteria: meta.criteria.clone().unwrap_or_default(),
        passed: v.passed,
        waived: meta.waive,
        violations: v.violations.clone(),
    });
    let passed = gate.as_ref().map(|g| g.passed || g.waived).unwrap_or(true);

    ReportDocument {
        meta,
        passed,
        project,
        directories: dirs.into_values().collect(),
        files,
        owners,
        gate,
    }
}

/// Directory of a normalized path ("" for root-level files).
pub fn parent_dir(path: &str) -> String {
    match path.rfind('/') {
        Some(i) => path[..i].to_string(),
        None => String::new(),
    }
}

fn build_listing(
    report: &mut FileReport,
    cf: &CategorizedFile,
    annotations: Option<&AnnotationSet>,
    has_history: bool,
    now: i64,
) {
    // group points by the current-revision line they display on
    let mut by_line: BTreeMap<u32, Vec<(CoverKind, Category, String, u64)>> = BTreeMap::new();
    for p in &cf.points {
        let display_line = match p.revision {
            Revision::Current => Some(p.point.line),
            // excluded-code points survive at their paired current line;
            // deleted points have no current line
            Revision::Baseline => p.mapped_line,
        };
        match display_line {
            Some(line) => {
                by_line.entry(line).or_default().push((
                    p.point.kind,
                    p.category,
                    p.point.key.clone(),
                    p.point.hit_count,
                ));
            }
            None => report.deleted_rows.push(BaselineRow {
                line: p.point.line,
                category: p.category,
                kind: p.point.kind,
                key: p.point.key.clone(),
                hits: p.point.hit_count,
            }),
        }
    }
    for (line, points) in by_line {
        let category = points.iter().map(|&(_, c, _, _)| c).min().expect("nonempty");
        let line_hits = points
            .iter()
            .find(|(k, _, _, _)| *k == CoverKind::Line)
            .map(|&(_, _, _, h)| h);
        let annotation = if has_history {
            annotations.and_then(|a| a.lookup(&cf.source_path, line))
        } else {
            None
        };
        report.listing.push(LineRow {
            line,
            category,
            points,
            line_hits,
            age_days: annotation.map(|a| ((now - a.edit_time) as f64 / 86_400.0).max(0.0)),
            owner: annotation.map(|a| a.owner.clone()),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::categorize::categorize_no_baseline;
    use crate::model::{Coverpoint, FileCoverage};

    fn meta() -> ReportMeta {
        ReportMeta {
            schema_version: "1",
            current: "cur.info".to_string(),
            baseline: None,
            diff: None,
            annotations: None,
            reference_time: 0,
            date_cutoffs: vec![7.0, 30.0, 180.0],
            bin_labels: DateBinSpec::default().labels(),
            bin_edge_rule: "upper-inclusive",
            owner_source: "author",
            strip_prefix: None,
            excludes: Vec::new(),
            criteria: None,
            waive: false,
            show_owners: None,
            has_baseline: false,
            has_history: false,
        }
    }

    #[test]
    fn document_totals_match_file_sums() {
        let a = categorize_no_baseline(&FileCoverage::from_points(
            "src/a.c",
            [Coverpoint::line(1, 1), Coverpoint::line(2, 0)],
        ));
        let b = categorize_no_baseline(&FileCoverage::from_points(
            "src/b.c",
            [Coverpoint::line(1, 1)],
        ));
        let spec = DateBinSpec::default();
        let doc = build_document(DocumentInputs {
            meta: meta(),
            categorized: &[a, b],
            summaries: None,
            bin_spec: &spec,
            owner_rows: None,
            owner_mode: None,
            verdict: None,
            annotations: None,
            sources: &BTreeMap::new(),
            now: 0,
        });
        assert_eq!(doc.project.lines.count(Category::Gnc), 2);
        assert_eq!(doc.project.lines.count(Category::Unc), 1);
        assert_eq!(doc.project.lines.found, 3);
        assert_eq!(doc.project.lines.hit, 2);
        assert_eq!(doc.directories.len(), 1);
        assert_eq!(doc.directories[0].path, "src");
        assert_eq!(doc.directories[0].lines.found, 3);
        assert!(doc.passed);
    }

    #[test]
    fn parent_dir_rules() {
        assert_eq!(parent_dir("src/a.c"), "src");
        assert_eq!(parent_dir("a/b/c.c"), "a/b");
        assert_eq!(parent_dir("top.c"), "");
    }

    #[test]
    fn listing_picks_highest_priority_category() {
        let fc = FileCoverage::from_points(
            "a.c",
            [Coverpoint::line(5, 1), Coverpoint::branch(5, "0", "0", 0)],
        );
        let cf = categorize_no_baseline(&fc);
        let spec = DateBinSpec::default();
        let doc = build_document(DocumentInputs {
            meta: meta(),
            categorized: std::slice::from_ref(&cf),
            summaries: None,
            bin_spec: &spec,
            owner_rows: None,
            owner_mode: None,
            verdict: None,
            annotations: None,
            sources: &BTreeMap::new(),
            now: 0,
        });
        let row = &doc.files[0].listing[0];
        // the unhit branch (UNC) outranks the hit line (GNC)
        assert_eq!(row.category, Category::Unc);
        assert_eq!(row.line_hits, Some(1));
        assert_eq!(row.points.len(), 2);
    }
}

//! Differential categorization: assigns each coverpoint of the current and
//! baseline snapshots of a file exactly one of the twelve categories.
//!
//! For a current coverpoint the questions are: is its line inserted or
//! paired, does the baseline have a matching coverpoint there, and is each
//! side hit? Baseline coverpoints not matched by a current one are classified
//! as deleted (their line is gone) or excluded (line survives but is no
//! longer code). Function and branch points match only when their keys are
//! equal too.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diff::{FileDiff, LineMap, build_line_map};
use crate::model::{Category, CoverKind, CoverageSnapshot, Coverpoint, FileCoverage};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CategorizeError {
    #[error("coverage and diff disagree for {path}: {revision} line {line} is outside the mapped range")]
    MapInconsistency {
        path: String,
        revision: &'static str,
        line: u32,
    },
}

/// Which snapshot a categorized point belongs to. Baseline points exist only
/// for the four gone-from-current categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Revision {
    Current,
    Baseline,
}

/// One coverpoint with its category. `mapped_line` is the counterpart line
/// in the other revision when the point's line is paired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorizedPoint {
    pub point: Coverpoint,
    pub category: Category,
    pub revision: Revision,
    pub mapped_line: Option<u32>,
}

/// All categorized points of one file plus the per-kind category tally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorizedFile {
    /// Current-revision path when the file exists in the current snapshot,
    /// otherwise the baseline path.
    pub source_path: String,
    /// Baseline-revision path (differs from `source_path` across renames).
    pub baseline_path: Option<String>,
    pub points: Vec<CategorizedPoint>,
    counts: BTreeMap<(CoverKind, Category), u64>,
}

impl CategorizedFile {
    fn new(source_path: String, baseline_path: Option<String>) -> CategorizedFile {
        CategorizedFile {
            source_path,
            baseline_path,
            points: Vec::new(),
            counts: BTreeMap::new(),
        }
    }

    fn push(&mut self, point: CategorizedPoint) {
        *self.counts.entry((point.point.kind, point.category)).or_insert(0) += 1;
        self.points.push(point);
    }

    fn finish(mut self) -> CategorizedFile {
        self.points.sort_by(|a, b| {
            (a.point.line, a.point.kind, &a.point.key, a.revision)
                .cmp(&(b.point.line, b.point.kind, &b.point.key, b.revision))
        });
        self
    }

    pub fn count(&self, kind: CoverKind, category: Category) -> u64 {
        self.counts.get(&(kind, category)).copied().unwrap_or(0)
    }

    /// Count of one category summed over all kinds.
    pub fn count_category(&self, category: Category) -> u64 {
        CoverKind::ALL.iter().map(|&k| self.count(k, category)).sum()
    }

    /// Category totals summed over kinds.
    pub fn category_totals(&self) -> BTreeMap<Category, u64> {
        let mut out = BTreeMap::new();
        for (&(_, cat), &n) in &self.counts {
            *out.entry(cat).or_insert(0) += n;
        }
        out
    }
}

fn table1(base_hit: bool, cur_hit: bool) -> Category {
    match (base_hit, cur_hit) {
        (true, true) => Category::Cbc,
        (true, false) => Category::Lbc,
        (false, true) => Category::Gbc,
        (false, false) => Category::Ubc,
    }
}

/// Categorizes one file against a line map. Either side may be absent (file
/// only exists in one snapshot).
pub fn categorize_file(
    base: Option<&FileCoverage>,
    cur: Option<&FileCoverage>,
    map: &LineMap,
) -> Result<CategorizedFile, CategorizeError> {
    let path = cur
        .map(|f| f.source_path.clone())
        .or_else(|| base.map(|f| f.source_path.clone()))
        .unwrap_or_default();
    let mut out = CategorizedFile::new(path.clone(), base.map(|f| f.source_path.clone()));

    let base_points: &[Coverpoint] = base.map(|f| f.points()).unwrap_or(&[]);
    let mut consumed = vec![false; base_points.len()];

    for point in cur.map(|f| f.points()).unwrap_or(&[]) {
        if !map.contains_current(point.line) {
            return Err(CategorizeError::MapInconsistency {
                path,
                revision: "current",
                line: point.line,
            });
        }
        if map.is_inserted(point.line) {
            let category = if point.is_hit() { Category::Gnc } else { Category::Unc };
            out.push(CategorizedPoint {
                point: point.clone(),
                category,
                revision: Revision::Current,
                mapped_line: None,
            });
            continue;
        }
        let base_line = map.to_base(point.line).expect("paired line");
        let matched = base.and_then(|f| f.find(point.kind, base_line, &point.key));
        let category = match matched {
            Some(base_point) => {
                let idx = base_points
                    .iter()
                    .position(|p| std::ptr::eq(p, base_point))
                    .expect("point from the same slice");
                consumed[idx] = true;
                table1(base_point.is_hit(), point.is_hit())
            }
            // paired line, but the baseline did not treat it as code
            None => {
                if point.is_hit() { Category::Gic } else { Category::Uic }
            }
        };
        out.push(CategorizedPoint {
            point: point.clone(),
            category,
            revision: Revision::Current,
            mapped_line: Some(base_line),
        });
    }

    for (idx, point) in base_points.iter().enumerate() {
        if consumed[idx] {
            continue;
        }
        if !map.contains_base(point.line) {
            return Err(CategorizeError::MapInconsistency {
                path,
                revision: "baseline",
                line: point.line,
            });
        }
        let (category, mapped_line) = if map.is_deleted(point.line) {
            (if point.is_hit() { Category::Dcb } else { Category::Dub }, None)
        } else {
            // line survives but the current snapshot no longer treats it as
            // code
            let cur_line = map.to_current(point.line).expect("paired line");
            (if point.is_hit() { Category::Ecb } else { Category::Eub }, Some(cur_line))
        };
        out.push(CategorizedPoint {
            point: point.clone(),
            category,
            revision: Revision::Baseline,
            mapped_line,
        });
    }

    Ok(out.finish())
}

/// Cold-start categorization without a baseline: every covered point is
/// GNC, every uncovered point UNC.
pub fn categorize_no_baseline(cur: &FileCoverage) -> CategorizedFile {
    let mut out = CategorizedFile::new(cur.source_path.clone(), None);
    for point in cur.points() {
        let category = if point.is_hit() { Category::Gnc } else { Category::Unc };
        out.push(CategorizedPoint {
            point: point.clone(),
            category,
            revision: Revision::Current,
            mapped_line: None,
        });
    }
    out.finish()
}

/// Joins two snapshots and a diff into per-file categorizations.
///
/// Files absent from the diff map as identity; created/deleted files pin the
/// revision lengths from their hunks, so stale traces surface as
/// `MapInconsistency`; renames join the baseline file under the old name to
/// the current file under the new one. A missing baseline snapshot degrades
/// to [`categorize_no_baseline`] for every file.
pub fn categorize_snapshot(
    base: Option<&CoverageSnapshot>,
    cur: &CoverageSnapshot,
    diffs: &[FileDiff],
) -> Result<Vec<CategorizedFile>, CategorizeError> {
    let base = match base {
        Some(b) => b,
        None => {
            return Ok(cur.files().values().map(categorize_no_baseline).collect());
        }
    };

    let mut by_current: BTreeMap<&str, &FileDiff> = BTreeMap::new();
    let mut by_base: BTreeMap<&str, &FileDiff> = BTreeMap::new();
    for d in diffs {
        if let Some(p) = d.current_path.as_deref() {
            by_current.entry(p).or_insert(d);
        }
        if let Some(p) = d.base_path.as_deref() {
            by_base.entry(p).or_insert(d);
        }
    }

    let mut results: Vec<CategorizedFile> = Vec::new();
    let mut base_files_seen: Vec<&str> = Vec::new();

    for (path, cur_file) in cur.files() {
        let diff = by_current.get(path.as_str()).copied();
        let base_file = match diff {
            Some(d) => d.base_path.as_deref().and_then(|p| base.file(p)),
            None => base.file(path),
        };
        if let Some(bf) = base_file {
            base_files_seen.push(&bf.source_path);
        }
        let map = match diff {
            Some(d) if d.is_created() => {
                // the whole file is in the diff, so its length is pinned
                let cur_count = d
                    .hunks
                    .iter()
                    .map(|h| (h.cur_start + h.cur_len).saturating_sub(1))
                    .max()
                    .unwrap_or(0);
                // baseline coverage for a created path contradicts the diff;
                // run it through the map so the error surfaces
                let base_file_here = base.file(path);
                if let Some(bf) = base_file_here {
                    base_files_seen.push(&bf.source_path);
                    let map = LineMap::all_inserted(cur_count);
                    results.push(categorize_file(Some(bf), Some(cur_file), &map)?);
                    continue;
                }
                LineMap::all_inserted(cur_count)
            }
            Some(d) => derive_map(d, base_file, Some(cur_file))?,
            None => {
                let n = cur_file
                    .max_line()
                    .max(base_file.map(|f| f.max_line()).unwrap_or(0));
                LineMap::identity(n)
            }
        };
        results.push(categorize_file(base_file, Some(cur_file), &map)?);
    }

    for (path, base_file) in base.files() {
        if base_files_seen.iter().any(|s| s == path) {
            continue;
        }
        let diff = by_base.get(path.as_str()).copied();
        let map = match diff {
            Some(d) if d.is_deleted() => {
                let base_count = d
                    .hunks
                    .iter()
                    .map(|h| (h.base_start + h.base_len).saturating_sub(1))
                    .max()
                    .unwrap_or(0);
                LineMap::all_deleted(base_count)
            }
            // diff exists but the current snapshot has no trace for the new
            // revision: paired lines become excluded, edited ones deleted
            Some(d) => derive_map(d, Some(base_file), None)?,
            None => LineMap::identity(base_file.max_line()),
        };
        results.push(categorize_file(Some(base_file), None, &map)?);
    }

    results.sort_by(|a, b| a.source_path.cmp(&b.source_path));
    Ok(results)
}

/// Derives revision lengths for an ordinary hunked diff: long enough for
/// every hunk and every coverpoint, with the net hunk offset preserved.
fn derive_map(
    diff: &FileDiff,
    base_file: Option<&FileCoverage>,
    cur_file: Option<&FileCoverage>,
) -> Result<LineMap, CategorizeError> {
    let offset = diff.total_offset();
    let hunk_base_end = diff
        .hunks
        .iter()
        .map(|h| if h.base_len == 0 { h.base_start } else { h.base_start + h.base_len - 1 })
        .max()
        .unwrap_or(0);
    let base_max = base_file.map(|f| f.max_line()).unwrap_or(0);
    let cur_max = cur_file.map(|f| f.max_line()).unwrap_or(0);
    let cur_needs = (cur_max as i64 - offset).max(0) as u32;
    let base_count = hunk_base_end.max(base_max).max(cur_needs);
    let cur_count = (base_count as i64 + offset).max(0) as u32;
    build_line_map(diff, base_count, cur_count).map_err(|_| {
        // out-of-range here means the coverage forced a length the hunks
        // cannot produce
        CategorizeError::MapInconsistency {
            path: diff
                .current_path
                .clone()
                .or_else(|| diff.base_path.clone())
                .unwrap_or_default(),
            revision: "current",
            line: cur_max,
        }
    })
}

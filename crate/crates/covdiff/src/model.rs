//! Core coverage data model: coverpoints, per-file coverage, snapshots, and
//! the twelve differential categories.
//!
//! Everything here is immutable after construction and shared freely between
//! the parsing, categorization, binning, and reporting stages.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

/// Kind of a coverpoint. Every kind ties the point to a single source line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoverKind {
    Line,
    Function,
    Branch,
}

impl CoverKind {
    pub const ALL: [CoverKind; 3] = [CoverKind::Line, CoverKind::Function, CoverKind::Branch];

    pub fn name(self) -> &'static str {
        match self {
            CoverKind::Line => "line",
            CoverKind::Function => "function",
            CoverKind::Branch => "branch",
        }
    }
}

impl fmt::Display for CoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for CoverKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// One measurable coverage item at a source location.
///
/// The `key` discriminates coverpoints of the same kind on the same line:
/// the function name for `Function`, the `"block,branch"` pair for `Branch`,
/// and empty for `Line`. A point is *covered* when `hit_count > 0`; a branch
/// that was recorded but never evaluated carries `hit_count == 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coverpoint {
    pub line: u32,
    pub kind: CoverKind,
    pub key: String,
    pub hit_count: u64,
}

impl Coverpoint {
    pub fn line(line: u32, hit_count: u64) -> Coverpoint {
        Coverpoint { line, kind: CoverKind::Line, key: String::new(), hit_count }
    }

    pub fn function(line: u32, name: &str, hit_count: u64) -> Coverpoint {
        Coverpoint { line, kind: CoverKind::Function, key: name.to_string(), hit_count }
    }

    pub fn branch(line: u32, block: &str, branch: &str, hit_count: u64) -> Coverpoint {
        Coverpoint {
            line,
            kind: CoverKind::Branch,
            key: format!("{block},{branch}"),
            hit_count,
        }
    }

    pub fn is_hit(&self) -> bool {
        self.hit_count > 0
    }
}

/// Coverage of a single source file: coverpoints kept sorted by
/// `(line, kind, key)` so serialization is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FileCoverage {
    pub source_path: String,
    points: Vec<Coverpoint>,
}

impl FileCoverage {
    pub fn new(source_path: impl Into<String>) -> FileCoverage {
        FileCoverage { source_path: source_path.into(), points: Vec::new() }
    }

    pub fn from_points(
        source_path: impl Into<String>,
        points: impl IntoIterator<Item = Coverpoint>,
    ) -> FileCoverage {
        let mut fc = FileCoverage::new(source_path);
        for p in points {
            fc.insert(p);
        }
        fc
    }

    /// Adds a coverpoint. A point with the same `(line, kind, key)` already
    /// present merges by summing hit counts. Function names are unique
    /// within a file (the trace format joins hits to functions by name), so
    /// a function point merges with an existing same-named one even when the
    /// declaration lines disagree; the first-seen line wins.
    pub fn insert(&mut self, point: Coverpoint) {
        if point.kind == CoverKind::Function {
            if let Some(i) = self
                .points
                .iter()
                .position(|p| p.kind == CoverKind::Function && p.key == point.key)
            {
                // disagreeing declaration lines resolve to the smaller one,
                // keeping merges order-independent
                let mut merged = self.points.remove(i);
                merged.hit_count += point.hit_count;
                merged.line = merged.line.min(point.line);
                let probe = (merged.line, merged.kind, merged.key.clone());
                let at = self
                    .points
                    .binary_search_by(|p| (p.line, p.kind, p.key.as_str()).cmp(&(probe.0, probe.1, probe.2.as_str())))
                    .unwrap_err();
                self.points.insert(at, merged);
                return;
            }
        }
        let probe = (point.line, point.kind, point.key.as_str());
        match self
            .points
            .binary_search_by(|p| (p.line, p.kind, p.key.as_str()).cmp(&probe))
        {
            Ok(i) => self.points[i].hit_count += point.hit_count,
            Err(i) => self.points.insert(i, point),
        }
    }

    pub fn points(&self) -> &[Coverpoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn find(&self, kind: CoverKind, line: u32, key: &str) -> Option<&Coverpoint> {
        let probe = (line, kind, key);
        self.points
            .binary_search_by(|p| (p.line, p.kind, p.key.as_str()).cmp(&probe))
            .ok()
            .map(|i| &self.points[i])
    }

    /// Highest line number referenced by any coverpoint (0 when empty).
    pub fn max_line(&self) -> u32 {
        self.points.iter().map(|p| p.line).max().unwrap_or(0)
    }

    /// `(found, hit)` for one coverpoint kind: how many points exist and how
    /// many of them have a nonzero hit count.
    pub fn summarize(&self, kind: CoverKind) -> (u64, u64) {
        let mut found = 0;
        let mut hit = 0;
        for p in &self.points {
            if p.kind == kind {
                found += 1;
                if p.is_hit() {
                    hit += 1;
                }
            }
        }
        (found, hit)
    }
}

/// A complete coverage result for one build: one `FileCoverage` per source
/// path, keyed by normalized path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageSnapshot {
    pub label: String,
    files: BTreeMap<String, FileCoverage>,
}

impl CoverageSnapshot {
    pub fn new(label: impl Into<String>) -> CoverageSnapshot {
        CoverageSnapshot { label: label.into(), files: BTreeMap::new() }
    }

    pub fn files(&self) -> &BTreeMap<String, FileCoverage> {
        &self.files
    }

    pub fn file(&self, path: &str) -> Option<&FileCoverage> {
        self.files.get(path)
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Adds a file's coverage; an existing entry for the path merges by
    /// hit-count summation.
    pub fn add_file(&mut self, fc: FileCoverage) {
        match self.files.get_mut(&fc.source_path) {
            Some(existing) => {
                for p in fc.points {
                    existing.insert(p);
                }
            }
            None => {
                self.files.insert(fc.source_path.clone(), fc);
            }
        }
    }

    /// Replaces the coverage of a file wholesale (used by exclusion
    /// filtering). Removes the entry when `fc` has no points and `keep_empty`
    /// is false.
    pub fn replace_file(&mut self, fc: FileCoverage) {
        self.files.insert(fc.source_path.clone(), fc);
    }

    pub fn remove_file(&mut self, path: &str) -> Option<FileCoverage> {
        self.files.remove(path)
    }

    /// `(found, hit)` totals over all files for one kind.
    pub fn summarize(&self, kind: CoverKind) -> (u64, u64) {
        let mut found = 0;
        let mut hit = 0;
        for fc in self.files.values() {
            let (f, h) = fc.summarize(kind);
            found += f;
            hit += h;
        }
        (found, hit)
    }
}

/// Merges two snapshots: union of files, summing hit counts of coverpoints
/// with equal `(path, kind, line, key)`. The label of the result is the
/// first non-empty label, so the empty snapshot is a merge identity.
pub fn merge_snapshots(a: &CoverageSnapshot, b: &CoverageSnapshot) -> CoverageSnapshot {
    let label = if a.label.is_empty() { b.label.clone() } else { a.label.clone() };
    let mut out = CoverageSnapshot::new(label);
    for fc in a.files.values().chain(b.files.values()) {
        out.add_file(fc.clone());
    }
    out
}

/// The twelve differential coverage categories, declared in priority order:
/// `UNC` is the most interesting, `DCB` the least. The derived `Ord` follows
/// declaration order, so sorting ascending lists categories by priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    /// Uncovered New Code: newly added code is not exercised.
    Unc,
    /// Lost Baseline Coverage: pre-existing code is no longer exercised.
    Lbc,
    /// Uncovered Included Code: unchanged text newly treated as code, unexercised.
    Uic,
    /// Uncovered Baseline Code: not covered before, not covered now.
    Ubc,
    /// Gained Baseline Coverage: pre-existing code is covered now.
    Gbc,
    /// Gained coverage Included Code: unchanged text newly treated as code, exercised.
    Gic,
    /// Gained coverage New Code: newly added code is exercised.
    Gnc,
    /// Covered Baseline Code: covered before and still covered.
    Cbc,
    /// Excluded Uncovered Baseline: no longer treated as code; was unexercised.
    Eub,
    /// Excluded Covered Baseline: no longer treated as code; was exercised.
    Ecb,
    /// Deleted Uncovered Baseline: deleted code that was unexercised.
    Dub,
    /// Deleted Covered Baseline: deleted code that was exercised.
    Dcb,
}

impl Category {
    /// All twelve categories in priority order.
    pub const ALL: [Category; 12] = [
        Category::Unc,
        Category::Lbc,
        Category::Uic,
        Category::Ubc,
        Category::Gbc,
        Category::Gic,
        Category::Gnc,
        Category::Cbc,
        Category::Eub,
        Category::Ecb,
        Category::Dub,
        Category::Dcb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Unc => "UNC",
            Category::Lbc => "LBC",
            Category::Uic => "UIC",
            Category::Ubc => "UBC",
            Category::Gbc => "GBC",
            Category::Gic => "GIC",
            Category::Gnc => "GNC",
            Category::Cbc => "CBC",
            Category::Eub => "EUB",
            Category::Ecb => "ECB",
            Category::Dub => "DUB",
            Category::Dcb => "DCB",
        }
    }

    pub fn parse(name: &str) -> Option<Category> {
        Category::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(name))
    }

    /// Labels a baseline-only coverpoint (code that is gone from the current
    /// snapshot). All other categories label current coverpoints.
    pub fn is_baseline_only(self) -> bool {
        matches!(self, Category::Dcb | Category::Dub | Category::Ecb | Category::Eub)
    }

    /// Categories counting as untested for owner filtering and gating.
    pub fn is_untested(self) -> bool {
        matches!(self, Category::Unc | Category::Lbc | Category::Uic | Category::Ubc)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Category {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Normalizes a path for joining across traces, diffs, and annotations:
/// forward slashes, no `.` segments, `..` resolved where possible, duplicate
/// separators collapsed. Absolute paths keep their leading slash.
pub fn normalize_path(path: &str) -> String {
    let replaced = path.replace('\\', "/");
    let absolute = replaced.starts_with('/');
    let mut segments: Vec<&str> = Vec::new();
    for seg in replaced.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                if matches!(segments.last(), Some(&s) if s != "..") {
                    segments.pop();
                } else if !absolute {
                    segments.push("..");
                }
            }
            other => segments.push(other),
        }
    }
    let joined = segments.join("/");
    if absolute {
        format!("/{joined}")
    } else {
        joined
    }
}

/// Strips a leading path prefix (after normalization of both sides), then
/// any remaining leading slash. Used to turn absolute build-machine trace
/// paths back into repo-relative ones.
pub fn strip_path_prefix(path: &str, prefix: &str) -> String {
    let path = normalize_path(path);
    let prefix = normalize_path(prefix);
    if prefix.is_empty() {
        return path;
    }
    match path.strip_prefix(&prefix) {
        Some("") => path,
        Some(rest) => rest.trim_start_matches('/').to_string(),
        None => path,
    }
}

/// Formats a hit percentage with one decimal, e.g. `64.7%`. Returns `-` when
/// nothing was found.
pub fn format_percent(hit: u64, found: u64) -> String {
    if found == 0 {
        "-".to_string()
    } else {
        format!("{:.1}%", 100.0 * hit as f64 / found as f64)
    }
}

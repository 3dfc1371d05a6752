//! Per-line authorship and last-edit dates.
//!
//! Two ingestion paths: `git blame --line-porcelain` output, and a
//! VCS-neutral TSV (`path<TAB>line<TAB>owner<TAB>epoch_seconds`). Both
//! produce dense per-file annotation lists; lookups never fail for a line
//! the file actually has.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::normalize_path;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HistoryError {
    #[error("malformed blame output at line {line}: {reason}")]
    MalformedBlame { line: usize, reason: String },
    #[error("malformed annotation record at line {line}: {reason}")]
    MalformedAnnotation { line: usize, reason: String },
    #[error("annotation gap in {path}: line {line} is missing")]
    GapInAnnotations { path: String, line: u32 },
    #[error("edit time {edit_time} is after the reference time {now}")]
    FutureEdit { edit_time: i64, now: i64 },
}

/// Who last touched a line and when (UTC epoch seconds).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineAnnotation {
    pub line: u32,
    pub owner: String,
    pub edit_time: i64,
}

/// Dense per-file annotations: for each file, one entry per line 1..n.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationSet {
    files: BTreeMap<String, Vec<LineAnnotation>>,
}

impl AnnotationSet {
    pub fn new() -> AnnotationSet {
        AnnotationSet::default()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    /// Adds a file's annotations, validating density (lines 1..n with no
    /// gaps or duplicates).
    pub fn insert_file(
        &mut self,
        path: impl Into<String>,
        mut annotations: Vec<LineAnnotation>,
    ) -> Result<(), HistoryError> {
        let path = normalize_path(&path.into());
        annotations.sort_by_key(|a| a.line);
        for (i, a) in annotations.iter().enumerate() {
            let expect = i as u32 + 1;
            if a.line != expect {
                return Err(HistoryError::GapInAnnotations { path, line: expect });
            }
        }
        self.files.insert(path, annotations);
        Ok(())
    }

    pub fn lookup(&self, path: &str, line: u32) -> Option<&LineAnnotation> {
        self.files
            .get(path)?
            .get(line.checked_sub(1)? as usize)
    }

    pub fn has_file(&self, path: &str) -> bool {
        self.files.contains_key(path)
    }
}

/// Age in fractional days of an annotation at the reference time.
pub fn age_days(annotation: &LineAnnotation, now: i64) -> Result<f64, HistoryError> {
    if annotation.edit_time > now {
        return Err(HistoryError::FutureEdit { edit_time: annotation.edit_time, now });
    }
    Ok((now - annotation.edit_time) as f64 / SECONDS_PER_DAY)
}

/// Parses `git blame --line-porcelain` (or `--porcelain`) output for one
/// file. Each header group carries the commit, `author`, and `author-time`
/// fields followed by the content line prefixed with a tab; the author field
/// is the owner. Plain porcelain output, which omits repeated commit
/// headers, is handled by remembering per-commit metadata.
pub fn parse_porcelain_blame(
    input: &str,
    path: &str,
) -> Result<Vec<LineAnnotation>, HistoryError> {
    struct CommitInfo {
        author: Option<String>,
        author_time: Option<i64>,
    }

    let mut commits: BTreeMap<String, CommitInfo> = BTreeMap::new();
    let mut current_commit: Option<String> = None;
    let mut current_line: Option<u32> = None;
    let mut annotations: Vec<LineAnnotation> = Vec::new();

    for (idx, raw) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);

        if let Some(_content) = line.strip_prefix('\t') {
            let commit = current_commit.take().ok_or(HistoryError::MalformedBlame {
                line: lineno,
                reason: "content line before any commit header".to_string(),
            })?;
            let final_line = current_line.take().ok_or(HistoryError::MalformedBlame {
                line: lineno,
                reason: "content line without a line number".to_string(),
            })?;
            let info = &commits[&commit];
            let owner = info.author.clone().ok_or(HistoryError::MalformedBlame {
                line: lineno,
                reason: format!("no author recorded for commit {commit}"),
            })?;
            let edit_time = info.author_time.ok_or(HistoryError::MalformedBlame {
                line: lineno,
                reason: format!("no author-time recorded for commit {commit}"),
            })?;
            annotations.push(LineAnnotation { line: final_line, owner, edit_time });
            continue;
        }

        if current_commit.is_none() {
            // header line: "<sha> <orig_line> <final_line> [group_size]"
            let mut fields = line.split(' ');
            let sha = fields.next().unwrap_or("");
            let looks_like_sha =
                sha.len() >= 8 && sha.bytes().all(|b| b.is_ascii_hexdigit());
            if !looks_like_sha {
                return Err(HistoryError::MalformedBlame {
                    line: lineno,
                    reason: format!("expected commit header, found {line:?}"),
                });
            }
            let _orig: u32 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or(HistoryError::MalformedBlame {
                    line: lineno,
                    reason: "missing original line number".to_string(),
                })?;
            let final_line: u32 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or(HistoryError::MalformedBlame {
                    line: lineno,
                    reason: "missing final line number".to_string(),
                })?;
            commits
                .entry(sha.to_string())
                .or_insert(CommitInfo { author: None, author_time: None });
            current_commit = Some(sha.to_string());
            current_line = Some(final_line);
            continue;
        }

        let commit = current_commit.as_ref().expect("header parsed above");
        let info = commits.get_mut(commit).expect("inserted with header");
        if let Some(author) = line.strip_prefix("author ") {
            info.author = Some(author.to_string());
        } else if let Some(time) = line.strip_prefix("author-time ") {
            info.author_time =
                Some(time.trim().parse().map_err(|_| HistoryError::MalformedBlame {
                    line: lineno,
                    reason: format!("bad author-time {time:?}"),
                })?);
        }
        // committer fields, summary, filename, boundary etc. pass through
    }

    // density check happens here so gaps in blame output surface early
    let mut probe = AnnotationSet::new();
    probe.insert_file(path, annotations.clone())?;
    annotations.sort_by_key(|a| a.line);
    Ok(annotations)
}

/// Parses the VCS-neutral annotation TSV: one record per line,
/// `path<TAB>line<TAB>owner<TAB>epoch`. Duplicate records for a line keep
/// the last one; every file must be dense once all records are read.
pub fn parse_annotation_tsv(input: &str) -> Result<AnnotationSet, HistoryError> {
    let mut per_file: BTreeMap<String, BTreeMap<u32, LineAnnotation>> = BTreeMap::new();

    for (idx, raw) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(HistoryError::MalformedAnnotation {
                line: lineno,
                reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let path = normalize_path(fields[0]);
        let line_no: u32 = fields[1].parse().map_err(|_| HistoryError::MalformedAnnotation {
            line: lineno,
            reason: format!("bad line number {:?}", fields[1]),
        })?;
        if line_no == 0 {
            return Err(HistoryError::MalformedAnnotation {
                line: lineno,
                reason: "line numbers are 1-based".to_string(),
            });
        }
        let owner = fields[2].to_string();
        if owner.is_empty() {
            return Err(HistoryError::MalformedAnnotation {
                line: lineno,
                reason: "empty owner".to_string(),
            });
        }
        let edit_time: i64 = fields[3].parse().map_err(|_| HistoryError::MalformedAnnotation {
            line: lineno,
            reason: format!("bad epoch {:?}", fields[3]),
        })?;
        per_file
            .entry(path)
            .or_default()
            .insert(line_no, LineAnnotation { line: line_no, owner, edit_time });
    }

    let mut set = AnnotationSet::new();
    for (path, by_line) in per_file {
        set.insert_file(path, by_line.into_values().collect())?;
    }
    Ok(set)
}

/// Emits the TSV form of an annotation set (fixture/debug helper, also the
/// round-trip partner of [`parse_annotation_tsv`]).
pub fn serialize_annotation_tsv(set: &AnnotationSet) -> String {
    let mut out = String::new();
    for path in set.files() {
        let mut line = 1;
        while let Some(a) = set.lookup(path, line) {
            out.push_str(&format!("{path}\t{}\t{}\t{}\n", a.line, a.owner, a.edit_time));
            line += 1;
        }
    }
    out
}

//! Unified diff parsing and baseline/current line correspondence.
//!
//! A [`FileDiff`] holds the raw hunks for one file pair; [`build_line_map`]
//! turns them into a [`LineMap`]: the strictly monotone pairing of unchanged
//! lines plus the inserted and deleted line sets. Changed lines appear as a
//! deleted/inserted pair and are never paired.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::normalize_path;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiffError {
    #[error("malformed diff at line {line}: {reason}")]
    MalformedDiff { line: usize, reason: String },
    #[error("malformed hunk at line {line}: {reason}")]
    MalformedHunk { line: usize, reason: String },
    #[error("hunk out of range: {reason}")]
    HunkOutOfRange { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Context,
    Delete,
    Insert,
}

/// One body line of a hunk with its text (without the leading marker).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HunkOp {
    pub kind: OpKind,
    pub text: String,
}

/// One `@@ -a,b +c,d @@` hunk. Starts and lengths are as declared in the
/// header; a zero-length side uses the unified diff convention where the
/// start names the line *before* the edit position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    pub base_start: u32,
    pub base_len: u32,
    pub cur_start: u32,
    pub cur_len: u32,
    pub ops: Vec<HunkOp>,
}

impl Hunk {
    /// First baseline line the hunk walks (header start adjusted for the
    /// zero-length convention).
    fn base_walk_start(&self) -> u32 {
        if self.base_len == 0 { self.base_start + 1 } else { self.base_start }
    }

    fn cur_walk_start(&self) -> u32 {
        if self.cur_len == 0 { self.cur_start + 1 } else { self.cur_start }
    }

    /// Last baseline line the hunk occupies; for a pure insertion this is
    /// the line before the insertion point (empty range).
    fn base_end(&self) -> u32 {
        if self.base_len == 0 {
            self.base_start
        } else {
            self.base_start + self.base_len - 1
        }
    }
}

/// Diff of one file pair. A `None` path stands for `/dev/null`: `base_path`
/// `None` marks file creation, `current_path` `None` marks deletion. A file
/// entry without hunks (mode change, pure rename) maps as identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiff {
    pub base_path: Option<String>,
    pub current_path: Option<String>,
    pub hunks: Vec<Hunk>,
}

impl FileDiff {
    pub fn is_created(&self) -> bool {
        self.base_path.is_none()
    }

    pub fn is_deleted(&self) -> bool {
        self.current_path.is_none()
    }

    /// Net line-count change across all hunks.
    pub fn total_offset(&self) -> i64 {
        self.hunks
            .iter()
            .map(|h| h.cur_len as i64 - h.base_len as i64)
            .sum()
    }

    /// The diff with the sense of baseline and current swapped: paths and
    /// hunk coordinates exchanged, deletions become insertions.
    pub fn reversed(&self) -> FileDiff {
        FileDiff {
            base_path: self.current_path.clone(),
            current_path: self.base_path.clone(),
            hunks: self
                .hunks
                .iter()
                .map(|h| Hunk {
                    base_start: h.cur_start,
                    base_len: h.cur_len,
                    cur_start: h.base_start,
                    cur_len: h.base_len,
                    ops: h
                        .ops
                        .iter()
                        .map(|op| HunkOp {
                            kind: match op.kind {
                                OpKind::Context => OpKind::Context,
                                OpKind::Delete => OpKind::Insert,
                                OpKind::Insert => OpKind::Delete,
                            },
                            text: op.text.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Baseline/current line correspondence for one file.
///
/// Every baseline line is either paired or deleted; every current line is
/// either paired or inserted. The pairing is strictly monotone, so it is
/// sorted by both coordinates at once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LineMap {
    pairs: Vec<(u32, u32)>,
    inserted: BTreeSet<u32>,
    deleted: BTreeSet<u32>,
}

impl LineMap {
    /// Identity map over `line_count` lines: nothing inserted or deleted.
    pub fn identity(line_count: u32) -> LineMap {
        LineMap {
            pairs: (1..=line_count).map(|i| (i, i)).collect(),
            inserted: BTreeSet::new(),
            deleted: BTreeSet::new(),
        }
    }

    /// Map for a created file: all `cur_count` lines inserted.
    pub fn all_inserted(cur_count: u32) -> LineMap {
        LineMap {
            pairs: Vec::new(),
            inserted: (1..=cur_count).collect(),
            deleted: BTreeSet::new(),
        }
    }

    /// Map for a deleted file: all `base_count` lines deleted.
    pub fn all_deleted(base_count: u32) -> LineMap {
        LineMap {
            pairs: Vec::new(),
            inserted: BTreeSet::new(),
            deleted: (1..=base_count).collect(),
        }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn inserted(&self) -> &BTreeSet<u32> {
        &self.inserted
    }

    pub fn deleted(&self) -> &BTreeSet<u32> {
        &self.deleted
    }

    pub fn is_inserted(&self, cur_line: u32) -> bool {
        self.inserted.contains(&cur_line)
    }

    pub fn is_deleted(&self, base_line: u32) -> bool {
        self.deleted.contains(&base_line)
    }

    /// Baseline counterpart of a paired current line.
    pub fn to_base(&self, cur_line: u32) -> Option<u32> {
        self.pairs
            .binary_search_by_key(&cur_line, |&(_, c)| c)
            .ok()
            .map(|i| self.pairs[i].0)
    }

    /// Current counterpart of a paired baseline line.
    pub fn to_current(&self, base_line: u32) -> Option<u32> {
        self.pairs
            .binary_search_by_key(&base_line, |&(b, _)| b)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    /// Whether a current line exists in this map's domain at all.
    pub fn contains_current(&self, cur_line: u32) -> bool {
        self.is_inserted(cur_line) || self.to_base(cur_line).is_some()
    }

    pub fn contains_base(&self, base_line: u32) -> bool {
        self.is_deleted(base_line) || self.to_current(base_line).is_some()
    }

    pub fn base_line_count(&self) -> u32 {
        (self.pairs.len() + self.deleted.len()) as u32
    }

    pub fn cur_line_count(&self) -> u32 {
        (self.pairs.len() + self.inserted.len()) as u32
    }

    /// The inverse correspondence: pairs transposed, inserted and deleted
    /// swapped.
    pub fn inverted(&self) -> LineMap {
        LineMap {
            pairs: self.pairs.iter().map(|&(b, c)| (c, b)).collect(),
            inserted: self.deleted.clone(),
            deleted: self.inserted.clone(),
        }
    }
}

/// Parses unified diff text into per-file diffs.
///
/// `diff --git` headers, `index`/mode lines, and rename headers are
/// understood; `---`/`+++` paths lose their `a/`/`b/` prefixes and any
/// trailing tab-separated timestamp; `/dev/null` marks creation or deletion.
pub fn parse_unified_diff(input: &str) -> Result<Vec<FileDiff>, DiffError> {
    Parser::new(input).run()
}

struct Parser<'a> {
    lines: Vec<&'a str>,
    pos: usize,
    out: Vec<FileDiff>,
    // paths harvested from "diff --git" / "rename from/to" headers, used
    // when no ---/+++ pair follows (pure renames, mode changes)
    pending_git: Option<(Option<String>, Option<String>)>,
    pending_has_hunkless_marker: bool,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Parser<'a> {
        Parser {
            lines: input.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect(),
            pos: 0,
            out: Vec::new(),
            pending_git: None,
            pending_has_hunkless_marker: false,
        }
    }

    fn run(mut self) -> Result<Vec<FileDiff>, DiffError> {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos];
            if let Some(rest) = line.strip_prefix("diff --git ") {
                self.flush_pending();
                self.pending_git = parse_git_paths(rest);
                self.pending_has_hunkless_marker = false;
                self.pos += 1;
            } else if let Some(path) = line.strip_prefix("rename from ") {
                if let Some(p) = self.pending_git.as_mut() {
                    p.0 = Some(normalize_path(path));
                }
                self.pending_has_hunkless_marker = true;
                self.pos += 1;
            } else if let Some(path) = line.strip_prefix("rename to ") {
                if let Some(p) = self.pending_git.as_mut() {
                    p.1 = Some(normalize_path(path));
                }
                self.pending_has_hunkless_marker = true;
                self.pos += 1;
            } else if line.starts_with("old mode ") || line.starts_with("new mode ") {
                self.pending_has_hunkless_marker = true;
                self.pos += 1;
            } else if line.starts_with("--- ") {
                self.parse_file_entry()?;
            } else if line.starts_with("@@") {
                return Err(DiffError::MalformedDiff {
                    line: self.pos + 1,
                    reason: "hunk header without file headers".to_string(),
                });
            } else {
                // index lines, similarity scores, binary notices, commit
                // message text between entries
                self.pos += 1;
            }
        }
        self.flush_pending();
        Ok(self.out)
    }

    /// Emits a header-only entry (mode change or pure rename) as a hunkless
    /// diff so renames still join the snapshots.
    fn flush_pending(&mut self) {
        if let Some((base, cur)) = self.pending_git.take() {
            if self.pending_has_hunkless_marker && (base.is_some() || cur.is_some()) {
                self.out.push(FileDiff { base_path: base, current_path: cur, hunks: Vec::new() });
            }
        }
        self.pending_has_hunkless_marker = false;
    }

    fn parse_file_entry(&mut self) -> Result<(), DiffError> {
        let header_line = self.pos + 1;
        let base_path = parse_header_path(self.lines[self.pos], "--- ");
        self.pos += 1;
        if self.pos >= self.lines.len() || !self.lines[self.pos].starts_with("+++ ") {
            return Err(DiffError::MalformedDiff {
                line: header_line,
                reason: "'---' header without matching '+++'".to_string(),
            });
        }
        let cur_path = parse_header_path(self.lines[self.pos], "+++ ");
        self.pos += 1;

        // ---/+++ supersede any pending diff --git paths
        self.pending_git = None;
        self.pending_has_hunkless_marker = false;

        let mut hunks = Vec::new();
        while self.pos < self.lines.len() && self.lines[self.pos].starts_with("@@") {
            hunks.push(self.parse_hunk()?);
        }
        validate_hunk_sequence(&hunks, header_line)?;

        if base_path.is_none() && cur_path.is_none() {
            return Err(DiffError::MalformedDiff {
                line: header_line,
                reason: "both sides are /dev/null".to_string(),
            });
        }
        self.out.push(FileDiff { base_path, current_path: cur_path, hunks });
        Ok(())
    }

    fn parse_hunk(&mut self) -> Result<Hunk, DiffError> {
        let header_line = self.pos + 1;
        let (base_start, base_len, cur_start, cur_len) =
            parse_hunk_header(self.lines[self.pos]).ok_or_else(|| DiffError::MalformedHunk {
                line: header_line,
                reason: format!("bad hunk header {:?}", self.lines[self.pos]),
            })?;
        self.pos += 1;

        let mut ops = Vec::new();
        let mut base_seen = 0u32;
        let mut cur_seen = 0u32;
        while base_seen < base_len || cur_seen < cur_len {
            let body_line = self.pos + 1;
            let raw = self.lines.get(self.pos).copied().ok_or(DiffError::MalformedHunk {
                line: body_line,
                reason: "hunk body ends before declared lengths are reached".to_string(),
            })?;
            self.pos += 1;
            let (kind, text) = match raw.as_bytes().first() {
                Some(b' ') => (OpKind::Context, &raw[1..]),
                Some(b'-') => (OpKind::Delete, &raw[1..]),
                Some(b'+') => (OpKind::Insert, &raw[1..]),
                Some(b'\\') => continue, // "\ No newline at end of file"
                // some tools emit genuinely empty lines for empty context
                None => (OpKind::Context, ""),
                Some(_) => {
                    return Err(DiffError::MalformedHunk {
                        line: body_line,
                        reason: format!("unexpected line {raw:?} inside hunk body"),
                    });
                }
            };
            match kind {
                OpKind::Context => {
                    base_seen += 1;
                    cur_seen += 1;
                }
                OpKind::Delete => base_seen += 1,
                OpKind::Insert => cur_seen += 1,
            }
            if base_seen > base_len || cur_seen > cur_len {
                return Err(DiffError::MalformedHunk {
                    line: body_line,
                    reason: "hunk body exceeds declared lengths".to_string(),
                });
            }
            ops.push(HunkOp { kind, text: text.to_string() });
        }
        // trailing "\ No newline" after the last counted line
        if self
            .lines
            .get(self.pos)
            .is_some_and(|l| l.starts_with('\\'))
        {
            self.pos += 1;
        }
        Ok(Hunk { base_start, base_len, cur_start, cur_len, ops })
    }
}

fn parse_git_paths(rest: &str) -> Option<(Option<String>, Option<String>)> {
    // "a/<path> b/<path>"; paths with spaces make this notation ambiguous,
    // so split at " b/" from the right.
    let rest = rest.trim();
    let idx = rest.rfind(" b/")?;
    let a = rest[..idx].strip_prefix("a/")?;
    let b = &rest[idx + 3..];
    Some((Some(normalize_path(a)), Some(normalize_path(b))))
}

fn parse_header_path(line: &str, prefix: &str) -> Option<String> {
    let rest = line.strip_prefix(prefix).unwrap_or(line);
    let path = rest.split('\t').next().unwrap_or(rest).trim_end();
    if path == "/dev/null" {
        return None;
    }
    let path = path.strip_prefix("a/").or_else(|| path.strip_prefix("b/")).unwrap_or(path);
    Some(normalize_path(path))
}

fn parse_hunk_header(line: &str) -> Option<(u32, u32, u32, u32)> {
    // @@ -a[,b] +c[,d] @@ [section]
    let rest = line.strip_prefix("@@ -")?;
    let (base, rest) = rest.split_once(" +")?;
    let (cur, _) = rest.split_once(" @@")?;
    let (base_start, base_len) = parse_range(base)?;
    let (cur_start, cur_len) = parse_range(cur)?;
    Some((base_start, base_len, cur_start, cur_len))
}

fn parse_range(text: &str) -> Option<(u32, u32)> {
    match text.split_once(',') {
        Some((s, l)) => Some((s.parse().ok()?, l.parse().ok()?)),
        None => Some((text.parse().ok()?, 1)),
    }
}

/// Checks that hunks are ascending and disjoint in both coordinate systems
/// and that both sides' starts agree with the cumulative offset.
fn validate_hunk_sequence(hunks: &[Hunk], header_line: usize) -> Result<(), DiffError> {
    let mut offset = 0i64;
    let mut prev_base_end = 0u32;
    for h in hunks {
        let base_walk = h.base_walk_start();
        let cur_walk = h.cur_walk_start();
        if base_walk <= prev_base_end {
            return Err(DiffError::MalformedHunk {
                line: header_line,
                reason: "hunks overlap or are out of order".to_string(),
            });
        }
        if cur_walk as i64 != base_walk as i64 + offset {
            return Err(DiffError::MalformedHunk {
                line: header_line,
                reason: format!(
                    "hunk starts disagree with cumulative offset ({} vs {} after {:+})",
                    cur_walk, base_walk, offset
                ),
            });
        }
        offset += h.cur_len as i64 - h.base_len as i64;
        prev_base_end = h.base_end();
    }
    Ok(())
}

/// Builds the line correspondence for a file from its hunks and the two
/// revision lengths. Lines outside all hunks pair with the cumulative offset
/// applied; `-` lines are deleted, `+` lines inserted.
pub fn build_line_map(
    diff: &FileDiff,
    base_line_count: u32,
    cur_line_count: u32,
) -> Result<LineMap, DiffError> {
    let mut pairs = Vec::new();
    let mut inserted = BTreeSet::new();
    let mut deleted = BTreeSet::new();

    let mut b = 1u32;
    let mut c = 1u32;
    for hunk in &diff.hunks {
        let walk_start = hunk.base_walk_start();
        if walk_start > base_line_count + 1 || hunk.base_end() > base_line_count {
            return Err(DiffError::HunkOutOfRange {
                reason: format!(
                    "hunk at baseline line {} exceeds declared length {}",
                    hunk.base_start, base_line_count
                ),
            });
        }
        while b < walk_start {
            pairs.push((b, c));
            b += 1;
            c += 1;
        }
        for op in &hunk.ops {
            match op.kind {
                OpKind::Context => {
                    pairs.push((b, c));
                    b += 1;
                    c += 1;
                }
                OpKind::Delete => {
                    deleted.insert(b);
                    b += 1;
                }
                OpKind::Insert => {
                    inserted.insert(c);
                    c += 1;
                }
            }
        }
    }
    while b <= base_line_count {
        pairs.push((b, c));
        b += 1;
        c += 1;
    }
    if c != cur_line_count + 1 {
        return Err(DiffError::HunkOutOfRange {
            reason: format!(
                "hunks produce {} current lines but {} were declared",
                c - 1,
                cur_line_count
            ),
        });
    }
    Ok(LineMap { pairs, inserted, deleted })
}

/// Reconstructs the baseline text of a file from its current text and its
/// diff: paired lines copy from the current revision, deleted lines take
/// their content from the hunk's `-` ops.
pub fn reconstruct_baseline_text(cur_lines: &[String], diff: &FileDiff) -> Vec<String> {
    let mut out = Vec::new();
    let mut c = 1usize;
    for hunk in &diff.hunks {
        let walk_start = hunk.cur_walk_start() as usize;
        while c < walk_start && c <= cur_lines.len() {
            out.push(cur_lines[c - 1].clone());
            c += 1;
        }
        for op in &hunk.ops {
            match op.kind {
                OpKind::Context => {
                    out.push(cur_lines.get(c - 1).cloned().unwrap_or_else(|| op.text.clone()));
                    c += 1;
                }
                OpKind::Delete => out.push(op.text.clone()),
                OpKind::Insert => c += 1,
            }
        }
    }
    while c <= cur_lines.len() {
        out.push(cur_lines[c - 1].clone());
        c += 1;
    }
    out
}

//! LCOV `.info` trace-file codec.
//!
//! Parses the textual directives (`TN`, `SF`, `FN`, `FNDA`, `DA`, `BRDA`,
//! summary counts, `end_of_record`) into a [`CoverageSnapshot`] and writes a
//! snapshot back out in a canonical form: files sorted by path, coverpoints
//! in `(line, kind, key)` order, summary counts recomputed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{CoverKind, CoverageSnapshot, Coverpoint, FileCoverage, normalize_path};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InfoError {
    #[error("malformed {directive} record at line {line}: {reason}")]
    MalformedRecord {
        line: usize,
        directive: String,
        reason: String,
    },
}

fn malformed(line: usize, directive: &str, reason: impl Into<String>) -> InfoError {
    InfoError::MalformedRecord {
        line,
        directive: directive.to_string(),
        reason: reason.into(),
    }
}

/// In-progress state for one `SF:` block.
struct FileBlock {
    path: String,
    lines: Vec<(u32, u64)>,
    branches: Vec<(u32, String, u64)>,
    // FN gives each function a declaration line; FNDA gives it hits. Joined
    // by name when the block ends.
    fn_lines: BTreeMap<String, u32>,
    fn_order: Vec<String>,
    fn_hits: BTreeMap<String, u64>,
}

impl FileBlock {
    fn new(path: String) -> FileBlock {
        FileBlock {
            path,
            lines: Vec::new(),
            branches: Vec::new(),
            fn_lines: BTreeMap::new(),
            fn_order: Vec::new(),
            fn_hits: BTreeMap::new(),
        }
    }

    fn finish(self) -> FileCoverage {
        let mut fc = FileCoverage::new(self.path);
        for (line, hits) in self.lines {
            fc.insert(Coverpoint::line(line, hits));
        }
        for (line, key, hits) in self.branches {
            fc.insert(Coverpoint {
                line,
                kind: CoverKind::Branch,
                key,
                hit_count: hits,
            });
        }
        for name in self.fn_order {
            let line = self.fn_lines[&name];
            let hits = self.fn_hits.get(&name).copied().unwrap_or(0);
            fc.insert(Coverpoint::function(line, &name, hits));
        }
        // FNDA records naming a function with no FN line cannot be located
        // and are dropped.
        fc
    }
}

/// Parses an LCOV `.info` stream. Input bytes are decoded as UTF-8 with
/// lossy replacement, so arbitrary bytes always yield either a snapshot or a
/// `MalformedRecord` error.
///
/// Repeated `SF:` blocks for the same path merge by hit-count summation.
/// The snapshot label is the first `TN:` value seen.
pub fn parse_info(input: &[u8]) -> Result<CoverageSnapshot, InfoError> {
    let text = String::from_utf8_lossy(input);
    parse_info_str(&text)
}

/// [`parse_info`] over an already-decoded string.
pub fn parse_info_str(text: &str) -> Result<CoverageSnapshot, InfoError> {
    let mut snapshot = CoverageSnapshot::default();
    let mut label: Option<String> = None;
    let mut block: Option<FileBlock> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }

        if line == "end_of_record" {
            match block.take() {
                Some(b) => snapshot.add_file(b.finish()),
                None => {
                    return Err(malformed(lineno, "end_of_record", "no open SF block"));
                }
            }
            continue;
        }

        let (directive, payload) = match line.split_once(':') {
            Some(parts) => parts,
            None => return Err(malformed(lineno, line, "missing ':' separator")),
        };

        match directive {
            "TN" => {
                if label.is_none() {
                    label = Some(payload.to_string());
                }
            }
            "SF" => {
                if let Some(b) = block.take() {
                    // SF without end_of_record: close the previous block.
                    snapshot.add_file(b.finish());
                }
                let path = normalize_path(payload);
                if path.is_empty() {
                    return Err(malformed(lineno, "SF", "empty source path"));
                }
                block = Some(FileBlock::new(path));
            }
            "DA" | "FN" | "FNDA" | "BRDA" | "LF" | "LH" | "FNF" | "FNH" | "BRF" | "BRH" => {
                let b = block
                    .as_mut()
                    .ok_or_else(|| malformed(lineno, directive, "record outside SF block"))?;
                parse_data_record(b, directive, payload, lineno)?;
            }
            other => return Err(malformed(lineno, other, "unknown directive")),
        }
    }

    if let Some(b) = block.take() {
        snapshot.add_file(b.finish());
    }
    snapshot.label = label.unwrap_or_default();
    Ok(snapshot)
}

fn parse_data_record(
    block: &mut FileBlock,
    directive: &str,
    payload: &str,
    lineno: usize,
) -> Result<(), InfoError> {
    match directive {
        "DA" => {
            // DA:<line>,<count>[,<checksum>] — checksum accepted and ignored.
            let mut parts = payload.splitn(3, ',');
            let line = parse_line_no(parts.next().unwrap_or(""), lineno, "DA")?;
            let count = parts
                .next()
                .ok_or_else(|| malformed(lineno, "DA", "missing hit count"))?;
            let hits = parse_count(count, lineno, "DA")?;
            block.lines.push((line, hits));
        }
        "FN" => {
            let (line, name) = payload
                .split_once(',')
                .ok_or_else(|| malformed(lineno, "FN", "expected <line>,<name>"))?;
            let line = parse_line_no(line, lineno, "FN")?;
            if !block.fn_lines.contains_key(name) {
                block.fn_lines.insert(name.to_string(), line);
                block.fn_order.push(name.to_string());
            }
        }
        "FNDA" => {
            let (count, name) = payload
                .split_once(',')
                .ok_or_else(|| malformed(lineno, "FNDA", "expected <count>,<name>"))?;
            let hits = parse_count(count, lineno, "FNDA")?;
            *block.fn_hits.entry(name.to_string()).or_insert(0) += hits;
        }
        "BRDA" => {
            // BRDA:<line>,<block>,<branch>,<count|->
            let parts: Vec<&str> = payload.split(',').collect();
            if parts.len() < 4 {
                return Err(malformed(lineno, "BRDA", "expected <line>,<block>,<branch>,<count>"));
            }
            let line = parse_line_no(parts[0], lineno, "BRDA")?;
            let count_field = parts[parts.len() - 1];
            // '-' means the branch expression was never evaluated.
            let hits = if count_field == "-" {
                0
            } else {
                parse_count(count_field, lineno, "BRDA")?
            };
            let key = parts[1..parts.len() - 1].join(",");
            block.branches.push((line, key, hits));
        }
        // Redundant summary counts: recomputed on output, ignored on input.
        "LF" | "LH" | "FNF" | "FNH" | "BRF" | "BRH" => {
            parse_count(payload, lineno, directive)?;
        }
        _ => unreachable!("caller dispatches known directives"),
    }
    Ok(())
}

fn parse_line_no(text: &str, lineno: usize, directive: &str) -> Result<u32, InfoError> {
    let n: u32 = text
        .trim()
        .parse()
        .map_err(|_| malformed(lineno, directive, format!("bad line number {text:?}")))?;
    if n == 0 {
        return Err(malformed(lineno, directive, "line numbers are 1-based"));
    }
    Ok(n)
}

fn parse_count(text: &str, lineno: usize, directive: &str) -> Result<u64, InfoError> {
    text.trim()
        .parse()
        .map_err(|_| malformed(lineno, directive, format!("bad count {text:?}")))
}

/// Serializes a snapshot in canonical form. The empty snapshot serializes to
/// an empty stream (a lone `TN:` line when it carries a label). Summary
/// counts (`FNF`/`FNH`/`BRF`/`BRH`/`LF`/`LH`) are recomputed from the
/// coverpoints; function and branch sections are omitted for files without
/// points of that kind.
pub fn serialize_info(snapshot: &CoverageSnapshot) -> String {
    let mut out = String::new();
    if snapshot.files().is_empty() && !snapshot.label.is_empty() {
        out.push_str("TN:");
        out.push_str(&snapshot.label);
        out.push('\n');
        return out;
    }
    for (path, fc) in snapshot.files() {
        out.push_str("TN:");
        out.push_str(&snapshot.label);
        out.push('\n');
        out.push_str("SF:");
        out.push_str(path);
        out.push('\n');

        let functions: Vec<&Coverpoint> = fc
            .points()
            .iter()
            .filter(|p| p.kind == CoverKind::Function)
            .collect();
        for p in &functions {
            out.push_str(&format!("FN:{},{}\n", p.line, p.key));
        }
        for p in &functions {
            out.push_str(&format!("FNDA:{},{}\n", p.hit_count, p.key));
        }
        if !functions.is_empty() {
            let (found, hit) = fc.summarize(CoverKind::Function);
            out.push_str(&format!("FNF:{found}\nFNH:{hit}\n"));
        }

        let mut any_branch = false;
        for p in fc.points().iter().filter(|p| p.kind == CoverKind::Branch) {
            out.push_str(&format!("BRDA:{},{},{}\n", p.line, p.key, p.hit_count));
            any_branch = true;
        }
        if any_branch {
            let (found, hit) = fc.summarize(CoverKind::Branch);
            out.push_str(&format!("BRF:{found}\nBRH:{hit}\n"));
        }

        for p in fc.points().iter().filter(|p| p.kind == CoverKind::Line) {
            out.push_str(&format!("DA:{},{}\n", p.line, p.hit_count));
        }
        let (found, hit) = fc.summarize(CoverKind::Line);
        out.push_str(&format!("LF:{found}\nLH:{hit}\nend_of_record\n"));
    }
    out
}

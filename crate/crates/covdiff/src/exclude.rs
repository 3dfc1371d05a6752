//! Exclusion of coverpoints before categorization: whole files by glob
//! pattern, and source regions by in-source pragma markers.
//!
//! Marker tokens match as substrings anywhere on a line, so they work from
//! inside comments. A point removed by a pragma but executed anyway is
//! recorded so the gate can flag it: formerly-unreachable code becoming
//! reachable must fail the run.

use globset::{Glob, GlobSet, GlobSetBuilder};
use thiserror::Error;

use crate::model::FileCoverage;

#[derive(Debug, Error)]
pub enum ExcludeError {
    #[error("invalid exclusion glob {pattern:?}: {source}")]
    BadGlob {
        pattern: String,
        source: globset::Error,
    },
    #[error("exclusion stop marker without matching start at line {line}")]
    UnmatchedStop { line: u32 },
    #[error("exclusion start and stop markers must differ")]
    MarkerClash,
}

/// What excluded a coverpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionOrigin {
    PathGlob,
    Pragma,
}

/// How coverpoints are excluded: path globs plus the three pragma tokens.
#[derive(Debug, Clone)]
pub struct ExclusionConfig {
    globs: Vec<String>,
    glob_set: GlobSet,
    pub marker_line: String,
    pub marker_start: String,
    pub marker_stop: String,
}

impl Default for ExclusionConfig {
    fn default() -> ExclusionConfig {
        ExclusionConfig::new(&[]).expect("empty glob list is valid")
    }
}

impl ExclusionConfig {
    pub fn new(path_globs: &[String]) -> Result<ExclusionConfig, ExcludeError> {
        ExclusionConfig::with_markers(
            path_globs,
            "LCOV_EXCL_LINE",
            "LCOV_EXCL_START",
            "LCOV_EXCL_STOP",
        )
    }

    pub fn with_markers(
        path_globs: &[String],
        marker_line: &str,
        marker_start: &str,
        marker_stop: &str,
    ) -> Result<ExclusionConfig, ExcludeError> {
        if marker_start == marker_stop {
            return Err(ExcludeError::MarkerClash);
        }
        let mut builder = GlobSetBuilder::new();
        for pattern in path_globs {
            let glob = Glob::new(pattern).map_err(|source| ExcludeError::BadGlob {
                pattern: pattern.clone(),
                source,
            })?;
            builder.add(glob);
        }
        let glob_set = builder.build().map_err(|source| ExcludeError::BadGlob {
            pattern: path_globs.join(","),
            source,
        })?;
        Ok(ExclusionConfig {
            globs: path_globs.to_vec(),
            glob_set,
            marker_line: marker_line.to_string(),
            marker_start: marker_start.to_string(),
            marker_stop: marker_stop.to_string(),
        })
    }

    pub fn globs(&self) -> &[String] {
        &self.globs
    }

    pub fn is_path_excluded(&self, path: &str) -> bool {
        !self.globs.is_empty() && self.glob_set.is_match(path)
    }
}

/// The split of one file's coverpoints into retained and excluded, with the
/// excluded-but-executed points recorded.
#[derive(Debug, Clone)]
pub struct ExclusionResult {
    pub retained: FileCoverage,
    /// `(line, hit_count, origin)` for every excluded point with hits.
    pub excluded_hits: Vec<(u32, u64, ExclusionOrigin)>,
    pub warnings: Vec<String>,
}

impl ExclusionResult {
    /// Excluded-but-hit locations that came from pragmas; these feed the
    /// gate, glob-excluded files do not.
    pub fn pragma_hits(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.excluded_hits
            .iter()
            .filter(|(_, _, origin)| *origin == ExclusionOrigin::Pragma)
            .map(|&(line, hits, _)| (line, hits))
    }
}

/// Computes the set of source lines excluded by pragma markers: every line
/// containing the line marker, plus every region from a start marker to its
/// matching stop (marker lines included). Start markers nest; an unmatched
/// start extends to end of file with a warning.
fn pragma_excluded_lines(
    source_lines: &[String],
    cfg: &ExclusionConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<bool>, ExcludeError> {
    let mut excluded = vec![false; source_lines.len()];
    let mut depth = 0usize;
    let mut open_line = 0u32;
    for (idx, text) in source_lines.iter().enumerate() {
        let line = idx as u32 + 1;
        let starts = text.contains(&cfg.marker_start);
        let stops = text.contains(&cfg.marker_stop);
        if starts && !stops {
            if depth == 0 {
                open_line = line;
            }
            depth += 1;
            excluded[idx] = true;
            continue;
        }
        if stops && !starts {
            if depth == 0 {
                return Err(ExcludeError::UnmatchedStop { line });
            }
            depth -= 1;
            excluded[idx] = true;
            continue;
        }
        if starts && stops {
            // single-line region
            excluded[idx] = true;
            continue;
        }
        if depth > 0 || text.contains(&cfg.marker_line) {
            excluded[idx] = true;
        }
    }
    if depth > 0 {
        warnings.push(format!(
            "unmatched {} at line {open_line}: exclusion extends to end of file",
            cfg.marker_start
        ));
    }
    Ok(excluded)
}

/// Applies exclusions to one file. Pragma scanning requires the source
/// text; without it only glob exclusion applies.
pub fn apply_exclusions(
    fc: &FileCoverage,
    source_lines: Option<&[String]>,
    cfg: &ExclusionConfig,
) -> Result<ExclusionResult, ExcludeError> {
    let mut warnings = Vec::new();

    if cfg.is_path_excluded(&fc.source_path) {
        let excluded_hits = fc
            .points()
            .iter()
            .filter(|p| p.is_hit())
            .map(|p| (p.line, p.hit_count, ExclusionOrigin::PathGlob))
            .collect();
        return Ok(ExclusionResult {
            retained: FileCoverage::new(fc.source_path.clone()),
            excluded_hits,
            warnings,
        });
    }

    let excluded_lines = match source_lines {
        Some(lines) => pragma_excluded_lines(lines, cfg, &mut warnings)?,
        None => Vec::new(),
    };
    let is_excluded = |line: u32| -> bool {
        excluded_lines.get(line as usize - 1).copied().unwrap_or(false)
    };

    let mut retained = FileCoverage::new(fc.source_path.clone());
    let mut excluded_hits = Vec::new();
    for p in fc.points() {
        if is_excluded(p.line) {
            if p.is_hit() {
                excluded_hits.push((p.line, p.hit_count, ExclusionOrigin::Pragma));
            }
        } else {
            retained.insert(p.clone());
        }
    }
    Ok(ExclusionResult { retained, excluded_hits, warnings })
}

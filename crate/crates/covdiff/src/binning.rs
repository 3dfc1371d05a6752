//! Date and owner binning of categorized coverpoints.
//!
//! Each point contributes one increment to a (date bin, category) cell and
//! one to an (owner, category) cell. Points whose line has no annotation go
//! to the reserved unknown bin and owner, so marginals always re-sum to the
//! category totals.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::categorize::{CategorizedFile, Revision};
use crate::history::{AnnotationSet, SECONDS_PER_DAY};
use crate::model::Category;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BinError {
    #[error("date bin cutoffs must be positive and strictly ascending: {reason}")]
    BadCutoffs { reason: String },
}

/// Ascending day cutoffs defining the date bins. Cutoffs `[7, 30, 180]`
/// yield bins `[0,7]`, `(7,30]`, `(30,180]`, `(180,∞)` — upper edges are
/// inclusive, so an edit aged exactly 7 days counts as "last 7 days".
#[derive(Debug, Clone, PartialEq)]
pub struct DateBinSpec {
    cutoffs: Vec<f64>,
}

impl Default for DateBinSpec {
    fn default() -> DateBinSpec {
        DateBinSpec { cutoffs: vec![7.0, 30.0, 180.0] }
    }
}

impl DateBinSpec {
    pub fn new(cutoffs: Vec<f64>) -> Result<DateBinSpec, BinError> {
        if cutoffs.is_empty() {
            return Err(BinError::BadCutoffs { reason: "at least one cutoff required".to_string() });
        }
        for (i, &c) in cutoffs.iter().enumerate() {
            if !c.is_finite() || c <= 0.0 {
                return Err(BinError::BadCutoffs { reason: format!("cutoff {c} is not positive") });
            }
            if i > 0 && c <= cutoffs[i - 1] {
                return Err(BinError::BadCutoffs {
                    reason: format!("{} does not ascend past {}", c, cutoffs[i - 1]),
                });
            }
        }
        Ok(DateBinSpec { cutoffs })
    }

    pub fn cutoffs(&self) -> &[f64] {
        &self.cutoffs
    }

    /// Number of bins, one more than the number of cutoffs.
    pub fn bin_count(&self) -> usize {
        self.cutoffs.len() + 1
    }

    /// Smallest bin whose inclusive upper edge admits the age; ages past the
    /// last cutoff land in the final open-ended bin.
    pub fn assign(&self, age_days: f64) -> usize {
        self.cutoffs
            .iter()
            .position(|&c| age_days <= c)
            .unwrap_or(self.cutoffs.len())
    }

    pub fn label(&self, bin: usize) -> String {
        if bin == 0 {
            format!("[0,{}]", self.cutoffs[0])
        } else if bin < self.cutoffs.len() {
            format!("({},{}]", self.cutoffs[bin - 1], self.cutoffs[bin])
        } else {
            format!("({},∞)", self.cutoffs[self.cutoffs.len() - 1])
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.bin_count()).map(|i| self.label(i)).collect()
    }
}

/// See [`DateBinSpec::assign`].
pub fn assign_date_bin(age_days: f64, spec: &DateBinSpec) -> usize {
    spec.assign(age_days)
}

/// Date-bin axis key: a bin index or the reserved unknown bin for
/// unannotated lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DateBin {
    Bin(usize),
    Unknown,
}

/// Owner axis key; unknown sorts last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum OwnerKey {
    Known(String),
    Unknown,
}

impl OwnerKey {
    pub fn display_name(&self) -> &str {
        match self {
            OwnerKey::Known(name) => name,
            OwnerKey::Unknown => "(unknown)",
        }
    }
}

impl fmt::Display for OwnerKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Tallies of categorized points along the date and owner axes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BinnedSummary {
    by_date: BTreeMap<(DateBin, Category), u64>,
    by_owner: BTreeMap<(OwnerKey, Category), u64>,
}

impl BinnedSummary {
    pub fn by_date(&self) -> &BTreeMap<(DateBin, Category), u64> {
        &self.by_date
    }

    pub fn by_owner(&self) -> &BTreeMap<(OwnerKey, Category), u64> {
        &self.by_owner
    }

    pub fn date_count(&self, bin: DateBin, category: Category) -> u64 {
        self.by_date.get(&(bin, category)).copied().unwrap_or(0)
    }

    /// Sums one category over the date axis (equals the owner-axis sum and
    /// the category total).
    pub fn category_total(&self, category: Category) -> u64 {
        self.by_date
            .iter()
            .filter(|((_, c), _)| *c == category)
            .map(|(_, &n)| n)
            .sum()
    }

    pub fn absorb(&mut self, other: &BinnedSummary) {
        for (k, v) in &other.by_date {
            *self.by_date.entry(*k).or_insert(0) += v;
        }
        for (k, v) in &other.by_owner {
            *self.by_owner.entry(k.clone()).or_insert(0) += v;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.by_date.is_empty()
    }

    fn record(&mut self, bin: DateBin, owner: OwnerKey, category: Category) {
        *self.by_date.entry((bin, category)).or_insert(0) += 1;
        *self.by_owner.entry((owner, category)).or_insert(0) += 1;
    }
}

/// Bins every point of a categorized file.
///
/// Current-revision points look up `annotations` under the file's current
/// path; baseline-revision points (their lines only exist in the old file)
/// use `baseline_annotations` under the baseline path when given, else the
/// unknown bin. An edit time in the future of `now` clamps to age zero
/// rather than failing the run.
pub fn bin_file(
    cf: &CategorizedFile,
    annotations: &AnnotationSet,
    baseline_annotations: Option<&AnnotationSet>,
    spec: &DateBinSpec,
    now: i64,
) -> BinnedSummary {
    let mut out = BinnedSummary::default();
    let base_path = cf.baseline_path.as_deref().unwrap_or(&cf.source_path);
    for point in &cf.points {
        let annotation = match point.revision {
            Revision::Current => annotations.lookup(&cf.source_path, point.point.line),
            Revision::Baseline => {
                baseline_annotations.and_then(|set| set.lookup(base_path, point.point.line))
            }
        };
        match annotation {
            Some(a) => {
                let age = ((now - a.edit_time) as f64 / SECONDS_PER_DAY).max(0.0);
                out.record(
                    DateBin::Bin(spec.assign(age)),
                    OwnerKey::Known(a.owner.clone()),
                    point.category,
                );
            }
            None => out.record(DateBin::Unknown, OwnerKey::Unknown, point.category),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwnerMode {
    /// Every owner associated with any coverpoint.
    AllCode,
    /// Only owners responsible for untested code (UNC, LBC, UIC, UBC).
    UntestedOnly,
}

/// One owner-table row: the owner's per-category tallies and the untested
/// total used for ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnerRow {
    pub owner: OwnerKey,
    pub counts: BTreeMap<Category, u64>,
    pub untested: u64,
}

/// Aggregates owner tallies across files into ordered table rows: descending
/// untested count, then owner name.
pub fn owner_table(summaries: &[BinnedSummary], mode: OwnerMode) -> Vec<OwnerRow> {
    let mut per_owner: BTreeMap<OwnerKey, BTreeMap<Category, u64>> = BTreeMap::new();
    for s in summaries {
        for ((owner, category), &n) in &s.by_owner {
            *per_owner.entry(owner.clone()).or_default().entry(*category).or_insert(0) += n;
        }
    }
    let mut rows: Vec<OwnerRow> = per_owner
        .into_iter()
        .map(|(owner, counts)| {
            let untested = counts
                .iter()
                .filter(|(c, _)| c.is_untested())
                .map(|(_, &n)| n)
                .sum();
            OwnerRow { owner, counts, untested }
        })
        .filter(|row| match mode {
            OwnerMode::AllCode => true,
            OwnerMode::UntestedOnly => row.untested > 0,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.untested
            .cmp(&a.untested)
            .then_with(|| a.owner.display_name().cmp(b.owner.display_name()))
    });
    rows
}

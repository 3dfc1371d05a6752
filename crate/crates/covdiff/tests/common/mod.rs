//! Shared test machinery: a random edit-script generator that produces a
//! baseline/current file pair with its unified diff, and an independent
//! truth-table oracle that labels every slot straight from the category
//! definitions (no line-map arithmetic involved).
#![allow(dead_code)] // each test target uses a different subset

use std::collections::BTreeMap;

use rand::Rng;
use rand::rngs::StdRng;

use covdiff::categorize::{CategorizedFile, Revision};
use covdiff::model::{Category, CoverKind, Coverpoint, FileCoverage};

/// Coverage state of one side of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// The line is not treated as code in this revision.
    Absent,
    Unhit,
    Hit,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Absent, Slot::Unhit, Slot::Hit];

    fn present(self) -> bool {
        !matches!(self, Slot::Absent)
    }

    fn hit(self) -> bool {
        matches!(self, Slot::Hit)
    }

    fn random(rng: &mut StdRng) -> Slot {
        Slot::ALL[rng.random_range(0..3)]
    }
}

/// One line of the synthetic file pair with its ground truth.
#[derive(Debug, Clone, Copy)]
pub enum LineTruth {
    /// Line exists in both revisions (base line, cur line, base slot, cur slot).
    Paired(u32, u32, Slot, Slot),
    /// Line exists only in the current revision.
    Inserted(u32, Slot),
    /// Line exists only in the baseline revision.
    Deleted(u32, Slot),
}

/// A complete synthetic instance: coverage for both sides, the diff text,
/// and per-line truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub base_len: u32,
    pub cur_len: u32,
    pub truths: Vec<LineTruth>,
    pub diff_text: String,
    pub base_cov: FileCoverage,
    pub cur_cov: FileCoverage,
}

/// Reads the expected label for a slot combination directly from the three
/// category tables.
pub fn oracle_labels(truth: &LineTruth) -> Vec<(Revision, u32, Category)> {
    match *truth {
        LineTruth::Paired(base_line, cur_line, base, cur) => {
            if cur.present() && base.present() {
                let cat = match (base.hit(), cur.hit()) {
                    (true, true) => Category::Cbc,
                    (true, false) => Category::Lbc,
                    (false, true) => Category::Gbc,
                    (false, false) => Category::Ubc,
                };
                vec![(Revision::Current, cur_line, cat)]
            } else if cur.present() {
                let cat = if cur.hit() { Category::Gic } else { Category::Uic };
                vec![(Revision::Current, cur_line, cat)]
            } else if base.present() {
                let cat = if base.hit() { Category::Ecb } else { Category::Eub };
                vec![(Revision::Baseline, base_line, cat)]
            } else {
                vec![]
            }
        }
        LineTruth::Inserted(cur_line, cur) => {
            if cur.present() {
                let cat = if cur.hit() { Category::Gnc } else { Category::Unc };
                vec![(Revision::Current, cur_line, cat)]
            } else {
                vec![]
            }
        }
        LineTruth::Deleted(base_line, base) => {
            if base.present() {
                let cat = if base.hit() { Category::Dcb } else { Category::Dub };
                vec![(Revision::Baseline, base_line, cat)]
            } else {
                vec![]
            }
        }
    }
}

/// The reversal involution over categories.
pub fn sigma(category: Category) -> Category {
    match category {
        Category::Cbc => Category::Cbc,
        Category::Ubc => Category::Ubc,
        Category::Gbc => Category::Lbc,
        Category::Lbc => Category::Gbc,
        Category::Gnc => Category::Dcb,
        Category::Dcb => Category::Gnc,
        Category::Unc => Category::Dub,
        Category::Dub => Category::Unc,
        Category::Gic => Category::Ecb,
        Category::Ecb => Category::Gic,
        Category::Uic => Category::Eub,
        Category::Eub => Category::Uic,
    }
}

/// Edit ops in base order; insert runs attach before/after keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Keep,
    Delete,
    Insert,
}

/// Builds an [`Instance`] from an op script and per-slot coverage chosen by
/// `pick` (called with the truth of the line being assigned).
fn instance_from_script(path: &str, ops: &[EditOp], mut pick: impl FnMut(bool) -> (Slot, Slot)) -> Instance {
    let mut truths = Vec::new();
    let mut base_line = 0u32;
    let mut cur_line = 0u32;
    for op in ops {
        match op {
            EditOp::Keep => {
                base_line += 1;
                cur_line += 1;
                let (b, c) = pick(true);
                truths.push(LineTruth::Paired(base_line, cur_line, b, c));
            }
            EditOp::Delete => {
                base_line += 1;
                let (b, _) = pick(false);
                truths.push(LineTruth::Deleted(base_line, b));
            }
            EditOp::Insert => {
                cur_line += 1;
                let (_, c) = pick(false);
                truths.push(LineTruth::Inserted(cur_line, c));
            }
        }
    }
    let diff_text = diff_from_ops(path, ops);
    let (base_cov, cur_cov) = coverage_from_truths(path, &truths);
    Instance { base_len: base_line, cur_len: cur_line, truths, diff_text, base_cov, cur_cov }
}

/// Zero-context unified diff text for an op script: each maximal run of
/// non-keep ops becomes one hunk.
fn diff_from_ops(path: &str, ops: &[EditOp]) -> String {
    let mut out = format!("--- a/{path}\n+++ b/{path}\n");
    let mut base = 0u32;
    let mut cur = 0u32;
    let mut i = 0;
    while i < ops.len() {
        if ops[i] == EditOp::Keep {
            base += 1;
            cur += 1;
            i += 1;
            continue;
        }
        let mut dels = 0u32;
        let mut inss = 0u32;
        while i < ops.len() && ops[i] != EditOp::Keep {
            match ops[i] {
                EditOp::Delete => dels += 1,
                EditOp::Insert => inss += 1,
                EditOp::Keep => unreachable!(),
            }
            i += 1;
        }
        let base_start = if dels > 0 { base + 1 } else { base };
        let cur_start = if inss > 0 { cur + 1 } else { cur };
        out.push_str(&format!("@@ -{base_start},{dels} +{cur_start},{inss} @@\n"));
        for d in 0..dels {
            out.push_str(&format!("-base line {}\n", base + 1 + d));
        }
        for a in 0..inss {
            out.push_str(&format!("+cur line {}\n", cur + 1 + a));
        }
        base += dels;
        cur += inss;
    }
    out
}

fn coverage_from_truths(path: &str, truths: &[LineTruth]) -> (FileCoverage, FileCoverage) {
    let mut base = FileCoverage::new(path);
    let mut cur = FileCoverage::new(path);
    let add = |fc: &mut FileCoverage, line: u32, slot: Slot| {
        match slot {
            Slot::Absent => {}
            Slot::Unhit => fc.insert(Coverpoint::line(line, 0)),
            Slot::Hit => fc.insert(Coverpoint::line(line, 1)),
        }
    };
    for t in truths {
        match *t {
            LineTruth::Paired(b, c, bs, cs) => {
                add(&mut base, b, bs);
                add(&mut cur, c, cs);
            }
            LineTruth::Inserted(c, cs) => add(&mut cur, c, cs),
            LineTruth::Deleted(b, bs) => add(&mut base, b, bs),
        }
    }
    (base, cur)
}

/// Random multi-hunk instance: ~30 base lines max, random deletions,
/// insertions, and coverage slots.
pub fn random_instance(rng: &mut StdRng, path: &str) -> Instance {
    let base_len = rng.random_range(1..=30u32);
    let mut ops = Vec::new();
    for _ in 0..base_len {
        while rng.random_range(0..100) < 12 {
            ops.push(EditOp::Insert);
        }
        if rng.random_range(0..100) < 20 {
            ops.push(EditOp::Delete);
        } else {
            ops.push(EditOp::Keep);
        }
    }
    while rng.random_range(0..100) < 12 {
        ops.push(EditOp::Insert);
    }
    instance_from_script(path, &ops, |_paired| (Slot::random(rng), Slot::random(rng)))
}

/// The full deterministic combination sweep: every (status,
/// baseline-coverpoint presence, hit state) combination, tiled over a file
/// of `n` slots.
pub fn exhaustive_instance(path: &str, n: u32) -> Instance {
    // 9 paired combos, 3 inserted, 3 deleted
    let mut combos: Vec<(EditOp, Slot, Slot)> = Vec::new();
    for b in Slot::ALL {
        for c in Slot::ALL {
            combos.push((EditOp::Keep, b, c));
        }
    }
    for c in Slot::ALL {
        combos.push((EditOp::Insert, Slot::Absent, c));
    }
    for b in Slot::ALL {
        combos.push((EditOp::Delete, b, Slot::Absent));
    }

    let ops: Vec<EditOp> = (0..n).map(|i| combos[i as usize % combos.len()].0).collect();
    let mut idx = 0usize;
    instance_from_script(path, &ops, |_paired| {
        let (_, b, c) = combos[idx % combos.len()];
        idx += 1;
        (b, c)
    })
}

/// Builds an instance from an explicit op script with per-op slot choices
/// (`slots[i]` pairs with `ops[i]`).
pub fn scripted_instance(path: &str, ops: &[EditOp], slots: &[(Slot, Slot)]) -> Instance {
    assert_eq!(ops.len(), slots.len());
    let mut idx = 0usize;
    instance_from_script(path, ops, |_paired| {
        let s = slots[idx];
        idx += 1;
        s
    })
}

/// Collects `(revision, line, category)` triples from a categorized file.
pub fn observed_labels(cf: &CategorizedFile) -> Vec<(Revision, u32, Category)> {
    cf.points
        .iter()
        .filter(|p| p.point.kind == CoverKind::Line)
        .map(|p| (p.revision, p.point.line, p.category))
        .collect()
}

/// Expected triples from the instance truth, sorted the same way the
/// categorizer sorts.
pub fn expected_labels(instance: &Instance) -> Vec<(Revision, u32, Category)> {
    let mut out: Vec<(Revision, u32, Category)> = instance
        .truths
        .iter()
        .flat_map(oracle_labels)
        .collect();
    out.sort_by_key(|&(rev, line, _)| (line, rev));
    out
}

/// Materializes the two revisions' text from an op script. Contents are
/// unique per line: paired lines share theirs, edited lines do not, so a
/// content-based alignment of the two texts is unambiguous.
pub fn materialize_texts(ops: &[EditOp]) -> (Vec<String>, Vec<String>) {
    let mut base = Vec::new();
    let mut cur = Vec::new();
    for op in ops {
        match op {
            EditOp::Keep => {
                let text = format!("shared-{}", base.len() + 1);
                base.push(text.clone());
                cur.push(text);
            }
            EditOp::Delete => base.push(format!("del-{}", base.len() + 1)),
            EditOp::Insert => cur.push(format!("ins-{}", cur.len() + 1)),
        }
    }
    (base, cur)
}

/// Unified diff text for an op script with `context` lines of context
/// around each edit run; runs whose context regions touch merge into one
/// hunk, the way diff tools emit them.
pub fn diff_with_context(path: &str, ops: &[EditOp], context: usize) -> String {
    let (base, cur) = materialize_texts(ops);

    // expand each maximal edit run by `context` ops on both sides, merging
    // overlapping or touching spans
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < ops.len() {
        if ops[i] == EditOp::Keep {
            i += 1;
            continue;
        }
        let start = i;
        while i < ops.len() && ops[i] != EditOp::Keep {
            i += 1;
        }
        let lo = start.saturating_sub(context);
        let hi = (i + context).min(ops.len());
        match spans.last_mut() {
            Some((_, prev_hi)) if lo <= *prev_hi => *prev_hi = hi,
            _ => spans.push((lo, hi)),
        }
    }

    let mut out = format!("--- a/{path}\n+++ b/{path}\n");
    let mut base_before = 0u32;
    let mut cur_before = 0u32;
    let mut op_index = 0usize;
    for &(lo, hi) in &spans {
        while op_index < lo {
            match ops[op_index] {
                EditOp::Keep => {
                    base_before += 1;
                    cur_before += 1;
                }
                EditOp::Delete => base_before += 1,
                EditOp::Insert => cur_before += 1,
            }
            op_index += 1;
        }
        let mut base_len = 0u32;
        let mut cur_len = 0u32;
        let mut body = String::new();
        let mut b = base_before;
        let mut c = cur_before;
        for op in &ops[lo..hi] {
            match op {
                EditOp::Keep => {
                    body.push_str(&format!(" {}\n", base[b as usize]));
                    b += 1;
                    c += 1;
                    base_len += 1;
                    cur_len += 1;
                }
                EditOp::Delete => {
                    body.push_str(&format!("-{}\n", base[b as usize]));
                    b += 1;
                    base_len += 1;
                }
                EditOp::Insert => {
                    body.push_str(&format!("+{}\n", cur[c as usize]));
                    c += 1;
                    cur_len += 1;
                }
            }
        }
        let base_start = if base_len == 0 { base_before } else { base_before + 1 };
        let cur_start = if cur_len == 0 { cur_before } else { cur_before + 1 };
        out.push_str(&format!("@@ -{base_start},{base_len} +{cur_start},{cur_len} @@\n"));
        out.push_str(&body);
        base_before = b;
        cur_before = c;
        op_index = hi;
    }
    out
}

/// Brute-force longest-common-subsequence alignment of two texts, as
/// 1-based line pairs. With unique line contents the LCS is unambiguous.
pub fn lcs_pairs(base: &[String], cur: &[String]) -> Vec<(u32, u32)> {
    let n = base.len();
    let m = cur.len();
    let mut table = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            table[i][j] = if base[i] == cur[j] {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    let mut pairs = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if base[i] == cur[j] {
            pairs.push((i as u32 + 1, j as u32 + 1));
            i += 1;
            j += 1;
        } else if table[i + 1][j] >= table[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

/// Anchor of a point in revision-independent coordinates:
/// (line in the older file, line in the newer file, kind, key) with the
/// "older/newer" sense fixed to the FIRST run's orientation.
pub type Anchor = (Option<u32>, Option<u32>, CoverKind, String);

/// Anchors of all points of a run; `a_is_base` says whether file A (the
/// anchor's first coordinate) served as the baseline in this run.
pub fn anchored_labels(cf: &CategorizedFile, a_is_base: bool) -> BTreeMap<Anchor, Category> {
    let mut out = BTreeMap::new();
    for p in &cf.points {
        let (line_in_base_of_run, line_in_cur_of_run) = match p.revision {
            Revision::Current => (p.mapped_line, Some(p.point.line)),
            Revision::Baseline => (Some(p.point.line), p.mapped_line),
        };
        let (a, b) = if a_is_base {
            (line_in_base_of_run, line_in_cur_of_run)
        } else {
            (line_in_cur_of_run, line_in_base_of_run)
        };
        let prev =
            out.insert((a, b, p.point.kind, p.point.key.clone()), p.category);
        assert!(prev.is_none(), "two points on one anchor");
    }
    out
}

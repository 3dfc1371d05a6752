//! Fixed-width text report.
//!
//! Differential runs print one category table per coverpoint kind (columns
//! in priority order) for files and directories, then the date-bin and owner
//! tables when history is available and the gate verdict when one was
//! requested. Runs without a baseline and without history fall back to the
//! traditional found/hit view.

use std::fmt::Write;

use crate::model::{Category, CoverKind};

use super::{BinTable, KindBlock, ReportDocument};

const COUNT_W: usize = 6;
const COV_W: usize = 8;

pub fn emit_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    header(&mut out, doc);
    for kind in doc.active_kinds() {
        if doc.meta.has_baseline || doc.meta.has_history {
            category_table(&mut out, doc, kind);
        } else {
            coverage_table(&mut out, doc, kind);
        }
    }
    if let Some(bins) = &doc.project.date_bins {
        bin_table(&mut out, bins);
    }
    if let Some(owners) = &doc.owners {
        owner_table(&mut out, doc, owners);
    }
    if let Some(gate) = &doc.gate {
        gate_section(&mut out, gate);
    }
    out
}

fn header(out: &mut String, doc: &ReportDocument) {
    let m = &doc.meta;
    out.push_str("coverage report\n");
    let _ = writeln!(out, "current:     {}", m.current);
    let _ = writeln!(out, "baseline:    {}", m.baseline.as_deref().unwrap_or("(none)"));
    let _ = writeln!(out, "diff:        {}", m.diff.as_deref().unwrap_or("(none)"));
    let _ = writeln!(out, "annotations: {}", m.annotations.as_deref().unwrap_or("(none)"));
    let _ = writeln!(out, "now:         {}", m.reference_time);
    if m.has_history {
        let _ = writeln!(
            out,
            "date bins:   {} (upper edge inclusive)",
            m.bin_labels.join(" ")
        );
        let _ = writeln!(out, "owner field: {}", m.owner_source);
    }
}

fn path_width(doc: &ReportDocument) -> usize {
    doc.files
        .iter()
        .map(|f| f.path.len())
        .chain(doc.directories.iter().map(|d| dir_label(&d.path).len()))
        .chain(std::iter::once("TOTAL".len()))
        .max()
        .unwrap_or(5)
        .max(4)
}

fn dir_label(path: &str) -> &str {
    if path.is_empty() { "." } else { path }
}

fn category_header(out: &mut String, label_w: usize) {
    let _ = write!(out, "{:<label_w$}", "path");
    for cat in Category::ALL {
        let _ = write!(out, "{:>COUNT_W$}", cat.name());
    }
    let _ = write!(out, "{:>COV_W$}{:>COV_W$}{:>COV_W$}", "found", "hit", "cov");
    out.push('\n');
}

fn category_row(out: &mut String, label: &str, block: &KindBlock, label_w: usize) {
    let _ = write!(out, "{label:<label_w$}");
    for cat in Category::ALL {
        let _ = write!(out, "{:>COUNT_W$}", block.count(cat));
    }
    let _ = write!(
        out,
        "{:>COV_W$}{:>COV_W$}{:>COV_W$}",
        block.found,
        block.hit,
        block.percent()
    );
    out.push('\n');
}

fn category_table(out: &mut String, doc: &ReportDocument, kind: CoverKind) {
    let label_w = path_width(doc) + 2;
    let _ = writeln!(out, "\n[{} categories]", kind.name());
    category_header(out, label_w);
    for file in &doc.files {
        category_row(out, &file.path, file.kind_block(kind), label_w);
    }
    category_row(out, "TOTAL", doc.project.kind_block(kind), label_w);

    if doc.directories.len() > 1 || doc.directories.iter().any(|d| !d.path.is_empty()) {
        let _ = writeln!(out, "\n[{} categories by directory]", kind.name());
        category_header(out, label_w);
        for dir in &doc.directories {
            category_row(out, dir_label(&dir.path), dir.kind_block(kind), label_w);
        }
        category_row(out, "TOTAL", doc.project.kind_block(kind), label_w);
    }
}

fn coverage_row(out: &mut String, label: &str, block: &KindBlock, label_w: usize) {
    let _ = writeln!(
        out,
        "{label:<label_w$}{:>COV_W$}{:>COV_W$}{:>COV_W$}",
        block.found,
        block.hit,
        block.percent()
    );
}

fn coverage_table(out: &mut String, doc: &ReportDocument, kind: CoverKind) {
    let label_w = path_width(doc) + 2;
    let _ = writeln!(out, "\n[{} coverage]", kind.name());
    let _ = writeln!(
        out,
        "{:<label_w$}{:>COV_W$}{:>COV_W$}{:>COV_W$}",
        "path", "found", "hit", "cov"
    );
    for file in &doc.files {
        coverage_row(out, &file.path, file.kind_block(kind), label_w);
    }
    coverage_row(out, "TOTAL", doc.project.kind_block(kind), label_w);
}

fn bin_table(out: &mut String, bins: &BinTable) {
    out.push_str("\n[categories by date bin]\n");
    let label_w = bins
        .labels
        .iter()
        .map(String::len)
        .chain(["(unknown)".len(), "TOTAL".len()])
        .max()
        .unwrap_or(9)
        + 2;
    let _ = write!(out, "{:<label_w$}", "bin");
    for cat in Category::ALL {
        let _ = write!(out, "{:>COUNT_W$}", cat.name());
    }
    out.push('\n');

    let bin_count = bins.labels.len();
    let mut show: Vec<(String, usize)> =
        bins.labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    if bins.any_unknown {
        show.push(("(unknown)".to_string(), bin_count));
    }
    for (label, idx) in show {
        let _ = write!(out, "{label:<label_w$}");
        for cat in Category::ALL {
            let n = bins.rows.get(&cat).map(|row| row[idx]).unwrap_or(0);
            let _ = write!(out, "{n:>COUNT_W$}");
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<label_w$}", "TOTAL");
    for cat in Category::ALL {
        let n: u64 = bins.rows.get(&cat).map(|row| row.iter().sum()).unwrap_or(0);
        let _ = write!(out, "{n:>COUNT_W$}");
    }
    out.push('\n');
}

fn owner_table(out: &mut String, doc: &ReportDocument, owners: &[super::OwnerRowDoc]) {
    let mode = doc.meta.show_owners.as_deref().unwrap_or("all");
    let _ = writeln!(out, "\n[owners ({mode})]");
    let label_w = owners
        .iter()
        .map(|o| o.owner.len())
        .chain(std::iter::once("owner".len()))
        .max()
        .unwrap_or(5)
        + 2;
    let _ = write!(out, "{:<label_w$}{:>COV_W$}", "owner", "untested");
    for cat in Category::ALL {
        let _ = write!(out, "{:>COUNT_W$}", cat.name());
    }
    out.push('\n');
    for row in owners {
        let _ = write!(out, "{:<label_w$}{:>COV_W$}", row.owner, row.untested);
        for cat in Category::ALL {
            let _ = write!(out, "{:>COUNT_W$}", row.counts.get(&cat).copied().unwrap_or(0));
        }
        out.push('\n');
    }
}

fn gate_section(out: &mut String, gate: &super::GateDoc) {
    out.push_str("\n[gate]\n");
    let _ = writeln!(out, "criteria: {}", gate.criteria);
    for violation in &gate.violations {
        let _ = writeln!(out, "violation: {violation}");
    }
    let result = if gate.passed {
        "PASS".to_string()
    } else if gate.waived {
        "FAIL (waived)".to_string()
    } else {
        "FAIL".to_string()
    };
    let _ = writeln!(out, "result: {result}");
}

//! Static HTML report: a project index, one page per directory, and one
//! annotated source page per file.
//!
//! Pages are self-contained (embedded CSS, no external assets). Every line
//! carries its category as a text label as well as a color, and the pages
//! expose the navigation anchors: jump to the first line of a category, and
//! from any line to the next line in the same category or the next line
//! owned by the same account in that category.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::model::{Category, CoverKind};

use super::{DirReport, FileReport, KindBlock, ReportDocument, parent_dir};

const STYLE: &str = "\
body { font-family: sans-serif; margin: 1.5em; color: #222; }
h1 { font-size: 1.3em; } h2 { font-size: 1.1em; margin-top: 1.2em; }
table { border-collapse: collapse; margin: 0.5em 0; }
th, td { border: 1px solid #bbb; padding: 2px 8px; text-align: right; }
th:first-child, td:first-child { text-align: left; }
td.src { text-align: left; font-family: monospace; white-space: pre; }
td.num { font-family: monospace; }
.meta { color: #555; font-size: 0.9em; }
.cat { font-weight: bold; padding: 0 4px; }
a { text-decoration: none; }
.cat-unc { background: #e69f00; }
.cat-lbc { background: #d55e00; color: #fff; }
.cat-uic { background: #f0e442; }
.cat-ubc { background: #c8c8c8; }
.cat-gbc { background: #56b4e9; }
.cat-gic { background: #cc79a7; }
.cat-gnc { background: #009e73; color: #fff; }
.cat-cbc { background: #d8ecd8; }
.cat-eub { background: #ead9c2; }
.cat-ecb { background: #d9c2ea; }
.cat-dub { background: #e0e0ef; }
.cat-dcb { background: #c2d3ea; }
tr.excluded td { color: #999; }
";

pub fn emit_html(doc: &ReportDocument, out_dir: &Path) -> io::Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("index.html"), index_page(doc))?;
    for dir in &doc.directories {
        if dir.path.is_empty() {
            continue; // root files are listed on the index page
        }
        let page_dir = out_dir.join(sanitize_rel(&dir.path));
        fs::create_dir_all(&page_dir)?;
        fs::write(page_dir.join("index.html"), dir_page(doc, dir))?;
    }
    for file in &doc.files {
        let rel = file_page_path(&file.path);
        let full = out_dir.join(&rel);
        if let Some(parent) = full.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(full, file_page(doc, file))?;
    }
    Ok(())
}

/// Output-tree location of a file's page: `<dir>/<name>.html`.
fn file_page_path(source_path: &str) -> PathBuf {
    let mut p = sanitize_rel(source_path);
    let name = p.file_name().map(|n| n.to_string_lossy().to_string()).unwrap_or_default();
    p.set_file_name(format!("{name}.html"));
    p
}

/// Keeps generated pages inside the output tree even for odd source paths.
fn sanitize_rel(path: &str) -> PathBuf {
    let mut out = PathBuf::new();
    for seg in path.split('/') {
        match seg {
            "" | "." => {}
            ".." => out.push("_up_"),
            s => out.push(s),
        }
    }
    if out.as_os_str().is_empty() {
        out.push("_root_");
    }
    out
}

fn depth_of(path: &str) -> usize {
    sanitize_rel(path).components().count()
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn cat_span(category: Category) -> String {
    format!(
        "<span class=\"cat cat-{}\">{}</span>",
        category.name().to_lowercase(),
        category.name()
    )
}

fn page(title: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n<title>{}</title>\n<style>\n{STYLE}</style></head>\n<body>\n{body}</body></html>\n",
        escape(title)
    )
}

fn meta_block(doc: &ReportDocument) -> String {
    let m = &doc.meta;
    let mut out = String::from("<p class=\"meta\">");
    out.push_str(&format!("current: {}", escape(&m.current)));
    if let Some(b) = &m.baseline {
        out.push_str(&format!(" | baseline: {}", escape(b)));
    }
    if let Some(d) = &m.diff {
        out.push_str(&format!(" | diff: {}", escape(d)));
    }
    if let Some(a) = &m.annotations {
        out.push_str(&format!(" | annotations: {}", escape(a)));
    }
    out.push_str(&format!(" | now: {}", m.reference_time));
    if m.has_history {
        out.push_str(&format!(
            " | date bins: {} (upper edge inclusive) | owner field: {}",
            escape(&m.bin_labels.join(" ")),
            m.owner_source
        ));
    }
    out.push_str("</p>\n");
    out
}

fn summary_table<'a>(
    doc: &ReportDocument,
    rows: impl Iterator<Item = (String, &'a KindBlock, Option<String>)>,
) -> String {
    let differential = doc.meta.has_baseline || doc.meta.has_history;
    let mut out = String::from("<table>\n<tr><th>path</th>");
    if differential {
        for cat in Category::ALL {
            out.push_str(&format!("<th>{}</th>", cat.name()));
        }
    }
    out.push_str("<th>found</th><th>hit</th><th>cov</th></tr>\n");
    for (label, block, href) in rows {
        let cell = match href {
            Some(href) => format!("<a href=\"{}\">{}</a>", href, escape(&label)),
            None => escape(&label),
        };
        out.push_str(&format!("<tr><td>{cell}</td>"));
        if differential {
            for cat in Category::ALL {
                out.push_str(&format!("<td>{}</td>", block.count(cat)));
            }
        }
        out.push_str(&format!(
            "<td>{}</td><td>{}</td><td>{}</td></tr>\n",
            block.found,
            block.hit,
            block.percent()
        ));
    }
    out.push_str("</table>\n");
    out
}

fn legend(doc: &ReportDocument) -> String {
    if !doc.meta.has_baseline && !doc.meta.has_history {
        return String::new();
    }
    let mut out = String::from("<p class=\"meta\">categories: ");
    for cat in Category::ALL {
        out.push_str(&cat_span(cat));
        out.push(' ');
    }
    out.push_str("</p>\n");
    out
}

fn bin_table_html(bins: &super::BinTable) -> String {
    let mut out = String::from("<h2>categories by date bin</h2>\n<table>\n<tr><th>bin</th>");
    for cat in Category::ALL {
        out.push_str(&format!("<th>{}</th>", cat.name()));
    }
    out.push_str("</tr>\n");
    let bin_count = bins.labels.len();
    let mut shown: Vec<(String, usize)> =
        bins.labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    if bins.any_unknown {
        shown.push(("(unknown)".to_string(), bin_count));
    }
    for (label, idx) in shown {
        out.push_str(&format!("<tr><td>{}</td>", escape(&label)));
        for cat in Category::ALL {
            let n = bins.rows.get(&cat).map(|r| r[idx]).unwrap_or(0);
            out.push_str(&format!("<td>{n}</td>"));
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</table>\n");
    out
}

fn index_page(doc: &ReportDocument) -> String {
    let mut body = String::from("<h1>coverage report</h1>\n");
    body.push_str(&meta_block(doc));
    body.push_str(&legend(doc));

    for kind in doc.active_kinds() {
        body.push_str(&format!("<h2>{} summary</h2>\n", kind.name()));
        body.push_str(&summary_table(
            doc,
            std::iter::once(("TOTAL".to_string(), doc.project.kind_block(kind), None)),
        ));
    }
    if let Some(bins) = &doc.project.date_bins {
        body.push_str(&bin_table_html(bins));
    }
    if let Some(owners) = &doc.owners {
        body.push_str("<h2>owners</h2>\n<table>\n<tr><th>owner</th><th>untested</th>");
        for cat in Category::ALL {
            body.push_str(&format!("<th>{}</th>", cat.name()));
        }
        body.push_str("</tr>\n");
        for row in owners {
            body.push_str(&format!("<tr><td>{}</td><td>{}</td>", escape(&row.owner), row.untested));
            for cat in Category::ALL {
                body.push_str(&format!("<td>{}</td>", row.counts.get(&cat).copied().unwrap_or(0)));
            }
            body.push_str("</tr>\n");
        }
        body.push_str("</table>\n");
    }
    if let Some(gate) = &doc.gate {
        body.push_str("<h2>gate</h2>\n");
        body.push_str(&format!("<p>criteria: {}</p>\n", escape(&gate.criteria)));
        if !gate.violations.is_empty() {
            body.push_str("<ul>\n");
            for v in &gate.violations {
                body.push_str(&format!("<li>{}</li>\n", escape(&v.to_string())));
            }
            body.push_str("</ul>\n");
        }
        let result = if gate.passed {
            "PASS"
        } else if gate.waived {
            "FAIL (waived)"
        } else {
            "FAIL"
        };
        body.push_str(&format!("<p><strong>result: {result}</strong></p>\n"));
    }

    let dirs: Vec<&DirReport> =
        doc.directories.iter().filter(|d| !d.path.is_empty()).collect();
    if !dirs.is_empty() {
        body.push_str("<h2>directories</h2>\n");
        body.push_str(&summary_table(
            doc,
            dirs.iter().map(|d| {
                (
                    d.path.clone(),
                    d.kind_block(CoverKind::Line),
                    Some(format!("{}/index.html", sanitize_rel(&d.path).display())),
                )
            }),
        ));
    }
    let root_files: Vec<&FileReport> =
        doc.files.iter().filter(|f| parent_dir(&f.path).is_empty()).collect();
    if !root_files.is_empty() {
        body.push_str("<h2>files</h2>\n");
        body.push_str(&summary_table(
            doc,
            root_files.iter().map(|f| {
                (
                    f.path.clone(),
                    f.kind_block(CoverKind::Line),
                    Some(file_page_path(&f.path).display().to_string()),
                )
            }),
        ));
    }
    page("coverage report", &body)
}

fn dir_page(doc: &ReportDocument, dir: &DirReport) -> String {
    let up = "../".repeat(depth_of(&dir.path));
    let mut body = format!(
        "<p><a href=\"{up}index.html\">&larr; project</a></p>\n<h1>{}</h1>\n",
        escape(&dir.path)
    );
    body.push_str(&legend(doc));
    for kind in doc.active_kinds() {
        body.push_str(&format!("<h2>{} summary</h2>\n", kind.name()));
        let files = doc.files.iter().filter(|f| dir.files.contains(&f.path));
        body.push_str(&summary_table(
            doc,
            files
                .map(|f| {
                    let name = f.path.rsplit('/').next().unwrap_or(&f.path).to_string();
                    (name.clone(), f.kind_block(kind), Some(format!("{}.html", name)))
                })
                .chain(std::iter::once((
                    "TOTAL".to_string(),
                    dir.kind_block(kind),
                    None,
                ))),
        ));
    }
    page(&dir.path, &body)
}

fn file_page(doc: &ReportDocument, file: &FileReport) -> String {
    let dir = parent_dir(&file.path);
    let up = "../".repeat(depth_of(&dir));
    let mut body = format!(
        "<p><a href=\"{up}index.html\">&larr; project</a></p>\n<h1>{}</h1>\n",
        escape(&file.path)
    );
    if let Some(base) = &file.baseline_path {
        body.push_str(&format!(
            "<p class=\"meta\">baseline path: {}</p>\n",
            escape(base)
        ));
    }
    body.push_str(&legend(doc));
    for kind in doc.active_kinds() {
        body.push_str(&format!("<h2>{} summary</h2>\n", kind.name()));
        body.push_str(&summary_table(
            doc,
            std::iter::once((file.path.clone(), file.kind_block(kind), None)),
        ));
    }
    if let Some(bins) = &file.date_bins {
        if !bins.is_empty() {
            body.push_str(&bin_table_html(bins));
        }
    }

    // first-line-in-category navigation
    let mut first_of: BTreeMap<Category, u32> = BTreeMap::new();
    let mut cat_lines: BTreeMap<Category, Vec<u32>> = BTreeMap::new();
    let mut owner_cat_lines: BTreeMap<(String, Category), Vec<u32>> = BTreeMap::new();
    for row in &file.listing {
        first_of.entry(row.category).or_insert(row.line);
        cat_lines.entry(row.category).or_default().push(row.line);
        if let Some(owner) = &row.owner {
            owner_cat_lines.entry((owner.clone(), row.category)).or_default().push(row.line);
        }
    }
    if !first_of.is_empty() && (doc.meta.has_baseline || doc.meta.has_history) {
        body.push_str("<p class=\"meta\">first line in category: ");
        for (cat, line) in &first_of {
            body.push_str(&format!("<a href=\"#L{line}\">{}</a> ", cat_span(*cat)));
        }
        body.push_str("</p>\n");
    }

    let next_in = |lines: &[u32], line: u32| -> Option<u32> {
        lines.iter().copied().find(|&l| l > line)
    };

    body.push_str("<h2>source</h2>\n<table>\n<tr><th>line</th>");
    if doc.meta.has_history {
        body.push_str("<th>age (days)</th><th>owner</th>");
    }
    body.push_str("<th>hits</th><th>category</th>");
    let with_source = file.source.is_some();
    if with_source {
        body.push_str("<th>text</th>");
    }
    body.push_str("</tr>\n");

    let rows_by_line: BTreeMap<u32, &super::LineRow> =
        file.listing.iter().map(|r| (r.line, r)).collect();
    let line_count = match &file.source {
        Some(src) => src.len() as u32,
        None => 0,
    };
    let all_lines: Vec<u32> = if with_source {
        (1..=line_count.max(rows_by_line.keys().next_back().copied().unwrap_or(0))).collect()
    } else {
        rows_by_line.keys().copied().collect()
    };

    for line in all_lines {
        let row = rows_by_line.get(&line);
        body.push_str(&format!("<tr id=\"L{line}\"><td class=\"num\">{line}</td>"));
        if doc.meta.has_history {
            match row {
                Some(r) => {
                    let age = r
                        .age_days
                        .map(|a| format!("{a:.0}"))
                        .unwrap_or_else(|| "?".to_string());
                    body.push_str(&format!("<td class=\"num\">{age}</td>"));
                    match (&r.owner, row.map(|r| r.category)) {
                        (Some(owner), Some(cat)) => {
                            let next = owner_cat_lines
                                .get(&(owner.clone(), cat))
                                .and_then(|lines| next_in(lines, line));
                            match next {
                                Some(n) => body.push_str(&format!(
                                    "<td><a href=\"#L{n}\" title=\"next {} by {}\">{}</a></td>",
                                    cat.name(),
                                    escape(owner),
                                    escape(owner)
                                )),
                                None => body.push_str(&format!("<td>{}</td>", escape(owner))),
                            }
                        }
                        _ => body.push_str("<td>?</td>"),
                    }
                }
                None => body.push_str("<td></td><td></td>"),
            }
        }
        match row {
            Some(r) => {
                let hits = r
                    .line_hits
                    .map(|h| h.to_string())
                    .unwrap_or_default();
                let next = cat_lines.get(&r.category).and_then(|lines| next_in(lines, line));
                let cat_cell = match next {
                    Some(n) => format!(
                        "<a href=\"#L{n}\" title=\"next {}\">{}</a>",
                        r.category.name(),
                        cat_span(r.category)
                    ),
                    None => cat_span(r.category),
                };
                let extra = if r.points.len() > 1 {
                    let detail: Vec<String> = r
                        .points
                        .iter()
                        .map(|(k, c, key, h)| {
                            if key.is_empty() {
                                format!("{k} {} {h}", c.name())
                            } else {
                                format!("{k} {key} {} {h}", c.name())
                            }
                        })
                        .collect();
                    format!(" title=\"{}\"", escape(&detail.join("; ")))
                } else {
                    String::new()
                };
                body.push_str(&format!(
                    "<td class=\"num\">{hits}</td><td{extra}>{cat_cell}</td>"
                ));
            }
            None => body.push_str("<td></td><td></td>"),
        }
        if with_source {
            let text = file
                .source
                .as_ref()
                .and_then(|src| src.get(line as usize - 1))
                .map(|s| escape(s))
                .unwrap_or_default();
            body.push_str(&format!("<td class=\"src\">{text}</td>"));
        }
        body.push_str("</tr>\n");
    }
    body.push_str("</table>\n");

    if !file.deleted_rows.is_empty() {
        body.push_str(
            "<h2>deleted baseline lines</h2>\n<table>\n<tr><th>baseline line</th><th>kind</th><th>hits</th><th>category</th></tr>\n",
        );
        for row in &file.deleted_rows {
            body.push_str(&format!(
                "<tr><td class=\"num\">{}</td><td>{}</td><td class=\"num\">{}</td><td>{}</td></tr>\n",
                row.line,
                if row.key.is_empty() {
                    row.kind.to_string()
                } else {
                    format!("{} {}", row.kind, escape(&row.key))
                },
                row.hits,
                cat_span(row.category)
            ));
        }
        body.push_str("</table>\n");
    }
    page(&file.path, &body)
}

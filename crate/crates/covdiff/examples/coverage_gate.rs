//! The coverage ratchet: fail CI when coverage regresses, even if the
//! percentage looks unchanged.
//!
//! The canonical condition is `UNC+UIC+LBC == 0`: no untested new code, no
//! untested newly-included code, no lost coverage. It is stricter than any
//! percentage threshold — this example shows a change where the percentage
//! is identical on both sides and the gate still (correctly) fails.
//!
//! ```bash
//! cargo run --example coverage_gate
//! ```

use covdiff::categorize::categorize_snapshot;
use covdiff::diff::parse_unified_diff;
use covdiff::gate::{GateCriteria, evaluate_gate, parse_criteria};
use covdiff::info::parse_info;
use covdiff::model::{Category, CoverKind, format_percent};
use std::collections::BTreeMap;

// 4 lines, 2 hit = 50% ... and the current side is also 50%, but line 2
// lost its coverage while line 3 gained some
const BASELINE: &str = "SF:a.c\nDA:1,1\nDA:2,1\nDA:3,0\nDA:4,0\nend_of_record\n";
const CURRENT: &str = "SF:a.c\nDA:1,1\nDA:2,0\nDA:3,1\nDA:4,0\nend_of_record\n";

fn main() {
    let baseline = parse_info(BASELINE.as_bytes()).unwrap();
    let current = parse_info(CURRENT.as_bytes()).unwrap();
    let diffs = parse_unified_diff("").unwrap();

    let categorized = categorize_snapshot(Some(&baseline), &current, &diffs).unwrap();
    let mut totals: BTreeMap<Category, u64> = BTreeMap::new();
    for file in &categorized {
        for (category, n) in file.category_totals() {
            *totals.entry(category).or_insert(0) += n;
        }
    }

    let (base_found, base_hit) = baseline.summarize(CoverKind::Line);
    let (cur_found, cur_hit) = current.summarize(CoverKind::Line);
    println!(
        "baseline {} vs current {} - a percentage gate sees nothing",
        format_percent(base_hit, base_found),
        format_percent(cur_hit, cur_found),
    );

    let verdict = evaluate_gate(&totals, &[], &GateCriteria::default());
    println!("\ndefault ratchet (UNC+UIC+LBC == 0): passed = {}", verdict.passed);
    for violation in &verdict.violations {
        println!("  {violation}");
    }

    // criteria are a small grammar; budgets are possible too
    let lenient = parse_criteria("UNC+UIC+LBC <= 1, GBC <= 10").unwrap();
    let verdict = evaluate_gate(&totals, &[], &lenient);
    println!("\nlenient \"UNC+UIC+LBC <= 1\": passed = {}", verdict.passed);

    std::process::exit(if verdict.passed { 0 } else { 2 });
}

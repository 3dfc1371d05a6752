//! In-source exclusion pragmas, and why excluded code is still monitored.
//!
//! "Cannot happen" error handlers get excluded from coverage accounting,
//! but a test that *reaches* excluded code means formerly-unreachable
//! states became reachable — that must fail the run.
//!
//! ```bash
//! cargo run --example pragma_exclusions
//! ```

use covdiff::categorize::categorize_no_baseline;
use covdiff::exclude::{ExclusionConfig, apply_exclusions};
use covdiff::gate::{ExcludedHit, GateCriteria, evaluate_gate};
use covdiff::model::{Coverpoint, FileCoverage};

fn main() {
    let source: Vec<String> = r#"int read_frame(buf_t *b) {
  if (corrupted(b)) {
    // LCOV_EXCL_START
    log_fatal("corrupt frame");
    abort();
    // LCOV_EXCL_STOP
  }
  return decode(b);
}"#
    .lines()
    .map(|l| l.to_string())
    .collect();

    // line 4 ("log_fatal") was executed twice during the run
    let coverage = FileCoverage::from_points(
        "src/frame.c",
        [
            Coverpoint::line(1, 9),
            Coverpoint::line(2, 9),
            Coverpoint::line(4, 2),
            Coverpoint::line(5, 2),
            Coverpoint::line(8, 7),
        ],
    );

    let cfg = ExclusionConfig::default();
    let result = apply_exclusions(&coverage, Some(&source), &cfg).unwrap();

    println!("retained coverpoints:");
    for p in result.retained.points() {
        println!("  line {} ({} hits)", p.line, p.hit_count);
    }

    let excluded_hits: Vec<ExcludedHit> = result
        .pragma_hits()
        .map(|(line, hit_count)| ExcludedHit { path: "src/frame.c".to_string(), line, hit_count })
        .collect();
    println!("\nexcluded code that was executed anyway:");
    for hit in &excluded_hits {
        println!("  {}:{} ({} hits)", hit.path, hit.line, hit.hit_count);
    }

    let categorized = categorize_no_baseline(&result.retained);
    let verdict = evaluate_gate(&categorized.category_totals(), &excluded_hits, &GateCriteria::default());
    println!("\ngate passed: {} (excluded code must stay unreached)", verdict.passed);
    for violation in &verdict.violations {
        println!("  {violation}");
    }
}

//! The core differential analysis: combine a baseline trace, a current
//! trace, and the source diff, and label every coverpoint with one of the
//! twelve categories.
//!
//! Watch for UNC (new code nobody tests) and LBC (code that used to be
//! tested and no longer is) — those are the rows a review should start with.
//!
//! ```bash
//! cargo run --example categorize_changes
//! ```

use covdiff::categorize::categorize_snapshot;
use covdiff::diff::parse_unified_diff;
use covdiff::info::parse_info;
use covdiff::model::{Category, CoverKind};

const BASELINE: &str = "\
SF:src/calc.c
DA:1,1
DA:2,1
DA:3,1
DA:4,0
end_of_record
";

// two lines were inserted after line 2; old line 3 is still present at
// line 5 but lost its coverage, and old line 4 gained some
const CURRENT: &str = "\
SF:src/calc.c
DA:1,1
DA:2,1
DA:3,1
DA:4,0
DA:5,0
DA:6,1
end_of_record
";

const DIFF: &str = "\
--- a/src/calc.c
+++ b/src/calc.c
@@ -2,0 +3,2 @@
+  checked_add();
+  checked_sub();
";

fn main() {
    let baseline = parse_info(BASELINE.as_bytes()).unwrap();
    let current = parse_info(CURRENT.as_bytes()).unwrap();
    let diffs = parse_unified_diff(DIFF).unwrap();

    let categorized = categorize_snapshot(Some(&baseline), &current, &diffs).unwrap();
    for file in &categorized {
        println!("{}", file.source_path);
        for point in &file.points {
            println!(
                "  line {:>2} ({:?}) -> {}",
                point.point.line, point.revision, point.category
            );
        }
        println!("\ncategory totals:");
        for category in Category::ALL {
            let n = file.count(CoverKind::Line, category);
            if n > 0 {
                println!("  {category}: {n}");
            }
        }
    }
}

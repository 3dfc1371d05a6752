//! Turn a unified diff into a baseline/current line correspondence.
//!
//! The map answers: which current line does baseline line N correspond to,
//! which lines are new, which are gone. Changed lines count as a deletion
//! plus an insertion, never as a pair.
//!
//! ```bash
//! cargo run --example line_mapping
//! ```

use covdiff::diff::{build_line_map, parse_unified_diff};

const DIFF: &str = "\
--- a/src/parser.c
+++ b/src/parser.c
@@ -4,1 +4,2 @@
-    int limit = 10;
+    int limit = 20;
+    int retries = 3;
@@ -9,1 +9,0 @@
-    legacy_cleanup();
";

fn main() {
    let diffs = parse_unified_diff(DIFF).expect("diff parses");
    let file = &diffs[0];
    println!(
        "{} -> {}",
        file.base_path.as_deref().unwrap_or("/dev/null"),
        file.current_path.as_deref().unwrap_or("/dev/null")
    );

    // the baseline file had 12 lines; the current one has 12 again
    let map = build_line_map(file, 12, 12).expect("consistent lengths");

    for base_line in 1..=12u32 {
        match map.to_current(base_line) {
            Some(cur) => println!("baseline {base_line:>2} -> current {cur:>2}"),
            None => println!("baseline {base_line:>2} -> deleted"),
        }
    }
    for cur_line in map.inserted() {
        println!("current  {cur_line:>2} <- inserted");
    }

    // reversing the diff inverts the correspondence
    let reversed = build_line_map(&file.reversed(), 12, 12).unwrap();
    assert_eq!(reversed, map.inverted());
    println!("\nreversed diff produces the inverse map: ok");
}

//! Parse LCOV `.info` traces and merge them.
//!
//! CI systems often produce one trace per test shard; analysis wants a
//! single snapshot. Merging sums hit counts for coverpoints with the same
//! location and key.
//!
//! ```bash
//! cargo run --example parse_and_merge
//! ```

use covdiff::info::{parse_info, serialize_info};
use covdiff::model::{CoverKind, merge_snapshots};

const SHARD_1: &str = "\
TN:shard1
SF:src/engine.c
FN:3,start
FNDA:1,start
DA:3,1
DA:4,1
DA:9,0
BRDA:4,0,0,1
BRDA:4,0,1,-
end_of_record
";

const SHARD_2: &str = "\
TN:shard2
SF:src/engine.c
FN:3,start
FNDA:2,start
DA:3,2
DA:4,0
DA:9,1
BRDA:4,0,0,0
BRDA:4,0,1,3
end_of_record
SF:src/extra.c
DA:1,1
end_of_record
";

fn main() {
    let first = parse_info(SHARD_1.as_bytes()).expect("shard 1 parses");
    let second = parse_info(SHARD_2.as_bytes()).expect("shard 2 parses");

    let merged = merge_snapshots(&first, &second);
    for (path, file) in merged.files() {
        let (lines_found, lines_hit) = file.summarize(CoverKind::Line);
        let (branches_found, branches_hit) = file.summarize(CoverKind::Branch);
        println!(
            "{path}: {lines_hit}/{lines_found} lines, {branches_hit}/{branches_found} branches"
        );
    }

    // the canonical serialized form: sorted, summary counts recomputed
    println!("\nmerged trace:\n{}", serialize_info(&merged));
}

//! Ingest per-line history from `git blame --line-porcelain` output.
//!
//! The parser reads the author and author-time headers of each group; the
//! repeated-commit shorthand of plain `--porcelain` output works too. For
//! non-git systems, export the same facts as the annotation TSV instead.
//!
//! ```bash
//! cargo run --example blame_ingest
//! ```

use covdiff::history::{age_days, parse_porcelain_blame, serialize_annotation_tsv, AnnotationSet};

const PORCELAIN: &str = "\
8e9b1c6d4f2a3b5c7d8e9f0a1b2c3d4e5f6a7b8c 1 1 2
author maya
author-mail <maya@example.com>
author-time 1699827200
author-tz +0100
summary rework retry logic
filename src/retry.c
\tstatic int backoff_ms(int attempt) {
8e9b1c6d4f2a3b5c7d8e9f0a1b2c3d4e5f6a7b8c 2 2
author maya
author-mail <maya@example.com>
author-time 1699827200
author-tz +0100
summary rework retry logic
filename src/retry.c
\t  return 100 << attempt;
1a2b3c4d5e6f7a8b9c0d1e2f3a4b5c6d7e8f9a0b 3 3 1
author old-guard
author-mail <og@example.com>
author-time 1577836800
author-tz +0000
summary initial import
filename src/retry.c
\t}
";

fn main() {
    let now: i64 = 1_700_000_000;
    let annotations = parse_porcelain_blame(PORCELAIN, "src/retry.c").expect("blame parses");

    for a in &annotations {
        println!(
            "line {}: {} edited {:.1} days ago",
            a.line,
            a.owner,
            age_days(a, now).unwrap()
        );
    }

    // the same facts in the VCS-neutral TSV form
    let mut set = AnnotationSet::new();
    set.insert_file("src/retry.c", annotations).unwrap();
    println!("\nas annotation TSV:\n{}", serialize_annotation_tsv(&set));
}

//! The owner table: who is responsible for which coverage state.
//!
//! `UntestedOnly` keeps the table short on big projects — only owners with
//! UNC/LBC/UIC/UBC code appear, ordered by how much untested code they own.
//!
//! ```bash
//! cargo run --example owner_table
//! ```

use covdiff::binning::{DateBinSpec, OwnerMode, bin_file, owner_table};
use covdiff::categorize::categorize_no_baseline;
use covdiff::history::parse_annotation_tsv;
use covdiff::info::parse_info;
use covdiff::model::Category;

const TRACE: &str = "\
SF:src/server.c
DA:1,1
DA:2,1
DA:3,0
DA:4,0
DA:5,0
DA:6,1
end_of_record
";

const HISTORY: &str = "\
src/server.c\t1\tpriya\t1699000000
src/server.c\t2\tpriya\t1699000000
src/server.c\t3\tmarco\t1699500000
src/server.c\t4\tmarco\t1699500000
src/server.c\t5\tpriya\t1698000000
src/server.c\t6\tmarco\t1699500000
";

fn main() {
    let snapshot = parse_info(TRACE.as_bytes()).unwrap();
    let annotations = parse_annotation_tsv(HISTORY).unwrap();
    let spec = DateBinSpec::default();
    let now = 1_700_000_000;

    let summaries: Vec<_> = snapshot
        .files()
        .values()
        .map(|file| bin_file(&categorize_no_baseline(file), &annotations, None, &spec, now))
        .collect();

    println!("all owners with executable code:");
    for row in owner_table(&summaries, OwnerMode::AllCode) {
        println!("  {:<8} untested={}", row.owner.display_name(), row.untested);
    }

    println!("\nowners responsible for untested code (sorted worst-first):");
    for row in owner_table(&summaries, OwnerMode::UntestedOnly) {
        let unc = row.counts.get(&Category::Unc).copied().unwrap_or(0);
        println!(
            "  {:<8} untested={} (UNC {unc})",
            row.owner.display_name(),
            row.untested
        );
    }
}

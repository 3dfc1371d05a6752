//! Group categorized coverpoints by the age of each line's last edit.
//!
//! Recent untested code is the actionable kind: its author still remembers
//! it. Bin edges are upper-inclusive, so an edit exactly 7 days old still
//! counts as "last 7 days".
//!
//! ```bash
//! cargo run --example date_binning
//! ```

use covdiff::binning::{DateBin, DateBinSpec, bin_file};
use covdiff::categorize::categorize_no_baseline;
use covdiff::history::parse_annotation_tsv;
use covdiff::info::parse_info;
use covdiff::model::Category;

const TRACE: &str = "\
SF:src/feature.c
DA:1,1
DA:2,0
DA:3,0
DA:4,1
end_of_record
";

fn main() {
    let now: i64 = 1_700_000_000;
    let day = 86_400;
    // per-line history: path, line, owner, last-edit epoch
    let tsv = format!(
        "src/feature.c\t1\tamara\t{}\nsrc/feature.c\t2\tamara\t{}\nsrc/feature.c\t3\tjun\t{}\nsrc/feature.c\t4\tjun\t{}\n",
        now - 2 * day,    // 2 days old
        now - 2 * day,    // 2 days old, uncovered!
        now - 45 * day,   // 45 days old
        now - 400 * day,  // a year old
    );

    let snapshot = parse_info(TRACE.as_bytes()).unwrap();
    let annotations = parse_annotation_tsv(&tsv).unwrap();
    let spec = DateBinSpec::default(); // cutoffs 7, 30, 180 days

    for file in snapshot.files().values() {
        let categorized = categorize_no_baseline(file);
        let binned = bin_file(&categorized, &annotations, None, &spec, now);

        println!("{}:", file.source_path);
        for (bin, label) in spec.labels().iter().enumerate() {
            for category in Category::ALL {
                let n = binned.date_count(DateBin::Bin(bin), category);
                if n > 0 {
                    println!("  {label:>10} {category}: {n}");
                }
            }
        }
    }
    println!("\nbin boundaries are upper-inclusive:");
    for age in [6.9f64, 7.0, 7.0001] {
        println!("  age {age} days -> bin {}", spec.assign(age));
    }
}

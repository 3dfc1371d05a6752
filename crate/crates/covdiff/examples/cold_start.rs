//! Cold start: differential analysis without a baseline.
//!
//! A project adopting coverage has no historical trace to compare against.
//! Everything covered becomes GNC and everything uncovered UNC, and date
//! binning still works — "today is the baseline; from now on
//! UNC+UIC+LBC == 0".
//!
//! ```bash
//! cargo run --example cold_start
//! ```

use covdiff::binning::{DateBin, DateBinSpec, bin_file};
use covdiff::categorize::categorize_snapshot;
use covdiff::history::parse_annotation_tsv;
use covdiff::info::parse_info;
use covdiff::model::Category;

const TRACE: &str = "\
SF:src/api.c
DA:1,4
DA:2,0
DA:3,4
end_of_record
";

fn main() {
    let now: i64 = 1_700_000_000;
    let current = parse_info(TRACE.as_bytes()).unwrap();

    // no baseline snapshot at all
    let categorized = categorize_snapshot(None, &current, &[]).unwrap();
    for file in &categorized {
        println!("{}", file.source_path);
        for point in &file.points {
            println!("  line {} -> {}", point.point.line, point.category);
        }
    }

    // date binning still separates fresh gaps from old ones
    let tsv = format!(
        "src/api.c\t1\tnoor\t{}\nsrc/api.c\t2\tnoor\t{}\nsrc/api.c\t3\tnoor\t{}\n",
        now - 86_400,
        now - 86_400,
        now - 300 * 86_400,
    );
    let annotations = parse_annotation_tsv(&tsv).unwrap();
    let spec = DateBinSpec::default();
    let binned = bin_file(&categorized[0], &annotations, None, &spec, now);
    println!(
        "\nuncovered code edited yesterday: {}",
        binned.date_count(DateBin::Bin(0), Category::Unc)
    );
    println!(
        "covered code older than 180 days: {}",
        binned.date_count(DateBin::Bin(3), Category::Gnc)
    );
}

//! The whole pipeline through [`covdiff::pipeline::run`]: write fixture
//! inputs to a temp directory, then produce text, JSON, and HTML reports
//! exactly as the `covdiff` binary would.
//!
//! ```bash
//! cargo run --example full_report
//! # open target/covdiff-example-report/index.html
//! ```

use std::fs;

use covdiff::binning::OwnerMode;
use covdiff::gate::parse_criteria;
use covdiff::pipeline::{AnnotationSource, RunConfig, TextTarget, run};

const BASELINE: &str = "\
SF:src/calc.c
DA:1,1
DA:2,1
DA:3,0
end_of_record
";

const CURRENT: &str = "\
SF:src/calc.c
DA:1,1
DA:2,0
DA:3,1
DA:4,1
DA:5,0
end_of_record
";

const DIFF: &str = "\
--- a/src/calc.c
+++ b/src/calc.c
@@ -3,0 +4,2 @@
+  carry();
+  borrow();
";

const SOURCE: &str = "int add() {\n  carry_flag();\n  overflow_check();\n  carry();\n  borrow();\n";

fn main() {
    let dir = std::env::temp_dir().join("covdiff-example-inputs");
    fs::create_dir_all(dir.join("src")).unwrap();
    fs::write(dir.join("cur.info"), CURRENT).unwrap();
    fs::write(dir.join("base.info"), BASELINE).unwrap();
    fs::write(dir.join("changes.diff"), DIFF).unwrap();
    fs::write(dir.join("src/calc.c"), SOURCE).unwrap();
    let now = 1_700_000_000;
    fs::write(
        dir.join("ann.tsv"),
        format!(
            "src/calc.c\t1\tida\t{}\nsrc/calc.c\t2\tida\t{}\nsrc/calc.c\t3\tleo\t{}\nsrc/calc.c\t4\tleo\t{}\nsrc/calc.c\t5\tleo\t{}\n",
            now - 500 * 86_400,
            now - 500 * 86_400,
            now - 90 * 86_400,
            now - 86_400,
            now - 86_400,
        ),
    )
    .unwrap();

    let html_dir = std::path::Path::new("target/covdiff-example-report");

    let mut cfg = RunConfig::new(dir.join("cur.info"));
    cfg.baseline_info = Some(dir.join("base.info"));
    cfg.diff_file = Some(dir.join("changes.diff"));
    cfg.annotations = Some(AnnotationSource::Tsv(dir.join("ann.tsv")));
    cfg.source_root = Some(dir.clone());
    cfg.show_owners = Some(OwnerMode::AllCode);
    cfg.criteria = Some(parse_criteria("UNC+UIC+LBC==0").unwrap());
    cfg.criteria_text = Some("UNC+UIC+LBC==0".to_string());
    cfg.reference_time = Some(now);
    cfg.text_out = Some(TextTarget::Stdout);
    cfg.json_out = Some(dir.join("report.json"));
    cfg.html_out = Some(html_dir.to_path_buf());

    let outcome = run(&cfg).expect("pipeline runs");
    println!("\nexit code would be: {}", outcome.status.exit_code());
    println!("json report: {}", dir.join("report.json").display());
    println!("html report: {}/index.html", html_dir.display());
}

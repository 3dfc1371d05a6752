//! Thin CLI over [`covdiff::pipeline::run`]: flag parsing and exit-code
//! mapping only. Exit 0 = pass, 1 = usage/input error, 2 = gate failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use clap::error::ErrorKind;

use covdiff::binning::{DateBinSpec, OwnerMode};
use covdiff::exclude::ExclusionConfig;
use covdiff::gate::{GateCriteria, parse_criteria};
use covdiff::pipeline::{AnnotationSource, RunConfig, TextTarget, run};

#[derive(Parser, Debug)]
#[command(
    name = "covdiff",
    about = "Differential code coverage: categorize coverage changes between two builds, bin them by edit age and owner, and gate CI on the result",
    after_help = "Exit status: 0 pass, 1 usage or input error, 2 gate failure."
)]
struct Cli {
    /// Current coverage trace (.info)
    #[arg(long, value_name = "INFO")]
    current: PathBuf,

    /// Baseline coverage trace (.info); without it all code is GNC/UNC
    #[arg(long, value_name = "INFO")]
    baseline: Option<PathBuf>,

    /// Unified diff from the baseline revision to the current revision
    #[arg(long, value_name = "PATCH")]
    diff: Option<PathBuf>,

    /// Per-line history TSV: path<TAB>line<TAB>owner<TAB>epoch
    #[arg(long, value_name = "TSV", conflicts_with = "blame_cmd")]
    annotations: Option<PathBuf>,

    /// Command template producing line-porcelain blame for {path}
    #[arg(long, value_name = "TEMPLATE")]
    blame_cmd: Option<String>,

    /// Date-bin cutoffs in days, ascending (upper edges inclusive)
    #[arg(long, value_name = "DAYS", default_value = "7,30,180", value_parser = parse_cutoffs)]
    date_bins: DateBinSpec,

    /// Append the owner table: all owners, or only those with untested code
    #[arg(long, value_name = "all|untested", num_args = 0..=1,
          default_missing_value = "all")]
    show_owners: Option<String>,

    /// Gate criteria, e.g. "UNC+UIC+LBC==0,GBC<=10"; bare flag uses the
    /// canonical ratchet UNC+UIC+LBC==0
    #[arg(long, value_name = "CRITERIA", num_args = 0..=1,
          default_missing_value = "UNC+UIC+LBC==0")]
    fail_if: Option<String>,

    /// Downgrade a gate failure to a warning (exit 0, verdict still reported)
    #[arg(long)]
    waive: bool,

    /// Prefix stripped from trace paths so they join diff/history paths
    #[arg(long, value_name = "PREFIX")]
    strip_prefix: Option<String>,

    /// Exclude files matching this glob (repeatable)
    #[arg(long = "exclude", value_name = "GLOB")]
    excludes: Vec<String>,

    /// Directory with the current sources, enabling pragma exclusions
    /// (LCOV_EXCL_LINE / _START / _STOP) and HTML source listings
    #[arg(long, value_name = "DIR")]
    source_root: Option<PathBuf>,

    /// Reference time as epoch seconds (defaults to the wall clock); fix it
    /// for reproducible date bins
    #[arg(long, value_name = "EPOCH")]
    now: Option<i64>,

    /// Write the text report to a file, or to stdout with a bare flag
    #[arg(long, value_name = "FILE", num_args = 0..=1,
          default_missing_value = "-")]
    text_out: Option<String>,

    /// Write the machine-readable JSON report (schema v1)
    #[arg(long, value_name = "FILE")]
    json_out: Option<PathBuf>,

    /// Write the static HTML report into this directory
    #[arg(long, value_name = "DIR")]
    html_out: Option<PathBuf>,
}

fn parse_cutoffs(text: &str) -> Result<DateBinSpec, String> {
    let cutoffs: Result<Vec<f64>, _> =
        text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let cutoffs = cutoffs.map_err(|e| format!("bad cutoff list {text:?}: {e}"))?;
    DateBinSpec::new(cutoffs).map_err(|e| e.to_string())
}

fn build_config(cli: Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::new(cli.current);
    cfg.baseline_info = cli.baseline;
    cfg.diff_file = cli.diff;
    cfg.annotations = match (cli.annotations, cli.blame_cmd) {
        (Some(tsv), _) => Some(AnnotationSource::Tsv(tsv)),
        (None, Some(cmd)) => Some(AnnotationSource::BlameCommand(cmd)),
        (None, None) => None,
    };
    cfg.date_bins = cli.date_bins;
    if let Some(text) = &cli.fail_if {
        let mut criteria: GateCriteria =
            parse_criteria(text).map_err(|e| e.to_string())?;
        criteria.fail_on_excluded_hit = true;
        cfg.criteria = Some(criteria);
        cfg.criteria_text = Some(text.clone());
    }
    cfg.waive = cli.waive;
    cfg.show_owners = match cli.show_owners.as_deref() {
        Some("all") => Some(OwnerMode::AllCode),
        Some("untested") => Some(OwnerMode::UntestedOnly),
        Some(other) => return Err(format!("--show-owners takes 'all' or 'untested', not {other:?}")),
        None => None,
    };
    cfg.strip_prefix = cli.strip_prefix;
    cfg.exclusions = ExclusionConfig::new(&cli.excludes).map_err(|e| e.to_string())?;
    cfg.source_root = cli.source_root;
    cfg.reference_time = cli.now;
    cfg.text_out = match cli.text_out.as_deref() {
        Some("-") => Some(TextTarget::Stdout),
        Some(path) => Some(TextTarget::File(PathBuf::from(path))),
        None => None,
    };
    cfg.json_out = cli.json_out;
    cfg.html_out = cli.html_out;
    Ok(cfg)
}

fn main() -> ExitCode {
    // exit 2 is reserved for gate failures, so usage errors map to 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::from(0);
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let gate_requested = cli.fail_if.is_some();
    let cfg = match build_config(cli) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("covdiff: {message}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            for warning in &outcome.warnings {
                eprintln!("covdiff: warning: {warning}");
            }
            if gate_requested {
                let gate = outcome.document.gate.as_ref().expect("gate was requested");
                let verdict = if gate.passed {
                    "PASS".to_string()
                } else if gate.waived {
                    "FAIL (waived)".to_string()
                } else {
                    "FAIL".to_string()
                };
                eprintln!("covdiff: gate {verdict}");
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(error) => {
            eprintln!("covdiff: error: {error}");
            ExitCode::from(1)
        }
    }
}

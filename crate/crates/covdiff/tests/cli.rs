//! End-to-end tests of the `covdiff` binary: exit-code contract, output
//! files, subprocess blame, path stripping, and pragma enforcement.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn covdiff(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covdiff"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/degraded")
}

#[test]
fn clean_run_passes_default_gate_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.info"), "SF:a.c\nDA:1,1\nDA:2,0\nend_of_record\n").unwrap();
    let out = covdiff(
        dir.path(),
        &["--current", "t.info", "--baseline", "t.info", "--fail-if"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gate PASS"));
}

#[test]
fn regressed_run_exits_two() {
    let out = covdiff(
        &fixture_dir(),
        &[
            "--current", "cur.info", "--baseline", "base.info", "--diff", "changes.diff",
            "--fail-if", "--now", "1700000000",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gate FAIL"));
}

#[test]
fn waive_downgrades_gate_failure_to_exit_zero() {
    let out = covdiff(
        &fixture_dir(),
        &[
            "--current", "cur.info", "--baseline", "base.info", "--diff", "changes.diff",
            "--fail-if", "--waive", "--now", "1700000000",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL (waived)"));
}

#[test]
fn usage_and_input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // no output and no gate requested
    fs::write(dir.path().join("t.info"), "SF:a.c\nDA:1,1\nend_of_record\n").unwrap();
    let out = covdiff(dir.path(), &["--current", "t.info"]);
    assert_eq!(out.status.code(), Some(1));

    // unreadable input
    let out = covdiff(dir.path(), &["--current", "missing.info", "--text-out"]);
    assert_eq!(out.status.code(), Some(1));

    // malformed criteria
    let out = covdiff(dir.path(), &["--current", "t.info", "--fail-if", "XYZ==0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown category"));

    // malformed trace
    fs::write(dir.path().join("bad.info"), "SF:a.c\nDA:zero,1\nend_of_record\n").unwrap();
    let out = covdiff(dir.path(), &["--current", "bad.info", "--text-out"]);
    assert_eq!(out.status.code(), Some(1));

    // bad date bins
    let out = covdiff(dir.path(), &["--current", "t.info", "--text-out", "--date-bins", "30,7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_report_is_consistent_with_totals() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = covdiff(
        &fixture_dir(),
        &[
            "--current", "cur.info", "--baseline", "base.info", "--diff", "changes.diff",
            "--annotations", "ann.tsv", "--show-owners", "untested",
            "--fail-if", "--now", "1700000000",
            "--json-out", json_path.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let json: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json["meta"]["schema_version"], "1");
    assert_eq!(json["passed"], Value::Bool(false));
    assert_eq!(json["gate"]["passed"], Value::Bool(false));
    assert_eq!(json["meta"]["reference_time"], 1_700_000_000);

    // per-file sums reproduce project totals for every category
    for cat in ["UNC", "LBC", "UIC", "UBC", "GBC", "GIC", "GNC", "CBC", "EUB", "ECB", "DUB", "DCB"] {
        let files: u64 = json["files"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| f["lines"]["categories"][cat].as_u64().unwrap())
            .sum();
        assert_eq!(
            files,
            json["project"]["lines"]["categories"][cat].as_u64().unwrap(),
            "category {cat}"
        );
    }

    // untested-only owner table: only owners with untested code, sorted
    let owners = json["owners"].as_array().unwrap();
    assert!(!owners.is_empty());
    for row in owners {
        assert!(row["untested"].as_u64().unwrap() > 0);
    }

    // gate violations carry the clause and the actual count (UNC+UIC+LBC = 3)
    let violations = json["gate"]["violations"].as_array().unwrap();
    assert_eq!(violations[0]["type"], "constraint");
    assert_eq!(violations[0]["actual"], 3);
}

#[test]
fn html_tree_matches_layout_and_navigation() {
    let dir = tempfile::tempdir().unwrap();
    let html = dir.path().join("report");
    let out = covdiff(
        &fixture_dir(),
        &[
            "--current", "cur.info", "--baseline", "base.info", "--diff", "changes.diff",
            "--annotations", "ann.tsv", "--source-root", ".", "--show-owners",
            "--now", "1700000000", "--html-out", html.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    assert!(html.join("index.html").is_file());
    assert!(html.join("src/index.html").is_file());
    assert!(html.join("src/calc.c.html").is_file());
    assert!(html.join("src/util.c.html").is_file());

    let page = fs::read_to_string(html.join("src/calc.c.html")).unwrap();
    // the UNC line is labeled, colored, and anchored
    assert!(page.contains("cat cat-unc"), "category classes present");
    assert!(page.contains("id=\"L7\""), "line anchors present");
    assert!(page.contains("first line in category"), "category navigation present");
    // gutter columns show age and owner
    assert!(page.contains("age (days)"));
    assert!(page.contains("carol"));
    // source text is listed
    assert!(page.contains("sigma();"));
    // deleted baseline lines appear in their own table
    assert!(page.contains("deleted baseline lines"));

    let index = fs::read_to_string(html.join("index.html")).unwrap();
    assert!(index.contains("href=\"src/index.html\""));
    // determinism: a second run produces identical bytes
    let html2 = dir.path().join("report2");
    covdiff(
        &fixture_dir(),
        &[
            "--current", "cur.info", "--baseline", "base.info", "--diff", "changes.diff",
            "--annotations", "ann.tsv", "--source-root", ".", "--show-owners",
            "--now", "1700000000", "--html-out", html2.to_str().unwrap(),
        ],
    );
    assert_eq!(
        fs::read(html.join("src/calc.c.html")).unwrap(),
        fs::read(html2.join("src/calc.c.html")).unwrap()
    );
}

#[test]
fn html_without_history_omits_gutter() {
    let dir = tempfile::tempdir().unwrap();
    let html = dir.path().join("report");
    covdiff(
        &fixture_dir(),
        &[
            "--current", "cur.info", "--baseline", "base.info", "--diff", "changes.diff",
            "--source-root", ".", "--now", "1700000000",
            "--html-out", html.to_str().unwrap(),
        ],
    );
    let page = fs::read_to_string(html.join("src/calc.c.html")).unwrap();
    assert!(!page.contains("age (days)"));
    assert!(!page.contains("owner"));
}

#[test]
fn strip_prefix_joins_absolute_trace_paths() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cur.info"),
        "SF:/build/ws/src/a.c\nDA:1,1\nDA:2,0\nend_of_record\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("base.info"),
        "SF:/build/ws/src/a.c\nDA:1,1\nDA:2,1\nend_of_record\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("changes.diff"),
        "--- a/src/a.c\n+++ b/src/a.c\n@@ -9,0 +10,1 @@\n+x\n",
    )
    .unwrap();
    let out = covdiff(
        dir.path(),
        &[
            "--current", "cur.info", "--baseline", "base.info", "--diff", "changes.diff",
            "--strip-prefix", "/build/ws", "--text-out", "--now", "1700000000",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("src/a.c"), "{text}");
    // line 2 lost coverage: only visible if the diff joined the trace
    let row = text.lines().find(|l| l.starts_with("src/a.c")).unwrap();
    let header = text.lines().find(|l| l.trim_start().starts_with("path")).unwrap();
    let lbc_col = header.find("LBC").unwrap();
    assert_eq!(&row[lbc_col - 2..lbc_col + 3], "    1");
}

#[test]
fn blame_command_feeds_annotations() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cur.info"), "SF:a.c\nDA:1,1\nDA:2,0\nend_of_record\n").unwrap();
    // a fake blame: prints two line-porcelain groups
    let script = dir.path().join("fakeblame.sh");
    fs::write(
        &script,
        "#!/bin/sh\nprintf 'abcdefabcdefabcdefabcdefabcdefabcdefabcd 1 1 1\\n'\nprintf 'author zoe\\n'\nprintf 'author-time 1699913600\\n'\nprintf '\\tline one\\n'\nprintf 'abcdefabcdefabcdefabcdefabcdefabcdefabcd 2 2 1\\n'\nprintf '\\tline two\\n'\n",
    )
    .unwrap();
    let mut perms = fs::metadata(&script).unwrap().permissions();
    use std::os::unix::fs::PermissionsExt;
    perms.set_mode(0o755);
    fs::set_permissions(&script, perms).unwrap();

    let out = covdiff(
        dir.path(),
        &[
            "--current", "cur.info",
            "--blame-cmd", &format!("{} {}", script.display(), "{path}"),
            "--show-owners", "--text-out", "--now", "1700000000",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[owners (all)]"), "{text}");
    assert!(text.contains("zoe"), "{text}");
    // 1699913600 is one day before now: bin [0,7]
    assert!(text.contains("[categories by date bin]"));
}

#[test]
fn pragma_excluded_hit_fails_gate_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("src")).unwrap();
    fs::write(
        dir.path().join("src/guard.c"),
        "int f(int e) {\n  if (e) {\n    /* LCOV_EXCL_START */\n    die();\n    /* LCOV_EXCL_STOP */\n  }\n  return 0;\n}\n",
    )
    .unwrap();
    let info = |die_hits: u64| {
        format!("SF:src/guard.c\nDA:1,1\nDA:2,1\nDA:4,{die_hits}\nDA:7,1\nend_of_record\n")
    };
    fs::write(dir.path().join("hit.info"), info(2)).unwrap();
    fs::write(dir.path().join("clean.info"), info(0)).unwrap();

    let out = covdiff(
        dir.path(),
        &[
            "--current", "hit.info", "--baseline", "clean.info", "--source-root", ".",
            "--fail-if", "--text-out", "--now", "1700000000",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("src/guard.c:4"),
        "violation names the location:\n{text}"
    );

    let out = covdiff(
        dir.path(),
        &[
            "--current", "clean.info", "--baseline", "clean.info", "--source-root", ".",
            "--fail-if", "--text-out", "--now", "1700000000",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    // the excluded line contributes to no category: 3 retained points, all CBC
    let text = String::from_utf8_lossy(&out.stdout);
    let row = text.lines().find(|l| l.starts_with("src/guard.c")).unwrap();
    let header = text.lines().find(|l| l.trim_start().starts_with("path")).unwrap();
    let cbc_col = header.find("CBC").unwrap();
    assert_eq!(&row[cbc_col - 2..cbc_col + 3], "    3");
}

#[test]
fn glob_excluded_files_vanish_without_failing_gate() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cur.info"),
        "SF:src/a.c\nDA:1,1\nend_of_record\nSF:vendor/lib.c\nDA:1,5\nDA:2,0\nend_of_record\n",
    )
    .unwrap();
    let out = covdiff(
        dir.path(),
        &[
            "--current", "cur.info", "--baseline", "cur.info",
            "--exclude", "vendor/**", "--fail-if", "--text-out", "--now", "1700000000",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.contains("vendor/lib.c"), "{text}");
}

#[test]
fn text_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.info"), "SF:a.c\nDA:1,1\nend_of_record\n").unwrap();
    let out = covdiff(dir.path(), &["--current", "t.info", "--text-out", "report.txt"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("[line coverage]"));
}

//! Property tests for the pipeline invariants: merge algebra, codec round
//! trips, line-map balance, bin monotonicity, gate monotonicity, exclusion
//! idempotence.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use covdiff::binning::DateBinSpec;
use covdiff::categorize::categorize_file;
use covdiff::diff::{build_line_map, parse_unified_diff};
use covdiff::exclude::{ExclusionConfig, apply_exclusions};
use covdiff::gate::{Comparator, Constraint, GateCriteria, evaluate_gate};
use covdiff::history::{LineAnnotation, age_days};
use covdiff::info::{parse_info, serialize_info};
use covdiff::model::{
    Category, CoverKind, CoverageSnapshot, Coverpoint, FileCoverage, merge_snapshots,
    normalize_path,
};

use common::{
    EditOp, Slot, diff_with_context, lcs_pairs, materialize_texts, scripted_instance,
};

fn arb_point() -> impl Strategy<Value = Coverpoint> {
    (1u32..100, 0u64..5).prop_flat_map(|(line, hits)| {
        prop_oneof![
            Just(Coverpoint::line(line, hits)),
            (0u32..3).prop_map(move |i| Coverpoint::function(line, &format!("fn{i}"), hits)),
            (0u32..3, 0u32..3)
                .prop_map(move |(b, t)| Coverpoint::branch(line, &b.to_string(), &t.to_string(), hits)),
        ]
    })
}

fn arb_snapshot() -> impl Strategy<Value = CoverageSnapshot> {
    let file = (0usize..4, prop::collection::vec(arb_point(), 0..12)).prop_map(|(p, points)| {
        let path = ["a.c", "src/b.c", "src/deep/c.h", "d.cpp"][p];
        FileCoverage::from_points(path, points)
    });
    prop::collection::vec(file, 0..4).prop_map(|files| {
        let mut snapshot = CoverageSnapshot::new("t");
        for f in files {
            snapshot.add_file(f);
        }
        snapshot
    })
}

fn arb_ops() -> impl Strategy<Value = (Vec<EditOp>, Vec<(Slot, Slot)>)> {
    let op = prop_oneof![
        3 => Just(EditOp::Keep),
        1 => Just(EditOp::Delete),
        1 => Just(EditOp::Insert),
    ];
    let slot = prop_oneof![Just(Slot::Absent), Just(Slot::Unhit), Just(Slot::Hit)];
    prop::collection::vec((op, slot.clone(), slot), 1..40)
        .prop_map(|v| v.into_iter().map(|(o, b, c)| (o, (b, c))).unzip())
}

proptest! {
    #[test]
    fn merge_is_commutative_and_associative_on_content(
        a in arb_snapshot(), b in arb_snapshot(), c in arb_snapshot()
    ) {
        let ab = merge_snapshots(&a, &b);
        let ba = merge_snapshots(&b, &a);
        prop_assert_eq!(ab.files(), ba.files());
        let ab_c = merge_snapshots(&ab, &c);
        let a_bc = merge_snapshots(&a, &merge_snapshots(&b, &c));
        prop_assert_eq!(&ab_c, &a_bc);
        // empty is the identity
        let empty = CoverageSnapshot::default();
        prop_assert_eq!(&merge_snapshots(&a, &empty), &a);
        prop_assert_eq!(&merge_snapshots(&empty, &a), &a);
    }

    #[test]
    fn merged_found_counts_union_of_keys(a in arb_snapshot(), b in arb_snapshot()) {
        let merged = merge_snapshots(&a, &b);
        for kind in CoverKind::ALL {
            let mut keys: BTreeSet<(String, u32, String)> = BTreeSet::new();
            for snap in [&a, &b] {
                for (path, fc) in snap.files() {
                    for p in fc.points().iter().filter(|p| p.kind == kind) {
                        // function identity within a file is its name
                        let line_key = if kind == CoverKind::Function { 0 } else { p.line };
                        keys.insert((path.clone(), line_key, p.key.clone()));
                    }
                }
            }
            prop_assert_eq!(merged.summarize(kind).0, keys.len() as u64);
        }
    }

    #[test]
    fn codec_round_trip_on_canonical_snapshots(s in arb_snapshot()) {
        let text = serialize_info(&s);
        let parsed = parse_info(text.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &s);
        prop_assert_eq!(serialize_info(&parsed), text);
    }

    #[test]
    fn parser_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..300)) {
        let _ = parse_info(&bytes);
    }

    #[test]
    fn line_map_balances_and_inverts((ops, slots) in arb_ops()) {
        let instance = scripted_instance("p.c", &ops, &slots);
        let diffs = parse_unified_diff(&instance.diff_text).unwrap();
        let map = build_line_map(&diffs[0], instance.base_len, instance.cur_len).unwrap();
        prop_assert_eq!(map.pairs().len() + map.inserted().len(), instance.cur_len as usize);
        prop_assert_eq!(map.pairs().len() + map.deleted().len(), instance.base_len as usize);
        for w in map.pairs().windows(2) {
            prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
        // reversing the diff yields the inverse map
        let rmap = build_line_map(&diffs[0].reversed(), instance.cur_len, instance.base_len).unwrap();
        prop_assert_eq!(&rmap, &map.inverted());
        prop_assert_eq!(&rmap.inverted(), &map);
    }

    #[test]
    fn line_map_matches_lcs_alignment_at_any_context_width(
        (ops, _slots) in arb_ops(),
        context in 0usize..4,
    ) {
        let (base_text, cur_text) = materialize_texts(&ops);
        let diff_text = diff_with_context("p.c", &ops, context);
        let diffs = parse_unified_diff(&diff_text).unwrap();
        prop_assume!(!diffs[0].hunks.is_empty() || base_text == cur_text);
        let map = build_line_map(&diffs[0], base_text.len() as u32, cur_text.len() as u32)
            .unwrap();
        // hunk arithmetic must reproduce the content-based alignment
        let aligned = lcs_pairs(&base_text, &cur_text);
        prop_assert_eq!(map.pairs(), aligned.as_slice());
        // and the baseline text is reconstructible from current text + diff
        let rebuilt = covdiff::diff::reconstruct_baseline_text(&cur_text, &diffs[0]);
        prop_assert_eq!(rebuilt, base_text);
    }

    #[test]
    fn categorization_partitions_both_sides((ops, slots) in arb_ops()) {
        let instance = scripted_instance("p.c", &ops, &slots);
        let diffs = parse_unified_diff(&instance.diff_text).unwrap();
        let map = build_line_map(&diffs[0], instance.base_len, instance.cur_len).unwrap();
        let cf = categorize_file(Some(&instance.base_cov), Some(&instance.cur_cov), &map).unwrap();
        let count = |cat: Category| cf.count(CoverKind::Line, cat);
        let current: u64 = Category::ALL.iter().filter(|c| !c.is_baseline_only()).map(|&c| count(c)).sum();
        prop_assert_eq!(current, instance.cur_cov.points().len() as u64);
        let base_side: u64 = [Category::Cbc, Category::Gbc, Category::Lbc, Category::Ubc]
            .iter().map(|&c| count(c)).sum::<u64>()
            + Category::ALL.iter().filter(|c| c.is_baseline_only()).map(|&c| count(c)).sum::<u64>();
        prop_assert_eq!(base_side, instance.base_cov.points().len() as u64);
    }

    #[test]
    fn date_bin_assignment_is_monotone(
        mut cutoffs in prop::collection::btree_set(1u32..400, 1..5),
        a in 0.0f64..500.0,
        b in 0.0f64..500.0,
    ) {
        let cutoffs: Vec<f64> = std::mem::take(&mut cutoffs).into_iter().map(f64::from).collect();
        let spec = DateBinSpec::new(cutoffs).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(spec.assign(lo) <= spec.assign(hi));
    }

    #[test]
    fn age_days_is_monotone_and_zero_at_now(edit in 0i64..2_000_000_000, delta in 0i64..1_000_000) {
        let annotation = LineAnnotation { line: 1, owner: "o".to_string(), edit_time: edit };
        let at_edit = age_days(&annotation, edit).unwrap();
        prop_assert_eq!(at_edit, 0.0);
        let later = age_days(&annotation, edit + delta).unwrap();
        prop_assert!(later >= 0.0);
        prop_assert_eq!(later == 0.0, delta == 0);
        prop_assert!(age_days(&annotation, edit - 1).is_err());
    }

    #[test]
    fn gate_extra_clauses_never_rescue_a_failure(
        totals in prop::collection::btree_map(
            (0usize..12).prop_map(|i| Category::ALL[i]), 0u64..5, 0..6
        ),
        bound in 0u64..3,
    ) {
        let base_criteria = GateCriteria::default();
        let mut more = base_criteria.clone();
        more.constraints.push(Constraint {
            categories: vec![Category::Gbc, Category::Gnc],
            comparator: Comparator::Le,
            bound,
        });
        let v1 = evaluate_gate(&totals, &[], &base_criteria);
        let v2 = evaluate_gate(&totals, &[], &more);
        if !v1.passed {
            prop_assert!(!v2.passed);
        }
        prop_assert!(v2.violations.len() >= v1.violations.len());
    }

    #[test]
    fn exclusion_is_idempotent_under_random_markers(
        lines in prop::collection::vec(
            prop_oneof![
                4 => Just("code();".to_string()),
                1 => Just("x; // LCOV_EXCL_LINE".to_string()),
                1 => Just("// LCOV_EXCL_START".to_string()),
                1 => Just("// LCOV_EXCL_STOP".to_string()),
            ],
            1..25
        ),
        hits in prop::collection::vec(0u64..3, 1..25),
    ) {
        let cfg = ExclusionConfig::default();
        let n = lines.len().min(hits.len());
        let fc = FileCoverage::from_points(
            "a.c",
            (0..n).map(|i| Coverpoint::line(i as u32 + 1, hits[i])),
        );
        match apply_exclusions(&fc, Some(&lines), &cfg) {
            Ok(once) => {
                let twice = apply_exclusions(&once.retained, Some(&lines), &cfg).unwrap();
                prop_assert_eq!(&twice.retained, &once.retained);
                prop_assert!(twice.excluded_hits.is_empty());
                // partition: retained + excluded = original
                let excluded_hit_count = once
                    .excluded_hits
                    .iter()
                    .filter(|(_, _, _)| true)
                    .count();
                prop_assert!(once.retained.points().len() + excluded_hit_count <= fc.points().len());
            }
            Err(_) => {
                // unmatched STOP is a legitimate rejection, nothing to check
            }
        }
    }

    #[test]
    fn normalize_path_is_idempotent(path in "[a-zA-Z0-9_./\\\\-]{0,40}") {
        let once = normalize_path(&path);
        prop_assert_eq!(normalize_path(&once), once);
    }
}

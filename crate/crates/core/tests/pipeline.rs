use biunitary::arith::sigma_bu_oracle;
use biunitary::report::{aggregate, compare_to_paper, emit, ComparisonMode, Interval, OutputFormat, TableSummary};
use biunitary::search::{run_search, SearchConfig};

#[test]
fn hit_count_independent_of_segment_size() {
    let totals: Vec<u64> = [10_000, 100_000, 1_000_000]
        .into_iter()
        .map(|size| {
            run_search(&SearchConfig::new(1, 1_000_000).segment_size(size))
                .unwrap()
                .summary
                .total()
        })
        .collect();
    assert!(totals.windows(2).all(|w| w[0] == w[1]), "{totals:?}");
}

#[test]
fn records_revalidate_with_the_oracle() {
    let out = run_search(&SearchConfig::new(1, 200_000)).unwrap();
    for r in &out.records {
        let s1 = sigma_bu_oracle(r.n).unwrap();
        let s2 = sigma_bu_oracle(s1).unwrap();
        assert_eq!((s1, s2), (r.s1, r.s2), "n={}", r.n);
        assert_eq!(s2, r.k as u64 * r.n);
    }
}

#[test]
fn emitted_summary_parses_back_and_recomputes() {
    let out = run_search(&SearchConfig::new(1, 1 << 16)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("summary.json");
    emit(&out.summary, OutputFormat::Json, &json).unwrap();
    let parsed = TableSummary::load(&json).unwrap();
    assert_eq!(parsed, out.summary);
    assert_eq!(aggregate(&parsed.records().unwrap(), parsed.interval), out.summary);
    assert_eq!(parsed.records().unwrap(), out.records);
}

#[test]
fn k5_members_start_as_printed() {
    let out = run_search(&SearchConfig::new(1, 10_000)).unwrap();
    assert_eq!(&out.summary.members(5)[..4], &[24, 30, 144, 288]);
}

#[test]
fn partial_interval_is_exemplar_only() {
    let out = run_search(&SearchConfig::new(1, 1 << 20)).unwrap();
    let cmp = compare_to_paper(&out.summary).unwrap();
    assert_eq!(cmp.mode, ComparisonMode::ExemplarOnly);
    assert!(cmp.is_match(), "{cmp}");
    assert!(cmp.members.iter().any(|m| m.n == 9 && m.matches()));
}

#[test]
fn empty_interval_summary() {
    let out = run_search(&SearchConfig::new(11, 14)).unwrap();
    assert_eq!(out.summary, aggregate(&[], Interval { lo: 11, hi: 14 }));
}

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::sigma_bu_of;
use crate::search::SearchRecord;

use super::ReportError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn contains(&self, n: u64) -> bool {
        (self.lo..=self.hi).contains(&n)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KRow {
    pub count: u64,
    /// Ascending.
    pub members: Vec<u64>,
}

/// Hits of a search grouped by their multiplier k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSummary {
    pub interval: Interval,
    pub per_k: BTreeMap<u32, KRow>,
}

/// Groups records by k. Members come out ascending whatever the input order.
pub fn aggregate(records: &[SearchRecord], interval: Interval) -> TableSummary {
    let mut per_k: BTreeMap<u32, KRow> = BTreeMap::new();
    for r in records {
        let row = per_k.entry(r.k).or_default();
        row.count += 1;
        row.members.push(r.n);
    }
    for row in per_k.values_mut() {
        row.members.sort_unstable();
    }
    TableSummary { interval, per_k }
}

impl TableSummary {
    pub fn total(&self) -> u64 {
        self.per_k.values().map(|r| r.count).sum()
    }

    pub fn members(&self, k: u32) -> &[u64] {
        self.per_k.get(&k).map_or(&[], |r| r.members.as_slice())
    }

    /// Multiplier recorded for `n`, if it is a member.
    pub fn k_of(&self, n: u64) -> Option<u32> {
        self.per_k
            .iter()
            .find(|(_, row)| row.members.binary_search(&n).is_ok())
            .map(|(&k, _)| k)
    }

    /// Members of every row, ascending.
    pub fn all_members(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self.per_k.values().flat_map(|r| r.members.iter().copied()).collect();
        all.sort_unstable();
        all
    }

    /// Rebuilds full records, recomputing σ**(n) and taking σ**(σ**(n)) = kn.
    pub fn records(&self) -> Result<Vec<SearchRecord>, ReportError> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (&k, row) in &self.per_k {
            for &n in &row.members {
                let s1 = sigma_bu_of(n)?;
                let s2 = n.checked_mul(k as u64).ok_or_else(|| ReportError::Parse(format!("k*n overflows for n = {n}")))?;
                out.push(SearchRecord { n, s1, s2, k });
            }
        }
        out.sort_unstable_by_key(|r| r.n);
        Ok(out)
    }

    fn validate(&self) -> Result<(), ReportError> {
        let bad = |why: String| Err(ReportError::Parse(why));
        if self.interval.lo == 0 || self.interval.lo > self.interval.hi {
            return bad(format!("invalid interval {}", self.interval));
        }
        for (&k, row) in &self.per_k {
            if k == 0 {
                return bad("k = 0".into());
            }
            if row.count != row.members.len() as u64 {
                return bad(format!("k = {k}: count {} but {} members", row.count, row.members.len()));
            }
            if !row.members.windows(2).all(|w| w[0] < w[1]) {
                return bad(format!("k = {k}: members not strictly ascending"));
            }
            if let Some(n) = row.members.iter().find(|&&n| !self.interval.contains(n)) {
                return bad(format!("k = {k}: member {n} outside {}", self.interval));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = SummaryFile {
            interval: self.interval,
            generated_by: GeneratedBy {
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            per_k: self
                .per_k
                .iter()
                .map(|(&k, row)| KRowFile {
                    k,
                    count: row.count,
                    members: row.members.clone(),
                })
                .collect(),
            total: self.total(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let file: SummaryFile = serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))?;
        let mut per_k = BTreeMap::new();
        for row in file.per_k {
            let previous = per_k.insert(
                row.k,
                KRow {
                    count: row.count,
                    members: row.members,
                },
            );
            if previous.is_some() {
                return Err(ReportError::Parse(format!("duplicate row for k = {}", row.k)));
            }
        }
        let summary = TableSummary {
            interval: file.interval,
            per_k,
        };
        summary.validate()?;
        if summary.total() != file.total {
            return Err(ReportError::Parse(format!(
                "total {} disagrees with row counts {}",
                file.total,
                summary.total()
            )));
        }
        Ok(summary)
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(|e| ReportError::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummaryFile {
    interval: Interval,
    generated_by: GeneratedBy,
    per_k: Vec<KRowFile>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct GeneratedBy {
    version: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KRowFile {
    k: u32,
    count: u64,
    members: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(ReportError::Parse(format!("unknown format {other:?}"))),
        }
    }
}

/// `n,s1,s2,k` with a header row, ascending n.
pub fn write_records_csv<W: Write>(records: &[SearchRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "n,s1,s2,k")?;
    for r in records {
        writeln!(w, "{},{},{},{}", r.n, r.s1, r.s2, r.k)?;
    }
    w.flush()
}

pub fn records_csv(records: &[SearchRecord]) -> String {
    let mut buf = Vec::new();
    write_records_csv(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Writes `contents` next to `path` and renames it into place.
pub(crate) fn write_atomically(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    let mut tmp_name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let write = || -> io::Result<()> {
        fs::write(&tmp, contents)?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        ReportError::io(path, e)
    })
}

/// Writes the summary as CSV records or the JSON summary document.
pub fn emit(summary: &TableSummary, format: OutputFormat, path: &Path) -> Result<(), ReportError> {
    let contents = match format {
        OutputFormat::Csv => records_csv(&summary.records()?),
        OutputFormat::Json => summary.to_json(),
    };
    write_atomically(path, contents.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sigma_bu_oracle;
    use proptest::prelude::*;

    /// Hits in [1, hi] found with the divisor-enumeration oracle only.
    fn oracle_records(hi: u64) -> Vec<SearchRecord> {
        (1..=hi)
            .filter_map(|n| {
                let s1 = sigma_bu_oracle(n).unwrap();
                let s2 = sigma_bu_oracle(s1).unwrap();
                (s2 % n == 0).then(|| SearchRecord { n, s1, s2, k: (s2 / n) as u32 })
            })
            .collect()
    }

    #[test]
    fn csv_golden_for_one_to_sixteen() {
        let records = oracle_records(16);
        let summary = aggregate(&records, Interval { lo: 1, hi: 16 });
        let expected = "n,s1,s2,k\n1,1,1,1\n2,3,4,2\n8,15,24,3\n9,10,18,2\n10,18,30,3\n15,24,60,4\n";
        assert_eq!(records_csv(&records), expected);
        assert_eq!(records_csv(&summary.records().unwrap()), expected);
    }

    #[test]
    fn empty_summary() {
        let summary = aggregate(&[], Interval { lo: 11, hi: 14 });
        assert_eq!(summary.total(), 0);
        assert!(summary.per_k.is_empty());
        assert_eq!(records_csv(&summary.records().unwrap()), "n,s1,s2,k\n");
        assert_eq!(TableSummary::from_json(&summary.to_json()).unwrap(), summary);
    }

    #[test]
    fn aggregate_small_interval() {
        let summary = aggregate(&oracle_records(1 << 10), Interval { lo: 1, hi: 1 << 10 });
        assert_eq!(summary.members(1), &[1]);
        assert_eq!(summary.members(2), &[2, 9]);
        assert_eq!(summary.members(3), &[8, 10, 21, 512]);
        assert_eq!(summary.k_of(512), Some(3));
        assert_eq!(summary.k_of(16), None);
    }

    #[test]
    fn json_shape() {
        let summary = aggregate(&oracle_records(10), Interval { lo: 1, hi: 10 });
        let v: serde_json::Value = serde_json::from_str(&summary.to_json()).unwrap();
        assert_eq!(v["interval"]["lo"], 1);
        assert_eq!(v["interval"]["hi"], 10);
        assert_eq!(v["generated_by"]["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(v["per_k"][1]["k"], 2);
        assert_eq!(v["per_k"][1]["members"], serde_json::json!([2, 9]));
        assert_eq!(v["total"], 5);
        assert!(summary.to_json().ends_with("}\n"));
    }

    #[test]
    fn rejects_inconsistent_json() {
        let good = aggregate(&oracle_records(10), Interval { lo: 1, hi: 10 }).to_json();
        assert!(TableSummary::from_json(&good.replace("\"total\": 5", "\"total\": 6")).is_err());
        assert!(TableSummary::from_json("{ not json").is_err());
        assert!(TableSummary::from_json(&good.replace("\"hi\": 10", "\"hi\": 5")).is_err());
    }

    #[test]
    fn emit_writes_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let summary = aggregate(&oracle_records(16), Interval { lo: 1, hi: 16 });
        let csv = dir.path().join("out.csv");
        let json = dir.path().join("out.json");
        emit(&summary, OutputFormat::Csv, &csv).unwrap();
        emit(&summary, OutputFormat::Json, &json).unwrap();
        assert!(fs::read_to_string(&csv).unwrap().starts_with("n,s1,s2,k\n1,1,1,1\n"));
        assert_eq!(TableSummary::load(&json).unwrap(), summary);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
    }

    fn arb_summary() -> impl Strategy<Value = TableSummary> {
        proptest::collection::btree_map(1u32..25, proptest::collection::btree_set(1u64..10_000, 0..6), 0..8).prop_map(|rows| {
            let per_k = rows
                .into_iter()
                .map(|(k, set)| {
                    let members: Vec<u64> = set.into_iter().collect();
                    (k, KRow { count: members.len() as u64, members })
                })
                .collect();
            TableSummary { interval: Interval { lo: 1, hi: 10_000 }, per_k }
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(summary in arb_summary()) {
            prop_assert_eq!(TableSummary::from_json(&summary.to_json()).unwrap(), summary);
        }
    }
}

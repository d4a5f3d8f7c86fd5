use std::fmt;

use serde::Serialize;

use super::reference::{PaperReference, REFERENCE_HI};
use super::summary::TableSummary;
use super::ReportError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonMode {
    /// The summary covers exactly `[1, 2^30]`; counts are compared.
    Full,
    /// A sub-interval; only printed members and impossible rows are checked.
    ExemplarOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub k: u32,
    pub expected: u64,
    pub found: u64,
}

impl RowCheck {
    pub fn matches(&self) -> bool {
        self.expected == self.found
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemberCheck {
    pub n: u64,
    pub expected_k: u32,
    pub found_k: Option<u32>,
}

impl MemberCheck {
    pub fn matches(&self) -> bool {
        self.found_k == Some(self.expected_k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub mode: ComparisonMode,
    pub lo: u64,
    pub hi: u64,
    pub expected_total: Option<u64>,
    pub found_total: u64,
    /// Empty in exemplar-only mode.
    pub rows: Vec<RowCheck>,
    /// Printed members inside the interval.
    pub members: Vec<MemberCheck>,
    /// Rows the reference says are empty but the summary populates.
    pub unexpected_rows: Vec<RowCheck>,
    /// Rows holding more members than the reference allows for the whole range.
    pub overfull_rows: Vec<RowCheck>,
}

impl Comparison {
    pub fn mismatches(&self) -> usize {
        let total = usize::from(self.expected_total.is_some_and(|t| t != self.found_total));
        total
            + self.rows.iter().filter(|r| !r.matches()).count()
            + self.members.iter().filter(|m| !m.matches()).count()
            + self.unexpected_rows.len()
            + self.overfull_rows.len()
    }

    pub fn is_match(&self) -> bool {
        self.mismatches() == 0
    }

    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("comparison serializes");
        value["is_match"] = self.is_match().into();
        value["mismatches"] = self.mismatches().into();
        serde_json::to_string_pretty(&value).expect("comparison serializes") + "\n"
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "MISMATCH" };
        match self.mode {
            ComparisonMode::Full => writeln!(f, "full comparison over [{}, {}]", self.lo, self.hi)?,
            ComparisonMode::ExemplarOnly => writeln!(
                f,
                "exemplar-only comparison over [{}, {}] (counts need the full [1, {REFERENCE_HI}] run)",
                self.lo, self.hi
            )?,
        }
        if let Some(expected) = self.expected_total {
            writeln!(
                f,
                "total: expected {expected}, found {} {}",
                self.found_total,
                mark(expected == self.found_total)
            )?;
        } else {
            writeln!(f, "total: found {}", self.found_total)?;
        }
        for r in &self.rows {
            writeln!(f, "k={:>2}: expected {:>3}, found {:>3} {}", r.k, r.expected, r.found, mark(r.matches()))?;
        }
        for r in &self.unexpected_rows {
            writeln!(f, "k={:>2}: expected no members, found {} MISMATCH", r.k, r.found)?;
        }
        for r in &self.overfull_rows {
            writeln!(f, "k={:>2}: at most {} members exist, found {} MISMATCH", r.k, r.expected, r.found)?;
        }
        let present = self.members.iter().filter(|m| m.matches()).count();
        writeln!(f, "printed members present: {present}/{}", self.members.len())?;
        for m in self.members.iter().filter(|m| !m.matches()) {
            match m.found_k {
                Some(k) => writeln!(f, "  {} listed under k={} but found with k={k}", m.n, m.expected_k)?,
                None => writeln!(f, "  {} (k={}) missing", m.n, m.expected_k)?,
            }
        }
        write!(f, "{}", if self.is_match() { "MATCH" } else { "MISMATCH" })
    }
}

/// Compares a summary against the reference table.
///
/// `[1, 2^30]` gets the full comparison. Any other interval inside it gets
/// exemplar-only mode; intervals reaching past `2^30` are refused.
pub fn compare_to_paper(summary: &TableSummary) -> Result<Comparison, ReportError> {
    let reference = PaperReference;
    let (lo, hi) = (summary.interval.lo, summary.interval.hi);
    if lo == 0 || lo > hi || hi > REFERENCE_HI {
        return Err(ReportError::IntervalNotComparable { lo, hi });
    }
    let mode = if (lo, hi) == (1, REFERENCE_HI) {
        ComparisonMode::Full
    } else {
        ComparisonMode::ExemplarOnly
    };

    let found = |k: u32| summary.per_k.get(&k).map_or(0, |r| r.count);
    let rows = match mode {
        ComparisonMode::Full => reference
            .rows()
            .iter()
            .map(|r| RowCheck {
                k: r.k,
                expected: r.count,
                found: found(r.k),
            })
            .collect(),
        ComparisonMode::ExemplarOnly => Vec::new(),
    };
    let members = reference
        .printed_members()
        .filter(|&(_, n)| summary.interval.contains(n))
        .map(|(k, n)| MemberCheck {
            n,
            expected_k: k,
            found_k: summary.k_of(n),
        })
        .collect();
    let unexpected_rows = summary
        .per_k
        .iter()
        .filter(|(&k, row)| reference.is_absent_k(k) && row.count > 0)
        .map(|(&k, row)| RowCheck {
            k,
            expected: 0,
            found: row.count,
        })
        .collect();
    let overfull_rows = match mode {
        ComparisonMode::Full => Vec::new(),
        ComparisonMode::ExemplarOnly => summary
            .per_k
            .iter()
            .filter_map(|(&k, row)| {
                let expected = reference.expected_count(k);
                (expected > 0 && row.count > expected).then_some(RowCheck {
                    k,
                    expected,
                    found: row.count,
                })
            })
            .collect(),
    };

    Ok(Comparison {
        mode,
        lo,
        hi,
        expected_total: (mode == ComparisonMode::Full).then(|| reference.total()),
        found_total: summary.total(),
        rows,
        members,
        unexpected_rows,
        overfull_rows,
    })
}

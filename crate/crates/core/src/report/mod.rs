//! Per-k summaries of search hits, comparison with the published table, and
//! CSV/JSON output.

mod compare;
mod reference;
mod summary;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::arith::ArithError;

pub use compare::{compare_to_paper, Comparison, ComparisonMode, MemberCheck, RowCheck};
pub use reference::{PaperReference, ReferenceRow, REFERENCE_HI, REFERENCE_ROWS, REFERENCE_TOTAL};
pub use summary::{aggregate, emit, records_csv, write_records_csv, Interval, KRow, OutputFormat, TableSummary};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot compare [{lo}, {hi}] with the reference table over [1, 2^30]")]
    IntervalNotComparable { lo: u64, hi: u64 },
    #[error("malformed summary: {0}")]
    Parse(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl ReportError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

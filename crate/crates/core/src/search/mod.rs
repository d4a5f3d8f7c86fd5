//! Exhaustive scan for `n | σ**(σ**(n))` over an interval, split into
//! independently sieved segments.

mod checkpoint;
mod named;
mod scan;
mod segment;

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{mpsc, Arc};
use std::time::Instant;

use thiserror::Error;

use crate::arith::ArithError;
use crate::report::{aggregate, Interval, TableSummary};

pub use checkpoint::{Checkpoint, FORMAT_VERSION, MAGIC};
pub use named::verify_named_sets;
pub use scan::{scan_segment, SearchRecord};
pub use segment::{Segment, SieveContext, MAX_BOUND};

/// Default number of integers per segment.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: u64, hi: u64 },
    #[error("upper bound {0} exceeds 2^40")]
    BoundTooLarge(u64),
    #[error("segment of {0} integers is too large")]
    SegmentTooLarge(u64),
    #[error("segment size and worker count must be positive")]
    ZeroParameter,
    #[error("arithmetic failure at n = {n}: {source}")]
    Arith { n: u64, source: ArithError },
    #[error(transparent)]
    Setup(#[from] ArithError),
    #[error("checkpoint format version {found}, expected {expected}")]
    CheckpointVersion { found: u32, expected: u32 },
    #[error("checkpoint covers [{found_lo}, {found_hi}] but this run is [{lo}, {hi}]")]
    CheckpointInterval { found_lo: u64, found_hi: u64, lo: u64, hi: u64 },
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl SearchError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub lo: u64,
    pub hi: u64,
    pub segment_size: u64,
    pub workers: usize,
    /// Resumed from when present, rewritten after every merged segment.
    pub checkpoint: Option<PathBuf>,
    /// Per-segment progress lines on stderr.
    pub progress: bool,
    /// Stop after this many segments have been merged, as if interrupted.
    pub stop_after_segments: Option<u64>,
}

impl SearchConfig {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self {
            lo,
            hi,
            segment_size: DEFAULT_SEGMENT_SIZE,
            workers: 1,
            checkpoint: None,
            progress: false,
            stop_after_segments: None,
        }
    }

    pub fn segment_size(mut self, size: u64) -> Self {
        self.segment_size = size;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    pub fn progress(mut self, on: bool) -> Self {
        self.progress = on;
        self
    }

    pub fn stop_after_segments(mut self, segments: u64) -> Self {
        self.stop_after_segments = Some(segments);
        self
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.lo == 0 || self.lo > self.hi {
            return Err(SearchError::InvalidInterval { lo: self.lo, hi: self.hi });
        }
        if self.hi > MAX_BOUND {
            return Err(SearchError::BoundTooLarge(self.hi));
        }
        if self.segment_size == 0 || self.workers == 0 {
            return Err(SearchError::ZeroParameter);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub records: Vec<SearchRecord>,
    pub summary: TableSummary,
    /// Highest `n` covered so far.
    pub watermark: u64,
}

impl SearchOutcome {
    pub fn is_complete(&self) -> bool {
        self.watermark == self.summary.interval.hi
    }
}

type SegmentResult = (u64, u64, u64, Result<Vec<SearchRecord>, SearchError>);

/// Scans `[lo, hi]` with up to `workers` threads, merging segments in order.
///
/// The records are identical for every worker count, segment size and
/// interruption history.
pub fn run_search(config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let (lo, hi) = (config.lo, config.hi);

    let mut state = match &config.checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::load(path)?;
            if (cp.lo, cp.hi) != (lo, hi) {
                return Err(SearchError::CheckpointInterval {
                    found_lo: cp.lo,
                    found_hi: cp.hi,
                    lo,
                    hi,
                });
            }
            cp
        }
        _ => Checkpoint::new(lo, hi),
    };

    let start = state.watermark + 1;
    let total_segments = if state.is_complete() {
        0
    } else {
        (hi - start) / config.segment_size + 1
    };
    let segment_bounds = |idx: u64| {
        let s = start + idx * config.segment_size;
        (s, hi.min(s + config.segment_size - 1))
    };

    if total_segments > 0 {
        let ctx = Arc::new(SieveContext::new(hi)?);
        let next = AtomicU64::new(0);
        let stop = AtomicBool::new(false);
        let started = Instant::now();
        let (tx, rx) = mpsc::channel::<SegmentResult>();
        let workers = config.workers.min(total_segments.try_into().unwrap_or(usize::MAX));

        let merge_result = std::thread::scope(|scope| {
            for _ in 0..workers {
                let tx = tx.clone();
                let ctx = Arc::clone(&ctx);
                let (next, stop) = (&next, &stop);
                scope.spawn(move || {
                    let mut segment: Option<Segment> = None;
                    while !stop.load(Ordering::Relaxed) {
                        let idx = next.fetch_add(1, Ordering::Relaxed);
                        if idx >= total_segments {
                            break;
                        }
                        let (s, e) = segment_bounds(idx);
                        let result = match segment.as_mut() {
                            Some(seg) => seg.refill(s, e).map(|_| ()),
                            None => Segment::new(Arc::clone(&ctx), s, e).map(|seg| {
                                segment = Some(seg);
                            }),
                        }
                        .and_then(|_| scan_segment(segment.as_ref().unwrap()));
                        if tx.send((idx, s, e, result)).is_err() {
                            break;
                        }
                    }
                });
            }
            drop(tx);

            let mut pending: BTreeMap<u64, (u64, u64, Vec<SearchRecord>)> = BTreeMap::new();
            let mut next_to_merge = 0u64;
            let mut merged = 0u64;
            for (idx, s, e, result) in rx.iter() {
                let records = match result {
                    Ok(r) => r,
                    Err(err) => {
                        stop.store(true, Ordering::Relaxed);
                        return Err(err);
                    }
                };
                pending.insert(idx, (s, e, records));
                while let Some((s, e, records)) = pending.remove(&next_to_merge) {
                    let hits = records.len();
                    state.records.extend(records);
                    state.watermark = e;
                    if let Some(path) = &config.checkpoint {
                        if let Err(err) = state.store(path) {
                            stop.store(true, Ordering::Relaxed);
                            return Err(err);
                        }
                    }
                    if config.progress {
                        eprintln!(
                            "segment [{s},{e}] done, hits={hits}, elapsed={:.3}",
                            started.elapsed().as_secs_f64()
                        );
                    }
                    next_to_merge += 1;
                    merged += 1;
                    if config.stop_after_segments.is_some_and(|limit| merged >= limit) {
                        stop.store(true, Ordering::Relaxed);
                        return Ok(());
                    }
                }
            }
            Ok(())
        });
        merge_result?;
    }

    let summary = aggregate(&state.records, Interval { lo, hi });
    Ok(SearchOutcome {
        records: state.records,
        summary,
        watermark: state.watermark,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(outcome: &SearchOutcome, k: u32) -> Vec<u64> {
        outcome.summary.members(k).to_vec()
    }

    #[test]
    fn superperfect_below_2_pow_20() {
        let out = run_search(&SearchConfig::new(1, 1 << 20)).unwrap();
        assert!(out.is_complete());
        assert_eq!(members(&out, 2), vec![2, 9]);
        assert_eq!(members(&out, 3), vec![8, 10, 21, 512]);
    }

    #[test]
    fn k4_row_complete_below_2_pow_14() {
        let out = run_search(&SearchConfig::new(1, 1 << 14)).unwrap();
        assert_eq!(members(&out, 4), vec![15, 18, 324, 1023, 1404, 3276, 8925, 15345]);
    }

    #[test]
    fn segmentation_and_workers_do_not_change_records() {
        let reference = run_search(&SearchConfig::new(1, 200_000)).unwrap().records;
        for (size, workers) in [(1_000, 1), (7_777, 3), (50_000, 8), (1, 2)] {
            let hi = if size == 1 { 3_000 } else { 200_000 };
            let out = run_search(&SearchConfig::new(1, hi).segment_size(size).workers(workers)).unwrap();
            let expected: Vec<_> = reference.iter().copied().filter(|r| r.n <= hi).collect();
            assert_eq!(out.records, expected, "size={size} workers={workers}");
        }
    }

    #[test]
    fn interrupt_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let base = SearchConfig::new(1, 100_000).segment_size(9_000).workers(3).checkpoint(&path);
        let partial = run_search(&base.clone().stop_after_segments(4)).unwrap();
        assert!(!partial.is_complete());
        assert_eq!(partial.watermark, 36_000);
        let cp = Checkpoint::load(&path).unwrap();
        assert_eq!(cp.watermark, 36_000);
        assert!(cp.records.iter().all(|r| r.n <= 36_000));

        let resumed = run_search(&base).unwrap();
        let straight = run_search(&SearchConfig::new(1, 100_000)).unwrap();
        assert!(resumed.is_complete());
        assert_eq!(resumed.records, straight.records);
        assert_eq!(resumed.summary, straight.summary);
        // a finished checkpoint short-circuits
        assert_eq!(run_search(&base).unwrap().records, straight.records);
    }

    #[test]
    fn refuses_mismatched_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        run_search(&SearchConfig::new(1, 1_000).checkpoint(&path)).unwrap();
        let err = run_search(&SearchConfig::new(1, 2_000).checkpoint(&path)).unwrap_err();
        assert!(matches!(err, SearchError::CheckpointInterval { .. }));

        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 9;
        std::fs::write(&path, bytes).unwrap();
        let err = run_search(&SearchConfig::new(1, 1_000).checkpoint(&path)).unwrap_err();
        assert!(matches!(err, SearchError::CheckpointVersion { found: 9, .. }));
    }

    #[test]
    fn validates_parameters() {
        assert!(matches!(run_search(&SearchConfig::new(0, 5)), Err(SearchError::InvalidInterval { .. })));
        assert!(matches!(run_search(&SearchConfig::new(5, 4)), Err(SearchError::InvalidInterval { .. })));
        assert!(matches!(
            run_search(&SearchConfig::new(1, MAX_BOUND + 1)),
            Err(SearchError::BoundTooLarge(_))
        ));
        assert!(matches!(run_search(&SearchConfig::new(1, 5).workers(0)), Err(SearchError::ZeroParameter)));
    }
}

//! Resumable search state.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        4 bytes  "BUSP"
//! version      u32
//! lo           u64
//! hi           u64
//! watermark    u64
//! record_count u64
//! records      record_count x { n u64, s1 u64, s2 u64, k u32 }
//! crc32        u32      over every preceding byte
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::scan::SearchRecord;
use super::SearchError;

pub const MAGIC: [u8; 4] = *b"BUSP";
pub const FORMAT_VERSION: u32 = 1;

const HEADER_LEN: usize = 4 + 4 + 8 * 4;
const RECORD_LEN: usize = 8 * 3 + 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub format_version: u32,
    pub lo: u64,
    pub hi: u64,
    /// Highest `n` whose segment has been merged; `lo - 1` before any work.
    pub watermark: u64,
    pub records: Vec<SearchRecord>,
}

impl Checkpoint {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            lo,
            hi,
            watermark: lo - 1,
            records: Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.watermark == self.hi
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(HEADER_LEN + self.records.len() * RECORD_LEN + 4);
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&self.format_version.to_le_bytes());
        for v in [self.lo, self.hi, self.watermark, self.records.len() as u64] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for r in &self.records {
            buf.extend_from_slice(&r.n.to_le_bytes());
            buf.extend_from_slice(&r.s1.to_le_bytes());
            buf.extend_from_slice(&r.s2.to_le_bytes());
            buf.extend_from_slice(&r.k.to_le_bytes());
        }
        let crc = crc32fast::hash(&buf);
        buf.extend_from_slice(&crc.to_le_bytes());
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SearchError> {
        let corrupt = |why: &str| SearchError::CorruptCheckpoint(why.to_string());
        if bytes.len() < HEADER_LEN + 4 {
            return Err(corrupt("truncated header"));
        }
        if bytes[..4] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let (payload, crc_bytes) = bytes.split_at(bytes.len() - 4);
        let stored_crc = u32::from_le_bytes(crc_bytes.try_into().unwrap());
        let u32_at = |at: usize| u32::from_le_bytes(payload[at..at + 4].try_into().unwrap());
        let u64_at = |at: usize| u64::from_le_bytes(payload[at..at + 8].try_into().unwrap());

        let format_version = u32_at(4);
        if format_version != FORMAT_VERSION {
            return Err(SearchError::CheckpointVersion {
                found: format_version,
                expected: FORMAT_VERSION,
            });
        }
        if crc32fast::hash(payload) != stored_crc {
            return Err(corrupt("checksum mismatch"));
        }
        let lo = u64_at(8);
        let hi = u64_at(16);
        let watermark = u64_at(24);
        let count = u64_at(32);
        let expected_len = (count as u128) * RECORD_LEN as u128 + HEADER_LEN as u128;
        if payload.len() as u128 != expected_len {
            return Err(corrupt("record count does not match length"));
        }
        if lo == 0 || lo > hi || watermark < lo - 1 || watermark > hi {
            return Err(corrupt("inconsistent interval"));
        }
        let records: Vec<SearchRecord> = payload[HEADER_LEN..]
            .chunks_exact(RECORD_LEN)
            .map(|c| SearchRecord {
                n: u64::from_le_bytes(c[0..8].try_into().unwrap()),
                s1: u64::from_le_bytes(c[8..16].try_into().unwrap()),
                s2: u64::from_le_bytes(c[16..24].try_into().unwrap()),
                k: u32::from_le_bytes(c[24..28].try_into().unwrap()),
            })
            .collect();
        let sorted = records.windows(2).all(|w| w[0].n < w[1].n);
        let in_range = records.iter().all(|r| r.n >= lo && r.n <= watermark);
        if !sorted || !in_range {
            return Err(corrupt("records out of order or beyond watermark"));
        }
        Ok(Self {
            format_version,
            lo,
            hi,
            watermark,
            records,
        })
    }

    pub fn load(path: &Path) -> Result<Self, SearchError> {
        let bytes = fs::read(path).map_err(|e| SearchError::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Writes to a sibling temporary file, then renames over `path`.
    pub fn store(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = path.with_extension("tmp");
        let write = || -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, path)
        };
        write().map_err(|e| SearchError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Checkpoint {
        Checkpoint {
            format_version: FORMAT_VERSION,
            lo: 1,
            hi: 100,
            watermark: 10,
            records: vec![
                SearchRecord { n: 1, s1: 1, s2: 1, k: 1 },
                SearchRecord { n: 2, s1: 3, s2: 4, k: 2 },
            ],
        }
    }

    #[test]
    fn exact_byte_layout() {
        let bytes = sample().to_bytes();
        assert_eq!(bytes.len(), 40 + 2 * 28 + 4);
        assert_eq!(&bytes[..4], b"BUSP");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..16], &1u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &100u64.to_le_bytes());
        assert_eq!(&bytes[24..32], &10u64.to_le_bytes());
        assert_eq!(&bytes[32..40], &2u64.to_le_bytes());
        // second record: n=2, s1=3, s2=4, k=2
        assert_eq!(&bytes[68..76], &2u64.to_le_bytes());
        assert_eq!(&bytes[92..96], &2u32.to_le_bytes());
        let crc = crc32fast::hash(&bytes[..96]);
        assert_eq!(&bytes[96..], &crc.to_le_bytes());
    }

    #[test]
    fn detects_corruption() {
        let mut bytes = sample().to_bytes();
        bytes[50] ^= 1;
        assert!(matches!(Checkpoint::from_bytes(&bytes), Err(SearchError::CorruptCheckpoint(_))));
        let mut bytes = sample().to_bytes();
        bytes[0] = b'X';
        assert!(matches!(Checkpoint::from_bytes(&bytes), Err(SearchError::CorruptCheckpoint(_))));
        assert!(matches!(Checkpoint::from_bytes(&bytes[..20]), Err(SearchError::CorruptCheckpoint(_))));
    }

    #[test]
    fn rejects_other_versions() {
        let mut cp = sample();
        cp.format_version = 2;
        assert!(matches!(
            Checkpoint::from_bytes(&cp.to_bytes()),
            Err(SearchError::CheckpointVersion { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn store_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ckpt");
        sample().store(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), sample());
        assert!(!path.with_extension("tmp").exists());
    }

    proptest! {
        #[test]
        fn bytes_round_trip(lo in 1u64..1000, span in 0u64..1000, ks in proptest::collection::vec(1u32..30, 0..20)) {
            let hi = lo + span;
            let records: Vec<_> = ks.iter().enumerate()
                .map(|(i, &k)| SearchRecord { n: lo + i as u64, s1: 7, s2: k as u64 * (lo + i as u64), k })
                .filter(|r| r.n <= hi)
                .collect();
            let watermark = records.last().map_or(lo - 1, |r| r.n);
            let cp = Checkpoint { format_version: FORMAT_VERSION, lo, hi, watermark, records };
            prop_assert_eq!(Checkpoint::from_bytes(&cp.to_bytes()).unwrap(), cp);
        }
    }
}

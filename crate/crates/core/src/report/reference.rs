//! The published table of all N <= 2^30 with σ**(σ**(N)) = kN.
//!
//! Rows with an ellipsis in print list only their printed members here; the
//! count column is complete.

/// Upper end of the reference interval.
pub const REFERENCE_HI: u64 = 1 << 30;

/// Total number of N in `[1, 2^30]`.
pub const REFERENCE_TOTAL: u64 = 173;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceRow {
    pub k: u32,
    pub count: u64,
    pub printed: &'static [u64],
}

const fn row(k: u32, count: u64, printed: &'static [u64]) -> ReferenceRow {
    ReferenceRow { k, count, printed }
}

pub const REFERENCE_ROWS: &[ReferenceRow] = &[
    row(1, 1, &[1]),
    row(2, 2, &[2, 9]),
    row(3, 4, &[8, 10, 21, 512]),
    row(4, 8, &[15, 18, 324, 1023, 8925, 15345]),
    row(5, 9, &[24, 30, 144, 288, 14976, 23040]),
    row(6, 13, &[42, 60, 160, 270, 673254400]),
    row(7, 13, &[240, 1200, 2400, 171196416]),
    row(8, 18, &[648, 2808, 3570, 1062892908]),
    row(9, 26, &[168, 960, 10368, 769600000]),
    row(10, 18, &[480, 2856, 13824, 627720192]),
    row(11, 8, &[321408, 1392768, 125706240]),
    row(12, 26, &[4320, 10080, 779688000]),
    row(13, 8, &[57120, 17821440, 942120960]),
    row(14, 9, &[103680, 217728, 773760000]),
    row(15, 3, &[1827840, 181059840, 754427520]),
    row(16, 4, &[23591520, 594397440]),
    row(17, 1, &[898128000]),
    row(18, 1, &[374250240]),
    row(20, 1, &[11975040]),
];

/// Immutable view over the reference table.
#[derive(Debug, Clone, Copy, Default)]
pub struct PaperReference;

impl PaperReference {
    pub fn rows(&self) -> &'static [ReferenceRow] {
        REFERENCE_ROWS
    }

    pub fn row(&self, k: u32) -> Option<&'static ReferenceRow> {
        REFERENCE_ROWS.iter().find(|r| r.k == k)
    }

    pub fn expected_count(&self, k: u32) -> u64 {
        self.row(k).map_or(0, |r| r.count)
    }

    /// k values that have no N <= 2^30.
    pub fn is_absent_k(&self, k: u32) -> bool {
        self.row(k).is_none()
    }

    pub fn total(&self) -> u64 {
        REFERENCE_TOTAL
    }

    /// Every printed member with its k.
    pub fn printed_members(&self) -> impl Iterator<Item = (u32, u64)> {
        REFERENCE_ROWS
            .iter()
            .flat_map(|r| r.printed.iter().map(move |&n| (r.k, n)))
    }
}

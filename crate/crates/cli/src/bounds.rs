use biunitary::search::MAX_BOUND;

/// Parses `123`, `1_000_000` or `2^30`.
pub fn parse_number(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let base: u64 = parse_plain(base)?;
        let exp: u32 = exp.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return base.checked_pow(exp).ok_or_else(|| format!("{s} does not fit in 64 bits"));
    }
    parse_plain(s)
}

fn parse_plain(s: &str) -> Result<u64, String> {
    let digits: String = s.trim().chars().filter(|&c| c != '_').collect();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{s:?} is not a non-negative integer"));
    }
    digits.parse().map_err(|_| format!("{s} does not fit in 64 bits"))
}

pub fn validate_interval(lo: u64, hi: u64) -> Result<(), String> {
    if lo == 0 {
        return Err("lower bound must be at least 1".into());
    }
    if lo > hi {
        return Err(format!("lower bound {lo} exceeds upper bound {hi}"));
    }
    if hi > MAX_BOUND {
        return Err(format!("upper bound {hi} exceeds 2^40"));
    }
    Ok(())
}

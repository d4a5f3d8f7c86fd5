use crate::arith::{sigma_bu, sigma_unitary, Factorization, SpfTable};
use crate::lemmas::{Case, LemmaError, LemmaId, LemmaReport};

const BIUNITARY_PERFECT: [u64; 3] = [6, 60, 90];
const BIUNITARY_PERFECT_SCAN: u64 = 100_000;
const UNITARY_SUPERPERFECT: [u64; 4] = [2, 9, 165, 238];

/// σ**(N) = 2N exactly for N ∈ {6, 60, 90} up to 10^5, and
/// σ*(σ*(N)) = 2N exactly for N ∈ {2, 9, 165, 238} up to 238.
pub fn verify_named_sets() -> Result<LemmaReport, LemmaError> {
    let mut report = LemmaReport::new(
        LemmaId::NamedSets,
        format!(
            "biunitary perfect N <= {BIUNITARY_PERFECT_SCAN}; unitary superperfect N <= {}",
            UNITARY_SUPERPERFECT[3]
        ),
    );
    let spf = SpfTable::new(BIUNITARY_PERFECT_SCAN as u32);
    let factor = |n: u64| -> Result<Factorization, LemmaError> {
        if spf.contains(n) {
            let mut pairs = Vec::new();
            spf.factor_into(n, &mut pairs);
            Ok(Factorization::from_canonical(pairs, n))
        } else {
            Ok(crate::arith::factorize(n)?)
        }
    };

    let mut perfect = Vec::new();
    for n in 1..=BIUNITARY_PERFECT_SCAN {
        if sigma_bu(&factor(n)?)? == 2 * n {
            perfect.push(n);
        }
    }
    report.check(perfect == BIUNITARY_PERFECT, || {
        Case::new(perfect.clone(), "biunitary perfect numbers differ from {6, 60, 90}")
    });
    report.note(Case::new(perfect, "biunitary perfect"));

    let mut superperfect = Vec::new();
    for n in 1..=UNITARY_SUPERPERFECT[3] {
        let s1 = sigma_unitary(&factor(n)?)?;
        if sigma_unitary(&factor(s1)?)? == 2 * n {
            superperfect.push(n);
        }
    }
    report.check(superperfect == UNITARY_SUPERPERFECT, || {
        Case::new(superperfect.clone(), "unitary superperfect numbers differ from {2, 9, 165, 238}")
    });
    report.note(Case::new(superperfect, "unitary superperfect"));
    Ok(report)
}

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::expansion::parry_bound;
use super::{BetaNumber, BetaSource};
use crate::error::{Error, Result};
use crate::words::{is_balanced, longest_run, Balance, DigitWord};

/// Depth-bounded evidence about where β falls in the finite-type /
/// sofic / specified / synchronizing / residual hierarchy of its shift.
#[derive(Debug, Clone)]
pub struct ClassEvidence {
    pub depth: u64,
    pub verdict: ClassVerdict,
    pub witness: ClassWitness,
}

/// C1/C2 are exact detections (a finite or eventually periodic expansion
/// was exhibited); C3–C5 are statements consistent with everything seen up
/// to the scan depth, never absolute claims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassVerdict {
    C1Detected,
    C2Detected,
    C3Consistent { max_zero_run: u64 },
    C4Consistent { missing_factor: String },
    C5Consistent,
    Inconclusive,
}

impl fmt::Display for ClassVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassVerdict::C1Detected => write!(f, "C1_detected"),
            ClassVerdict::C2Detected => write!(f, "C2_detected"),
            ClassVerdict::C3Consistent { max_zero_run } => {
                write!(f, "C3_consistent(max_zero_run={max_zero_run})")
            }
            ClassVerdict::C4Consistent { missing_factor } => {
                write!(f, "C4_consistent(missing_factor={missing_factor})")
            }
            ClassVerdict::C5Consistent => write!(f, "C5_consistent"),
            ClassVerdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Supporting data for a verdict; fields are filled where they make sense.
#[derive(Debug, Clone, Default)]
pub struct ClassWitness {
    /// C1: number of digits before the expansion terminates.
    pub finite_length: Option<u64>,
    /// C2: steps before the orbit enters its cycle.
    pub preperiod: Option<u64>,
    /// C2: exact cycle length.
    pub period: Option<u64>,
    /// Longest run of 0s seen in the scanned prefix.
    pub max_zero_run: Option<u64>,
    /// An admissible word that does not occur in the scanned prefix.
    pub missing_factor: Option<String>,
    pub notes: String,
}

fn trimmed_len(word: &DigitWord) -> Result<Option<u64>> {
    match word.len() {
        None => Ok(None),
        Some(l) => {
            let digits = word.prefix(l)?;
            let m = digits.iter().rposition(|&d| d != 0).map_or(0, |p| p + 1);
            Ok(Some(m as u64))
        }
    }
}

/// Exact orbit search for quadratic (or rational) β: returns
/// Finite(steps), Cycle(preperiod, period), or None within the budget.
enum OrbitShape {
    Finite(u64),
    Cycle(u64, u64),
    Open,
}

fn exact_orbit_shape(x: &crate::numeric::QuadraticSurd, budget: u64) -> OrbitShape {
    let mut seen: BTreeMap<(BigRational, BigRational), u64> = BTreeMap::new();
    let mut cur = crate::numeric::QuadraticSurd::from_bigint(BigInt::from(1));
    for step in 0..budget {
        if cur.is_zero() {
            return OrbitShape::Finite(step);
        }
        if let Some(&first) = seen.get(&(cur.rational_part().clone(), cur.surd_part().clone())) {
            return OrbitShape::Cycle(first, step - first);
        }
        seen.insert((cur.rational_part().clone(), cur.surd_part().clone()), step);
        let y = x.mul(&cur);
        cur = y.sub_bigint(&y.floor());
    }
    OrbitShape::Open
}

/// All words of length `len` over {0,…,top} that the quasi-greedy bound
/// admits, in lexicographic order.
fn admissible_words(bound_prefix: &[u32], top: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    loop {
        if word_admissible(&cur, bound_prefix) {
            out.push(cur.clone());
        }
        // increment as a base-(top+1) counter
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < top {
                cur[i] += 1;
                for slot in &mut cur[i + 1..] {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// σ^k(w) ≤ bound for every k, compared only over w's remaining letters
/// (that is exactly the finite-word admissibility condition).
fn word_admissible(w: &[u32], bound_prefix: &[u32]) -> bool {
    'shift: for k in 0..w.len() {
        for (i, &c) in w[k..].iter().enumerate() {
            match c.cmp(&bound_prefix[i]) {
                std::cmp::Ordering::Less => continue 'shift,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    true
}

fn digits_to_string(digits: &[u32]) -> String {
    digits.iter().map(|d| char::from_digit(*d % 10, 10).unwrap()).collect()
}

/// Consistency scans on an infinite (or undetected) expansion prefix:
/// stabilized zero-run → C3, admissible-but-absent factor → C4, all
/// admissible factors present → C5.
fn scan_consistency(beta: &BetaNumber, word: &DigitWord, depth: u64) -> Result<ClassEvidence> {
    if depth < 32 {
        return Ok(ClassEvidence {
            depth,
            verdict: ClassVerdict::Inconclusive,
            witness: ClassWitness { notes: "depth too small for consistency scans".into(), ..Default::default() },
        });
    }
    let digits = word.prefix(depth)?;
    let full_run = longest_run(word, 0, depth)?;
    let half_run = longest_run(word, 0, depth / 2)?;

    // factor census for the missing-factor search
    let top = beta.alphabet_bound();
    let mut len_cap = 1usize;
    while (top as u64 + 1).pow(len_cap as u32 + 1) <= 4096 && (len_cap as u64) < depth / 4 && len_cap < 12 {
        len_cap += 1;
    }
    let bound = parry_bound(beta, depth)?;
    let bound_prefix = bound.prefix(len_cap as u64)?;
    let mut missing: Option<Vec<u32>> = None;
    let mut all_present_to_cap = true;
    'lengths: for len in 1..=len_cap {
        let mut present: std::collections::BTreeSet<&[u32]> = std::collections::BTreeSet::new();
        for window in digits.windows(len) {
            present.insert(window);
        }
        for cand in admissible_words(&bound_prefix[..len], top, len) {
            if !present.contains(cand.as_slice()) {
                missing = Some(cand);
                all_present_to_cap = false;
                break 'lengths;
            }
        }
    }

    let mut witness = ClassWitness {
        max_zero_run: Some(full_run),
        missing_factor: missing.as_deref().map(digits_to_string),
        ..Default::default()
    };
    let verdict = if full_run == half_run {
        witness.notes = format!("zero-run maximum {full_run} unchanged between depth {} and {depth}", depth / 2);
        ClassVerdict::C3Consistent { max_zero_run: full_run }
    } else if let Some(m) = missing {
        witness.notes = format!("admissible word of length {} absent from the first {depth} digits", m.len());
        ClassVerdict::C4Consistent { missing_factor: digits_to_string(&m) }
    } else if all_present_to_cap {
        witness.notes = format!("every admissible word of length ≤ {len_cap} occurs in the first {depth} digits");
        ClassVerdict::C5Consistent
    } else {
        ClassVerdict::Inconclusive
    };
    Ok(ClassEvidence { depth, verdict, witness })
}

/// Place β in the hierarchy on finitely checkable evidence. Finite and
/// eventually periodic expansions are detected exactly (integer and
/// quadratic β run in exact arithmetic); everything else is reported as
/// consistency at the given depth.
pub fn classify(beta: &BetaNumber, depth: u64) -> Result<ClassEvidence> {
    match beta.source() {
        BetaSource::Integer(_) => Ok(ClassEvidence {
            depth,
            verdict: ClassVerdict::C1Detected,
            witness: ClassWitness {
                finite_length: Some(1),
                notes: "integer base: the expansion of 1 is the single digit β".into(),
                ..Default::default()
            },
        }),
        BetaSource::Algebraic(x) => match exact_orbit_shape(x, depth.max(8)) {
            OrbitShape::Finite(steps) => Ok(ClassEvidence {
                depth,
                verdict: ClassVerdict::C1Detected,
                witness: ClassWitness {
                    finite_length: Some(steps),
                    notes: "orbit of 1 reached 0 in exact arithmetic".into(),
                    ..Default::default()
                },
            }),
            OrbitShape::Cycle(pre, per) => Ok(ClassEvidence {
                depth,
                verdict: ClassVerdict::C2Detected,
                witness: ClassWitness {
                    preperiod: Some(pre),
                    period: Some(per),
                    notes: "orbit of 1 entered an exact cycle".into(),
                    ..Default::default()
                },
            }),
            OrbitShape::Open => scan_consistency(beta, &beta.expansion_of_one(), depth),
        },
        BetaSource::SeriesRoot(w) => {
            if let Some(m) = trimmed_len(w)? {
                return Ok(ClassEvidence {
                    depth,
                    verdict: ClassVerdict::C1Detected,
                    witness: ClassWitness {
                        finite_length: Some(m),
                        notes: "the defining word is finite".into(),
                        ..Default::default()
                    },
                });
            }
            scan_consistency(beta, w, depth)
        }
    }
}

/// Evidence that d_β(1) is (or is not) a Sturmian word.
#[derive(Debug, Clone)]
pub struct SturmianEvidence {
    pub depth: u64,
    /// Distinct digits seen in the scanned prefix, ascending.
    pub letters: Vec<u32>,
    pub verdict: SturmianVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SturmianVerdict {
    /// Two letters {a, b} with b = ⌊β⌋, balanced, no period found.
    /// `maximal` additionally means a = ⌊β⌋ − 1, equivalently the orbit of
    /// 1 stays in [1 − 1/β, 1].
    Sturmian { maximal: bool },
    NotSturmian { reason: SturmianDefect },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SturmianDefect {
    IntegerBase,
    FiniteExpansion,
    LetterCount { distinct: usize },
    TopLetterNotFloor { top: u32 },
    PeriodDetected { period: u64 },
    Unbalanced { length: u64 },
}

impl fmt::Display for SturmianVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SturmianVerdict::Sturmian { maximal: true } => write!(f, "sturmian(maximal)"),
            SturmianVerdict::Sturmian { maximal: false } => write!(f, "sturmian(non-maximal)"),
            SturmianVerdict::NotSturmian { reason } => write!(f, "not_sturmian({reason:?})"),
        }
    }
}

/// Check d_β(1) to `depth`: exactly two letters with the larger equal to
/// ⌊β⌋, balanced, and no eventual period of length ≤ depth/3. All verdicts
/// are depth-bounded evidence; finite expansions are rejected exactly where
/// exact arithmetic is available.
pub fn is_sturmian_number(beta: &BetaNumber, depth: u64) -> Result<SturmianEvidence> {
    if depth < 9 {
        return Err(Error::InvalidInput("sturmian check needs depth ≥ 9".into()));
    }
    let done = |letters: Vec<u32>, verdict: SturmianVerdict| {
        Ok(SturmianEvidence { depth, letters, verdict })
    };
    match beta.source() {
        BetaSource::Integer(_) => {
            return done(vec![], SturmianVerdict::NotSturmian { reason: SturmianDefect::IntegerBase })
        }
        BetaSource::Algebraic(x) => {
            if let OrbitShape::Finite(_) = exact_orbit_shape(x, depth) {
                return done(
                    vec![],
                    SturmianVerdict::NotSturmian { reason: SturmianDefect::FiniteExpansion },
                );
            }
        }
        BetaSource::SeriesRoot(w) => {
            if trimmed_len(w)?.is_some() {
                return done(
                    vec![],
                    SturmianVerdict::NotSturmian { reason: SturmianDefect::FiniteExpansion },
                );
            }
        }
    }
    let word = beta.expansion_of_one();
    let digits = word.prefix(depth)?;
    let mut letters: Vec<u32> = digits.clone();
    letters.sort_unstable();
    letters.dedup();
    if letters.len() != 2 {
        let n = letters.len();
        return done(letters, SturmianVerdict::NotSturmian { reason: SturmianDefect::LetterCount { distinct: n } });
    }
    let (a, b) = (letters[0], letters[1]);
    if beta.floor().to_u32() != Some(b) {
        return done(letters, SturmianVerdict::NotSturmian { reason: SturmianDefect::TopLetterNotFloor { top: b } });
    }
    // eventual period: w(n) = w(n+p) everywhere past a small preperiod
    // allowance. The window must stay long: Sturmian words agree with their
    // shift by a convergent denominator on long stretches, so a short tail
    // scan would see spurious periods.
    for p in 1..=depth / 3 {
        let start = depth / 8;
        if (start..depth - p).all(|n| digits[n as usize] == digits[(n + p) as usize]) {
            return done(letters, SturmianVerdict::NotSturmian { reason: SturmianDefect::PeriodDetected { period: p } });
        }
    }
    // balance is defined over {0,1}: project a ↦ 0, b ↦ 1
    let proj = DigitWord::from_fn(vec![0, 1], None, {
        let word = word.clone();
        move |n| Ok(u32::from(word.digit(n)? == b))
    });
    if let Balance::Unbalanced { length, .. } = is_balanced(&proj, depth)? {
        return done(letters, SturmianVerdict::NotSturmian { reason: SturmianDefect::Unbalanced { length } });
    }
    // top letter already equals ⌊β⌋, so a = ⌊β⌋ − 1 reduces to a + 1 = b
    let maximal = a + 1 == b;
    done(letters, SturmianVerdict::Sturmian { maximal })
}

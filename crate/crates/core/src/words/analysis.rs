use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::word::DigitWord;
use crate::error::{Error, Result};

/// Verdict of the balance scan. `Balanced` is a statement about the
/// inspected window only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Balance {
    Balanced { window: u64 },
    Unbalanced { length: u64, witness: PalindromeWitness },
}

/// The defect certificate for an unbalanced word: a palindrome `inner` such
/// that 0·inner·0 and 1·inner·1 both occur, at the recorded positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PalindromeWitness {
    pub inner: Vec<u32>,
    pub zero_pos: u64,
    pub one_pos: u64,
}

fn effective_window(w: &DigitWord, window: u64) -> u64 {
    match w.len() {
        Some(l) => window.min(l),
        None => window,
    }
}

/// All distinct length-`n` factors occurring in the length-`window` prefix.
pub fn factor_set(w: &DigitWord, n: u64, window: u64) -> Result<BTreeSet<Vec<u32>>> {
    let wlen = effective_window(w, window);
    if n == 0 || n > wlen {
        return Err(Error::InvalidInput(format!("factor length {n} outside window {wlen}")));
    }
    let digits = w.prefix(wlen)?;
    let n = n as usize;
    let mut set = BTreeSet::new();
    for i in 0..=(digits.len() - n) {
        set.insert(digits[i..i + n].to_vec());
    }
    Ok(set)
}

pub fn complexity(w: &DigitWord, n: u64, window: u64) -> Result<u64> {
    Ok(factor_set(w, n, window)?.len() as u64)
}

/// Balance scan over every factor length inside the window.
///
/// Runs the height spread check per length (a word is balanced exactly when
/// equal-length factors have digit sums within 1 of each other) and, at the
/// first violating length, extracts the palindrome certificate: at minimal
/// violating length any extremal factor pair has the form 0w0 / 1w1 with a
/// shared palindromic interior, so the certificate search cannot miss.
pub fn is_balanced(w: &DigitWord, window: u64) -> Result<Balance> {
    let wlen = effective_window(w, window);
    let digits = w.prefix(wlen)?;
    if let Some(&d) = digits.iter().find(|&&d| d > 1) {
        return Err(Error::InvalidInput(format!("balance is defined for binary words, found digit {d}")));
    }
    let m = digits.len();
    let mut prefix_sum = vec![0i64; m + 1];
    for i in 0..m {
        prefix_sum[i + 1] = prefix_sum[i] + digits[i] as i64;
    }
    for n in 1..m {
        let mut min = i64::MAX;
        let mut max = i64::MIN;
        for i in 0..=(m - n) {
            let h = prefix_sum[i + n] - prefix_sum[i];
            if h < min {
                min = h;
            }
            if h > max {
                max = h;
            }
            if max - min >= 2 {
                return Ok(Balance::Unbalanced {
                    length: n as u64,
                    witness: extract_witness(&digits, n)?,
                });
            }
        }
    }
    Ok(Balance::Balanced { window: wlen })
}

fn extract_witness(digits: &[u32], n: usize) -> Result<PalindromeWitness> {
    debug_assert!(n >= 2, "length-1 binary factors cannot violate balance");
    let mut zero_framed: HashMap<&[u32], usize> = HashMap::new();
    for i in 0..=(digits.len() - n) {
        if digits[i] == 0 && digits[i + n - 1] == 0 {
            zero_framed.entry(&digits[i + 1..i + n - 1]).or_insert(i);
        }
    }
    for j in 0..=(digits.len() - n) {
        if digits[j] == 1 && digits[j + n - 1] == 1 {
            let inner = &digits[j + 1..j + n - 1];
            if let Some(&i) = zero_framed.get(inner) {
                if inner.iter().eq(inner.iter().rev()) {
                    return Ok(PalindromeWitness {
                        inner: inner.to_vec(),
                        zero_pos: i as u64,
                        one_pos: j as u64,
                    });
                }
            }
        }
    }
    Err(Error::IdentityViolated {
        gap: format!("imbalance at factor length {n} without a framed palindrome certificate"),
    })
}

/// Occurrence count of `pattern` starting in [0, window), divided by the
/// window length; occurrences must fit inside the window.
pub fn frequency(w: &DigitWord, pattern: &[u32], window: u64) -> Result<BigRational> {
    if pattern.is_empty() || window < pattern.len() as u64 {
        return Err(Error::InvalidInput("pattern must be nonempty and fit in the window".into()));
    }
    let wlen = effective_window(w, window);
    let digits = w.prefix(wlen)?;
    let k = pattern.len();
    let mut count = 0u64;
    if digits.len() >= k {
        for i in 0..=(digits.len() - k) {
            if digits[i..i + k] == *pattern {
                count += 1;
            }
        }
    }
    Ok(BigRational::new(BigInt::from(count), BigInt::from(wlen)))
}

/// Digit-sum density of the length-`n` prefix: height / n.
pub fn slope_of(w: &DigitWord, n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidInput("slope of an empty prefix".into()));
    }
    let n = effective_window(w, n);
    Ok(BigRational::new(BigInt::from(w.height(n)?), BigInt::from(n)))
}

/// Longest run of `digit` inside the prefix window.
pub fn longest_run(w: &DigitWord, digit: u32, window: u64) -> Result<u64> {
    let wlen = effective_window(w, window);
    let mut best = 0u64;
    let mut cur = 0u64;
    for i in 0..wlen {
        if w.digit(i)? == digit {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    Ok(best)
}

/// Smallest period p <= max_period with w[i] = w[i+p] for all i+p < depth;
/// a depth-bounded observation, not a proof of eventual periodicity.
pub fn detect_period(w: &DigitWord, depth: u64, max_period: u64) -> Result<Option<u64>> {
    let depth = effective_window(w, depth);
    let digits = w.prefix(depth)?;
    'outer: for p in 1..=max_period.min(depth.saturating_sub(1)) {
        for i in 0..(depth - p) as usize {
            if digits[i] != digits[i + p as usize] {
                continue 'outer;
            }
        }
        return Ok(Some(p));
    }
    Ok(None)
}

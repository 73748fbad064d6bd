use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

/// A right-infinite (or finite) word of small nonnegative digits, backed by
/// a memoizing generator.
///
/// Finite words read as zero beyond their length, matching the convention
/// that a terminating digit expansion continues with zeros; window-bounded
/// analyses clamp to the true length instead of consuming that padding.
#[derive(Clone)]
pub struct DigitWord {
    inner: Arc<Inner>,
}

struct Inner {
    gen: Box<dyn Fn(u64) -> Result<u32> + Send + Sync>,
    cache: Mutex<Vec<u32>>,
    len: Option<u64>,
    alphabet: Vec<u32>,
}

/// Depth-bounded lexicographic verdict: equality is only ever claimed for
/// the inspected prefix, never for the infinite objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexVerdict {
    Less,
    EqualToDepth,
    Greater,
}

impl DigitWord {
    /// Infinite or finite word from a digit generator. `alphabet` lists the
    /// digits the generator may emit, in increasing order.
    pub fn from_fn<F>(alphabet: Vec<u32>, len: Option<u64>, f: F) -> Self
    where
        F: Fn(u64) -> Result<u32> + Send + Sync + 'static,
    {
        debug_assert!(alphabet.windows(2).all(|w| w[0] < w[1]), "alphabet must be strictly increasing");
        DigitWord {
            inner: Arc::new(Inner { gen: Box::new(f), cache: Mutex::new(Vec::new()), len, alphabet }),
        }
    }

    pub fn from_digits(digits: Vec<u32>) -> Self {
        let mut alphabet: Vec<u32> = digits.clone();
        alphabet.sort_unstable();
        alphabet.dedup();
        if alphabet.is_empty() {
            alphabet.push(0);
        }
        let len = digits.len() as u64;
        DigitWord::from_fn(alphabet, Some(len), move |n| Ok(digits[n as usize]))
    }

    /// Parse a compact digit string like "0100101" (digits 0-9 only).
    pub fn parse(s: &str) -> Result<Self> {
        let mut digits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c.to_digit(10) {
                Some(d) => digits.push(d),
                None => return Err(Error::InvalidInput(format!("non-digit {c:?} in word {s:?}"))),
            }
        }
        Ok(DigitWord::from_digits(digits))
    }

    pub fn len(&self) -> Option<u64> {
        self.inner.len
    }

    pub fn is_finite(&self) -> bool {
        self.inner.len.is_some()
    }

    pub fn alphabet(&self) -> &[u32] {
        &self.inner.alphabet
    }

    pub fn digit(&self, n: u64) -> Result<u32> {
        if let Some(l) = self.inner.len {
            if n >= l {
                return Ok(0);
            }
        }
        let mut cache = self.inner.cache.lock().unwrap();
        while (cache.len() as u64) <= n {
            let i = cache.len() as u64;
            let d = (self.inner.gen)(i)?;
            if !self.inner.alphabet.contains(&d) {
                return Err(Error::InvalidInput(format!(
                    "generator emitted digit {d} outside alphabet {:?} at index {i}",
                    self.inner.alphabet
                )));
            }
            cache.push(d);
        }
        Ok(cache[n as usize])
    }

    /// First `n` digits; clamped to the true length for finite words.
    pub fn prefix(&self, n: u64) -> Result<Vec<u32>> {
        let n = match self.inner.len {
            Some(l) => n.min(l),
            None => n,
        };
        let mut out = Vec::with_capacity(n as usize);
        for i in 0..n {
            out.push(self.digit(i)?);
        }
        Ok(out)
    }

    /// Compact rendering when every digit is a single character, otherwise
    /// comma-separated.
    pub fn prefix_string(&self, n: u64) -> Result<String> {
        let digits = self.prefix(n)?;
        if self.inner.alphabet.iter().all(|&d| d <= 9) {
            Ok(digits.iter().map(|&d| char::from(b'0' + d as u8)).collect())
        } else {
            Ok(digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
        }
    }

    /// Digit sum of the first `n` letters; for binary words, the number of
    /// ones.
    pub fn height(&self, n: u64) -> Result<u64> {
        let mut h = 0u64;
        for i in 0..n.min(self.inner.len.unwrap_or(n)) {
            h += self.digit(i)? as u64;
        }
        Ok(h)
    }

    /// Drop the first `k` letters.
    pub fn shift(&self, k: u64) -> DigitWord {
        let src = self.clone();
        DigitWord::from_fn(
            self.inner.alphabet.clone(),
            self.inner.len.map(|l| l.saturating_sub(k)),
            move |n| src.digit(n + k),
        )
    }

    /// Letter exchange 0 <-> 1 on a binary word.
    pub fn exchange(&self) -> DigitWord {
        let src = self.clone();
        DigitWord::from_fn(vec![0, 1], self.inner.len, move |n| match src.digit(n)? {
            0 => Ok(1),
            1 => Ok(0),
            d => Err(Error::InvalidInput(format!("letter exchange needs a binary word, found digit {d}"))),
        })
    }

    /// Morphism 0 -> a, 1 -> b applied letterwise to a binary word.
    pub fn rename(&self, a: u32, b: u32) -> Result<DigitWord> {
        if a >= b {
            return Err(Error::InvalidInput(format!("rename needs a < b, got ({a}, {b})")));
        }
        let src = self.clone();
        Ok(DigitWord::from_fn(vec![a, b], self.inner.len, move |n| match src.digit(n)? {
            0 => Ok(a),
            1 => Ok(b),
            d => Err(Error::InvalidInput(format!("rename needs a binary word, found digit {d}"))),
        }))
    }

    /// Index of the first position where the words differ, scanning at most
    /// `depth` letters (finite words read as zero past their end).
    pub fn first_difference(&self, other: &DigitWord, depth: u64) -> Result<Option<u64>> {
        for n in 0..depth {
            if self.digit(n)? != other.digit(n)? {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    pub fn lex_compare(&self, other: &DigitWord, depth: u64) -> Result<LexVerdict> {
        match self.first_difference(other, depth)? {
            None => Ok(LexVerdict::EqualToDepth),
            Some(n) => {
                if self.digit(n)? < other.digit(n)? {
                    Ok(LexVerdict::Less)
                } else {
                    Ok(LexVerdict::Greater)
                }
            }
        }
    }

    pub fn eq_prefix(&self, other: &DigitWord, depth: u64) -> Result<bool> {
        Ok(self.first_difference(other, depth)?.is_none())
    }
}

impl fmt::Debug for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = self.prefix_string(24).unwrap_or_else(|_| "<error>".into());
        match self.inner.len {
            Some(l) => write!(f, "DigitWord[len {l}: {shown}]"),
            None => write!(f, "DigitWord[{shown}...]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_words_zero_extend_but_clamp_prefixes() {
        let w = DigitWord::parse("0110").unwrap();
        assert_eq!(w.len(), Some(4));
        assert_eq!(w.digit(2).unwrap(), 1);
        assert_eq!(w.digit(100).unwrap(), 0);
        assert_eq!(w.prefix_string(10).unwrap(), "0110");
        assert_eq!(w.height(4).unwrap(), 2);
        assert_eq!(w.height(100).unwrap(), 2);
    }

    #[test]
    fn shifts_compose_and_report_shortened_length() {
        let w = DigitWord::parse("0123456").unwrap();
        let s = w.shift(2).shift(3);
        assert_eq!(s.len(), Some(2));
        assert_eq!(s.digit(0).unwrap(), 5);
        assert_eq!(s.digit(1).unwrap(), 6);
        assert_eq!(s.digit(2).unwrap(), 0);
    }

    #[test]
    fn exchange_is_an_involution_and_complements_height() {
        let w = DigitWord::parse("0110100110").unwrap();
        let e = w.exchange();
        assert_eq!(e.prefix_string(10).unwrap(), "1001011001");
        assert!(w.eq_prefix(&e.exchange(), 10).unwrap());
        assert_eq!(w.height(10).unwrap() + e.height(10).unwrap(), 10);
    }

    #[test]
    fn rename_maps_letters_and_validates() {
        let w = DigitWord::parse("0101").unwrap();
        let r = w.rename(1, 3).unwrap();
        assert_eq!(r.prefix_string(4).unwrap(), "1313");
        assert_eq!(r.alphabet(), &[1, 3]);
        assert!(w.rename(3, 1).is_err());
        let ternary = DigitWord::parse("012").unwrap();
        assert!(ternary.rename(0, 1).unwrap().digit(2).is_err());
    }

    #[test]
    fn lex_verdicts_are_depth_bounded() {
        let x = DigitWord::parse("010010").unwrap();
        let y = DigitWord::parse("010100").unwrap();
        assert_eq!(x.lex_compare(&y, 100).unwrap(), LexVerdict::Less);
        assert_eq!(y.lex_compare(&x, 100).unwrap(), LexVerdict::Greater);
        assert_eq!(x.lex_compare(&x, 100).unwrap(), LexVerdict::EqualToDepth);
        assert_eq!(x.lex_compare(&y, 3).unwrap(), LexVerdict::EqualToDepth);
        assert_eq!(x.first_difference(&y, 100).unwrap(), Some(3));
        // Zero extension: "01" reads below "0100..." only through padding.
        let short = DigitWord::parse("01").unwrap();
        let long = DigitWord::parse("0101").unwrap();
        assert_eq!(short.lex_compare(&long, 10).unwrap(), LexVerdict::Less);
    }

    #[test]
    fn generators_memoize_and_enforce_the_alphabet() {
        use std::sync::atomic::{AtomicU64, Ordering};
        let calls = Arc::new(AtomicU64::new(0));
        let c = calls.clone();
        let w = DigitWord::from_fn(vec![0, 1], None, move |n| {
            c.fetch_add(1, Ordering::Relaxed);
            Ok((n % 2) as u32)
        });
        assert_eq!(w.digit(9).unwrap(), 1);
        assert_eq!(w.digit(4).unwrap(), 0);
        assert_eq!(w.prefix(10).unwrap().len(), 10);
        assert_eq!(calls.load(Ordering::Relaxed), 10, "each index generated exactly once");
        let bad = DigitWord::from_fn(vec![0, 1], None, |_| Ok(7));
        assert!(bad.digit(0).is_err());
    }
}

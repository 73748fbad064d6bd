use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{BetaNumber, BetaSource, Precision};
use crate::error::{Error, Result, ShiftDefect};
use crate::numeric::{Dyadic, QuadraticSurd, RealBall};
use crate::words::DigitWord;

/// Depth-bounded verdict of the strict-shift test σ^n(s) < s for n ≥ 1,
/// which characterizes the words that arise as digit expansions of 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionVerdict {
    Holds { depth: u64 },
    RejectedAt { shift: u64, defect: ShiftDefect },
}

/// Depth-bounded admissibility verdict: σ^n(s) never exceeds the comparison
/// word for 0 ≤ n ≤ depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    Admissible { depth: u64 },
    RejectedAt { shift: u64, position: u64 },
}

/// One step of x ↦ βx mod 1 in ball arithmetic; the digit is the certified
/// integer part of βx.
pub fn t_beta_step(beta: &BetaNumber, x: &RealBall, bits: u64) -> Result<(BigInt, RealBall)> {
    let b = beta.enclosure(bits)?;
    let y = b.mul(x, bits);
    let d = y.floor_certified().ok_or(Error::PrecisionExhausted {
        context: "βx straddles a digit boundary",
        bits: bits as u32,
    })?;
    let next = y.add_dyadic(&Dyadic::from_bigint(&-&d), bits);
    Ok((d, next))
}

/// First n digits of the greedy β-expansion of x, where `x_at` produces a
/// certified enclosure of x at any requested working precision.
///
/// Working precision starts high enough that the forward error β^k·2^-bits
/// stays below the digit-resolution margin, then climbs the ladder on any
/// unresolved digit. Operands are trimmed to the precision the remaining
/// steps still need, so late iterations run at shrinking cost.
pub fn d_beta(
    beta: &BetaNumber,
    x_at: &dyn Fn(u64) -> Result<RealBall>,
    n: u64,
    prec: &Precision,
) -> Result<DigitWord> {
    if n == 0 {
        return Ok(DigitWord::from_digits(Vec::new()));
    }
    let lg = beta.log2_hint();
    let needed = (n as f64 * lg).ceil() as u64 + 96;
    let mut bits = prec.start_bits.max(needed).min(prec.ceiling_bits);
    loop {
        match d_beta_attempt(beta, x_at, n, bits, lg) {
            Err(Error::PrecisionExhausted { context, .. }) if bits < prec.ceiling_bits => {
                bits = (bits * 2).min(prec.ceiling_bits);
                let _ = context;
            }
            other => return other,
        }
    }
}

fn d_beta_attempt(
    beta: &BetaNumber,
    x_at: &dyn Fn(u64) -> Result<RealBall>,
    n: u64,
    bits: u64,
    lg: f64,
) -> Result<DigitWord> {
    let bound = BigInt::from(beta.alphabet_bound());
    let full = beta.enclosure(bits)?;
    let mut x = x_at(bits)?;
    let mut bt = full.clone();
    let mut bt_bits = bits;
    let mut digits = Vec::with_capacity(n as usize);
    for k in 0..n {
        // Two schedules, take the larger: what the remaining digits need, and
        // what is left of the total budget after k multiplications by β.  The
        // first attempt makes them equal; retries raise the second so a digit
        // boundary deeper than the remaining window still resolves.
        let spend = (bits as f64 - k as f64 * lg).floor() as u64;
        let w = (((n - k) as f64 * lg).ceil() as u64 + 96).max(spend).min(bits);
        if bt_bits > w + 128 {
            bt = full.rounded(w + 64);
            bt_bits = w + 64;
        }
        let y = bt.mul(&x, w);
        let d = y.floor_certified().ok_or(Error::PrecisionExhausted {
            context: "βx straddles a digit boundary",
            bits: bits as u32,
        })?;
        if d.is_negative() || d > bound {
            return Err(Error::PrecisionExhausted {
                context: "greedy digit outside 0..=⌊β⌋",
                bits: bits as u32,
            });
        }
        digits.push(d.to_u32().unwrap());
        x = y.add_dyadic(&Dyadic::from_bigint(&-&d), w);
    }
    Ok(DigitWord::from_digits(digits))
}

/// Greedy expansion of a rational point, using exact field arithmetic when β
/// itself is exact and the certified ladder otherwise.
pub fn d_beta_rational(
    beta: &BetaNumber,
    x: &BigRational,
    n: u64,
    prec: &Precision,
) -> Result<DigitWord> {
    if x.is_negative() || x > &BigRational::from_integer(BigInt::from(1)) {
        return Err(Error::InvalidInput(format!("expansion point {x} outside [0,1]")));
    }
    match beta.source() {
        BetaSource::Integer(b) => {
            let mut cur = x.clone();
            let mut digits = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let y = &cur * BigRational::from_integer(b.clone());
                let d = y.floor().to_integer();
                digits.push(d.to_u32().expect("digit range"));
                cur = y - BigRational::from_integer(d);
            }
            Ok(DigitWord::from_digits(digits))
        }
        BetaSource::Algebraic(b) => {
            let mut cur = QuadraticSurd::from_rational(x.clone());
            let mut digits = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let y = b.mul(&cur);
                let d = y.floor();
                digits.push(d.to_u32().expect("digit range"));
                cur = y.sub_bigint(&d);
            }
            Ok(DigitWord::from_digits(digits))
        }
        BetaSource::SeriesRoot(_) => {
            let (num, den) = (x.numer().clone(), x.denom().clone());
            d_beta(beta, &move |bits| Ok(RealBall::from_ratio(&num, &den, bits)), n, prec)
        }
    }
}

/// Checks σ^n(s) < s strictly for 1 ≤ n ≤ depth. Words passing this test are
/// exactly the expansions of 1, each for a unique β.
pub fn is_expansion_of_one(s: &DigitWord, depth: u64) -> Result<ExpansionVerdict> {
    let base = depth.saturating_mul(2).saturating_add(64);
    // A shifted copy can agree far past the base horizon when the slope's
    // continued fraction has a large partial quotient; widen per shift before
    // declaring the comparison stuck.
    let cap = base.saturating_mul(64).max(8192);
    for k in 1..=depth {
        let shifted = s.shift(k);
        let mut horizon = base;
        let at = loop {
            match shifted.first_difference(s, horizon)? {
                Some(at) => break at,
                None if horizon < cap => horizon = horizon.saturating_mul(8).min(cap),
                None => {
                    return Ok(ExpansionVerdict::RejectedAt {
                        shift: k,
                        defect: ShiftDefect::EqualToHorizon { horizon },
                    })
                }
            }
        };
        if shifted.digit(at)? > s.digit(at)? {
            return Ok(ExpansionVerdict::RejectedAt {
                shift: k,
                defect: ShiftDefect::Greater { at },
            });
        }
    }
    Ok(ExpansionVerdict::Holds { depth })
}

/// Periodization d₁…d_{m-1}(d_m - 1) repeated, the comparison word used for
/// admissibility when the expansion of 1 is finite.
pub fn quasi_greedy(d: &DigitWord) -> Result<DigitWord> {
    let m = d
        .len()
        .ok_or_else(|| Error::InvalidInput("periodization needs a finite word".into()))?;
    let mut period = d.prefix(m)?;
    while period.last() == Some(&0) {
        period.pop();
    }
    let last = period
        .last_mut()
        .ok_or_else(|| Error::InvalidInput("cannot periodize the zero word".into()))?;
    *last -= 1;
    if period.iter().all(|&x| x == 0) {
        return Err(Error::InvalidInput("periodization of \"1\" degenerates to zeros".into()));
    }
    let alphabet: Vec<u32> = (0..=*period.iter().max().unwrap()).collect();
    let p = period;
    let m = p.len() as u64;
    Ok(DigitWord::from_fn(alphabet, None, move |n| Ok(p[(n % m) as usize])))
}

/// The comparison word for admissibility: the expansion of 1 itself when it
/// is (as far as can be seen) infinite, its quasi-greedy periodization when
/// it is finite. For quadratic β finiteness is decided exactly by running
/// the orbit until it dies or `depth` passes.
pub fn parry_bound(beta: &BetaNumber, depth: u64) -> Result<DigitWord> {
    let w = beta.expansion_of_one();
    match beta.source() {
        BetaSource::Integer(_) => quasi_greedy(&w),
        BetaSource::SeriesRoot(_) => {
            if w.is_finite() {
                quasi_greedy(&w)
            } else {
                Ok(w)
            }
        }
        BetaSource::Algebraic(b) => {
            let mut cur = QuadraticSurd::from_bigint(BigInt::from(1));
            let mut steps = 0u64;
            while steps < depth {
                let y = b.mul(&cur);
                let d = y.floor();
                cur = y.sub_bigint(&d);
                steps += 1;
                if cur.is_zero() {
                    return quasi_greedy(&DigitWord::from_digits(w.prefix(steps)?));
                }
            }
            Ok(w)
        }
    }
}

/// Depth-bounded Parry test: s belongs to the β-shift iff every shift stays
/// lexicographically at or below the comparison word.
pub fn is_admissible(s: &DigitWord, beta: &BetaNumber, depth: u64) -> Result<Admissibility> {
    let bound = parry_bound(beta, depth)?;
    let horizon = depth.saturating_add(64);
    for k in 0..=depth {
        let shifted = s.shift(k);
        if let Some(at) = shifted.first_difference(&bound, horizon)? {
            if shifted.digit(at)? > bound.digit(at)? {
                return Ok(Admissibility::RejectedAt { shift: k, position: at });
            }
        }
        if let Some(l) = s.len() {
            if k >= l {
                break; // remaining shifts are the zero word
            }
        }
    }
    Ok(Admissibility::Admissible { depth })
}

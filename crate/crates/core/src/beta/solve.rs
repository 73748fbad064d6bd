use std::cmp::Ordering;

use num_bigint::BigInt;

use super::expansion::{is_expansion_of_one, ExpansionVerdict};
use super::BetaNumber;
use crate::error::{Error, Result, ShiftDefect};
use crate::numeric::{Dyadic, Intercept, QuadraticSurd, RealBall, Slope};
use crate::words::mechanical::upper_mechanical;
use crate::words::DigitWord;

/// Hard cap on series truncation; evaluations needing more terms fail
/// loudly instead of spinning.
pub const TRUNCATION_CAP: u64 = 1_000_000;

/// Σ_{k<digits.len()} digits[k]·y^{k+1}, plus an upper interval for the
/// dropped tail when `tail_digit_bound > 0` (digits beyond the slice are
/// then assumed ≤ that bound).
///
/// Horner from the back. A level-k error is still multiplied by y^k on its
/// way to the result, so high-index levels run at reduced precision; the
/// trim thresholds only steer cost, every rounding lands in the radius.
fn series_sum(
    digits: &[u32],
    y: &RealBall,
    bits: u64,
    lg_inv: f64,
    tail_digit_bound: u32,
) -> Result<RealBall> {
    let mut acc = RealBall::zero();
    let mut yt = y.clone();
    let mut yt_bits = 0u64;
    for (k, &d) in digits.iter().enumerate().rev() {
        let w = (bits + 32).saturating_sub((k as f64 * lg_inv) as u64).max(32);
        // w grows as the loop walks toward index 0: refresh y when the
        // working precision outruns the current rounding
        if yt_bits < w + 64 {
            yt = y.rounded(w + 96);
            yt_bits = w + 96;
        }
        if d != 0 {
            acc = acc.add_dyadic(&Dyadic::from_i64(d as i64), w);
        }
        acc = acc.mul(&yt, w);
    }
    if tail_digit_bound > 0 {
        let y_hi = RealBall::exact(y.upper_bound());
        if y_hi.upper_bound().cmp_value(&Dyadic::one()) != Ordering::Less {
            return Err(Error::PrecisionExhausted {
                context: "series tail with |1/x| not separated from 1",
                bits: bits as u32,
            });
        }
        let n = digits.len() as u64;
        let t = y_hi
            .pow(n + 1, 96)
            .mul_bigint(&BigInt::from(tail_digit_bound), 96)
            .div(&RealBall::one().sub(&y_hi, 96), 96)?;
        acc = acc.add(&RealBall::from_endpoints(&Dyadic::zero(), &t.upper_bound()), bits);
    }
    Ok(acc)
}

/// Σ_{k<digits.len()} (k+1)·digits[k]·y^{k+2} with tail interval
/// ≤ bound·(n+2)·y_hi^{n+2}/(1-y_hi)².
fn deriv_sum(
    digits: &[u32],
    y: &RealBall,
    bits: u64,
    lg_inv: f64,
    tail_digit_bound: u32,
) -> Result<RealBall> {
    let mut acc = RealBall::zero();
    let mut yt = y.clone();
    let mut yt_bits = 0u64;
    for (k, &d) in digits.iter().enumerate().rev() {
        let w = (bits + 32).saturating_sub((k as f64 * lg_inv) as u64).max(32);
        if yt_bits < w + 64 {
            yt = y.rounded(w + 96);
            yt_bits = w + 96;
        }
        if d != 0 {
            acc = acc.add_dyadic(&Dyadic::from_bigint(&(BigInt::from(d) * (k as u64 + 1))), w);
        }
        acc = acc.mul(&yt, w);
    }
    acc = acc.mul(y, bits);
    if tail_digit_bound > 0 {
        let y_hi = RealBall::exact(y.upper_bound());
        if y_hi.upper_bound().cmp_value(&Dyadic::one()) != Ordering::Less {
            return Err(Error::PrecisionExhausted {
                context: "series tail with |1/x| not separated from 1",
                bits: bits as u32,
            });
        }
        let n = digits.len() as u64;
        let one_minus = RealBall::one().sub(&y_hi, 96);
        let t = y_hi
            .pow(n + 2, 96)
            .mul_bigint(&(BigInt::from(tail_digit_bound) * BigInt::from(n + 2)), 96)
            .div(&one_minus.mul(&one_minus, 96), 96)?;
        acc = acc.add(&RealBall::from_endpoints(&Dyadic::zero(), &t.upper_bound()), bits);
    }
    Ok(acc)
}

/// d = s²·core with core squarefree (trial division; the digits feeding
/// this are small). Gives up past 2^20 and returns the residue as-is.
fn squarefree_split(d: u64) -> (u64, u64) {
    let mut core = d;
    let mut s = 1u64;
    let mut p = 2u64;
    while p * p <= core && p < (1 << 20) {
        while core % (p * p) == 0 {
            core /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, core)
}

fn fetch(w: &DigitWord, terms: u64) -> Result<(Vec<u32>, u32)> {
    match w.len() {
        Some(l) if l <= terms => Ok((w.prefix(l)?, 0)),
        _ => Ok((w.prefix(terms)?, w.digit(0)?)),
    }
}

fn truncation_for(bits: u64, lg_lo: f64) -> Result<u64> {
    let terms = (((bits + 48) as f64) / lg_lo).ceil() as u64;
    if terms > TRUNCATION_CAP {
        return Err(Error::PrecisionExhausted { context: "series truncation ceiling", bits: bits as u32 });
    }
    Ok(terms.max(4))
}

/// Certified G(x) = Σ w(k)·x^{-(k+1)} - 1 over a ball x with lower bound > 1.
fn g_value(w: &DigitWord, x: &RealBall, bits: u64) -> Result<RealBall> {
    let lo = x.lower_bound();
    if lo.cmp_value(&Dyadic::one()) != Ordering::Greater {
        return Err(Error::PrecisionExhausted {
            context: "series evaluation at a point not separated from 1",
            bits: bits as u32,
        });
    }
    let lg_lo = lo.to_f64_lossy().log2().max(1e-3);
    let terms = truncation_for(bits, lg_lo)?;
    let (digits, tail) = fetch(w, terms)?;
    let y = x.recip(bits + 16)?;
    let s = series_sum(&digits, &y, bits, lg_lo, tail)?;
    Ok(s.add_dyadic(&Dyadic::from_i64(-1), bits))
}

/// Certified G'(x) = -Σ (k+1)·w(k)·x^{-(k+2)} over a ball.
fn g_deriv(w: &DigitWord, x: &RealBall, bits: u64) -> Result<RealBall> {
    let lo = x.lower_bound();
    if lo.cmp_value(&Dyadic::one()) != Ordering::Greater {
        return Err(Error::PrecisionExhausted {
            context: "series evaluation at a point not separated from 1",
            bits: bits as u32,
        });
    }
    let lg_lo = lo.to_f64_lossy().log2().max(1e-3);
    let terms = truncation_for(bits, lg_lo)?;
    let (digits, tail) = fetch(w, terms)?;
    let y = x.recip(bits + 16)?;
    Ok(deriv_sum(&digits, &y, bits, lg_lo, tail)?.neg())
}

fn g_sign_at(w: &DigitWord, point: &Dyadic) -> Result<Ordering> {
    let mut bits = 96u64;
    loop {
        let g = g_value(w, &RealBall::exact(point.clone()), bits)?;
        match g.sign_certain() {
            Some(Ordering::Equal) | None => {
                bits *= 2;
                if bits > (1 << 22) {
                    return Err(Error::PrecisionExhausted {
                        context: "sign of the expansion series",
                        bits: bits as u32,
                    });
                }
            }
            Some(s) => return Ok(s),
        }
    }
}

/// Bracket the unique root of G in (b, b+1). G(b) > 0 is known a priori
/// (the first term alone is b/x at x = b), G(b+1) < 0 because digits are
/// capped by b, so only midpoints are ever evaluated.
fn isolate(w: &DigitWord, b: u32) -> Result<(Dyadic, Dyadic)> {
    let mut lo = Dyadic::from_i64(b as i64);
    let mut hi = Dyadic::from_i64(b as i64 + 1);
    for _ in 0..13 {
        let mid = lo.add(&hi).shl(-1);
        match g_sign_at(w, &mid)? {
            Ordering::Greater => lo = mid,
            Ordering::Less => hi = mid,
            Ordering::Equal => unreachable!("series sign is never certified zero"),
        }
    }
    Ok((lo, hi))
}

/// Shrink a certified root enclosure to radius ≤ 2^-bits by interval
/// Newton: x* = m - G(m)/G'(ξ) for some ξ in the bracket, so intersecting
/// m - G(m)/G'(X) with X can never lose the root.
pub(crate) fn refine_enclosure(w: &DigitWord, cur: &RealBall, bits: u64) -> Result<RealBall> {
    let mut cur = cur.clone();
    let mut extra: u64 = 0;
    for _ in 0..300 {
        let have = match cur.rad_log2() {
            None => return Ok(cur),
            Some(r) => -r,
        };
        if have >= bits as i64 {
            return Ok(cur);
        }
        let level = ((2 * have.max(40)) as u64 + extra).min(bits + 16).max(96);
        let m = cur.mid().clone();
        let gm = g_value(w, &RealBall::exact(m.clone()), level)?;
        let dx = g_deriv(w, &cur, level / 4 + 64)?;
        if dx.sign_certain() != Some(Ordering::Less) {
            return Err(Error::PrecisionExhausted {
                context: "series derivative sign over the bracket",
                bits: level as u32,
            });
        }
        let step = gm.div(&dx, level)?;
        let newton = RealBall::exact(m).sub(&step, level);
        let next = newton.intersect(&cur).ok_or(Error::IdentityViolated {
            gap: "Newton step disjoint from the root bracket".into(),
        })?;
        let next_have = next.rad_log2().map(|r| -r).unwrap_or(i64::MAX);
        if next_have < have + 4 {
            extra += 64; // stalled: widen the working precision
        }
        cur = next;
    }
    Err(Error::PrecisionExhausted { context: "root refinement iteration budget", bits: bits as u32 })
}

/// Certify that the candidate word really is the expansion of 1 for the
/// solved root: every tail value T^k(1) = Σ_j w(k+j)·β^{-(j+1)} must lie in
/// [0,1), and the full series must return to 1. One backward sweep computes
/// all tails with contracting error.
fn verify_tails(beta: &BetaNumber, depth: u64) -> Result<()> {
    if depth == 0 {
        return Ok(());
    }
    let w = beta.expansion_of_one();
    let lg_lo = beta.log2_lower_hint();
    // Slopes with slow continued fractions have tails within β^-hundreds of
    // 1, so an unresolved comparison climbs a margin ladder before giving up.
    let mut margin = 110.0f64;
    loop {
        let pad = ((margin / lg_lo).ceil() as u64).min(200_000) + 8;
        let total = depth + pad;
        let bits = (total as f64 * beta.log2_hint()).ceil() as u64 + 128;
        match verify_tails_at(beta, &w, depth, total, bits) {
            Err(Error::PrecisionExhausted { .. }) if margin < 2000.0 => margin *= 4.0,
            other => return other,
        }
    }
}

fn verify_tails_at(
    beta: &BetaNumber,
    w: &DigitWord,
    depth: u64,
    total: u64,
    bits: u64,
) -> Result<()> {
    let inv = beta.enclosure(bits)?.recip(bits)?;
    let head = w.prefix(total)?; // clamped for finite words: digits past the end are 0
    let one = RealBall::one();
    let mut t = RealBall::from_endpoints(&Dyadic::zero(), &Dyadic::one());
    for k in (0..total as usize).rev() {
        let d = head.get(k).copied().unwrap_or(0);
        if d != 0 {
            t = t.add_dyadic(&Dyadic::from_i64(d as i64), bits);
        }
        t = t.mul(&inv, bits);
        if k >= 1 && (k as u64) <= depth {
            match t.cmp_certain(&one) {
                Some(Ordering::Less) => {}
                Some(_) => {
                    return Err(Error::NotExpansionOfOne {
                        shift: k as u64,
                        reason: ShiftDefect::Greater { at: 0 },
                    })
                }
                None => {
                    return Err(Error::PrecisionExhausted {
                        context: "expansion tail verification",
                        bits: bits as u32,
                    })
                }
            }
        }
    }
    if !t.sub(&one, bits).contains_zero() {
        return Err(Error::IdentityViolated {
            gap: format!("re-summed expansion misses 1 by about {:e}", t.sub(&one, bits).to_f64_lossy()),
        });
    }
    Ok(())
}

/// The unique β > 1 whose expansion of 1 is `s`, certified to radius
/// 2^-bits. The strict-shift precondition is checked to `verify_depth`, and
/// for infinite words the root is re-verified against the digits by the
/// backward tail sweep to the same depth.
pub fn solve_beta(s: &DigitWord, bits: u64, verify_depth: u64) -> Result<BetaNumber> {
    let b = s.digit(0)?;
    if b == 0 {
        return Err(Error::InvalidInput("an expansion of 1 must open with ⌊β⌋ ≥ 1".into()));
    }
    match is_expansion_of_one(s, verify_depth)? {
        ExpansionVerdict::Holds { .. } => {}
        ExpansionVerdict::RejectedAt { shift, defect } => {
            return Err(Error::NotExpansionOfOne { shift, reason: defect })
        }
    }
    if let Some(l) = s.len() {
        let mut digs = s.prefix(l)?;
        while digs.last() == Some(&0) {
            digs.pop();
        }
        match digs[..] {
            [1] => {
                return Err(Error::InvalidInput("the word \"1\" names β = 1, which is excluded".into()))
            }
            [d] => return BetaNumber::integer(d as i64),
            [d1, d2] => {
                // 1 = d₁/x + d₂/x² has the positive root (d₁ + √(d₁²+4d₂))/2;
                // pull square factors out of the radicand so fields compare
                let dd = (d1 as u128) * (d1 as u128) + 4 * (d2 as u128);
                let dd = u64::try_from(dd)
                    .map_err(|_| Error::Unsupported("quadratic fast path digit size"))?;
                let (s, core) = squarefree_split(dd);
                let surd = QuadraticSurd::new(d1 as i64, s as i64, core, 2)?;
                let beta = BetaNumber::surd(surd)?;
                debug_assert_eq!(beta.floor(), &BigInt::from(d1));
                return Ok(beta);
            }
            _ => {}
        }
    }
    let (lo, hi) = isolate(s, b)?;
    let ball = refine_enclosure(s, &RealBall::from_endpoints(&lo, &hi), bits)?;
    let beta = BetaNumber::from_series_root(s.clone(), BigInt::from(b), ball);
    verify_tails(&beta, verify_depth)?;
    Ok(beta)
}

/// β whose expansion of 1 is the upper mechanical word of slope α renamed
/// onto the letters {a, b}; its integer part must come out as b.
pub fn sturmian_beta(alpha: &Slope, a: u32, b: u32, bits: u64, verify_depth: u64) -> Result<BetaNumber> {
    if a >= b {
        return Err(Error::InvalidInput(format!("digits must satisfy a < b, got ({a}, {b})")));
    }
    let word = upper_mechanical(alpha, &Intercept::zero()).rename(a, b)?;
    let beta = solve_beta(&word, bits, verify_depth)?;
    if beta.floor() != &BigInt::from(b) {
        return Err(Error::FloorMismatch { expected: BigInt::from(b), got: beta.floor().clone() });
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::expansion::{d_beta, d_beta_rational};
    use crate::beta::Precision;
    use num_rational::BigRational;
    use num_traits::One;

    fn golden_slope() -> Slope {
        Slope::parse("surd:(3-1*sqrt(5))/2").unwrap()
    }

    #[test]
    fn short_finite_words_solve_exactly() {
        let two = solve_beta(&DigitWord::from_digits(vec![2]), 128, 16).unwrap();
        assert!(two.is_integer());
        assert!(two.enclosure(256).unwrap().is_exact());

        let tau = solve_beta(&DigitWord::from_digits(vec![1, 1]), 128, 16).unwrap();
        let oracle = QuadraticSurd::new(1, 1, 5, 2).unwrap(); // (1+sqrt 5)/2 from x² = x+1
        match tau.source() {
            super::super::BetaSource::Algebraic(x) => {
                assert_eq!(x.cmp_same_field(&oracle), Ordering::Equal)
            }
            _ => panic!("expected an exact quadratic"),
        }

        let silver = solve_beta(&DigitWord::from_digits(vec![2, 1]), 128, 16).unwrap();
        let oracle = QuadraticSurd::new(1, 1, 2, 1).unwrap(); // 1 + sqrt 2 from x² = 2x+1
        match silver.source() {
            super::super::BetaSource::Algebraic(x) => {
                assert_eq!(x.cmp_same_field(&oracle), Ordering::Equal)
            }
            _ => panic!("expected an exact quadratic"),
        }
    }

    #[test]
    fn cubic_root_is_bracketed_by_exact_rational_signs() {
        // 1 = 1/x + 1/x² + 1/x³: the root near 1.839 is checked against
        // exact sign evaluations of the cubic at rational endpoints.
        let w = DigitWord::from_digits(vec![1, 1, 1]);
        let beta = solve_beta(&w, 200, 16).unwrap();
        let ball = beta.enclosure(200).unwrap();
        assert!(ball.rad_log2().unwrap() <= -200);
        let val = |num: i64, den: i64| {
            // den³·G(num/den) = den(num² + den·num + den²) − num³... sign of
            // num³ − den·num² − den²·num − den³ is the sign of -G
            let (n, d) = (BigInt::from(num), BigInt::from(den));
            &n * &n * &n - &d * &n * &n - &d * &d * &n - &d * &d * &d
        };
        assert!(val(1839, 1000) < BigInt::from(0)); // G(1.839) > 0
        assert!(val(1840, 1000) > BigInt::from(0)); // G(1.840) < 0
        let lo = Dyadic::from_ratio(&BigInt::from(1839), &BigInt::from(1000), 64, crate::numeric::Round::Floor).0;
        let hi = Dyadic::from_ratio(&BigInt::from(1840), &BigInt::from(1000), 64, crate::numeric::Round::Ceil).0;
        assert!(ball.lower_bound().cmp_value(&lo) == Ordering::Greater);
        assert!(ball.upper_bound().cmp_value(&hi) == Ordering::Less);
    }

    #[test]
    fn rejects_words_that_are_not_expansions_of_one() {
        let zeros_lead = DigitWord::from_digits(vec![0, 1]);
        assert!(matches!(solve_beta(&zeros_lead, 64, 8), Err(Error::InvalidInput(_))));
        let grow = DigitWord::from_digits(vec![1, 2]);
        assert!(matches!(solve_beta(&grow, 64, 8), Err(Error::NotExpansionOfOne { .. })));
        let all_ones = DigitWord::from_fn(vec![1], None, |_| Ok(1));
        assert!(matches!(solve_beta(&all_ones, 64, 8), Err(Error::NotExpansionOfOne { .. })));
    }

    #[test]
    fn golden_sturmian_beta_round_trips_its_word() {
        let beta = sturmian_beta(&golden_slope(), 0, 1, 320, 64).unwrap();
        let ball = beta.enclosure(320).unwrap();
        assert_eq!(beta.floor(), &BigInt::one());
        assert!(ball.rad_log2().unwrap() <= -320);
        // forward re-expansion reproduces the displayed prefix
        let prefix = d_beta_rational(&beta, &BigRational::one(), 26, &Precision::exact(512))
            .unwrap()
            .prefix_string(26)
            .unwrap();
        assert_eq!(prefix, "10100101001001010010100100");
        // d_β(1 − 1/β) is the other extreme of the orbit closure
        let low = d_beta(
            &beta,
            &|bits| beta.one_minus_recip(bits),
            26,
            &Precision::exact(512),
        )
        .unwrap()
        .prefix_string(26)
        .unwrap();
        assert_eq!(low, "00100101001001010010100100");
    }

    #[test]
    fn renamed_word_beta_lands_in_the_advertised_interval() {
        let beta = sturmian_beta(&golden_slope(), 1, 3, 256, 64).unwrap();
        assert_eq!(beta.floor(), &BigInt::from(3));
        let prefix = d_beta_rational(&beta, &BigRational::one(), 27, &Precision::exact(768))
            .unwrap()
            .prefix_string(27)
            .unwrap();
        assert_eq!(prefix, "313113131131131311313113113");
    }

    #[test]
    fn slope_order_transfers_to_the_roots() {
        let a = sturmian_beta(&golden_slope(), 0, 1, 128, 48).unwrap();
        let b = sturmian_beta(&Slope::parse("surd:(-1+1*sqrt(2))/1").unwrap(), 0, 1, 128, 48).unwrap();
        // τ⁻² ≈ 0.382 < √2 − 1 ≈ 0.414
        assert_eq!(a.cmp(&b).unwrap(), Ordering::Less);
    }

    #[test]
    fn refinement_tightens_without_moving_the_root() {
        let beta = sturmian_beta(&golden_slope(), 0, 1, 96, 32).unwrap();
        let coarse = beta.enclosure(96).unwrap();
        let fine = beta.enclosure(700).unwrap();
        assert!(fine.rad_log2().unwrap() <= -700);
        assert!(coarse.intersect(&fine).is_some());
    }
}

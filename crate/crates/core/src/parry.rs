//! Letter frequencies under the invariant measure of the βx mod 1 map.
//!
//! T(x) = βx − ⌊βx⌋ preserves an absolutely continuous probability measure
//! with density
//!
//!   h(x) = (1/F) · Σ_{n : x < tₙ} β⁻ⁿ,      F = Σ_{n≥0} tₙ β⁻ⁿ,
//!
//! where tₙ is the orbit of 1 under T (t₀ = 1).  When the expansion of 1 is a
//! renamed mechanical word over digits {a, b}, the measures of the two letter
//! cylinders reduce to explicit series I and J in the digits εₙ, and the
//! typical-point frequencies μ_b = I/F, μ_a = J/F sit strictly below the
//! in-word frequencies α and 1 − α.  Everything is computed as certified
//! balls: dropped tails get closed-form interval bounds, and each series is
//! evaluated by two independent routes whose intersection must be nonempty.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::beta::{d_beta, orbit, sturmian_beta, BetaNumber, BetaSource, Precision};
use crate::error::{Error, Result};
use crate::numeric::{Dyadic, Intercept, RealBall, Slope};
use crate::words::DigitWord;

/// Digit stream feeding the measure formulas.  Non-integer β uses the greedy
/// expansion of 1.  Integer β uses the left-limit word (β−1)(β−1)… — the
/// greedy word β000… would zero out every tail and give F = 1 instead of the
/// uniform-density value β/(β−1).
fn measure_digits(beta: &BetaNumber) -> Result<DigitWord> {
    match beta.source() {
        BetaSource::Integer(b) => {
            let d = b.to_u32().ok_or(Error::Unsupported("integer β ≥ 2^32"))? - 1;
            Ok(DigitWord::from_fn(vec![d], None, move |_| Ok(d)))
        }
        _ => Ok(beta.expansion_of_one()),
    }
}

/// First `n` orbit points t₀ … t_{n−1} of 1, under the same convention as
/// `measure_digits`: the integer-β left-limit orbit is constantly 1.
fn measure_orbit(beta: &BetaNumber, n: u64, bits: u64) -> Result<Vec<RealBall>> {
    match beta.source() {
        BetaSource::Integer(_) => Ok(vec![RealBall::one(); n as usize]),
        _ => {
            let mut points = orbit(beta, n, bits)?.points;
            points.truncate(n as usize);
            Ok(points)
        }
    }
}

/// Σ_k terms[k]·y^k by backward Horner.  A level-k rounding is attenuated by
/// y^k before it reaches the result, so deep levels run at trimmed precision;
/// every rounding still lands in the radius.
fn horner(terms: &[RealBall], y: &RealBall, bits: u64, lg_inv: f64) -> RealBall {
    let mut acc = RealBall::zero();
    let mut yt = y.clone();
    let mut yt_bits = 0u64;
    for (k, c) in terms.iter().enumerate().rev() {
        let w = (bits + 32).saturating_sub((k as f64 * lg_inv) as u64).max(32);
        if yt_bits < w + 64 {
            yt = y.rounded(w + 96);
            yt_bits = w + 96;
        }
        acc = acc.mul(&yt, w).add(c, w);
    }
    acc
}

/// y must be certifiably below 1 before any closed-form tail makes sense.
fn tail_base(y: &RealBall, bits: u64) -> Result<RealBall> {
    let y_hi = RealBall::exact(y.upper_bound());
    if y_hi.upper_bound().cmp_value(&Dyadic::one()) != Ordering::Less {
        return Err(Error::PrecisionExhausted {
            context: "series tail with 1/β not separated from 1",
            bits: bits as u32,
        });
    }
    Ok(y_hi)
}

/// [0, Σ_{n≥from} y^n] = [0, y^from/(1−y)].
fn plain_tail(y: &RealBall, from: u64, bits: u64) -> Result<RealBall> {
    let y_hi = tail_base(y, bits)?;
    let t = y_hi.pow(from, 96).div(&RealBall::one().sub(&y_hi, 96), 96)?;
    Ok(RealBall::from_endpoints(&Dyadic::zero(), &t.upper_bound()))
}

/// [0, Σ_{n≥from} (n+1)·W·y^{n+1}] ⊆ [0, W·(from+2)·y^{from+1}/(1−y)²].
fn weighted_tail(y: &RealBall, from: u64, weight: &BigInt, bits: u64) -> Result<RealBall> {
    let y_hi = tail_base(y, bits)?;
    let one_minus = RealBall::one().sub(&y_hi, 96);
    let t = y_hi
        .pow(from + 1, 96)
        .mul_bigint(&(weight * BigInt::from(from + 2)), 96)
        .div(&one_minus.mul(&one_minus, 96), 96)?;
    Ok(RealBall::from_endpoints(&Dyadic::zero(), &t.upper_bound()))
}

fn floor_digit(beta: &BetaNumber) -> Result<u32> {
    beta.floor().to_u32().ok_or(Error::Unsupported("β floor ≥ 2^32"))
}

/// Normalizing factor F = Σ tₙ β⁻ⁿ = Σ (n+1) εₙ β⁻⁽ⁿ⁺¹⁾, truncated after
/// `terms` terms of each route and intersected.  The first route sums the
/// certified orbit (tail: every tₙ lies in [0,1]); the second sums exact
/// digit coefficients (tail: εₙ ≤ ⌊β⌋).  Disjoint routes mean a bug in one
/// of them, not a rounding artifact, and fail loudly.
pub fn normalizing_factor(beta: &BetaNumber, terms: u64, bits: u64) -> Result<RealBall> {
    if terms == 0 {
        return Err(Error::InvalidInput("normalizing factor needs at least one term".into()));
    }
    let lg = beta.log2_lower_hint();
    let y = beta.enclosure(bits + 64)?.recip(bits + 64)?;

    let points = measure_orbit(beta, terms, bits + 32)?;
    let by_orbit = horner(&points, &y, bits, lg).add(&plain_tail(&y, terms, bits)?, bits);

    let word = measure_digits(beta)?;
    let b = floor_digit(beta)?;
    let mut coeffs = Vec::with_capacity(terms as usize);
    for n in 0..terms {
        let d = word.digit(n)?;
        coeffs.push(RealBall::from_bigint(&(BigInt::from(d) * BigInt::from(n + 1))));
    }
    let by_digits = horner(&coeffs, &y, bits, lg)
        .mul(&y, bits)
        .add(&weighted_tail(&y, terms, &BigInt::from(b), bits)?, bits);

    by_orbit.intersect(&by_digits).ok_or_else(|| Error::IdentityViolated {
        gap: format!("normalizing-factor routes disjoint: orbit {by_orbit:?} vs digits {by_digits:?}"),
    })
}

/// Density h(x) of the invariant measure at a point, as a certified ball.
///
/// Terms whose indicator x < tₙ cannot be decided at this radius contribute
/// their whole magnitude [0, yⁿ] to the enclosure instead of failing — the
/// density has genuine jump discontinuities at the orbit points, so a point
/// sitting on one has no better answer.
pub fn density(beta: &BetaNumber, x: &RealBall, terms: u64, bits: u64) -> Result<RealBall> {
    if x.lower_bound().cmp_value(&Dyadic::one()) != Ordering::Less {
        // every tₙ ≤ 1 ≤ x, so no indicator fires: h vanishes outside [0,1)
        return Ok(RealBall::zero());
    }
    if terms == 0 {
        return Err(Error::InvalidInput("density needs at least one term".into()));
    }
    let f = normalizing_factor(beta, terms, bits + 16)?;
    let y = beta.enclosure(bits + 64)?.recip(bits + 64)?;
    let points = measure_orbit(beta, terms, bits + 32)?;

    let w = bits + 48;
    let mut acc = RealBall::zero();
    let mut ypow = RealBall::one();
    for t in &points {
        match x.cmp_certain(t) {
            Some(Ordering::Less) => acc = acc.add(&ypow, w),
            Some(_) => {}
            None => {
                let fuzz = RealBall::from_endpoints(&Dyadic::zero(), &ypow.upper_bound());
                acc = acc.add(&fuzz, w);
            }
        }
        ypow = ypow.mul(&y, w);
    }
    acc = acc.add(&plain_tail(&y, terms, bits)?, w);
    acc.div(&f, bits)
}

/// Checks that the first `terms` digits of the expansion of 1 really are a
/// mechanical word of slope `alpha` renamed onto top digit `b`: the running
/// count of b's through position n must equal ⌈α(n+1)⌉.  Returns the audited
/// digit prefix.
fn slope_audit(word: &DigitWord, alpha: &Slope, b: u32, terms: u64) -> Result<Vec<u32>> {
    let digits = word.prefix(terms)?;
    if digits.len() < terms as usize {
        return Err(Error::SlopeMismatch { index: digits.len() as u64 });
    }
    let mut count = BigInt::from(0);
    for (n, &d) in digits.iter().enumerate() {
        if d == b {
            count += 1;
        }
        let expect = alpha.ceil_linear(&BigInt::from(n as u64 + 1), &Intercept::zero())?;
        if count != expect {
            return Err(Error::SlopeMismatch { index: n as u64 });
        }
    }
    Ok(digits)
}

/// I = Σ ⌈αn⌉ εₙ β⁻⁽ⁿ⁺¹⁾: the b-cylinder measure scaled by F.
///
/// Cross-checked against the pre-swap form Σ_{n: εₙ=b} (tₙ − b/β) β⁻ⁿ, which
/// reads the same quantity off the orbit instead of the digit counts; the
/// two routes are intersected.
pub fn series_i(beta: &BetaNumber, alpha: &Slope, terms: u64, bits: u64) -> Result<RealBall> {
    if terms == 0 {
        return Err(Error::InvalidInput("series needs at least one term".into()));
    }
    let b = floor_digit(beta)?;
    let word = measure_digits(beta)?;
    let digits = slope_audit(&word, alpha, b, terms)?;
    let lg = beta.log2_lower_hint();
    let y = beta.enclosure(bits + 64)?.recip(bits + 64)?;

    let mut coeffs = Vec::with_capacity(terms as usize);
    for (n, &d) in digits.iter().enumerate() {
        let c = alpha.ceil_linear(&BigInt::from(n as u64), &Intercept::zero())? * BigInt::from(d);
        coeffs.push(RealBall::from_bigint(&c));
    }
    let direct = horner(&coeffs, &y, bits, lg)
        .mul(&y, bits)
        .add(&weighted_tail(&y, terms, &BigInt::from(b), bits)?, bits);

    // pre-swap route: for εₙ = b the whole tail Σ_{m>n} ε_m β^{-(m+1)} equals
    // β^{-n}(tₙ − b/β), so the orbit supplies the inner sums in closed form
    let points = measure_orbit(beta, terms, bits + 32)?;
    let by = y.mul_bigint(&BigInt::from(b), bits + 32);
    let masked: Vec<RealBall> = digits
        .iter()
        .zip(&points)
        .map(|(&d, t)| if d == b { t.sub(&by, bits + 32) } else { RealBall::zero() })
        .collect();
    let preswap = horner(&masked, &y, bits, lg).add(&plain_tail(&y, terms, bits)?, bits);

    direct.intersect(&preswap).ok_or_else(|| Error::IdentityViolated {
        gap: format!("I-series routes disjoint: direct {direct:?} vs pre-swap {preswap:?}"),
    })
}

/// J = Σ_{n: εₙ=b} β⁻⁽ⁿ⁺¹⁾ + Σ (n − ⌈αn⌉) εₙ β⁻⁽ⁿ⁺¹⁾: the a-cylinder
/// measure scaled by F, cross-checked against its pre-swap form
/// Σ_{n: εₙ=b} β⁻⁽ⁿ⁺¹⁾ + Σ_{n: εₙ=a} (tₙ − a/β) β⁻ⁿ.
pub fn series_j(
    beta: &BetaNumber,
    alpha: &Slope,
    a: u32,
    b: u32,
    terms: u64,
    bits: u64,
) -> Result<RealBall> {
    if terms == 0 {
        return Err(Error::InvalidInput("series needs at least one term".into()));
    }
    if floor_digit(beta)? != b {
        return Err(Error::InvalidInput(format!("β floor is not the top digit {b}")));
    }
    let word = measure_digits(beta)?;
    let digits = slope_audit(&word, alpha, b, terms)?;
    if let Some(n) = digits.iter().position(|&d| d != a && d != b) {
        return Err(Error::SlopeMismatch { index: n as u64 });
    }
    let lg = beta.log2_lower_hint();
    let y = beta.enclosure(bits + 64)?.recip(bits + 64)?;

    let mut coeffs = Vec::with_capacity(terms as usize);
    for (n, &d) in digits.iter().enumerate() {
        let swapped = (BigInt::from(n as u64)
            - alpha.ceil_linear(&BigInt::from(n as u64), &Intercept::zero())?)
            * BigInt::from(d);
        let c = if d == b { swapped + 1 } else { swapped };
        coeffs.push(RealBall::from_bigint(&c));
    }
    let direct = horner(&coeffs, &y, bits, lg)
        .mul(&y, bits)
        .add(&weighted_tail(&y, terms, &BigInt::from(b + 1), bits)?, bits);

    let points = measure_orbit(beta, terms, bits + 32)?;
    let ay = y.mul_bigint(&BigInt::from(a), bits + 32);
    let masked: Vec<RealBall> = digits
        .iter()
        .zip(&points)
        .map(|(&d, t)| if d == b { y.clone() } else { t.sub(&ay, bits + 32) })
        .collect();
    let preswap = horner(&masked, &y, bits, lg).add(&plain_tail(&y, terms, bits)?.shl(1), bits);

    direct.intersect(&preswap).ok_or_else(|| Error::IdentityViolated {
        gap: format!("J-series routes disjoint: direct {direct:?} vs pre-swap {preswap:?}"),
    })
}

/// Which strict-inequality regime the inputs (α, a, b) fall into.  Each
/// carries its own certified defect; inputs outside all three still get a
/// report, just with nothing asserted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofCase {
    /// a = 0: the defect lands on the top digit.
    SmallestDigitZero,
    /// a ≥ 1 and ⌊β⌋·α > 1: defect on the top digit.
    FloorTimesSlopeAboveOne,
    /// a ≥ 1 and ⌊β⌋·α < 1: defect on the small digit.
    FloorTimesSlopeBelowOne,
    /// No regime could be decided for these inputs.
    Outside,
}

impl std::fmt::Display for ProofCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProofCase::SmallestDigitZero => "a_zero",
            ProofCase::FloorTimesSlopeAboveOne => "floor_alpha_above_one",
            ProofCase::FloorTimesSlopeBelowOne => "floor_alpha_below_one",
            ProofCase::Outside => "outside",
        };
        f.write_str(s)
    }
}

/// Certified letter-frequency report for the β attached to a renamed
/// mechanical word.  μ_b and μ_a are the typical-point frequencies of the
/// two letters; the defects measure how far they sit below the in-word
/// frequencies α and 1 − α.
#[derive(Clone)]
pub struct FrequencyReport {
    pub alpha: Slope,
    pub beta: BetaNumber,
    pub f: RealBall,
    pub i: RealBall,
    pub j: RealBall,
    pub mu_b: RealBall,
    pub mu_a: RealBall,
    pub defect_b: RealBall,
    pub defect_a: RealBall,
    pub case: ProofCase,
    /// True when the case-designated defect is certified strictly positive.
    pub certified: bool,
}

fn proof_case(alpha: &Slope, a: u32, b: u32) -> Result<ProofCase> {
    if a == 0 {
        return Ok(ProofCase::SmallestDigitZero);
    }
    match alpha.cmp_rational(&BigRational::new(BigInt::one(), BigInt::from(b))) {
        Ok(Ordering::Greater) => Ok(ProofCase::FloorTimesSlopeAboveOne),
        Ok(Ordering::Less) => Ok(ProofCase::FloorTimesSlopeBelowOne),
        Ok(Ordering::Equal) => Ok(ProofCase::Outside),
        Err(Error::InequalityUnresolved { .. }) => Ok(ProofCase::Outside),
        Err(e) => Err(e),
    }
}

/// Solves the β of the (α, a, b) mechanical word, evaluates F, I, J at the
/// given truncation, and certifies the strict frequency defect the case
/// calls for.  A defect ball still straddling zero in the asserted case is
/// an error; outside-case inputs report without asserting.
pub fn frequency_report(
    alpha: &Slope,
    a: u32,
    b: u32,
    terms: u64,
    bits: u64,
) -> Result<FrequencyReport> {
    let beta = sturmian_beta(alpha, a, b, bits + 64, 32)?;
    let f = normalizing_factor(&beta, terms, bits)?;
    let i = series_i(&beta, alpha, terms, bits)?;
    let j = series_j(&beta, alpha, a, b, terms, bits)?;
    let mu_b = i.div(&f, bits)?;
    let mu_a = j.div(&f, bits)?;
    let alpha_ball = alpha.to_ball(bits + 16)?;
    let defect_b = alpha_ball.sub(&mu_b, bits);
    let defect_a = RealBall::one().sub(&alpha_ball, bits + 16).sub(&mu_a, bits);

    let case = proof_case(alpha, a, b)?;
    let designated = match case {
        ProofCase::SmallestDigitZero | ProofCase::FloorTimesSlopeAboveOne => Some(&defect_b),
        ProofCase::FloorTimesSlopeBelowOne => Some(&defect_a),
        ProofCase::Outside => None,
    };
    let certified = designated.map(|d| d.sign_certain() == Some(Ordering::Greater));
    if certified == Some(false) {
        return Err(Error::InequalityUnresolved {
            context: "strict frequency defect not separated from zero",
        });
    }

    Ok(FrequencyReport {
        alpha: alpha.clone(),
        beta,
        f,
        i,
        j,
        mu_b,
        mu_a,
        defect_b,
        defect_a,
        case,
        certified: certified.unwrap_or(false),
    })
}

/// Digit tallies along the expansion of one pseudo-random starting point.
#[derive(Clone, Debug)]
pub struct BirkhoffSample {
    /// x = numerator / 2^53, the exact dyadic starting point.
    pub numerator: u64,
    pub steps: u64,
    pub count_a: u64,
    pub count_b: u64,
}

/// Expands `count` seeded pseudo-random dyadic points to `steps` digits each
/// and tallies the two letters.  The typical-point theorem says the tallies
/// divided by `steps` approach μ_a and μ_b; callers pick the tolerance.
/// The xorshift seed is recorded alongside the samples by the caller, so the
/// probe set is reproducible.
pub fn birkhoff_samples(
    beta: &BetaNumber,
    a: u32,
    b: u32,
    count: u32,
    steps: u64,
    seed: u64,
    prec: &Precision,
) -> Result<Vec<BirkhoffSample>> {
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        // keep x away from the endpoints: digit ladders stall on exact 0
        let numerator = (next() >> 11) | 1;
        let x_at = move |bits: u64| {
            Ok(RealBall::from_ratio(&BigInt::from(numerator), &(BigInt::one() << 53), bits))
        };
        let word = d_beta(beta, &x_at, steps, prec)?;
        let digits = word.prefix(steps)?;
        let count_a = digits.iter().filter(|&&d| d == a).count() as u64;
        let count_b = digits.iter().filter(|&&d| d == b).count() as u64;
        out.push(BirkhoffSample { numerator, steps, count_a, count_b });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::QuadraticSurd;

    fn golden_slope() -> Slope {
        Slope::parse("surd:(3-1*sqrt(5))/2").unwrap()
    }

    fn golden_beta() -> BetaNumber {
        sturmian_beta(&golden_slope(), 0, 1, 192, 32).unwrap()
    }

    fn assert_ball_near(ball: &RealBall, target: &RealBall, tol_log2: i64, what: &str) {
        let gap = ball.sub(target, 256);
        let bound = Dyadic::power_of_two(tol_log2);
        assert_eq!(
            gap.upper_bound().abs().cmp_value(&bound),
            Ordering::Less,
            "{what}: upper gap too large"
        );
        assert_eq!(
            gap.lower_bound().abs().cmp_value(&bound),
            Ordering::Less,
            "{what}: lower gap too large"
        );
    }

    #[test]
    fn integer_bases_recover_the_geometric_normalizing_factor() {
        for (b, num, den) in [(2i64, 2i64, 1i64), (3, 3, 2), (10, 10, 9)] {
            let beta = BetaNumber::integer(b).unwrap();
            let f = normalizing_factor(&beta, 300, 128).unwrap();
            let exact = RealBall::from_ratio(&BigInt::from(num), &BigInt::from(den), 256);
            assert!(
                f.intersect(&exact).is_some(),
                "F({b}) should enclose {num}/{den}"
            );
            assert!(f.rad_log2().unwrap() < -100, "F({b}) radius too wide");
        }
    }

    #[test]
    fn golden_base_normalizing_factor_matches_the_surd_oracle() {
        // d_β(1) = 11 for β = (1+√5)/2, orbit {1, β−1, 0, …}, so
        // F = 1 + (β−1)/β = 3 − β exactly.
        let tau = QuadraticSurd::new(1, 1, 5, 2).unwrap();
        let beta = BetaNumber::surd(tau).unwrap();
        let f = normalizing_factor(&beta, 256, 128).unwrap();
        let oracle = QuadraticSurd::new(5, -1, 5, 2).unwrap().to_ball(256);
        assert!(f.intersect(&oracle).is_some(), "F(τ) should enclose 3 − τ");
        assert!(f.rad_log2().unwrap() < -100);
    }

    #[test]
    fn golden_base_density_has_the_advertised_values() {
        let tau = QuadraticSurd::new(1, 1, 5, 2).unwrap();
        let beta = BetaNumber::surd(tau.clone()).unwrap();

        // x = 1/2 sits below both t₀ = 1 and t₁ = τ−1: h = (1/F)(1 + 1/τ) = τ/(3−τ)
        let half = RealBall::from_ratio(&BigInt::from(1), &BigInt::from(2), 128);
        let h = density(&beta, &half, 224, 128).unwrap();
        let f = QuadraticSurd::new(5, -1, 5, 2).unwrap().to_ball(256);
        let oracle = tau.to_ball(256).div(&f, 256).unwrap();
        assert_ball_near(&h, &oracle, -90, "h(1/2)");

        // x between τ−1 and 1 only sees t₀: h = 1/F
        let x = RealBall::from_ratio(&BigInt::from(7), &BigInt::from(10), 128);
        let h = density(&beta, &x, 224, 128).unwrap();
        let oracle = RealBall::one().div(&f, 256).unwrap();
        assert_ball_near(&h, &oracle, -90, "h(7/10)");

        // at and beyond 1 the density vanishes identically
        for x in [RealBall::one(), RealBall::from_ratio(&BigInt::from(5), &BigInt::from(4), 128)] {
            let h = density(&beta, &x, 224, 128).unwrap();
            assert!(h.is_exact() && h.mid().is_zero(), "h must be exactly 0 at x ≥ 1");
        }
    }

    #[test]
    fn golden_base_density_integrates_to_one() {
        let tau = QuadraticSurd::new(1, 1, 5, 2).unwrap();
        let beta = BetaNumber::surd(tau).unwrap();
        let cells = 4000u32;
        let mut sum = RealBall::zero();
        for i in 0..cells {
            let num = BigInt::from(2 * i as i64 + 1);
            let den = BigInt::from(2 * cells as i64);
            let x = RealBall::from_ratio(&num, &den, 96);
            let h = density(&beta, &x, 48, 80).unwrap();
            sum = sum.add(&h, 96);
        }
        let avg = sum.div(&RealBall::from_bigint(&BigInt::from(cells)), 96).unwrap();
        // midpoint rule: the only error sources are the two jump cells
        assert_ball_near(&avg, &RealBall::one(), -10, "∫h over [0,1]");
    }

    #[test]
    fn measure_series_agree_with_their_preswap_forms() {
        let alpha = golden_slope();
        let beta = golden_beta();
        let f = normalizing_factor(&beta, 400, 96).unwrap();
        let i = series_i(&beta, &alpha, 400, 96).unwrap();
        let j = series_j(&beta, &alpha, 0, 1, 400, 96).unwrap();
        assert!(i.rad_log2().unwrap() < -60, "I radius too wide");
        assert!(j.rad_log2().unwrap() < -60, "J radius too wide");

        // top digit 1 means every expansion digit is 0 or 1: the two
        // cylinders exhaust [0,1) and the frequencies must sum to one
        let total = i.add(&j, 128).div(&f, 128).unwrap();
        assert_ball_near(&total, &RealBall::one(), -55, "μ_a + μ_b for a two-letter base");
    }

    #[test]
    fn series_audit_rejects_a_wrong_slope() {
        let beta = golden_beta();
        let wrong = Slope::parse("surd:(-1+1*sqrt(2))/1").unwrap();
        match series_i(&beta, &wrong, 200, 64) {
            Err(Error::SlopeMismatch { index }) => {
                assert!(index < 64, "mismatch should surface early, got {index}")
            }
            other => panic!("expected SlopeMismatch, got {other:?}"),
        }
    }

    #[test]
    fn frequency_report_certifies_each_proof_family() {
        // a = 0
        let r = frequency_report(&golden_slope(), 0, 1, 300, 96).unwrap();
        assert_eq!(r.case, ProofCase::SmallestDigitZero);
        assert!(r.certified);
        assert_eq!(r.defect_b.sign_certain(), Some(Ordering::Greater));

        // a ≥ 1 with ⌊β⌋·α > 1: same slope renamed onto {1, 3}
        let r = frequency_report(&golden_slope(), 1, 3, 300, 96).unwrap();
        assert_eq!(r.case, ProofCase::FloorTimesSlopeAboveOne);
        assert!(r.certified);
        assert_eq!(r.defect_b.sign_certain(), Some(Ordering::Greater));
        // with extra digits available below the top one, the two cylinders
        // no longer exhaust the interval
        let total = r.mu_a.add(&r.mu_b, 128);
        assert_eq!(
            total.upper_bound().cmp_value(&Dyadic::one()),
            Ordering::Less,
            "μ_a + μ_b < 1 when the alphabet skips digits"
        );

        // a ≥ 1 with ⌊β⌋·α < 1
        let small = Slope::parse("surd:(3-1*sqrt(5))/4").unwrap();
        let r = frequency_report(&small, 1, 4, 300, 96).unwrap();
        assert_eq!(r.case, ProofCase::FloorTimesSlopeBelowOne);
        assert!(r.certified);
        assert_eq!(r.defect_a.sign_certain(), Some(Ordering::Greater));
    }

    #[test]
    fn frequencies_are_nonnegative_and_substochastic() {
        for (a, b) in [(0u32, 1u32), (1, 3), (2, 5)] {
            let r = frequency_report(&golden_slope(), a, b, 250, 80).unwrap();
            for (mu, name) in [(&r.mu_a, "μ_a"), (&r.mu_b, "μ_b")] {
                assert_ne!(
                    mu.upper_bound().signum(),
                    -1,
                    "{name} must not be certifiably negative for ({a},{b})"
                );
            }
            let total = r.mu_a.add(&r.mu_b, 128);
            let bound = Dyadic::one().add(&Dyadic::power_of_two(-40));
            assert_eq!(
                total.lower_bound().cmp_value(&bound),
                Ordering::Less,
                "μ_a + μ_b must stay ≤ 1 up to the tail tolerance for ({a},{b})"
            );
        }
    }

    #[test]
    fn birkhoff_averages_land_near_the_invariant_frequencies() {
        let alpha = golden_slope();
        let r = frequency_report(&alpha, 0, 1, 400, 96).unwrap();
        let steps = 2000u64;
        let prec = Precision::exact(2048);
        let samples = birkhoff_samples(&r.beta, 0, 1, 2, steps, 0x5eed_cafe, &prec).unwrap();
        assert_eq!(samples.len(), 2);
        for s in &samples {
            assert_eq!(s.count_a + s.count_b, steps, "two-letter base emits only a and b");
            let emp_b = RealBall::from_ratio(&BigInt::from(s.count_b), &BigInt::from(steps), 96);
            let emp_a = RealBall::from_ratio(&BigInt::from(s.count_a), &BigInt::from(steps), 96);
            // Birkhoff averaging at 2000 steps: a couple of percent is
            // already decisive, since α − μ_b is an order larger
            assert_ball_near(&emp_b, &r.mu_b, -5, "empirical b-frequency");
            assert_ball_near(&emp_a, &r.mu_a, -5, "empirical a-frequency");
        }
    }

    #[test]
    fn expansion_digit_frequency_tracks_the_slope_not_the_measure() {
        let alpha = golden_slope();
        let r = frequency_report(&alpha, 0, 1, 400, 96).unwrap();
        let n = 3000u64;
        let digits = r.beta.expansion_of_one().prefix(n).unwrap();
        let ones = digits.iter().filter(|&&d| d == 1).count() as u64;
        let emp = RealBall::from_ratio(&BigInt::from(ones), &BigInt::from(n), 96);
        let alpha_ball = alpha.to_ball(128).unwrap();
        assert_ball_near(&emp, &alpha_ball, -9, "in-word b-frequency vs α");

        // and that is measurably different from the typical-point frequency
        let gap = emp.sub(&r.mu_b, 128);
        assert_eq!(gap.sign_certain(), Some(Ordering::Greater), "in-word frequency exceeds μ_b");
        assert_eq!(
            gap.lower_bound().cmp_value(&Dyadic::power_of_two(-6)),
            Ordering::Greater,
            "the defect is not a rounding artifact"
        );
    }
}

//! The lacunary-type series f(w, z) = Σ_{n≥1} ⌊nw⌋ zⁿ and the identity that
//! ties it to the β attached to a renamed mechanical word.
//!
//! For |z| < 1 the series converges geometrically and the dropped tail has
//! the closed form Σ_{n>N} n rⁿ = N r^{N+1}/(1−r) + r^{N+1}/(1−r)², r = |z|,
//! which dominates the dropped coefficients since |⌊nw⌋| ≤ n for w ∈ (0, 1).
//! With β solved from the (α, a, b) word, three independent expressions for
//! Σ (⌊α(n+1)⌋ − ⌊αn⌋) β^{−(n+1)} must agree:
//!
//!   the digit series itself,
//!   (1 − 1/β) · f(α, 1/β)          (telescoping the floors), and
//!   (1/(b−a)) (1 − (b−a)/β − a/(β−1))   (eliminating the word entirely).
//!
//! `identity_check` evaluates all three as certified balls and fails loudly
//! if any pair is disjoint.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::beta::solve::TRUNCATION_CAP;
use crate::beta::sturmian_beta;
use crate::error::{Error, Result};
use crate::numeric::{Dyadic, Intercept, RealBall, Slope};
use crate::words::lower_mechanical;

/// One certified evaluation of f(w, z).
#[derive(Clone, Debug)]
pub struct MahlerEvaluation {
    pub w: Slope,
    pub z: RealBall,
    /// Certified enclosure of the full series; its radius already includes
    /// `tail_bound`.
    pub value: RealBall,
    pub terms_used: u64,
    /// Upper bound on Σ_{n>terms_used} n·|z|ⁿ, hence on the dropped tail.
    pub tail_bound: Dyadic,
}

/// |z| as an exact dyadic upper bound, certified below 1.
fn abs_upper_below_one(z: &RealBall) -> Result<Dyadic> {
    let lo = z.lower_bound().abs();
    let hi = z.upper_bound().abs();
    let r = if lo.cmp_value(&hi) == Ordering::Greater { lo } else { hi };
    if r.cmp_value(&Dyadic::one()) != Ordering::Less {
        return Err(Error::DivergentInput(format!(
            "series needs |z| < 1 certified, got |z| ≤ {}",
            r.to_f64_lossy()
        )));
    }
    Ok(r)
}

/// Exact closed form for Σ_{n>terms} n rⁿ, as an upper dyadic.
fn tail_after(r: &Dyadic, terms: u64) -> Result<Dyadic> {
    let rb = RealBall::exact(r.clone());
    let one_minus = RealBall::one().sub(&rb, 96);
    let pow = rb.pow(terms + 1, 96);
    let linear = pow.mul_bigint(&BigInt::from(terms), 96).div(&one_minus, 96)?;
    let quad = pow.div(&one_minus.mul(&one_minus, 96), 96)?;
    Ok(linear.add(&quad, 96).upper_bound())
}

/// Evaluates f(w, z) = Σ_{n≥1} ⌊nw⌋ zⁿ with the truncation chosen so the
/// closed-form tail sits below the requested precision.  The floors are
/// exact integers; a slope too fuzzy to decide one (a decimal slope with nw
/// near an integer) surfaces as `PrecisionExhausted`.
pub fn mahler_f(w: &Slope, z: &RealBall, bits: u64) -> Result<MahlerEvaluation> {
    if z.is_exact() && z.mid().is_zero() {
        return Ok(MahlerEvaluation {
            w: w.clone(),
            z: z.clone(),
            value: RealBall::zero(),
            terms_used: 0,
            tail_bound: Dyadic::zero(),
        });
    }
    let r = abs_upper_below_one(z)?;
    let target = Dyadic::power_of_two(-((bits + 16) as i64));
    let lg_inv = -r.to_f64_lossy().log2();
    let mut terms = (((bits + 32) as f64 / lg_inv).ceil() as u64).max(16);
    let mut tail = tail_after(&r, terms)?;
    while tail.cmp_value(&target) != Ordering::Less {
        terms = terms.saturating_mul(2);
        if terms > TRUNCATION_CAP {
            return Err(Error::PrecisionExhausted {
                context: "series truncation for f(w,z) exceeded the cap",
                bits: bits as u32,
            });
        }
        tail = tail_after(&r, terms)?;
    }

    let mut acc = RealBall::zero();
    let mut zt = z.clone();
    let mut zt_bits = 0u64;
    // Horner over the exact floors; a level-n rounding is attenuated by zⁿ,
    // so deep levels run trimmed
    for n in (1..=terms).rev() {
        let w_bits = (bits + 32).saturating_sub((n as f64 * lg_inv) as u64).max(32);
        if zt_bits < w_bits + 64 {
            zt = z.rounded(w_bits + 96);
            zt_bits = w_bits + 96;
        }
        let c = w.floor_linear(&BigInt::from(n), &Intercept::zero()).map_err(|e| match e {
            Error::InequalityUnresolved { .. } => Error::PrecisionExhausted {
                context: "slope floor ⌊nw⌋ not decidable at this accuracy",
                bits: bits as u32,
            },
            other => other,
        })?;
        acc = acc.add_dyadic(&Dyadic::from_bigint(&c), w_bits).mul(&zt, w_bits);
    }
    // tail sign is unknown once z may be negative: widen symmetrically
    let value = acc.add(&RealBall::new(Dyadic::zero(), tail.clone()), bits);
    Ok(MahlerEvaluation { w: w.clone(), z: z.clone(), value, terms_used: terms, tail_bound: tail })
}

/// The three-route evaluation of Σ (⌊α(n+1)⌋ − ⌊αn⌋) β^{−(n+1)}.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    /// Direct sum over the lower mechanical digits.
    pub digit_series: RealBall,
    /// (1 − 1/β) · f(α, 1/β).
    pub telescoped: RealBall,
    /// (1/(b−a)) (1 − (b−a)/β − a/(β−1)).
    pub algebraic: RealBall,
    /// Largest pairwise midpoint distance — a diagnostic, not a certificate;
    /// the certificate is that all three balls intersect.
    pub max_gap: Dyadic,
    /// Triple intersection of the routes.
    pub enclosure: RealBall,
}

fn pair_gap(x: &RealBall, y: &RealBall) -> Dyadic {
    x.mid().sub(y.mid()).abs()
}

/// Solves β for the (α, a, b) word and certifies that the three expressions
/// for the digit series agree.  Disjoint balls mean a bug in one of the
/// routes — the identity itself is exact — so that case is an error, not a
/// report.
pub fn identity_check(alpha: &Slope, a: u32, b: u32, bits: u64) -> Result<IdentityReport> {
    let beta = sturmian_beta(alpha, a, b, bits + 64, 32)?;
    let lg = {
        // log2 of the certified lower endpoint of β, for trim schedules
        let lo = beta.enclosure(bits + 64)?.lower_bound().to_f64_lossy();
        lo.log2().max(1e-3)
    };
    let y = beta.enclosure(bits + 64)?.recip(bits + 64)?;

    // route 1: the digits ⌊α(n+1)⌋ − ⌊αn⌋ themselves, summed against β^{-(n+1)}
    let word = lower_mechanical(alpha, &Intercept::zero());
    let terms = (((bits + 24) as f64 / lg).ceil() as u64).max(16) + 8;
    let digits = word.prefix(terms)?;
    let mut acc = RealBall::zero();
    let mut yt = y.clone();
    let mut yt_bits = 0u64;
    for (k, &d) in digits.iter().enumerate().rev() {
        let w_bits = (bits + 32).saturating_sub((k as f64 * lg) as u64).max(32);
        if yt_bits < w_bits + 64 {
            yt = y.rounded(w_bits + 96);
            yt_bits = w_bits + 96;
        }
        if d != 0 {
            acc = acc.add_dyadic(&Dyadic::from_i64(d as i64), w_bits);
        }
        acc = acc.mul(&yt, w_bits);
    }
    let tail_hi = tail_after(&y.upper_bound(), terms)?;
    let digit_series =
        acc.add(&RealBall::from_endpoints(&Dyadic::zero(), &tail_hi), bits);

    // route 2: telescope the floors into f itself
    let ev = mahler_f(alpha, &y, bits + 16)?;
    let telescoped = beta.one_minus_recip(bits + 16)?.mul(&ev.value, bits);

    // route 3: no word at all — the closed form in β alone
    let enclosure = beta.enclosure(bits + 64)?;
    let beta_minus_one = enclosure.add_dyadic(&Dyadic::from_i64(-1), bits + 64);
    let gap = BigInt::from(b) - BigInt::from(a);
    let mut rhs = RealBall::one()
        .sub(&y.mul_bigint(&gap, bits + 32), bits + 32);
    if a > 0 {
        let small = beta_minus_one.recip(bits + 32)?.mul_bigint(&BigInt::from(a), bits + 32);
        rhs = rhs.sub(&small, bits + 32);
    }
    let algebraic = rhs.div(&RealBall::from_bigint(&gap), bits)?;

    let pairs = [
        ("digit vs telescoped", &digit_series, &telescoped),
        ("digit vs algebraic", &digit_series, &algebraic),
        ("telescoped vs algebraic", &telescoped, &algebraic),
    ];
    let mut max_gap = Dyadic::zero();
    for (label, x, yb) in pairs {
        if x.intersect(yb).is_none() {
            return Err(Error::IdentityViolated {
                gap: format!("{label} disjoint: {x:?} vs {yb:?}"),
            });
        }
        let g = pair_gap(x, yb);
        if g.cmp_value(&max_gap) == Ordering::Greater {
            max_gap = g;
        }
    }
    let enclosure = digit_series
        .intersect(&telescoped)
        .and_then(|m| m.intersect(&algebraic))
        .ok_or_else(|| Error::IdentityViolated {
            gap: "pairwise overlaps exist but the triple intersection is empty".into(),
        })?;

    Ok(IdentityReport { digit_series, telescoped, algebraic, max_gap, enclosure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use crate::numeric::QuadraticSurd;

    fn golden_slope() -> Slope {
        Slope::parse("surd:(3-1*sqrt(5))/2").unwrap()
    }

    #[test]
    fn zero_argument_sums_to_zero() {
        let ev = mahler_f(&golden_slope(), &RealBall::zero(), 128).unwrap();
        assert!(ev.value.is_exact() && ev.value.mid().is_zero());
        assert_eq!(ev.terms_used, 0);
    }

    #[test]
    fn rational_slope_matches_the_closed_form_oracle() {
        // Σ ⌊n/2⌋ zⁿ = z²/((1−z)(1−z²)), valid on |z| < 1 for both signs
        let half = Slope::Surd(QuadraticSurd::from_rational(BigRational::new(
            BigInt::from(1),
            BigInt::from(2),
        )));
        for (num, oracle_num, oracle_den) in [(1i64, 3i64, 16i64), (-1, 3, 32)] {
            let z = RealBall::from_ratio(&BigInt::from(num), &BigInt::from(3), 192);
            let ev = mahler_f(&half, &z, 128).unwrap();
            let oracle =
                RealBall::from_ratio(&BigInt::from(oracle_num), &BigInt::from(oracle_den), 256);
            assert!(
                ev.value.intersect(&oracle).is_some(),
                "f(1/2, {num}/3) should enclose {oracle_num}/{oracle_den}"
            );
            assert!(ev.value.rad_log2().unwrap() < -120);
        }
    }

    #[test]
    fn divergent_arguments_are_rejected() {
        let one = RealBall::one();
        match mahler_f(&golden_slope(), &one, 64) {
            Err(Error::DivergentInput(_)) => {}
            other => panic!("expected DivergentInput, got {other:?}"),
        }
    }

    #[test]
    fn golden_argument_reaches_the_target_radius() {
        let beta = sturmian_beta(&golden_slope(), 0, 1, 256, 32).unwrap();
        let y = beta.enclosure(320).unwrap().recip(320).unwrap();
        let ev = mahler_f(&golden_slope(), &y, 160).unwrap();
        // 10⁻⁴⁰ ≈ 2⁻¹³³
        assert!(ev.value.rad_log2().unwrap() < -133, "radius {:?}", ev.value.rad_log2());
        assert!(ev.terms_used > 0);
        // invariant: the reported tail bound is inside the value radius
        assert_ne!(ev.value.rad().cmp_value(&ev.tail_bound), Ordering::Less);
    }

    #[test]
    fn telescoping_is_exact_in_rational_arithmetic() {
        let alpha = golden_slope();
        let x = BigRational::new(BigInt::from(7), BigInt::from(3));
        let floor = |n: u64| alpha.floor_linear(&BigInt::from(n), &Intercept::zero()).unwrap();
        for cap in [0u64, 1, 2, 5, 13, 30] {
            let mut lhs = BigRational::new(BigInt::from(0), BigInt::from(1));
            for n in 0..=cap {
                let step = BigRational::from(floor(n + 1) - floor(n));
                lhs += step / x.pow((n + 1) as i32);
            }
            let mut partial = BigRational::new(BigInt::from(0), BigInt::from(1));
            for n in 1..=cap {
                partial += BigRational::from(floor(n)) / x.pow(n as i32);
            }
            let one = BigRational::new(BigInt::from(1), BigInt::from(1));
            let rhs = (one.clone() - one / x.clone()) * partial
                + BigRational::from(floor(cap + 1)) / x.pow((cap + 1) as i32);
            assert_eq!(lhs, rhs, "telescoped partial sums differ at cap {cap}");
        }
    }

    #[test]
    fn identity_routes_agree_for_both_digit_namings() {
        for (a, b) in [(0u32, 1u32), (1, 3)] {
            let report = identity_check(&golden_slope(), a, b, 160).unwrap();
            assert!(
                report.max_gap.cmp_value(&Dyadic::power_of_two(-133)) == Ordering::Less,
                "({a},{b}): midpoint spread {:?} too wide",
                report.max_gap.to_f64_lossy()
            );
            assert!(report.enclosure.rad_log2().unwrap() < -133);
        }
    }

    #[test]
    fn refining_precision_shrinks_without_drifting() {
        let mut previous: Option<RealBall> = None;
        for bits in [48u64, 96, 192, 384] {
            let report = identity_check(&golden_slope(), 0, 1, bits).unwrap();
            let cur = report.enclosure;
            if let Some(prev) = &previous {
                assert!(
                    cur.intersect(prev).is_some(),
                    "refined ball at {bits} bits drifted outside its predecessor"
                );
                assert!(cur.rad_log2().unwrap() < prev.rad_log2().unwrap() - 30);
            }
            previous = Some(cur);
        }
    }
}

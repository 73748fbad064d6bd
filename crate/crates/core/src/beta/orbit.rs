use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::expansion::t_beta_step;
use super::{BetaNumber, BetaSource, Precision};
use crate::error::{Error, Result};
use crate::numeric::{Dyadic, RealBall};

/// A finite stretch of the orbit 1, T_β 1, T_β² 1, … with certified
/// enclosures, the digits read along the way, and running extrema.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    /// points[k] encloses T_β^k 1; one more entry than `digits`.
    pub points: Vec<RealBall>,
    /// digits[k] = ⌊β · points[k]⌋, i.e. the k-th digit of d_β(1).
    pub digits: Vec<u32>,
    /// Ball containing min_k T_β^k 1 over the recorded stretch.
    pub running_min: RealBall,
    /// Ball containing max_k T_β^k 1 over the recorded stretch.
    pub running_max: RealBall,
    /// Set when the run stopped early because a point could not be pushed
    /// through a digit boundary at the precision ceiling.
    pub truncated_at: Option<u64>,
}

fn extrema(points: &[RealBall]) -> (RealBall, RealBall) {
    let mut min_lo = points[0].lower_bound();
    let mut min_hi = points[0].upper_bound();
    let mut max_lo = min_lo.clone();
    let mut max_hi = min_hi.clone();
    for p in &points[1..] {
        let (lo, hi) = (p.lower_bound(), p.upper_bound());
        if lo.cmp_value(&min_lo) == Ordering::Less {
            min_lo = lo.clone();
        }
        if hi.cmp_value(&min_hi) == Ordering::Less {
            min_hi = hi.clone();
        }
        if lo.cmp_value(&max_lo) == Ordering::Greater {
            max_lo = lo;
        }
        if hi.cmp_value(&max_hi) == Ordering::Greater {
            max_hi = hi;
        }
    }
    // the true min lies between the smallest lower and smallest upper bound
    (RealBall::from_endpoints(&min_lo, &min_hi), RealBall::from_endpoints(&max_lo, &max_hi))
}

fn record(points: Vec<RealBall>, digits: Vec<u32>, truncated_at: Option<u64>) -> OrbitRecord {
    let (running_min, running_max) = extrema(&points);
    OrbitRecord { points, digits, running_min, running_max, truncated_at }
}

impl OrbitRecord {
    /// running_max − running_min: a certified two-sided estimate of the
    /// diameter of the recorded stretch (and so a lower estimate of the full
    /// orbit diameter).
    pub fn diam(&self, bits: u64) -> RealBall {
        self.running_max.sub(&self.running_min, bits)
    }
}

/// Orbit of 1 under T_β for `n` steps (n+1 points), each ball of radius
/// about 2^-bits.
///
/// For a series-root β the points are the tails T_β^k 1 = Σ_j w(k+j)·β^-(j+1)
/// of the known expansion, computed by one backward sweep of
/// t_k = (w(k) + t_{k+1})/β from a seed ball [0,1] planted far enough out
/// that the 1/β contraction per step lands every requested point at target
/// precision. No digit decisions are made, so no precision ladder is needed.
pub fn orbit(beta: &BetaNumber, n: u64, bits: u64) -> Result<OrbitRecord> {
    match beta.source() {
        BetaSource::Integer(b) => {
            let mut points = vec![RealBall::one()];
            let mut digits = Vec::new();
            if n > 0 {
                digits.push(b.to_u32().ok_or(Error::Unsupported("integer β ≥ 2^32"))?);
                points.extend(std::iter::repeat(RealBall::zero()).take(n as usize));
                digits.extend(std::iter::repeat(0u32).take(n as usize - 1));
            }
            Ok(record(points, digits, None))
        }
        BetaSource::Algebraic(x) => {
            let mut cur = crate::numeric::QuadraticSurd::from_bigint(BigInt::from(1));
            let mut points = vec![RealBall::one()];
            let mut digits = Vec::new();
            for _ in 0..n {
                let y = x.mul(&cur);
                let d = y.floor();
                if d.is_negative() {
                    return Err(Error::IdentityViolated {
                        gap: "orbit left [0,1] in exact arithmetic".into(),
                    });
                }
                cur = y.sub_bigint(&d);
                points.push(cur.to_ball(bits));
                digits.push(d.to_u32().ok_or(Error::Unsupported("orbit digit ≥ 2^32"))?);
            }
            Ok(record(points, digits, None))
        }
        BetaSource::SeriesRoot(w) => {
            let lg_lo = beta.log2_lower_hint();
            let pad = (((bits + 16) as f64 / lg_lo).ceil() as u64).min(2_000_000) + 8;
            let total = n + pad;
            let work = bits + 96 + (64 - (total + 1).leading_zeros() as u64);
            let inv = beta.enclosure(work)?.recip(work)?;
            let head = w.prefix(total)?; // clamped for finite words: 0 past the end
            let at = |k: usize| head.get(k).copied().unwrap_or(0);
            let mut t = RealBall::from_endpoints(&Dyadic::zero(), &Dyadic::one());
            let mut points = vec![RealBall::zero(); n as usize + 1];
            for k in (0..total as usize).rev() {
                let d = at(k);
                if d != 0 {
                    t = t.add_dyadic(&Dyadic::from_i64(d as i64), work);
                }
                t = t.mul(&inv, work);
                if (k as u64) <= n {
                    points[k] = t.clone();
                }
            }
            if !points[0].sub(&RealBall::one(), work).contains_zero() {
                return Err(Error::IdentityViolated {
                    gap: "tail sum at index 0 does not return to 1".into(),
                });
            }
            points[0] = RealBall::one(); // T⁰1 = 1 exactly; the ball certified consistency
            let digits = (0..n as usize).map(at).collect();
            Ok(record(points, digits, None))
        }
    }
}

/// Certified two-sided estimate of diam{T_β^k 1 : k ≤ n}.
pub fn diam_estimate(beta: &BetaNumber, n: u64, bits: u64) -> Result<RealBall> {
    Ok(orbit(beta, n, bits)?.diam(bits))
}

/// Forward orbit from an arbitrary start x ∈ [0,1] supplied as a refinable
/// enclosure. Digit decisions can genuinely straddle here, so the run
/// retries up the precision ladder and, at the ceiling, returns what it has
/// with `truncated_at` set instead of guessing.
pub fn orbit_from(
    beta: &BetaNumber,
    x_at: &dyn Fn(u64) -> Result<RealBall>,
    n: u64,
    prec: &Precision,
) -> Result<OrbitRecord> {
    let mut bits = prec
        .start_bits
        .max((n as f64 * beta.log2_hint()).ceil() as u64 + 96)
        .min(prec.ceiling_bits);
    loop {
        let rec = attempt_forward(beta, x_at, n, bits)?;
        match rec.truncated_at {
            Some(_) if bits < prec.ceiling_bits => bits = (bits * 2).min(prec.ceiling_bits),
            _ => return Ok(rec),
        }
    }
}

fn attempt_forward(
    beta: &BetaNumber,
    x_at: &dyn Fn(u64) -> Result<RealBall>,
    n: u64,
    bits: u64,
) -> Result<OrbitRecord> {
    let mut x = x_at(bits)?;
    let mut points = vec![x.clone()];
    let mut digits = Vec::new();
    let mut truncated_at = None;
    for k in 0..n {
        match t_beta_step(beta, &x, bits) {
            Ok((d, next)) => {
                digits.push(d.to_u32().ok_or(Error::Unsupported("orbit digit ≥ 2^32"))?);
                points.push(next.clone());
                x = next;
            }
            Err(Error::PrecisionExhausted { .. }) => {
                truncated_at = Some(k);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(record(points, digits, truncated_at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::solve::sturmian_beta;
    use crate::numeric::Slope;

    fn golden_slope() -> Slope {
        Slope::parse("surd:(3-1*sqrt(5))/2").unwrap()
    }

    #[test]
    fn integer_orbit_collapses_to_zero() {
        let two = BetaNumber::integer(2).unwrap();
        let rec = orbit(&two, 6, 64).unwrap();
        assert_eq!(rec.points.len(), 7);
        assert_eq!(rec.digits, vec![2, 0, 0, 0, 0, 0]);
        assert!(rec.points[1].is_exact());
        assert!(rec.points[1].contains_zero());
        let d = rec.diam(64);
        assert!(d.sub(&RealBall::one(), 64).contains_zero());
        assert!(rec.truncated_at.is_none());
    }

    #[test]
    fn golden_orbit_is_one_then_fraction_then_zero() {
        let tau = BetaNumber::surd(crate::numeric::QuadraticSurd::new(1, 1, 5, 2).unwrap()).unwrap();
        let rec = orbit(&tau, 5, 128).unwrap();
        assert_eq!(rec.digits, vec![1, 1, 0, 0, 0]);
        // T(1) = τ − 1, T²(1) = 0
        let frac = crate::numeric::QuadraticSurd::new(-1, 1, 5, 2).unwrap();
        assert!(rec.points[1].sub(&frac.to_ball(128), 128).contains_zero());
        assert!(rec.points[2].is_exact());
    }

    #[test]
    fn sturmian_orbit_stays_in_the_upper_window() {
        let beta = sturmian_beta(&golden_slope(), 0, 1, 192, 64).unwrap();
        let rec = orbit(&beta, 400, 160).unwrap();
        assert!(rec.truncated_at.is_none());
        let floor_gap = beta.one_minus_recip(192).unwrap();
        let lo = floor_gap.lower_bound();
        for p in &rec.points {
            // certified: upper ≥ lower window edge is not enough; demand the
            // whole ball sits above 1 − 1/β − 2^-150 and below 1 + 2^-150
            let slack = Dyadic::power_of_two(-150);
            assert!(p.lower_bound().cmp_value(&lo.sub(&slack)) == Ordering::Greater);
            assert!(p.upper_bound().cmp_value(&Dyadic::one().add(&slack)) == Ordering::Less);
        }
        // the first digit stream is the renamed mechanical word itself
        assert_eq!(rec.digits[..8], [1, 0, 1, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn diameter_approaches_the_reciprocal_for_the_golden_sturmian() {
        let beta = sturmian_beta(&golden_slope(), 0, 1, 192, 64).unwrap();
        let d = diam_estimate(&beta, 2000, 160).unwrap();
        let recip = beta.enclosure(192).unwrap().recip(192).unwrap();
        let gap = d.sub(&recip, 160);
        // |diam − 1/β| < 10⁻³ already at this depth
        assert!(gap.to_f64_lossy().abs() < 1e-3);
    }

    #[test]
    fn renamed_alphabet_doubles_the_diameter() {
        let beta = sturmian_beta(&golden_slope(), 1, 3, 224, 64).unwrap();
        let d = diam_estimate(&beta, 2000, 160).unwrap();
        let recip = beta.enclosure(224).unwrap().recip(224).unwrap();
        let two_over = recip.shl(1);
        assert!(d.sub(&two_over, 160).to_f64_lossy().abs() < 1e-3);
    }

    #[test]
    fn forward_orbit_marks_truncation_at_a_boundary_point() {
        // x = 1/β maps to βx = 1 exactly: the floor of a ball around 1 never
        // certifies, so the run must stop with a marker instead of guessing.
        let beta = sturmian_beta(&golden_slope(), 0, 1, 128, 48).unwrap();
        let prec = Precision { start_bits: 64, ceiling_bits: 512 };
        let rec = orbit_from(
            &beta,
            &|bits| beta.enclosure(bits + 8)?.recip(bits),
            6,
            &prec,
        )
        .unwrap();
        assert_eq!(rec.truncated_at, Some(0));
        assert_eq!(rec.points.len(), 1);
        assert!(rec.digits.is_empty());
    }

    #[test]
    fn forward_and_backward_orbits_agree() {
        let beta = sturmian_beta(&golden_slope(), 0, 1, 160, 48).unwrap();
        let back = orbit(&beta, 40, 128).unwrap();
        let fwd = orbit_from(
            &beta,
            &|_| Ok(RealBall::one()),
            40,
            &Precision { start_bits: 256, ceiling_bits: 4096 },
        )
        .unwrap();
        assert!(fwd.truncated_at.is_none());
        assert_eq!(fwd.digits, back.digits);
        for (a, b) in fwd.points.iter().zip(back.points.iter()) {
            assert!(a.intersect(b).is_some());
        }
    }
}

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};

/// Radii carry few bits; they only need an order of magnitude.
const RAD_BITS: u64 = 24;

/// Round a nonnegative dyadic up to radius precision. The result dominates
/// the input, so enclosures stay valid.
fn rad_up(d: &Dyadic) -> Dyadic {
    debug_assert!(!d.is_negative());
    d.round_to_bits(RAD_BITS, Round::Ceil).0
}

/// value ∈ [mid - rad, mid + rad]
///
/// Every operation returns a ball whose interval contains the exact result of
/// the operation applied to any points of the input intervals. Midpoints are
/// rounded to the working precision passed per call; radii absorb all
/// rounding error.
#[derive(Clone, PartialEq)]
pub struct RealBall {
    mid: Dyadic,
    rad: Dyadic,
}

impl RealBall {
    pub fn exact(mid: Dyadic) -> Self {
        RealBall { mid, rad: Dyadic::zero() }
    }

    pub fn zero() -> Self {
        RealBall::exact(Dyadic::zero())
    }

    pub fn one() -> Self {
        RealBall::exact(Dyadic::one())
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        RealBall::exact(Dyadic::from_bigint(n))
    }

    pub fn new(mid: Dyadic, rad: Dyadic) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        RealBall { mid, rad }
    }

    /// Enclosure of num/den at `bits` working precision.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u64) -> Self {
        let (lo, lo_inexact) = Dyadic::from_ratio(num, den, bits, Round::Floor);
        if !lo_inexact {
            return RealBall::exact(lo);
        }
        let (hi, _) = Dyadic::from_ratio(num, den, bits, Round::Ceil);
        RealBall::from_endpoints(&lo, &hi)
    }

    /// Ball spanning [lo, hi].
    pub fn from_endpoints(lo: &Dyadic, hi: &Dyadic) -> Self {
        debug_assert!(lo.cmp_value(hi) != Ordering::Greater);
        let mid = lo.add(hi).shl(-1);
        let rad = rad_up(&hi.sub(lo).shl(-1));
        RealBall { mid, rad }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn lower_bound(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper_bound(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    /// floor(log2 rad), or None for exact balls.
    pub fn rad_log2(&self) -> Option<i64> {
        if self.rad.is_zero() {
            None
        } else {
            Some(self.rad.ilog2_abs())
        }
    }

    pub fn neg(&self) -> Self {
        RealBall { mid: self.mid.neg(), rad: self.rad.clone() }
    }

    /// Round the midpoint to `bits`, inflating the radius by the error.
    pub fn rounded(&self, bits: u64) -> Self {
        let (mid, err) = self.mid.round_to_bits(bits, Round::Nearest);
        if err.is_zero() {
            return RealBall { mid, rad: self.rad.clone() };
        }
        RealBall { mid, rad: rad_up(&self.rad.add(&err)) }
    }

    /// Drop midpoint bits that are far below the radius: keeps `guard` bits
    /// beyond the radius magnitude. No-op for exact balls.
    pub fn trimmed(&self, guard: u32) -> Self {
        if self.rad.is_zero() || self.mid.is_zero() {
            return self.clone();
        }
        let keep = self.mid.ilog2_abs() - self.rad.ilog2_abs() + guard as i64;
        if keep <= 16 {
            return self.rounded(16);
        }
        if (self.mid.bits() as i64) <= keep {
            return self.clone();
        }
        self.rounded(keep as u64)
    }

    pub fn add(&self, other: &Self, bits: u64) -> Self {
        let (mid, err) = self.mid.add(&other.mid).round_to_bits(bits, Round::Nearest);
        let rad = rad_up(&self.rad.add(&other.rad).add(&err));
        RealBall { mid, rad }
    }

    pub fn add_dyadic(&self, other: &Dyadic, bits: u64) -> Self {
        let (mid, err) = self.mid.add(other).round_to_bits(bits, Round::Nearest);
        let rad = rad_up(&self.rad.add(&err));
        RealBall { mid, rad }
    }

    pub fn sub(&self, other: &Self, bits: u64) -> Self {
        self.add(&other.neg(), bits)
    }

    pub fn mul(&self, other: &Self, bits: u64) -> Self {
        let (mid, err) = self.mid.mul(&other.mid).round_to_bits(bits, Round::Nearest);
        // |a| rb + |b| ra + ra rb, all on up-rounded low-precision magnitudes.
        let am = rad_up(&self.mid.abs());
        let bm = rad_up(&other.mid.abs());
        let cross = am
            .mul(&other.rad)
            .add(&bm.mul(&self.rad))
            .add(&self.rad.mul(&other.rad))
            .add(&err);
        RealBall { mid, rad: rad_up(&cross) }
    }

    pub fn mul_bigint(&self, k: &BigInt, bits: u64) -> Self {
        let (mid, err) = self.mid.mul_bigint(k).round_to_bits(bits, Round::Nearest);
        let rad = rad_up(&self.rad.mul_bigint(&k.abs()).add(&err));
        RealBall { mid, rad }
    }

    pub fn shl(&self, k: i64) -> Self {
        RealBall { mid: self.mid.shl(k), rad: self.rad.shl(k) }
    }

    /// Sign of every point of the ball, if uniform.
    pub fn sign_certain(&self) -> Option<Ordering> {
        if self.mid.is_zero() && self.rad.is_zero() {
            return Some(Ordering::Equal);
        }
        if self.rad.is_zero() {
            return Some(self.mid.cmp_value(&Dyadic::zero()));
        }
        if self.mid.abs().cmp_value(&self.rad) == Ordering::Greater {
            Some(if self.mid.is_negative() { Ordering::Less } else { Ordering::Greater })
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.sign_certain() != Some(Ordering::Less) && self.sign_certain() != Some(Ordering::Greater)
    }

    /// Certified comparison: Some(..) only when the intervals are disjoint
    /// (or both exact and equal).
    pub fn cmp_certain(&self, other: &Self) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() && self.mid == other.mid {
            return Some(Ordering::Equal);
        }
        if self.upper_bound().cmp_value(&other.lower_bound()) == Ordering::Less {
            return Some(Ordering::Less);
        }
        if self.lower_bound().cmp_value(&other.upper_bound()) == Ordering::Greater {
            return Some(Ordering::Greater);
        }
        None
    }

    /// Floor of the enclosed value, when every point of the ball agrees.
    pub fn floor_certified(&self) -> Option<BigInt> {
        let lo = self.lower_bound().floor_int();
        let hi = self.upper_bound().floor_int();
        if lo == hi {
            Some(lo)
        } else {
            None
        }
    }

    /// Reciprocal; the ball must exclude zero.
    pub fn recip(&self, bits: u64) -> Result<Self> {
        let sign = match self.sign_certain() {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => {
                return Err(Error::PrecisionExhausted {
                    context: "reciprocal of a ball containing zero",
                    bits: bits as u32,
                })
            }
        };
        let (m, r) = if sign > 0 {
            (self.mid.clone(), self.rad.clone())
        } else {
            (self.mid.neg(), self.rad.clone())
        };
        let in_lo = m.sub(&r); // > 0
        let in_hi = m.add(&r);
        let out_hi = dyadic_recip(&in_lo, bits + 4, Round::Ceil);
        let out_lo = dyadic_recip(&in_hi, bits + 4, Round::Floor);
        let ball = RealBall::from_endpoints(&out_lo, &out_hi).rounded(bits);
        Ok(if sign > 0 { ball } else { ball.neg() })
    }

    pub fn div(&self, other: &Self, bits: u64) -> Result<Self> {
        Ok(self.mul(&other.recip(bits + 4)?, bits))
    }

    /// x^n by binary powering.
    pub fn pow(&self, n: u64, bits: u64) -> Self {
        let mut acc = RealBall::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, bits);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, bits);
            }
        }
        acc
    }

    /// Enclosure of sqrt(n) for integer n >= 0 at `bits` precision.
    pub fn sqrt_bigint(n: &BigInt, bits: u64) -> Self {
        assert!(!n.is_negative(), "sqrt of negative integer");
        if n.is_zero() {
            return RealBall::zero();
        }
        let k = bits + 2;
        let scaled: BigInt = n << (2 * k);
        let s = scaled.sqrt(); // floor sqrt
        // s <= 2^k sqrt(n) < s+1
        let lo = Dyadic::new(s.clone(), -(k as i64));
        let hi = Dyadic::new(s + 1, -(k as i64));
        RealBall::from_endpoints(&lo, &hi)
    }

    /// Widen to include `other` (interval hull).
    pub fn hull(&self, other: &Self) -> Self {
        let lo = match self.lower_bound().cmp_value(&other.lower_bound()) {
            Ordering::Greater => other.lower_bound(),
            _ => self.lower_bound(),
        };
        let hi = match self.upper_bound().cmp_value(&other.upper_bound()) {
            Ordering::Less => other.upper_bound(),
            _ => self.upper_bound(),
        };
        RealBall::from_endpoints(&lo, &hi)
    }

    /// Intersection, when the balls overlap.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = match self.lower_bound().cmp_value(&other.lower_bound()) {
            Ordering::Less => other.lower_bound(),
            _ => self.lower_bound(),
        };
        let hi = match self.upper_bound().cmp_value(&other.upper_bound()) {
            Ordering::Greater => other.upper_bound(),
            _ => self.upper_bound(),
        };
        if lo.cmp_value(&hi) == Ordering::Greater {
            None
        } else {
            Some(RealBall::from_endpoints(&lo, &hi))
        }
    }

    /// |x - y| <= tol for every pair of points?
    pub fn within(&self, other: &Self, tol: &Dyadic) -> bool {
        let gap = self.mid.sub(&other.mid).abs().add(&self.rad).add(&other.rad);
        gap.cmp_value(tol) != Ordering::Greater
    }

    pub fn to_f64_lossy(&self) -> f64 {
        self.mid.to_f64_lossy()
    }
}

/// Directed reciprocal of a positive dyadic.
fn dyadic_recip(d: &Dyadic, bits: u64, round: Round) -> Dyadic {
    debug_assert!(d.signum() > 0);
    // 1/(m 2^e) = (1/m) 2^-e
    let (q, _) = Dyadic::from_ratio(&BigInt::one(), d.mantissa(), bits, round);
    q.shl(-d.exponent())
}

impl fmt::Debug for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RealBall({:?} ± {:?})",
            self.mid.to_f64_lossy(),
            self.rad.to_f64_lossy()
        )
    }
}

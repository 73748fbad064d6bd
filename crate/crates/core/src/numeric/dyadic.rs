use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Rounding direction for precision-limiting operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Floor,
    Ceil,
    Nearest,
}

/// Exact binary float: `mant * 2^exp`.
///
/// Invariant: `mant` is odd or zero; zero has `exp == 0`. Sums and products
/// are exact; only `round_to_bits` and the directed constructors lose
/// information, and they say so.
#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::from(1), exp: 0 }
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Dyadic::new(n.clone(), 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// 2^e.
    pub fn power_of_two(e: i64) -> Self {
        Dyadic { mant: BigInt::from(1), exp: e }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn signum(&self) -> i8 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Mantissa bit length (0 for zero).
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// floor(log2 |x|). Exact because the mantissa is odd. Panics on zero.
    pub fn ilog2_abs(&self) -> i64 {
        assert!(!self.is_zero(), "ilog2 of zero");
        self.exp + self.mant.bits() as i64 - 1
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Exact sum. The alignment shift is bounded by the operands' exponent
    /// spread, so round after summing when that spread is large.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        // Odd * odd is odd: no renormalization scan needed.
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub fn mul_bigint(&self, other: &BigInt) -> Self {
        Dyadic::new(&self.mant * other, self.exp)
    }

    /// Exact doubling/halving.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same nonzero sign: magnitudes first, alignment only on a near tie.
        let la = self.ilog2_abs();
        let lb = other.ilog2_abs();
        if la != lb {
            let mag = la.cmp(&lb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }

    /// Round to at most `bits` mantissa bits. Returns the rounded value and
    /// an error bound: the true value lies within `err` of the result (and on
    /// the directed side for Floor/Ceil). `err` is zero or one ulp.
    pub fn round_to_bits(&self, bits: u64, round: Round) -> (Self, Self) {
        assert!(bits >= 1);
        let cur = self.mant.bits();
        if cur <= bits {
            return (self.clone(), Dyadic::zero());
        }
        let shift = cur - bits;
        let ulp_exp = self.exp + shift as i64;
        let q = &self.mant >> shift; // floor
        let inexact = !(&self.mant ^ (&q << shift)).is_zero();
        if !inexact {
            return (Dyadic::new(q, ulp_exp), Dyadic::zero());
        }
        let ulp = Dyadic::power_of_two(ulp_exp);
        let rounded = match round {
            Round::Floor => Dyadic::new(q, ulp_exp),
            Round::Ceil => Dyadic::new(q + 1, ulp_exp),
            Round::Nearest => {
                // Floor of the half-ulp-advanced value; error <= ulp (a lazy
                // bound, but radii absorb it).
                let q2 = (&self.mant + (BigInt::from(1) << (shift - 1))) >> shift;
                Dyadic::new(q2, ulp_exp)
            }
        };
        (rounded, ulp)
    }

    /// Directed quotient `num/den` with about `bits` significant bits.
    /// Floor/Ceil results bound the true quotient from the stated side within
    /// one ulp; the bool reports inexactness.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u64, round: Round) -> (Self, bool) {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return (Dyadic::zero(), false);
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        // Scale so the quotient carries at least bits+2 significant bits.
        // Never scale down: a large quotient just stays exact in more bits.
        let scale = ((bits as i64 + 2) + den.bits() as i64 - num.bits() as i64).max(0) as u64;
        let shifted = &num << scale;
        let (mut q, r) = shifted.div_rem(&den); // truncates toward zero
        let inexact = !r.is_zero();
        if inexact {
            // Fix the truncation up to the requested direction.
            match round {
                Round::Floor | Round::Nearest => {
                    if q.is_negative() || (q.is_zero() && num.is_negative()) {
                        q -= 1;
                    }
                }
                Round::Ceil => {
                    if q.is_positive() || (q.is_zero() && num.is_positive()) {
                        q += 1;
                    }
                }
            }
        }
        (Dyadic::new(q, -(scale as i64)), inexact)
    }

    /// floor(x) as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            &self.mant >> (-self.exp) as u64
        }
    }

    /// ceil(x) as an integer.
    pub fn ceil_int(&self) -> BigInt {
        -((&self.neg()).floor_int())
    }

    /// Exact value as a rational, for rendering.
    pub fn to_rational(&self) -> num_rational::BigRational {
        if self.exp >= 0 {
            num_rational::BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            num_rational::BigRational::new(self.mant.clone(), BigInt::from(1) << (-self.exp) as u64)
        }
    }

    /// Nearest f64, for displays and heuristics only.
    pub fn to_f64_lossy(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (top, shift) = if bits > 64 {
            let s = bits - 64;
            ((&self.mant >> s).to_string().parse::<f64>().unwrap_or(f64::MAX), s as i64)
        } else {
            (self.mant.to_string().parse::<f64>().unwrap_or(0.0), 0)
        };
        let e = self.exp + shift;
        top * 2f64.powi(e.clamp(-1_000_000, 1_000_000) as i32)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({} * 2^{})", self.mant, self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalization_strips_twos() {
        let x = d(24, -3); // 3 * 2^0
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 0);
        assert!(Dyadic::zero().is_zero());
    }

    #[test]
    fn exact_ring_ops() {
        let a = d(3, -2); // 0.75
        let b = d(5, -1); // 2.5
        assert_eq!(a.add(&b), d(13, -2)); // 3.25
        assert_eq!(a.mul(&b), d(15, -3)); // 1.875
        assert_eq!(a.sub(&b), d(-7, -2)); // -1.75
        assert_eq!(a.cmp_value(&b), Ordering::Less);
        assert_eq!(b.cmp_value(&a), Ordering::Greater);
        assert_eq!(a.cmp_value(&d(3, -2)), Ordering::Equal);
        assert_eq!(d(-1, 0).cmp_value(&d(1, -60)), Ordering::Less);
    }

    #[test]
    fn floors_follow_sign() {
        assert_eq!(d(7, -2).floor_int(), BigInt::from(1)); // 1.75
        assert_eq!(d(-7, -2).floor_int(), BigInt::from(-2));
        assert_eq!(d(7, -2).ceil_int(), BigInt::from(2));
        assert_eq!(d(-7, -2).ceil_int(), BigInt::from(-1));
        assert_eq!(d(3, 2).floor_int(), BigInt::from(12));
    }

    #[test]
    fn rounding_brackets_the_value() {
        let x = d((1 << 20) + 12345, -10);
        for round in [Round::Floor, Round::Ceil, Round::Nearest] {
            let (r, err) = x.round_to_bits(8, round);
            assert!(r.bits() <= 8 + 1); // Ceil may carry into one extra bit
            let diff = r.sub(&x);
            assert!(diff.abs().cmp_value(&err) != Ordering::Greater);
            match round {
                Round::Floor => assert!(r.cmp_value(&x) != Ordering::Greater),
                Round::Ceil => assert!(r.cmp_value(&x) != Ordering::Less),
                Round::Nearest => {}
            }
        }
        let (exact, err) = x.round_to_bits(60, Round::Nearest);
        assert_eq!(exact, x);
        assert!(err.is_zero());
    }

    #[test]
    fn directed_ratio_brackets_the_quotient() {
        let cases: [(i64, i64); 6] = [(1, 3), (-1, 3), (10, 7), (-22, -7), (5, -9), (360, 8)];
        for (n, dn) in cases {
            let (lo, _) = Dyadic::from_ratio(&BigInt::from(n), &BigInt::from(dn), 40, Round::Floor);
            let (hi, _) = Dyadic::from_ratio(&BigInt::from(n), &BigInt::from(dn), 40, Round::Ceil);
            // lo <= n/dn <= hi, checked exactly: lo*dn <=> n with dn sign.
            let check = |v: &Dyadic, want_le: bool| {
                let lhs = v.mul_bigint(&BigInt::from(dn));
                let rhs = Dyadic::from_bigint(&BigInt::from(n));
                let c = if dn > 0 { lhs.cmp_value(&rhs) } else { rhs.cmp_value(&lhs) };
                if want_le {
                    assert!(c != Ordering::Greater, "{n}/{dn}");
                } else {
                    assert!(c != Ordering::Less, "{n}/{dn}");
                }
            };
            check(&lo, true);
            check(&hi, false);
            // Exact case stays exact.
            if n % dn == 0 {
                assert_eq!(lo, hi);
            }
        }
    }

    #[test]
    fn ilog2_is_exact() {
        assert_eq!(d(1, 0).ilog2_abs(), 0);
        assert_eq!(d(-3, -2).ilog2_abs(), -1); // |x| = 0.75
        assert_eq!(d(1, -7).ilog2_abs(), -7);
        assert_eq!(d(9, 3).ilog2_abs(), 6); // 72
    }
}

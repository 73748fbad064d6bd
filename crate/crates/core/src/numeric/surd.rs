use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ball::RealBall;
use crate::error::{Error, Result};

/// Element of a real quadratic field: `a + b*sqrt(d)` with rational a, b.
///
/// `d >= 2` and not a perfect square whenever b != 0, so irrationality is a
/// structural guarantee and floors/comparisons are exact integer decisions,
/// never precision-limited.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadraticSurd {
    /// (p + q*sqrt(d)) / r. Normalizes the square part of d into q.
    pub fn new(p: i64, q: i64, d: u64, r: i64) -> Result<Self> {
        Self::new_big(BigInt::from(p), BigInt::from(q), BigInt::from(d), BigInt::from(r))
    }

    pub fn new_big(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidInput("surd denominator r = 0".into()));
        }
        if d.is_negative() {
            return Err(Error::InvalidInput("surd radicand d < 0".into()));
        }
        let (core, square) = extract_square(&d);
        let q = q * square;
        let (a, b, d) = if q.is_zero() || core.is_one() || core.is_zero() {
            // Rational: fold sqrt(1) or q=0 into the rational part.
            let a = BigRational::new(p + &q * if core.is_one() { BigInt::one() } else { BigInt::zero() }, r.clone());
            (a, BigRational::zero(), BigInt::zero())
        } else {
            (BigRational::new(p, r.clone()), BigRational::new(q, r), core)
        };
        Ok(QuadraticSurd { a, b, d })
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadraticSurd { a, b: BigRational::zero(), d: BigInt::zero() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.a.is_zero()
    }

    /// Exact sign.
    pub fn signum(&self) -> i8 {
        if self.b.is_zero() {
            return sign_of(&self.a);
        }
        // sign(a + b sqrt(d)): compare b sqrt(d) against -a.
        match cmp_bsqrtd_vs_rational(&self.b, &self.d, &-self.a.clone()) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => 0,
        }
    }

    pub fn neg(&self) -> Self {
        QuadraticSurd { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    fn same_field(&self, other: &Self) -> BigInt {
        if self.b.is_zero() {
            other.d.clone()
        } else if other.b.is_zero() {
            self.d.clone()
        } else {
            assert_eq!(self.d, other.d, "mixed quadratic fields");
            self.d.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.same_field(other);
        QuadraticSurd { a: &self.a + &other.a, b: &self.b + &other.b, d }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        QuadraticSurd { a: &self.a + r, b: self.b.clone(), d: self.d.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.same_field(other);
        // (a1 + b1 s)(a2 + b2 s) = a1 a2 + b1 b2 d + (a1 b2 + a2 b1) s
        let a = &self.a * &other.a + &self.b * &other.b * BigRational::from_integer(d.clone());
        let b = &self.a * &other.b + &other.a * &self.b;
        let b_zero = b.is_zero();
        QuadraticSurd { a, b, d: if b_zero { BigInt::zero() } else { d } }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::from_rational(BigRational::zero());
        }
        QuadraticSurd { a: &self.a * r, b: &self.b * r, d: self.d.clone() }
    }

    pub fn mul_bigint(&self, n: &BigInt) -> Self {
        self.mul_rational(&BigRational::from_integer(n.clone()))
    }

    pub fn sub_bigint(&self, n: &BigInt) -> Self {
        self.add_rational(&BigRational::from_integer(-n.clone()))
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // Common denominator: x = (P + Q sqrt(d)) / R with R > 0.
        let r = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&r / self.a.denom());
        let q = self.b.numer() * (&r / self.b.denom());
        floor_surd(&p, &q, &r, &self.d)
    }

    /// Exact ceiling. Equals floor + 1 in the irrational case.
    pub fn ceil(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.ceil().to_integer();
        }
        self.floor() + 1
    }

    /// Exact fractional part, staying in the field.
    pub fn fract(&self) -> Self {
        self.sub_bigint(&self.floor())
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, rhs: &BigRational) -> Ordering {
        if self.b.is_zero() {
            return self.a.cmp(rhs);
        }
        // a + b sqrt(d) <=> m/n  <=>  b sqrt(d) <=> m/n - a
        cmp_bsqrtd_vs_rational(&self.b, &self.d, &(rhs - &self.a))
    }

    /// Exact comparison within the same field.
    pub fn cmp_same_field(&self, other: &Self) -> Ordering {
        let diff = self.sub(other);
        match diff.signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    /// Certified enclosure at `bits` working precision.
    pub fn to_ball(&self, bits: u64) -> RealBall {
        let a = RealBall::from_ratio(self.a.numer(), self.a.denom(), bits + 8);
        if self.b.is_zero() {
            return a.rounded(bits);
        }
        let s = RealBall::sqrt_bigint(&self.d, bits + 8);
        let b = RealBall::from_ratio(self.b.numer(), self.b.denom(), bits + 8);
        a.add(&b.mul(&s, bits + 8), bits)
    }

    /// Continued fraction coefficient stream (exact, lazy-friendly).
    /// Requires irrationality.
    pub fn cf_state(&self) -> Result<SurdCfState> {
        if self.b.is_zero() {
            return Err(Error::Unsupported("continued fraction stream of a rational surd"));
        }
        // Bring to (P + sqrt(D)) / Q with Q | D - P^2.
        let r = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&r / self.a.denom());
        let q = self.b.numer() * (&r / self.b.denom());
        // x = (p + q sqrt(d)) / r; make the sqrt coefficient +1.
        let (p0, d0, q0) = if q.is_positive() {
            (p, &q * &q * &self.d, r)
        } else {
            (-p, &q * &q * &self.d, -r)
        };
        // Scale so q0 divides d - p^2.
        let m = q0.abs();
        Ok(SurdCfState { p: &p0 * &m, d: &d0 * &m * &m, q: &q0 * &m })
    }
}

/// State of the classical quadratic-irrational continued fraction recurrence:
/// value = (p + sqrt(d)) / q with q | d - p^2.
#[derive(Clone, Debug)]
pub struct SurdCfState {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

impl SurdCfState {
    /// Emit the next coefficient and advance.
    pub fn next_coeff(&mut self) -> BigInt {
        let a = if self.q.is_positive() {
            floor_surd(&self.p, &BigInt::one(), &self.q, &self.d)
        } else {
            floor_surd(&-&self.p, &BigInt::from(-1), &-&self.q, &self.d)
        };
        let p_next = &a * &self.q - &self.p;
        let q_next = (&self.d - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;
        a
    }
}

/// floor((P + Q sqrt(d)) / R) for R > 0, d not a perfect square (or Q = 0).
///
/// With s = floor(sqrt(Q^2 d)), the value lies strictly inside
/// ((P + t)/R, (P + t + 1)/R) where t = s for Q > 0 and t = -s - 1 for Q < 0;
/// an open interval with integer endpoints of width 1/R contains no integer
/// beyond floor((P + t)/R) + 1, and the strict lower bound pins the floor.
pub fn floor_surd(p: &BigInt, q: &BigInt, r: &BigInt, d: &BigInt) -> BigInt {
    assert!(r.is_positive(), "floor_surd requires R > 0");
    if q.is_zero() {
        return p.div_floor(r);
    }
    let s = (q * q * d).sqrt();
    let t = if q.is_positive() { s } else { -s - 1 };
    (p + t).div_floor(r)
}

/// Exact comparison of b*sqrt(d) against a rational t.
fn cmp_bsqrtd_vs_rational(b: &BigRational, d: &BigInt, t: &BigRational) -> Ordering {
    let sb = sign_of(b);
    let st = sign_of(t);
    if sb >= 0 && st <= 0 {
        return if sb == 0 && st == 0 { Ordering::Equal } else { Ordering::Greater };
    }
    if sb <= 0 && st >= 0 {
        return Ordering::Less;
    }
    // Same strict sign: compare squares (b^2 d <=> t^2), flipping for negatives.
    let lhs = b * b * BigRational::from_integer(d.clone());
    let rhs = t * t;
    let c = lhs.cmp(&rhs);
    if sb > 0 {
        c
    } else {
        c.reverse()
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Split n = square * core with core squarefree-ish (trial division up to a
/// bound; any remaining square factor beyond it is harmless because callers
/// only rely on "not a perfect square", which is checked exactly).
fn extract_square(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::one());
    }
    let mut core = n.clone();
    let mut square = BigInt::one();
    let mut f = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while &f * &f * &f * &f <= core && f <= limit {
        let f2 = &f * &f;
        while (&core % &f2).is_zero() {
            core /= &f2;
            square *= &f;
        }
        f += 1;
    }
    // Exact perfect-square check for what remains.
    let s = core.sqrt();
    if &s * &s == core {
        return (BigInt::one(), square * s);
    }
    (core, square)
}

impl fmt::Debug for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "Surd({})", self.a)
        } else {
            write!(f, "Surd({} + {} sqrt({}))", self.a, self.b, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(p: i64, q: i64, d: u64, r: i64) -> QuadraticSurd {
        QuadraticSurd::new(p, q, d, r).unwrap()
    }

    /// Independent floor oracle: squeeze sqrt(d) between rationals by
    /// bisection until the floor of (p + q*sqrt(d))/r is pinned.
    fn floor_oracle(p: i64, q: i64, d: u64, r: i64) -> BigInt {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::from_integer(BigInt::from(d) + 1);
        let target = BigRational::from_integer(BigInt::from(d));
        for _ in 0..220 {
            let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            if &mid * &mid <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (ql, qh) = if q >= 0 {
            (BigRational::from_integer(q.into()) * &lo, BigRational::from_integer(q.into()) * &hi)
        } else {
            (BigRational::from_integer(q.into()) * &hi, BigRational::from_integer(q.into()) * &lo)
        };
        let p = BigRational::from_integer(p.into());
        let r = BigRational::from_integer(r.into());
        let a = (&p + ql) / r.clone();
        let b = (&p + qh) / r;
        let (fa, fb) = (a.floor().to_integer(), b.floor().to_integer());
        assert_eq!(fa, fb, "oracle precision insufficient");
        fa
    }

    #[test]
    fn floors_match_bisection_oracle() {
        let tau_inv_sq = surd(3, -1, 5, 2); // (3 - sqrt(5))/2
        for n in [1i64, 2, 3, 5, 13, 100, 987] {
            let x = tau_inv_sq.mul_bigint(&BigInt::from(n));
            let want = floor_oracle(3 * n, -n, 5, 2);
            assert_eq!(x.floor(), want, "n = {n}");
        }
        assert_eq!(tau_inv_sq.mul_bigint(&BigInt::from(5)).floor(), BigInt::from(1));
        assert_eq!(tau_inv_sq.mul_bigint(&BigInt::from(13)).floor(), BigInt::from(4));

        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..300 {
            let p = (next() % 41) as i64 - 20;
            let q = (next() % 19) as i64 - 9;
            let d = [2u64, 3, 5, 6, 7, 10, 11, 13][(next() % 8) as usize];
            let r = (next() % 30) as i64 + 1;
            let x = surd(p, q, d, r);
            assert_eq!(x.floor(), floor_oracle(p, q, d, r), "({p}+{q}sqrt({d}))/{r}");
            assert_eq!(x.ceil(), if x.is_rational() { x.as_rational().unwrap().ceil().to_integer() } else { x.floor() + 1 });
        }
    }

    #[test]
    fn sign_and_comparison_are_exact() {
        let x = surd(3, -1, 5, 2); // ~0.382
        assert_eq!(x.signum(), 1);
        assert_eq!(x.cmp_rational(&BigRational::new(1.into(), 3.into())), Ordering::Greater);
        assert_eq!(x.cmp_rational(&BigRational::new(2.into(), 5.into())), Ordering::Less);
        // x = 0.3819660112501051...: the nearest 11-digit truncation sits
        // ~1e-13 below it, and the decision is still exact.
        let tight = BigRational::new(BigInt::from(38_196_601_125i64), BigInt::from(100_000_000_000i64));
        assert_eq!(x.cmp_rational(&tight), Ordering::Greater);
        let tight2 = BigRational::new(BigInt::from(38_196_601_126i64), BigInt::from(100_000_000_000i64));
        assert_eq!(x.cmp_rational(&tight2), Ordering::Less);
        assert_eq!(surd(-1, 1, 2, 1).signum(), 1); // sqrt(2) - 1
        assert_eq!(surd(1, -1, 2, 1).signum(), -1); // 1 - sqrt(2)
    }

    #[test]
    fn field_arithmetic() {
        let tau = surd(1, 1, 5, 2); // golden ratio
        let sq = tau.mul(&tau);
        // tau^2 = tau + 1
        assert_eq!(sq, tau.add_rational(&BigRational::one()));
        let fract = tau.fract();
        // {tau} = tau - 1 = 1/tau
        assert_eq!(tau.mul(&fract), QuadraticSurd::from_bigint(BigInt::one()));
        assert_eq!(tau.floor(), BigInt::one());
    }

    #[test]
    fn square_factors_fold_into_the_coefficient() {
        // sqrt(20) = 2 sqrt(5)
        let a = surd(0, 1, 20, 1);
        let b = surd(0, 2, 5, 1);
        assert_eq!(a, b);
        // sqrt(49) = 7 exactly: rational.
        let c = surd(3, 1, 49, 2);
        assert!(c.is_rational());
        assert_eq!(c.as_rational().unwrap(), &BigRational::new(10.into(), 2.into()));
    }

    #[test]
    fn cf_stream_of_golden_slope() {
        // (3 - sqrt(5))/2 = [0; 2, 1, 1, 1, ...]
        let x = surd(3, -1, 5, 2);
        let mut st = x.cf_state().unwrap();
        let coeffs: Vec<i64> = (0..8).map(|_| i64::try_from(&st.next_coeff()).unwrap()).collect();
        assert_eq!(coeffs, vec![0, 2, 1, 1, 1, 1, 1, 1]);
        // sqrt(2) - 1 = [0; 2, 2, 2, ...]
        let y = surd(-1, 1, 2, 1);
        let mut st = y.cf_state().unwrap();
        let coeffs: Vec<i64> = (0..6).map(|_| i64::try_from(&st.next_coeff()).unwrap()).collect();
        assert_eq!(coeffs, vec![0, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn ball_conversion_encloses() {
        let x = surd(3, -1, 5, 2);
        let b = x.to_ball(128);
        // Compare the ball's endpoints against the exact value.
        let lo = b.lower_bound();
        let hi = b.upper_bound();
        let as_rat = |d: &crate::numeric::Dyadic| {
            let e = d.exponent();
            if e >= 0 {
                BigRational::from_integer(d.mantissa() << e as u64)
            } else {
                BigRational::new(d.mantissa().clone(), BigInt::one() << (-e) as u64)
            }
        };
        assert_eq!(x.cmp_rational(&as_rat(&lo)), Ordering::Greater);
        assert_eq!(x.cmp_rational(&as_rat(&hi)), Ordering::Less);
        assert!(b.rad().ilog2_abs() < -120);
    }
}

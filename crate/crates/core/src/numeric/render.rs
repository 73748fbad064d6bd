use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::ball::RealBall;

/// "midpoint ± radius" with the radius rounded up; exact balls say so
/// instead of printing a zero bound.
pub fn ball_string(b: &RealBall, max_frac_digits: usize) -> String {
    let mid = decimal_string(&b.mid().to_rational(), max_frac_digits);
    if b.is_exact() {
        format!("{mid} (exact)")
    } else {
        format!("{mid} ± {}", sci_string(&b.rad().to_rational()))
    }
}

/// Plain decimal rendering, truncated after `max_frac_digits` fractional
/// digits (exact when the expansion terminates earlier).
pub fn decimal_string(r: &BigRational, max_frac_digits: usize) -> String {
    let neg = r.is_negative();
    let mut v = r.abs();
    let ip = v.to_integer();
    v -= BigRational::from_integer(ip.clone());
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&ip.to_string());
    if v.is_zero() || max_frac_digits == 0 {
        return out;
    }
    out.push('.');
    let ten = BigRational::from_integer(BigInt::from(10));
    for _ in 0..max_frac_digits {
        v *= &ten;
        let d = v.to_integer();
        out.push(char::from(b'0' + u8::try_from(&d).unwrap()));
        v -= BigRational::from_integer(d);
        if v.is_zero() {
            break;
        }
    }
    out
}

/// Two-significant-digit scientific rendering, rounded away from zero so a
/// printed error bound never understates the true one.
pub fn sci_string(r: &BigRational) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let mut v = r.abs();
    let one = BigRational::from_integer(BigInt::from(1));
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut e10: i64 = 0;
    while v < one {
        v *= &ten;
        e10 -= 1;
    }
    while v >= ten {
        v /= &ten;
        e10 += 1;
    }
    // v in [1, 10): mantissa to two digits, rounded up.
    let mut m = (&v * &ten).ceil().to_integer();
    if m == BigInt::from(100) {
        m = BigInt::from(10);
        e10 += 1;
    }
    let m = u8::try_from(&m).unwrap();
    format!("{}{}.{}e{}", if neg { "-" } else { "" }, m / 10, m % 10, e10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn terminating_decimals_are_exact() {
        assert_eq!(decimal_string(&rat(1, 8), 20), "0.125");
        assert_eq!(decimal_string(&rat(-7, 4), 20), "-1.75");
        assert_eq!(decimal_string(&rat(3, 1), 20), "3");
    }

    #[test]
    fn repeating_decimals_truncate() {
        assert_eq!(decimal_string(&rat(1, 3), 5), "0.33333");
        assert_eq!(decimal_string(&rat(2, 3), 4), "0.6666");
    }

    #[test]
    fn scientific_rounds_up() {
        assert_eq!(sci_string(&rat(1, 10_000_000_000)), "1.0e-10");
        assert_eq!(sci_string(&rat(25, 10_000)), "2.5e-3");
        assert_eq!(sci_string(&rat(251, 100_000)), "2.6e-3");
        assert_eq!(sci_string(&rat(999, 100)), "1.0e1");
        assert_eq!(sci_string(&rat(0, 1)), "0");
    }
}

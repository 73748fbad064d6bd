use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ball::RealBall;
use super::cf::CfStream;
use super::dyadic::{Dyadic, Round};
use super::render::{decimal_string, sci_string};
use super::surd::QuadraticSurd;
use crate::error::{Error, Result};

/// A slope in (0, 1), carried in one of three certifiable representations.
///
/// Floors of n*slope + intercept are exact for the surd and continued
/// fraction forms; the decimal form refuses (rather than guesses) whenever
/// its stated uncertainty straddles an integer.
#[derive(Clone, Debug)]
pub enum Slope {
    Surd(QuadraticSurd),
    Cf(Arc<CfStream>),
    Decimal { value: BigRational, err: BigRational },
}

/// Intercept of a mechanical word. The surd form exists so shifted words
/// (whose intercepts live in the slope's quadratic field) stay exact.
#[derive(Clone, Debug)]
pub enum Intercept {
    Rational(BigRational),
    Surd(QuadraticSurd),
}

impl Slope {
    pub fn surd(x: QuadraticSurd) -> Result<Self> {
        if x.is_rational() {
            return Err(Error::InvalidInput(
                "slope must be irrational: the surd form reduced to a rational".into(),
            ));
        }
        if x.signum() <= 0 || x.cmp_rational(&BigRational::one()) != Ordering::Less {
            return Err(Error::InvalidInput("slope must lie in (0, 1)".into()));
        }
        Ok(Slope::Surd(x))
    }

    pub fn cf(stream: CfStream) -> Result<Self> {
        if !stream.coeff(0)?.is_zero() {
            return Err(Error::InvalidInput("slope continued fraction must start [0; ...]".into()));
        }
        Ok(Slope::Cf(Arc::new(stream)))
    }

    pub fn decimal(value: BigRational, err: BigRational) -> Result<Self> {
        if err.is_negative() {
            return Err(Error::InvalidInput("negative uncertainty".into()));
        }
        if err.is_zero() {
            return Err(Error::InvalidInput(
                "decimal slope needs a positive uncertainty ~e; a zero-width value is an exact rational".into(),
            ));
        }
        if &value - &err <= BigRational::zero() || &value + &err >= BigRational::one() {
            return Err(Error::InvalidInput("slope must lie in (0, 1), including its uncertainty".into()));
        }
        Ok(Slope::Decimal { value, err })
    }

    /// `surd:(3-1*sqrt(5))/2`, `cf:[0;2,(1)]`, or `dec:0.38196601~1e-8`.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = compact.strip_prefix("surd:") {
            Slope::surd(parse_surd(rest)?)
        } else if let Some(rest) = compact.strip_prefix("cf:") {
            Slope::cf(parse_cf(rest)?)
        } else if let Some(rest) = compact.strip_prefix("dec:") {
            let (v, e) = parse_dec(rest)?;
            Slope::decimal(v, e)
        } else {
            Err(Error::InvalidInput(format!("slope must start with surd:, cf:, or dec: (got {s:?})")))
        }
    }

    /// Surd and continued fraction slopes are irrational by construction;
    /// decimal slopes only carry the caller's word for it.
    pub fn assumed_irrational(&self) -> bool {
        matches!(self, Slope::Decimal { .. })
    }

    pub fn as_surd(&self) -> Option<&QuadraticSurd> {
        match self {
            Slope::Surd(x) => Some(x),
            _ => None,
        }
    }

    pub fn floor_linear(&self, n: &BigInt, rho: &Intercept) -> Result<BigInt> {
        self.affine_int(n, rho, false)
    }

    pub fn ceil_linear(&self, n: &BigInt, rho: &Intercept) -> Result<BigInt> {
        self.affine_int(n, rho, true)
    }

    fn affine_int(&self, n: &BigInt, rho: &Intercept, ceil: bool) -> Result<BigInt> {
        match self {
            Slope::Surd(x) => {
                let v = x.mul_bigint(n);
                let v = match rho {
                    Intercept::Rational(r) => v.add_rational(r),
                    Intercept::Surd(s) => {
                        if !s.is_rational() && !x.is_rational() && s.radicand() != x.radicand() {
                            return Err(Error::Unsupported("intercept and slope lie in different quadratic fields"));
                        }
                        v.add(s)
                    }
                };
                Ok(if ceil { v.ceil() } else { v.floor() })
            }
            Slope::Cf(cf) => {
                let r = rational_intercept(rho)?;
                if ceil {
                    cf.ceil_affine(n, &r)
                } else {
                    cf.floor_affine(n, &r)
                }
            }
            Slope::Decimal { value, err } => {
                let r = rational_intercept(rho)?;
                let nr = BigRational::from_integer(n.clone());
                let lo = &nr * (value - err) + &r;
                let hi = &nr * (value + err) + &r;
                let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
                let (a, b) = if ceil {
                    (lo.ceil().to_integer(), hi.ceil().to_integer())
                } else {
                    (lo.floor().to_integer(), hi.floor().to_integer())
                };
                if a == b {
                    Ok(a)
                } else {
                    Err(Error::InequalityUnresolved {
                        context: "decimal-slope floor straddles an integer; a tighter ~uncertainty is required",
                    })
                }
            }
        }
    }

    /// Certified enclosure of the slope at `bits` working precision.
    pub fn to_ball(&self, bits: u64) -> Result<RealBall> {
        match self {
            Slope::Surd(x) => Ok(x.to_ball(bits)),
            Slope::Cf(cf) => cf.to_ball(bits),
            Slope::Decimal { value, err } => {
                let lo = value - err;
                let hi = value + err;
                let (dlo, _) = Dyadic::from_ratio(lo.numer(), lo.denom(), bits + 8, Round::Floor);
                let (dhi, _) = Dyadic::from_ratio(hi.numer(), hi.denom(), bits + 8, Round::Ceil);
                Ok(RealBall::from_endpoints(&dlo, &dhi).rounded(bits))
            }
        }
    }

    /// k-th continued fraction convergent p_k / q_k of the slope.
    pub fn convergent(&self, k: u64) -> Result<(BigInt, BigInt)> {
        match self {
            Slope::Surd(x) => {
                if x.is_rational() {
                    return Err(Error::Unsupported("convergents of a rational slope"));
                }
                CfStream::from_surd(x)?.convergent(k)
            }
            Slope::Cf(cf) => cf.convergent(k),
            Slope::Decimal { .. } => Err(Error::Unsupported("convergents of a decimal slope")),
        }
    }

    /// Exact (or certifiably separated) comparison against a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Result<Ordering> {
        match self {
            Slope::Surd(x) => Ok(x.cmp_rational(q)),
            Slope::Cf(cf) => {
                let mut walk = cf.walk();
                let (p0, q0) = walk.advance()?;
                let mut prev = BigRational::new(p0, q0);
                loop {
                    let (p, qd) = walk.advance()?;
                    let cur = BigRational::new(p, qd);
                    let (lo, hi) = if prev <= cur { (prev.clone(), cur.clone()) } else { (cur.clone(), prev.clone()) };
                    if q <= &lo {
                        return Ok(Ordering::Greater);
                    }
                    if q >= &hi {
                        return Ok(Ordering::Less);
                    }
                    if walk.index() > 60_000 {
                        return Err(Error::PrecisionExhausted { context: "continued-fraction comparison", bits: 0 });
                    }
                    prev = cur;
                }
            }
            Slope::Decimal { value, err } => {
                let lo = value - err;
                let hi = value + err;
                if &hi < q {
                    Ok(Ordering::Less)
                } else if &lo > q {
                    Ok(Ordering::Greater)
                } else {
                    Err(Error::InequalityUnresolved {
                        context: "decimal slope too uncertain to compare against the given rational",
                    })
                }
            }
        }
    }
}

impl Intercept {
    pub fn zero() -> Self {
        Intercept::Rational(BigRational::zero())
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Intercept::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Intercept::Rational(r) => r.is_zero(),
            Intercept::Surd(s) => s.is_zero(),
        }
    }

    /// Reduce into the canonical fundamental domain [0, 1), exactly.
    pub fn normalized(&self) -> Intercept {
        match self {
            Intercept::Rational(r) => {
                Intercept::Rational(r - BigRational::from_integer(r.floor().to_integer()))
            }
            Intercept::Surd(s) => {
                if let Some(r) = s.as_rational() {
                    Intercept::Rational(r - BigRational::from_integer(r.floor().to_integer()))
                } else {
                    Intercept::Surd(s.fract())
                }
            }
        }
    }

    pub fn to_ball(&self, bits: u64) -> RealBall {
        match self {
            Intercept::Rational(r) => RealBall::from_ratio(r.numer(), r.denom(), bits),
            Intercept::Surd(s) => s.to_ball(bits),
        }
    }
}

fn rational_intercept(rho: &Intercept) -> Result<BigRational> {
    match rho {
        Intercept::Rational(r) => Ok(r.clone()),
        Intercept::Surd(s) => s
            .as_rational()
            .cloned()
            .ok_or(Error::Unsupported("irrational intercept requires a quadratic-surd slope")),
    }
}

/// `(p+q*sqrt(d))/r` with an optional rational or surd part; shared by the
/// slope and β-number parsers.
pub fn parse_surd(s: &str) -> Result<QuadraticSurd> {
    let err = |m: &str| Error::InvalidInput(format!("bad surd syntax: {m} (expected (p+q*sqrt(d))/r)"));
    let pos = s.rfind(")/").ok_or_else(|| err("missing )/"))?;
    if !s.starts_with('(') {
        return Err(err("missing opening parenthesis"));
    }
    let inner = &s[1..pos];
    let r: BigInt = s[pos + 2..].parse().map_err(|_| err("denominator is not an integer"))?;
    let (p, q, d) = match inner.find("sqrt(") {
        None => {
            let p: BigInt = inner.parse().map_err(|_| err("numerator is not an integer"))?;
            (p, BigInt::zero(), BigInt::zero())
        }
        Some(idx) => {
            let rad = inner[idx + 5..].strip_suffix(')').ok_or_else(|| err("unclosed sqrt("))?;
            let d: BigInt = rad.parse().map_err(|_| err("radicand is not an integer"))?;
            let prefix = inner[..idx].strip_suffix('*').unwrap_or(&inner[..idx]);
            // Split "<p><sign><q>" at the last sign that follows a digit.
            let split = prefix
                .char_indices()
                .rev()
                .find(|(i, c)| (*c == '+' || *c == '-') && *i > 0 && prefix.as_bytes()[i - 1].is_ascii_digit())
                .map(|(i, _)| i);
            match split {
                Some(i) => {
                    let p: BigInt = prefix[..i].parse().map_err(|_| err("rational part is not an integer"))?;
                    let q = match &prefix[i..] {
                        "+" => BigInt::one(),
                        "-" => -BigInt::one(),
                        t => t.parse().map_err(|_| err("surd coefficient is not an integer"))?,
                    };
                    (p, q, d)
                }
                None => {
                    let q = match prefix {
                        "" | "+" => BigInt::one(),
                        "-" => -BigInt::one(),
                        t => t.parse().map_err(|_| err("surd coefficient is not an integer"))?,
                    };
                    (BigInt::zero(), q, d)
                }
            }
        }
    };
    QuadraticSurd::new_big(p, q, d, r)
}

fn parse_cf(s: &str) -> Result<CfStream> {
    let err = |m: &str| Error::InvalidInput(format!("bad continued fraction syntax: {m} (expected [a0;a1,...,(cycle)])"));
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| err("missing brackets"))?;
    let (a0_str, rest) = inner.split_once(';').ok_or_else(|| err("missing ;"))?;
    let a0: BigInt = a0_str.parse().map_err(|_| err("leading coefficient is not an integer"))?;
    let open = rest.find('(').ok_or_else(|| err("missing (cycle): finite expansions are rational; use dec: with ~0"))?;
    let cycle_str = rest[open + 1..].strip_suffix(')').ok_or_else(|| err("unclosed cycle"))?;
    let head_str = rest[..open].trim_end_matches(',');
    let mut head = vec![a0];
    if !head_str.is_empty() {
        for t in head_str.split(',') {
            head.push(t.parse().map_err(|_| err("coefficient is not an integer"))?);
        }
    }
    let mut cycle = Vec::new();
    for t in cycle_str.split(',') {
        cycle.push(t.parse().map_err(|_| err("cycle coefficient is not an integer"))?);
    }
    CfStream::eventually_periodic(head, cycle)
}

fn parse_dec(s: &str) -> Result<(BigRational, BigRational)> {
    match s.split_once('~') {
        Some((v, e)) => Ok((parse_decimal(v)?, parse_decimal(e)?)),
        None => Ok((parse_decimal(s)?, BigRational::zero())),
    }
}

/// Decimal literal with optional exponent: 0.381, 1e-10, 2.5e-9, -3.
fn parse_decimal(s: &str) -> Result<BigRational> {
    let err = || Error::InvalidInput(format!("bad decimal literal {s:?}"));
    let lower = s.to_ascii_lowercase();
    let (mant, exp) = match lower.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| err())?),
        None => (lower.as_str(), 0),
    };
    let (sign, digits) = match mant.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let joined = format!("{int_part}{frac_part}");
    let num: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().map_err(|_| err())? };
    let mut value = BigRational::new(num * sign, pow10(frac_part.len() as u64));
    if exp >= 0 {
        value *= BigRational::from_integer(pow10(exp as u64));
    } else {
        value /= BigRational::from_integer(pow10(-exp as u64));
    }
    Ok(value)
}

fn pow10(k: u64) -> BigInt {
    num_traits::pow::pow(BigInt::from(10), k as usize)
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Surd(x) => {
                if let Some(r) = x.as_rational() {
                    return write!(f, "surd:({})/{}", r.numer(), r.denom());
                }
                let (a, b) = (x.rational_part(), x.surd_part());
                let r = num_integer::Integer::lcm(a.denom(), b.denom());
                let p = a.numer() * (&r / a.denom());
                let q = b.numer() * (&r / b.denom());
                let sign = if q.is_negative() { "-" } else { "+" };
                write!(f, "surd:({p}{sign}{}*sqrt({}))/{r}", q.abs(), x.radicand())
            }
            Slope::Cf(cf) => write!(f, "cf:{}", cf.render()),
            Slope::Decimal { value, err } => {
                write!(f, "dec:{}~{}", decimal_string(value, 40), sci_string(err))
            }
        }
    }
}

impl fmt::Display for Intercept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Intercept::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Intercept::Surd(s) => write!(f, "{s:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Slope {
        Slope::parse("surd:(3-1*sqrt(5))/2").unwrap()
    }

    #[test]
    fn frozen_floors_of_the_golden_slope() {
        let a = golden();
        let zero = Intercept::zero();
        assert_eq!(a.floor_linear(&BigInt::from(5), &zero).unwrap(), BigInt::from(1));
        assert_eq!(a.floor_linear(&BigInt::from(13), &zero).unwrap(), BigInt::from(4));
        assert_eq!(a.floor_linear(&BigInt::zero(), &zero).unwrap(), BigInt::zero());
    }

    #[test]
    fn surd_syntax_variants_parse_to_the_same_value() {
        let forms = [
            "surd:(3-1*sqrt(5))/2",
            "surd:(3-sqrt(5))/2",
            "surd: (3 - 1*sqrt(5)) / 2",
        ];
        let zero = Intercept::zero();
        for f in forms {
            let s = Slope::parse(f).unwrap();
            for n in [1i64, 7, 13, 100] {
                assert_eq!(
                    s.floor_linear(&BigInt::from(n), &zero).unwrap(),
                    golden().floor_linear(&BigInt::from(n), &zero).unwrap(),
                    "{f} at n = {n}"
                );
            }
        }
        // Bare coefficient and negative rational part.
        let h = Slope::parse("surd:(sqrt(2))/2").unwrap();
        assert_eq!(h.floor_linear(&BigInt::from(10), &zero).unwrap(), BigInt::from(7)); // 10*0.7071...
        let t = Slope::parse("surd:(-1+1*sqrt(2))/1").unwrap();
        assert_eq!(t.floor_linear(&BigInt::from(10), &zero).unwrap(), BigInt::from(4)); // 10*0.4142...
    }

    #[test]
    fn three_representations_agree_on_floors() {
        let surd = golden();
        let cf = Slope::parse("cf:[0;2,(1)]").unwrap();
        let dec = Slope::parse("dec:0.3819660112~1e-10").unwrap();
        let rho = Intercept::rational(1, 3);
        for n in 0..200i64 {
            let n = BigInt::from(n);
            let want = surd.floor_linear(&n, &rho).unwrap();
            assert_eq!(cf.floor_linear(&n, &rho).unwrap(), want, "cf at n = {n}");
            if n < BigInt::from(60) {
                assert_eq!(dec.floor_linear(&n, &rho).unwrap(), want, "dec at n = {n}");
            }
            let want_ceil = surd.ceil_linear(&n, &rho).unwrap();
            assert_eq!(cf.ceil_linear(&n, &rho).unwrap(), want_ceil, "cf ceil at n = {n}");
        }
    }

    #[test]
    fn decimal_slope_refuses_undecidable_floors() {
        // F_25 = 75025 multiplies the golden slope to within ~8e-6 of an
        // integer, far inside a 1e-8 uncertainty scaled by n.
        let dec = Slope::parse("dec:0.38196601~1e-8").unwrap();
        let res = dec.floor_linear(&BigInt::from(75_025), &Intercept::zero());
        assert!(matches!(res, Err(Error::InequalityUnresolved { .. })), "{res:?}");
    }

    #[test]
    fn surd_intercepts_shift_exactly() {
        // floor(n a + {m a}) = floor((n + m) a) - floor(m a)
        let x = QuadraticSurd::new(3, -1, 5, 2).unwrap();
        let a = golden();
        for m in 1i64..8 {
            let ma = x.mul_bigint(&BigInt::from(m));
            let rho = Intercept::Surd(ma.fract());
            let shift = ma.floor();
            for n in 0i64..50 {
                let lhs = a.floor_linear(&BigInt::from(n), &rho).unwrap();
                let rhs = a.floor_linear(&BigInt::from(n + m), &Intercept::zero()).unwrap() - &shift;
                assert_eq!(lhs, rhs, "m = {m}, n = {n}");
            }
        }
    }

    #[test]
    fn convergents_and_comparisons() {
        let a = golden();
        assert_eq!(a.convergent(1).unwrap(), (BigInt::one(), BigInt::from(2)));
        assert_eq!(a.convergent(2).unwrap(), (BigInt::one(), BigInt::from(3)));
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        let two_fifths = BigRational::new(BigInt::from(2), BigInt::from(5));
        assert_eq!(a.cmp_rational(&third).unwrap(), Ordering::Greater);
        assert_eq!(a.cmp_rational(&two_fifths).unwrap(), Ordering::Less);
        let cf = Slope::parse("cf:[0;2,(1)]").unwrap();
        assert_eq!(cf.cmp_rational(&third).unwrap(), Ordering::Greater);
        assert_eq!(cf.cmp_rational(&two_fifths).unwrap(), Ordering::Less);
        let dec = Slope::parse("dec:0.3819660112~1e-10").unwrap();
        assert_eq!(dec.cmp_rational(&third).unwrap(), Ordering::Greater);
        let inside = BigRational::new(BigInt::from(38_196_601_125i64), BigInt::from(100_000_000_000i64));
        assert!(dec.cmp_rational(&inside).is_err());
    }

    #[test]
    fn display_round_trips_through_parse() {
        for src in ["surd:(3-1*sqrt(5))/2", "cf:[0;2,(1)]", "dec:0.3819660112~1e-10"] {
            let s = Slope::parse(src).unwrap();
            let back = Slope::parse(&s.to_string()).unwrap();
            let zero = Intercept::zero();
            for n in [1i64, 9, 21] {
                assert_eq!(
                    s.floor_linear(&BigInt::from(n), &zero).unwrap(),
                    back.floor_linear(&BigInt::from(n), &zero).unwrap(),
                    "{src} at n = {n}"
                );
            }
        }
    }

    #[test]
    fn out_of_range_and_rational_slopes_are_rejected() {
        assert!(Slope::parse("surd:(3+1*sqrt(5))/2").is_err()); // ~2.62
        assert!(Slope::parse("cf:[1;(2)]").is_err()); // > 1
        assert!(Slope::parse("dec:0.5~0.6").is_err()); // interval escapes (0,1)
        assert!(Slope::parse("dec:0.5~-0.1").is_err());
        assert!(Slope::parse("plain:0.5").is_err());
        assert!(Slope::parse("surd:(1+sqrt(-5))/3").is_err());
        // Provably rational values are rejected: the definitions served by
        // slopes are vacuous there.
        assert!(Slope::parse("dec:0.5~0").is_err());
        assert!(Slope::parse("surd:(1)/3").is_err());
        assert!(Slope::parse("surd:(1+1*sqrt(49))/16").is_err()); // = 1/2
    }

    #[test]
    fn intercepts_normalize_into_the_unit_interval() {
        let r = Intercept::rational(-3, 7).normalized();
        match &r {
            Intercept::Rational(v) => assert_eq!(v, &BigRational::new(4.into(), 7.into())),
            _ => panic!("expected rational"),
        }
        let s = Intercept::Surd(QuadraticSurd::new(3, 1, 2, 1).unwrap()).normalized(); // 3+sqrt(2) -> 0.414...
        match &s {
            Intercept::Surd(v) => {
                assert_eq!(v.floor(), BigInt::zero());
                assert_eq!(v.signum(), 1);
            }
            _ => panic!("expected surd"),
        }
    }

    #[test]
    fn enclosures_agree_across_representations() {
        let a = golden().to_ball(128).unwrap();
        let b = Slope::parse("cf:[0;2,(1)]").unwrap().to_ball(128).unwrap();
        let c = Slope::parse("dec:0.3819660112~1e-10").unwrap().to_ball(128).unwrap();
        assert!(a.intersect(&b).is_some());
        assert!(a.intersect(&c).is_some());
        assert!(c.rad_log2().unwrap_or(i64::MIN) <= -30); // limited by the stated 1e-10, not by bits
        assert!(a.rad_log2().unwrap_or(i64::MIN) < -120);
    }
}

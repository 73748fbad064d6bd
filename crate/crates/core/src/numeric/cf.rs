use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ball::RealBall;
use super::dyadic::{Dyadic, Round};
use super::surd::{QuadraticSurd, SurdCfState};
use crate::error::{Error, Result};

const MAX_CF_DEPTH: u64 = 60_000;

/// Simple continued fraction [a0; a1, a2, ...], always infinite, so the
/// represented number is irrational and affine floors are decidable.
pub struct CfStream {
    source: CfSource,
    cache: Mutex<Vec<BigInt>>,
}

enum CfSource {
    /// head = [a0, ...], then cycle repeats forever.
    Eventually { head: Vec<BigInt>, cycle: Vec<BigInt> },
    /// Pure function from coefficient index to value.
    Program(Box<dyn Fn(u64) -> BigInt + Send + Sync>),
    /// Exact quadratic-irrational recurrence; inherently sequential.
    Surd(Mutex<SurdCfState>),
}

impl CfStream {
    pub fn eventually_periodic(head: Vec<BigInt>, cycle: Vec<BigInt>) -> Result<Self> {
        if head.is_empty() {
            return Err(Error::InvalidInput("continued fraction needs a leading coefficient".into()));
        }
        if cycle.is_empty() {
            return Err(Error::InvalidInput(
                "continued fraction cycle is empty; finite expansions are rational".into(),
            ));
        }
        for a in head.iter().skip(1).chain(cycle.iter()) {
            if a < &BigInt::one() {
                return Err(Error::InvalidInput(format!("partial quotient {a} < 1")));
            }
        }
        Ok(CfStream { source: CfSource::Eventually { head, cycle }, cache: Mutex::new(Vec::new()) })
    }

    pub fn from_program<F>(f: F) -> Self
    where
        F: Fn(u64) -> BigInt + Send + Sync + 'static,
    {
        CfStream { source: CfSource::Program(Box::new(f)), cache: Mutex::new(Vec::new()) }
    }

    pub fn from_surd(x: &QuadraticSurd) -> Result<Self> {
        Ok(CfStream { source: CfSource::Surd(Mutex::new(x.cf_state()?)), cache: Mutex::new(Vec::new()) })
    }

    pub fn coeff(&self, k: u64) -> Result<BigInt> {
        match &self.source {
            CfSource::Eventually { head, cycle } => {
                let k = k as usize;
                if k < head.len() {
                    Ok(head[k].clone())
                } else {
                    Ok(cycle[(k - head.len()) % cycle.len()].clone())
                }
            }
            CfSource::Program(f) => {
                let mut cache = self.cache.lock().unwrap();
                while cache.len() as u64 <= k {
                    let i = cache.len() as u64;
                    let a = f(i);
                    if i > 0 && a < BigInt::one() {
                        return Err(Error::InvalidInput(format!("partial quotient {a} < 1 at index {i}")));
                    }
                    cache.push(a);
                }
                Ok(cache[k as usize].clone())
            }
            CfSource::Surd(state) => {
                let mut cache = self.cache.lock().unwrap();
                let mut state = state.lock().unwrap();
                while cache.len() as u64 <= k {
                    cache.push(state.next_coeff());
                }
                Ok(cache[k as usize].clone())
            }
        }
    }

    /// Parseable text for the eventually periodic form; a marker otherwise.
    pub fn render(&self) -> String {
        match &self.source {
            CfSource::Eventually { head, cycle } => {
                let mut out = format!("[{}", head[0]);
                out.push(';');
                for (i, a) in head.iter().skip(1).enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&a.to_string());
                }
                if head.len() > 1 {
                    out.push(',');
                }
                out.push('(');
                for (i, a) in cycle.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&a.to_string());
                }
                out.push_str(")]");
                out
            }
            CfSource::Program(_) => "[program]".into(),
            CfSource::Surd(_) => "[surd]".into(),
        }
    }

    pub fn walk(&self) -> ConvergentWalk<'_> {
        ConvergentWalk {
            cf: self,
            k: 0,
            p_prev: BigInt::zero(),
            q_prev: BigInt::one(),
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    /// k-th convergent p_k / q_k (k counts from 0, so c_0 = a0 / 1).
    pub fn convergent(&self, k: u64) -> Result<(BigInt, BigInt)> {
        let mut walk = self.walk();
        let mut last = walk.advance()?;
        for _ in 0..k {
            last = walk.advance()?;
        }
        Ok(last)
    }

    /// floor(n * x + rho), decided by squeezing x between consecutive
    /// convergents, which straddle it strictly.
    pub fn floor_affine(&self, n: &BigInt, rho: &BigRational) -> Result<BigInt> {
        if n.is_zero() {
            return Ok(rho.floor().to_integer());
        }
        let n = BigRational::from_integer(n.clone());
        let mut walk = self.walk();
        let (p0, q0) = walk.advance()?;
        let mut prev = BigRational::new(p0, q0);
        loop {
            let (p, q) = walk.advance()?;
            let cur = BigRational::new(p, q);
            let v1 = &n * &prev + rho;
            let v2 = &n * &cur + rho;
            let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
            let f = lo.floor().to_integer();
            if f == hi.floor().to_integer() {
                return Ok(f);
            }
            if walk.k > MAX_CF_DEPTH {
                return Err(Error::PrecisionExhausted {
                    context: "continued-fraction floor",
                    bits: walk.k as u32,
                });
            }
            prev = cur;
        }
    }

    pub fn ceil_affine(&self, n: &BigInt, rho: &BigRational) -> Result<BigInt> {
        Ok(-self.floor_affine(&-n.clone(), &-rho.clone())?)
    }

    /// Certified enclosure: consecutive convergents bracket the value and
    /// differ by exactly 1/(q_{k-1} q_k).
    pub fn to_ball(&self, bits: u64) -> Result<RealBall> {
        let mut walk = self.walk();
        let (p0, q0) = walk.advance()?;
        let mut prev = (p0, q0);
        loop {
            let cur = walk.advance()?;
            let gap_ok = (&prev.1 * &cur.1).bits() >= bits + 4;
            if gap_ok {
                let a = BigRational::new(prev.0.clone(), prev.1.clone());
                let b = BigRational::new(cur.0.clone(), cur.1.clone());
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let (dlo, _) = Dyadic::from_ratio(lo.numer(), lo.denom(), bits + 8, Round::Floor);
                let (dhi, _) = Dyadic::from_ratio(hi.numer(), hi.denom(), bits + 8, Round::Ceil);
                return Ok(RealBall::from_endpoints(&dlo, &dhi).rounded(bits));
            }
            if walk.k > MAX_CF_DEPTH {
                return Err(Error::PrecisionExhausted { context: "continued-fraction enclosure", bits: bits as u32 });
            }
            prev = cur;
        }
    }
}

/// Streaming convergent recurrence p_k = a_k p_{k-1} + p_{k-2}.
pub struct ConvergentWalk<'a> {
    cf: &'a CfStream,
    k: u64,
    p_prev: BigInt,
    q_prev: BigInt,
    p: BigInt,
    q: BigInt,
}

impl ConvergentWalk<'_> {
    /// Produce the next convergent (p_k, q_k), starting at k = 0.
    pub fn advance(&mut self) -> Result<(BigInt, BigInt)> {
        let a = self.cf.coeff(self.k)?;
        let p_new = &a * &self.p + &self.p_prev;
        let q_new = &a * &self.q + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p_new);
        self.q_prev = std::mem::replace(&mut self.q, q_new);
        self.k += 1;
        Ok((self.p.clone(), self.q.clone()))
    }

    pub fn index(&self) -> u64 {
        self.k
    }
}

impl fmt::Debug for CfStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            CfSource::Eventually { head, cycle } => write!(f, "Cf{{head: {head:?}, cycle: {cycle:?}}}"),
            CfSource::Program(_) => write!(f, "Cf{{program}}"),
            CfSource::Surd(_) => write!(f, "Cf{{surd}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn golden_slope_cf() -> CfStream {
        // (3 - sqrt(5))/2 = [0; 2, 1, 1, 1, ...]
        CfStream::eventually_periodic(vec![BigInt::zero(), BigInt::from(2)], vec![BigInt::one()]).unwrap()
    }

    fn golden_slope_surd() -> QuadraticSurd {
        QuadraticSurd::new(3, -1, 5, 2).unwrap()
    }

    #[test]
    fn convergents_follow_the_recurrence() {
        let cf = golden_slope_cf();
        // Fibonacci quotients: 0/1, 1/2, 1/3, 2/5, 3/8, 5/13, 8/21
        let expect = [(0, 1), (1, 2), (1, 3), (2, 5), (3, 8), (5, 13), (8, 21)];
        for (k, (p, q)) in expect.iter().enumerate() {
            let (pk, qk) = cf.convergent(k as u64).unwrap();
            assert_eq!((pk, qk), (BigInt::from(*p), BigInt::from(*q)), "k = {k}");
        }
    }

    #[test]
    fn surd_source_agrees_with_the_periodic_form() {
        let cf = golden_slope_cf();
        let from_surd = CfStream::from_surd(&golden_slope_surd()).unwrap();
        for k in 0..25 {
            assert_eq!(cf.coeff(k).unwrap(), from_surd.coeff(k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn convergents_approximate_to_quadratic_order() {
        // |x - p/q| < 1/q^2, checked exactly against the surd value.
        let cf = golden_slope_cf();
        let x = golden_slope_surd();
        for k in 1..20 {
            let (p, q) = cf.convergent(k).unwrap();
            let c = BigRational::new(p, q.clone());
            let bound = BigRational::new(BigInt::one(), &q * &q);
            assert_eq!(x.cmp_rational(&(&c - &bound)), Ordering::Greater, "k = {k}");
            assert_eq!(x.cmp_rational(&(&c + &bound)), Ordering::Less, "k = {k}");
        }
    }

    #[test]
    fn affine_floors_match_exact_surd_floors() {
        let cf = golden_slope_cf();
        let x = golden_slope_surd();
        let rhos = [
            BigRational::zero(),
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::new(BigInt::from(-3), BigInt::from(7)),
        ];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..120 {
            let n = BigInt::from((next() % 4001) as i64 - 2000);
            for rho in &rhos {
                let want = x.mul_bigint(&n).add_rational(rho).floor();
                assert_eq!(cf.floor_affine(&n, rho).unwrap(), want, "n = {n}, rho = {rho}");
                let want_ceil = x.mul_bigint(&n).add_rational(rho).ceil();
                assert_eq!(cf.ceil_affine(&n, rho).unwrap(), want_ceil, "n = {n}, rho = {rho}");
            }
        }
    }

    #[test]
    fn program_source_reproduces_e() {
        // e = [2; 1, 2, 1, 1, 4, 1, 1, 6, 1, ...]
        let cf = CfStream::from_program(|k| {
            if k == 0 {
                BigInt::from(2)
            } else if k % 3 == 2 {
                BigInt::from(2 * (k + 1) / 3)
            } else {
                BigInt::one()
            }
        });
        let (p, q) = cf.convergent(5).unwrap();
        assert_eq!((p, q), (BigInt::from(87), BigInt::from(32)));
        let ball = cf.to_ball(96).unwrap();
        assert!((ball.to_f64_lossy() - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn enclosures_are_consistent_with_the_surd_route() {
        let cf = golden_slope_cf();
        let a = cf.to_ball(160).unwrap();
        let b = golden_slope_surd().to_ball(160);
        assert!(a.intersect(&b).is_some(), "independent enclosures must overlap");
        assert!(a.rad_log2().unwrap_or(i64::MIN) < -150);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(CfStream::eventually_periodic(vec![BigInt::zero()], vec![]).is_err());
        assert!(CfStream::eventually_periodic(vec![BigInt::zero(), BigInt::zero()], vec![BigInt::one()]).is_err());
        let bad = CfStream::from_program(|_| BigInt::zero());
        assert!(bad.coeff(3).is_err());
    }
}

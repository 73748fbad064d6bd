//! β-transformation dynamics: greedy digit expansions, Parry admissibility,
//! root solving for admissible words, orbits of 1, and shift-class evidence.

pub mod classify;
pub mod expansion;
pub mod orbit;
pub mod solve;

pub use classify::{is_sturmian_number, classify, ClassEvidence, ClassVerdict, ClassWitness, SturmianEvidence, SturmianVerdict};
pub use expansion::{
    d_beta, d_beta_rational, is_admissible, is_expansion_of_one, parry_bound, quasi_greedy,
    t_beta_step, Admissibility, ExpansionVerdict,
};
pub use orbit::{diam_estimate, orbit, orbit_from, OrbitRecord};
pub use solve::{solve_beta, sturmian_beta};

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::numeric::{QuadraticSurd, RealBall};
use crate::words::DigitWord;

/// Working-precision policy for digit-extraction ladders: attempts start at
/// `start_bits`, double on an unresolved comparison, and give up past
/// `ceiling_bits`.
#[derive(Clone, Debug)]
pub struct Precision {
    pub start_bits: u64,
    pub ceiling_bits: u64,
}

pub const DEFAULT_START_BITS: u64 = 128;
pub const DEFAULT_CEILING_BITS: u64 = 16_384;

/// Environment override for the ladder ceiling, read by `Precision::from_env`.
pub const CEILING_ENV_VAR: &str = "STURMIAN_MAX_BITS";

impl Default for Precision {
    fn default() -> Self {
        Precision { start_bits: DEFAULT_START_BITS, ceiling_bits: DEFAULT_CEILING_BITS }
    }
}

impl Precision {
    pub fn with_ceiling(ceiling_bits: u64) -> Self {
        Precision { start_bits: DEFAULT_START_BITS.min(ceiling_bits), ceiling_bits }
    }

    /// Fixed working precision: no ladder, one attempt.
    pub fn exact(bits: u64) -> Self {
        Precision { start_bits: bits, ceiling_bits: bits }
    }

    /// Default policy with the ceiling taken from the environment when set.
    pub fn from_env() -> Self {
        match std::env::var(CEILING_ENV_VAR).ok().and_then(|v| v.parse::<u64>().ok()) {
            Some(c) if c >= 32 => Precision::with_ceiling(c),
            _ => Precision::default(),
        }
    }
}

/// How a β value is represented; everything downstream branches on whether
/// exact arithmetic is available.
#[derive(Clone)]
pub enum BetaSource {
    Integer(BigInt),
    Algebraic(QuadraticSurd),
    /// Unique root > 1 of 1 = Σ digits(n)·x^{-(n+1)}.
    SeriesRoot(DigitWord),
}

/// A real β > 1 with a certified, refinable enclosure, its integer part, and
/// the memoized digit expansion of 1.
pub struct BetaNumber {
    source: BetaSource,
    floor: BigInt,
    enclosure: Mutex<RealBall>,
    expansion: Mutex<Option<DigitWord>>,
}

impl Clone for BetaNumber {
    fn clone(&self) -> Self {
        BetaNumber {
            source: self.source.clone(),
            floor: self.floor.clone(),
            enclosure: Mutex::new(self.enclosure.lock().unwrap().clone()),
            expansion: Mutex::new(self.expansion.lock().unwrap().clone()),
        }
    }
}

impl BetaNumber {
    pub fn integer(n: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("integer beta must be >= 2, got {n}")));
        }
        let n = BigInt::from(n);
        Ok(BetaNumber {
            floor: n.clone(),
            enclosure: Mutex::new(RealBall::from_bigint(&n)),
            source: BetaSource::Integer(n),
            expansion: Mutex::new(None),
        })
    }

    pub fn surd(x: QuadraticSurd) -> Result<Self> {
        use num_rational::BigRational;
        if x.cmp_rational(&BigRational::one()) != std::cmp::Ordering::Greater {
            return Err(Error::InvalidInput("beta must exceed 1".into()));
        }
        if let Some(r) = x.as_rational() {
            if r.is_integer() {
                let n = r.to_integer();
                return Ok(BetaNumber {
                    floor: n.clone(),
                    enclosure: Mutex::new(RealBall::from_bigint(&n)),
                    source: BetaSource::Integer(n),
                    expansion: Mutex::new(None),
                });
            }
        }
        let floor = x.floor();
        Ok(BetaNumber {
            floor,
            enclosure: Mutex::new(x.to_ball(96)),
            source: BetaSource::Algebraic(x),
            expansion: Mutex::new(None),
        })
    }

    pub(crate) fn from_series_root(digits: DigitWord, floor: BigInt, ball: RealBall) -> Self {
        BetaNumber {
            floor,
            enclosure: Mutex::new(ball),
            source: BetaSource::SeriesRoot(digits),
            expansion: Mutex::new(None),
        }
    }

    /// `surd:(p+q*sqrt(d))/r` or a bare integer ≥ 2.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = compact.strip_prefix("surd:") {
            BetaNumber::surd(crate::numeric::slope::parse_surd(rest)?)
        } else if let Ok(n) = compact.parse::<i64>() {
            BetaNumber::integer(n)
        } else {
            Err(Error::InvalidInput(format!(
                "beta must be surd:(p+q*sqrt(d))/r or an integer >= 2 (got {s:?})"
            )))
        }
    }

    pub fn source(&self) -> &BetaSource {
        &self.source
    }

    pub fn floor(&self) -> &BigInt {
        &self.floor
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.source, BetaSource::Integer(_))
    }

    /// Largest digit that can appear in any β-expansion: ⌊β⌋.
    pub fn alphabet_bound(&self) -> u32 {
        self.floor.to_u32().expect("beta floor exceeds the digit range")
    }

    /// Certified enclosure with radius at most 2^-bits, refining the cached
    /// ball on demand.
    pub fn enclosure(&self, bits: u64) -> Result<RealBall> {
        let mut cached = self.enclosure.lock().unwrap();
        if cached.rad_log2().map_or(cached.is_exact(), |r| r <= -(bits as i64)) {
            return Ok(cached.clone());
        }
        let refined = match &self.source {
            BetaSource::Integer(n) => RealBall::from_bigint(n),
            BetaSource::Algebraic(x) => x.to_ball(bits + 8),
            BetaSource::SeriesRoot(w) => solve::refine_enclosure(w, &cached, bits)?,
        };
        debug_assert!(refined.intersect(&cached).is_some());
        *cached = refined.clone();
        Ok(refined)
    }

    /// The digit expansion of 1: the stored word for series roots, the exact
    /// greedy orbit for integer and quadratic β ("β then zeros" for
    /// integers).
    pub fn expansion_of_one(&self) -> DigitWord {
        let mut memo = self.expansion.lock().unwrap();
        if let Some(w) = memo.as_ref() {
            return w.clone();
        }
        let w = match &self.source {
            BetaSource::Integer(n) => {
                let digit = n.to_u32().expect("integer beta digit range");
                DigitWord::from_fn(vec![0, digit], None, move |k| Ok(if k == 0 { digit } else { 0 }))
            }
            BetaSource::Algebraic(x) => {
                let beta = x.clone();
                let bound = self.alphabet_bound();
                let state = Mutex::new(QuadraticSurd::from_bigint(BigInt::one()));
                DigitWord::from_fn((0..=bound).collect(), None, move |_| {
                    let mut s = state.lock().unwrap();
                    let y = beta.mul(&s);
                    let d = y.floor();
                    *s = y.sub_bigint(&d);
                    debug_assert!(!d.is_negative());
                    Ok(d.to_u32().expect("greedy digit exceeds the alphabet bound"))
                })
            }
            BetaSource::SeriesRoot(w) => w.clone(),
        };
        *memo = Some(w.clone());
        w
    }

    /// Certified order between two β values, refining both enclosures until
    /// the balls separate.
    pub fn cmp(&self, other: &BetaNumber) -> Result<std::cmp::Ordering> {
        if let (BetaSource::Integer(a), BetaSource::Integer(b)) = (&self.source, &other.source) {
            return Ok(a.cmp(b));
        }
        if let (BetaSource::Algebraic(a), BetaSource::Algebraic(b)) = (&self.source, &other.source) {
            if a.radicand() == b.radicand() || a.is_rational() || b.is_rational() {
                return Ok(a.sub(b).signum().cmp(&0));
            }
        }
        let mut bits = 64;
        while bits <= 16_384 {
            let (x, y) = (self.enclosure(bits)?, other.enclosure(bits)?);
            if let Some(ord) = x.cmp_certain(&y) {
                return Ok(ord);
            }
            bits *= 2;
        }
        Err(Error::InequalityUnresolved { context: "ordering two beta values" })
    }

    /// Ball for 1 - 1/β at the given precision.
    pub fn one_minus_recip(&self, bits: u64) -> Result<RealBall> {
        let e = self.enclosure(bits + 8)?;
        Ok(RealBall::one().sub(&e.recip(bits + 8)?, bits))
    }

    /// Crude upper estimate of log2 β used only to size working precision;
    /// certified arithmetic never depends on it.
    pub(crate) fn log2_hint(&self) -> f64 {
        let ball = self.enclosure.lock().unwrap().clone();
        let hi = ball.upper_bound().to_f64_lossy();
        if hi.is_finite() && hi > 1.0 {
            hi.log2() + 1e-6
        } else {
            let f = self.floor.to_f64().unwrap_or(1.0).max(1.0);
            (f + 1.0).log2()
        }
    }

    /// Crude lower estimate of log2 β, clamped away from zero.
    pub(crate) fn log2_lower_hint(&self) -> f64 {
        let ball = self.enclosure.lock().unwrap().clone();
        let lo = ball.lower_bound().to_f64_lossy();
        if lo.is_finite() && lo > 1.0 {
            lo.log2().max(1e-3)
        } else {
            1e-3
        }
    }
}

impl std::fmt::Debug for BetaNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ball = self.enclosure.lock().unwrap();
        let kind = match self.source {
            BetaSource::Integer(_) => "integer",
            BetaSource::Algebraic(_) => "algebraic",
            BetaSource::SeriesRoot(_) => "series-root",
        };
        write!(f, "BetaNumber[{kind}] ~ {}", ball.to_f64_lossy())
    }
}

fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<BetaNumber>();
}

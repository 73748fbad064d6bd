//! End-to-end verification battery: nine criteria spanning word generation,
//! root solving, orbit dynamics, the invariant measure, and the series
//! identity.  The `check` command runs it verbatim; the `acceptance` test
//! target wraps the same table with runtime budgets.

use std::cmp::Ordering;
use std::time::Instant;

use num_bigint::BigInt;

use crate::beta::{
    d_beta, diam_estimate, is_admissible, orbit, sturmian_beta, Admissibility, BetaNumber,
    Precision,
};
use crate::error::Error;
use crate::mahler::identity_check;
use crate::numeric::{Dyadic, Intercept, QuadraticSurd, RealBall, Round, Slope};
use crate::parry::{birkhoff_samples, frequency_report, ProofCase};
use crate::words::{
    characteristic, complexity, fibonacci_word, is_balanced, lower_mechanical, upper_mechanical,
    Balance, DigitWord, LexVerdict,
};

pub struct Criterion {
    pub number: u32,
    pub name: &'static str,
    /// Wall-clock budget in seconds, enforced by the acceptance gate.
    pub budget: Option<f64>,
    pub run: fn() -> Result<String, String>,
}

pub struct Outcome {
    pub number: u32,
    pub name: &'static str,
    pub budget: Option<f64>,
    /// Ok holds a one-line detail, Err the failure reason.
    pub result: Result<String, String>,
    pub seconds: f64,
}

impl Criterion {
    pub fn run(&self) -> Outcome {
        let t0 = Instant::now();
        let result = (self.run)();
        Outcome {
            number: self.number,
            name: self.name,
            budget: self.budget,
            result,
            seconds: t0.elapsed().as_secs_f64(),
        }
    }
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }

    /// Deterministic pass/fail line (no timing), one per criterion.
    pub fn line(&self) -> String {
        match &self.result {
            Ok(detail) if detail.is_empty() => {
                format!("criterion {} ({}): PASS", self.number, self.name)
            }
            Ok(detail) => format!("criterion {} ({}): PASS — {detail}", self.number, self.name),
            Err(why) => format!("criterion {} ({}): FAIL — {why}", self.number, self.name),
        }
    }
}

pub const CRITERIA: [Criterion; 9] = [
    Criterion { number: 1, name: "fibonacci prefix", budget: Some(1.0), run: fibonacci_prefix },
    Criterion { number: 2, name: "orbit extremes", budget: Some(5.0), run: orbit_extremes },
    Criterion { number: 3, name: "solve/expand round trip", budget: Some(60.0), run: round_trip },
    Criterion {
        number: 4,
        name: "orbit confinement",
        budget: Some(120.0),
        run: orbit_confinement,
    },
    Criterion {
        number: 5,
        name: "complexity and balance",
        budget: Some(60.0),
        run: complexity_and_balance,
    },
    Criterion { number: 6, name: "order laws", budget: None, run: order_laws },
    Criterion { number: 7, name: "three-route identity", budget: Some(30.0), run: identity },
    Criterion {
        number: 8,
        name: "frequency defects and Birkhoff averages",
        budget: Some(300.0),
        run: frequency_defects,
    },
    Criterion {
        number: 9,
        name: "admissibility vs forbidden-factor oracle",
        budget: Some(10.0),
        run: admissibility_oracle,
    },
];

const FIB_34: &str = "0100101001001010010100100101001001";

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fail(e: impl std::fmt::Debug) -> String {
    format!("{e:?}")
}

fn golden_slope() -> Slope {
    Slope::parse("surd:(3-1*sqrt(5))/2").unwrap()
}

fn test_slopes() -> Vec<(Slope, &'static str)> {
    vec![
        (golden_slope(), "(3-sqrt5)/2"),
        (Slope::parse("surd:(-1+1*sqrt(2))/1").unwrap(), "sqrt2-1"),
        (Slope::parse("surd:(-1+1*sqrt(3))/2").unwrap(), "(sqrt3-1)/2"),
    ]
}

fn xorshift(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

fn fibonacci_prefix() -> Result<String, String> {
    let fib = fibonacci_word(34).prefix_string(34).map_err(fail)?;
    ensure!(fib == FIB_34, "fibonacci_word(34) = {fib}, expected {FIB_34}");
    let c = characteristic(&golden_slope()).prefix_string(34).map_err(fail)?;
    ensure!(c == FIB_34, "characteristic prefix = {c}, expected {FIB_34}");
    // the lower mechanical word prepends the floor-at-zero letter
    let lower =
        lower_mechanical(&golden_slope(), &Intercept::zero()).prefix_string(35).map_err(fail)?;
    ensure!(lower == format!("0{FIB_34}"), "lower mechanical = {lower}, expected 0{FIB_34}");
    Ok(String::new())
}

fn orbit_extremes() -> Result<String, String> {
    let alpha = golden_slope();
    let upper = upper_mechanical(&alpha, &Intercept::zero());
    let lower = lower_mechanical(&alpha, &Intercept::zero());
    let up = upper.prefix_string(26).map_err(fail)?;
    ensure!(up == "10100101001001010010100100", "upper prefix = {up}");
    let low = lower.prefix_string(26).map_err(fail)?;
    ensure!(low == "00100101001001010010100100", "lower prefix = {low}");
    for n in 1..=1000u64 {
        let shifted = upper.shift(n);
        let below = lower.lex_compare(&shifted, 4000).map_err(fail)?;
        ensure!(below == LexVerdict::Less, "0c vs shift {n}: {below:?}");
        let above = shifted.lex_compare(&upper, 4000).map_err(fail)?;
        ensure!(above == LexVerdict::Less, "shift {n} vs 1c: {above:?}");
    }
    Ok("1000 shifts strictly inside (0c, 1c)".into())
}

fn round_trip() -> Result<String, String> {
    let mut solved = 0u32;
    for (a, b) in [(0u32, 1u32), (1, 3)] {
        for (alpha, tag) in test_slopes() {
            let word = upper_mechanical(&alpha, &Intercept::zero()).rename(a, b).map_err(fail)?;
            let beta = sturmian_beta(&alpha, a, b, 192, 32).map_err(fail)?;
            let expanded =
                d_beta(&beta, &|_| Ok(RealBall::one()), 2000, &Precision::with_ceiling(1 << 14))
                    .map_err(fail)?;
            let got = expanded.prefix(2000).map_err(fail)?;
            let want = word.prefix(2000).map_err(fail)?;
            ensure!(
                got == want,
                "({tag}, {a}, {b}): d_β(1) deviates at {:?}",
                got.iter().zip(want.iter()).position(|(x, y)| x != y)
            );
            solved += 1;
        }
    }
    Ok(format!("{solved} (slope, a, b) round trips at 2000 digits"))
}

fn orbit_confinement() -> Result<String, String> {
    let n = 10_000u64;
    let beta = sturmian_beta(&golden_slope(), 0, 1, 192, 32).map_err(fail)?;
    let rec = orbit(&beta, n, 128).map_err(fail)?;
    let lb = beta.one_minus_recip(192).map_err(fail)?;
    let floor_ref = lb.lower_bound();
    for (k, p) in rec.points.iter().enumerate() {
        // ball ⊆ [1−1/β − r, 1 + r] means the midpoint sits in [1−1/β, 1]
        ensure!(
            p.mid().cmp_value(&floor_ref) != Ordering::Less,
            "orbit point {k} midpoint below 1 − 1/β"
        );
        ensure!(
            p.mid().cmp_value(&Dyadic::one()) != Ordering::Greater,
            "orbit point {k} midpoint above 1"
        );
    }
    let milli = Dyadic::from_ratio(&BigInt::from(1), &BigInt::from(1000), 64, Round::Ceil).0;

    // the true diameter approaches 1/β to within β^-thousands, so the
    // membership check must use an outer enclosure of [1/β − 10⁻³, 1/β]
    // that is coarser than the diameter ball itself
    let diam = diam_estimate(&beta, n, 128).map_err(fail)?;
    let recip = beta.enclosure(96).map_err(fail)?.recip(96).map_err(fail)?;
    ensure!(
        diam.upper_bound().cmp_value(&recip.upper_bound()) != Ordering::Greater,
        "diameter estimate exceeds 1/β"
    );
    ensure!(
        diam.lower_bound().cmp_value(&recip.lower_bound().sub(&milli)) == Ordering::Greater,
        "diameter estimate more than 10⁻³ below 1/β"
    );

    let beta2 = sturmian_beta(&golden_slope(), 1, 3, 192, 32).map_err(fail)?;
    let diam2 = diam_estimate(&beta2, n, 128).map_err(fail)?;
    let recip2 = beta2.enclosure(96).map_err(fail)?.recip(96).map_err(fail)?.shl(1);
    ensure!(
        diam2.upper_bound().cmp_value(&recip2.upper_bound()) != Ordering::Greater,
        "renamed diameter estimate exceeds 2/β"
    );
    ensure!(
        diam2.lower_bound().cmp_value(&recip2.lower_bound().sub(&milli)) == Ordering::Greater,
        "renamed diameter estimate more than 10⁻³ below 2/β"
    );
    Ok("10⁴ orbit points confined; diameters within 10⁻³ of 1/β and 2/β".into())
}

fn complexity_and_balance() -> Result<String, String> {
    let window = 100_000u64;
    for (alpha, tag) in test_slopes() {
        let w = characteristic(&alpha);
        for n in 1..=30u64 {
            let p = complexity(&w, n, window).map_err(fail)?;
            ensure!(p == n + 1, "{tag}: P({n}) = {p}, expected {}", n + 1);
        }
        match is_balanced(&w, window).map_err(fail)? {
            Balance::Balanced { .. } => {}
            Balance::Unbalanced { length, .. } => {
                return Err(format!("{tag}: unbalanced at factor length {length}"));
            }
        }
    }
    Ok("P(n) = n+1 for n ≤ 30 and balance certified at window 10⁵, all slopes".into())
}

fn order_laws() -> Result<String, String> {
    let depth = 10_000u64;
    let slopes = test_slopes();

    // intercept monotonicity: s_{α,ρ} < s_{α,ρ'} iff ρ < ρ'
    let mut state = 0x9e3779b97f4a7c15u64;
    for case in 0..200u32 {
        let (alpha, _) = &slopes[(case % 3) as usize];
        let den = 8 + (xorshift(&mut state) % 57) as i64;
        let n1 = (xorshift(&mut state) % den as u64) as i64;
        let mut n2 = (xorshift(&mut state) % den as u64) as i64;
        if n1 == n2 {
            n2 = (n2 + 1) % den;
        }
        let (lo, hi) = if n1 < n2 { (n1, n2) } else { (n2, n1) };
        let w_lo = lower_mechanical(alpha, &Intercept::rational(lo, den));
        let w_hi = lower_mechanical(alpha, &Intercept::rational(hi, den));
        let v = w_lo.lex_compare(&w_hi, depth).map_err(fail)?;
        ensure!(
            v == LexVerdict::Less,
            "case {case}: intercepts {lo}/{den} < {hi}/{den} but words compare {v:?}"
        );
    }

    // slope monotonicity: c_α < c_γ iff α < γ
    let mut checked_slopes = 0u32;
    while checked_slopes < 200 {
        let (s1, v1) = random_slope(&mut state);
        let (s2, v2) = random_slope(&mut state);
        if (v1 - v2).abs() < 4e-3 {
            continue;
        }
        let exact = s1
            .to_ball(256)
            .map_err(fail)?
            .cmp_certain(&s2.to_ball(256).map_err(fail)?)
            .ok_or_else(|| "slope comparison unresolved at 256 bits".to_string())?;
        let words = characteristic(&s1).lex_compare(&characteristic(&s2), depth).map_err(fail)?;
        let want = match exact {
            Ordering::Less => LexVerdict::Less,
            Ordering::Greater => LexVerdict::Greater,
            Ordering::Equal => return Err("distinct random slopes compared equal".into()),
        };
        ensure!(
            words == want,
            "slopes {v1:.4} vs {v2:.4}: words compare {words:?}, slopes {exact:?}"
        );
        checked_slopes += 1;
    }

    // expansion order transfers to the roots: d_β(1) < d_γ(1) iff β < γ.
    // The solver may decline a slope whose strict-shift certificate needs a
    // deeper horizon than requested (a certification refusal, not an order
    // violation); resample those, but cap how many we tolerate.
    let namings = [(0u32, 1u32), (1, 2), (1, 3), (2, 3)];
    let mut checked_roots = 0u32;
    let mut refusals = 0u32;
    while checked_roots < 200 {
        let (s1, v1) = random_slope(&mut state);
        let (s2, v2) = random_slope(&mut state);
        if (v1 - v2).abs() < 4e-3 {
            continue;
        }
        let (a, b) = namings[(xorshift(&mut state) % 4) as usize];
        let w1 = upper_mechanical(&s1, &Intercept::zero()).rename(a, b).map_err(fail)?;
        let w2 = upper_mechanical(&s2, &Intercept::zero()).rename(a, b).map_err(fail)?;
        let solved = (sturmian_beta(&s1, a, b, 128, 32), sturmian_beta(&s2, a, b, 128, 32));
        let (b1, b2) = match solved {
            (Ok(b1), Ok(b2)) => (b1, b2),
            (Err(Error::NotExpansionOfOne { .. }), _)
            | (_, Err(Error::NotExpansionOfOne { .. }))
            | (Err(Error::PrecisionExhausted { .. }), _)
            | (_, Err(Error::PrecisionExhausted { .. })) => {
                refusals += 1;
                ensure!(refusals <= 40, "solver declined {refusals} slope pairs");
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(fail(e)),
        };
        let word_order = match w1.lex_compare(&w2, depth).map_err(fail)? {
            LexVerdict::Less => Ordering::Less,
            LexVerdict::Greater => Ordering::Greater,
            LexVerdict::EqualToDepth => {
                return Err("expansions agree to depth 10⁴ for distinct slopes".into())
            }
        };
        let root_order = b1.cmp(&b2).map_err(fail)?;
        ensure!(
            word_order == root_order,
            "({a},{b}) slopes {v1:.4}/{v2:.4}: words {word_order:?} but roots {root_order:?}"
        );
        checked_roots += 1;
    }
    Ok("3 × 200 random order-law cases, zero violations at depth 10⁴".into())
}

fn random_slope(state: &mut u64) -> (Slope, f64) {
    const NONSQUARES: [u64; 12] = [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19];
    loop {
        let d = NONSQUARES[(xorshift(state) % 12) as usize];
        let r = 4 + (xorshift(state) % 28) as i64;
        let isqrt = (d as f64).sqrt().floor() as i64;
        let p = -isqrt + (xorshift(state) % r as u64) as i64;
        let value = (p as f64 + (d as f64).sqrt()) / r as f64;
        if value <= 1e-3 || value >= 1.0 - 1e-3 {
            continue;
        }
        // slopes hugging a small-denominator rational open with a long
        // quasi-periodic run, pushing certificates past any fixed horizon
        let near_rational = (1..=8i64)
            .any(|q| (value * q as f64 - (value * q as f64).round()).abs() < 5e-3 * q as f64);
        if near_rational {
            continue;
        }
        let surd = QuadraticSurd::new(p, 1, d, r).unwrap();
        match Slope::surd(surd) {
            Ok(s) => return (s, value),
            Err(_) => continue,
        }
    }
}

fn identity() -> Result<String, String> {
    // 10⁻⁴⁰ < 2⁻¹³³
    let tol = Dyadic::power_of_two(-133);
    for (a, b) in [(0u32, 1u32), (1, 3)] {
        let rep = identity_check(&golden_slope(), a, b, 512).map_err(fail)?;
        ensure!(
            rep.max_gap.cmp_value(&tol) == Ordering::Less,
            "({a},{b}): pairwise gap {} ≥ 10⁻⁴⁰",
            rep.max_gap.to_f64_lossy()
        );
    }
    Ok("pairwise gaps < 10⁻⁴⁰ at 512 bits for (0,1) and (1,3)".into())
}

fn frequency_defects() -> Result<String, String> {
    let micro = Dyadic::from_ratio(&BigInt::from(1), &BigInt::from(1_000_000), 64, Round::Ceil).0;
    let families = [
        (golden_slope(), 0u32, 1u32, ProofCase::SmallestDigitZero),
        (golden_slope(), 1, 3, ProofCase::FloorTimesSlopeAboveOne),
        (Slope::parse("surd:(3-1*sqrt(5))/4").unwrap(), 1, 4, ProofCase::FloorTimesSlopeBelowOne),
    ];
    let mut first = None;
    for (alpha, a, b, case) in families {
        let rep = frequency_report(&alpha, a, b, 2000, 160).map_err(fail)?;
        ensure!(rep.case == case, "({a},{b}) classified {:?}, expected {case:?}", rep.case);
        ensure!(rep.certified, "({a},{b}) defect not certified");
        let defect = if case == ProofCase::FloorTimesSlopeBelowOne {
            &rep.defect_a
        } else {
            &rep.defect_b
        };
        ensure!(
            defect.lower_bound().cmp_value(&micro) == Ordering::Greater,
            "({a},{b}) defect lower bound ≤ 10⁻⁶"
        );
        if first.is_none() {
            first = Some(rep);
        }
    }

    let rep = first.unwrap();
    let steps = 100_000u64;
    let tol = Dyadic::from_ratio(&BigInt::from(1), &BigInt::from(100), 64, Round::Floor).0;
    let samples = birkhoff_samples(
        &rep.beta,
        0,
        1,
        20,
        steps,
        0x0bad_5eed_0bad_5eedu64,
        &Precision::with_ceiling(1 << 17),
    )
    .map_err(fail)?;
    for (i, s) in samples.iter().enumerate() {
        for (count, mu, letter) in [(s.count_b, &rep.mu_b, "b"), (s.count_a, &rep.mu_a, "a")] {
            let emp = RealBall::from_ratio(&BigInt::from(count), &BigInt::from(steps), 96);
            let gap = emp.sub(mu, 128);
            let wide = gap.upper_bound().abs().cmp_value(&tol) != Ordering::Less
                || gap.lower_bound().abs().cmp_value(&tol) != Ordering::Less;
            ensure!(
                !wide,
                "sample {i}: empirical {letter}-frequency off μ_{letter} by ≥ 10⁻² \
                 (count {count} of {steps})"
            );
        }
    }
    Ok("3 defect families certified > 10⁻⁶; 20 Birkhoff points at 10⁵ within 10⁻²".into())
}

fn admissibility_oracle() -> Result<String, String> {
    let beta = BetaNumber::surd(QuadraticSurd::new(1, 1, 5, 2).unwrap()).map_err(fail)?;
    let mut agreed = 0u64;
    for len in 1..=12u32 {
        for mask in 0u32..(1 << len) {
            let digits: Vec<u32> = (0..len).rev().map(|i| (mask >> i) & 1).collect();
            let has_pair = digits.windows(2).any(|w| w == [1, 1]);
            let verdict =
                is_admissible(&DigitWord::from_digits(digits.clone()), &beta, 32).map_err(fail)?;
            let admitted = matches!(&verdict, Admissibility::Admissible { .. });
            ensure!(
                admitted == !has_pair,
                "word {digits:?}: oracle {}, verdict {verdict:?}",
                if has_pair { "forbidden" } else { "allowed" }
            );
            agreed += 1;
        }
    }
    Ok(format!("{agreed} words of length ≤ 12 agree with the no-11 oracle"))
}

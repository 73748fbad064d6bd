use std::sync::Mutex;

use num_bigint::BigInt;

use super::word::DigitWord;
use crate::error::Result;
use crate::numeric::{Intercept, Slope};

/// Lower mechanical word: digit n is floor(a(n+1)+r) - floor(an+r).
///
/// The intercept is normalized into [0,1), so digits always land in {0,1}.
pub fn lower_mechanical(alpha: &Slope, rho: &Intercept) -> DigitWord {
    affine_difference(alpha.clone(), rho.normalized(), 0, false)
}

/// Upper mechanical word: the same difference with ceilings.
pub fn upper_mechanical(alpha: &Slope, rho: &Intercept) -> DigitWord {
    affine_difference(alpha.clone(), rho.normalized(), 0, true)
}

/// Characteristic word of a slope: the lower mechanical word with zero
/// intercept shifted by one letter, so digit n is floor((n+2)a) -
/// floor((n+1)a).
pub fn characteristic(alpha: &Slope) -> DigitWord {
    affine_difference(alpha.clone(), Intercept::zero(), 1, false)
}

fn affine_difference(alpha: Slope, rho: Intercept, offset: u64, use_ceil: bool) -> DigitWord {
    DigitWord::from_fn(vec![0, 1], None, move |n| {
        let lo = BigInt::from(n + offset);
        let hi = BigInt::from(n + offset + 1);
        let d = if use_ceil {
            alpha.ceil_linear(&hi, &rho)? - alpha.ceil_linear(&lo, &rho)?
        } else {
            alpha.floor_linear(&hi, &rho)? - alpha.floor_linear(&lo, &rho)?
        };
        Ok(u32::try_from(&d).expect("slope in (0,1) with normalized intercept yields binary digits"))
    })
}

/// Prefix of the limit of the doubling recursion w0 = 0, w1 = 01,
/// w_{k+2} = w_{k+1} w_k, computed via the equivalent substitution
/// 0 -> 01, 1 -> 0 (each step maps w_k to w_{k+1} and fixes the prefix).
pub fn fibonacci_word(n: u64) -> DigitWord {
    let buf: Mutex<Vec<u32>> = Mutex::new(vec![0]);
    DigitWord::from_fn(vec![0, 1], Some(n), move |i| {
        let mut b = buf.lock().unwrap();
        while (b.len() as u64) <= i {
            let mut next = Vec::with_capacity(b.len() * 2);
            for &d in b.iter() {
                if d == 0 {
                    next.extend_from_slice(&[0, 1]);
                } else {
                    next.push(0);
                }
            }
            *b = next;
        }
        Ok(b[i as usize])
    })
}

/// sigma^k applied to a mechanical word stays mechanical with intercept
/// {alpha k + rho}; this helper builds that shifted-intercept word exactly
/// for surd slopes (used by orbit-order checks).
pub fn shifted_intercept(alpha: &Slope, rho: &Intercept, k: u64) -> Result<Intercept> {
    match (alpha, rho) {
        (Slope::Surd(a), Intercept::Rational(r)) => {
            let v = a.mul_bigint(&BigInt::from(k)).add_rational(r);
            Ok(Intercept::Surd(v.fract()))
        }
        (Slope::Surd(a), Intercept::Surd(s)) => {
            let v = a.mul_bigint(&BigInt::from(k)).add(s);
            Ok(Intercept::Surd(v.fract()))
        }
        _ => Err(crate::error::Error::Unsupported(
            "shifted intercepts are exact only for quadratic-surd slopes",
        )),
    }
}

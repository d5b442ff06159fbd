//! Small helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `n / d` as a rational.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with the given power-of-two denominator.
pub fn rationalize(x: f64, denominator_bits: u32) -> Rational {
    let den = 1_i64 << denominator_bits;
    let num = (x * den as f64).round() as i64;
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The exact binary value of a finite double.
pub fn exact(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite value")
}

/// `|q|^t` via `exp(t ln |q|)`; zero at zero.
pub fn abs_pow(q: &Rational, t: f64) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let a = q.abs();
    // numerator and denominator separately keeps huge or tiny values finite
    let ln = ln_big(a.numer()) - ln_big(a.denom());
    (t * ln).exp()
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(q: &Rational) -> f64 {
    if q.is_zero() {
        0.0
    } else if q.is_positive() {
        1.0
    } else {
        -1.0
    }
}

fn ln_big(n: &BigInt) -> f64 {
    match n.to_f64() {
        Some(x) if x.is_finite() && x > 0.0 => x.ln(),
        _ => {
            let bits = n.bits();
            let shift = bits.saturating_sub(60);
            let top = (n >> shift).to_f64().unwrap_or(1.0);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

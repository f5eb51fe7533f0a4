//! Decimal rendering for CSV output.
//!
//! Values are rounded exactly (round-half-even) to a fixed number of
//! significant digits; trailing zeros are kept so every row has the same
//! width. Floats are first converted to their exact dyadic rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exact::Rational;

pub const DEFAULT_DIGITS: usize = 15;

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// `⌊log10 |r|⌋` for nonzero `r`.
fn decimal_exponent(num: &BigInt, den: &BigInt) -> i64 {
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    // Now 10^(e-1) < num/den < 10^(e+1).
    let at_least = |e: i64| -> bool {
        if e >= 0 {
            *num >= den * pow10(e as u32)
        } else {
            num * pow10((-e) as u32) >= *den
        }
    };
    if !at_least(e) {
        e -= 1;
    }
    e
}

/// Rounds `r` to `digits` significant digits, half to even.
pub fn decimal(r: &Rational, digits: usize) -> String {
    assert!(digits >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let mut e = decimal_exponent(&num, &den);

    // scaled = |r|·10^(digits−1−e), which lies in [10^(digits−1), 10^digits).
    let shift = digits as i64 - 1 - e;
    let (sn, sd) = if shift >= 0 {
        (num * pow10(shift as u32), den)
    } else {
        (num, den * pow10((-shift) as u32))
    };
    let (mut q, rem) = sn.div_rem(&sd);
    let twice = rem * 2;
    if twice > sd || (twice == sd && q.is_odd()) {
        q += 1;
    }
    if q == pow10(digits as u32) {
        q /= 10;
        e += 1;
    }

    let ds = q.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e >= 0 {
        let int_len = e as usize + 1;
        if int_len >= ds.len() {
            out.push_str(&ds);
            out.extend(std::iter::repeat_n('0', int_len - ds.len()));
        } else {
            out.push_str(&ds[..int_len]);
            out.push('.');
            out.push_str(&ds[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
        out.push_str(&ds);
    }
    out
}

pub fn decimal_f64(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    match Rational::from_float(v) {
        Some(r) => decimal(&r, digits),
        None => "NaN".into(),
    }
}

/// "num/den" in lowest terms.
pub fn exact(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;

    #[test]
    fn fixed_significant_digits() {
        assert_eq!(decimal(&rational(1, 3), 15), "0.333333333333333");
        assert_eq!(decimal(&rational(7, 24), 15), "0.291666666666667");
        assert_eq!(decimal(&rational(-7, 24), 15), "-0.291666666666667");
        assert_eq!(decimal(&rational(1, 4), 15), "0.250000000000000");
        assert_eq!(decimal(&rational(91, 360), 6), "0.252778");
        assert_eq!(decimal(&rational(0, 1), 15), "0");
        assert_eq!(decimal(&rational(12345, 1), 3), "12300");
        assert_eq!(decimal(&rational(12345, 100), 3), "123");
        assert_eq!(decimal(&rational(1, 1000), 2), "0.0010");
    }

    #[test]
    fn ties_round_to_even() {
        assert_eq!(decimal(&rational(25, 1000), 1), "0.02");
        assert_eq!(decimal(&rational(35, 1000), 1), "0.04");
        assert_eq!(decimal(&rational(-125, 100), 2), "-1.2");
        assert_eq!(decimal(&rational(9995, 10000), 3), "1.00");
    }

    #[test]
    fn floats_use_their_exact_value() {
        // 0.125 is exact in binary, so the half-even tie resolves downward.
        assert_eq!(decimal_f64(0.125, 2), "0.12");
        assert_eq!(decimal_f64(-0.455945326390520, 6), "-0.455945");
        assert_eq!(decimal_f64(0.0, 15), "0");
        assert_eq!(decimal_f64(f64::NAN, 15), "NaN");
    }

    #[test]
    fn exact_strings() {
        assert_eq!(exact(&rational(14, 48)), "7/24");
        assert_eq!(exact(&rational(3, 1)), "3/1");
        assert_eq!(exact(&rational(-1, 6)), "-1/6");
    }
}

//! Exact expectations E_X(f) = (1/X) ∫₀^X f(x) dx for products of sawtooth
//! and floor functions.
//!
//! The correlation ∫ {nx}{mx} dx is evaluated by merging the breakpoints
//! k/n and j/m. Rescaling by L = lcm(n, m) puts every breakpoint on an
//! integer t = L·x, so each piece integrates to an integer multiple of
//! 1/(6·(L/n)·(L/m)·L) and the whole sum runs in `i128`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Guard on `n + m`, the number of pieces per unit period.
pub const MAX_BREAKPOINTS: u64 = 1_000_000;

/// Direct [0, X] integration is cross-checked in debug builds when the piece
/// count `(n + m)·X` stays under this bound.
pub const DEBUG_DIRECT_LIMIT: u64 = 200_000;

/// Step-function cross-checks of the moment closed forms run up to this `nX`.
pub const MOMENT_VERIFY_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Piecewise,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Piecewise => "piecewise",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// E_X({nx}{mx}) together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationValue {
    pub n: u64,
    pub m: u64,
    pub x_range: u64,
    pub value: Rational,
    pub method: Method,
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

fn int(v: i128) -> BigInt {
    BigInt::from(v)
}

fn check_pair(n: u64, m: u64) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::Domain(format!(
            "correlation indices must be positive, got ({n}, {m})"
        )));
    }
    if n + m > MAX_BREAKPOINTS {
        return Err(Error::Size {
            what: "n + m",
            value: n + m,
            max: MAX_BREAKPOINTS,
        });
    }
    Ok(())
}

fn check_range(x_range: u64) -> Result<()> {
    if x_range == 0 {
        return Err(Error::Domain("expectation range X must be >= 1".into()));
    }
    Ok(())
}

/// ∫₀^periods {nx}{mx} dx by breakpoint merging, as an unreduced
/// (numerator, denominator) pair. Inputs are pre-validated.
fn integrate_product_parts(n: u64, m: u64, periods: u64) -> (i128, i128) {
    let l = n.lcm(&m) as i128;
    let a = l / n as i128; // t-spacing of the k/n breakpoints
    let b = l / m as i128;
    let end = l * periods as i128;

    let mut six_sum: i128 = 0;
    let (mut p, mut q) = (0i128, 0i128);
    let mut t0 = 0i128;
    while t0 < end {
        let next_a = (p + 1) * a;
        let next_b = (q + 1) * b;
        let t1 = next_a.min(next_b);
        // On [t0, t1): {nx} = (t − pa)/a and {mx} = (t − qb)/b.
        let alpha = p * a;
        let delta = q * b - alpha;
        let (u0, u1) = (t0 - alpha, t1 - alpha);
        six_sum += 2 * (u1 * u1 * u1 - u0 * u0 * u0) - 3 * delta * (u1 * u1 - u0 * u0);
        if t1 == next_a {
            p += 1;
        }
        if t1 == next_b {
            q += 1;
        }
        t0 = t1;
    }
    (six_sum, 6 * a * b * l)
}

fn integrate_product(n: u64, m: u64, periods: u64) -> Rational {
    let (num, den) = integrate_product_parts(n, m, periods);
    Rational::new(int(num), int(den))
}

/// Piecewise ∫₀¹ {nx}{mx} dx rounded to `f64`, skipping the big-rational
/// reduction. Indices must satisfy the [`exact_correlation`] preconditions.
pub(crate) fn correlation_f64(n: u64, m: u64) -> f64 {
    let (num, den) = integrate_product_parts(n, m, 1);
    let g = num.gcd(&den);
    (num / g) as f64 / (den / g) as f64
}

/// ∫₀¹ {nx}{mx} dx, exactly.
pub fn exact_correlation(n: u64, m: u64) -> Result<Rational> {
    check_pair(n, m)?;
    Ok(integrate_product(n, m, 1))
}

/// The closed-form law 1/4 + gcd(n,m)²/(12nm).
pub fn closed_form_correlation(n: u64, m: u64) -> Result<Rational> {
    check_pair(n, m)?;
    let g = n.gcd(&m) as i128;
    let (n, m) = (n as i128, m as i128);
    Ok(rational(1, 4) + Rational::new(int(g * g), int(12 * n * m)))
}

/// (1/X) ∫₀^X {nx}{mx} dx with the whole [0, X] range integrated piece by
/// piece, no periodicity used.
pub fn expected_correlation_direct(n: u64, m: u64, x_range: u64) -> Result<Rational> {
    check_pair(n, m)?;
    check_range(x_range)?;
    let pieces = (n + m).saturating_mul(x_range);
    if pieces > MAX_BREAKPOINTS * 10 {
        return Err(Error::Size {
            what: "(n + m)·X",
            value: pieces,
            max: MAX_BREAKPOINTS * 10,
        });
    }
    Ok(integrate_product(n, m, x_range) / Rational::from_integer(x_range.into()))
}

/// E_X({nx}{mx}). The [0, X] integral is taken as X times the unit-period
/// integral; debug builds recompute it directly when that is cheap and fail
/// on any disagreement.
pub fn expected_correlation(n: u64, m: u64, x_range: u64) -> Result<CorrelationValue> {
    check_pair(n, m)?;
    check_range(x_range)?;
    let period = integrate_product(n, m, 1);
    let xr = Rational::from_integer(x_range.into());
    let value = (&period * &xr) / &xr;
    if cfg!(debug_assertions) && x_range > 1 && (n + m) * x_range <= DEBUG_DIRECT_LIMIT {
        let direct = expected_correlation_direct(n, m, x_range)?;
        if direct != value {
            return Err(Error::Mismatch(format!(
                "E_{x_range}({{{n}x}}{{{m}x}}): direct {direct} != periodic {value}"
            )));
        }
    }
    Ok(CorrelationValue {
        n,
        m,
        x_range,
        value,
        method: Method::Piecewise,
    })
}

pub fn expected_correlation_closed_form(n: u64, m: u64, x_range: u64) -> Result<CorrelationValue> {
    check_range(x_range)?;
    Ok(CorrelationValue {
        n,
        m,
        x_range,
        value: closed_form_correlation(n, m)?,
        method: Method::ClosedForm,
    })
}

fn product_range(n: u64, x_range: u64) -> Result<u64> {
    if n == 0 || x_range == 0 {
        return Err(Error::Domain(format!(
            "n and X must be positive, got n={n}, X={x_range}"
        )));
    }
    n.checked_mul(x_range)
        .filter(|&k| k <= i64::MAX as u64 / 4)
        .ok_or(Error::Size {
            what: "n·X",
            value: u64::MAX,
            max: i64::MAX as u64 / 4,
        })
}

/// (K−1)(2K−1)/6 with K = nX.
fn floor_moment_closed(k: u64) -> Rational {
    let k = BigInt::from(k);
    let one = BigInt::from(1);
    Rational::new((&k - &one) * (BigInt::from(2) * &k - &one), BigInt::from(6))
}

/// E_X(⌊nx⌋²) = (nX−1)(2nX−1)/6, cross-checked against the unit-step
/// integral (1/nX) Σ_k k²·1 when nX ≤ [`MOMENT_VERIFY_LIMIT`].
pub fn floor_second_moment(n: u64, x_range: u64) -> Result<Rational> {
    let k = product_range(n, x_range)?;
    let closed = floor_moment_closed(k);
    if k <= MOMENT_VERIFY_LIMIT {
        let steps = floor_second_moment_by_steps(k);
        if steps != closed {
            return Err(Error::Mismatch(format!(
                "E_{x_range}(floor({n}x)^2): closed form {closed} != step sum {steps}"
            )));
        }
    }
    Ok(closed)
}

/// (1/K) ∫₀^K ⌊u⌋² du summed one unit interval at a time.
pub fn floor_second_moment_by_steps(k: u64) -> Rational {
    let mut acc = BigInt::from(0);
    for j in 1..k {
        let j = BigInt::from(j);
        acc += &j * &j;
    }
    Rational::new(acc, BigInt::from(k))
}

/// (1/X) ∫₀^X nx⌊nx⌋ dx = (nX−1)(2nX−1)/6 + (nX−1)/4, cross-checked against
/// piecewise integration of u⌊u⌋ over [0, nX].
pub fn cross_moment(n: u64, x_range: u64) -> Result<Rational> {
    let k = product_range(n, x_range)?;
    let closed = floor_moment_closed(k) + Rational::new(BigInt::from(k - 1), BigInt::from(4));
    if k <= MOMENT_VERIFY_LIMIT {
        let pieces = cross_moment_by_pieces(k);
        if pieces != closed {
            return Err(Error::Mismatch(format!(
                "cross moment n={n} X={x_range}: closed form {closed} != pieces {pieces}"
            )));
        }
    }
    Ok(closed)
}

/// (1/K) Σ_j j ∫_j^{j+1} u du.
pub fn cross_moment_by_pieces(k: u64) -> Rational {
    let mut twice = BigInt::from(0);
    for j in 1..k {
        let j = BigInt::from(j);
        let j1 = &j + 1;
        twice += &j * (&j1 * &j1 - &j * &j);
    }
    Rational::new(twice, BigInt::from(2 * k))
}

/// E_X({nx}²) rebuilt from its expansion n²X²/3 − 2·cross + floor moment.
pub fn mean_square_fractional(n: u64, x_range: u64) -> Result<Rational> {
    let k = product_range(n, x_range)?;
    let k = BigInt::from(k);
    let first = Rational::new(&k * &k, BigInt::from(3));
    Ok(first - cross_moment(n, x_range)? * Rational::from_integer(2.into())
        + floor_second_moment(n, x_range)?)
}

/// The simplified form n²X²/3 − (nX−1)(2nX−1)/6 − (nX−1)/2.
pub fn mean_square_simplified(n: u64, x_range: u64) -> Result<Rational> {
    let k = product_range(n, x_range)?;
    let kb = BigInt::from(k);
    Ok(Rational::new(&kb * &kb, BigInt::from(3))
        - floor_moment_closed(k)
        - Rational::new(BigInt::from(k - 1), BigInt::from(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn correlation_examples() {
        assert_eq!(exact_correlation(1, 1).unwrap(), rational(1, 3));
        assert_eq!(exact_correlation(1, 2).unwrap(), rational(7, 24));
        assert_eq!(exact_correlation(2, 6).unwrap(), rational(5, 18));
        for n in [2, 3, 17, 360, 9_999] {
            assert_eq!(exact_correlation(n, n).unwrap(), rational(1, 3));
        }
    }

    #[test]
    fn correlation_errors() {
        assert!(matches!(exact_correlation(0, 3), Err(Error::Domain(_))));
        assert!(matches!(exact_correlation(3, 0), Err(Error::Domain(_))));
        assert!(matches!(
            exact_correlation(600_000, 400_001),
            Err(Error::Size { .. })
        ));
        assert!(matches!(expected_correlation(1, 2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn large_coprime_pair_stays_in_range() {
        let v = exact_correlation(499_999, 500_001).unwrap();
        assert_eq!(v, closed_form_correlation(499_999, 500_001).unwrap());
    }

    #[test]
    fn expectation_examples() {
        let c = expected_correlation(1, 2, 1).unwrap();
        assert_eq!(c.value, rational(7, 24));
        assert_eq!(c.method, Method::Piecewise);
        assert_eq!(expected_correlation(1, 2, 100).unwrap().value, rational(7, 24));
        assert_eq!(expected_correlation(6, 6, 100).unwrap().value, rational(1, 3));
        let cf = expected_correlation_closed_form(4, 6, 100).unwrap();
        assert_eq!(cf.method, Method::ClosedForm);
        assert_eq!(cf.value, exact_correlation(4, 6).unwrap());
    }

    #[test]
    fn x_independence_by_direct_integration() {
        for (n, m) in [(1, 2), (4, 6), (5, 7), (12, 18), (30, 1)] {
            let one = exact_correlation(n, m).unwrap();
            for x in [1, 2, 3, 10, 100] {
                assert_eq!(expected_correlation_direct(n, m, x).unwrap(), one, "({n},{m}) X={x}");
                assert_eq!(expected_correlation(n, m, x).unwrap().value, one);
            }
        }
    }

    #[test]
    fn floor_moment_examples() {
        assert_eq!(floor_second_moment(1, 1).unwrap(), rational(0, 1));
        assert_eq!(floor_second_moment(2, 1).unwrap(), rational(1, 2));
        assert_eq!(floor_second_moment(3, 2).unwrap(), rational(55, 6));
        assert!(floor_second_moment(0, 2).is_err());
    }

    #[test]
    fn cross_moment_examples() {
        assert_eq!(cross_moment(1, 1).unwrap(), rational(0, 1));
        assert_eq!(cross_moment(2, 1).unwrap(), rational(3, 4));
        assert_eq!(cross_moment(1, 2).unwrap(), rational(3, 4));
    }

    #[test]
    fn moments_beyond_verify_limit_use_closed_form() {
        let big = floor_second_moment(1_000, 10_000).unwrap();
        let k = 10_000_000i64;
        assert_eq!(big, rational((k - 1) * (2 * k - 1), 6));
    }

    #[test]
    fn mean_square_is_one_third() {
        for n in 1..=30 {
            for x in [1, 2, 7, 100] {
                assert_eq!(mean_square_fractional(n, x).unwrap(), rational(1, 3));
                assert_eq!(mean_square_simplified(n, x).unwrap(), rational(1, 3));
            }
        }
    }

    #[test]
    fn figure_one_ordering() {
        let v: Vec<Rational> = (1..=12).map(|n| exact_correlation(n, 6).unwrap()).collect();
        let at = |n: usize| &v[n - 1];
        for n in (1..=12).filter(|&n| n != 6) {
            assert!(at(6) > at(n));
        }
        assert_eq!(at(12), at(3));
        for low in [5, 7, 11] {
            for n in (1..=12).filter(|n| crate::arithmetic::gcd(*n as u64, 6) > 1) {
                assert!(at(low) < at(n));
            }
        }
        // A repeated shared prime does not raise the value: (4,6) sits below (2,6).
        assert!(at(4) < at(2));
    }

    proptest! {
        #[test]
        fn symmetric_bounded_and_scale_invariant(n in 1u64..400, m in 1u64..400, c in 1u64..6) {
            let v = exact_correlation(n, m).unwrap();
            prop_assert_eq!(&v, &exact_correlation(m, n).unwrap());
            prop_assert_eq!(&v, &exact_correlation(c * n, c * m).unwrap());
            prop_assert!(v >= rational(1, 4) && v <= rational(1, 3));
            prop_assert_eq!(v == rational(1, 3), n == m);
        }
    }
}

//! Partial sums of the Möbius-weighted sawtooth series.
//!
//! * [`lemma1_partial`]: −π Σ_{n≤N} μ(n)/n {nx}, which tends to sin(2πx).
//! * [`theorem1_partial_naive`] / [`theorem1_partial_fast`]: the off-diagonal
//!   double sum S(N) = Σ_{n≠m≤N} μ(n)μ(m)/(nm) E({nx}{mx}), which tends to
//!   −9/(2π²).
//!
//! The fast path groups the double sum by gcd. With the correlation law
//! C(n,m) = 1/4 + g²/(12nm) and g² = Σ_{d|g} J₂(d),
//!
//! ```text
//! Σ_{n,m≤N} μ(n)μ(m)/(nm) C(n,m) = P(N)²/4 + (1/12) Σ_{d≤N} J₂(d) A_d(N)²
//! ```
//!
//! where P(N) = Σ μ(n)/n and A_d(N) = Σ_{d|n≤N} μ(n)/n². Removing the
//! diagonal (each term 1/3 · μ²(n)/n²) leaves S(N).

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arithmetic::MoebiusTable;
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::exec::{self, Execution, Neumaier};
use crate::oracle::frac;

/// Limit of S(N): −9/(2π²).
pub const THEOREM1_LIMIT: f64 = -9.0 / (2.0 * PI * PI);

/// X recorded on series rows, matching the figure's expectation range.
pub const FIGURE_X_RANGE: u64 = 100;

pub const NAIVE_EXACT_LIMIT: u64 = 300;
pub const FAST_EXACT_LIMIT: u64 = 10_000;
pub const SQUARED_IDENTITY_LIMIT: u64 = 500;

/// Panels per unit length for the E_X(ε̃) quadrature.
pub const BOOKKEEPING_PANELS_PER_UNIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesValue {
    Exact(Rational),
    Float(f64),
}

impl SeriesValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            SeriesValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            SeriesValue::Float(v) => *v,
        }
    }
}

/// One truncation of a series together with its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub terms: u64,
    pub x_range: u64,
    pub value: SeriesValue,
    pub target: f64,
}

impl SeriesPoint {
    pub fn abs_error(&self) -> f64 {
        (self.value.to_f64() - self.target).abs()
    }

    pub fn with_x_range(mut self, x_range: u64) -> Self {
        self.x_range = x_range;
        self
    }
}

/// sin(2π·turns), exact at multiples of 1/4.
pub fn sin_turns(turns: f64) -> f64 {
    let r = turns - turns.round();
    if r == 0.0 || r.abs() == 0.5 {
        0.0
    } else if r == 0.25 {
        1.0
    } else if r == -0.25 {
        -1.0
    } else {
        (2.0 * PI * r).sin()
    }
}

/// cos(2π·turns), exact at multiples of 1/4.
pub fn cos_turns(turns: f64) -> f64 {
    sin_turns(turns + 0.25)
}

fn is_integer(x: f64) -> bool {
    x == x.floor()
}

fn check_terms(table: &MoebiusTable, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("truncation N must be >= 1".into()));
    }
    table.require("N", n)
}

/// 1/2 − (1/π) Σ_{k≤K} sin(2πkx)/k, the truncated Fourier series of {x}.
pub fn frac_fourier_partial(k_max: u64, x: f64) -> Result<f64> {
    if k_max == 0 {
        return Err(Error::Domain("K must be >= 1".into()));
    }
    if !x.is_finite() || is_integer(x) {
        return Err(Error::Domain(format!(
            "the Fourier series represents {{x}} only off the integers, got x={x}"
        )));
    }
    let xf = frac(x);
    let s = exec::sum_f64(Execution::Sequential, 1..k_max as usize + 1, |k| {
        sin_turns(frac(k as f64 * xf)) / k as f64
    });
    Ok(0.5 - s / PI)
}

/// −π Σ_{n≤N} μ(n)/n {nx}.
pub fn lemma1_partial(table: &MoebiusTable, n: u64, x: f64) -> Result<f64> {
    lemma1_partial_with(table, n, x, Execution::default())
}

pub fn lemma1_partial_with(table: &MoebiusTable, n: u64, x: f64, exec: Execution) -> Result<f64> {
    check_terms(table, n)?;
    let s = exec::sum_f64(exec, 1..n as usize + 1, |k| {
        let mu = table.mu_at(k);
        if mu == 0 {
            0.0
        } else {
            mu as f64 * frac(k as f64 * x) / k as f64
        }
    });
    Ok(-PI * s)
}

pub fn lemma1_point(table: &MoebiusTable, n: u64, x: f64) -> Result<SeriesPoint> {
    Ok(SeriesPoint {
        terms: n,
        x_range: 1,
        value: SeriesValue::Float(lemma1_partial(table, n, x)?),
        target: sin_turns(x),
    })
}

/// ε_N(x): the Lemma 1 partial sum minus sin(2πx).
pub fn residual_eps(table: &MoebiusTable, n: u64, x: f64) -> Result<f64> {
    Ok(lemma1_partial(table, n, x)? - sin_turns(x))
}

/// ε̃_N(x) = 2 sin(2πx) ε_N(x) + ε_N(x)².
pub fn eps_tilde(table: &MoebiusTable, n: u64, x: f64) -> Result<f64> {
    let eps = residual_eps(table, n, x)?;
    Ok(2.0 * sin_turns(x) * eps + eps * eps)
}

/// Σ_{n≤N} μ(n)/n Σ_{k≤K} sin(2πknx)/k: the Lemma 1 series with every {nx}
/// replaced by its truncated Fourier expansion. Tends to sin(2πx).
pub fn moebius_fourier_partial(table: &MoebiusTable, n: u64, k_max: u64, x: f64) -> Result<f64> {
    check_terms(table, n)?;
    if k_max == 0 {
        return Err(Error::Domain("K must be >= 1".into()));
    }
    Ok(exec::sum_f64(Execution::default(), 1..n as usize + 1, |j| {
        let mu = table.mu_at(j);
        if mu == 0 {
            return 0.0;
        }
        let jx = frac(j as f64 * x);
        let inner: Neumaier = (1..=k_max)
            .map(|k| sin_turns(frac(k as f64 * jx)) / k as f64)
            .collect();
        mu as f64 * inner.value() / j as f64
    }))
}

fn squarefree_up_to(table: &MoebiusTable, n: u64) -> Vec<u64> {
    (1..=n).filter(|&k| table.mu_at(k as usize) != 0).collect()
}

fn point(terms: u64, value: SeriesValue) -> SeriesPoint {
    SeriesPoint {
        terms,
        x_range: FIGURE_X_RANGE,
        value,
        target: THEOREM1_LIMIT,
    }
}

/// S(N) by the direct double loop over square-free pairs, using the
/// piecewise-integrated correlations.
pub fn theorem1_partial_naive(table: &MoebiusTable, n: u64, exact: bool) -> Result<SeriesPoint> {
    theorem1_partial_naive_with(table, n, exact, Execution::default())
}

pub fn theorem1_partial_naive_with(
    table: &MoebiusTable,
    n: u64,
    exact: bool,
    exec: Execution,
) -> Result<SeriesPoint> {
    check_terms(table, n)?;
    let sf = squarefree_up_to(table, n);
    let mu = |k: u64| table.mu_at(k as usize) as i64;
    if exact {
        if n > NAIVE_EXACT_LIMIT {
            return Err(Error::Size {
                what: "N (exact naive)",
                value: n,
                max: NAIVE_EXACT_LIMIT,
            });
        }
        let upper = exec::sum_rational(exec, 0..sf.len(), |i| {
            let a = sf[i];
            let mut row = Rational::from_integer(0.into());
            for &b in &sf[i + 1..] {
                let c = exact::exact_correlation(a, b).expect("validated indices");
                row += c * Rational::new((mu(a) * mu(b)).into(), ((a * b) as i64).into());
            }
            row
        });
        Ok(point(n, SeriesValue::Exact(upper * Rational::from_integer(2.into()))))
    } else {
        let upper = exec::sum_f64(exec, 0..sf.len(), |i| {
            let a = sf[i];
            let row: Neumaier = sf[i + 1..]
                .iter()
                .map(|&b| (mu(a) * mu(b)) as f64 / (a * b) as f64 * exact::correlation_f64(a, b))
                .collect();
            row.value()
        });
        Ok(point(n, SeriesValue::Float(2.0 * upper)))
    }
}

/// Exact S(1), …, S(n_max) by the naive route, growing the double sum one
/// row at a time: S(N) = S(N−1) + 2 μ(N)/N Σ_{m<N} μ(m)/m C(N, m).
pub fn theorem1_naive_sweep_exact(table: &MoebiusTable, n_max: u64) -> Result<Vec<Rational>> {
    check_terms(table, n_max)?;
    if n_max > NAIVE_EXACT_LIMIT {
        return Err(Error::Size {
            what: "N (exact naive)",
            value: n_max,
            max: NAIVE_EXACT_LIMIT,
        });
    }
    let increments = exec::map_range(Execution::default(), 1..n_max as usize + 1, |big| {
        let big = big as u64;
        let mb = table.mu_at(big as usize) as i64;
        if mb == 0 {
            return Rational::from_integer(0.into());
        }
        let mut row = Rational::from_integer(0.into());
        for small in 1..big {
            let ms = table.mu_at(small as usize) as i64;
            if ms == 0 {
                continue;
            }
            let c = exact::exact_correlation(big, small).expect("validated indices");
            row += c * Rational::new((2 * mb * ms).into(), ((big * small) as i64).into());
        }
        row
    });
    let mut acc = Rational::from_integer(0.into());
    Ok(increments
        .into_iter()
        .map(|inc| {
            acc += inc;
            acc.clone()
        })
        .collect())
}

/// S(N) by gcd grouping with Jordan's J₂; O(N log N).
pub fn theorem1_partial_fast(table: &MoebiusTable, n: u64, exact: bool) -> Result<SeriesPoint> {
    theorem1_partial_fast_with(table, n, exact, Execution::default())
}

pub fn theorem1_partial_fast_with(
    table: &MoebiusTable,
    n: u64,
    exact: bool,
    exec: Execution,
) -> Result<SeriesPoint> {
    check_terms(table, n)?;
    let j2 = table.jordan2_values()?;
    let upto = n as usize;
    if exact {
        if n > FAST_EXACT_LIMIT {
            return Err(Error::Size {
                what: "N (exact fast)",
                value: n,
                max: FAST_EXACT_LIMIT,
            });
        }
        // Everything over the common denominator L = lcm(1..N):
        // P = p/L, A_d = a_d/L², Σμ²/n² = z/L², and
        // S = (3p²L² + Σ J₂(d) a_d² − 4zL²) / (12 L⁴).
        let l = BigInt::from(table.lcm_up_to(n)?);
        let l2 = &l * &l;
        let w: Vec<BigInt> = (0..=upto)
            .map(|k| if k == 0 { BigInt::from(0) } else { &l2 / BigInt::from(k * k) })
            .collect();
        let mut p = BigInt::from(0);
        let mut z = BigInt::from(0);
        for k in 1..=upto {
            match table.mu_at(k) {
                1 => {
                    p += &l / BigInt::from(k);
                    z += &w[k];
                }
                -1 => {
                    p -= &l / BigInt::from(k);
                    z += &w[k];
                }
                _ => {}
            }
        }
        let grouped = exec::map_range(exec, 1..upto + 1, |d| {
            let mut a = BigInt::from(0);
            for k in (d..=upto).step_by(d) {
                match table.mu_at(k) {
                    1 => a += &w[k],
                    -1 => a -= &w[k],
                    _ => {}
                }
            }
            &a * &a * BigInt::from(j2[d])
        });
        let grouped: BigInt = grouped.into_iter().sum();
        let num = BigInt::from(3) * &p * &p * &l2 + grouped - BigInt::from(4) * z * &l2;
        let den = BigInt::from(12) * &l2 * &l2;
        Ok(point(n, SeriesValue::Exact(Rational::new(num, den))))
    } else {
        let p = exec::sum_f64(exec, 1..upto + 1, |k| table.mu_at(k) as f64 / k as f64);
        let diag = exec::sum_f64(exec, 1..upto + 1, |k| {
            let kf = k as f64;
            (table.mu_at(k) != 0) as u8 as f64 / (kf * kf)
        });
        let grouped = exec::sum_f64(exec, 1..upto + 1, |d| {
            let a: Neumaier = (d..=upto)
                .step_by(d)
                .map(|k| {
                    let kf = k as f64;
                    table.mu_at(k) as f64 / (kf * kf)
                })
                .collect();
            let a = a.value();
            j2[d] as f64 * a * a
        });
        let mut acc = Neumaier::new();
        acc.add(0.25 * p * p);
        acc.add(grouped / 12.0);
        acc.add(-diag / 3.0);
        Ok(point(n, SeriesValue::Float(acc.value())))
    }
}

/// |(sin²(2πx) + ε̃_N(x)) − π²(Σ μ²/n² {nx}² + Σ_{n≠m} μ(n)μ(m)/(nm) {nx}{mx})|.
pub fn squared_identity_check(table: &MoebiusTable, n: u64, x: f64) -> Result<f64> {
    check_terms(table, n)?;
    if n > SQUARED_IDENTITY_LIMIT {
        return Err(Error::Size {
            what: "N (squared identity)",
            value: n,
            max: SQUARED_IDENTITY_LIMIT,
        });
    }
    let s = sin_turns(x);
    let lhs = s * s + eps_tilde(table, n, x)?;

    let upto = n as usize;
    let w: Vec<f64> = (0..=upto)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                table.mu_at(k) as f64 * frac(k as f64 * x) / k as f64
            }
        })
        .collect();
    let diagonal: Neumaier = w[1..].iter().map(|v| v * v).collect();
    let off = exec::sum_f64(Execution::default(), 1..upto + 1, |i| {
        let row: Neumaier = (1..=upto).filter(|&j| j != i).map(|j| w[i] * w[j]).collect();
        row.value()
    });
    let rhs = PI * PI * (diagonal.value() + off);
    Ok((lhs - rhs).abs())
}

/// (E_X(sin² 2πx), E_X(2π sin 2πx), E_X(2πx sin 2πx)) in closed form.
pub fn trig_moments(x_range: u64) -> Result<(f64, f64, f64)> {
    if x_range == 0 {
        return Err(Error::Domain("X must be >= 1".into()));
    }
    let x = x_range as f64;
    let sin_sq = 0.5 - sin_turns(2.0 * x) / (8.0 * PI * x);
    let sin_mean = (1.0 - cos_turns(x)) / x;
    let x_sin_mean = sin_turns(x) / (2.0 * PI * x) - cos_turns(x);
    Ok((sin_sq, sin_mean, x_sin_mean))
}

/// Both sides of the expectation of the squared identity at truncation N:
/// E_X(sin²) + E_X(ε̃_N) against π²/3 Σ μ²/n² + π² S(N).
#[derive(Debug, Clone, PartialEq)]
pub struct Bookkeeping {
    pub terms: u64,
    pub x_range: u64,
    pub mean_eps_tilde: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl Bookkeeping {
    pub fn difference(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// E_X(ε̃_N) by composite Simpson with
/// [`BOOKKEEPING_PANELS_PER_UNIT`] panels per unit length.
pub fn expectation_bookkeeping(table: &MoebiusTable, n: u64, x_range: u64) -> Result<Bookkeeping> {
    check_terms(table, n)?;
    let (sin_sq, _, _) = trig_moments(x_range)?;
    let panels = BOOKKEEPING_PANELS_PER_UNIT * x_range as usize;
    let h = x_range as f64 / panels as f64;
    let samples = exec::map_range(Execution::default(), 0..panels + 1, |i| {
        eps_tilde(table, n, i as f64 * h).unwrap_or(f64::NAN)
    });
    let mut acc = Neumaier::new();
    for (i, v) in samples.iter().enumerate() {
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * v);
    }
    let mean_eps_tilde = acc.value() * h / 3.0 / x_range as f64;

    let zeta = table.squarefree_zeta2_f64(n)?;
    let s = if table.has_jordan2() {
        theorem1_partial_fast(table, n, false)?
    } else {
        theorem1_partial_naive(table, n, false)?
    };
    Ok(Bookkeeping {
        terms: n,
        x_range,
        mean_eps_tilde,
        lhs: sin_sq + mean_eps_tilde,
        rhs: PI * PI * (zeta / 3.0 + s.value.to_f64()),
    })
}

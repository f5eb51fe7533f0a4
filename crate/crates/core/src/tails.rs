//! Finite-range Mertens tail diagnostics.
//!
//! For rational x = p/q > 0 every breakpoint of the integrands is exact: M
//! steps at the integers and {ux} drops by one at u = k/x. Scaling by p puts
//! both families on integers (s = u·p, steps at multiples of p, jumps at
//! multiples of q), which is how the piecewise integrals below are merged.
//!
//! Partial summation over N < n ≤ U with f(u) = {ux}/u reads
//!
//! ```text
//! Σ μ(n){nx}/n = M(U){Ux}/U − M(N){Nx}/N − x∫_N^U M(u)/u du
//!              + ∫_N^U M(u){ux}/u² du + Σ_{N<k/x≤U} M((k/x)⁻)·x/k
//! ```
//!
//! The jump sum uses the left limit of M: when k/x lands on an integer the
//! step of M there has not happened yet.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arithmetic::MoebiusTable;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::exec::{self, Execution, Neumaier};

pub const MAX_X_DENOMINATOR: u64 = 1_000;

/// Upper bound on merged pieces in one identity check.
pub const MAX_PIECES: u64 = 50_000_000;

pub const DEFAULT_BOUND_C: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub cutoffs: Vec<u64>,
    /// Upper end of the truncated integrals.
    pub upper: u64,
    pub c: f64,
    pub mertens_ratio: Vec<f64>,
    pub tail_u2: Vec<f64>,
    pub tail_u1: Vec<f64>,
    pub bound_fit: Vec<f64>,
}

impl TailReport {
    /// Fails unless |M(N)|/N strictly decreases along the cutoffs.
    pub fn check_decay(&self) -> Result<()> {
        for (w, c) in self.mertens_ratio.windows(2).zip(self.cutoffs.windows(2)) {
            if w[1].abs() >= w[0].abs() {
                return Err(Error::Mismatch(format!(
                    "|M(N)|/N does not decrease from N={} ({}) to N={} ({})",
                    c[0],
                    w[0].abs(),
                    c[1],
                    w[1].abs()
                )));
            }
        }
        Ok(())
    }
}

fn check_span(table: &MoebiusTable, n: u64, u: u64) -> Result<()> {
    if n == 0 || n >= u {
        return Err(Error::Domain(format!("need 1 <= N < U, got N={n}, U={u}")));
    }
    table.require("U", u)
}

/// ∫_N^U M(u)/u² du = Σ_{k=N}^{U−1} M(k)(1/k − 1/(k+1)).
pub fn tail_integral_u2(table: &MoebiusTable, n: u64, u: u64) -> Result<f64> {
    check_span(table, n, u)?;
    Ok(exec::sum_f64(Execution::default(), n as usize..u as usize, |k| {
        let kf = k as f64;
        table.mertens_at(k) as f64 / (kf * (kf + 1.0))
    }))
}

/// ∫_N^U M(u)/u du = Σ_{k=N}^{U−1} M(k) ln((k+1)/k).
pub fn tail_integral_u1(table: &MoebiusTable, n: u64, u: u64) -> Result<f64> {
    check_span(table, n, u)?;
    Ok(exec::sum_f64(Execution::default(), n as usize..u as usize, |k| {
        table.mertens_at(k) as f64 * (1.0 / k as f64).ln_1p()
    }))
}

/// x = p/q split into positive machine integers.
fn split_x(x: &Rational) -> Result<(u64, u64)> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let q = x
        .denom()
        .to_u64()
        .filter(|&q| q <= MAX_X_DENOMINATOR)
        .ok_or_else(|| {
            Error::Domain(format!(
                "denominator of x={x} exceeds {MAX_X_DENOMINATOR}"
            ))
        })?;
    let p = x
        .numer()
        .to_u64()
        .ok_or_else(|| Error::Domain(format!("numerator of x={x} too large")))?;
    Ok((p, q))
}

/// M at the left limit of the point s/p.
fn mertens_left(table: &MoebiusTable, s: u64, p: u64) -> i64 {
    let (j, r) = s.div_rem(&p);
    if r == 0 {
        table.mertens_at(j as usize - 1)
    } else {
        table.mertens_at(j as usize)
    }
}

/// Jump points k/x in (N, U], as the k range.
fn jump_range(n: u64, u: u64, p: u64, q: u64) -> std::ops::RangeInclusive<u64> {
    (n * p / q + 1)..=(u * p / q)
}

/// Visits the pieces [s0, s1) of [N·p, U·p] cut at multiples of p and q.
/// The callback gets (s0, s1, M on the piece, ⌊ux⌋ on the piece).
fn for_each_piece<F: FnMut(u64, u64, i64, u64)>(
    table: &MoebiusTable,
    n: u64,
    u: u64,
    p: u64,
    q: u64,
    mut f: F,
) {
    let end = u * p;
    let mut s0 = n * p;
    while s0 < end {
        let next_step = (s0 / p + 1) * p;
        let next_jump = (s0 / q + 1) * q;
        let s1 = next_step.min(next_jump).min(end);
        f(s0, s1, table.mertens_at((s0 / p) as usize), s0 / q);
        s0 = s1;
    }
}

fn check_pieces(n: u64, u: u64, p: u64, q: u64) -> Result<()> {
    let pieces = (u - n).saturating_mul(1 + p.div_ceil(q));
    if pieces > MAX_PIECES {
        return Err(Error::Size {
            what: "merged breakpoints",
            value: pieces,
            max: MAX_PIECES,
        });
    }
    Ok(())
}

/// ∫_N^U M(u){ux}/u² du, piece by piece in closed form.
pub fn sawtooth_tail_integral(table: &MoebiusTable, n: u64, u: u64, x: &Rational) -> Result<f64> {
    check_span(table, n, u)?;
    let (p, q) = split_x(x)?;
    check_pieces(n, u, p, q)?;
    let xf = p as f64 / q as f64;
    let mut acc = Neumaier::new();
    for_each_piece(table, n, u, p, q, |s0, s1, m, floor_ux| {
        if m == 0 {
            return;
        }
        let (a, b) = (s0 as f64, s1 as f64);
        // ∫_{a/p}^{b/p} (ux − j)/u² du = x ln(b/a) − j·p(b − a)/(ab)
        let log_part = xf * ((b - a) / a).ln_1p();
        let inv_part = floor_ux as f64 * p as f64 * (b - a) / (a * b);
        acc.add(m as f64 * log_part);
        acc.add(-(m as f64) * inv_part);
    });
    Ok(acc.value())
}

/// Σ_{N<k/x≤U} M((k/x)⁻)·x/k, exactly.
pub fn jump_sum_direct(table: &MoebiusTable, n: u64, u: u64, x: &Rational) -> Result<Rational> {
    check_span(table, n, u)?;
    let (p, q) = split_x(x)?;
    let mut acc = Rational::zero();
    for k in jump_range(n, u, p, q) {
        let m = mertens_left(table, k * q, p);
        if m != 0 {
            acc += Rational::new(BigInt::from(m) * BigInt::from(p), BigInt::from(q) * BigInt::from(k));
        }
    }
    Ok(acc)
}

/// The same jump sum after partial summation against F(u) = ⌊ux⌋:
/// F(U)M(U)/U − F(N)M(N)/N − Σ_{N<j≤U} F(j)μ(j)/j + ∫_N^U F(u)M(u)/u² du.
pub fn jump_sum_by_parts(table: &MoebiusTable, n: u64, u: u64, x: &Rational) -> Result<Rational> {
    check_span(table, n, u)?;
    let (p, q) = split_x(x)?;
    check_pieces(n, u, p, q)?;
    let r = |num: i128, den: i128| Rational::new(BigInt::from(num), BigInt::from(den));
    let floor_at = |v: u64| (v * p / q) as i128;
    let mut acc = r(floor_at(u) * table.mertens_at(u as usize) as i128, u as i128)
        - r(floor_at(n) * table.mertens_at(n as usize) as i128, n as i128);
    for j in n + 1..=u {
        let mu = table.mu_at(j as usize) as i128;
        if mu != 0 {
            acc -= r(floor_at(j) * mu, j as i128);
        }
    }
    let mut integral = Rational::zero();
    for_each_piece(table, n, u, p, q, |s0, s1, m, floor_ux| {
        if m != 0 && floor_ux != 0 {
            // ∫_{s0/p}^{s1/p} du/u² = p(s1 − s0)/(s0·s1)
            let (s0, s1) = (s0 as i128, s1 as i128);
            integral += r(m as i128 * floor_ux as i128 * p as i128 * (s1 - s0), s0 * s1);
        }
    });
    Ok(acc + integral)
}

/// |LHS − RHS| of the finite partial-summation identity in the module docs.
pub fn abel_identity_check(table: &MoebiusTable, n: u64, u: u64, x: &Rational) -> Result<f64> {
    check_span(table, n, u)?;
    let (p, q) = split_x(x)?;
    check_pieces(n, u, p, q)?;
    let xf = p as f64 / q as f64;
    let frac_at = |v: u64| ((v % q) * (p % q) % q) as f64 / q as f64;

    let lhs = exec::sum_f64(Execution::default(), (n + 1) as usize..(u + 1) as usize, |k| {
        let mu = table.mu_at(k);
        if mu == 0 {
            0.0
        } else {
            mu as f64 * frac_at(k as u64) / k as f64
        }
    });

    let mut rhs = Neumaier::new();
    rhs.add(table.mertens_at(u as usize) as f64 * frac_at(u) / u as f64);
    rhs.add(-(table.mertens_at(n as usize) as f64) * frac_at(n) / n as f64);
    rhs.add(-xf * tail_integral_u1(table, n, u)?);
    rhs.add(sawtooth_tail_integral(table, n, u, x)?);
    for k in jump_range(n, u, p, q) {
        let m = mertens_left(table, k * q, p);
        if m != 0 {
            rhs.add(m as f64 * p as f64 / (q as f64 * k as f64));
        }
    }
    Ok((lhs - rhs.value()).abs())
}

/// Mertens ratios, truncated tails up to `table.limit()` and the
/// |M(N)|·e^{c√ln N}/N fit at each cutoff.
pub fn classical_bound_report(table: &MoebiusTable, cutoffs: &[u64], c: f64) -> Result<TailReport> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c must be positive, got {c}")));
    }
    if cutoffs.is_empty() {
        return Err(Error::Domain("at least one cutoff is required".into()));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs[0] == 0 {
        return Err(Error::Domain("cutoffs must be positive and strictly increasing".into()));
    }
    let upper = table.limit();
    table.require("cutoff", *cutoffs.last().unwrap())?;
    let rows = exec::map_range(Execution::default(), 0..cutoffs.len(), |i| {
        let n = cutoffs[i];
        let m = table.mertens_at(n as usize) as f64;
        let ratio = m / n as f64;
        let (u2, u1) = if n < upper {
            (
                tail_integral_u2(table, n, upper).unwrap_or(f64::NAN),
                tail_integral_u1(table, n, upper).unwrap_or(f64::NAN),
            )
        } else {
            (0.0, 0.0)
        };
        let fit = ratio.abs() * (c * (n as f64).ln().sqrt()).exp();
        (ratio, u2, u1, fit)
    });
    Ok(TailReport {
        cutoffs: cutoffs.to_vec(),
        upper,
        c,
        mertens_ratio: rows.iter().map(|r| r.0).collect(),
        tail_u2: rows.iter().map(|r| r.1).collect(),
        tail_u1: rows.iter().map(|r| r.2).collect(),
        bound_fit: rows.iter().map(|r| r.3).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::build_tables;
    use crate::exact::rational;
    use std::sync::OnceLock;

    fn table() -> &'static MoebiusTable {
        static T: OnceLock<MoebiusTable> = OnceLock::new();
        T.get_or_init(|| build_tables(10_000).unwrap())
    }

    /// Independent exact route: on each piece −x/u + {ux}/u² = −⌊ux⌋/u², so
    /// the continuous part of the identity is rational.
    fn abel_rhs_exact(t: &MoebiusTable, n: u64, u: u64, x: &Rational) -> Rational {
        let (p, q) = (x.numer().to_u64().unwrap(), x.denom().to_u64().unwrap());
        let frac = |v: u64| Rational::new(BigInt::from((v * p) % q), BigInt::from(q * v));
        let mut rhs = frac(u) * Rational::from_integer(t.mertens(u).unwrap().into())
            - frac(n) * Rational::from_integer(t.mertens(n).unwrap().into());
        for s0 in n * p..u * p {
            // unit steps in s are fine enough: every breakpoint is an integer s
            let s1 = s0 + 1;
            let m = t.mertens(s0 / p).unwrap();
            let j = s0 / q;
            rhs -= Rational::new(
                BigInt::from(m as i128 * j as i128 * p as i128),
                BigInt::from(s0 as i128 * s1 as i128),
            );
        }
        rhs + jump_sum_direct(t, n, u, x).unwrap()
    }

    fn lhs_exact(t: &MoebiusTable, n: u64, u: u64, x: &Rational) -> Rational {
        let (p, q) = (x.numer().to_u64().unwrap(), x.denom().to_u64().unwrap());
        let mut acc = Rational::zero();
        for k in n + 1..=u {
            let mu = t.mu(k).unwrap() as i64;
            acc += Rational::new(BigInt::from(mu * ((k * p) % q) as i64), BigInt::from(k * q));
        }
        acc
    }

    #[test]
    fn u2_examples() {
        let t = table();
        assert_eq!(tail_integral_u2(t, 1, 2).unwrap(), 0.5);
        assert_eq!(tail_integral_u2(t, 2, 3).unwrap(), 0.0);
        assert!(tail_integral_u2(t, 3, 3).is_err());
        assert!(tail_integral_u2(t, 0, 3).is_err());
        assert!(tail_integral_u2(t, 1, 10_001).is_err());
    }

    #[test]
    fn u1_examples() {
        let t = table();
        assert!((tail_integral_u1(t, 1, 2).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((tail_integral_u1(t, 2, 4).unwrap() + (4.0f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn additivity() {
        let t = table();
        for (a, b, c) in [(1, 50, 10_000), (7, 4_000, 9_999), (100, 101, 102)] {
            let s = tail_integral_u2(t, a, b).unwrap() + tail_integral_u2(t, b, c).unwrap();
            assert!((s - tail_integral_u2(t, a, c).unwrap()).abs() < 1e-12);
            let s = tail_integral_u1(t, a, b).unwrap() + tail_integral_u1(t, b, c).unwrap();
            assert!((s - tail_integral_u1(t, a, c).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn abel_examples() {
        let t = table();
        for n in [1, 2, 5, 99] {
            assert!(abel_identity_check(t, n, n + 1, &rational(1, 2)).unwrap() < 1e-9);
        }
        assert!(abel_identity_check(t, 10, 100, &rational(1, 3)).unwrap() < 1e-9);
        assert!(abel_identity_check(t, 10, 100, &rational(1, 1001)).is_err());
        assert!(abel_identity_check(t, 10, 100, &rational(-1, 3)).is_err());
        assert!(abel_identity_check(t, 10, 10, &rational(1, 3)).is_err());
    }

    #[test]
    fn abel_identity_is_exact_in_rationals() {
        let t = table();
        for (n, u, x) in [(1, 30, rational(1, 2)), (10, 100, rational(1, 3)), (4, 60, rational(7, 5))] {
            assert_eq!(lhs_exact(t, n, u, &x), abel_rhs_exact(t, n, u, &x), "N={n} U={u} x={x}");
        }
    }

    #[test]
    fn jump_tie_break_uses_left_limit() {
        // x = 1/2 puts every jump on an even integer, where M also steps.
        let t = table();
        let x = rational(1, 2);
        assert!(abel_identity_check(t, 10, 200, &x).unwrap() < 1e-9);
        assert_eq!(lhs_exact(t, 10, 200, &x), abel_rhs_exact(t, 10, 200, &x));

        // Using M at the right limit (after the step) breaks the identity.
        let right: Rational = (6..=100u64)
            .map(|k| Rational::new(t.mertens(2 * k).unwrap().into(), (2 * k).into()))
            .sum();
        let left = jump_sum_direct(t, 10, 200, &x).unwrap();
        assert_ne!(left, right);
    }

    #[test]
    fn jump_sum_partial_summation_form() {
        let t = table();
        let x = rational(1, 2);
        assert_eq!(
            jump_sum_direct(t, 10, 50, &x).unwrap(),
            jump_sum_by_parts(t, 10, 50, &x).unwrap()
        );
        for (n, u, x) in [(3, 97, rational(2, 3)), (50, 400, rational(11, 7))] {
            assert_eq!(
                jump_sum_direct(t, n, u, &x).unwrap(),
                jump_sum_by_parts(t, n, u, &x).unwrap()
            );
        }
    }

    #[test]
    fn bound_report_shape_and_errors() {
        let t = table();
        let r = classical_bound_report(t, &[10, 100, 1_000, 10_000], 1.0).unwrap();
        assert_eq!(r.cutoffs.len(), r.mertens_ratio.len());
        assert_eq!(r.tail_u1.len(), 4);
        assert_eq!(r.tail_u2[3], 0.0);
        assert_eq!(r.mertens_ratio[2], 0.002);
        assert!((r.bound_fit[0] - 0.1 * (10f64.ln().sqrt()).exp()).abs() < 1e-15);
        assert!(classical_bound_report(t, &[100, 10], 1.0).is_err());
        assert!(classical_bound_report(t, &[10], 0.0).is_err());
        assert!(classical_bound_report(t, &[10, 20_000], 1.0).is_err());
    }

    #[test]
    fn decay_check_reports_the_offending_pair() {
        // M(1000) = 2, M(10000) = −23: the ratio grows between these cutoffs.
        let r = classical_bound_report(table(), &[1_000, 10_000], 1.0).unwrap();
        let err = r.check_decay().unwrap_err();
        assert!(err.to_string().contains("N=1000"));
        let r = classical_bound_report(table(), &[10, 100], 1.0).unwrap();
        // M(10) = −1, M(100) = 1
        assert!(r.check_decay().is_ok());
    }
}

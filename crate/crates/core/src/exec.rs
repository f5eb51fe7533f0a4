//! Execution strategy and deterministic reductions.
//!
//! Every floating-point reduction in the crate goes through [`sum_f64`]:
//! terms are split into fixed blocks of [`BLOCK`] consecutive indices, each
//! block is accumulated in ascending order with Neumaier compensation, and the
//! block partials are folded in block order. The partition never depends on
//! the thread count, so sequential and parallel runs agree bit for bit.

use std::ops::Range;

use crate::exact::Rational;

/// Number of consecutive terms accumulated by one worker.
pub const BLOCK: usize = 512;

/// How data-parallel loops are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise identical
    /// to `Sequential`.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an ordered slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<Neumaier>().value()
}

fn block_ranges(range: Range<usize>) -> Vec<Range<usize>> {
    let mut out = Vec::with_capacity(range.len() / BLOCK + 1);
    let mut lo = range.start;
    while lo < range.end {
        let hi = (lo + BLOCK).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Maps every index of `range` through `f`, preserving order.
pub fn map_range<T, F>(exec: Execution, range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            range.into_par_iter().map(f).collect()
        }
        _ => range.map(f).collect(),
    }
}

/// Deterministic compensated sum of `term(i)` for `i` in `range`.
pub fn sum_f64<F>(exec: Execution, range: Range<usize>, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = block_ranges(range);
    let partials = map_range(exec, 0..blocks.len(), |b| {
        blocks[b].clone().map(&term).collect::<Neumaier>()
    });
    let mut acc = Neumaier::new();
    for p in partials {
        acc.add(p.sum);
        acc.add(p.comp);
    }
    acc.value()
}

/// Exact sum of `term(i)` over `range`; blocks are reduced concurrently.
pub fn sum_rational<F>(exec: Execution, range: Range<usize>, term: F) -> Rational
where
    F: Fn(usize) -> Rational + Sync + Send,
{
    let blocks = block_ranges(range);
    let partials = map_range(exec, 0..blocks.len(), |b| {
        blocks[b]
            .clone()
            .map(&term)
            .fold(Rational::from_integer(0.into()), |a, t| a + t)
    });
    partials
        .into_iter()
        .fold(Rational::from_integer(0.into()), |a, t| a + t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let acc: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (i as f64 + 1.0);
        let a = sum_f64(Execution::Sequential, 0..100_003, f);
        let b = sum_f64(Execution::Parallel, 0..100_003, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn empty_range_sums_to_zero() {
        assert_eq!(sum_f64(Execution::Parallel, 5..5, |_| 1.0), 0.0);
        assert_eq!(
            sum_rational(Execution::Parallel, 3..3, |_| Rational::from_integer(1.into())),
            Rational::from_integer(0.into())
        );
    }

    #[test]
    fn rational_sum_is_exact() {
        let s = sum_rational(Execution::default(), 1..2001, |i| {
            Rational::new(1.into(), ((i * (i + 1)) as u64).into())
        });
        assert_eq!(s, Rational::new(2000.into(), 2001.into()));
    }
}

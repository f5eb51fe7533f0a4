//! Sieved Möbius, Mertens, ω and Jordan J₂ tables.
//!
//! Conventions: μ(1) = 1, ω(1) = 0, M(0) = 0. Arrays are indexed directly by
//! `n`, slot 0 holds the M(0)/μ(0) = 0 placeholder.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::exec::{self, Execution};

/// Largest table the sieve will allocate.
pub const MAX_LIMIT: u64 = 100_000_000;

/// Largest `N` for which Möbius-weighted partial sums are accumulated exactly.
/// Beyond it the compensated floating accumulator takes over.
pub const EXACT_SUM_LIMIT: u64 = 10_000;

pub const CACHE_MAGIC: &[u8; 4] = b"MUV1";

/// A Möbius-weighted partial sum, exact or compensated floating point
/// depending on which side of [`EXACT_SUM_LIMIT`] it was computed.
#[derive(Debug, Clone, PartialEq)]
pub enum PartialSum {
    Exact(Rational),
    Float(f64),
}

impl PartialSum {
    pub fn to_f64(&self) -> f64 {
        match self {
            PartialSum::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            PartialSum::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            PartialSum::Exact(r) => Some(r),
            PartialSum::Float(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoebiusTable {
    limit: u64,
    mu: Vec<i8>,
    mertens: Vec<i32>,
    omega: Vec<u8>,
    jordan2: Option<Vec<u64>>,
}

/// Builds μ, M and ω up to `limit` with a linear sieve.
pub fn build_tables(limit: u64) -> Result<MoebiusTable> {
    MoebiusTable::build(limit)
}

fn check_limit(limit: u64) -> Result<()> {
    if limit == 0 {
        return Err(Error::Size {
            what: "limit",
            value: 0,
            max: MAX_LIMIT,
        });
    }
    if limit > MAX_LIMIT {
        return Err(Error::Size {
            what: "limit",
            value: limit,
            max: MAX_LIMIT,
        });
    }
    Ok(())
}

fn prefix_mertens(mu: &[i8]) -> Vec<i32> {
    let mut mertens = Vec::with_capacity(mu.len());
    let mut acc = 0i32;
    for &m in mu {
        acc += m as i32;
        mertens.push(acc);
    }
    mertens
}

impl MoebiusTable {
    pub fn build(limit: u64) -> Result<Self> {
        check_limit(limit)?;
        let n = limit as usize;
        let mut mu = vec![0i8; n + 1];
        let mut omega = vec![0u8; n + 1];
        let mut composite = vec![false; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        mu[1] = 1;
        for i in 2..=n {
            if !composite[i] {
                primes.push(i);
                mu[i] = -1;
                omega[i] = 1;
            }
            for &p in &primes {
                let ip = i * p;
                if ip > n {
                    break;
                }
                composite[ip] = true;
                if i % p == 0 {
                    // p² | ip
                    mu[ip] = 0;
                    omega[ip] = omega[i];
                    break;
                }
                mu[ip] = -mu[i];
                omega[ip] = omega[i] + 1;
            }
        }
        let mertens = prefix_mertens(&mu);
        Ok(Self {
            limit,
            mu,
            mertens,
            omega,
            jordan2: None,
        })
    }

    /// Rebuilds a table from μ values for `1..=mu.len()`; M and ω are
    /// recomputed.
    pub fn from_mu(values: &[i8]) -> Result<Self> {
        let limit = values.len() as u64;
        check_limit(limit)?;
        if values[0] != 1 {
            return Err(Error::Cache("mu(1) must be 1".into()));
        }
        if let Some(pos) = values.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(Error::Cache(format!(
                "mu({}) = {} is not in {{-1, 0, 1}}",
                pos + 1,
                values[pos]
            )));
        }
        let n = values.len();
        let mut mu = Vec::with_capacity(n + 1);
        mu.push(0);
        mu.extend_from_slice(values);
        let mut omega = vec![0u8; n + 1];
        for p in 2..=n {
            if omega[p] == 0 {
                for k in (p..=n).step_by(p) {
                    omega[k] += 1;
                }
            }
        }
        let mertens = prefix_mertens(&mu);
        Ok(Self {
            limit,
            mu,
            mertens,
            omega,
            jordan2: None,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit {
            Err(Error::Index {
                index: n,
                limit: self.limit,
            })
        } else {
            Ok(n as usize)
        }
    }

    /// Ensures `n <= limit`; `what` names the offending parameter.
    pub fn require(&self, what: &'static str, n: u64) -> Result<()> {
        if n > self.limit {
            return Err(Error::Size {
                what,
                value: n,
                max: self.limit,
            });
        }
        Ok(())
    }

    pub fn mu(&self, n: u64) -> Result<i8> {
        Ok(self.mu[self.check(n)?])
    }

    /// μ indexed by n, slot 0 holds 0.
    pub fn mu_values(&self) -> &[i8] {
        &self.mu
    }

    pub fn omega(&self, n: u64) -> Result<u8> {
        Ok(self.omega[self.check(n)?])
    }

    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        Ok(self.mu(n)? != 0)
    }

    /// M(n) = Σ_{m≤n} μ(m), with M(0) = 0.
    pub fn mertens(&self, n: u64) -> Result<i64> {
        if n == 0 {
            return Ok(0);
        }
        Ok(self.mertens[self.check(n)?] as i64)
    }

    /// M(n) without bounds checking; `n` must be `<= limit`.
    #[inline]
    pub(crate) fn mertens_at(&self, n: usize) -> i64 {
        self.mertens[n] as i64
    }

    #[inline]
    pub(crate) fn mu_at(&self, n: usize) -> i8 {
        self.mu[n]
    }

    /// Q(N): the number of square-free integers up to `n`.
    pub fn squarefree_count(&self, n: u64) -> Result<u64> {
        let n = self.check(n)?;
        Ok(self.mu[1..=n].iter().filter(|&&m| m != 0).count() as u64)
    }

    /// Primes up to `n`, read off the table (square-free with ω = 1, μ = −1).
    pub fn primes_up_to(&self, n: u64) -> Result<Vec<u64>> {
        let n = self.check(n)?;
        Ok((2..=n)
            .filter(|&k| self.omega[k] == 1 && self.mu[k] == -1)
            .map(|k| k as u64)
            .collect())
    }

    /// lcm(1, …, n).
    pub fn lcm_up_to(&self, n: u64) -> Result<BigUint> {
        let mut l = BigUint::one();
        for p in self.primes_up_to(n)? {
            let mut q = p;
            while q <= n / p {
                q *= p;
            }
            l *= q;
        }
        Ok(l)
    }

    /// P(N) = Σ_{n≤N} μ(n)/n.
    pub fn moebius_harmonic(&self, n: u64) -> Result<PartialSum> {
        if n <= EXACT_SUM_LIMIT {
            self.moebius_harmonic_exact(n).map(PartialSum::Exact)
        } else {
            self.moebius_harmonic_f64(n).map(PartialSum::Float)
        }
    }

    /// Exact P(N), accumulated over the common denominator lcm(1..N).
    pub fn moebius_harmonic_exact(&self, n: u64) -> Result<Rational> {
        self.weighted_exact(n, 1)
    }

    pub fn moebius_harmonic_f64(&self, n: u64) -> Result<f64> {
        let n = self.check(n)?;
        Ok(exec::sum_f64(Execution::Sequential, 1..n + 1, |k| {
            self.mu[k] as f64 / k as f64
        }))
    }

    /// Σ_{n≤N} μ²(n)/n².
    pub fn squarefree_zeta2_partial(&self, n: u64) -> Result<PartialSum> {
        if n <= EXACT_SUM_LIMIT {
            self.squarefree_zeta2_exact(n).map(PartialSum::Exact)
        } else {
            self.squarefree_zeta2_f64(n).map(PartialSum::Float)
        }
    }

    pub fn squarefree_zeta2_exact(&self, n: u64) -> Result<Rational> {
        self.weighted_exact(n, 2)
    }

    pub fn squarefree_zeta2_f64(&self, n: u64) -> Result<f64> {
        let n = self.check(n)?;
        Ok(exec::sum_f64(Execution::Sequential, 1..n + 1, |k| {
            if self.mu[k] == 0 {
                0.0
            } else {
                let k = k as f64;
                1.0 / (k * k)
            }
        }))
    }

    /// Σ_{k≤n} μ(k)^power / k^power for power ∈ {1, 2}, exact.
    fn weighted_exact(&self, n: u64, power: u32) -> Result<Rational> {
        let upto = self.check(n)?;
        let den = self.lcm_up_to(n)?.pow(power);
        let mut num = BigInt::zero();
        for k in 1..=upto {
            let m = self.mu[k];
            if m == 0 {
                continue;
            }
            let sign = if power % 2 == 0 { 1 } else { m };
            let kp = BigUint::from(k as u64).pow(power);
            let share = BigInt::from(&den / kp);
            if sign > 0 {
                num += share;
            } else {
                num -= share;
            }
        }
        Ok(Rational::new(num, BigInt::from(den)))
    }

    /// Fills the Jordan totient J₂ array. Idempotent.
    pub fn build_jordan2(&mut self) {
        if self.jordan2.is_some() {
            return;
        }
        let n = self.limit as usize;
        let mut j: Vec<u64> = (0..=n as u64).map(|d| d * d).collect();
        for p in 2..=n {
            if self.omega[p] == 1 && self.mu[p] == -1 {
                let p2 = (p * p) as u64;
                for d in (p..=n).step_by(p) {
                    j[d] = j[d] / p2 * (p2 - 1);
                }
            }
        }
        self.jordan2 = Some(j);
    }

    pub fn with_jordan2(mut self) -> Self {
        self.build_jordan2();
        self
    }

    pub fn has_jordan2(&self) -> bool {
        self.jordan2.is_some()
    }

    /// J₂(d) = d² Π_{p|d} (1 − 1/p²).
    pub fn jordan2(&self, d: u64) -> Result<u64> {
        let d = self.check(d)?;
        match &self.jordan2 {
            Some(j) => Ok(j[d]),
            None => Err(Error::State("jordan2 table not built")),
        }
    }

    pub(crate) fn jordan2_values(&self) -> Result<&[u64]> {
        self.jordan2
            .as_deref()
            .ok_or(Error::State("jordan2 table not built"))
    }

    /// Writes the `MUV1` cache: magic, limit as u64 LE, μ(1..=limit) as i8.
    pub fn write_cache<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        let bytes: Vec<u8> = self.mu[1..].iter().map(|&m| m as u8).collect();
        w.write_all(&bytes)?;
        w.flush()
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|e| Error::Cache(format!("truncated header: {e}")))?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache(format!("bad magic {magic:?}")));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)
            .map_err(|e| Error::Cache(format!("truncated header: {e}")))?;
        let limit = u64::from_le_bytes(len);
        check_limit(limit).map_err(|e| Error::Cache(e.to_string()))?;
        let mut body = vec![0u8; limit as usize];
        r.read_exact(&mut body)
            .map_err(|e| Error::Cache(format!("truncated body: {e}")))?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest).map_err(|e| Error::Cache(e.to_string()))? != 0 {
            return Err(Error::Cache("trailing bytes after mu array".into()));
        }
        let values: Vec<i8> = body.into_iter().map(|b| b as i8).collect();
        Self::from_mu(&values)
    }

    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let f = File::create(path).map_err(io)?;
        self.write_cache(BufWriter::new(f)).map_err(io)
    }

    pub fn load_cache(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_cache(BufReader::new(f))
    }
}

/// Trial-division μ, used to cross-check the sieve.
pub fn moebius_by_trial_division(mut n: u64) -> i8 {
    assert!(n >= 1);
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

//! Command implementations behind the `fraclab` binary. Each command writes
//! CSV (or a report) to any `Write`, so the binary only parses flags and
//! picks the sink.

use std::io::Write;
use std::path::PathBuf;

use crate::arithmetic::{gcd, MoebiusTable};
use crate::error::{Error, Result};
use crate::exact::{self, CorrelationValue};
use crate::format::{decimal, decimal_f64, exact as exact_string, DEFAULT_DIGITS};
use crate::series::{self, SeriesPoint, SeriesValue, FIGURE_X_RANGE};
use crate::tails::{self, TailReport};

pub const CACHE_ENV: &str = "FRACLAB_CACHE";

/// The m and n range plotted in the correlation figure.
pub const FIGURE1_M: u64 = 6;
pub const FIGURE1_N_MAX: u64 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sieve_limit: u64,
    pub cache_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub precision_digits: usize,
    pub jordan_fast_path: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sieve_limit: 1_000_000,
            cache_path: None,
            output_path: None,
            precision_digits: DEFAULT_DIGITS,
            jordan_fast_path: true,
        }
    }
}

impl RunConfig {
    /// Pre-flight check that a command asking for `n` fits in the sieve.
    pub fn require(&self, n: u64) -> Result<()> {
        if n > self.sieve_limit {
            return Err(Error::Config {
                field: "sieve_limit",
                detail: format!("command needs {n} but sieve_limit is {}", self.sieve_limit),
            });
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.precision_digits == 0 || self.precision_digits > 60 {
            return Err(Error::Config {
                field: "precision_digits",
                detail: format!("{} is outside 1..=60", self.precision_digits),
            });
        }
        if self.sieve_limit == 0 || self.sieve_limit > crate::arithmetic::MAX_LIMIT {
            return Err(Error::Config {
                field: "sieve_limit",
                detail: format!(
                    "{} is outside 1..={}",
                    self.sieve_limit,
                    crate::arithmetic::MAX_LIMIT
                ),
            });
        }
        Ok(())
    }

    /// Loads the sieve from the cache when it is valid and large enough,
    /// otherwise sieves and refreshes the cache. A corrupt cache only warns.
    pub fn load_table(&self) -> Result<MoebiusTable> {
        self.validate()?;
        let mut table = None;
        if let Some(path) = self.cache_path.as_deref().filter(|p| p.exists()) {
            match MoebiusTable::load_cache(path) {
                Ok(t) if t.limit() >= self.sieve_limit => table = Some(t),
                Ok(t) => log::info!(
                    "cache {} holds limit {} < {}; re-sieving",
                    path.display(),
                    t.limit(),
                    self.sieve_limit
                ),
                Err(e) => log::warn!("ignoring sieve cache {}: {e}", path.display()),
            }
        }
        let mut table = match table {
            Some(t) => t,
            None => {
                let t = MoebiusTable::build(self.sieve_limit)?;
                if let Some(path) = &self.cache_path {
                    t.save_cache(path)?;
                }
                t
            }
        };
        if self.jordan_fast_path {
            table.build_jordan2();
        }
        Ok(table)
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: PathBuf::from("<output>"),
            source,
        },
        other => Error::Domain(format!("csv: {other:?}")),
    }
}

fn finish<W: Write>(wtr: csv::Writer<W>) -> Result<()> {
    let mut inner = wtr.into_inner().map_err(|e| Error::Io {
        path: PathBuf::from("<output>"),
        source: std::io::Error::other(e.to_string()),
    })?;
    inner.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<output>"),
        source,
    })
}

/// Series rows: N, X, value, target, abs_error.
pub fn write_series<W: Write>(points: &[SeriesPoint], digits: usize, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    wtr.write_record(["N", "X", "value", "target", "abs_error"])
        .map_err(csv_err)?;
    for p in points {
        let value = match &p.value {
            SeriesValue::Exact(r) => decimal(r, digits),
            SeriesValue::Float(v) => decimal_f64(*v, digits),
        };
        wtr.write_record([
            p.terms.to_string(),
            p.x_range.to_string(),
            value,
            decimal_f64(p.target, digits),
            decimal_f64(p.abs_error(), digits),
        ])
        .map_err(csv_err)?;
    }
    finish(wtr)
}

/// TailReport rows: N, mertens_ratio, tail_u2, tail_u1, bound_fit.
pub fn write_tail_report<W: Write>(report: &TailReport, digits: usize, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    wtr.write_record(["N", "mertens_ratio", "tail_u2", "tail_u1", "bound_fit"])
        .map_err(csv_err)?;
    for i in 0..report.cutoffs.len() {
        wtr.write_record([
            report.cutoffs[i].to_string(),
            decimal_f64(report.mertens_ratio[i], digits),
            decimal_f64(report.tail_u2[i], digits),
            decimal_f64(report.tail_u1[i], digits),
            decimal_f64(report.bound_fit[i], digits),
        ])
        .map_err(csv_err)?;
    }
    finish(wtr)
}

fn write_correlations<W: Write>(
    rows: &[(CorrelationValue, Option<String>)],
    digits: usize,
    w: W,
) -> Result<()> {
    let mut wtr = csv_writer(w);
    let with_note = rows.iter().any(|r| r.1.is_some());
    let mut header = vec!["n", "m", "X", "value", "exact", "method"];
    if with_note {
        header.extend(["gcd", "commentary"]);
    }
    wtr.write_record(&header).map_err(csv_err)?;
    for (c, note) in rows {
        let mut rec = vec![
            c.n.to_string(),
            c.m.to_string(),
            c.x_range.to_string(),
            decimal(&c.value, digits),
            exact_string(&c.value),
            c.method.as_str().to_string(),
        ];
        if with_note {
            rec.push(gcd(c.n, c.m).to_string());
            rec.push(note.clone().unwrap_or_default());
        }
        wtr.write_record(&rec).map_err(csv_err)?;
    }
    finish(wtr)
}

/// Describes how n relates to m in the correlation figure.
pub fn gcd_commentary(n: u64, m: u64) -> String {
    let g = gcd(n, m);
    let mut tags = vec![format!("gcd={g}")];
    if n % m == 0 {
        tags.push(format!("multiple of {m}"));
    } else if m % n == 0 {
        tags.push(format!("divides {m}"));
    }
    if g == 1 {
        tags.push("coprime".into());
    }
    let repeated = (2..=g).any(|p| g % p == 0 && crate::arithmetic::moebius_by_trial_division(p) == -1 && n % (p * p) == 0);
    if repeated {
        tags.push("repeated shared prime".into());
    }
    tags.join("; ")
}

/// Decade cutoffs up to `limit`, plus `limit` itself.
pub fn decade_grid(limit: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut n = 1u64;
    while n < limit {
        grid.push(n);
        n = n.saturating_mul(10);
    }
    grid.push(limit);
    grid
}

pub fn cmd_sieve<W: Write>(config: &RunConfig, table: &MoebiusTable, w: W) -> Result<()> {
    let d = config.precision_digits;
    let mut wtr = csv_writer(w);
    wtr.write_record(["N", "mertens", "mertens_ratio", "squarefree_count", "density_gap_over_sqrt_n"])
        .map_err(csv_err)?;
    let density = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    for n in decade_grid(table.limit()) {
        let m = table.mertens(n)?;
        let q = table.squarefree_count(n)?;
        let gap = (q as f64 - n as f64 * density) / (n as f64).sqrt();
        wtr.write_record([
            n.to_string(),
            m.to_string(),
            decimal_f64(m as f64 / n as f64, d),
            q.to_string(),
            decimal_f64(gap, d),
        ])
        .map_err(csv_err)?;
    }
    finish(wtr)
}

pub fn cmd_correlate<W: Write>(
    config: &RunConfig,
    n: u64,
    m: u64,
    x_range: u64,
    closed_form: bool,
    w: W,
) -> Result<()> {
    let c = if closed_form {
        exact::expected_correlation_closed_form(n, m, x_range)?
    } else {
        exact::expected_correlation(n, m, x_range)?
    };
    write_correlations(&[(c, None)], config.precision_digits, w)
}

/// Lemma 1 partial sums at decade truncations up to `n_max`.
pub fn cmd_lemma1<W: Write>(config: &RunConfig, table: &MoebiusTable, n_max: u64, x: f64, w: W) -> Result<()> {
    config.require(n_max)?;
    let points = decade_grid(n_max)
        .into_iter()
        .map(|n| series::lemma1_point(table, n, x))
        .collect::<Result<Vec<_>>>()?;
    write_series(&points, config.precision_digits, w)
}

pub fn theorem1_point(config: &RunConfig, table: &MoebiusTable, n: u64, exact: bool, naive: bool) -> Result<SeriesPoint> {
    config.require(n)?;
    if naive || !config.jordan_fast_path {
        series::theorem1_partial_naive(table, n, exact)
    } else {
        series::theorem1_partial_fast(table, n, exact)
    }
}

pub fn cmd_theorem1<W: Write>(
    config: &RunConfig,
    table: &MoebiusTable,
    n: u64,
    exact: bool,
    naive: bool,
    w: W,
) -> Result<()> {
    let p = theorem1_point(config, table, n, exact, naive)?;
    write_series(&[p], config.precision_digits, w)
}

/// E₁₀₀({n x}{6 x}) for n = 1..12 with gcd commentary.
pub fn cmd_figure1<W: Write>(config: &RunConfig, w: W) -> Result<()> {
    let rows = (1..=FIGURE1_N_MAX)
        .map(|n| {
            let c = exact::expected_correlation(n, FIGURE1_M, FIGURE_X_RANGE)?;
            Ok((c, Some(gcd_commentary(n, FIGURE1_M))))
        })
        .collect::<Result<Vec<_>>>()?;
    write_correlations(&rows, config.precision_digits, w)
}

/// S(N) for N = 1..n_max against −9/(2π²), exact while the sweep is small.
pub fn cmd_figure2<W: Write>(config: &RunConfig, table: &MoebiusTable, n_max: u64, w: W) -> Result<()> {
    config.require(n_max)?;
    let points = if n_max <= series::NAIVE_EXACT_LIMIT {
        series::theorem1_naive_sweep_exact(table, n_max)?
            .into_iter()
            .zip(1..)
            .map(|(s, n)| SeriesPoint {
                terms: n,
                x_range: FIGURE_X_RANGE,
                value: SeriesValue::Exact(s),
                target: series::THEOREM1_LIMIT,
            })
            .collect()
    } else {
        (1..=n_max)
            .map(|n| theorem1_point(config, table, n, false, false))
            .collect::<Result<Vec<_>>>()?
    };
    write_series(&points, config.precision_digits, w)
}

pub fn cmd_tails<W: Write>(config: &RunConfig, table: &MoebiusTable, cutoffs: &[u64], c: f64, w: W) -> Result<()> {
    if let Some(&max) = cutoffs.iter().max() {
        config.require(max)?;
    }
    let report = tails::classical_bound_report(table, cutoffs, c)?;
    write_tail_report(&report, config.precision_digits, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commentary_tags() {
        assert_eq!(gcd_commentary(1, 6), "gcd=1; divides 6; coprime");
        assert_eq!(gcd_commentary(4, 6), "gcd=2; repeated shared prime");
        assert_eq!(gcd_commentary(5, 6), "gcd=1; coprime");
        assert_eq!(gcd_commentary(6, 6), "gcd=6; multiple of 6");
        assert_eq!(gcd_commentary(12, 6), "gcd=6; multiple of 6; repeated shared prime");
        assert_eq!(gcd_commentary(9, 6), "gcd=3; repeated shared prime");
    }

    #[test]
    fn decades() {
        assert_eq!(decade_grid(1), vec![1]);
        assert_eq!(decade_grid(100), vec![1, 10, 100]);
        assert_eq!(decade_grid(250), vec![1, 10, 100, 250]);
    }

    #[test]
    fn preflight_names_sieve_limit() {
        let cfg = RunConfig {
            sieve_limit: 1_000,
            ..RunConfig::default()
        };
        let err = cfg.require(10_000).unwrap_err();
        assert!(err.to_string().contains("sieve_limit"));
        assert!(cfg.require(1_000).is_ok());
    }
}

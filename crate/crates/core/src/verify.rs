//! The acceptance suite, shared by `fraclab verify` and the `acceptance`
//! test target. Every tolerance and runtime budget is fixed here.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arithmetic::{gcd, MoebiusTable};
use crate::cli::{self, RunConfig};
use crate::error::Result;
use crate::exact::{self, rational, Rational};
use crate::oracle;
use crate::series::{self, SeriesValue, THEOREM1_LIMIT};
use crate::tails;

/// Largest N any criterion touches.
pub const REQUIRED_LIMIT: u64 = 1_000_000;

pub const FIGURE1_GOLDEN: &str = include_str!("../golden/figure1.csv");

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<34} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Shared inputs: the sieve up to [`REQUIRED_LIMIT`] with J₂.
pub struct Context {
    pub table: MoebiusTable,
    pub config: RunConfig,
}

impl Context {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.require(REQUIRED_LIMIT)?;
        let mut table = config.load_table()?;
        table.build_jordan2();
        Ok(Self {
            table,
            config: config.clone(),
        })
    }
}

type Check = fn(&Context) -> Result<(bool, String)>;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    check: Check,
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, title: "diagonal correlation is 1/3", budget: secs(10), check: lemma2_exactness },
    Criterion { id: 2, title: "closed-form correlation law", budget: secs(30), check: correlation_law },
    Criterion { id: 3, title: "S(N) converges to -9/(2pi^2)", budget: secs(10), check: theorem1_convergence },
    Criterion { id: 4, title: "fast/naive S(N) equal, N<=300", budget: secs(60), check: fast_naive_equivalence },
    Criterion { id: 5, title: "sum mu^2/n^2 near 15/pi^2", budget: None, check: zeta_ratio },
    Criterion { id: 6, title: "square-free density", budget: None, check: squarefree_density },
    Criterion { id: 7, title: "Mertens smallness and decay", budget: None, check: mertens_smallness },
    Criterion { id: 8, title: "Abel identity suite", budget: None, check: abel_suite },
    Criterion { id: 9, title: "Lemma 1 convergence trend", budget: None, check: lemma1_trend },
    Criterion { id: 10, title: "squared identity", budget: None, check: squared_identity },
    Criterion { id: 11, title: "figure 1 golden + structure", budget: None, check: figure1_reproduction },
    Criterion { id: 12, title: "Mertens tail integrals", budget: None, check: tail_diagnostics },
];

pub fn criterion_count() -> usize {
    CRITERIA.len()
}

/// Runs criterion `id` (1-based). Errors count as failures.
pub fn run_criterion(ctx: &Context, id: u32) -> CriterionResult {
    let crit = &CRITERIA[id as usize - 1];
    let start = Instant::now();
    let outcome = (crit.check)(ctx);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(budget) = crit.budget {
        if elapsed > budget {
            passed = false;
            detail.push_str(&format!("; over the {}s budget", budget.as_secs()));
        }
    }
    CriterionResult {
        id: crit.id,
        title: crit.title,
        passed,
        detail,
        elapsed,
    }
}

pub fn run_all(ctx: &Context) -> Vec<CriterionResult> {
    (1..=CRITERIA.len() as u32).map(|id| run_criterion(ctx, id)).collect()
}

fn lemma2_exactness(_: &Context) -> Result<(bool, String)> {
    let third = rational(1, 3);
    let mut bad = Vec::new();
    for n in 1..=1_000 {
        for x in [1, 7, 100] {
            if exact::expected_correlation(n, n, x)?.value != third {
                bad.push((n, x));
            }
        }
    }
    let detail = match bad.first() {
        None => "3000 cases, all equal 1/3".to_string(),
        Some(first) => format!("3000 cases, {} off 1/3, first {first:?}", bad.len()),
    };
    Ok((bad.is_empty(), detail))
}

/// Quadrature panels per piece; the midpoint error on a piece of width h is
/// nm·h³/(12·panels²), below 1e-9 in total for n, m ≤ 200.
const QUADRATURE_PANELS: usize = 10_000;

fn correlation_law(_: &Context) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
    let mut worst_quad: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(1..=200u64);
        let m = rng.random_range(1..=200u64);
        let law = exact::closed_form_correlation(n, m)?;
        let law_f = num_traits::ToPrimitive::to_f64(&law).unwrap_or(f64::NAN);
        let quad = oracle::midpoint_correlation(n, m, QUADRATURE_PANELS);
        worst_quad = worst_quad.max((law_f - quad).abs());
    }
    if !(worst_quad < 1e-9) {
        return Ok((false, format!("law vs quadrature off by {worst_quad:e}")));
    }
    let pairs: Vec<(u64, u64)> = (1..=200).flat_map(|n| (1..=200).map(move |m| (n, m))).collect();
    let mismatches = crate::exec::map_range(crate::exec::Execution::default(), 0..pairs.len(), |i| {
        let (n, m) = pairs[i];
        let a = exact::exact_correlation(n, m).ok();
        let b = exact::closed_form_correlation(n, m).ok();
        (a.is_none() || a != b) as usize
    })
    .into_iter()
    .sum::<usize>();
    Ok((
        mismatches == 0,
        format!("quadrature max |diff| {worst_quad:.1e} on 20 pairs; {mismatches}/40000 exact mismatches"),
    ))
}

fn theorem1_convergence(ctx: &Context) -> Result<(bool, String)> {
    let e100 = series::theorem1_partial_fast(&ctx.table, 100, false)?.abs_error();
    let e2000 = series::theorem1_partial_fast(&ctx.table, 2_000, false)?.abs_error();
    Ok((
        e100 < 0.05 && e2000 < 0.01,
        format!("target {THEOREM1_LIMIT:.6}; |err| at 100: {e100:.3e} (<0.05), at 2000: {e2000:.3e} (<0.01)"),
    ))
}

fn fast_naive_equivalence(ctx: &Context) -> Result<(bool, String)> {
    let naive = series::theorem1_naive_sweep_exact(&ctx.table, 300)?;
    let mut first_bad = None;
    for (i, want) in naive.iter().enumerate() {
        let n = i as u64 + 1;
        let fast = series::theorem1_partial_fast(&ctx.table, n, true)?;
        if fast.value != SeriesValue::Exact(want.clone()) {
            first_bad = Some(n);
            break;
        }
    }
    let direct = series::theorem1_partial_naive(&ctx.table, 300, true)?;
    let direct_ok = direct.value == SeriesValue::Exact(naive[299].clone());
    Ok((
        first_bad.is_none() && direct_ok,
        match first_bad {
            None => format!("N=1..300 identical rationals; naive(300) direct pass agrees: {direct_ok}"),
            Some(n) => format!("first disagreement at N={n}"),
        },
    ))
}

fn zeta_ratio(ctx: &Context) -> Result<(bool, String)> {
    let v = ctx.table.squarefree_zeta2_partial(10_000)?.to_f64();
    let target = 15.0 / (PI * PI);
    let d = (v - target).abs();
    Ok((d < 2e-4, format!("|{v:.8} - {target:.8}| = {d:.3e} (<2e-4)")))
}

fn squarefree_density(ctx: &Context) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let q = ctx.table.squarefree_count(n)? as f64;
        let gap = (q - n as f64 * 6.0 / (PI * PI)).abs();
        let bound = 2.0 * (n as f64).sqrt();
        ok &= gap <= bound;
        parts.push(format!("N={n}: {gap:.2}<={bound:.0}"));
    }
    Ok((ok, parts.join(", ")))
}

fn mertens_smallness(ctx: &Context) -> Result<(bool, String)> {
    let cutoffs = [1_000u64, 10_000, 100_000, 1_000_000];
    let report = tails::classical_bound_report(&ctx.table, &cutoffs, tails::DEFAULT_BOUND_C)?;
    let last = report.mertens_ratio[3].abs();
    let small = last < 1e-3;
    let decay = report.check_decay();
    let ratios: Vec<String> = report.mertens_ratio.iter().map(|r| format!("{:.2e}", r.abs())).collect();
    let mut detail = format!("|M(N)|/N = [{}]; |M(1e6)|/1e6 < 1e-3: {small}", ratios.join(", "));
    if let Err(e) = &decay {
        detail.push_str(&format!("; {e}"));
    }
    Ok((small && decay.is_ok(), detail))
}

fn abel_suite(ctx: &Context) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xABE1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = rng.random_range(2..=10_000u64);
        let n = rng.random_range(1..u);
        let q = rng.random_range(1..=50u64);
        let p = rng.random_range(1..=3 * q);
        let x = Rational::new((p as i64).into(), (q as i64).into());
        worst = worst.max(tails::abel_identity_check(&ctx.table, n, u, &x)?);
    }
    Ok((worst < 1e-9, format!("100 random triples, max residual {worst:.2e} (<1e-9)")))
}

fn lemma1_trend(ctx: &Context) -> Result<(bool, String)> {
    let mean_err = |n: u64| -> Result<f64> {
        let mut acc = 0.0;
        for i in 1..=9 {
            let x = i as f64 / 10.0;
            acc += series::residual_eps(&ctx.table, n, x)?.abs();
        }
        Ok(acc / 9.0)
    };
    let (e_lo, e_hi) = (mean_err(100)?, mean_err(100_000)?);
    Ok((
        e_hi < e_lo / 3.0,
        format!("mean |err| N=1e2: {e_lo:.4e}, N=1e5: {e_hi:.4e} (ratio {:.3} < 1/3)", e_hi / e_lo),
    ))
}

fn squared_identity(ctx: &Context) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in [50, 200, 500] {
        for x in [0.1, 0.3, 0.7] {
            worst = worst.max(series::squared_identity_check(&ctx.table, n, x)?);
        }
    }
    Ok((worst < 1e-10, format!("max |lhs - rhs| {worst:.2e} (<1e-10)")))
}

fn figure1_reproduction(ctx: &Context) -> Result<(bool, String)> {
    let mut out = Vec::new();
    cli::cmd_figure1(&ctx.config, &mut out)?;
    let text = String::from_utf8_lossy(&out);
    let golden_ok = ctx.config.precision_digits != 15 || text == FIGURE1_GOLDEN;

    let v: Vec<Rational> = (1..=12).map(|n| exact::exact_correlation(n, 6)).collect::<Result<_>>()?;
    let at = |n: u64| &v[n as usize - 1];
    let closed_ok = (1..=12).all(|n| exact::closed_form_correlation(n, 6).ok().as_ref() == Some(at(n)));
    let peaks_ok = [6, 12]
        .iter()
        .all(|&p| (1..=12).filter(|&n| gcd(n, 6) < 6).all(|n| at(p) > at(n)));
    let minima_ok = [5, 7, 11]
        .iter()
        .all(|&lo| (1..=12).filter(|&n| gcd(n, 6) > 1).all(|n| at(lo) < at(n)));
    let repeated = if at(4) < at(2) { "E(4,6) < E(2,6)" } else { "E(4,6) >= E(2,6)" };
    let ties: Vec<String> = [6u64, 12]
        .iter()
        .flat_map(|&p| {
            (1..=12u64)
                .filter(move |&n| gcd(n, 6) < 6)
                .filter(move |&n| at(n) >= at(p))
                .map(move |n| format!("E({n},6) >= E({p},6) = {}", crate::format::exact(at(p))))
        })
        .collect();
    let repeated = if ties.is_empty() {
        repeated.to_string()
    } else {
        format!("{repeated}; {}", ties.join(", "))
    };
    Ok((
        golden_ok && closed_ok && peaks_ok && minima_ok,
        format!(
            "golden match: {golden_ok}, closed form: {closed_ok}, peaks at 6,12: {peaks_ok}, minima at 5,7,11: {minima_ok}; note {repeated}"
        ),
    ))
}

fn tail_diagnostics(ctx: &Context) -> Result<(bool, String)> {
    let t = &ctx.table;
    let full = tails::tail_integral_u2(t, 1, 1_000_000)?;
    let mut worst: f64 = 0.0;
    for (a, b, c) in [(1u64, 1_000u64, 1_000_000u64), (10, 54_321, 999_999), (100_000, 100_001, 100_002)] {
        let s2 = tails::tail_integral_u2(t, a, b)? + tails::tail_integral_u2(t, b, c)?;
        worst = worst.max((s2 - tails::tail_integral_u2(t, a, c)?).abs());
        let s1 = tails::tail_integral_u1(t, a, b)? + tails::tail_integral_u1(t, b, c)?;
        worst = worst.max((s1 - tails::tail_integral_u1(t, a, c)?).abs());
    }
    Ok((
        full.abs() < 0.05 && worst < 1e-12,
        format!("int_1^1e6 M/u^2 = {full:.3e} (|.|<0.05); additivity max {worst:.1e} (<1e-12)"),
    ))
}

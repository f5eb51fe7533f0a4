//! Floating-point reference routines used to validate the exact engines.
//! Nothing here shares code with the exact paths it checks.

use crate::exec::Neumaier;

#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Composite midpoint rule for ∫₀¹ {nx}{mx} dx with `panels` panels on every
/// piece between consecutive breakpoints k/n, j/m.
pub fn midpoint_correlation(n: u64, m: u64, panels: usize) -> f64 {
    let mut cuts: Vec<f64> = (0..=n)
        .map(|k| k as f64 / n as f64)
        .chain((0..=m).map(|j| j as f64 / m as f64))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let (nf, mf) = (n as f64, m as f64);
    let mut acc = Neumaier::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / panels as f64;
        for i in 0..panels {
            let x = a + (i as f64 + 0.5) * h;
            acc.add(frac(nf * x) * frac(mf * x) * h);
        }
    }
    acc.value()
}

/// Composite Simpson rule on [a, b] with an even number of panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut acc = Neumaier::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

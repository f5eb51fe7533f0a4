use fraclab::arithmetic::moebius_by_trial_division;
use fraclab::tails;
use fraclab::{build_tables, MoebiusTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn table() -> &'static MoebiusTable {
    static T: OnceLock<MoebiusTable> = OnceLock::new();
    T.get_or_init(|| build_tables(1_000_000).unwrap())
}

#[test]
fn mertens_at_decades() {
    let t = table();
    let got: Vec<i64> = [1_000, 10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| t.mertens(n).unwrap())
        .collect();
    assert_eq!(got, [2, -23, -48, 212]);
}

#[test]
fn sampled_entries_match_trial_division() {
    let t = table();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..2_000 {
        let n = rng.random_range(1..=1_000_000u64);
        assert_eq!(t.mu(n).unwrap(), moebius_by_trial_division(n), "n={n}");
    }
}

#[test]
fn squarefree_count_near_density() {
    let t = table();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let q = t.squarefree_count(n).unwrap() as f64;
        let gap = (q - 6.0 / std::f64::consts::PI.powi(2) * n as f64).abs();
        assert!(gap <= 2.0 * (n as f64).sqrt(), "N={n} gap {gap}");
    }
    assert_eq!(t.squarefree_count(1_000_000).unwrap(), 607_926);
}

#[test]
fn tail_u1_values() {
    // Frozen from an independent float64 evaluation of sum M(k) ln(1+1/k).
    let t = table();
    for (n, want) in [(100u64, -31.4216), (1_000, -27.1090), (10_000, -22.1565)] {
        let got = tails::tail_integral_u1(t, n, 1_000_000).unwrap();
        assert!((got - want).abs() < 1e-3, "N={n}: {got}");
    }
}

#[test]
fn tail_u2_value() {
    let got = tails::tail_integral_u2(table(), 1, 1_000_000).unwrap();
    assert!((got + 1.14e-5).abs() < 1e-7, "{got}");
}

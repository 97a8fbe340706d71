use ealab::theory::{drift_onemax, drift_onemax_exact, optimal_flip_table};
use ealab::variation::mutate_flip;
use ealab::{BitString, RandomSource};
use num_rational::Ratio;

/// Sum of `max(gain, 0)` over every flip set of size `l` and the number of
/// such sets, for a string whose ones are the `v` lowest positions.
fn enumerate(n: usize, v: usize, l: usize) -> (i128, i128) {
    let ones_mask: u32 = (1u32 << v) - 1;
    let (mut total, mut sets) = (0i128, 0i128);
    for flips in 0u32..(1 << n) {
        if flips.count_ones() as usize != l {
            continue;
        }
        let lost = (flips & ones_mask).count_ones() as i128;
        let gained = l as i128 - lost;
        total += (gained - lost).max(0);
        sets += 1;
    }
    (total, sets)
}

#[test]
fn drift_matches_rational_enumeration_up_to_twelve() {
    for n in 1..=12 {
        for v in 0..n {
            for l in 1..=n {
                let (total, sets) = enumerate(n, v, l);
                let oracle = Ratio::new(total, sets);
                let exact: Ratio<i128> = drift_onemax_exact(n, v, l).unwrap();
                assert_eq!(exact, oracle, "n={n} v={v} l={l}");
                let float = drift_onemax::<f64>(n, v, l).unwrap();
                let want = total as f64 / sets as f64;
                assert!((float - want).abs() <= 1e-14 * want.max(1.0), "n={n} v={v} l={l}");
            }
        }
    }
}

#[test]
fn flip_table_matches_brute_force_argmax_at_twenty() {
    let n = 20;
    let table = optimal_flip_table::<f64>(n).unwrap();
    assert_eq!(table.entries.len(), n);
    for v in 0..n {
        // Compare total/sets fractions exactly by cross-multiplication.
        let mut best: Option<(usize, i128, i128)> = None;
        for l in 1..=n {
            let (t, s) = enumerate(n, v, l);
            match best {
                Some((_, bt, bs)) if t * bs <= bt * s => {}
                _ => best = Some((l, t, s)),
            }
        }
        let (l_star, t, s) = best.unwrap();
        assert_eq!(table.entries[v].flips, l_star, "v={v}");
        assert!((table.entries[v].drift - t as f64 / s as f64).abs() < 1e-12);
    }
    assert_eq!(table.entries[0].flips, n);
    assert_eq!(table.entries[n - 1].flips, 1);
}

#[test]
fn drift_agrees_with_simulation_at_thirty() {
    let n = 30;
    let samples = 200_000;
    let mut rng = RandomSource::new(30);
    for v in [0, 3, 10, 15, 22, 29] {
        let x = BitString::from_bools(&(0..n).map(|i| i < v).collect::<Vec<_>>());
        for l in [1, 2, 3, 6, 11, 20, 30] {
            let (mut sum, mut sq) = (0.0, 0.0);
            for _ in 0..samples {
                let y = mutate_flip(&x, l, &mut rng).unwrap();
                let g = (y.count_ones() as f64 - v as f64).max(0.0);
                sum += g;
                sq += g * g;
            }
            let mean = sum / samples as f64;
            let se = ((sq / samples as f64 - mean * mean).max(0.0) / (samples - 1) as f64).sqrt();
            let exact = drift_onemax::<f64>(n, v, l).unwrap();
            assert!((mean - exact).abs() <= 3.0 * se + 1e-12, "v={v} l={l}: {mean} vs {exact} (se {se})");
        }
    }
}

#[test]
fn large_dimension_drift_is_finite_and_consistent() {
    for n in [61, 500, 5000] {
        for v in [0, n / 3, n / 2, n - 1] {
            let one = drift_onemax::<f64>(n, v, 1).unwrap();
            assert!((one - (n - v) as f64 / n as f64).abs() < 1e-12);
            for l in [2, 7, n / 2, n] {
                let d = drift_onemax::<f64>(n, v, l).unwrap();
                assert!(d.is_finite() && d >= 0.0);
                assert!(d <= l as f64);
            }
        }
    }
    // At the boundary between the exact and the log-space paths.
    for v in [0, 20, 59] {
        for l in [1, 5, 30, 60] {
            let exact: Ratio<i128> = drift_onemax_exact(60, v, l).unwrap();
            let want = *exact.numer() as f64 / *exact.denom() as f64;
            let got = drift_onemax::<f64>(60, v, l).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.max(1.0));
        }
    }
}

use ealab::variation::{
    sample_binomial, sample_binomial_positive, sample_binomial_positive_by_rejection,
};
use ealab::RandomSource;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

const DRAWS: usize = 1_000_000;

/// Chi-square goodness-of-fit p-value of `counts` against `probs`, pooling
/// adjacent cells until each expects at least five observations.
fn chi_square_p_value(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        obs += c as f64;
        exp += p * total as f64;
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += obs;
        last.1 += exp;
    }
    if cells.len() < 2 {
        return 1.0;
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    ChiSquared::new((cells.len() - 1) as f64).unwrap().sf(stat)
}

fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let b = Binomial::new(p, n).unwrap();
    (0..=n).map(|k| b.pmf(k)).collect()
}

fn grid() -> impl Iterator<Item = (u64, f64)> {
    [1u64, 4, 10, 100]
        .into_iter()
        .flat_map(|n| [0.01, 0.1, 0.5].into_iter().map(move |p| (n, p)))
}

#[test]
fn binomial_sampler_matches_pmf() {
    for (i, (n, p)) in grid().enumerate() {
        let mut rng = RandomSource::new(1000 + i as u64);
        let mut counts = vec![0u64; n as usize + 1];
        for _ in 0..DRAWS {
            counts[sample_binomial(n, p, &mut rng).unwrap() as usize] += 1;
        }
        let pv = chi_square_p_value(&counts, &binomial_pmf(n, p));
        assert!(pv > 0.001, "Bin({n}, {p}): p-value {pv}");
    }
}

#[test]
fn conditional_sampler_matches_renormalized_pmf_and_never_returns_zero() {
    for (i, (n, p)) in grid().enumerate() {
        let mut rng = RandomSource::new(2000 + i as u64);
        let mut counts = vec![0u64; n as usize + 1];
        for _ in 0..DRAWS {
            let k = sample_binomial_positive(n, p, &mut rng).unwrap();
            assert!(k >= 1 && k <= n);
            counts[k as usize] += 1;
        }
        let mut pmf = binomial_pmf(n, p);
        let zero = pmf[0];
        pmf[0] = 0.0;
        pmf.iter_mut().for_each(|q| *q /= 1.0 - zero);
        let pv = chi_square_p_value(&counts[1..], &pmf[1..]);
        assert!(pv > 0.001, "Bin>0({n}, {p}): p-value {pv}");
    }
}

#[test]
fn small_case_pmf_sixteenths() {
    let mut rng = RandomSource::new(4);
    let mut counts = [0u64; 5];
    for _ in 0..DRAWS {
        counts[sample_binomial(4, 0.5, &mut rng).unwrap() as usize] += 1;
    }
    let probs: Vec<f64> = [1.0, 4.0, 6.0, 4.0, 1.0].iter().map(|c| c / 16.0).collect();
    assert!(chi_square_p_value(&counts, &probs) > 0.001);
}

#[test]
fn conditional_never_zero_at_ten_trials() {
    let mut rng = RandomSource::new(10);
    for _ in 0..DRAWS {
        assert_ne!(sample_binomial_positive(10, 0.3, &mut rng).unwrap(), 0);
    }
}

#[test]
fn rejection_backend_has_the_same_law() {
    let (n, p) = (50u64, 0.02);
    let mut a = RandomSource::new(1);
    let mut b = RandomSource::new(2);
    let mut ca = vec![0u64; n as usize + 1];
    let mut cb = vec![0u64; n as usize + 1];
    for _ in 0..200_000 {
        ca[sample_binomial_positive(n, p, &mut a).unwrap() as usize] += 1;
        cb[sample_binomial_positive_by_rejection(n, p, &mut b).unwrap() as usize] += 1;
    }
    // Two-sample homogeneity test, pooling cells with fewer than ten observations.
    let (na, nb) = (ca.iter().sum::<u64>() as f64, cb.iter().sum::<u64>() as f64);
    let mut cells = Vec::new();
    let (mut a_acc, mut b_acc) = (0.0, 0.0);
    for k in 0..=n as usize {
        a_acc += ca[k] as f64;
        b_acc += cb[k] as f64;
        if a_acc + b_acc >= 10.0 {
            cells.push((a_acc, b_acc));
            (a_acc, b_acc) = (0.0, 0.0);
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += a_acc;
        last.1 += b_acc;
    }
    let (ra, rb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let stat: f64 = cells
        .iter()
        .map(|&(a, b)| (ra * a - rb * b).powi(2) / (a + b))
        .sum();
    let pv = ChiSquared::new((cells.len() - 1) as f64).unwrap().sf(stat);
    assert!(pv > 0.001, "p-value {pv}");
}

#[test]
fn samplers_are_deterministic_in_the_stream() {
    for seed in 0..5 {
        let mut a = RandomSource::new(seed);
        let mut b = RandomSource::new(seed);
        for _ in 0..1000 {
            assert_eq!(
                sample_binomial(200, 0.07, &mut a),
                sample_binomial(200, 0.07, &mut b)
            );
            assert_eq!(
                sample_binomial_positive(200, 0.002, &mut a),
                sample_binomial_positive(200, 0.002, &mut b)
            );
        }
    }
}

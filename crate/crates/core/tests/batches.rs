use ealab::engine::{write_profiles_long_csv, write_runs_csv};
use ealab::experiments::{
    empirical_crossover, run_batch, summarize, unbiasedness_check, write_profiles_csv, write_summary_csv,
    BatchResult, ProfileAggregate,
};
use ealab::{AlgorithmConfig, BatchConfig64, BitString, Objective64, RandomSource};

fn alg(name: &str) -> AlgorithmConfig {
    name.parse().unwrap()
}

fn all_csv(config: &BatchConfig64, result: &BatchResult<f64>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &[(config, result)]).unwrap();
    write_profiles_csv(&mut buf, &[(config.algorithm.name(), &result.profile)]).unwrap();
    write_runs_csv(&mut buf, &result.run_records(config)).unwrap();
    write_profiles_long_csv(&mut buf, result.outcomes.iter().map(|o| (o.seed, &o.profile))).unwrap();
    buf
}

#[test]
fn summary_of_one_to_hundred() {
    let xs: Vec<f64> = (1..=100).map(f64::from).collect();
    let s = summarize(&xs).unwrap();
    assert_eq!(s.mean, 50.5);
    // Sample variance of 1..=N is N(N+1)/12.
    assert!((s.stddev - (100.0f64 * 101.0 / 12.0).sqrt()).abs() < 1e-12);
    assert_eq!(s.percentiles, [2.0, 25.0, 50.0, 75.0, 98.0]);
    assert_eq!(s.percentile(50), Some(50.0));
    assert_eq!(s.percentile(10), None);
    let small = summarize(&[3.0, 1.0, 2.0]).unwrap();
    assert_eq!(small.percentiles, [1.0, 1.0, 2.0, 3.0, 3.0]);
    assert!(summarize::<f64>(&[]).is_err());
}

#[test]
fn batches_are_byte_identical_across_executions_and_worker_counts() {
    let obj = Objective64::onemax(80).unwrap();
    for name in ["ea", "ollga-mod", "greedy-ga-mod"] {
        let config = BatchConfig64::new(alg(name), obj.clone()).runs(24).seed(9);
        let a = all_csv(&config, &run_batch(&config).unwrap());
        let b = all_csv(&config, &run_batch(&config).unwrap());
        let one = config.clone().workers(Some(1));
        let c = all_csv(&one, &run_batch(&one).unwrap());
        let three = config.clone().workers(Some(3));
        let d = all_csv(&three, &run_batch(&three).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
    }
}

#[test]
fn batch_seeds_are_consecutive_and_failures_counted() {
    let obj = Objective64::leading_ones(60).unwrap();
    let config = BatchConfig64::new(alg("rls"), obj).runs(5).seed(100).budget(50);
    let result = run_batch(&config).unwrap();
    let seeds: Vec<u64> = result.outcomes.iter().map(|o| o.seed).collect();
    assert_eq!(seeds, [100, 101, 102, 103, 104]);
    assert_eq!(result.failures, 5);
    assert!(result.summary.is_none());
    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &[(&config, &result)]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "rls,leadingones,60,5,,,,,,,");
    assert!(run_batch(&config.clone().runs(0)).is_err());
}

#[test]
fn csv_headers() {
    let obj = Objective64::onemax(10).unwrap();
    let config = BatchConfig64::new(alg("rls"), obj).runs(3);
    let result = run_batch(&config).unwrap();
    let text = String::from_utf8(all_csv(&config, &result)).unwrap();
    let headers: Vec<&str> = text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_lowercase()) && !l.starts_with("rls")).collect();
    assert_eq!(
        headers,
        [
            "algorithm,objective,n,runs,mean,stddev_over_mean,p2,p25,p50,p75,p98",
            "algorithm,level,mean,p25,p75",
            "algorithm,objective,n,seed,cost_model,hit_optimum,total_evaluations",
            "seed,level,evaluations",
        ]
    );
}

#[test]
fn aggregate_means_increase_with_level() {
    let obj = Objective64::onemax(100).unwrap();
    let result = run_batch(&BatchConfig64::new(alg("ea"), obj).runs(30)).unwrap();
    let means: Vec<f64> = (0..=100).map(|l| result.profile.mean(l).unwrap()).collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(result.profile.levels[100].excluded, 0);
    assert_eq!(means[100], result.summary.unwrap().mean);
}

#[test]
fn empirical_crossover_between_rls_and_the_resampling_ea() {
    // On LeadingOnes the resampling EA leads early and RLS overtakes it late.
    let obj = Objective64::leading_ones(120).unwrap();
    let ea = run_batch(&BatchConfig64::new(alg("ea-resample"), obj.clone()).runs(200).seed(1)).unwrap();
    let rls = run_batch(&BatchConfig64::new(alg("rls"), obj).runs(200).seed(1)).unwrap();
    let k = empirical_crossover(&ea.profile, &rls.profile).unwrap();
    assert!(k > 60 && k <= 120, "{k}");
    let same: ProfileAggregate<f64> = rls.profile.clone();
    assert_eq!(empirical_crossover(&same, &rls.profile), None);
}

#[test]
fn unary_variants_are_unbiased() {
    let n = 100;
    let mut rng = RandomSource::new(2024);
    let targets: Vec<BitString> = (0..20).map(|_| BitString::random(n, &mut rng)).collect();
    for name in ["rls", "ea", "ea-resample", "ea-shift", "rls-opt"] {
        for (i, z) in targets.iter().enumerate() {
            assert!(unbiasedness_check(&alg(name), n, z, i as u64).unwrap(), "{name} z={z}");
        }
    }
}

#[test]
fn crossover_based_algorithms_are_unbiased() {
    let n = 64;
    let mut rng = RandomSource::new(7);
    for name in ["ollga", "ollga-mod", "greedy-ga", "greedy-ga-mod"] {
        for seed in 0..5 {
            let z = BitString::random(n, &mut rng);
            assert!(unbiasedness_check(&alg(name), n, &z, seed).unwrap(), "{name}");
        }
    }
}

#[test]
fn unbiasedness_check_rejects_a_length_mismatch() {
    assert!(unbiasedness_check(&alg("rls"), 10, &BitString::zeros(11), 0).is_err());
}

//! Batches of independent runs, appendix-style summary statistics, profile
//! aggregation and the coupling check for unbiasedness.

use std::io;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algorithms::{AlgorithmConfig, ConfigError, PreparedAlgorithm};
use crate::bits::BitString;
use crate::engine::{default_budget, run_with, CostModel, RunObserver, RunOutcome, RunRecord};
use crate::objectives::Objective;
use crate::rng::RandomSource;
use crate::scalar::Scalar;

/// Percentile levels reported for every batch.
pub const PERCENTILES: [u32; 5] = [2, 25, 50, 75, 98];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("cannot summarize an empty sample")]
    Empty,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("a batch needs at least one run")]
    NoRuns,
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Mean, spread and nearest-rank percentiles of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SummaryStats<T> {
    pub count: usize,
    pub mean: T,
    /// Sample standard deviation (divisor `N - 1`; zero for one sample).
    pub stddev: T,
    /// `100 · stddev / mean`.
    pub stddev_over_mean: T,
    /// Values at [`PERCENTILES`], in that order.
    pub percentiles: [T; 5],
}

impl<T: Scalar> SummaryStats<T> {
    /// Value at percentile `q`, if `q` is one of [`PERCENTILES`].
    pub fn percentile(&self, q: u32) -> Option<T> {
        PERCENTILES
            .iter()
            .position(|&p| p == q)
            .map(|i| self.percentiles[i])
    }
}

/// Summary statistics with nearest-rank percentiles: percentile `q` is the
/// `⌈qN/100⌉`-th smallest sample.
pub fn summarize<T: Scalar>(samples: &[T]) -> Result<SummaryStats<T>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    let count = samples.len();
    let n_t = T::of_u64(count as u64);
    let mean = samples.iter().fold(T::zero(), |a, &x| a + x) / n_t;
    let stddev = if count > 1 {
        let ss = samples
            .iter()
            .fold(T::zero(), |a, &x| a + (x - mean) * (x - mean));
        (ss / (n_t - T::one())).sqrt()
    } else {
        T::zero()
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples are not NaN"));
    let percentiles = PERCENTILES.map(|q| {
        let rank = (q as usize * count).div_ceil(100).max(1);
        sorted[rank - 1]
    });
    Ok(SummaryStats {
        count,
        mean,
        stddev,
        stddev_over_mean: T::lit(100.0) * stddev / mean,
        percentiles,
    })
}

/// Statistics of the first-hitting times of one level across a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelStats<T> {
    pub level: usize,
    /// `None` when no run reached the level.
    pub stats: Option<SummaryStats<T>>,
    /// Runs that never reached the level.
    pub excluded: usize,
}

/// Per-level summary of runtime profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileAggregate<T> {
    pub levels: Vec<LevelStats<T>>,
}

impl<T: Scalar> ProfileAggregate<T> {
    pub fn from_outcomes<F>(n: usize, outcomes: &[RunOutcome<F>]) -> Self {
        let levels = (0..=n)
            .map(|level| {
                let hits: Vec<T> = outcomes
                    .iter()
                    .filter_map(|o| o.profile.get(level))
                    .map(T::of_u64)
                    .collect();
                LevelStats {
                    level,
                    excluded: outcomes.len() - hits.len(),
                    stats: summarize(&hits).ok(),
                }
            })
            .collect();
        Self { levels }
    }

    pub fn mean(&self, level: usize) -> Option<T> {
        self.levels.get(level)?.stats.map(|s| s.mean)
    }
}

/// First level from which the mean profile of `a` stays strictly above that
/// of `b` up to the last level both have data for.
pub fn empirical_crossover<T: Scalar>(a: &ProfileAggregate<T>, b: &ProfileAggregate<T>) -> Option<usize> {
    let both: Vec<(usize, T, T)> = a
        .levels
        .iter()
        .zip(&b.levels)
        .filter_map(|(la, lb)| Some((la.level, la.stats?.mean, lb.stats?.mean)))
        .collect();
    let mut first = None;
    for &(level, ma, mb) in both.iter().rev() {
        if ma > mb {
            first = Some(level);
        } else {
            break;
        }
    }
    first
}

/// A batch of independent runs; run `i` uses seed `base_seed + i`.
#[derive(Clone, Debug)]
pub struct BatchConfig<T> {
    pub algorithm: AlgorithmConfig,
    pub objective: Objective<T>,
    pub cost_model: CostModel,
    pub runs: usize,
    pub base_seed: u64,
    pub budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl<T: Scalar> BatchConfig<T> {
    /// 100 runs from seed 0 under the algorithm's default cost model and the
    /// default budget.
    pub fn new(algorithm: AlgorithmConfig, objective: Objective<T>) -> Self {
        Self {
            cost_model: algorithm.default_cost_model(),
            budget: default_budget(objective.dim()),
            algorithm,
            objective,
            runs: 100,
            base_seed: 0,
            workers: None,
        }
    }

    pub fn runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn cost_model(mut self, model: CostModel) -> Self {
        self.cost_model = model;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }
}

/// Outcomes of a batch in run order, with their summaries.
#[derive(Clone, Debug)]
pub struct BatchResult<T> {
    pub outcomes: Vec<RunOutcome<T>>,
    /// Over the total evaluations of the runs that hit the optimum.
    pub summary: Option<SummaryStats<f64>>,
    /// Runs that exhausted the budget.
    pub failures: usize,
    pub profile: ProfileAggregate<f64>,
}

impl<T: Scalar> BatchResult<T> {
    pub fn run_records<'a>(&self, config: &'a BatchConfig<T>) -> Vec<RunRecord<'a>> {
        self.outcomes
            .iter()
            .map(|o| RunRecord {
                algorithm: config.algorithm.name(),
                objective: config.objective.name(),
                n: config.objective.dim(),
                seed: o.seed,
                cost_model: config.cost_model.name(),
                hit_optimum: o.hit_optimum,
                total_evaluations: o.total_evaluations,
            })
            .collect()
    }
}

/// Executes the batch. Output is independent of the worker count.
pub fn run_batch<T: Scalar>(config: &BatchConfig<T>) -> Result<BatchResult<T>, BatchError> {
    if config.runs == 0 {
        return Err(BatchError::NoRuns);
    }
    let n = config.objective.dim();
    let prepared = config.algorithm.prepare(n, config.objective.kind())?;
    let one = |i: usize| {
        run_with(
            &prepared,
            &config.objective,
            config.cost_model,
            config.budget,
            config.base_seed.wrapping_add(i as u64),
            None,
            None,
        )
    };
    let outcomes: Vec<RunOutcome<T>> = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()?
            .install(|| (0..config.runs).into_par_iter().map(one).collect::<Result<_, _>>())?,
        None => (0..config.runs)
            .into_par_iter()
            .map(one)
            .collect::<Result<_, _>>()?,
    };
    let hits: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.hit_optimum)
        .map(|o| o.total_evaluations as f64)
        .collect();
    Ok(BatchResult {
        summary: summarize(&hits).ok(),
        failures: outcomes.len() - hits.len(),
        profile: ProfileAggregate::from_outcomes(n, &outcomes),
        outcomes,
    })
}

/// Records the incumbent fitness after initialization and every iteration.
#[derive(Clone, Debug, Default)]
pub struct Trajectory<T>(pub Vec<T>);

impl<T: Scalar> RunObserver<T> for Trajectory<T> {
    fn on_step(&mut self, incumbent: T) {
        self.0.push(incumbent);
    }
}

/// Runs `config` on OneMax from random initial individuals and on `OM_z`
/// from their images under `x ↦ x XOR (1ⁿ XOR z)`, with the same seed, and
/// reports whether the two incumbent-fitness sequences coincide.
///
/// The initial individuals are drawn from a stream derived from `seed`,
/// separate from the run's own stream.
pub fn unbiasedness_check(config: &AlgorithmConfig, n: usize, z: &BitString, seed: u64) -> Result<bool, ConfigError> {
    let onemax = Objective::<f64>::onemax(n).map_err(|_| ConfigError::ZeroDimension)?;
    let shifted = Objective::<f64>::onemax_target(z.clone()).map_err(|_| ConfigError::ZeroDimension)?;
    if z.len() != n {
        return Err(ConfigError::InitialLength {
            expected: n,
            got: z.len(),
        });
    }
    let prepared = config.prepare(n, onemax.kind())?;
    let mut init_rng = RandomSource::new(seed ^ 0x5EED_0F_1A17);
    let init: Vec<BitString> = (0..config.population_size())
        .map(|_| BitString::random(n, &mut init_rng))
        .collect();
    let mask = z.complement();
    let mapped: Vec<BitString> = init.iter().map(|x| x.xor(&mask)).collect();
    let budget = default_budget(n);
    let model = config.default_cost_model();

    let trajectory = |obj: &Objective<f64>, start: &[BitString], p: &PreparedAlgorithm| {
        let mut t = Trajectory::default();
        let out = run_with(p, obj, model, budget, seed, Some(start), Some(&mut t))?;
        Ok::<_, ConfigError>((t.0, out.total_evaluations))
    };
    let a = trajectory(&onemax, &init, &prepared)?;
    let b = trajectory(&shifted, &mapped, &prepared)?;
    Ok(a == b)
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    algorithm: &'a str,
    objective: &'a str,
    n: usize,
    runs: usize,
    mean: f64,
    stddev_over_mean: f64,
    p2: f64,
    p25: f64,
    p50: f64,
    p75: f64,
    p98: f64,
}

const SUMMARY_HEADER: [&str; 11] = [
    "algorithm",
    "objective",
    "n",
    "runs",
    "mean",
    "stddev_over_mean",
    "p2",
    "p25",
    "p50",
    "p75",
    "p98",
];

/// One `summary.csv` row per batch. Batches where no run hit the optimum
/// are written with empty statistics.
pub fn write_summary_csv<W: io::Write, T: Scalar>(
    out: W,
    batches: &[(&BatchConfig<T>, &BatchResult<T>)],
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for (config, result) in batches {
        let algorithm = config.algorithm.name();
        let objective = config.objective.name();
        let n = config.objective.dim();
        match &result.summary {
            Some(s) => w.serialize(SummaryRow {
                algorithm,
                objective,
                n,
                runs: result.outcomes.len(),
                mean: s.mean,
                stddev_over_mean: s.stddev_over_mean,
                p2: s.percentiles[0],
                p25: s.percentiles[1],
                p50: s.percentiles[2],
                p75: s.percentiles[3],
                p98: s.percentiles[4],
            })?,
            None => {
                let (n, runs) = (n.to_string(), result.outcomes.len().to_string());
                let mut rec = vec![algorithm, objective, n.as_str(), runs.as_str()];
                rec.extend([""; 7]);
                w.write_record(rec)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    algorithm: &'a str,
    level: usize,
    mean: f64,
    p25: f64,
    p75: f64,
}

/// `profiles.csv`: `algorithm,level,mean,p25,p75`, skipping levels no run
/// reached.
pub fn write_profiles_csv<W: io::Write>(
    out: W,
    profiles: &[(&str, &ProfileAggregate<f64>)],
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["algorithm", "level", "mean", "p25", "p75"])?;
    for (algorithm, agg) in profiles {
        for l in &agg.levels {
            if let Some(s) = l.stats {
                w.serialize(ProfileRow {
                    algorithm,
                    level: l.level,
                    mean: s.mean,
                    p25: s.percentiles[1],
                    p75: s.percentiles[3],
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

//! Evaluation accounting, runtime-profile recording and the run loop.

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::algorithms::{AlgorithmConfig, ConfigError, PreparedAlgorithm};
use crate::bits::BitString;
use crate::objectives::Objective;
use crate::rng::RandomSource;
use crate::scalar::Scalar;

/// Whether creating an offspring bit-identical to one of its designated
/// parents costs a fitness evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostModel {
    /// Every created offspring is evaluated and charged.
    CountAll,
    /// Offspring equal to a designated parent inherit its fitness for free.
    SkipParentEqual,
}

impl CostModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::CountAll => "count-all",
            Self::SkipParentEqual => "skip-parent-equal",
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown cost model {0:?} (expected count-all or skip-parent-equal)")]
pub struct UnknownCostModel(pub String);

impl FromStr for CostModel {
    type Err = UnknownCostModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "count-all" | "countall" | "all" => Ok(Self::CountAll),
            "skip-parent-equal" | "skipparentequal" | "skip" => Ok(Self::SkipParentEqual),
            _ => Err(UnknownCostModel(s.to_string())),
        }
    }
}

/// Counter of charged fitness evaluations with a hard cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvaluationLedger {
    charged: u64,
    budget: u64,
}

impl EvaluationLedger {
    pub fn new(budget: u64) -> Self {
        Self { charged: 0, budget }
    }

    pub fn charged(&self) -> u64 {
        self.charged
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn exhausted(&self) -> bool {
        self.charged >= self.budget
    }
}

/// Default evaluation cap for dimension `n`: `max(1000 n ln n, 10 n²)`.
///
/// The quadratic term keeps LeadingOnes runs, whose expected runtime is
/// about `0.86 n²`, far from the cap at every dimension.
pub fn default_budget(n: usize) -> u64 {
    let n = n.max(2) as f64;
    (1000.0 * n * n.ln()).max(10.0 * n * n).ceil() as u64
}

/// First-hitting evaluation counts per fitness level for one run.
///
/// `first_hit[k]` is the ledger value at which the best-so-far level first
/// reached at least `k`; levels above the best reached level are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuntimeProfile {
    first_hit: Vec<u64>,
}

impl RuntimeProfile {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fills every level in `(previous best, level]` with `at`.
    pub fn record(&mut self, level: usize, at: u64) {
        if self.first_hit.len() <= level {
            self.first_hit.resize(level + 1, at);
        }
    }

    pub fn get(&self, level: usize) -> Option<u64> {
        self.first_hit.get(level).copied()
    }

    /// Highest level reached, if any evaluation was recorded.
    pub fn best_level(&self) -> Option<usize> {
        self.first_hit.len().checked_sub(1)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.first_hit
    }

    /// `(level, first_hit)` pairs in increasing level order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.first_hit.iter().copied().enumerate()
    }
}

/// Why a run stopped. Not an error: both variants end a run normally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    OptimumHit,
    BudgetExhausted,
}

/// Hooks into a run, for instrumentation and trajectory tests.
pub trait RunObserver<T> {
    /// Called for every offspring passed through the cost model.
    fn on_evaluation(&mut self, _offspring: &BitString, _parents: &[(&BitString, T)], _charged: bool) {}

    /// Called after initialization and after every completed iteration with
    /// the best fitness held in the algorithm's state.
    fn on_step(&mut self, _incumbent: T) {}
}

/// Applies the cost model, evaluates, and keeps the ledger and profile.
pub struct Evaluator<'a, T> {
    obj: &'a Objective<T>,
    model: CostModel,
    ledger: EvaluationLedger,
    profile: RuntimeProfile,
    best: Option<T>,
    hit: bool,
    observer: Option<&'a mut dyn RunObserver<T>>,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    pub fn new(
        obj: &'a Objective<T>,
        model: CostModel,
        budget: u64,
        observer: Option<&'a mut dyn RunObserver<T>>,
    ) -> Self {
        Self {
            obj,
            model,
            ledger: EvaluationLedger::new(budget),
            profile: RuntimeProfile::new(),
            best: None,
            hit: false,
            observer,
        }
    }

    pub fn objective(&self) -> &Objective<T> {
        self.obj
    }

    pub fn model(&self) -> CostModel {
        self.model
    }

    pub fn ledger(&self) -> EvaluationLedger {
        self.ledger
    }

    pub fn profile(&self) -> &RuntimeProfile {
        &self.profile
    }

    /// Fitness of `offspring` and whether it was charged.
    ///
    /// Under [`CostModel::SkipParentEqual`] an offspring equal to one of
    /// `parents` takes that parent's fitness and costs nothing. Returns
    /// `Err` when the optimum is evaluated or no budget is left for a
    /// required charge.
    pub fn charge_and_evaluate(
        &mut self,
        offspring: &BitString,
        parents: &[(&BitString, T)],
    ) -> Result<(T, bool), Stop> {
        if self.model == CostModel::SkipParentEqual {
            if let Some(&(_, f)) = parents.iter().find(|(p, _)| *p == offspring) {
                if let Some(o) = self.observer.as_deref_mut() {
                    o.on_evaluation(offspring, parents, false);
                }
                return Ok((f, false));
            }
        }
        if self.ledger.exhausted() {
            return Err(Stop::BudgetExhausted);
        }
        if let Some(o) = self.observer.as_deref_mut() {
            o.on_evaluation(offspring, parents, true);
        }
        self.charge(offspring).map(|f| (f, true))
    }

    /// Evaluates an initial individual. Always charged, and not subject to
    /// the budget: initialization is atomic.
    pub fn evaluate_initial(&mut self, x: &BitString) -> Result<T, Stop> {
        if let Some(o) = self.observer.as_deref_mut() {
            o.on_evaluation(x, &[], true);
        }
        self.charge(x)
    }

    fn charge(&mut self, x: &BitString) -> Result<T, Stop> {
        self.ledger.charged += 1;
        let (f, level) = self.obj.value_and_level(x);
        if self.best.is_none_or(|b| f > b) {
            self.best = Some(f);
            self.profile.record(level, self.ledger.charged);
        }
        if level == self.obj.dim() {
            self.hit = true;
            return Err(Stop::OptimumHit);
        }
        Ok(f)
    }

    pub(crate) fn notify_step(&mut self, incumbent: T) {
        if let Some(o) = self.observer.as_deref_mut() {
            o.on_step(incumbent);
        }
    }

    fn finish(self, seed: u64) -> RunOutcome<T> {
        RunOutcome {
            hit_optimum: self.hit,
            total_evaluations: self.ledger.charged,
            profile: self.profile,
            seed,
            final_best: self.best.unwrap_or_else(T::zero),
        }
    }
}

/// Result of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome<T> {
    pub hit_optimum: bool,
    /// Ledger value at the first optimum hit, or when the run stopped.
    pub total_evaluations: u64,
    pub profile: RuntimeProfile,
    pub seed: u64,
    pub final_best: T,
}

/// Runs `config` on `obj` from uniformly random initial individuals.
pub fn run<T: Scalar>(
    config: &AlgorithmConfig,
    obj: &Objective<T>,
    model: CostModel,
    budget: u64,
    seed: u64,
) -> Result<RunOutcome<T>, ConfigError> {
    let prepared = config.prepare(obj.dim(), obj.kind())?;
    run_with(&prepared, obj, model, budget, seed, None, None)
}

/// Runs a prepared algorithm, optionally from given initial individuals
/// (one per population slot) and with an observer attached.
pub fn run_with<'a, T: Scalar>(
    prepared: &PreparedAlgorithm,
    obj: &'a Objective<T>,
    model: CostModel,
    budget: u64,
    seed: u64,
    initial: Option<&[BitString]>,
    observer: Option<&'a mut dyn RunObserver<T>>,
) -> Result<RunOutcome<T>, ConfigError> {
    if budget == 0 {
        return Err(ConfigError::ZeroBudget);
    }
    prepared.check_objective(obj.dim(), obj.kind())?;
    if let Some(init) = initial {
        prepared.check_initial(init, obj.dim())?;
    }
    let mut rng = RandomSource::new(seed);
    let mut ev = Evaluator::new(obj, model, budget, observer);
    let _stop = drive(prepared, &mut ev, &mut rng, initial);
    Ok(ev.finish(seed))
}

fn drive<T: Scalar>(
    prepared: &PreparedAlgorithm,
    ev: &mut Evaluator<'_, T>,
    rng: &mut RandomSource,
    initial: Option<&[BitString]>,
) -> Stop {
    let mut state = match prepared.initialize(ev, rng, initial) {
        Ok(s) => s,
        Err(stop) => return stop,
    };
    ev.notify_step(state.incumbent());
    loop {
        if ev.ledger().exhausted() {
            return Stop::BudgetExhausted;
        }
        if let Err(stop) = state.step(prepared, ev, rng) {
            return stop;
        }
        ev.notify_step(state.incumbent());
    }
}

/// One line of `runs.csv`.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord<'a> {
    pub algorithm: &'a str,
    pub objective: &'a str,
    pub n: usize,
    pub seed: u64,
    pub cost_model: &'a str,
    pub hit_optimum: bool,
    pub total_evaluations: u64,
}

#[derive(Serialize)]
struct ProfileRow {
    seed: u64,
    level: usize,
    evaluations: u64,
}

/// Writes run rows with the header
/// `algorithm,objective,n,seed,cost_model,hit_optimum,total_evaluations`.
pub fn write_runs_csv<W: io::Write>(out: W, records: &[RunRecord<'_>]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([
        "algorithm",
        "objective",
        "n",
        "seed",
        "cost_model",
        "hit_optimum",
        "total_evaluations",
    ])?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes profiles in long format: `seed,level,evaluations`.
pub fn write_profiles_long_csv<'p, W: io::Write>(
    out: W,
    profiles: impl IntoIterator<Item = (u64, &'p RuntimeProfile)>,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["seed", "level", "evaluations"])?;
    for (seed, p) in profiles {
        for (level, evaluations) in p.iter() {
            w.serialize(ProfileRow {
                seed,
                level,
                evaluations,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

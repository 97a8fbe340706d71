//! The search heuristics: RLS, RLS_opt, the (1+1) EA family, the
//! self-adjusting (1+(λ,λ)) GA and the Greedy (2+1) GA.
//!
//! Every algorithm creates offspring through the [`Evaluator`], passing the
//! parents the offspring could coincide with. Whether such a coincidence is
//! charged is decided by the [`CostModel`](crate::engine::CostModel), never
//! by the algorithm itself.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::BitString;
use crate::engine::{Evaluator, Stop};
use crate::objectives::ObjectiveKind;
use crate::rng::RandomSource;
use crate::scalar::Scalar;
use crate::theory;
use crate::variation::{
    crossover_biased, mutate_flip, sample_binomial, sample_binomial_positive,
};
use crate::engine::CostModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown algorithm {0:?} (expected rls, rls-opt, ea, ea-resample, ea-shift, ollga, ollga-mod, greedy-ga, greedy-ga-mod)")]
    UnknownAlgorithm(String),
    #[error("malformed mutation rate {0:?} (expected a decimal or <c>/n)")]
    MalformedRate(String),
    #[error("mutation rate resolves to {0}, outside (0, 1)")]
    RateOutOfRange(f64),
    #[error("algorithm {0} has no mutation-rate parameter")]
    NoRateParameter(&'static str),
    #[error("update strength must exceed 1, got {0}")]
    UpdateStrength(f64),
    #[error("initial lambda must lie in [1, n], got {0}")]
    InitialLambda(f64),
    #[error("{algorithm} is only defined on OneMax-type objectives, not {objective}")]
    Objective {
        algorithm: &'static str,
        objective: &'static str,
    },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("prepared for n = {prepared}, objective has n = {objective}")]
    DimensionMismatch { prepared: usize, objective: usize },
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("expected {expected} initial individual(s), got {got}")]
    InitialCount { expected: usize, got: usize },
    #[error("initial individual has length {got}, expected {expected}")]
    InitialLength { expected: usize, got: usize },
}

/// How the mutation strength of standard bit mutation is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutationVariant {
    /// `ℓ ~ Bin(n, p)`.
    Plain,
    /// `ℓ ~ Bin_{>0}(n, p)`.
    Resample,
    /// `ℓ ~ Bin(n, p)`, with 0 replaced by 1.
    Shift,
}

impl MutationVariant {
    pub fn sample(self, n: usize, p: f64, rng: &mut RandomSource) -> usize {
        let n64 = n as u64;
        let k = match self {
            Self::Plain => sample_binomial(n64, p, rng),
            Self::Resample => sample_binomial_positive(n64, p, rng),
            Self::Shift => sample_binomial(n64, p, rng).map(|k| k.max(1)),
        };
        k.expect("rate validated when the algorithm was prepared") as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OllgaVariant {
    /// Every offspring evaluated; `ℓ ~ Bin(n, p)`; winner among the
    /// crossover offspring only.
    Vanilla,
    /// `ℓ ~ Bin_{>0}(n, p)`; the mutation winner joins the crossover pool.
    Mod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GreedyVariant {
    /// Standard bit mutation after every crossover.
    Sudholt,
    /// Crossover only between equally fit parents, and a positive mutation
    /// strength whenever the crossover reproduced a parent.
    Mod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParentalSelection {
    /// Two parents drawn with replacement among the fittest members.
    RandomPair,
    /// Both members recombined whenever they are equally fit.
    BothWhenEqual,
}

/// A mutation rate, possibly relative to the dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rate {
    Absolute(f64),
    /// `c / n`.
    PerDimension(f64),
}

impl Rate {
    pub fn resolve(self, n: usize) -> Result<f64, ConfigError> {
        let p = match self {
            Self::Absolute(p) => p,
            Self::PerDimension(c) => c / n as f64,
        };
        if p > 0.0 && p < 1.0 {
            Ok(p)
        } else {
            Err(ConfigError::RateOutOfRange(p))
        }
    }
}

impl FromStr for Rate {
    type Err = ConfigError;

    /// Accepts `0.001`, `1/n`, `1.59/n`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ConfigError::MalformedRate(s.to_string());
        let rate = match t.strip_suffix("/n") {
            Some(c) => Self::PerDimension(c.trim().parse().map_err(|_| bad())?),
            None => Self::Absolute(t.parse().map_err(|_| bad())?),
        };
        match rate {
            Self::Absolute(v) | Self::PerDimension(v) if v.is_finite() && v > 0.0 => Ok(rate),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Absolute(p) => write!(f, "{p}"),
            Self::PerDimension(c) => write!(f, "{c}/n"),
        }
    }
}

/// Mutation-rate factor of the Greedy GA_mod: the minimizer of its leading
/// runtime constant in the large-`n` limit.
pub const GREEDY_MOD_RATE: f64 = 0.773581;

/// Algorithm identity together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum AlgorithmConfig {
    Rls,
    /// RLS flipping the drift-maximizing number of bits for the current
    /// OneMax value.
    RlsOpt,
    OnePlusOne {
        variant: MutationVariant,
        rate: Rate,
    },
    /// Self-adjusting (1+(λ,λ)) GA with `p = λ/n` and `c = 1/λ`.
    Ollga {
        variant: OllgaVariant,
        update_strength: f64,
        initial_lambda: f64,
    },
    GreedyGa {
        variant: GreedyVariant,
        rate: Rate,
        selection: ParentalSelection,
    },
}

impl AlgorithmConfig {
    pub fn one_plus_one(variant: MutationVariant) -> Self {
        Self::OnePlusOne {
            variant,
            rate: Rate::PerDimension(1.0),
        }
    }

    pub fn ollga(variant: OllgaVariant) -> Self {
        Self::Ollga {
            variant,
            update_strength: 1.5,
            initial_lambda: 1.0,
        }
    }

    pub fn greedy_ga(variant: GreedyVariant) -> Self {
        match variant {
            GreedyVariant::Sudholt => Self::GreedyGa {
                variant,
                rate: Rate::PerDimension((1.0 + 5f64.sqrt()) / 2.0),
                selection: ParentalSelection::RandomPair,
            },
            GreedyVariant::Mod => Self::GreedyGa {
                variant,
                rate: Rate::PerDimension(GREEDY_MOD_RATE),
                selection: ParentalSelection::BothWhenEqual,
            },
        }
    }

    /// Replaces the mutation rate of algorithms that have one.
    pub fn with_rate(mut self, new: Rate) -> Result<Self, ConfigError> {
        match &mut self {
            Self::OnePlusOne { rate, .. } | Self::GreedyGa { rate, .. } => {
                *rate = new;
                Ok(self)
            }
            other => Err(ConfigError::NoRateParameter(other.name())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Rls => "rls",
            Self::RlsOpt => "rls-opt",
            Self::OnePlusOne { variant, .. } => match variant {
                MutationVariant::Plain => "ea",
                MutationVariant::Resample => "ea-resample",
                MutationVariant::Shift => "ea-shift",
            },
            Self::Ollga { variant, .. } => match variant {
                OllgaVariant::Vanilla => "ollga",
                OllgaVariant::Mod => "ollga-mod",
            },
            Self::GreedyGa { variant, .. } => match variant {
                GreedyVariant::Sudholt => "greedy-ga",
                GreedyVariant::Mod => "greedy-ga-mod",
            },
        }
    }

    /// Cost model the algorithm is normally run under: the modified
    /// variants skip parent-equal offspring, the others pay for everything.
    pub fn default_cost_model(&self) -> CostModel {
        match self {
            Self::Ollga {
                variant: OllgaVariant::Mod,
                ..
            }
            | Self::GreedyGa {
                variant: GreedyVariant::Mod,
                ..
            } => CostModel::SkipParentEqual,
            _ => CostModel::CountAll,
        }
    }

    /// Number of individuals sampled at initialization.
    pub fn population_size(&self) -> usize {
        match self {
            Self::GreedyGa { .. } => 2,
            _ => 1,
        }
    }

    /// Whether [`Self::with_rate`] applies.
    pub fn has_rate(&self) -> bool {
        matches!(self, Self::OnePlusOne { .. } | Self::GreedyGa { .. })
    }

    /// The checks of [`Self::prepare`] without building any table.
    pub fn validate(&self, n: usize, objective: ObjectiveKind) -> Result<(), ConfigError> {
        match self {
            Self::RlsOpt if n == 0 => Err(ConfigError::ZeroDimension),
            Self::RlsOpt if !objective.is_onemax_like() => Err(ConfigError::Objective {
                algorithm: self.name(),
                objective: objective.name(),
            }),
            Self::RlsOpt => Ok(()),
            _ => self.prepare(n, objective).map(drop),
        }
    }

    /// Resolves rates and precomputes per-dimension tables.
    pub fn prepare(&self, n: usize, objective: ObjectiveKind) -> Result<PreparedAlgorithm, ConfigError> {
        if n == 0 {
            return Err(ConfigError::ZeroDimension);
        }
        let plan = match self {
            Self::Rls => Plan::Rls,
            Self::RlsOpt => {
                let table = theory::optimal_flip_table::<f64>(n)
                    .expect("n is positive")
                    .flips();
                Plan::RlsOpt(Arc::new(table))
            }
            Self::OnePlusOne { variant, rate } => Plan::OnePlusOne {
                variant: *variant,
                p: rate.resolve(n)?,
            },
            Self::Ollga {
                variant,
                update_strength,
                initial_lambda,
            } => {
                if !(*update_strength > 1.0 && update_strength.is_finite()) {
                    return Err(ConfigError::UpdateStrength(*update_strength));
                }
                if !(*initial_lambda >= 1.0 && *initial_lambda <= n as f64) {
                    return Err(ConfigError::InitialLambda(*initial_lambda));
                }
                Plan::Ollga {
                    variant: *variant,
                    f: *update_strength,
                    lambda0: *initial_lambda,
                }
            }
            Self::GreedyGa {
                variant,
                rate,
                selection,
            } => Plan::Greedy {
                variant: *variant,
                p: rate.resolve(n)?,
                selection: *selection,
            },
        };
        let prepared = PreparedAlgorithm {
            config: self.clone(),
            n,
            plan,
        };
        prepared.check_objective(n, objective)?;
        Ok(prepared)
    }
}

impl fmt::Display for AlgorithmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmConfig {
    type Err = ConfigError;

    /// Parses an algorithm name into its default configuration.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "rls" => Self::Rls,
            "rls-opt" => Self::RlsOpt,
            "ea" => Self::one_plus_one(MutationVariant::Plain),
            "ea-resample" => Self::one_plus_one(MutationVariant::Resample),
            "ea-shift" => Self::one_plus_one(MutationVariant::Shift),
            "ollga" => Self::ollga(OllgaVariant::Vanilla),
            "ollga-mod" => Self::ollga(OllgaVariant::Mod),
            "greedy-ga" => Self::greedy_ga(GreedyVariant::Sudholt),
            "greedy-ga-mod" => Self::greedy_ga(GreedyVariant::Mod),
            _ => return Err(ConfigError::UnknownAlgorithm(s.to_string())),
        })
    }
}

#[derive(Clone, Debug)]
enum Plan {
    Rls,
    RlsOpt(Arc<Vec<usize>>),
    OnePlusOne {
        variant: MutationVariant,
        p: f64,
    },
    Ollga {
        variant: OllgaVariant,
        f: f64,
        lambda0: f64,
    },
    Greedy {
        variant: GreedyVariant,
        p: f64,
        selection: ParentalSelection,
    },
}

/// An [`AlgorithmConfig`] resolved for one dimension. Cheap to clone and
/// shareable across the runs of a batch.
#[derive(Clone, Debug)]
pub struct PreparedAlgorithm {
    config: AlgorithmConfig,
    n: usize,
    plan: Plan,
}

/// Per-run algorithm state.
#[derive(Clone, Debug)]
pub enum RunState<T> {
    Single { x: BitString, fx: T },
    Ollga { x: BitString, fx: T, lambda: f64 },
    /// Kept renamed so that `fx >= fy`.
    Greedy {
        x: BitString,
        fx: T,
        y: BitString,
        fy: T,
    },
}

impl<T: Scalar> RunState<T> {
    /// Best fitness in the state.
    pub fn incumbent(&self) -> T {
        match self {
            Self::Single { fx, .. } | Self::Ollga { fx, .. } | Self::Greedy { fx, .. } => *fx,
        }
    }

    /// Current self-adjusted λ of the (1+(λ,λ)) GA.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            Self::Ollga { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }

    /// One iteration.
    pub fn step(
        &mut self,
        alg: &PreparedAlgorithm,
        ev: &mut Evaluator<'_, T>,
        rng: &mut RandomSource,
    ) -> Result<(), Stop> {
        let n = alg.n;
        match (self, &alg.plan) {
            (Self::Single { x, fx }, plan) => {
                let flips = match plan {
                    Plan::Rls => 1,
                    Plan::RlsOpt(table) => table[ev.objective().level(x)],
                    Plan::OnePlusOne { variant, p } => variant.sample(n, *p, rng),
                    _ => unreachable!("single-parent state"),
                };
                let y = mutate_flip(x, flips, rng).expect("flip count at most n");
                let (fy, _) = ev.charge_and_evaluate(&y, &[(x, *fx)])?;
                if fy >= *fx {
                    *x = y;
                    *fx = fy;
                }
                Ok(())
            }
            (Self::Ollga { x, fx, lambda }, Plan::Ollga { variant, f, .. }) => {
                ollga_step(x, fx, lambda, *variant, *f, n, ev, rng)
            }
            (Self::Greedy { x, fx, y, fy }, Plan::Greedy { variant, p, selection }) => {
                greedy_step(x, fx, y, fy, *variant, *p, *selection, ev, rng)
            }
            _ => unreachable!("state built by the same plan"),
        }
    }
}

/// Uniform choice among maximal candidates seen so far, in creation order:
/// the `k`-th tie replaces the held candidate with probability `1/k`.
struct Reservoir<T> {
    held: Option<(BitString, T)>,
    ties: usize,
}

impl<T: Scalar> Reservoir<T> {
    fn new() -> Self {
        Self { held: None, ties: 0 }
    }

    fn offer(&mut self, x: BitString, f: T, rng: &mut RandomSource) {
        match &self.held {
            Some((_, best)) if f < *best => {}
            Some((_, best)) if f == *best => {
                self.ties += 1;
                if rng.below(self.ties) == 0 {
                    self.held = Some((x, f));
                }
            }
            _ => {
                self.held = Some((x, f));
                self.ties = 1;
            }
        }
    }

    fn take(self) -> (BitString, T) {
        self.held.expect("at least one candidate offered")
    }
}

#[allow(clippy::too_many_arguments)]
fn ollga_step<T: Scalar>(
    x: &mut BitString,
    fx: &mut T,
    lambda: &mut f64,
    variant: OllgaVariant,
    update_strength: f64,
    n: usize,
    ev: &mut Evaluator<'_, T>,
    rng: &mut RandomSource,
) -> Result<(), Stop> {
    let offspring = (lambda.round() as usize).clamp(1, n);
    let p = *lambda / n as f64;
    let flips = if p >= 1.0 {
        n
    } else {
        match variant {
            OllgaVariant::Vanilla => MutationVariant::Plain.sample(n, p, rng),
            OllgaVariant::Mod => MutationVariant::Resample.sample(n, p, rng),
        }
    };

    let mut mutation = Reservoir::new();
    for _ in 0..offspring {
        let xi = mutate_flip(x, flips, rng).expect("flip count at most n");
        let (fi, _) = ev.charge_and_evaluate(&xi, &[(x, *fx)])?;
        mutation.offer(xi, fi, rng);
    }
    let (xp, fxp) = mutation.take();

    let bias = 1.0 / *lambda;
    let mut crossover = Reservoir::new();
    for _ in 0..offspring {
        let yi = crossover_biased(x, &xp, bias, rng).expect("equal lengths, bias in (0, 1]");
        let (fi, _) = ev.charge_and_evaluate(&yi, &[(x, *fx), (&xp, fxp)])?;
        crossover.offer(yi, fi, rng);
    }
    if variant == OllgaVariant::Mod {
        crossover.offer(xp, fxp, rng);
    }
    let (y, fy) = crossover.take();

    let grow = (*lambda * update_strength.powf(0.25)).min(n as f64);
    if fy > *fx {
        *lambda = (*lambda / update_strength).max(1.0);
        *x = y;
        *fx = fy;
    } else {
        *lambda = grow;
        if fy == *fx {
            *x = y;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn greedy_step<T: Scalar>(
    x: &mut BitString,
    fx: &mut T,
    y: &mut BitString,
    fy: &mut T,
    variant: GreedyVariant,
    p: f64,
    selection: ParentalSelection,
    ev: &mut Evaluator<'_, T>,
    rng: &mut RandomSource,
) -> Result<(), Stop> {
    let n = x.len();
    let z_prime = if *fx == *fy {
        let (a, b) = match selection {
            ParentalSelection::BothWhenEqual => (&*x, &*y),
            ParentalSelection::RandomPair => {
                let a = if rng.below(2) == 0 { &*x } else { &*y };
                let b = if rng.below(2) == 0 { &*x } else { &*y };
                (a, b)
            }
        };
        crossover_biased(a, b, 0.5, rng).expect("equal lengths")
    } else {
        x.clone()
    };
    let reproduced = z_prime == *x || z_prime == *y;
    let flips = match variant {
        GreedyVariant::Mod if reproduced => MutationVariant::Resample.sample(n, p, rng),
        _ => MutationVariant::Plain.sample(n, p, rng),
    };
    let z = mutate_flip(&z_prime, flips, rng).expect("flip count at most n");
    let (fz, _) = ev.charge_and_evaluate(&z, &[(x, *fx), (y, *fy)])?;
    if z != *x && z != *y && fz >= *fy {
        if *fy < *fx || rng.below(2) == 0 {
            *y = z;
            *fy = fz;
        } else {
            *x = z;
            *fx = fz;
        }
    }
    if *fy > *fx {
        std::mem::swap(x, y);
        std::mem::swap(fx, fy);
    }
    Ok(())
}

impl PreparedAlgorithm {
    pub fn config(&self) -> &AlgorithmConfig {
        &self.config
    }

    pub fn name(&self) -> &'static str {
        self.config.name()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Resolved mutation probability, for algorithms with a fixed one.
    pub fn mutation_rate(&self) -> Option<f64> {
        match self.plan {
            Plan::OnePlusOne { p, .. } | Plan::Greedy { p, .. } => Some(p),
            _ => None,
        }
    }

    /// Flip count used by RLS_opt at each OneMax value `0..n`.
    pub fn flip_table(&self) -> Option<&[usize]> {
        match &self.plan {
            Plan::RlsOpt(t) => Some(t),
            _ => None,
        }
    }

    pub fn check_objective(&self, n: usize, kind: ObjectiveKind) -> Result<(), ConfigError> {
        if n != self.n {
            return Err(ConfigError::DimensionMismatch {
                prepared: self.n,
                objective: n,
            });
        }
        if matches!(self.plan, Plan::RlsOpt(_)) && !kind.is_onemax_like() {
            return Err(ConfigError::Objective {
                algorithm: self.name(),
                objective: kind.name(),
            });
        }
        Ok(())
    }

    pub fn check_initial(&self, initial: &[BitString], n: usize) -> Result<(), ConfigError> {
        let expected = self.config.population_size();
        if initial.len() != expected {
            return Err(ConfigError::InitialCount {
                expected,
                got: initial.len(),
            });
        }
        match initial.iter().find(|x| x.len() != n) {
            Some(x) => Err(ConfigError::InitialLength {
                expected: n,
                got: x.len(),
            }),
            None => Ok(()),
        }
    }

    /// Samples (or takes) and evaluates the initial population.
    pub fn initialize<T: Scalar>(
        &self,
        ev: &mut Evaluator<'_, T>,
        rng: &mut RandomSource,
        initial: Option<&[BitString]>,
    ) -> Result<RunState<T>, Stop> {
        let n = self.n;
        let draw = |i: usize, rng: &mut RandomSource| match initial {
            Some(init) => init[i].clone(),
            None => BitString::random(n, rng),
        };
        match self.plan {
            Plan::Greedy { .. } => {
                let x = draw(0, rng);
                let y = draw(1, rng);
                let fx = ev.evaluate_initial(&x)?;
                let fy = ev.evaluate_initial(&y)?;
                Ok(if fy > fx {
                    RunState::Greedy { x: y, fx: fy, y: x, fy: fx }
                } else {
                    RunState::Greedy { x, fx, y, fy }
                })
            }
            Plan::Ollga { lambda0, .. } => {
                let x = draw(0, rng);
                let fx = ev.evaluate_initial(&x)?;
                Ok(RunState::Ollga { x, fx, lambda: lambda0 })
            }
            _ => {
                let x = draw(0, rng);
                let fx = ev.evaluate_initial(&x)?;
                Ok(RunState::Single { x, fx })
            }
        }
    }
}

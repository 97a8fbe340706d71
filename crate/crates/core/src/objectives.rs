//! Benchmark fitness functions and their target-shifted generalizations.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::{BitString, BitsError};
use crate::rng::RandomSource;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("dimension mismatch: objective has n = {expected}, string has length {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("linear weights must be finite and strictly positive, got {0}")]
    BadWeight(String),
    #[error("linear objective has {weights} weights but n = {n}")]
    WeightCount { weights: usize, n: usize },
    #[error("invalid target: {0}")]
    Target(#[from] BitsError),
    #[error("invalid permutation: {0}")]
    Permutation(String),
    #[error("unknown objective {0:?} (expected onemax, leadingones, linear:<w,...>, onemax-z:<hex>, leadingones-z:<hex>:<perm>)")]
    Unknown(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    OneMax,
    LeadingOnes,
    Linear,
    OneMaxTarget,
    LeadingOnesTarget,
}

impl ObjectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::OneMax => "onemax",
            Self::LeadingOnes => "leadingones",
            Self::Linear => "linear",
            Self::OneMaxTarget => "onemax-z",
            Self::LeadingOnesTarget => "leadingones-z",
        }
    }

    /// Kinds whose landscape is a relabelling of OneMax.
    pub fn is_onemax_like(self) -> bool {
        matches!(self, Self::OneMax | Self::OneMaxTarget)
    }
}

#[derive(Clone, Debug)]
enum Form<T> {
    OneMax,
    LeadingOnes,
    Linear(Vec<T>),
    OneMaxTarget(BitString),
    /// Target and 0-based permutation.
    LeadingOnesTarget(BitString, Vec<usize>),
}

/// A pseudo-Boolean function on `{0,1}^n` with a unique known optimum.
///
/// Immutable after construction. Besides the fitness value every objective
/// exposes an integer *level* in `0..=n` used for runtime profiles: the
/// fitness itself for the integral kinds, the number of one-bits for linear
/// functions. Level `n` is reached exactly at the optimum.
#[derive(Clone, Debug)]
pub struct Objective<T> {
    n: usize,
    form: Form<T>,
    optimum: T,
}

impl<T: Scalar> Objective<T> {
    pub fn onemax(n: usize) -> Result<Self, ObjectiveError> {
        Self::integral(n, Form::OneMax)
    }

    pub fn leading_ones(n: usize) -> Result<Self, ObjectiveError> {
        Self::integral(n, Form::LeadingOnes)
    }

    /// `Σ w_i x_i` with strictly positive weights; optimum at `1^n`.
    pub fn linear(weights: Vec<T>) -> Result<Self, ObjectiveError> {
        if weights.is_empty() {
            return Err(ObjectiveError::ZeroDimension);
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > T::zero())) {
            return Err(ObjectiveError::BadWeight(w.to_string()));
        }
        // Same summation order as `value` on the all-ones string, so the
        // optimum compares exactly equal.
        let optimum = weights.iter().fold(T::zero(), |acc, &w| acc + w);
        Ok(Self {
            n: weights.len(),
            optimum,
            form: Form::Linear(weights),
        })
    }

    /// `OM_z(x)`: number of positions where `x` agrees with `z`.
    pub fn onemax_target(z: BitString) -> Result<Self, ObjectiveError> {
        Self::integral(z.len(), Form::OneMaxTarget(z))
    }

    /// `LO_{z,π}(x)`: longest prefix, in the order `π`, on which `x` agrees
    /// with `z`. `perm` is 0-based.
    pub fn leading_ones_target(z: BitString, perm: Vec<usize>) -> Result<Self, ObjectiveError> {
        validate_permutation(&perm, z.len())?;
        Self::integral(z.len(), Form::LeadingOnesTarget(z, perm))
    }

    fn integral(n: usize, form: Form<T>) -> Result<Self, ObjectiveError> {
        if n == 0 {
            return Err(ObjectiveError::ZeroDimension);
        }
        Ok(Self {
            n,
            form,
            optimum: T::of_u64(n as u64),
        })
    }

    pub fn kind(&self) -> ObjectiveKind {
        match self.form {
            Form::OneMax => ObjectiveKind::OneMax,
            Form::LeadingOnes => ObjectiveKind::LeadingOnes,
            Form::Linear(_) => ObjectiveKind::Linear,
            Form::OneMaxTarget(_) => ObjectiveKind::OneMaxTarget,
            Form::LeadingOnesTarget(..) => ObjectiveKind::LeadingOnesTarget,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn optimum_value(&self) -> T {
        self.optimum
    }

    pub fn is_optimum(&self, value: T) -> bool {
        value == self.optimum
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &BitString) -> Result<T, ObjectiveError> {
        self.check_dim(x)?;
        Ok(self.value(x))
    }

    /// Fitness and profile level of `x`; the length is only debug-checked.
    pub fn value_and_level(&self, x: &BitString) -> (T, usize) {
        debug_assert_eq!(x.len(), self.n);
        match &self.form {
            Form::Linear(w) => (linear_value(w, x), x.count_ones()),
            _ => {
                let k = self.integral_value(x);
                (T::of_u64(k as u64), k)
            }
        }
    }

    /// Fitness of `x`; the length is only debug-checked.
    pub fn value(&self, x: &BitString) -> T {
        self.value_and_level(x).0
    }

    /// Profile level of a point, in `0..=n`.
    pub fn level(&self, x: &BitString) -> usize {
        self.value_and_level(x).1
    }

    pub(crate) fn check_dim(&self, x: &BitString) -> Result<(), ObjectiveError> {
        if x.len() != self.n {
            return Err(ObjectiveError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn integral_value(&self, x: &BitString) -> usize {
        match &self.form {
            Form::OneMax => x.count_ones(),
            Form::LeadingOnes => x.leading_ones(),
            Form::OneMaxTarget(z) => self.n - x.hamming(z),
            Form::LeadingOnesTarget(z, perm) => perm
                .iter()
                .take_while(|&&i| x.get(i) == z.get(i))
                .count(),
            Form::Linear(_) => unreachable!("linear objectives are not integral"),
        }
    }
}

fn linear_value<T: Scalar>(w: &[T], x: &BitString) -> T {
    w.iter()
        .zip(x.iter())
        .fold(T::zero(), |acc, (&wi, b)| if b { acc + wi } else { acc })
}

fn validate_permutation(perm: &[usize], n: usize) -> Result<(), ObjectiveError> {
    if perm.len() != n {
        return Err(ObjectiveError::Permutation(format!(
            "has {} entries, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(ObjectiveError::Permutation(format!(
                "index {} repeated or out of range",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Permutation spec as accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PermutationSpec {
    Identity,
    Reverse,
    /// Uniform random permutation drawn from the given seed.
    Seeded(u64),
    /// Explicit 1-based list.
    Explicit(Vec<usize>),
}

impl PermutationSpec {
    /// Resolves to a 0-based permutation of `0..n`.
    pub fn resolve(&self, n: usize) -> Result<Vec<usize>, ObjectiveError> {
        let perm = match self {
            Self::Identity => (0..n).collect(),
            Self::Reverse => (0..n).rev().collect(),
            Self::Seeded(seed) => {
                let mut rng = RandomSource::new(*seed);
                let mut perm: Vec<usize> = (0..n).collect();
                for j in 0..n.saturating_sub(1) {
                    let r = j + rng.below(n - j);
                    perm.swap(j, r);
                }
                perm
            }
            Self::Explicit(list) => {
                if list.contains(&0) {
                    return Err(ObjectiveError::Permutation("indices are 1-based".into()));
                }
                list.iter().map(|i| i - 1).collect()
            }
        };
        validate_permutation(&perm, n)?;
        Ok(perm)
    }
}

impl FromStr for PermutationSpec {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "identity" {
            return Ok(Self::Identity);
        }
        if s == "reverse" {
            return Ok(Self::Reverse);
        }
        if let Some(seed) = s.strip_prefix("seed=") {
            return seed
                .parse()
                .map(Self::Seeded)
                .map_err(|_| ObjectiveError::Permutation(format!("bad seed {seed:?}")));
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(Self::Explicit)
            .map_err(|_| {
                ObjectiveError::Permutation(format!(
                    "{s:?} is not identity, reverse, seed=<u64> or a 1-based index list"
                ))
            })
    }
}

/// Objective selection before the dimension is known, as parsed from
/// `onemax`, `leadingones`, `linear:<w,...>`, `onemax-z:<hex>` or
/// `leadingones-z:<hex>:<perm>`.
#[derive(Clone, Debug, PartialEq)]
pub enum ObjectiveSpec {
    OneMax,
    LeadingOnes,
    Linear(Vec<f64>),
    OneMaxTarget(String),
    LeadingOnesTarget(String, PermutationSpec),
}

impl ObjectiveSpec {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Self::OneMax => ObjectiveKind::OneMax,
            Self::LeadingOnes => ObjectiveKind::LeadingOnes,
            Self::Linear(_) => ObjectiveKind::Linear,
            Self::OneMaxTarget(_) => ObjectiveKind::OneMaxTarget,
            Self::LeadingOnesTarget(..) => ObjectiveKind::LeadingOnesTarget,
        }
    }

    pub fn build<T: Scalar>(&self, n: usize) -> Result<Objective<T>, ObjectiveError> {
        match self {
            Self::OneMax => Objective::onemax(n),
            Self::LeadingOnes => Objective::leading_ones(n),
            Self::Linear(w) => {
                if w.len() != n {
                    return Err(ObjectiveError::WeightCount {
                        weights: w.len(),
                        n,
                    });
                }
                Objective::linear(w.iter().map(|&v| T::lit(v)).collect())
            }
            Self::OneMaxTarget(hex) => Objective::onemax_target(BitString::from_hex(hex, n)?),
            Self::LeadingOnesTarget(hex, perm) => {
                Objective::leading_ones_target(BitString::from_hex(hex, n)?, perm.resolve(n)?)
            }
        }
    }
}

impl FromStr for ObjectiveSpec {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match (head.to_ascii_lowercase().as_str(), rest) {
            ("onemax", None) => Ok(Self::OneMax),
            ("leadingones", None) => Ok(Self::LeadingOnes),
            ("linear", Some(ws)) => ws
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|w| w.is_finite() && *w > 0.0)
                        .ok_or_else(|| ObjectiveError::BadWeight(t.trim().to_string()))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Self::Linear),
            ("onemax-z", Some(hex)) => Ok(Self::OneMaxTarget(hex.to_string())),
            ("leadingones-z", Some(r)) => {
                let (hex, perm) = r.split_once(':').unwrap_or((r, "identity"));
                Ok(Self::LeadingOnesTarget(hex.to_string(), perm.parse()?))
            }
            _ => Err(ObjectiveError::Unknown(s.to_string())),
        }
    }
}

impl fmt::Display for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind().name())
    }
}

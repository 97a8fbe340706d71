//! Closed-form runtime formulas, drift on OneMax, runtime-profile bounds and
//! the numerical minimizers used to find optimal parameters.
//!
//! Everything is generic over the scalar type. The asymptotic lower bounds
//! are evaluated without their `1 ± o(1)` factor, so they are leading-order
//! estimates, not predictions of finite-`n` runs.

use std::fmt;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num};
use rayon::prelude::*;
use thiserror::Error;

use crate::algorithms::MutationVariant;
use crate::scalar::{one_minus_pow_one_minus, pow_one_minus, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("probability {0} is outside (0, 1)")]
    Probability(f64),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("level {k} is outside [1, {n}]")]
    Level { k: usize, n: usize },
    #[error("fitness value {v} is outside [0, {n})")]
    FitnessValue { v: usize, n: usize },
    #[error("flip count {flips} is outside [1, {n}]")]
    Flips { flips: usize, n: usize },
    #[error("parameter must be positive, got {0}")]
    NonPositive(f64),
    #[error("exact arithmetic is limited to n <= {EXACT_LIMIT}, got {0}")]
    TooLarge(usize),
    #[error("unknown {what} {got:?}")]
    Unknown { what: &'static str, got: String },
}

/// Largest dimension for which drift is computed with exact integers.
pub const EXACT_LIMIT: usize = 60;

/// A runtime value with its normalization, if the literature reports one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormulaResult<T> {
    pub value: T,
    /// `value / n²` for LeadingOnes runtimes.
    pub normalized: Option<T>,
}

fn check_p<T: Scalar>(p: T) -> Result<(), TheoryError> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(TheoryError::Probability(p.as_f64()))
    }
}

fn check_n(n: usize) -> Result<(), TheoryError> {
    if n == 0 {
        Err(TheoryError::ZeroDimension)
    } else {
        Ok(())
    }
}

fn check_k(n: usize, k: usize) -> Result<(), TheoryError> {
    if (1..=n).contains(&k) {
        Ok(())
    } else {
        Err(TheoryError::Level { k, n })
    }
}

fn nf<T: Scalar>(n: usize) -> T {
    T::of_u64(n as u64)
}

/// `H_d = Σ_{i=1}^d 1/i`, summed from the small terms up.
pub fn harmonic<T: Scalar>(d: usize) -> Result<T, TheoryError> {
    if d == 0 {
        return Err(TheoryError::ZeroDimension);
    }
    Ok(harmonic_tail(d, d))
}

/// `H_n - H_{n-k} = Σ_{i=n-k+1}^n 1/i`, with `H_0 = 0`.
fn harmonic_tail<T: Scalar>(n: usize, k: usize) -> T {
    (n - k + 1..=n)
        .rev()
        .fold(T::zero(), |acc, i| acc + T::one() / nf::<T>(i))
}

/// Fitness-level upper bound on the expected OneMax runtime of the (1+1) EA
/// variants from a uniform start.
///
/// `Resample`: `(1-(1-p)^n) H_n / (p (1-p)^{n-1})`; `Shift`:
/// `n H_n / ((1-p)^{n-1} (np + 1 - p))`; `Plain`: `H_n / (p (1-p)^{n-1})`.
pub fn onemax_upper<T: Scalar>(variant: MutationVariant, n: usize, p: T) -> Result<T, TheoryError> {
    check_n(n)?;
    check_p(p)?;
    let h = harmonic::<T>(n)?;
    let n_t = nf::<T>(n);
    let q = pow_one_minus(p, n_t - T::one());
    Ok(match variant {
        MutationVariant::Plain => h / (p * q),
        MutationVariant::Resample => one_minus_pow_one_minus(p, n_t) * h / (p * q),
        MutationVariant::Shift => n_t * h / (q * (n_t * p + T::one() - p)),
    })
}

/// Leading term `(e^c - 1)/c · n ln n` of the OneMax lower bound for the
/// (1+1) EA_{>0} with `p = c/n`.
pub fn onemax_lower_resample<T: Scalar>(n: usize, c: T) -> Result<T, TheoryError> {
    check_n(n)?;
    if !(c > T::zero()) {
        return Err(TheoryError::NonPositive(c.as_f64()));
    }
    let n_t = nf::<T>(n);
    Ok(c.exp_m1() / c * n_t * n_t.ln())
}

/// Leading term of the runtime of the (1+1) EA_{>0} with `p = c/n` on any
/// linear function; the same constant as [`onemax_lower_resample`].
pub fn linear_runtime_resample<T: Scalar>(n: usize, c: T) -> Result<T, TheoryError> {
    onemax_lower_resample(n, c)
}

/// Expected LeadingOnes runtime of the (1+1) EA variants, normalized by `n²`.
///
/// `Plain`: `((1-p)^{1-n} - (1-p)) / (2p²)`; `Resample`:
/// `(1-(1-p)^n)² / (2p² (1-p)^{n-1})`; `Shift`:
/// `½ Σ_{j=0}^{n-1} 1 / (p (1-p)^{n-j} + (1-p)^n / n)`.
pub fn leadingones_expected<T: Scalar>(
    variant: MutationVariant,
    n: usize,
    p: T,
) -> Result<FormulaResult<T>, TheoryError> {
    check_n(n)?;
    check_p(p)?;
    let n_t = nf::<T>(n);
    let two = T::lit(2.0);
    let value = match variant {
        MutationVariant::Plain => lo_plain_prefix(n, p),
        MutationVariant::Resample => {
            let s = one_minus_pow_one_minus(p, n_t);
            s * s / (two * p * p * pow_one_minus(p, n_t - T::one()))
        }
        MutationVariant::Shift => {
            let stay = pow_one_minus(p, n_t) / n_t;
            let log_q = (-p).ln_1p();
            // Exponents n - j for j = 0..n-1, i.e. 1..=n.
            (1..=n)
                .rev()
                .map(|e| T::one() / (p * (nf::<T>(e) * log_q).exp() + stay))
                .fold(T::zero(), |acc, t| acc + t)
                / two
        }
    };
    Ok(FormulaResult {
        value,
        normalized: Some(value / (n_t * n_t)),
    })
}

/// `((1-p)^{1-k} - (1-p)) / (2p²)`, cancellation-free.
fn lo_plain_prefix<T: Scalar>(k: usize, p: T) -> T {
    let e = nf::<T>(k) - T::one();
    ((-e * (-p).ln_1p()).exp_m1() + p) / (T::lit(2.0) * p * p)
}

/// Rate factor `c*` minimizing the normalized LeadingOnes runtime of the
/// plain (1+1) EA with `p = c/n` at `n = 10⁶`, with the minimal value.
pub fn leadingones_optimal_rate<T: Scalar>() -> (T, T) {
    let n = 1_000_000;
    minimize(
        |c| plain_lo_normalized(n, c),
        T::lit(0.5),
        T::lit(4.0),
    )
}

fn plain_lo_normalized<T: Scalar>(n: usize, c: T) -> T {
    let n_t = nf::<T>(n);
    lo_plain_prefix(n, c / n_t) / (n_t * n_t)
}

/// Upper bound on the Greedy (2+1) GA_mod OneMax runtime:
/// `(1-(1-p)^n)(ln(n²p+n)+1+p) / (p(1-p)^{n-1}(1+np)) + 4n/(1-p)^n`.
pub fn greedy_upper<T: Scalar>(n: usize, p: T) -> Result<T, TheoryError> {
    check_n(n)?;
    check_p(p)?;
    let n_t = nf::<T>(n);
    let one = T::one();
    let main = one_minus_pow_one_minus(p, n_t) * ((n_t * n_t * p + n_t).ln() + one + p)
        / (p * pow_one_minus(p, n_t - one) * (one + n_t * p));
    Ok(main + T::lit(4.0) * n_t / pow_one_minus(p, n_t))
}

/// Coefficient of `n ln n` in the Greedy GA_mod bound at `p = c/n`:
/// `(1-(1-c/n)^n) / (c (1-c/n)^{n-1} (1+c))`.
pub fn greedy_leading_constant<T: Scalar>(n: usize, c: T) -> Result<T, TheoryError> {
    check_n(n)?;
    let n_t = nf::<T>(n);
    let p = c / n_t;
    check_p(p)?;
    let one = T::one();
    Ok(one_minus_pow_one_minus(p, n_t) / (c * pow_one_minus(p, n_t - one) * (one + c)))
}

/// Large-`n` limit of [`greedy_leading_constant`]:
/// `(1-e^{-c}) / (c e^{-c} (1+c)) = (e^c - 1) / (c (1+c))`.
pub fn greedy_leading_constant_limit<T: Scalar>(c: T) -> Result<T, TheoryError> {
    if !(c > T::zero()) {
        return Err(TheoryError::NonPositive(c.as_f64()));
    }
    Ok(c.exp_m1() / (c * (T::one() + c)))
}

/// `(c*, value)` minimizing [`greedy_leading_constant`] over `c ∈ (0, 3]`.
pub fn minimize_greedy_constant<T: Scalar>(n: usize) -> Result<(T, T), TheoryError> {
    check_n(n)?;
    let hi = T::lit(3.0).min(nf::<T>(n) * T::lit(0.999));
    Ok(minimize(
        |c| greedy_leading_constant(n, c).unwrap_or_else(|_| T::infinity()),
        T::lit(1e-3),
        hi,
    ))
}

/// `(c*, value)` minimizing [`greedy_leading_constant_limit`] over `(0, 3]`.
pub fn minimize_greedy_constant_limit<T: Scalar>() -> (T, T) {
    minimize(
        |c| greedy_leading_constant_limit(c).unwrap_or_else(|_| T::infinity()),
        T::lit(1e-3),
        T::lit(3.0),
    )
}

fn argument_tolerance<T: Scalar>() -> T {
    T::lit(1e-6).max(T::epsilon().sqrt() * T::lit(4.0))
}

/// Grid pre-scan to bracket the minimum, then golden-section search.
pub fn minimize<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T) -> (T, T) {
    let points = 400;
    let step = (hi - lo) / nf::<T>(points);
    let at = |i: usize| lo + step * nf::<T>(i);
    let best = (0..=points)
        .min_by(|&a, &b| f(at(a)).partial_cmp(&f(at(b))).expect("finite objective"))
        .expect("non-empty grid");
    let a = at(best.saturating_sub(1));
    let b = at((best + 1).min(points));
    minimize_golden(f, a, b, argument_tolerance())
}

/// Golden-section search on `[a, b]`, assumed unimodal, until the bracket
/// is narrower than `tol`.
pub fn minimize_golden<T: Scalar>(f: impl Fn(T) -> T, mut a: T, mut b: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}

/// Pure grid search with repeated zooming: `rounds` passes of `points`
/// evaluations, each around the previous best. Independent of
/// [`minimize_golden`], for cross-checking.
pub fn minimize_grid<T: Scalar>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, points: usize, rounds: usize) -> (T, T) {
    let mut best = (lo, f(lo));
    for _ in 0..rounds {
        let step = (hi - lo) / nf::<T>(points);
        for i in 0..=points {
            let x = lo + step * nf::<T>(i);
            let fx = f(x);
            if fx < best.1 {
                best = (x, fx);
            }
        }
        lo = best.0 - step;
        hi = best.0 + step;
    }
    best
}

/// Expected positive OneMax progress `B(n, v, ℓ)` of flipping `ℓ` distinct
/// uniformly chosen bits of a string with `v` ones:
/// `Σ_{i ≥ ℓ/2} C(n-v, i) C(v, ℓ-i) (2i - ℓ) / C(n, ℓ)`.
///
/// Exact integer sums up to `n = 60`; beyond that a log-factorial start
/// term and ratio recurrences outward from the mode of the hypergeometric
/// law, dropping terms below `1e-18` of the running sum.
pub fn drift_onemax<T: Scalar>(n: usize, v: usize, flips: usize) -> Result<T, TheoryError> {
    check_drift_args(n, v, flips)?;
    if n <= EXACT_LIMIT {
        let (num, den) = drift_ratio(n, v, flips);
        return Ok(T::from_u128(num).expect("fits") / T::from_u128(den).expect("fits"));
    }
    Ok(drift_pruned(&LnFactorial::new(n), n, v, flips))
}

/// [`drift_onemax`] in an exact number type such as a rational, for
/// `n <= 60`.
pub fn drift_onemax_exact<R: Num + FromPrimitive>(n: usize, v: usize, flips: usize) -> Result<R, TheoryError> {
    check_drift_args(n, v, flips)?;
    if n > EXACT_LIMIT {
        return Err(TheoryError::TooLarge(n));
    }
    let (num, den) = drift_ratio(n, v, flips);
    let conv = |x: u128| R::from_u64(u64::try_from(x).expect("fits in u64 for n <= 60")).expect("representable");
    Ok(conv(num) / conv(den))
}

fn check_drift_args(n: usize, v: usize, flips: usize) -> Result<(), TheoryError> {
    check_n(n)?;
    if v >= n {
        return Err(TheoryError::FitnessValue { v, n });
    }
    if flips == 0 || flips > n {
        return Err(TheoryError::Flips { flips, n });
    }
    Ok(())
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Numerator and denominator of `B(n, v, ℓ)`.
fn drift_ratio(n: usize, v: usize, flips: usize) -> (u128, u128) {
    let zeros = n - v;
    let num = (flips / 2 + 1..=flips.min(zeros))
        .filter(|&i| flips - i <= v)
        .map(|i| binomial_u128(zeros, i) * binomial_u128(v, flips - i) * (2 * i - flips) as u128)
        .sum();
    (num, binomial_u128(n, flips))
}

/// `ln k!` for `k = 0..=n`, by cumulative summation of logarithms.
struct LnFactorial<T>(Vec<T>);

impl<T: Scalar> LnFactorial<T> {
    fn new(n: usize) -> Self {
        let mut v = Vec::with_capacity(n + 1);
        v.push(T::zero());
        for k in 1..=n {
            let prev = v[k - 1];
            v.push(prev + nf::<T>(k).ln());
        }
        Self(v)
    }

    fn ln_choose(&self, n: usize, k: usize) -> T {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

fn drift_pruned<T: Scalar>(lf: &LnFactorial<T>, n: usize, v: usize, flips: usize) -> T {
    let zeros = n - v;
    let i_min = (flips / 2 + 1).max(flips.saturating_sub(v));
    let i_max = flips.min(zeros);
    if i_min > i_max {
        return T::zero();
    }
    let mode = ((flips + 1) * (zeros + 1) / (n + 2)).clamp(flips.saturating_sub(v), i_max);
    let start = mode.max(i_min);
    let ln_start =
        lf.ln_choose(zeros, start) + lf.ln_choose(v, flips - start) - lf.ln_choose(n, flips);
    let first = ln_start.exp();
    if first == T::zero() {
        // `start` carries the largest mass of the summation range.
        return T::zero();
    }
    let cutoff = T::lit(1e-18);
    let gain = |i: usize| nf::<T>(2 * i - flips);
    let mut sum = gain(start) * first;

    let mut pmf = first;
    let mut i = start;
    while i < i_max {
        pmf = pmf * nf::<T>((zeros - i) * (flips - i))
            / nf::<T>((i + 1) * (v + i + 1 - flips));
        i += 1;
        let term = gain(i) * pmf;
        sum = sum + term;
        if term < sum * cutoff {
            break;
        }
    }

    let mut pmf = first;
    let mut i = start;
    while i > i_min {
        pmf = pmf * nf::<T>(i * (v + i - flips)) / nf::<T>((zeros - i + 1) * (flips - i + 1));
        i -= 1;
        let term = gain(i) * pmf;
        sum = sum + term;
        if term < sum * cutoff {
            break;
        }
    }
    sum
}

/// Drift-maximizing flip count and its drift for one fitness value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftEntry<T> {
    pub flips: usize,
    pub drift: T,
}

/// `ℓ*_v` for every OneMax value `v ∈ [0, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftTable<T> {
    pub n: usize,
    pub entries: Vec<DriftEntry<T>>,
}

impl<T: Scalar> DriftTable<T> {
    /// Flip counts indexed by fitness value.
    pub fn flips(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.flips).collect()
    }
}

/// Argmax over `ℓ ∈ [1, n]` of [`drift_onemax`] for each `v`; values within
/// a relative `1e-12` count as ties and go to the smaller `ℓ`.
pub fn optimal_flip_table<T: Scalar>(n: usize) -> Result<DriftTable<T>, TheoryError> {
    check_n(n)?;
    let lf = LnFactorial::<T>::new(n);
    let tie = T::lit(1e-12);
    let entries = (0..n)
        .into_par_iter()
        .map(|v| {
            let drift = |l: usize| {
                if n <= EXACT_LIMIT {
                    let (num, den) = drift_ratio(n, v, l);
                    T::from_u128(num).expect("fits") / T::from_u128(den).expect("fits")
                } else {
                    drift_pruned(&lf, n, v, l)
                }
            };
            let mut best = DriftEntry {
                flips: 1,
                drift: drift(1),
            };
            for l in 2..=n {
                let d = drift(l);
                if d > best.drift + best.drift * tie {
                    best = DriftEntry { flips: l, drift: d };
                }
            }
            best
        })
        .collect();
    Ok(DriftTable { n, entries })
}

/// Algorithms with runtime-profile bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileAlgorithm {
    Rls,
    Plain,
    Resample,
    Shift,
}

impl ProfileAlgorithm {
    pub const ALL: [Self; 4] = [Self::Rls, Self::Plain, Self::Resample, Self::Shift];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rls => "rls",
            Self::Plain => "ea",
            Self::Resample => "ea-resample",
            Self::Shift => "ea-shift",
        }
    }
}

impl fmt::Display for ProfileAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileAlgorithm {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| TheoryError::Unknown {
                what: "profile algorithm",
                got: s.to_string(),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileObjective {
    OneMax,
    LeadingOnes,
}

impl ProfileObjective {
    pub fn name(self) -> &'static str {
        match self {
            Self::OneMax => "onemax",
            Self::LeadingOnes => "leadingones",
        }
    }
}

impl FromStr for ProfileObjective {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "onemax" => Ok(Self::OneMax),
            "leadingones" => Ok(Self::LeadingOnes),
            other => Err(TheoryError::Unknown {
                what: "profile objective",
                got: other.to_string(),
            }),
        }
    }
}

/// Upper bound on the expected time to reach OneMax value `≥ k` from the
/// all-zeros string.
pub fn profile_bound_onemax<T: Scalar>(alg: ProfileAlgorithm, n: usize, p: T, k: usize) -> Result<T, TheoryError> {
    check_n(n)?;
    check_p(p)?;
    check_k(n, k)?;
    Ok(onemax_factor(alg, n, p) * harmonic_tail::<T>(n, k))
}

fn onemax_factor<T: Scalar>(alg: ProfileAlgorithm, n: usize, p: T) -> T {
    let n_t = nf::<T>(n);
    let one = T::one();
    let q = pow_one_minus(p, n_t - one);
    match alg {
        ProfileAlgorithm::Rls => n_t,
        ProfileAlgorithm::Plain => one / (p * q),
        ProfileAlgorithm::Resample => one_minus_pow_one_minus(p, n_t) / (p * q),
        ProfileAlgorithm::Shift => one / (q * (p + one / n_t - p / n_t)),
    }
}

/// Upper bound on the expected time to reach LeadingOnes value `≥ k`.
pub fn profile_bound_leadingones<T: Scalar>(
    alg: ProfileAlgorithm,
    n: usize,
    p: T,
    k: usize,
) -> Result<T, TheoryError> {
    check_n(n)?;
    check_p(p)?;
    check_k(n, k)?;
    let n_t = nf::<T>(n);
    Ok(match alg {
        ProfileAlgorithm::Rls => nf::<T>(k) * n_t / T::lit(2.0),
        ProfileAlgorithm::Plain => lo_plain_prefix(k, p),
        ProfileAlgorithm::Resample => one_minus_pow_one_minus(p, n_t) * lo_plain_prefix(k, p),
        ProfileAlgorithm::Shift => {
            let stay = pow_one_minus(p, n_t) / n_t;
            let log_q = (-p).ln_1p();
            // i = n-k+1..=n gives exponents n-i = k-1..=0.
            (0..k)
                .rev()
                .map(|e| T::one() / (p * (nf::<T>(e) * log_q).exp() + stay))
                .fold(T::zero(), |acc, t| acc + t)
                / T::lit(2.0)
        }
    })
}

/// Bounds for every `k = 1..=n` (element `k-1`), in linear time.
pub fn profile_curve<T: Scalar>(
    objective: ProfileObjective,
    alg: ProfileAlgorithm,
    n: usize,
    p: T,
) -> Result<Vec<T>, TheoryError> {
    check_n(n)?;
    check_p(p)?;
    let n_t = nf::<T>(n);
    Ok(match (objective, alg) {
        (ProfileObjective::OneMax, _) => {
            let factor = onemax_factor(alg, n, p);
            let mut tail = T::zero();
            (1..=n)
                .map(|k| {
                    tail = tail + T::one() / nf::<T>(n - k + 1);
                    factor * tail
                })
                .collect()
        }
        (ProfileObjective::LeadingOnes, ProfileAlgorithm::Shift) => {
            let stay = pow_one_minus(p, n_t) / n_t;
            let log_q = (-p).ln_1p();
            let mut sum = T::zero();
            (1..=n)
                .map(|k| {
                    sum = sum + T::one() / (p * (nf::<T>(k - 1) * log_q).exp() + stay);
                    sum / T::lit(2.0)
                })
                .collect()
        }
        (ProfileObjective::LeadingOnes, _) => (1..=n)
            .map(|k| profile_bound_leadingones(alg, n, p, k))
            .collect::<Result<_, _>>()?,
    })
}

/// Smallest `k` whose bound for `a` exceeds the bound for `b`.
pub fn profile_crossover<T: Scalar>(
    a: ProfileAlgorithm,
    b: ProfileAlgorithm,
    objective: ProfileObjective,
    n: usize,
    p: T,
) -> Result<Option<usize>, TheoryError> {
    let ca = profile_curve(objective, a, n, p)?;
    let cb = profile_curve(objective, b, n, p)?;
    Ok(ca.iter().zip(&cb).position(|(x, y)| x > y).map(|i| i + 1))
}

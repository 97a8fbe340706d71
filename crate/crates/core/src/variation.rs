//! Mutation-strength sampling and the unbiased variation operators.
//!
//! Standard bit mutation is realized as "draw the number of flips `ℓ`, then flip
//! `ℓ` distinct uniformly chosen positions". The conditional sampler draws `ℓ`
//! from the binomial law restricted to positive outcomes, which is how the
//! resampling variants avoid creating copies of their parent.

use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::bits::BitString;
use crate::rng::RandomSource;

/// Below this log-probability of zero successes the inverse-CDF walk would
/// start from an underflowed mass, so sampling defers to BTPE.
const LOG_MASS_FLOOR: f64 = -700.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationError {
    #[error("success probability {0} is outside (0, 1)")]
    Probability(f64),
    #[error("number of trials must be positive")]
    NoTrials,
    #[error("cannot flip {flips} distinct positions of a string of length {len}")]
    TooManyFlips { flips: usize, len: usize },
    #[error("crossover bias {0} is outside [0, 1]")]
    Bias(f64),
    #[error("parents have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
}

fn check_params(n: u64, p: f64) -> Result<(), VariationError> {
    if n == 0 {
        return Err(VariationError::NoTrials);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(VariationError::Probability(p));
    }
    Ok(())
}

/// Draws `k ~ Bin(n, p)`.
pub fn sample_binomial(n: u64, p: f64, rng: &mut RandomSource) -> Result<u64, VariationError> {
    check_params(n, p)?;
    let log_q0 = n as f64 * (-p).ln_1p();
    if log_q0 < LOG_MASS_FLOOR {
        return Ok(btpe(n, p, rng));
    }
    let u = rng.uniform();
    Ok(walk_cdf(n, p, 0, log_q0.exp(), u))
}

/// Draws `k ~ Bin_{>0}(n, p)`, the binomial law conditioned on `k > 0`.
///
/// Inverse-CDF walk over `k = 1..n` against the renormalized masses; never
/// returns zero.
pub fn sample_binomial_positive(
    n: u64,
    p: f64,
    rng: &mut RandomSource,
) -> Result<u64, VariationError> {
    check_params(n, p)?;
    let log_q = (-p).ln_1p();
    let log_q0 = n as f64 * log_q;
    if log_q0 < LOG_MASS_FLOOR {
        // P[k = 0] < e^-700: rejection essentially never loops.
        return Ok(loop {
            let k = btpe(n, p, rng);
            if k > 0 {
                break k;
            }
        });
    }
    let positive_mass = -log_q0.exp_m1();
    let first = ((n as f64).ln() + p.ln() + (n - 1) as f64 * log_q).exp();
    let u = rng.uniform() * positive_mass;
    Ok(walk_cdf(n, p, 1, first, u))
}

/// Alternative `Bin_{>0}` backend: redraw `Bin(n, p)` until it is positive.
pub fn sample_binomial_positive_by_rejection(
    n: u64,
    p: f64,
    rng: &mut RandomSource,
) -> Result<u64, VariationError> {
    check_params(n, p)?;
    loop {
        let k = sample_binomial(n, p, rng)?;
        if k > 0 {
            return Ok(k);
        }
    }
}

/// Left-to-right inversion starting at `k = start` with mass `mass`; masses of
/// later outcomes follow from the ratio `pmf(k+1)/pmf(k)`.
fn walk_cdf(n: u64, p: f64, start: u64, mut mass: f64, mut u: f64) -> u64 {
    let odds = p / (1.0 - p);
    let mean = n as f64 * p;
    let mut k = start;
    loop {
        if u < mass || k == n {
            return k;
        }
        u -= mass;
        let next = mass * (n - k) as f64 / (k + 1) as f64 * odds;
        if next == 0.0 && k as f64 >= mean {
            // Only rounding residue is left in `u`.
            return k;
        }
        mass = next;
        k += 1;
    }
}

fn btpe(n: u64, p: f64, rng: &mut RandomSource) -> u64 {
    Binomial::new(n, p)
        .expect("parameters validated")
        .sample(rng.inner_mut())
}

/// Calls `emit` with `count` distinct positions from `0..len`, chosen
/// uniformly without replacement by a partial Fisher–Yates shuffle.
///
/// Short shuffles keep the displaced entries in a small list instead of
/// materializing the index array; both paths consume the same draws and
/// emit the same positions.
pub fn for_each_distinct_position(
    len: usize,
    count: usize,
    rng: &mut RandomSource,
    mut emit: impl FnMut(usize),
) {
    debug_assert!(count <= len);
    if count == 0 {
        return;
    }
    if count <= 8 || count * count <= 2 * len {
        let mut displaced: Vec<(usize, usize)> = Vec::with_capacity(count);
        let lookup = |d: &[(usize, usize)], i: usize| {
            d.iter().find(|(k, _)| *k == i).map_or(i, |(_, v)| *v)
        };
        for j in 0..count {
            let r = j + rng.below(len - j);
            let at_r = lookup(&displaced, r);
            if r != j {
                let at_j = lookup(&displaced, j);
                match displaced.iter_mut().find(|(k, _)| *k == r) {
                    Some(slot) => slot.1 = at_j,
                    None => displaced.push((r, at_j)),
                }
            }
            emit(at_r);
        }
    } else {
        let mut index: Vec<u32> = (0..len as u32).collect();
        for j in 0..count {
            let r = j + rng.below(len - j);
            index.swap(j, r);
            emit(index[j] as usize);
        }
    }
}

/// `mut_ℓ`: flips exactly `flips` distinct, uniformly chosen positions of `x`.
pub fn mutate_flip(
    x: &BitString,
    flips: usize,
    rng: &mut RandomSource,
) -> Result<BitString, VariationError> {
    if flips > x.len() {
        return Err(VariationError::TooManyFlips {
            flips,
            len: x.len(),
        });
    }
    let mut y = x.clone();
    for_each_distinct_position(x.len(), flips, rng, |i| y.flip(i));
    Ok(y)
}

/// `cross_c(a, b)`: each position independently comes from `b` with
/// probability `bias`, otherwise from `a`.
///
/// Positions where the parents agree are fixed regardless of the coin, so
/// coins are only drawn for the differing positions (in increasing order).
/// Degenerate biases 0 and 1 draw nothing.
pub fn crossover_biased(
    a: &BitString,
    b: &BitString,
    bias: f64,
    rng: &mut RandomSource,
) -> Result<BitString, VariationError> {
    if a.len() != b.len() {
        return Err(VariationError::LengthMismatch(a.len(), b.len()));
    }
    if !(0.0..=1.0).contains(&bias) {
        return Err(VariationError::Bias(bias));
    }
    if bias == 0.0 {
        return Ok(a.clone());
    }
    if bias == 1.0 {
        return Ok(b.clone());
    }
    let mut child = a.clone();
    for i in a.differing_positions(b) {
        if rng.bernoulli(bias) {
            child.flip(i);
        }
    }
    Ok(child)
}

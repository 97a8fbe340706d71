//! The closed-form tables and the theoretical profile curves.

use std::io;

use ealab::algorithms::MutationVariant;
use ealab::theory::{
    self, leadingones_expected, minimize_greedy_constant, profile_crossover, profile_curve, ProfileAlgorithm,
    ProfileObjective, TheoryError,
};

use crate::Table;

const VARIANTS: [(&str, MutationVariant); 3] = [
    ("ea", MutationVariant::Plain),
    ("ea-resample", MutationVariant::Resample),
    ("ea-shift", MutationVariant::Shift),
];

/// Normalized LeadingOnes runtimes at `n = 1000` for `p = 1/n, 1/(10n), 1/(100n)`.
pub fn table1() -> Result<Table, TheoryError> {
    let n = 1000;
    let scales = [1.0, 10.0, 100.0];
    let rows = VARIANTS
        .iter()
        .map(|&(name, v)| {
            let cells = scales
                .iter()
                .map(|s| normalized(v, n, 1.0 / (s * n as f64)))
                .collect::<Result<_, _>>()?;
            Ok((name.to_string(), cells))
        })
        .collect::<Result<_, TheoryError>>()?;
    Ok(Table {
        corner: "algorithm".into(),
        columns: vec!["p=1/n".into(), "p=1/(10n)".into(), "p=1/(100n)".into()],
        rows,
    })
}

/// Normalized LeadingOnes runtimes at `p = 1/n` for `n = 10, ..., 10⁶`.
pub fn table2() -> Result<Table, TheoryError> {
    let ns = [10, 100, 1000, 10_000, 100_000, 1_000_000];
    let rows = VARIANTS
        .iter()
        .map(|&(name, v)| {
            let cells = ns
                .iter()
                .map(|&n| normalized(v, n, 1.0 / n as f64))
                .collect::<Result<_, _>>()?;
            Ok((name.to_string(), cells))
        })
        .collect::<Result<_, TheoryError>>()?;
    Ok(Table {
        corner: "algorithm".into(),
        columns: ns.iter().map(|n| format!("n={n}")).collect(),
        rows,
    })
}

/// Rate factor minimizing the Greedy GA_mod leading constant, and the minimum.
pub fn table3() -> Result<Table, TheoryError> {
    let ns = [10, 100, 500, 1000, 5000];
    let (cs, values): (Vec<f64>, Vec<f64>) = ns
        .iter()
        .map(|&n| minimize_greedy_constant::<f64>(n))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .unzip();
    Ok(Table {
        corner: "quantity".into(),
        columns: ns.iter().map(|n| format!("n={n}")).collect(),
        rows: vec![("c".into(), cs), ("value".into(), values)],
    })
}

fn normalized(v: MutationVariant, n: usize, p: f64) -> Result<f64, TheoryError> {
    Ok(leadingones_expected(v, n, p)?.normalized.expect("normalized by n²"))
}

/// One point of a theoretical runtime profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub algorithm: ProfileAlgorithm,
    pub level: usize,
    pub bound: f64,
}

/// Profile bounds of every algorithm for the levels above `start_level`,
/// minus the bound for reaching `start_level` itself.
pub fn profile_points(
    objective: ProfileObjective,
    n: usize,
    p: f64,
    start_level: usize,
) -> Result<Vec<ProfilePoint>, TheoryError> {
    if start_level >= n {
        return Err(TheoryError::Level { k: start_level, n });
    }
    let mut points = Vec::with_capacity(4 * (n - start_level));
    for algorithm in ProfileAlgorithm::ALL {
        let curve = profile_curve::<f64>(objective, algorithm, n, p)?;
        let offset = if start_level == 0 { 0.0 } else { curve[start_level - 1] };
        points.extend((start_level + 1..=n).map(|level| ProfilePoint {
            algorithm,
            level,
            bound: curve[level - 1] - offset,
        }));
    }
    Ok(points)
}

pub fn write_profile_points(out: &mut dyn io::Write, points: &[ProfilePoint]) -> io::Result<()> {
    writeln!(out, "algorithm,k,bound")?;
    for pt in points {
        writeln!(out, "{},{},{:.6}", pt.algorithm, pt.level, pt.bound)?;
    }
    Ok(())
}

/// OneMax profile bounds at `n = 10⁴`, `p = 1/n`, counted from level `n/2`.
pub fn fig3() -> Result<Vec<ProfilePoint>, TheoryError> {
    let n = 10_000;
    profile_points(ProfileObjective::OneMax, n, 1.0 / n as f64, n / 2)
}

/// LeadingOnes profile bounds at `n = 10⁴`, `p = 1/n`.
pub fn fig5() -> Result<Vec<ProfilePoint>, TheoryError> {
    let n = 10_000;
    profile_points(ProfileObjective::LeadingOnes, n, 1.0 / n as f64, 0)
}

/// First level at which each (1+1) EA variant's bound exceeds the RLS bound.
pub fn crossovers_against_rls(
    objective: ProfileObjective,
    n: usize,
    p: f64,
) -> Result<Vec<(ProfileAlgorithm, Option<usize>)>, TheoryError> {
    [ProfileAlgorithm::Plain, ProfileAlgorithm::Resample, ProfileAlgorithm::Shift]
        .into_iter()
        .map(|a| Ok((a, profile_crossover(a, ProfileAlgorithm::Rls, objective, n, p)?)))
        .collect()
}

/// `(v, ℓ*, drift)` rows of the drift-maximizing flip table.
pub fn write_drift_table(out: &mut dyn io::Write, n: usize) -> Result<(), anyhow::Error> {
    let table = theory::optimal_flip_table::<f64>(n)?;
    writeln!(out, "v,flips,drift")?;
    for (v, e) in table.entries.iter().enumerate() {
        writeln!(out, "{v},{},{:.12}", e.flips, e.drift)?;
    }
    Ok(())
}

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ealab::engine::write_runs_csv;
use ealab::experiments::{
    empirical_crossover, run_batch, write_profiles_csv, write_summary_csv, BatchResult,
};
use ealab::theory::{self, ProfileObjective};
use ealab::{AlgorithmConfig, BatchConfig64, CostModel, ObjectiveSpec, Rate};

use crate::{repro, Table, UsageError};

#[derive(Debug, Parser)]
#[command(name = "ealab", version, about = "Evolutionary algorithm runtimes: experiments and closed forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run batches and write summary.csv, profiles.csv and runs.csv.
    Run(RunArgs),
    /// Run batches and print their empirical runtime profiles.
    Profile(ProfileArgs),
    /// Evaluate closed-form expressions.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Print the drift-maximizing flip count for every OneMax value.
    DriftTable(DriftArgs),
    /// Minimize the leading runtime constants over the rate factor c in p = c/n.
    OptimalC(OptimalArgs),
    /// Print the data behind a published table or figure.
    Repro {
        #[arg(value_enum)]
        target: ReproTarget,
    },
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Algorithm names, repeated or comma separated.
    #[arg(long = "algorithm", short = 'a', required = true, value_delimiter = ',')]
    pub algorithms: Vec<AlgorithmConfig>,
    /// onemax, leadingones, linear:w1,...,wn, onemax-z:HEX, leadingones-z:HEX[:PERM]
    #[arg(long, short = 'o')]
    pub objective: ObjectiveSpec,
    /// Dimensions, repeated or comma separated.
    #[arg(long = "n", short = 'n', required = true, value_delimiter = ',')]
    pub dims: Vec<usize>,
    /// Mutation rate such as 1/n or 0.001; applies to algorithms that have one.
    #[arg(long)]
    pub p: Option<Rate>,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, env = "EALAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// count-all or skip-parent-equal; defaults to the algorithm's own.
    #[arg(long)]
    pub cost_model: Option<CostModel>,
    /// Evaluation cap per run; defaults to max(1000 n ln n, 10 n²).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub batch: BatchArgs,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub batch: BatchArgs,
    /// Write profiles.csv here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TheoryCommand {
    /// LeadingOnes runtimes over n² at n = 1000 for three mutation rates.
    Table1,
    /// LeadingOnes runtimes over n² at p = 1/n for n = 10 to 10⁶.
    Table2,
    /// Greedy GA optimal rate constant and runtime factor for each n.
    Table3,
    /// Per-level profile bounds: algorithm,k,bound.
    Profile {
        #[arg(long, value_enum)]
        objective: Objective,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/n")]
        p: Rate,
        /// Subtract the bound for this level and list only the levels above it.
        #[arg(long, default_value_t = 0)]
        start_level: usize,
    },
    /// Drift-maximizing flip count and its drift for each OneMax value.
    DriftTable(DriftArgs),
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct OptimalArgs {
    /// Dimensions for the Greedy GA constant; the large-n limit is always printed.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [10usize, 100, 500, 1000, 5000])]
    pub dims: Vec<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Objective {
    Onemax,
    Leadingones,
}

impl From<Objective> for ProfileObjective {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Onemax => Self::OneMax,
            Objective::Leadingones => Self::LeadingOnes,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReproTarget {
    Table1,
    Table2,
    Table3,
    Fig3,
    Fig5,
}

/// Runs a parsed command, writing its main output to `out` and progress to stderr.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Run(args) => command_run(args, out),
        Command::Profile(args) => command_profile(args, out),
        Command::Theory(t) => command_theory(t, out),
        Command::DriftTable(d) => drift_table(d.n, out),
        Command::OptimalC(args) => command_optimal_c(args, out),
        Command::Repro { target } => command_repro(*target, out),
    }
}

struct Batch {
    label: String,
    config: BatchConfig64,
    result: BatchResult<f64>,
}

/// Builds and validates every batch, then runs them in order.
fn run_batches(args: &BatchArgs) -> Result<Vec<Batch>> {
    let usage = |e: &dyn std::fmt::Display| UsageError(e.to_string());
    if args.runs == 0 {
        return Err(UsageError("--runs must be at least 1".into()).into());
    }
    if args.budget == Some(0) {
        return Err(UsageError("--budget must be at least 1".into()).into());
    }
    if args.workers == Some(0) {
        return Err(UsageError("--workers must be at least 1".into()).into());
    }
    let mut configs = Vec::new();
    for &n in &args.dims {
        let objective = args.objective.build::<f64>(n).map_err(|e| usage(&e))?;
        for alg in &args.algorithms {
            let alg = match args.p {
                Some(rate) if alg.has_rate() => alg.clone().with_rate(rate).map_err(|e| usage(&e))?,
                _ => alg.clone(),
            };
            alg.validate(n, objective.kind()).map_err(|e| usage(&e))?;
            let mut config = BatchConfig64::new(alg, objective.clone())
                .runs(args.runs)
                .seed(args.seed)
                .workers(args.workers);
            if let Some(m) = args.cost_model {
                config = config.cost_model(m);
            }
            if let Some(b) = args.budget {
                config = config.budget(b);
            }
            let label = if args.dims.len() > 1 {
                format!("{}/n={n}", config.algorithm.name())
            } else {
                config.algorithm.name().to_string()
            };
            configs.push((label, config));
        }
    }
    configs
        .into_iter()
        .map(|(label, config)| {
            let result = run_batch(&config)?;
            match &result.summary {
                Some(s) => eprintln!(
                    "{label} on {} n={}: {} runs, mean {:.1}, failures {}",
                    config.objective.name(),
                    config.objective.dim(),
                    config.runs,
                    s.mean,
                    result.failures
                ),
                None => eprintln!("{label}: no run reached the optimum"),
            }
            Ok(Batch { label, config, result })
        })
        .collect()
}

fn create(path: PathBuf) -> Result<BufWriter<File>> {
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn command_run(args: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let batches = run_batches(&args.batch)?;
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let pairs: Vec<_> = batches.iter().map(|b| (&b.config, &b.result)).collect();
    write_summary_csv(create(args.out.join("summary.csv"))?, &pairs)?;
    let profiles: Vec<_> = batches.iter().map(|b| (b.label.as_str(), &b.result.profile)).collect();
    write_profiles_csv(create(args.out.join("profiles.csv"))?, &profiles)?;
    let records: Vec<_> = batches.iter().flat_map(|b| b.result.run_records(&b.config)).collect();
    write_runs_csv(create(args.out.join("runs.csv"))?, &records)?;
    write_summary_csv(out, &pairs)?;
    Ok(())
}

fn command_profile(args: &ProfileArgs, out: &mut dyn Write) -> Result<()> {
    let batches = run_batches(&args.batch)?;
    let profiles: Vec<_> = batches.iter().map(|b| (b.label.as_str(), &b.result.profile)).collect();
    match &args.out {
        Some(path) => write_profiles_csv(create(path.clone())?, &profiles)?,
        None => write_profiles_csv(out, &profiles)?,
    }
    if let [a, b, ..] = batches.as_slice() {
        match empirical_crossover(&a.result.profile, &b.result.profile) {
            Some(k) => eprintln!("{} stays above {} from level {k}", a.label, b.label),
            None => eprintln!("{} does not end above {}", a.label, b.label),
        }
    }
    Ok(())
}

fn command_theory(cmd: &TheoryCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        TheoryCommand::Table1 => print_table(repro::table1()?, out),
        TheoryCommand::Table2 => print_table(repro::table2()?, out),
        TheoryCommand::Table3 => print_table(repro::table3()?, out),
        TheoryCommand::Profile {
            objective,
            n,
            p,
            start_level,
        } => {
            let p = p.resolve(*n).map_err(|e| UsageError(e.to_string()))?;
            if *start_level >= *n {
                return Err(UsageError(format!("--start-level must be below n = {n}")).into());
            }
            let points = repro::profile_points((*objective).into(), *n, p, *start_level)?;
            repro::write_profile_points(out, &points)?;
            Ok(())
        }
        TheoryCommand::DriftTable(d) => drift_table(d.n, out),
    }
}

fn drift_table(n: usize, out: &mut dyn Write) -> Result<()> {
    if n == 0 {
        return Err(UsageError("--n must be at least 1".into()).into());
    }
    repro::write_drift_table(out, n)
}

fn command_optimal_c(args: &OptimalArgs, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "problem,n,c,value")?;
    for &n in &args.dims {
        let (c, v) = theory::minimize_greedy_constant::<f64>(n).map_err(|e| UsageError(e.to_string()))?;
        writeln!(out, "greedy-ga-mod,{n},{c:.6},{v:.6}")?;
    }
    let (c, v) = theory::minimize_greedy_constant_limit::<f64>();
    writeln!(out, "greedy-ga-mod,inf,{c:.6},{v:.6}")?;
    let (c, v) = theory::leadingones_optimal_rate::<f64>();
    writeln!(out, "ea-leadingones,1000000,{c:.6},{v:.6}")?;
    Ok(())
}

fn command_repro(target: ReproTarget, out: &mut dyn Write) -> Result<()> {
    match target {
        ReproTarget::Table1 => print_table(repro::table1()?, out),
        ReproTarget::Table2 => print_table(repro::table2()?, out),
        ReproTarget::Table3 => print_table(repro::table3()?, out),
        ReproTarget::Fig3 => {
            repro::write_profile_points(out, &repro::fig3()?)?;
            Ok(())
        }
        ReproTarget::Fig5 => {
            repro::write_profile_points(out, &repro::fig5()?)?;
            let n = 10_000;
            for (alg, k) in repro::crossovers_against_rls(ProfileObjective::LeadingOnes, n, 1.0 / n as f64)? {
                match k {
                    Some(k) => eprintln!("{alg} bound exceeds rls from k = {k}"),
                    None => eprintln!("{alg} bound never exceeds rls"),
                }
            }
            Ok(())
        }
    }
}

fn print_table(t: Table, out: &mut dyn Write) -> Result<()> {
    t.write_csv(out)?;
    Ok(())
}

/// Writes to stdout, treating a closed pipe as success.
pub fn stdout_result(r: Result<()>) -> Result<()> {
    match r {
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) => Ok(()),
        other => other,
    }
}

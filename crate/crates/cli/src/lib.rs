//! Command-line front end for `ealab`: batch runs, empirical profiles,
//! closed-form tables and figure data, all written as CSV.

use std::fmt;
use std::io;

use ealab::{ConfigError, Rate};

pub mod commands;
pub mod repro;

pub use commands::{execute, Cli};

/// Resolves a rate written as `0.001` or `c/n` for dimension `n`.
pub fn parse_rate(spec: &str, n: usize) -> Result<f64, ConfigError> {
    spec.parse::<Rate>()?.resolve(n)
}

/// Invalid flags or flag combinations found before any work started.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A labelled grid of numbers, printed with six decimals.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub corner: String,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn cell(&self, row: &str, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|x| x == column)?;
        let (_, values) = self.rows.iter().find(|(r, _)| r == row)?;
        values.get(c).copied()
    }

    pub fn write_csv(&self, out: &mut dyn io::Write) -> io::Result<()> {
        writeln!(out, "{},{}", self.corner, self.columns.join(","))?;
        for (label, values) in &self.rows {
            write!(out, "{label}")?;
            for v in values {
                write!(out, ",{v:.6}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[test]
    fn rate_examples() {
        assert_eq!(parse_rate("1/n", 1000).unwrap(), 0.001);
        assert!((parse_rate("1.59/n", 100).unwrap() - 0.0159).abs() < 1e-15);
        assert!((parse_rate("0.7735810/n", 1000).unwrap() - 7.73581e-4).abs() < 1e-15);
        assert_eq!(parse_rate("0.25", 7).unwrap(), 0.25);
        for bad in ["", "n", "1/m", "abc/n", "-1/n", "0", "1.5", "2/n"] {
            assert!(parse_rate(bad, 2).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn usage_errors_use_exit_code_two() {
        let cases: [&[&str]; 6] = [
            &["ealab", "run", "--algorithm", "rls", "--objective", "onemax"],
            &["ealab", "run", "--algorithm", "sa", "--objective", "onemax", "--n", "5"],
            &["ealab", "run", "-a", "ea", "-o", "onemax", "-n", "5", "--p", "x/n"],
            &["ealab", "run", "-a", "ea", "-o", "twomax", "-n", "5"],
            &["ealab", "repro", "table9"],
            &["ealab", "theory", "profile", "--objective", "onemax"],
        ];
        for args in cases {
            let err = Cli::try_parse_from(args).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}");
        }
    }

    #[test]
    fn semantic_flag_errors_are_usage_errors() {
        let mut sink = Vec::new();
        for args in [
            &["ealab", "run", "-a", "rls-opt", "-o", "leadingones", "-n", "5"][..],
            &["ealab", "run", "-a", "ea", "-o", "onemax", "-n", "5", "--p", "5/n"],
            &["ealab", "run", "-a", "ea", "-o", "onemax", "-n", "5", "--runs", "0"],
            &["ealab", "run", "-a", "ea", "-o", "onemax-z:ff", "-n", "5"],
            &["ealab", "theory", "profile", "--objective", "onemax", "--n", "10", "--start-level", "10"],
        ] {
            let cli = Cli::try_parse_from(args).unwrap();
            let err = execute(&cli, &mut sink).unwrap_err();
            assert!(err.is::<UsageError>(), "{args:?}: {err}");
        }
    }

    #[test]
    fn every_subcommand_has_help() {
        for sub in ["run", "profile", "theory", "drift-table", "optimal-c", "repro"] {
            let err = Cli::try_parse_from(["ealab", sub, "--help"]).unwrap_err();
            assert_eq!(err.kind(), clap::error::ErrorKind::DisplayHelp, "{sub}");
        }
    }

    #[test]
    fn seed_falls_back_to_the_environment() {
        std::env::set_var("EALAB_SEED", "1234");
        let cli = Cli::try_parse_from(["ealab", "profile", "-a", "rls", "-o", "onemax", "-n", "4"]).unwrap();
        std::env::remove_var("EALAB_SEED");
        match cli.command {
            commands::Command::Profile(p) => assert_eq!(p.batch.seed, 1234),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_rendering() {
        let t = Table {
            corner: "q".into(),
            columns: vec!["a".into(), "b".into()],
            rows: vec![("x".into(), vec![1.0, 0.1234567])],
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "q,a,b\nx,1.000000,0.123457\n");
        assert_eq!(t.cell("x", "b"), Some(0.1234567));
        assert_eq!(t.cell("y", "b"), None);
    }

    #[test]
    fn commands_are_idempotent() {
        let run = |args: &[&str]| {
            let mut buf = Vec::new();
            execute(&Cli::try_parse_from(args).unwrap(), &mut buf).unwrap();
            buf
        };
        for args in [
            &["ealab", "repro", "table3"][..],
            &["ealab", "theory", "drift-table", "--n", "12"],
            &["ealab", "theory", "profile", "--objective", "leadingones", "--n", "50", "--start-level", "10"],
            &["ealab", "profile", "-a", "ea,rls", "-o", "leadingones", "-n", "30", "--runs", "5", "--seed", "3"],
        ] {
            assert_eq!(run(args), run(args));
        }
    }
}

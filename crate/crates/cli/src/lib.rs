//! Command-line front end. [`run`] parses arguments, dispatches, writes to the
//! given streams and returns the process exit status:
//!
//! * `0`: success, or a check that passed;
//! * `1`: infeasible parameters or a failed verification;
//! * `2`: usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use chaindesign::design::{write_design, DEFAULT_ENUMERATION_CAP};
use chaindesign::search::{to_csv, to_text};
use chaindesign::verify::{certify_uniqueness, CertificateMode, VerifyMode, VerifyOptions};
use chaindesign::{
    certify_flag_transitive, check_ft, collapse_chain, design_spec, enumerate_blocks,
    family_params, parse_chain, search, search_k, ChainSpec, DesignError,
};
use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "chaindesign",
    version,
    about = "Flag-transitive chain-imprimitive 2-designs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether `k` is a feasible block size for the chain.
    Feasible {
        /// Chain as `e1,e2,...,es`, smallest level first.
        chain: String,
        k: u64,
    },
    /// List every feasible block size for the chain.
    SearchK { chain: String },
    /// Print the design parameters and, with --enumerate, every block.
    Construct {
        chain: String,
        k: u64,
        #[arg(long)]
        enumerate: bool,
        /// Largest number of blocks to list.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP, value_parser = positive)]
        cap: u64,
        /// Write to this file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certify the 2-design property and flag-transitivity.
    Verify {
        chain: String,
        k: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random samples per sampled check.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Largest number of blocks enumerated.
        #[arg(long, default_value_t = 1_000_000, value_parser = positive)]
        cap: u64,
        /// Largest orbit explored.
        #[arg(long, default_value_t = 1_000_000, value_parser = positive)]
        orbit_cap: u64,
    },
    /// Check that the uniform subsets are exactly one orbit.
    Uniqueness {
        chain: String,
        k: u64,
        #[arg(long, default_value_t = 64)]
        trials: usize,
        #[arg(long, default_value_t = 1_000_000, value_parser = positive)]
        cap: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parameters of the explicit family member with `s` levels and gcd `d`.
    Family {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        d: u64,
    },
    /// Merge the levels around partition `i` and re-test feasibility.
    Collapse {
        chain: String,
        k: u64,
        #[arg(long)]
        drop: usize,
    },
    /// Every feasible chain with `s` levels and `e_i <= max`.
    SearchTable {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        max: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Rank, coordinates and classes of a point, `(d1,...,ds)` or `#rank`.
    Locate { chain: String, point: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exhaustive,
    Arithmetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

fn positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Errors that abort a command, sorted by exit status.
enum Failure {
    Usage(String),
    Domain(DesignError),
    Io(io::Error),
}

impl From<DesignError> for Failure {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::InvalidChain(_)
            | DesignError::Parse(_)
            | DesignError::BlockSizeOutOfRange { .. }
            | DesignError::LevelOutOfRange { .. }
            | DesignError::PointOutOfRange(_)
            | DesignError::CannotCollapse { .. } => Failure::Usage(e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(DesignError::Infeasible { e, k, reason })) => {
            let _ = writeln!(out, "infeasible e={e} k={k}: {reason}");
            EXIT_FAIL
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
    }
}

fn chain_arg(text: &str) -> Result<ChainSpec, Failure> {
    parse_chain(text).map_err(|e| Failure::Usage(format!("<CHAIN> {text:?}: {e}")))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Feasible { chain, k } => feasible(&chain_arg(&chain)?, k, out),
        Command::SearchK { chain } => {
            let chain = chain_arg(&chain)?;
            let reports = search_k(&chain);
            if reports.is_empty() {
                writeln!(out, "none e={}", chain.label())?;
                return Ok(EXIT_FAIL);
            }
            for r in reports {
                let y = r.y.as_ref().expect("feasible report carries y");
                writeln!(out, "k={} u={} y={y}", r.k, r.u.unwrap_or(0))?;
            }
            Ok(EXIT_OK)
        }
        Command::Construct {
            chain,
            k,
            enumerate,
            cap,
            output,
        } => {
            let chain = chain_arg(&chain)?;
            let spec = design_spec(&chain, k)?;
            let blocks = enumerate.then(|| enumerate_blocks(&chain, &spec.y, cap));
            // an over-cap listing is recorded in the export and is not a failure
            match output {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(&path)?);
                    write_design(&mut file, &spec, blocks)?;
                    file.flush()?;
                }
                None => {
                    write_design(out, &spec, blocks)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            chain,
            k,
            mode,
            seed,
            samples,
            cap,
            orbit_cap,
        } => {
            let chain = chain_arg(&chain)?;
            let opts = VerifyOptions {
                mode: match mode {
                    ModeArg::Auto => VerifyMode::Auto,
                    ModeArg::Exhaustive => VerifyMode::Exhaustive,
                    ModeArg::Arithmetic => VerifyMode::Arithmetic,
                },
                enumeration_cap: cap,
                orbit_cap: orbit_cap as usize,
                seed,
                samples,
            };
            verify(&chain, k, opts, out)
        }
        Command::Uniqueness {
            chain,
            k,
            trials,
            cap,
            seed,
        } => {
            let chain = chain_arg(&chain)?;
            let cert = certify_uniqueness(&chain, k, trials, cap, seed)?;
            let verdict = if cert.pass() { "pass" } else { "fail" };
            writeln!(out, "uniqueness {verdict} mode={} b={}", cert.mode, cert.b)?;
            write!(out, "{cert}")?;
            Ok(if cert.pass() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Family { s, d } => {
            let (chain, k) = family_params(s, d).map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(out, "e={} k={k}", chain.label())?;
            Ok(EXIT_OK)
        }
        Command::Collapse { chain, k, drop } => {
            let chain = chain_arg(&chain)?;
            let (collapsed, k) = collapse_chain(&chain, k, drop)?;
            let report = check_ft(&collapsed, k)?;
            let y = report.y.as_ref().expect("collapse returns feasible chains");
            writeln!(out, "e={} k={k} d={} y={y}", collapsed.label(), report.d)?;
            Ok(EXIT_OK)
        }
        Command::SearchTable { s, max, format } => {
            let rows = search(s, max)?;
            let text = match format {
                Format::Csv => to_csv(s, &rows),
                Format::Text => to_text(s, &rows),
            };
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Locate { chain, point } => {
            let chain = chain_arg(&chain)?;
            let p = chain.parse_point(&point)?;
            writeln!(out, "point={p} rank={}", chain.rank(&p))?;
            for level in 1..chain.s() {
                writeln!(out, "level{level}={}", chain.class_of(&p, level)?)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn feasible(chain: &ChainSpec, k: u64, out: &mut dyn Write) -> Outcome {
    let report = check_ft(chain, k)?;
    match (&report.y, report.u) {
        (Some(y), Some(u)) if report.feasible() => {
            writeln!(out, "feasible d={} u={u} y={y}", report.d)?;
            Ok(EXIT_OK)
        }
        _ => {
            writeln!(
                out,
                "infeasible d={} {}",
                report.d,
                report.failure_reason().unwrap_or_default()
            )?;
            Ok(EXIT_FAIL)
        }
    }
}

fn verify(chain: &ChainSpec, k: u64, opts: VerifyOptions, out: &mut dyn Write) -> Outcome {
    let (cert, note) = match certify_flag_transitive(chain, k, &opts) {
        Err(DesignError::CapExceeded { what, size, cap }) => {
            let fallback = VerifyOptions {
                mode: VerifyMode::Arithmetic,
                ..opts
            };
            let note = format!("note=exhaustive mode over cap: {what} count {size} > {cap}");
            (certify_flag_transitive(chain, k, &fallback)?, Some(note))
        }
        other => (other?, None),
    };
    let verdict = if cert.pass() { "pass" } else { "fail" };
    match (cert.mode, cert.flag_orbit) {
        (CertificateMode::Exhaustive, Some(flags)) => writeln!(
            out,
            "2-design {verdict} λ={} b={} flag-orbit={flags}",
            cert.lambda, cert.b
        )?,
        _ => writeln!(
            out,
            "2-design {verdict} λ={} b={} mode={}",
            cert.lambda, cert.b, cert.mode
        )?,
    }
    if let Some(note) = note {
        writeln!(out, "{note}")?;
    }
    write!(out, "{cert}")?;
    Ok(if cert.pass() { EXIT_OK } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("chaindesign").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn feasible_examples() {
        let (code, out, _) = run_str(&["feasible", "3,5,17", "128"]);
        assert_eq!((code, out.as_str()), (0, "feasible d=2 u=1 y=1,2,8,128\n"));
        let (code, out, _) = run_str(&["feasible", "4,4", "5"]);
        assert_eq!(code, 1);
        assert!(out.starts_with("infeasible d=3 FT1 fails"), "{out}");
    }

    #[test]
    fn family_example() {
        assert_eq!(
            run_str(&["family", "--s", "3", "--d", "4"]).1,
            "e=5,9,49 k=552\n"
        );
    }

    #[test]
    fn verify_exhaustive_first_line() {
        let (code, out, _) = run_str(&["verify", "4,4", "6", "--mode", "exhaustive"]);
        assert_eq!(code, 0);
        assert_eq!(
            out.lines().next(),
            Some("2-design pass λ=108 b=864 flag-orbit=5184")
        );
        assert!(out.contains("lambda_observed=108\n"));
    }

    #[test]
    fn verify_over_cap_exits_zero_with_mode() {
        let (code, out, _) = run_str(&["verify", "3,5,17", "128", "--samples", "4"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().next().unwrap().ends_with("mode=arithmetic"));
        assert!(out.contains("seed=0\n"));
        let (code, out, _) = run_str(&[
            "verify",
            "3,5,17",
            "128",
            "--mode",
            "exhaustive",
            "--samples",
            "4",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("note=exhaustive mode over cap"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_str(&["feasible", "3,x", "5"]).0, 2);
        assert_eq!(run_str(&["feasible", "4,4", "16"]).0, 2);
        assert_eq!(run_str(&["bogus"]).0, 2);
        let (code, _, err) = run_str(&["construct", "4,4", "6", "--cap", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("--cap"), "{err}");
        assert_eq!(run_str(&["collapse", "4,4", "6", "--drop", "1"]).0, 2);
        assert_eq!(run_str(&["family", "--s", "1", "--d", "2"]).0, 2);
    }

    #[test]
    fn construct_outputs() {
        let (code, out, _) = run_str(&["construct", "3,5", "8", "--enumerate"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 6 + 405);
        let (code, out, _) = run_str(&["construct", "3,5,17", "128", "--enumerate"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("blocks=omitted(cap-exceeded)\n"));
        let (_, out, _) = run_str(&["construct", "4,4", "6"]);
        assert_eq!(out.lines().count(), 6);
    }

    #[test]
    fn collapse_and_search_k() {
        assert_eq!(
            run_str(&["collapse", "3,5,17", "128", "--drop", "1"]).1,
            "e=15,17 k=128 d=2 y=1,8,128\n"
        );
        let (code, out, _) = run_str(&["search-k", "6,6"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2);
        assert_eq!(run_str(&["search-k", "3,3"]).0, 1);
    }

    #[test]
    fn locate_point() {
        let (code, out, _) = run_str(&["locate", "3,5,17", "(1,2,3)"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("point=(1,2,3) rank=52\n"), "{out}");
    }

    #[test]
    fn output_is_repeatable() {
        let args = ["verify", "3,5,17", "128", "--seed", "9", "--samples", "3"];
        assert_eq!(run_str(&args), run_str(&args));
    }
}

//! Command-line front end. [`run`] parses an argument vector, executes the
//! command and returns the exit code together with what would be printed.
//!
//! Exit codes: 0 when every requested check is proven (assumed steps count
//! only with `--allow-assumed`), 1 when something is refuted or unknown, and
//! 2 for usage and input errors.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};

/// JSON Schema for everything printed with `--output json`.
pub const OUTPUT_SCHEMA: &str = include_str!("../schema/output.schema.json");

#[derive(Parser, Debug)]
#[command(name = "c2forms", version, about = "Quadratic forms, Witt groups and Brauer classes in characteristic 2")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub output: OutputFormat,
    /// Absolute degree n of the constant field GF(2^n); even, at least 2.
    #[arg(long, env = "C2FORMS_BASE_DEGREE", default_value_t = 2, value_parser = parse_base_degree, global = true)]
    pub base_degree: u32,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 2024, global = true)]
    pub seed: u64,
    /// Depth bound of the rewrite searches.
    #[arg(long, default_value_t = 8, global = true)]
    pub search_depth: usize,
    /// Degree bound of the isotropy searches.
    #[arg(long, default_value_t = 6, global = true)]
    pub degree_bound: u32,
    /// Extension step over the current top field, `as:<a>` for a root of
    /// Y²+Y=a or `sqrt:<a>` for √a; repeat to build a tower.
    #[arg(long = "ext", global = true, value_name = "KIND:ELEMENT")]
    pub ext: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Val {
    X,
    Y,
    Xinv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Isometry,
    Witt,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Operations on a single form.
    Form {
        #[command(subcommand)]
        op: FormOp,
    },
    /// First and second residue forms at a valuation of k(x, y).
    Residues {
        #[arg(long, value_enum)]
        val: Val,
        form: String,
    },
    /// Scharlau transfer (s(1)=0, s(generator)=1) of a form from level n to n-1.
    Transfer {
        #[arg(long)]
        step: usize,
        form: String,
    },
    /// Search for an isometry or a Witt equivalence.
    Rewrite {
        #[arg(long, value_enum)]
        mode: ModeArg,
        f1: String,
        f2: String,
    },
    /// Descent criterion for β[1,b] ⊥ γ[1,c], β = s + tα, γ = u + vα.
    /// Uses level 1 of the tower, adjoining ℘⁻¹(x) when no --ext is given.
    Pcex2 {
        s: String,
        t: String,
        u: String,
        v: String,
        b: String,
        c: String,
    },
    /// Run a verification scenario.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Generators of the Witt kernel for a tower such as `sqrt:x,as:y^-1`.
    KernelGens { shape: String, m: usize },
    /// Print the JSON Schema of the JSON output.
    Schema,
}

#[derive(Subcommand, Debug)]
pub enum FormOp {
    /// Parse and print in normal form.
    Normalize { form: String },
    /// Arf invariant of a nonsingular form.
    Arf { form: String },
    /// Clifford class as a sum of quaternion symbols.
    Clifford { form: String },
    /// Membership in I²_q.
    I2 { form: String },
}

#[derive(Subcommand, Debug)]
pub enum VerifyTarget {
    /// The worked counterexample over GF(2^n)(x, y).
    Star {
        /// Run only the named step; repeatable.
        #[arg(long)]
        step: Vec<String>,
        /// Count assumed steps as passing.
        #[arg(long)]
        allow_assumed: bool,
        /// Worker threads for independent steps.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Include per-step runtimes.
        #[arg(long)]
        timings: bool,
    },
}

fn parse_base_degree(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if n < 2 || n % 2 == 1 || n > 16 {
        return Err(format!("base degree must be even and between 2 and 16, got {n}"));
    }
    Ok(n)
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, S>(args: I) -> RunOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    RunOutput { code: 0, stdout: shown, stderr: String::new() }
                }
                _ => RunOutput { code: 2, stdout: String::new(), stderr: shown },
            };
        }
    };
    commands::execute(&cli)
}

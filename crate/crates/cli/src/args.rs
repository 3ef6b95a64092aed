use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cm_entropy::grid::Spacing;

#[derive(Debug, Parser)]
#[command(
    name = "cm-entropy",
    version,
    about = "Entropies of the binomial / Poisson / negative-binomial family and checks of their derivative signs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Basis head and H, S, R, T with error bounds on an x-grid.
    Eval(EvalArgs),
    /// Derivatives of the Shannon entropy H on an x-grid.
    Deriv(DerivArgs),
    /// Run a verification suite. Exit 0 on pass, 1 on a violation.
    Check(CheckArgs),
    /// Second differences of ln S for c < 0 (report only).
    ScanConjecture(ScanArgs),
    /// Entropies over a (c, n, x) matrix.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    /// Family parameter: c < 0 binomial, c = 0 Poisson, c > 0 negative binomial.
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingArg {
    Linear,
    Geometric,
}

impl From<SpacingArg> for Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Geometric => Spacing::Geometric,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Single point; overrides the grid flags.
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum, default_value = "linear")]
    pub spacing: SpacingArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeriesArgs {
    /// Absolute tolerance of the certified series tail.
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Append a footer with the wall time. Off by default so that reports
    /// are byte-identical between runs.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Number of leading basis values p_0.. printed per row.
    #[arg(long, default_value_t = 4)]
    pub head: usize,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Exact,
    Fd,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DerivArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Derivative order of H.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=10))]
    pub order: u32,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    Theorem1,
    Theorem2,
    Theorem3,
    Corollary1,
    Section3,
    Representations,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,
    /// Defaults to the suite's family when only --n is given.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Without --n the suite's default parameter matrix is used.
    #[arg(long, allow_negative_numbers = true)]
    pub n: Option<f64>,
    /// Reduced grids.
    #[arg(long)]
    pub quick: bool,
    /// Relative tolerance of the sign and monotonicity checks.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Absolute tolerance of the corollary-1 sandwich.
    #[arg(long, default_value_t = 1e-9)]
    pub sandwich_tol: f64,
    /// Absolute tolerance of the integral-representation cross-checks.
    #[arg(long, default_value_t = 1e-8)]
    pub repr_tol: f64,
    /// Negate every asserted sign; the run must then fail.
    #[arg(long, hide = true)]
    pub invert_signs: bool,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Points of the closed grid on [0, -1/c].
    #[arg(long, default_value_t = 199)]
    pub points: usize,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Quantity {
    #[value(name = "H", alias = "h")]
    H,
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "T", alias = "t")]
    T,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Comma-separated list, e.g. -1,0,1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub c_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub n_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_enum, default_value = "H,S,R,T")]
    pub quantities: Vec<Quantity>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdeform_core::{LdpStatistic, NormalizationMode};

#[derive(Debug, Parser)]
#[command(name = "qdeform", version, about = "q-deformed binomial distributions and their limit theorems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability mass function on the standardized grid
    Pmf(PmfArgs),
    /// Exact q-log factorial against the leading and refined Stirling forms
    Stirling(StirlingArgs),
    /// q-divergence, α-divergence and rate function for a binary pair
    Divergence(DivergenceArgs),
    /// Large-deviation statistic over a sequence of sizes
    Ldp(LdpArgs),
    /// q-log residuals around the peak
    Clt(CltArgs),
    /// Scaled densities and q-Gaussian fits for several sizes
    Collapse(CollapseArgs),
    /// Re-read a JSON report and print its summary line
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Shift,
}

impl From<Mode> for NormalizationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => NormalizationMode::ExactCq,
            Mode::Shift => NormalizationMode::MaxShift,
        }
    }
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Shift => "shift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Cumulative,
    Boundary,
}

impl From<Statistic> for LdpStatistic {
    fn from(s: Statistic) -> Self {
        match s {
            Statistic::Cumulative => LdpStatistic::Cumulative,
            Statistic::Boundary => LdpStatistic::Boundary,
        }
    }
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Cumulative => "cumulative",
            Statistic::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write data here instead of stdout; the summary line then goes to stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct PmfArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: f64,
    #[arg(long, value_enum, default_value_t = Mode::Shift)]
    pub mode: Mode,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StirlingArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long = "n-list", value_delimiter = ',', default_value = "1000,10000,100000,1000000")]
    pub n_list: Vec<usize>,
    /// Size at which c_q is estimated (the table extends to twice this)
    #[arg(long = "n-ref", default_value_t = 100_000)]
    pub n_ref: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DivergenceArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub r: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LdpArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Shift)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Statistic::Cumulative)]
    pub statistic: Statistic,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CltArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub n: usize,
    /// Half-width of the window in standardized units
    #[arg(long, visible_alias = "L", default_value_t = 2.0)]
    pub window: f64,
    #[arg(long, value_enum, default_value_t = Mode::Shift)]
    pub mode: Mode,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CollapseArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub r: f64,
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, visible_alias = "L", default_value_t = 3.0)]
    pub window: f64,
    #[arg(long, value_enum, default_value_t = Mode::Shift)]
    pub mode: Mode,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub input: PathBuf,
}

//! `entps`: parameter checks, overlaps, Wigner grids and the verification
//! suite from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use config::{Format, RunConfig};

/// Exit statuses.
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
    ChecksFailed,
}

impl From<entps::Error> for CliError {
    fn from(e: entps::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(format!("i/o error: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "entps", version, about = "Entangled phase-space states in a truncated two-mode Fock space")]
struct Cli {
    /// Worker threads for quadrature.
    #[arg(long, global = true, env = "ENTPS_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parameter validation.
    #[command(subcommand)]
    Params(ParamsCommand),
    /// Wigner function output.
    #[command(subcommand)]
    Wigner(WignerCommand),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Closed-form overlap, optionally beside its Fock-basis value.
    Overlap(OverlapArgs),
    /// Fock coefficients of states.
    #[command(subcommand)]
    State(StateCommand),
    /// Collective quadrature moments of |Γ⟩.
    Moments(MomentArgs),
}

#[derive(Debug, Subcommand)]
enum ParamsCommand {
    /// Validate (α, β, γ, δ) and print derived quantities.
    Check(ModelArgs),
}

#[derive(Debug, Subcommand)]
enum WignerCommand {
    /// Wigner function of |Γ⟩ on a rectangular (ρ, ς) grid, as CSV.
    Grid(GridArgs),
}

#[derive(Debug, Subcommand)]
enum StateCommand {
    /// Fock coefficients of |Γ⟩.
    Coeffs(CoeffArgs),
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("bad real part `{re}`: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("bad imaginary part `{im}`: {e}"))?;
    Ok(Complex64::new(re, im))
}

/// Representation parameters and the `|Γ⟩` label.
#[derive(Debug, Clone, Args)]
struct ModelArgs {
    #[arg(long, allow_hyphen_values = true, requires_all = ["beta", "gamma", "delta"], conflicts_with = "kappa")]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    delta: Option<f64>,
    /// Husimi family (κ/(1+κ), 1, 1/(1+κ), -1).
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// σ as `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    sigma: Option<Complex64>,
    /// τ as `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    tau: Option<Complex64>,
}

/// `start:stop:count`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Axis {
    start: f64,
    stop: f64,
    count: usize,
}

impl Axis {
    fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count).map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64).collect()
    }
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected `start:stop:count`, got `{s}`"));
    };
    let start: f64 = a.parse().map_err(|e| format!("bad start `{a}`: {e}"))?;
    let stop: f64 = b.parse().map_err(|e| format!("bad stop `{b}`: {e}"))?;
    let count: usize = n.parse().map_err(|e| format!("bad count `{n}`: {e}"))?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(format!("axis `{s}` must have finite ends and count >= 1"));
    }
    Ok(Axis { start, stop, count })
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis, default_value = "-1:1:5")]
    rho_re: Axis,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis, default_value = "-1:1:5")]
    rho_im: Axis,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis, default_value = "-1:1:5")]
    vsig_re: Axis,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_axis, default_value = "-1:1:5")]
    vsig_im: Axis,
    /// Add the quadrature column computed from Fock-basis overlaps.
    #[arg(long)]
    numeric: bool,
    /// Fock cutoff for `--numeric` [default: 25].
    #[arg(long)]
    cutoff: Option<usize>,
    /// Gauss–Hermite points per real dimension for `--numeric` [default: 32].
    #[arg(long)]
    order: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TierArg {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    tier: Option<TierArg>,
    /// Comma-separated check names.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replace every check's default cutoff.
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    order2d: Option<usize>,
    #[arg(long)]
    order4d: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Standard output format.
    #[arg(long, value_enum, default_value = "table")]
    format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OverlapKind {
    /// ⟨Γ|z1,z2⟩
    Coherent,
    /// ⟨Γ(σ,τ)|Γ(σ2,τ2)⟩
    Gamma,
    /// ⟨η|Γ⟩
    Eta,
    /// ⟨ξ|Γ⟩
    Xi,
    /// ⟨ξ|η⟩
    XiEta,
}

#[derive(Debug, Args)]
struct OverlapArgs {
    #[arg(value_enum)]
    kind: OverlapKind,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    z1: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    z2: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    sigma2: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    tau2: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    eta: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    xi: Option<Complex64>,
    /// Also print the truncated Fock-basis value.
    #[arg(long)]
    fock: bool,
    /// Fock cutoff [default: 30].
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Debug, Args)]
struct CoeffArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Fock cutoff [default: 10].
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MomentArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Also compute the moments as Fock-basis expectation values.
    #[arg(long)]
    fock: bool,
    /// Fock cutoff [default: 30].
    #[arg(long)]
    cutoff: Option<usize>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(k))
            .build_global()
            .map_err(|e| CliError::Invalid(format!("cannot configure threads: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Params(ParamsCommand::Check(m)) => commands::params_check(&m, &cfg),
        Command::Wigner(WignerCommand::Grid(g)) => commands::wigner_grid(&g, &cfg),
        Command::Verify(v) => commands::verify(&v, &cfg),
        Command::Overlap(o) => commands::overlap(&o, &cfg),
        Command::State(StateCommand::Coeffs(c)) => commands::state_coeffs(&c, &cfg),
        Command::Moments(m) => commands::moments(&m, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(CliError::ChecksFailed) => ExitCode::from(EXIT_CHECK_FAILED),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_and_axis_parsing() {
        assert_eq!(parse_complex("-0.3,0.4").unwrap(), Complex64::new(-0.3, 0.4));
        assert!(parse_complex("0.3").is_err());
        assert_eq!(parse_axis("-1:1:3").unwrap().values(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_axis("0.5:2:1").unwrap().values(), vec![0.5]);
        assert!(parse_axis("0:1:0").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

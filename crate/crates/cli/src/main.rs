use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gq_cli::{parse_point, run, Command, ModeConfig, RunConfig, Source, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "gq",
    version,
    about = "Exact checks for star products, twistors and dynamical twists over a Lie algebra pair"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Jacobi identity of the structure constants
    CheckJacobi(Common),
    /// ω(λ), D(λ) = det ω(λ), a witness point and the character locus
    Polarization(Common),
    /// Counit and shifted cocycle conditions of a dynamical twist
    CheckDynTwist(Common),
    /// l-invariance of a dynamical twist
    CheckInvariance(Common),
    /// Build the Gutt twistor and check it
    GuttTwistor(Common),
    /// Lift a dynamical twist to H⊗H and check the result
    Bridge(Common),
    /// Twistor equations for a tensor file (default: the Gutt twistor)
    CheckTwistor(Common),
    /// Compare the dynamical-twist and twistor verdicts
    Equivalence(Common),
    /// Exchange element R = F₂₁⁻¹ ∗ F and its round trip
    ExchangeR(Common),
    /// Classical limit θ, the assembled bivector and its Jacobi identity
    ClassicalLimit(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Jet,
}

#[derive(Args)]
struct Common {
    /// Lie algebra file
    #[arg(long, conflicts_with = "bundled")]
    algebra: Option<PathBuf>,
    /// Bundled algebra name
    #[arg(long)]
    bundled: Option<String>,
    /// Dynamical twist file
    #[arg(long, conflicts_with = "bundled_twist")]
    twist: Option<PathBuf>,
    /// Bundled twist name
    #[arg(long)]
    bundled_twist: Option<String>,
    /// H⊗H tensor file for check-twistor
    #[arg(long)]
    tensor: Option<PathBuf>,
    /// Bivector file for classical-limit
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Truncation order K
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Jet base point, comma separated rationals
    #[arg(long, allow_hyphen_values = true)]
    base_point: Option<String>,
    /// Jet degree L
    #[arg(long, default_value_t = 4)]
    jet_degree: u32,
    /// Seed for random inputs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run on this many seeded random l-invariant twists
    #[arg(long)]
    random: Option<usize>,
    /// Coefficient degree of random twists
    #[arg(long, default_value_t = 2)]
    coeff_degree: u32,
    /// U-leg degree of random twists
    #[arg(long, default_value_t = 2)]
    leg_degree: u32,
    /// u₊ basis indices, comma separated
    #[arg(long, value_delimiter = ',')]
    u_plus: Option<Vec<usize>>,
    /// u₋ basis indices, comma separated
    #[arg(long, value_delimiter = ',')]
    u_minus: Option<Vec<usize>>,
    /// Write the JSON report here
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Write the computed tensor or twist here
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(command: Command, c: Common) -> Result<(RunConfig, Option<PathBuf>), String> {
    let mode = match c.mode {
        Mode::Exact => ModeConfig::Exact,
        Mode::Jet => {
            let base_point = parse_point(c.base_point.as_deref().ok_or("--mode jet needs --base-point")?)
                .map_err(|e| e.to_string())?;
            ModeConfig::Jet {
                base_point,
                degree: c.jet_degree,
            }
        }
    };
    let mut rc = RunConfig::new(command);
    rc.order = c.order;
    rc.mode = mode;
    rc.algebra = c.algebra.map(Source::File).or(c.bundled.map(Source::Bundled));
    rc.twist = c.twist.map(Source::File).or(c.bundled_twist.map(Source::Bundled));
    rc.tensor = c.tensor;
    rc.theta = c.theta;
    rc.random = c.random;
    rc.seed = c.seed;
    rc.coeff_degree = c.coeff_degree;
    rc.leg_degree = c.leg_degree;
    rc.u_plus = c.u_plus;
    rc.u_minus = c.u_minus;
    rc.out = c.out;
    Ok((rc, c.json_out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("GQ_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let (command, common) = match cli.command {
        Sub::CheckJacobi(c) => (Command::CheckJacobi, c),
        Sub::Polarization(c) => (Command::Polarization, c),
        Sub::CheckDynTwist(c) => (Command::CheckDynTwist, c),
        Sub::CheckInvariance(c) => (Command::CheckInvariance, c),
        Sub::GuttTwistor(c) => (Command::GuttTwistor, c),
        Sub::Bridge(c) => (Command::Bridge, c),
        Sub::CheckTwistor(c) => (Command::CheckTwistor, c),
        Sub::Equivalence(c) => (Command::Equivalence, c),
        Sub::ExchangeR(c) => (Command::ExchangeR, c),
        Sub::ClassicalLimit(c) => (Command::ClassicalLimit, c),
    };
    let (rc, json_out) = match config(command, common) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let outcome = run(&rc);
    println!("{}", outcome.text);
    if let Some(path) = json_out {
        if let Err(e) = std::fs::write(&path, outcome.json_text() + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}

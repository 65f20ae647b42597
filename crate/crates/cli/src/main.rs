use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod inputs;

const FUNCTIONALS: &str = "\
Functionals are written inline or as JSON ({\"kind\": .., <indices>, \"m\": ..}):
  Phi(k,r,s,j)          local Minkowski tensor, k-faces, x^r u^s Q_L^j, any n
  PhiTilde3(r,s,j)      edge tensor v^(2j+1) x^r u^s (v x u), n = 3
  PhiTilde2(k,r,s)      x^r u^s ubar over k-faces, n = 2
  GlobalPsi2(k,r,s)     total x^r u^s over k-faces, unnormalized, n = 2
  GlobalPsi2Vol(r)      total x^r over the polygon, n = 2
  GlobalPhiTilde2(k,r,s) total of PhiTilde2, n = 2
  GlobalT3(r,s)         total of PhiTilde3(r,s,0), n = 3
  W1                    sum over edges of length times weighted arc length
Prefix Q^m* multiplies by a power of the metric, e.g. Q^1*Phi(1,0,2,1).

Regions: \"full\", inline JSON or a file holding
  {\"union\": [{\"box\": {\"lo\": [..], \"hi\": [..], \"axes\": [[..], ..]}, \"cap\": {\"c\": [..], \"tau\": t}}]}
Weights: const1, const0, bump:h=<h> (default bump for cap height h),
  bump:h=<h>,tilt=<rad>, inline JSON {\"bump\": {\"pole\": [..], \"tau0\": a, \"tau1\": b}} or a file.";

#[derive(Parser)]
#[command(name = "minktensor", version, about = "Tensor valuations of polytopes and their smooth limits", after_help = FUNCTIONALS)]
struct Cli {
    /// Single worker thread; results are reduced in a fixed order either way.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one functional on a polytope.
    Compute(ComputeArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
    /// Evaluate a functional along a ladder of approximating polytopes.
    Converge(ConvergeArgs),
    /// Contrast the rotation discrepancy of an extendable and a non-extendable functional.
    DemoNoncovariance(DemoArgs),
    /// Check the small-normal and edge-class assumptions for given parameters.
    Assumptions(AssumptionArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Polytope as JSON ({"dim", "vertices"}) or OFF.
    #[arg(long)]
    input: PathBuf,
    /// Inline functional or JSON file.
    #[arg(long)]
    functional: String,
    #[arg(long, default_value = "full")]
    region: String,
    #[arg(long, default_value = "const1")]
    weight: String,
    /// Tensor JSON destination; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name or "all".
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    /// Write the full JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Csv,
    Json,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    t: Vec<f64>,
    #[arg(long, default_value = "PhiTilde3(0,0,0)")]
    functional: String,
    /// Frame direction in the plane, "a=x,y".
    #[arg(long, default_value = "a=1,0")]
    frame: String,
    /// Number of trailing -e3 frame arguments; the s index by default.
    #[arg(long)]
    trailing: Option<usize>,
    /// Rotation angle about e3 used for the discrepancy column.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_8)]
    angle: f64,
    /// Weight; the default bump for the chosen h when absent.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    emit: Emit,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    t: Vec<f64>,
}

#[derive(Args)]
struct AssumptionArgs {
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    #[arg(long, default_value_t = 0.1)]
    t: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Shrink h and t until all three assumptions hold.
    #[arg(long)]
    search: bool,
    #[arg(long, default_value_t = 24)]
    max_steps: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.serial {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(1).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Compute(a) => commands::compute(a, cli.serial),
        Command::Verify(a) => commands::verify(a, cli.serial),
        Command::Converge(a) => commands::converge(a, cli.serial),
        Command::DemoNoncovariance(a) => commands::demo(a, cli.serial),
        Command::Assumptions(a) => commands::assumptions(a, cli.serial),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::error_code(&e))
        }
    }
}

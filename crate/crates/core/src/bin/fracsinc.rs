use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracsinc::harness::{self, ExperimentConfig};
use fracsinc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "fracsinc",
    version,
    about = "Sinc-quadrature solvers for space-time fractional diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Mittag-Leffler function e_{γ,μ}(re + i·im).
    MlEval {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        im: f64,
    },
    /// Space convergence table (hom-1d or hom-2d).
    ConvergenceSpace(Flags),
    /// Sup of the sinc quadrature error probe against N.
    SincDecay(Flags),
    /// Sup of the sinc quadrature error probe against t.
    TimeSingularity(Flags),
    /// Time-quadrature convergence for the forced problem.
    ConvergenceTime(Flags),
    /// Dump one discrete solution as nodal values.
    Solve(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Flat key=value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Time, or a comma list for time-singularity.
    #[arg(long)]
    t: Option<String>,
    /// Comma list or inclusive range such as 3..7.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "calN")]
    cal_n: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long = "contour-sign")]
    contour_sign: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    partition: Option<String>,
}

impl Flags {
    fn resolve(&self, command: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::for_command(command);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let pairs = [
            ("problem", &self.problem),
            ("gamma", &self.gamma),
            ("beta", &self.beta),
            ("t", &self.t),
            ("levels", &self.levels),
            ("N", &self.n),
            ("calN", &self.cal_n),
            ("steps", &self.steps),
            ("d", &self.d),
            ("b", &self.b),
            ("out", &self.out),
            ("contour-sign", &self.contour_sign),
            ("method", &self.method),
            ("partition", &self.partition),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::MlEval { gamma, mu, re, im } => {
            println!("{}", harness::cmd_ml_eval(gamma, mu, re, im)?);
            Ok(())
        }
        Command::ConvergenceSpace(f) => {
            let cfg = f.resolve("convergence-space")?;
            emit(&cfg, &harness::cmd_convergence_space(&cfg)?.to_csv())
        }
        Command::SincDecay(f) => {
            let cfg = f.resolve("sinc-decay")?;
            emit(&cfg, &harness::cmd_sinc_decay(&cfg)?.to_csv())
        }
        Command::TimeSingularity(f) => {
            let cfg = f.resolve("time-singularity")?;
            emit(&cfg, &harness::cmd_time_singularity(&cfg)?.to_csv())
        }
        Command::ConvergenceTime(f) => {
            let cfg = f.resolve("convergence-time")?;
            emit(&cfg, &harness::cmd_convergence_time(&cfg)?)
        }
        Command::Solve(f) => {
            let cfg = f.resolve("solve")?;
            emit(&cfg, &harness::cmd_solve(&cfg)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toda_mirror::harness::{parse_config_file, run_and_emit, HarnessError, RunConfig, Task};

/// Verification runs for the quantum Toda lattice, its flag-manifold mirror
/// and the Virasoro operators. Set RAYON_NUM_THREADS to bound parallelism.
#[derive(Parser)]
#[command(name = "toda-mirror", version)]
struct Cli {
    #[command(subcommand)]
    task: Command,
}

#[derive(Subcommand)]
enum Command {
    /// [D_i, D_j] = 0 and [H, D_i] = 0, exactly.
    Commute(Flags),
    /// Charts of the mirror graph: relations, Jacobians, phase.
    Mirror(Flags),
    /// Critical-point census, spectral identity, Lagrangian image.
    Critical(Flags),
    /// Eigenvalue equations for the mirror integral.
    Eigen(Flags),
    /// Stirling tail versus the classical-limit series.
    ClassicalLimit(Flags),
    /// Quantized point and family Virasoro operators.
    Virasoro(Flags),
    /// Every task with its defaults.
    All(Flags),
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated rationals with zero sum, e.g. 1/4,1/8,-3/8.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Comma-separated positive rationals or decimals.
    #[arg(long)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    /// Truncation order (classical-limit).
    #[arg(long)]
    order: Option<usize>,
    /// Fock-space window (virasoro).
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    tol: Option<String>,
    /// Chart k-sequence, e.g. 0,1.
    #[arg(long)]
    chart: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// json or text.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report runtime_ms as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

impl Flags {
    fn layer(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("n", self.n.map(|x| x.to_string()));
        put("lambda", self.lambda.clone());
        put("q", self.q.clone());
        put("hbar", self.hbar.clone());
        put("order", self.order.map(|x| x.to_string()));
        put("window", self.window.map(|x| x.to_string()));
        put("tol", self.tol.clone());
        put("chart", self.chart.clone());
        put("output", self.output.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.clone());
        put("seed", self.seed.map(|x| x.to_string()));
        put("no-timing", self.no_timing.then(|| "true".to_string()));
        m
    }
}

fn split(cmd: Command) -> (Task, Flags) {
    match cmd {
        Command::Commute(f) => (Task::Commute, f),
        Command::Mirror(f) => (Task::Mirror, f),
        Command::Critical(f) => (Task::Critical, f),
        Command::Eigen(f) => (Task::Eigen, f),
        Command::ClassicalLimit(f) => (Task::ClassicalLimit, f),
        Command::Virasoro(f) => (Task::Virasoro, f),
        Command::All(f) => (Task::All, f),
    }
}

fn configure(cli: Cli) -> Result<RunConfig, HarnessError> {
    let (task, flags) = split(cli.task);
    let mut layers = Vec::new();
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        layers.push(parse_config_file(&text)?);
    }
    layers.push(flags.layer());
    let mut c = RunConfig::from_layers(task, &layers)?;
    c.command = std::env::args().collect();
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure(cli).and_then(|c| run_and_emit(&c, &mut std::io::stdout()));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("toda-mirror: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

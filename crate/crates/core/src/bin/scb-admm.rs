use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scb_admm::harness::{self, load_specs, RunSpec, SolverKind, EXIT_FAILURE};
use scb_admm::linops::MajorizerStrategy;

#[derive(Parser)]
#[command(name = "scb-admm", version, about = "Multi-block semi-proximal ADMM benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one instance.
    Run(RunArgs),
    /// Run every solver on every instance and build comparison tables and
    /// performance-profile data.
    Compare(CompareArgs),
}

/// Solver settings; each flag overrides the value from `--spec`.
#[derive(Args, Clone, Default)]
struct ConfigFlags {
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    log_every: Option<usize>,
    /// exact | scaled_identity | auto
    #[arg(long)]
    majorizer: Option<String>,
}

impl ConfigFlags {
    fn apply(&self, spec: &mut RunSpec) -> Result<(), String> {
        let c = &mut spec.config;
        if let Some(v) = self.sigma {
            c.sigma = v;
        }
        if let Some(v) = self.tau {
            c.tau = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.max_iter {
            c.max_iter = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.log_every {
            c.log_every = v;
        }
        if let Some(m) = &self.majorizer {
            c.majorizer_strategy = serde_json::from_value::<MajorizerStrategy>(serde_json::Value::String(m.clone()))
                .map_err(|e| format!("--majorizer {m}: {e}"))?;
        }
        Ok(())
    }
}

#[derive(Args)]
struct RunArgs {
    /// Builder spec (`random_qsdp:n=30,m=20,rank=5,seed=1`) or a BIQ data file.
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    solver: Option<String>,
    /// Output directory for trace.csv, summary.csv and timing.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run spec; command-line flags take precedence.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigFlags,
}

#[derive(Args)]
struct CompareArgs {
    /// Instances to run (repeatable).
    #[arg(long)]
    instance: Vec<String>,
    /// Solvers to run on each instance (repeatable).
    #[arg(long, default_values_t = vec!["scb".to_string(), "direct_admm".to_string()])]
    solver: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON array of run specs, appended to the instance × solver grid.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    config: ConfigFlags,
}

fn run_command(args: RunArgs) -> Result<i32, String> {
    let mut spec = match &args.spec {
        Some(path) => {
            let mut specs = load_specs(path).map_err(|e| format!("{}: {e}", path.display()))?;
            if specs.len() != 1 {
                return Err(format!("{}: run expects exactly one spec, found {}", path.display(), specs.len()));
            }
            specs.remove(0)
        }
        None => RunSpec::new(
            args.instance.as_deref().ok_or("either --instance or --spec is required")?,
            SolverKind::Scb,
            Default::default(),
        ),
    };
    if let Some(inst) = args.instance {
        spec.instance = inst;
    }
    if let Some(s) = &args.solver {
        spec.solver = s.parse().map_err(|e| format!("{e}"))?;
    }
    if args.out.is_some() {
        spec.out = args.out;
    }
    args.config.apply(&mut spec)?;
    Ok(harness::run(&spec))
}

fn compare_command(args: CompareArgs) -> Result<i32, String> {
    let solvers: Vec<SolverKind> = args
        .solver
        .iter()
        .map(|s| s.parse().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    let mut specs = Vec::new();
    for inst in &args.instance {
        for &s in &solvers {
            specs.push(RunSpec::new(inst, s, Default::default()));
        }
    }
    if let Some(path) = &args.spec {
        specs.extend(load_specs(path).map_err(|e| format!("{}: {e}", path.display()))?);
    }
    if specs.is_empty() {
        return Err("compare needs --instance or --spec".into());
    }
    for spec in &mut specs {
        args.config.apply(spec)?;
    }
    let cmp = harness::compare(&specs, args.jobs).map_err(|e| e.to_string())?;
    if let Some(dir) = &args.out {
        cmp.write(dir).map_err(|e| e.to_string())?;
    }
    print!("{}", cmp.table_csv().map_err(|e| e.to_string())?);
    Ok(cmp.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run_command(a),
        Command::Compare(a) => compare_command(a),
    };
    let code = outcome.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        EXIT_FAILURE
    });
    ExitCode::from(code as u8)
}

//! Command-line front end. `run` is a pure argv-in, stdout-out function so
//! commands can be exercised in-process; the binary is a thin wrapper.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::analysis::{self, SweepSpec};
use crate::cds::{self, Algorithm};
use crate::crypto;
use crate::flood;
use crate::sim::{self, Scenario};
use crate::udg::{self, DeploymentSpec, Graph, Placement};

/// Validation problems exit 2, runtime failures exit 1.
#[derive(Debug, PartialEq)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bubble", version, about = "Bubble backbone experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a density sweep and print the CSV to stdout.
    Sweep(SweepArgs),
    /// Run a scripted scenario file and print its trace and metrics.
    Scenario(ScenarioArgs),
    /// Generate a key matrix and write one column file per member.
    Keygen(KeygenArgs),
    /// Generate a unit disk graph and write it in text form.
    Graph(GraphArgs),
    /// Elect a backbone on a stored graph and report flooding costs.
    Flood(FloodArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Deployment dimension: 1 or 2.
    #[arg(long, default_value_t = 1)]
    dim: u8,
    /// Region length in radio ranges.
    #[arg(long, default_value_t = 10.0)]
    ell: f64,
    /// Comma-separated node densities.
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated algorithms: wu-li-1999, mpr-cds, optimal.
    #[arg(long, value_delimiter = ',', default_value = "wu-li-1999,mpr-cds")]
    algos: Vec<String>,
    /// Simulate floods with the check valve on.
    #[arg(long)]
    valve: bool,
    /// Largest n the exact solver will accept.
    #[arg(long, default_value_t = 20)]
    cap: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for trials (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario script path.
    file: PathBuf,
    /// Print only the metrics summary, not the trace.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct KeygenArgs {
    /// Group size.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct GraphArgs {
    #[arg(long, default_value_t = 1)]
    dim: u8,
    #[arg(long)]
    ell: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Draw n from a Poisson law instead of fixing it.
    #[arg(long)]
    poisson: bool,
    /// Resample until the graph is connected.
    #[arg(long)]
    connected: bool,
    /// Output path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FloodArgs {
    /// Stored graph path (text format).
    #[arg(long)]
    graph: PathBuf,
    /// Election algorithm: wu-li-1999, mpr-cds, or optimal.
    #[arg(long, default_value = "wu-li-1999")]
    cds_algo: String,
    #[arg(long)]
    valve: bool,
    #[arg(long, default_value_t = 20)]
    cap: usize,
}

fn parse_algo(name: &str) -> Result<Algorithm, CliError> {
    match name {
        "wu-li-1999" | "wu-li" => Ok(Algorithm::WuLi1999),
        "mpr-cds" | "mpr" => Ok(Algorithm::MprCds),
        "optimal" => Ok(Algorithm::Optimal),
        other => Err(CliError::Usage(format!("unknown algorithm `{other}`"))),
    }
}

/// Seed resolution: flag, then `BB_SEED`, then 0.
fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("BB_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

pub fn run(argv: &[String]) -> Result<String, CliError> {
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Sweep(a) => run_sweep(a),
        Command::Scenario(a) => run_scenario(a),
        Command::Keygen(a) => run_keygen(a),
        Command::Graph(a) => run_graph(a),
        Command::Flood(a) => run_flood(a),
    }
}

fn run_sweep(a: SweepArgs) -> Result<String, CliError> {
    if a.dim != 1 && a.dim != 2 {
        return Err(CliError::Usage(format!("dimension must be 1 or 2, got {}", a.dim)));
    }
    let algorithms = a
        .algos
        .iter()
        .map(|s| parse_algo(s))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec {
        dimension: a.dim,
        length: a.ell,
        lambdas: a.lambda,
        trials: a.trials,
        algorithms,
        check_valve: a.valve,
        solver_cap: a.cap,
        seed_base: resolve_seed(a.seed),
    };
    let rows = match a.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            pool.install(|| analysis::sweep(&spec))
        }
        None => analysis::sweep(&spec),
    }
    .map_err(|e| match e {
        analysis::AnalysisError::NoTrials
        | analysis::AnalysisError::NoAlgorithms
        | analysis::AnalysisError::SolverCapExceeded(_, _) => CliError::Usage(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    Ok(analysis::rows_to_csv(&rows))
}

fn run_scenario(a: ScenarioArgs) -> Result<String, CliError> {
    let text = fs::read_to_string(&a.file)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.file.display())))?;
    let scenario = Scenario::from_text(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    let sim = sim::run(scenario).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut out = String::new();
    if !a.quiet {
        for line in &sim.trace {
            out.push_str(line);
            out.push('\n');
        }
    }
    let m = &sim.metrics;
    writeln!(
        out,
        "metrics unicasts={} losses={} received={} deliveries={} duplicates={} arq_requests={} arq_answers={}",
        m.unicasts, m.losses, m.received, m.deliveries, m.duplicates, m.arq_requests, m.arq_answers
    )
    .unwrap();
    Ok(out)
}

fn run_keygen(a: KeygenArgs) -> Result<String, CliError> {
    let seed = resolve_seed(a.seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let matrix =
        crypto::generate_matrix(a.n, &mut rng).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", a.out_dir.display())))?;
    let mut out = String::new();
    for m in 0..a.n as u16 {
        let col = crypto::column_for(&matrix, m).map_err(|e| CliError::Runtime(e.to_string()))?;
        let path = a.out_dir.join(format!("member_{m:03}.key"));
        fs::write(&path, col.to_bytes())
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        writeln!(out, "wrote {}", path.display()).unwrap();
    }
    writeln!(out, "leader member 0, group of {}", a.n).unwrap();
    Ok(out)
}

fn run_graph(a: GraphArgs) -> Result<String, CliError> {
    if a.dim != 1 && a.dim != 2 {
        return Err(CliError::Usage(format!("dimension must be 1 or 2, got {}", a.dim)));
    }
    let mut spec = match a.dim {
        1 => DeploymentSpec::new_1d(a.ell, a.lambda, resolve_seed(a.seed)),
        _ => DeploymentSpec::new_2d(a.ell, a.lambda, resolve_seed(a.seed)),
    };
    if a.poisson {
        spec.placement = Placement::Poisson;
    }
    let g = if a.connected {
        udg::generate_connected(&spec, 1000)
            .map(|(g, _)| g)
            .map_err(|e| CliError::Runtime(e.to_string()))?
    } else {
        udg::generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?
    };
    let text = g.to_text();
    if a.out.as_os_str() == "-" {
        Ok(text)
    } else {
        fs::write(&a.out, &text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", a.out.display())))?;
        Ok(format!("wrote {} ({} nodes, {} edges)\n", a.out.display(), g.node_count(), g.edge_count()))
    }
}

fn run_flood(a: FloodArgs) -> Result<String, CliError> {
    let algorithm = parse_algo(&a.cds_algo)?;
    let text = fs::read_to_string(&a.graph)
        .map_err(|e| CliError::Usage(format!("{}: {e}", a.graph.display())))?;
    let g = Graph::from_text(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    let result = match algorithm {
        Algorithm::Optimal => cds::optimal_cds(&g, a.cap),
        Algorithm::WuLi1999 => cds::wu_li_1999(&g, &cds::views_from_graph(&g)),
        Algorithm::MprCds => cds::mpr_cds_from_views(&g, &cds::views_from_graph(&g)),
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    let formula = flood::flooding_cost_formula(&g, &result.members)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let measured = flood::average_flood_cost(&g, &result.members, a.valve)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut out = String::new();
    writeln!(out, "cds {}", result.to_line()).unwrap();
    writeln!(out, "flood_formula {}/{}", formula.numer(), formula.denom()).unwrap();
    writeln!(
        out,
        "flood_measured {}/{} valve={}",
        measured.numer(),
        measured.denom(),
        a.valve
    )
    .unwrap();
    Ok(out)
}

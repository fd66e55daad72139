//! Thin command-line front end. All logic lives in the library; this binary
//! parses flags, wires files to the library calls, and maps errors to exit
//! codes (0 success, 1 domain error, 2 usage error).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sis_source::error::{Error, Result};
use sis_source::estimators::{distance_centrality, exhaustive_oracle_estimate, jordan_centers};
use sis_source::experiments::{
    render_summary_csv, run_experiment, write_summary_csv, write_trials_csv, ExperimentConfig,
};
use sis_source::graph::{parse_edge_list, parse_infected_set, regular_tree, Graph, NodeId};
use sis_source::seeding::stream_rng;
use sis_source::sis::{simulate, SisParams};
use sis_source::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "sis-source", version, about = "SIS epidemic source inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the SIS process and print the final snapshot
    Simulate(SimulateArgs),
    /// Estimate the infection source from a snapshot
    Estimate(EstimateArgs),
    /// Run randomized property suites over the inference machinery
    Verify(VerifyArgs),
    /// Monte-Carlo comparison of estimators on regular trees
    Experiment(ExperimentArgs),
}

fn parse_open_unit(s: &str) -> std::result::Result<f64, String> {
    let q: f64 = s
        .parse()
        .map_err(|e| format!("not a number: {e}"))?;
    if q > 0.0 && q < 1.0 {
        Ok(q)
    } else {
        Err("infection probability must lie in the open interval (0, 1)".to_string())
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Build a regular tree of this degree (depth t+1, source at the root)
    #[arg(long, conflicts_with = "graph")]
    degree: Option<usize>,
    /// Edge-list file ("n m" header then "u v" lines)
    #[arg(long, required_unless_present = "degree")]
    graph: Option<PathBuf>,
    /// Source node (defaults to the tree root / node 0)
    #[arg(long)]
    source: Option<NodeId>,
    /// Per-slot infection probability, in (0, 1)
    #[arg(long, value_parser = parse_open_unit)]
    q: f64,
    /// Number of time slots
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also print the full path, one "t: id id ..." line per slot
    #[arg(long)]
    dump_path: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// File with one line of space-separated infected node ids
    #[arg(long)]
    infected: PathBuf,
    /// oip (Jordan infection center), dc (distance centrality), or oracle
    #[arg(long, value_parser = ["oip", "dc", "oracle"])]
    method: String,
    /// Infection probability for the oracle method
    #[arg(long, value_parser = parse_open_unit, default_value_t = 0.5)]
    q: f64,
    /// Oracle: extra slots beyond the minimum feasible elapsed time
    #[arg(long, default_value_t = 3)]
    t_extra: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// lemma1|lemma2|lemma3|prop1|theorem1|all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Randomized cases per suite
    #[arg(long, default_value_t = 100)]
    cases: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// key=value config file (degrees, trials, seed, t_min, t_max)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated tree degrees
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_min: Option<usize>,
    #[arg(long)]
    t_max: Option<usize>,
    /// Directory for trials.csv and summary.csv
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn load_graph(path: &PathBuf) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_edge_list(&text)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (graph, default_source) = match args.degree {
        Some(d) => regular_tree(d, args.t + 1)?,
        None => (load_graph(args.graph.as_ref().unwrap())?, 0),
    };
    let source = args.source.unwrap_or(default_source);
    if source >= graph.node_count() {
        return Err(Error::NodeOutOfRange {
            node: source,
            node_count: graph.node_count(),
        });
    }
    let p = SisParams::new(args.q)?;
    let mut rng = stream_rng(&[args.seed]);
    let path = simulate(&graph, source, &p, args.t, &mut rng);
    let snapshot: Vec<String> = path.snapshot().infected().iter().map(|v| v.to_string()).collect();
    println!("{}", snapshot.join(" "));
    if args.dump_path {
        print!("{}", path.dump());
    }
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let text = fs::read_to_string(&args.infected)
        .map_err(|e| Error::io(args.infected.display().to_string(), e))?;
    let vi = parse_infected_set(&text, graph.node_count())?;
    let estimate = match args.method.as_str() {
        "oip" => {
            if !graph.is_tree() {
                eprintln!(
                    "warning: graph is not a tree; Jordan-center optimality is only \
                     established on trees, falling back to per-node eccentricity scan"
                );
            }
            jordan_centers(&graph, &vi)?
        }
        "dc" => distance_centrality(&graph, &vi)?,
        "oracle" => {
            let p = SisParams::new(args.q)?;
            exhaustive_oracle_estimate(&graph, &vi, &p, args.t_extra)?
        }
        _ => unreachable!("clap restricts the method values"),
    };
    println!("{estimate}");
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_name(&args.suite).ok_or_else(|| {
            Error::parse("suite name", format!("unknown suite {:?}", args.suite))
        })?]
    };
    let mut all_passed = true;
    for suite in suites {
        let outcome = run_suite(suite, args.cases, args.seed);
        if outcome.passed() {
            println!(
                "{}: pass ({} cases, {} checks)",
                suite.name(),
                outcome.cases,
                outcome.checks
            );
        } else {
            all_passed = false;
            println!(
                "{}: FAIL ({} cases, {} checks, {} failures)",
                suite.name(),
                outcome.cases,
                outcome.checks,
                outcome.failures.len()
            );
            for f in outcome.failures.iter().take(5) {
                eprintln!("counterexample: {f}");
            }
            eprintln!("reproduce with: verify --suite {} --seed {}", suite.name(), args.seed);
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(Error::parse("verify", "one or more suites failed"))
    }
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
            ExperimentConfig::from_key_values(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(d) = &args.degrees {
        cfg.degrees = d.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials_per_degree = t;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = args.t_min {
        cfg.t_min = t;
    }
    if let Some(t) = args.t_max {
        cfg.t_max = t;
    }
    cfg.validate()?;

    let (records, summary) = run_experiment(&cfg)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::io(args.out_dir.display().to_string(), e))?;
    write_trials_csv(&records, &args.out_dir.join("trials.csv"))?;
    write_summary_csv(&summary, &args.out_dir.join("summary.csv"))?;

    // human-readable table on stdout (summary.csv has the same numbers)
    println!("degree  method  strict_rate  set_rate  mean_err");
    for line in render_summary_csv(&summary).lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        println!(
            "{:<7} {:<7} {:<12} {:<9} {}",
            cols[0], cols[1], cols[2], cols[3], cols[4]
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! `tilekit`: exact fractional clique tilings of balanced multipartite
//! graphs from the command line. Graphs, tilings, and certificates move as
//! JSON; experiment rows move as CSV; rationals are always `p/q` strings.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use tilekit::formats::{
    parse_rational, read_graph, read_json, to_json_string, CertificateFile, GraphFile, TilingFile,
};
use tilekit::scenarios::{run_experiment, ExperimentConfig};
use tilekit_core::cliques::DEFAULT_CLIQUE_CAP;
use tilekit_core::fractional::{fractional_tiling_number_with, slack_vertices};
use tilekit_core::graph::random_min_degree_graph;
use tilekit_core::lp::SolverConfig;
use tilekit_core::pipeline::{reach, ColumnStructure};
use tilekit_core::regularity::{kr_certificate, random_slicing_experiment, BipartitePair};
use tilekit_core::tiling::{perfect_clique_tiling_with, perfect_multipartite_tiling_with, SearchConfig, TilingError};

type CliError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(
    name = "tilekit",
    version,
    about = "Exact fractional clique tilings of balanced multipartite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment scenarios described by a JSON config.
    #[command(long_about = "\
Run the experiment scenarios described by a JSON config.

The config holds {\"scenario\": name-or-list, \"k\", \"n\", \"Lprime\", \"h\",
\"gamma\": \"p/q\", \"seeds\": [..], \"caps\": {cliques, nodes, vertices,
trials}, \"out\": dir}. Each scenario writes <out>/<scenario>.csv and a JSON
summary next to it; reruns with the same config are byte-identical. An empty
scenario list writes nothing and exits successfully.

CSV columns per scenario:
  tau-sweep      seed, delta, tau_num, tau_den, tiled
  gap-witness    n, delta_hat, tau_num, tau_den, tiled
  slicing        trial, failures, good_pair_min
  pipeline-demo  seed, part, column, nu, removed, topped")]
    Run {
        /// Path to the experiment config JSON.
        config: PathBuf,
    },
    /// Generate a random graph with all bipartite minimum degrees >= delta.
    #[command(long_about = "\
Generate a random graph with all bipartite minimum degrees >= delta.

Starts from the complete balanced k-partite graph and deletes random cross
edges while every bipartite degree stays at or above delta; deterministic per
seed. Writes graph JSON to --out, or stdout.")]
    Gen {
        /// Number of parts.
        #[arg(long)]
        k: usize,
        /// Vertices per part.
        #[arg(long)]
        n: usize,
        /// Minimum bipartite degree to preserve.
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on edge deletions; unlimited when omitted.
        #[arg(long)]
        budget: Option<usize>,
        /// Output path for the graph JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact fractional tiling number and slack vertices of a graph.
    #[command(long_about = "\
Exact fractional tiling number and slack vertices of a graph.

Solves the primal and dual tiling programs over exact rationals and prints
\"tau = p/q\" followed by the vertices left with coverage below 1 at the
optimum, as (part,index) pairs.")]
    Tau {
        /// Path to the graph JSON.
        graph: PathBuf,
        /// Cap on enumerated transversal cliques.
        #[arg(long, default_value_t = DEFAULT_CLIQUE_CAP)]
        max_cliques: usize,
    },
    /// Search for a perfect tiling by complete k-partite tiles.
    #[command(long_about = "\
Search for a perfect tiling by complete k-partite tiles with h vertices per
part (h = 1 means transversal cliques).

Prints tiling JSON on success, {\"result\": \"none\"} when the exhausted
search certifies none exists (exit 0), and {\"result\": \"capacity\"} when a
size or node limit stopped the search first (exit 1).")]
    Tile {
        /// Path to the graph JSON.
        graph: PathBuf,
        /// Vertices per part in each tile.
        #[arg(long, default_value_t = 1)]
        h: usize,
        /// Cap on vertices for the exhaustive search.
        #[arg(long)]
        max_vertices: Option<usize>,
        /// Cap on search nodes.
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Output path for the tiling JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Swap cliques moving one part between the receptacle column and another.
    #[command(long_about = "\
Swap cliques moving one part between the receptacle column and another.

Reads a reduced graph, finds a perfect transversal tiling to serve as the
column structure, and emits two cliques T1/T2 that differ exactly in the
part's column-1 and column-j clusters. Output JSON holds t1, t2 as
[part, cluster] lists plus the column assignment.")]
    Reach {
        /// Path to the reduced graph JSON.
        reduced: PathBuf,
        /// Part whose cluster is swapped.
        #[arg(long)]
        part: usize,
        /// Target column (2..=columns).
        #[arg(long)]
        column: usize,
    },
    /// Monte Carlo check of regularity inheritance under random slicing.
    #[command(long_about = "\
Monte Carlo check of regularity inheritance under random slicing.

Samples density-d bipartite graphs on L+L vertices, slices both sides into
random blocks of Lprime, and checks every block pair for a good-pair
certificate, enough ambient good pairs, and density at least d(X,Y)-eps.

CSV columns: trial, failures, good_pair_min. The CSV goes to --out when
given (JSON summary to stdout), otherwise to stdout (summary to stderr).")]
    SliceExperiment {
        /// Side size of the sampled bipartite graphs.
        #[arg(long)]
        l: usize,
        /// Block size; must divide l.
        #[arg(long)]
        lprime: usize,
        /// Edge density as p/q.
        #[arg(long, default_value = "1/2")]
        density: String,
        /// Regularity parameter as p/q.
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path for the CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Good-pair regularity certification of one part pair.
    #[command(long_about = "\
Good-pair regularity certification of one part pair.

Counts ordered vertex pairs on side A with near-average degree and codegree
into side B; past the threshold the pair is certified (16 eps)^(1/5)-regular.
Prints certificate JSON, or {\"result\": \"inconclusive\"} when the count
falls short (which is not a disproof).")]
    Certify {
        /// Path to the graph JSON.
        graph: PathBuf,
        /// Part used as side A.
        #[arg(long, default_value_t = 1)]
        side_a: usize,
        /// Part used as side B.
        #[arg(long, default_value_t = 2)]
        side_b: usize,
        /// Regularity parameter as p/q.
        #[arg(long)]
        eps: String,
        /// Output path for the certificate JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}

/// Writes pretty JSON to the path, or stdout when no path is given.
fn emit_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let text = to_json_string(value)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Run { config } => {
            let config: ExperimentConfig = read_json(&config)?;
            let report = run_experiment(&config)?;
            for s in &report.scenarios {
                let tag = if s.partial { " (partial)" } else { "" };
                println!("scenario {}: {} rows -> {}{}", s.scenario, s.rows, s.csv, tag);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            k,
            n,
            delta,
            seed,
            budget,
            out,
        } => {
            let g = random_min_degree_graph(k, n, delta, seed, budget)
                .map_err(|e| e.to_string())?;
            emit_json(out.as_deref(), &GraphFile::from_graph(&g))?;
            if let Some(p) = out {
                eprintln!(
                    "wrote {} (k={}, n={}, {} edges, min bipartite degree {})",
                    p.display(),
                    g.k(),
                    g.n(),
                    g.edge_count(),
                    g.delta_hat()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tau { graph, max_cliques } => {
            let g = read_graph(&graph)?;
            let tn = fractional_tiling_number_with(&g, max_cliques, &SolverConfig::default())
                .map_err(|e| e.to_string())?;
            println!("tau = {}", tn.tau);
            let slack = slack_vertices(&g, &tn.cliques, &tn.primal);
            if slack.is_empty() {
                println!("slack: none");
            } else {
                let list: Vec<String> = slack.iter().map(|v| v.to_string()).collect();
                println!("slack: {}", list.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tile {
            graph,
            h,
            max_vertices,
            max_nodes,
            out,
        } => {
            let g = read_graph(&graph)?;
            let mut cfg = SearchConfig::default();
            if let Some(v) = max_vertices {
                cfg.max_vertices = v;
            }
            if let Some(nodes) = max_nodes {
                cfg.node_budget = nodes;
            }
            match perfect_multipartite_tiling_with(&g, h, &cfg) {
                Ok(Some(t)) => {
                    emit_json(out.as_deref(), &TilingFile::from_tiling(&t))?;
                    Ok(ExitCode::SUCCESS)
                }
                Ok(None) => {
                    emit_json(out.as_deref(), &json!({"result": "none"}))?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(TilingError::TooLarge { .. }) | Err(TilingError::BudgetExhausted) => {
                    emit_json(out.as_deref(), &json!({"result": "capacity"}))?;
                    Ok(ExitCode::FAILURE)
                }
                Err(e) => Err(e.to_string().into()),
            }
        }
        Command::Reach {
            reduced,
            part,
            column,
        } => {
            let g = read_graph(&reduced)?;
            let tiling = perfect_clique_tiling_with(&g, &SearchConfig::default())
                .map_err(|e| e.to_string())?
                .ok_or("reduced graph has no perfect transversal tiling")?;
            let (k, ell) = (g.k(), g.n());
            let cs = ColumnStructure::from_tiling(g, &tiling).map_err(|e| e.to_string())?;
            let (t1, t2) = reach(&cs, part, column).map_err(|e| e.to_string())?;
            let pairs = |t: &[tilekit_core::VertexRef]| -> Vec<[usize; 2]> {
                t.iter().map(|v| [v.part, v.index]).collect()
            };
            let columns: Vec<Vec<usize>> = (1..=ell)
                .map(|j| (1..=k).map(|i| cs.cluster_in_column(i, j)).collect())
                .collect();
            emit_json(
                None,
                &json!({
                    "part": part,
                    "column": column,
                    "t1": pairs(&t1),
                    "t2": pairs(&t2),
                    "columns": columns,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SliceExperiment {
            l,
            lprime,
            density,
            eps,
            trials,
            seed,
            out,
        } => {
            let d = parse_rational(&density)?;
            let eps = parse_rational(&eps)?;
            let report = random_slicing_experiment(l, lprime, &d, &eps, trials, seed)
                .map_err(|e| e.to_string())?;
            let mut w: csv::Writer<Box<dyn std::io::Write>> = match &out {
                Some(p) => csv::Writer::from_writer(Box::new(std::fs::File::create(p)?)),
                None => csv::Writer::from_writer(Box::new(std::io::stdout())),
            };
            w.write_record(["trial", "failures", "good_pair_min"])?;
            for row in &report.rows {
                w.write_record([
                    row.trial.to_string(),
                    row.failures.to_string(),
                    row.good_pair_min.to_string(),
                ])?;
            }
            w.flush()?;
            drop(w);
            let summary = json!({
                "l": l,
                "lprime": lprime,
                "d": d.to_pq_string(),
                "eps": eps.to_pq_string(),
                "trials": report.trials,
                "failed_trials": report.failed_trials,
                "failure_rate": report.failure_rate().to_pq_string(),
                "good_pair_threshold": report.good_pair_threshold.to_pq_string(),
                "single_exponent": report.bound.single_exponent.to_pq_string(),
                "aggregate_exponent": report.bound.aggregate_exponent.to_pq_string(),
                "aggregate_bound": report.bound.aggregate,
                "in_bound_regime": report.in_bound_regime,
            });
            if out.is_some() {
                print!("{}", to_json_string(&summary)?);
            } else {
                eprintln!("{}", serde_json::to_string(&summary)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify {
            graph,
            side_a,
            side_b,
            eps,
            out,
        } => {
            let g = read_graph(&graph)?;
            let eps = parse_rational(&eps)?;
            let pair = BipartitePair::of_parts(&g, side_a, side_b).map_err(|e| e.to_string())?;
            match kr_certificate(&pair, &eps).map_err(|e| e.to_string())? {
                Some(cert) => {
                    emit_json(out.as_deref(), &CertificateFile::from_certificate(&cert))?
                }
                None => emit_json(out.as_deref(), &json!({"result": "inconclusive"}))?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

//! Scripted experiments driven by a JSON config: each scenario writes a CSV
//! of rows plus a JSON summary into the output directory. Everything is
//! deterministic per seed, so reruns of the same config produce
//! byte-identical reports.
//!
//! Scenarios:
//! - `tau-sweep`: fractional tiling number against the minimum-degree target
//!   on random instances; columns seed, delta, tau_num, tau_den, tiled.
//! - `gap-witness`: the blown-up gap construction at n = k and n = 2k;
//!   columns n, delta_hat, tau_num, tau_den, tiled.
//! - `slicing`: the random-slicing Monte Carlo; columns trial, failures,
//!   good_pair_min.
//! - `pipeline-demo`: complete reduced graph through the LP, blow-up tiling,
//!   reachability, and column balancing; columns seed, part, column, nu,
//!   removed, topped.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use tilekit_core::cliques::DEFAULT_CLIQUE_CAP;
use tilekit_core::fractional::{common_denominator, fractional_tiling_number_with};
use tilekit_core::graph::{catlin_graph, random_min_degree_graph};
use tilekit_core::lp::SolverConfig;
use tilekit_core::pipeline::{
    balance_columns, build_auxiliary_graph, reach, ClusterCounts, ClusterLedger, ColumnStructure,
    LedgerParams,
};
use tilekit_core::regularity::random_slicing_experiment;
use tilekit_core::tiling::{perfect_clique_tiling_with, tiling_from_fractional, SearchConfig};
use tilekit_core::{KPartiteGraph, Rational};

use crate::formats::{parse_rational, to_json_string, FormatError};

/// Experiment description, usually read from a JSON file. `scenario` is a
/// single name or a list run in order; the remaining fields are consumed by
/// whichever scenarios need them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenarios,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, rename = "Lprime", skip_serializing_if = "Option::is_none")]
    pub l_prime: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    /// Rational as "p/q". The slicing scenario reads it as its epsilon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Caps>,
    /// Output directory for the CSV and JSON reports; defaults to ".".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scenarios {
    One(String),
    Many(Vec<String>),
}

impl Scenarios {
    pub fn names(&self) -> Vec<String> {
        match self {
            Scenarios::One(s) => vec![s.clone()],
            Scenarios::Many(v) => v.clone(),
        }
    }
}

/// Capacity limits: `cliques` caps transversal clique enumeration, `nodes`
/// the exhaustive search budget, `vertices` the search's instance-size cap,
/// `trials` the slicing trial count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cliques: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Debug)]
pub enum ScenarioError {
    UnknownScenario(String),
    MissingField {
        scenario: &'static str,
        field: &'static str,
    },
    BadField {
        field: &'static str,
        why: String,
    },
    /// A capacity limit stopped a scenario mid-run. The rows finished so far
    /// were written and the summary flagged partial before this surfaced.
    Capacity {
        scenario: &'static str,
        detail: String,
    },
    /// A scenario failed before producing any rows.
    Core {
        scenario: &'static str,
        detail: String,
    },
    Format(FormatError),
    Csv(csv::Error),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::UnknownScenario(s) => write!(f, "unknown scenario {:?}", s),
            ScenarioError::MissingField { scenario, field } => {
                write!(f, "scenario {} needs config field {:?}", scenario, field)
            }
            ScenarioError::BadField { field, why } => {
                write!(f, "bad config field {:?}: {}", field, why)
            }
            ScenarioError::Capacity { scenario, detail } => {
                write!(f, "scenario {} hit a capacity limit: {}", scenario, detail)
            }
            ScenarioError::Core { scenario, detail } => {
                write!(f, "scenario {} failed: {}", scenario, detail)
            }
            ScenarioError::Format(e) => write!(f, "{}", e),
            ScenarioError::Csv(e) => write!(f, "csv error: {}", e),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<FormatError> for ScenarioError {
    fn from(e: FormatError) -> Self {
        ScenarioError::Format(e)
    }
}

impl From<csv::Error> for ScenarioError {
    fn from(e: csv::Error) -> Self {
        ScenarioError::Csv(e)
    }
}

/// Per-scenario outcome; also written as `<out>/<scenario>.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub rows: usize,
    /// True when a capacity limit cut the run short; the CSV then holds only
    /// the rows finished before the limit.
    pub partial: bool,
    pub csv: String,
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub scenarios: Vec<ScenarioSummary>,
}

/// Runs every named scenario in order. An empty scenario list yields an
/// empty report. The first failing scenario aborts the run; its partial
/// rows, if any, are already on disk by then.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ScenarioError> {
    let out_dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).map_err(|e| ScenarioError::Format(FormatError::Io(e)))?;
    let mut scenarios = Vec::new();
    for name in config.scenario.names() {
        let summary = match name.as_str() {
            "tau-sweep" => run_tau_sweep(config, &out_dir)?,
            "gap-witness" => run_gap_witness(config, &out_dir)?,
            "slicing" => run_slicing(config, &out_dir)?,
            "pipeline-demo" => run_pipeline_demo(config, &out_dir)?,
            other => return Err(ScenarioError::UnknownScenario(other.to_string())),
        };
        scenarios.push(summary);
    }
    Ok(ExperimentReport { scenarios })
}

fn need<T: Copy>(
    value: Option<T>,
    scenario: &'static str,
    field: &'static str,
) -> Result<T, ScenarioError> {
    value.ok_or(ScenarioError::MissingField { scenario, field })
}

fn need_seeds(config: &ExperimentConfig, scenario: &'static str) -> Result<Vec<u64>, ScenarioError> {
    match &config.seeds {
        Some(s) if !s.is_empty() => Ok(s.clone()),
        _ => Err(ScenarioError::MissingField {
            scenario,
            field: "seeds",
        }),
    }
}

fn clique_cap(config: &ExperimentConfig, fallback: usize) -> usize {
    config
        .caps
        .as_ref()
        .and_then(|c| c.cliques)
        .unwrap_or(fallback)
}

fn search_config(config: &ExperimentConfig) -> SearchConfig {
    let mut cfg = SearchConfig::default();
    if let Some(nodes) = config.caps.as_ref().and_then(|c| c.nodes) {
        cfg.node_budget = nodes;
    }
    if let Some(vertices) = config.caps.as_ref().and_then(|c| c.vertices) {
        cfg.max_vertices = vertices;
    }
    cfg
}

/// Writes `<out>/<name>.csv` and `<out>/<name>.json`, returning the summary.
fn flush(
    out_dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
    partial: bool,
    details: serde_json::Value,
) -> Result<ScenarioSummary, ScenarioError> {
    let csv_path = out_dir.join(format!("{}.csv", name));
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| ScenarioError::Format(FormatError::Io(e)))?;
    let summary = ScenarioSummary {
        scenario: name.to_string(),
        rows: rows.len(),
        partial,
        csv: csv_path.display().to_string(),
        details,
    };
    fs::write(out_dir.join(format!("{}.json", name)), to_json_string(&summary)?)
        .map_err(|e| ScenarioError::Format(FormatError::Io(e)))?;
    Ok(summary)
}

fn pq(r: &Rational) -> String {
    r.to_pq_string()
}

/// Per (seed, delta) instance: a random graph holding every bipartite degree
/// at or above delta, its exact tiling number, and whether a perfect tiling
/// exists. Delta sweeps from one below the ceil((k-1)n/k) threshold to n.
fn run_tau_sweep(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ScenarioSummary, ScenarioError> {
    const NAME: &str = "tau-sweep";
    const HEADER: &[&str] = &["seed", "delta", "tau_num", "tau_den", "tiled"];
    let k = need(config.k, NAME, "k")?;
    let n = need(config.n, NAME, "n")?;
    if k < 2 || n == 0 {
        return Err(ScenarioError::BadField {
            field: "k",
            why: "need k >= 2 and n >= 1".to_string(),
        });
    }
    let seeds = need_seeds(config, NAME)?;
    let threshold = ((k - 1) * n).div_ceil(k);
    let delta_lo = threshold.saturating_sub(1);
    let cap = clique_cap(config, DEFAULT_CLIQUE_CAP);
    let search = search_config(config);
    let solver = SolverConfig::default();
    let mut rows = Vec::new();
    let mut above_ok = true;
    for &seed in &seeds {
        for delta in delta_lo..=n {
            let step = || -> Result<(Rational, bool), String> {
                let g = random_min_degree_graph(k, n, delta, seed, None)
                    .map_err(|e| e.to_string())?;
                let tn =
                    fractional_tiling_number_with(&g, cap, &solver).map_err(|e| e.to_string())?;
                let tiled = perfect_clique_tiling_with(&g, &search)
                    .map_err(|e| e.to_string())?
                    .is_some();
                Ok((tn.tau, tiled))
            };
            match step() {
                Ok((tau, tiled)) => {
                    if delta >= threshold && tau != Rational::from(n) {
                        above_ok = false;
                    }
                    rows.push(vec![
                        seed.to_string(),
                        delta.to_string(),
                        tau.numer_big().to_string(),
                        tau.denom_big().to_string(),
                        tiled.to_string(),
                    ]);
                }
                Err(detail) => {
                    let details = json!({
                        "k": k, "n": n, "threshold": threshold,
                        "error": detail,
                    });
                    flush(out_dir, NAME, HEADER, &rows, true, details)?;
                    return Err(ScenarioError::Capacity {
                        scenario: NAME,
                        detail,
                    });
                }
            }
        }
    }
    let details = json!({
        "k": k, "n": n,
        "delta_lo": delta_lo, "delta_hi": n,
        "threshold": threshold,
        "seeds": seeds.len(),
        "tau_equals_n_above_threshold": above_ok,
    });
    flush(out_dir, NAME, HEADER, &rows, false, details)
}

/// The integrality gap witness: at n = k the construction reaches the full
/// fractional tiling number with no perfect tiling; at n = 2k it tiles.
fn run_gap_witness(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ScenarioSummary, ScenarioError> {
    const NAME: &str = "gap-witness";
    const HEADER: &[&str] = &["n", "delta_hat", "tau_num", "tau_den", "tiled"];
    let k = config.k.unwrap_or(3);
    if k < 3 {
        return Err(ScenarioError::BadField {
            field: "k",
            why: "the gap construction needs k >= 3".to_string(),
        });
    }
    let cap = clique_cap(config, DEFAULT_CLIQUE_CAP);
    let search = search_config(config);
    let solver = SolverConfig::default();
    let mut rows = Vec::new();
    let mut matches_expected = true;
    for n in [k, 2 * k] {
        let step = || -> Result<(usize, Rational, bool), String> {
            let g = catlin_graph(k, n).map_err(|e| e.to_string())?;
            let delta = g.delta_hat();
            let tn = fractional_tiling_number_with(&g, cap, &solver).map_err(|e| e.to_string())?;
            let tiled = perfect_clique_tiling_with(&g, &search)
                .map_err(|e| e.to_string())?
                .is_some();
            Ok((delta, tn.tau, tiled))
        };
        match step() {
            Ok((delta, tau, tiled)) => {
                // full fractional optimum both times; a tiling only at 2k
                if tau != Rational::from(n) || tiled != (n == 2 * k) {
                    matches_expected = false;
                }
                rows.push(vec![
                    n.to_string(),
                    delta.to_string(),
                    tau.numer_big().to_string(),
                    tau.denom_big().to_string(),
                    tiled.to_string(),
                ]);
            }
            Err(detail) => {
                let details = json!({"k": k, "error": detail});
                flush(out_dir, NAME, HEADER, &rows, true, details)?;
                return Err(ScenarioError::Capacity {
                    scenario: NAME,
                    detail,
                });
            }
        }
    }
    let details = json!({
        "k": k,
        "expected": "tau = n at both sizes; perfect tiling only at n = 2k",
        "matches_expected": matches_expected,
    });
    flush(out_dir, NAME, HEADER, &rows, false, details)
}

/// Monte Carlo slicing run on a density-1/2 random bipartite graph with
/// sides L = h * Lprime, blocks of Lprime, and epsilon taken from `gamma`.
fn run_slicing(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ScenarioSummary, ScenarioError> {
    const NAME: &str = "slicing";
    const HEADER: &[&str] = &["trial", "failures", "good_pair_min"];
    let l_prime = need(config.l_prime, NAME, "Lprime")?;
    let h = need(config.h, NAME, "h")?;
    if h == 0 {
        return Err(ScenarioError::BadField {
            field: "h",
            why: "need h >= 1".to_string(),
        });
    }
    let l = h * l_prime;
    let gamma = config.gamma.as_deref().ok_or(ScenarioError::MissingField {
        scenario: NAME,
        field: "gamma",
    })?;
    let eps = parse_rational(gamma)?;
    let trials = config.caps.as_ref().and_then(|c| c.trials).unwrap_or(100);
    let seed = config.seeds.as_ref().and_then(|s| s.first().copied()).unwrap_or(0);
    let d = Rational::new(1, 2);
    let report = random_slicing_experiment(l, l_prime, &d, &eps, trials, seed).map_err(|e| {
        ScenarioError::Core {
            scenario: NAME,
            detail: e.to_string(),
        }
    })?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.trial.to_string(),
                r.failures.to_string(),
                r.good_pair_min.to_string(),
            ]
        })
        .collect();
    let details = json!({
        "l": l, "l_prime": l_prime,
        "d": pq(&d), "eps": pq(&eps),
        "trials": report.trials,
        "failed_trials": report.failed_trials,
        "failure_rate": pq(&report.failure_rate()),
        "good_pair_threshold": pq(&report.good_pair_threshold),
        "single_exponent": pq(&report.bound.single_exponent),
        "aggregate_exponent": pq(&report.bound.aggregate_exponent),
        "aggregate_bound": report.bound.aggregate,
        "in_bound_regime": report.in_bound_regime,
    });
    flush(out_dir, NAME, HEADER, &rows, false, details)
}

/// Fixed cluster size of the demo ledger.
const DEMO_L_PRIME: usize = 400;
/// Default clique cap for the demo's auxiliary tiling LP.
const DEMO_CLIQUE_CAP: usize = 50_000;

/// Running aggregates across demo seeds.
#[derive(Default)]
struct DemoStats {
    reach_checked: usize,
    tau: Option<Rational>,
    blow_tiles: usize,
    blow_denominator: usize,
    max_leftover: usize,
}

struct DemoInstance<'a> {
    reduced: &'a KPartiteGraph,
    params: &'a LedgerParams,
    nu_lo: usize,
    nu_hi: usize,
    cap: usize,
    search: &'a SearchConfig,
    solver: &'a SolverConfig,
}

/// One demo seed: exact LP, blow-up tiling, full reachability sweep, then
/// column balancing over a randomized ledger. Appends one row per
/// non-receptacle cluster.
fn demo_seed(
    demo: &DemoInstance<'_>,
    seed: u64,
    rows: &mut Vec<Vec<String>>,
    stats: &mut DemoStats,
) -> Result<(), String> {
    let (k, ell) = (demo.reduced.k(), demo.reduced.n());
    let tn = fractional_tiling_number_with(demo.reduced, demo.cap, demo.solver)
        .map_err(|e| e.to_string())?;
    let d0 = usize::try_from(common_denominator(&tn.primal))
        .map_err(|_| "blow-up denominator too large".to_string())?
        .max(1);
    let blow =
        tiling_from_fractional(demo.reduced, &tn.primal, d0).map_err(|e| e.to_string())?;
    if blow.deficiency.is_some() {
        return Err("blow-up tiling left vertices uncovered".to_string());
    }
    stats.blow_tiles = blow.tiling.tile_count();
    stats.blow_denominator = d0;
    stats.tau = Some(tn.tau);

    let tiling = perfect_clique_tiling_with(demo.reduced, demo.search)
        .map_err(|e| e.to_string())?
        .ok_or("complete reduced graph failed to tile")?;
    let cs = ColumnStructure::from_tiling(demo.reduced.clone(), &tiling)
        .map_err(|e| e.to_string())?;
    for i in 1..=k {
        for j in 2..=ell {
            reach(&cs, i, j).map_err(|e| e.to_string())?;
            stats.reach_checked += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_nu: Vec<usize> = (0..ell - 1)
        .map(|_| rng.gen_range(demo.nu_lo..=demo.nu_hi))
        .collect();
    let zero = ClusterCounts {
        total: 0,
        red: 0,
        blue: 0,
    };
    let mut counts = vec![vec![zero; ell]; k];
    for i in 1..=k {
        let mut part_nu = base_nu.clone();
        if i > 1 {
            // same multiset in every part keeps the totals equal
            part_nu.shuffle(&mut rng);
        }
        counts[i - 1][cs.cluster_in_column(i, 1) - 1].total = demo.params.l_prime;
        for j in 2..=ell {
            counts[i - 1][cs.cluster_in_column(i, j) - 1].total = part_nu[j - 2];
        }
    }
    let ledger = ClusterLedger {
        params: demo.params.clone(),
        counts,
        leftover: vec![0; k],
    };
    let aux = build_auxiliary_graph(&cs, &ledger).map_err(|e| e.to_string())?;
    // the auxiliary graph of a complete reduced graph is complete, so its
    // clique count is exactly part_size^k; refuse LPs past the cap
    let clique_count = (aux.graph.n() as u128).checked_pow(k as u32);
    if clique_count.is_none() || clique_count.unwrap() > demo.cap as u128 {
        return Err(format!(
            "auxiliary graph needs more than {} cliques; raise caps.cliques",
            demo.cap
        ));
    }
    let plan = balance_columns(&cs, &ledger).map_err(|e| e.to_string())?;
    for i in 1..=k {
        for j in 2..=ell {
            let nu = ledger.counts[i - 1][cs.cluster_in_column(i, j) - 1].non_red();
            rows.push(vec![
                seed.to_string(),
                i.to_string(),
                j.to_string(),
                nu.to_string(),
                plan.removed[i - 1][j - 2].to_string(),
                plan.topped_up[i - 1][j - 2].to_string(),
            ]);
        }
        stats.max_leftover = stats.max_leftover.max(plan.new_leftover[i - 1]);
    }
    Ok(())
}

/// End-to-end demo on a complete reduced graph with `n` columns: exact
/// tiling LP, blow-up into an integral tiling, reachability between every
/// column pair, then column balancing over a randomized ledger.
fn run_pipeline_demo(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ScenarioSummary, ScenarioError> {
    const NAME: &str = "pipeline-demo";
    const HEADER: &[&str] = &["seed", "part", "column", "nu", "removed", "topped"];
    let k = need(config.k, NAME, "k")?;
    let ell = need(config.n, NAME, "n")?;
    if k < 2 {
        return Err(ScenarioError::BadField {
            field: "k",
            why: "need k >= 2".to_string(),
        });
    }
    if ell < 2 * k {
        return Err(ScenarioError::BadField {
            field: "n",
            why: format!(
                "reachability on the complete reduced graph needs n >= 2k = {}",
                2 * k
            ),
        });
    }
    let h = config.h.unwrap_or(2);
    if h == 0 || h > 2 {
        return Err(ScenarioError::BadField {
            field: "h",
            why: "the demo ledger supports h = 1 or 2".to_string(),
        });
    }
    let gamma = match config.gamma.as_deref() {
        Some(s) => parse_rational(s)?,
        None => Rational::new(1, 2),
    };
    if !gamma.is_positive() || gamma >= Rational::one() {
        return Err(ScenarioError::BadField {
            field: "gamma",
            why: "gamma must lie in (0,1)".to_string(),
        });
    }
    let seeds = need_seeds(config, NAME)?;
    let reduced = KPartiteGraph::complete(k, ell).map_err(|e| ScenarioError::Core {
        scenario: NAME,
        detail: e.to_string(),
    })?;
    let params = LedgerParams {
        l_prime: DEMO_L_PRIME,
        h,
        d_prime: Rational::new(1, 5),
        eps_prime: Rational::new(1, 50),
        gamma,
        zeta: Rational::new(1, 50),
        d0: 1,
        n: ell * DEMO_L_PRIME,
    };
    // the sampling window sits two quanta above the base count, so every
    // cluster sheds at least one whole tile; its top stays below the
    // (1 + k^2 eps') L' ledger ceiling for every k >= 2 and h <= 2
    let base = (DEMO_L_PRIME * 19).div_ceil(20);
    let quantum = h * DEMO_L_PRIME.div_ceil(50);
    let search = search_config(config);
    let solver = SolverConfig::default();
    let demo = DemoInstance {
        reduced: &reduced,
        params: &params,
        nu_lo: base + 2 * quantum,
        nu_hi: base + 2 * quantum + 19,
        cap: clique_cap(config, DEMO_CLIQUE_CAP),
        search: &search,
        solver: &solver,
    };

    let mut rows = Vec::new();
    let mut stats = DemoStats::default();
    for &seed in &seeds {
        if let Err(detail) = demo_seed(&demo, seed, &mut rows, &mut stats) {
            let details = json!({"k": k, "n": ell, "h": h, "seed": seed, "error": detail});
            flush(out_dir, NAME, HEADER, &rows, true, details)?;
            return Err(ScenarioError::Capacity {
                scenario: NAME,
                detail,
            });
        }
    }
    let leftover_bound =
        &(&Rational::from(3 * params.h) * &params.zeta) * &Rational::from(params.n);
    let details = json!({
        "k": k, "n": ell, "h": h,
        "l_prime": DEMO_L_PRIME,
        "tau": stats.tau.as_ref().map(pq),
        "blow_up_tiles": stats.blow_tiles,
        "blow_up_denominator": stats.blow_denominator,
        "reach_pairs_checked": stats.reach_checked,
        "seeds": seeds.len(),
        "max_leftover": stats.max_leftover,
        "leftover_bound": pq(&leftover_bound),
    });
    flush(out_dir, NAME, HEADER, &rows, false, details)
}

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tacq_core::bounds::{capacity_vector, certified_lower_bound, long_leaf_lower_bound};
use tacq_core::cutoff::{
    build_tree, calibrate, check_absorbable, check_cutoff, extract_protocol, multi_root_table,
    prune_bereft, CutoffError, CutoffTree, ParamSet,
};
use tacq_core::embed::{multi_root_pipeline_on, witness_pipeline_on, PipelineReport};
use tacq_core::exact::exact_at;
use tacq_core::experiments::{run_sweep, run_tree_stats, sweep_csv, threshold_p, SweepConfig};
use tacq_core::greedy::greedy_at_with;
use tacq_core::{sample_gnp, sample_random_tree, verify_protocol, Graph, Probability, RandomSource};

#[derive(Parser)]
#[command(name = "tacq", version, about = "Total acquisition on graphs and random graphs")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample G(n, p) and write it as an edge list.
    Gnp {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        p: PArgs,
    },
    /// Tree utilities.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Compute or bound a_t of a graph file.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Certified lower bounds for a graph file.
    Bound {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Cut-off sequence tables and trees.
    #[command(subcommand)]
    Ctree(CtreeCmd),
    /// One run of the witness construction on a sampled G(n, p).
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Witness rates across multiples of log2(n)/n.
    Sweep(SweepArgs),
    /// Long-leaf statistics of uniform random trees.
    Treestats {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Uniform labelled tree on n vertices.
    Random {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    Exact {
        #[arg(long)]
        graph: PathBuf,
        /// Maximum number of search states to expand.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Also write the optimal protocol here.
        #[arg(long)]
        protocol_out: Option<PathBuf>,
    },
    Greedy {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = tacq_core::greedy::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long)]
        protocol_out: Option<PathBuf>,
    },
    /// Replay a protocol file and report the residual.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        protocol: PathBuf,
    },
}

#[derive(Subcommand)]
enum CtreeCmd {
    /// Calibrated sequence table; optionally write the tree.
    Build {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: u64,
        /// Write the tree in node-list format here.
        #[arg(long)]
        tree_out: Option<PathBuf>,
        /// Remove the bottom leaves of bereft parents before writing.
        #[arg(long)]
        pruned: bool,
    },
    /// Cut-off and absorbability checks on a tree file.
    Check {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Absorption protocol of a tree file, nodes labelled by their ids.
    Protocol {
        #[arg(long)]
        tree: PathBuf,
    },
}

#[derive(Subcommand)]
enum PipelineCmd {
    Single {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        p: PArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        protocol_out: Option<PathBuf>,
    },
    Multi {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        p: PArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Exponent constant c in (eps/2, 1).
        #[arg(long)]
        c: f64,
        #[arg(long)]
        protocol_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PArgs {
    /// Edge probability.
    #[arg(long, conflicts_with = "p_mult")]
    p: Option<f64>,
    /// Edge probability as a multiple of log2(n)/n.
    #[arg(long)]
    p_mult: Option<f64>,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Defaults to ceil(4 / eps^2).
    #[arg(long)]
    sigma: Option<u64>,
    #[arg(long, default_value_t = ParamSet::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = ParamSet::DEFAULT_BETA)]
    beta: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [4096usize, 16384, 65536])]
    n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.8, 1.0, 1.2, 1.4])]
    multipliers: Vec<f64>,
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[command(flatten)]
    params: ParamArgs,
    /// Record wall-clock time (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

type Res<T> = Result<T, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

fn cutoff_err(e: CutoffError) -> Failure {
    match e {
        CutoffError::InvalidParams(_) => usage(e),
        _ => runtime(e),
    }
}

impl ParamArgs {
    fn build(&self, n: u64) -> Res<ParamSet> {
        let sigma = self.sigma.unwrap_or_else(|| tacq_core::cutoff::default_sigma(self.eps));
        ParamSet::new(n, self.eps, sigma, self.alpha, self.beta).map_err(cutoff_err)
    }
}

impl PArgs {
    fn resolve(&self, n: usize) -> Res<Probability> {
        match (self.p, self.p_mult) {
            (Some(p), None) => Probability::new(p).map_err(usage),
            (None, Some(m)) if m > 0.0 && m.is_finite() => {
                Ok(Probability::saturating(m * threshold_p(n)))
            }
            (None, Some(m)) => Err(usage(format!("--p-mult {m} must be positive"))),
            _ => Err(usage("give one of --p or --p-mult")),
        }
    }
}

fn read_graph(path: &Path) -> Res<Graph> {
    let f = fs::File::open(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    Graph::read_edge_list(BufReader::new(f)).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn read_tree(path: &Path) -> Res<CutoffTree> {
    let f = fs::File::open(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    CutoffTree::read_text(BufReader::new(f)).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

/// A one-row table, rendered as CSV or as a JSON object.
fn record(format: Format, fields: &[(&str, serde_json::Value)]) -> String {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            format!("{}\n", serde_json::Value::Object(map))
        }
        Format::Csv => {
            let head: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = fields
                .iter()
                .map(|(_, v)| match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect();
            format!("{}\n{}\n", head.join(","), row.join(","))
        }
    }
}

fn pipeline_output(report: &PipelineReport, protocol_out: Option<&Path>) -> Res<String> {
    if let (Some(path), Some(proto)) = (protocol_out, &report.protocol) {
        write_file(path, &proto.to_text())?;
    }
    Ok(format!("{}\n", report.to_json()))
}

fn run(cli: &Cli) -> Res<String> {
    let format = cli.format;
    let mut rng = RandomSource::new(cli.seed);
    match &cli.cmd {
        Cmd::Gnp { n, p } => {
            let p = p.resolve(*n)?;
            Ok(sample_gnp(*n, p, &mut rng).to_edge_list())
        }
        Cmd::Tree(TreeCmd::Random { n }) => {
            Ok(sample_random_tree(*n, &mut rng).map_err(usage)?.to_edge_list())
        }
        Cmd::Solve(SolveCmd::Exact { graph, budget, protocol_out }) => {
            let g = read_graph(graph)?;
            let r = exact_at(&g, *budget).map_err(runtime)?;
            if let Some(path) = protocol_out {
                write_file(path, &r.witness.to_text())?;
            }
            Ok(record(
                format,
                &[
                    ("method", json!("exact")),
                    ("n", json!(g.n())),
                    ("value", json!(r.value)),
                    ("moves", json!(r.witness.len())),
                    ("expansions", json!(r.expansions)),
                ],
            ))
        }
        Cmd::Solve(SolveCmd::Greedy { graph, restarts, protocol_out }) => {
            let g = read_graph(graph)?;
            let r = greedy_at_with(&g, &mut rng, *restarts);
            if let Some(path) = protocol_out {
                write_file(path, &r.witness.to_text())?;
            }
            Ok(record(
                format,
                &[
                    ("method", json!("greedy")),
                    ("n", json!(g.n())),
                    ("upper_bound", json!(r.upper_bound)),
                    ("moves", json!(r.witness.len())),
                ],
            ))
        }
        Cmd::Solve(SolveCmd::Verify { graph, protocol }) => {
            let g = read_graph(graph)?;
            let f = fs::File::open(protocol)
                .map_err(|e| runtime(format!("{}: {e}", protocol.display())))?;
            let proto = tacq_core::Protocol::read_text(BufReader::new(f)).map_err(runtime)?;
            let r = verify_protocol(&g, &proto).map_err(runtime)?;
            Ok(record(
                format,
                &[
                    ("n", json!(g.n())),
                    ("moves", json!(proto.len())),
                    ("residual_size", json!(r.residual_size)),
                    ("maximal", json!(r.maximal)),
                ],
            ))
        }
        Cmd::Bound { graph } => {
            let g = read_graph(graph)?;
            let lower = certified_lower_bound(&g);
            let phi = capacity_vector(&g).phi;
            let leaves = if g.is_tree() {
                Some(long_leaf_lower_bound(&g).map_err(runtime)?)
            } else {
                None
            };
            let mut sorted = phi.clone();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let mut fields = vec![
                ("n", json!(g.n())),
                ("components", json!(g.components().len())),
                ("phi_max", json!(sorted.first().copied().unwrap_or(0))),
                ("phi_top_k_sum", json!(sorted.iter().take(lower).sum::<u64>())),
                ("certified_lower_bound", json!(lower)),
                ("long_leaves", json!(leaves.map(|l| l.count))),
                ("long_leaf_certified", json!(leaves.map(|l| l.certified))),
            ];
            if format == Format::Json {
                fields.push(("phi", json!(phi)));
            }
            Ok(record(format, &fields))
        }
        Cmd::Ctree(CtreeCmd::Build { params, n, tree_out, pruned }) => {
            let p = params.build(*n)?;
            let table = calibrate(&p).map_err(cutoff_err)?;
            if let Some(path) = tree_out {
                let t = build_tree(&table).map_err(cutoff_err)?;
                let t = if *pruned { prune_bereft(&t) } else { t };
                write_file(path, &t.to_text())?;
            }
            Ok(match format {
                Format::Csv => table.to_csv(),
                Format::Json => format!("{}\n", serde_json::to_string(&table).map_err(runtime)?),
            })
        }
        Cmd::Ctree(CtreeCmd::Check { tree }) => {
            let t = read_tree(tree)?;
            Ok(record(
                format,
                &[
                    ("nodes", json!(t.len())),
                    ("bereft", json!(t.bereft_count())),
                    ("depth", json!(t.depth())),
                    ("cutoff", json!(check_cutoff(&t))),
                    ("absorbable", json!(check_absorbable(&t))),
                ],
            ))
        }
        Cmd::Ctree(CtreeCmd::Protocol { tree }) => {
            let t = read_tree(tree)?;
            let ids: Vec<usize> = (0..t.len()).collect();
            Ok(extract_protocol(&t, &ids).map_err(cutoff_err)?.to_text())
        }
        Cmd::Pipeline(PipelineCmd::Single { n, p, params, protocol_out }) => {
            let prob = p.resolve(*n)?;
            let params = params.build(*n as u64)?;
            let g = sample_gnp(*n, prob, &mut rng);
            let report = witness_pipeline_on(&g, prob.get(), &params, cli.seed);
            pipeline_output(&report, protocol_out.as_deref())
        }
        Cmd::Pipeline(PipelineCmd::Multi { n, p, params, c, protocol_out }) => {
            let prob = p.resolve(*n)?;
            let params = params.build(*n as u64)?;
            multi_root_table(&params, *c).map_err(cutoff_err)?;
            let g = sample_gnp(*n, prob, &mut rng);
            let (_, report) = multi_root_pipeline_on(&g, prob.get(), *c, &params, cli.seed);
            pipeline_output(&report, protocol_out.as_deref())
        }
        Cmd::Sweep(a) => {
            let sigma = a.params.sigma.unwrap_or_else(|| tacq_core::cutoff::default_sigma(a.params.eps));
            let cfg = SweepConfig {
                n_list: a.n_list.clone(),
                multipliers: a.multipliers.clone(),
                trials: a.trials,
                base_seed: cli.seed,
                eps: a.params.eps,
                sigma,
                alpha: a.params.alpha,
                beta: a.params.beta,
                timing: a.timing,
            };
            let rows = run_sweep(&cfg).map_err(usage)?;
            Ok(match format {
                Format::Csv => sweep_csv(&rows),
                Format::Json => format!("{}\n", serde_json::to_string(&rows).map_err(runtime)?),
            })
        }
        Cmd::Treestats { n, trials } => {
            let s = run_tree_stats(*n, *trials, cli.seed).map_err(usage)?;
            Ok(match format {
                Format::Csv => s.csv(),
                Format::Json => format!("{}\n", serde_json::to_string(&s).map_err(runtime)?),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => write_file(path, &text),
        None => match io::stdout().write_all(text.as_bytes()) {
            // a closed downstream pipe (e.g. `| head`) is not our failure
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.map_err(runtime),
        },
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

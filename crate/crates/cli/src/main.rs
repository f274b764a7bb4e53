use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use parsa_core::experiment::{run_bench, to_csv, Sweep};
use parsa_core::graph::synth::{power_law_bipartite, SyntheticConfig};
use parsa_core::graph::{cache, IdMap};
use parsa_core::metrics::{evaluate, random_baseline, BaselineOptions, MetricSelector, MetricsReport};
use parsa_core::output::{read_assignment, write_assignment, write_metrics, AssignmentSidecar};
use parsa_core::partition_v::{sweep_to_convergence, Demand};
use parsa_core::pipeline::{now_ms, run_partition, GraphSource, InputFormat, PipelineConfig};
use parsa_core::{
    BalanceRule, BipartiteGraph, Error, GreedyConfig, MaxDelay, RunManifest, RuntimeConfig, UPartition,
    VPartition,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(
    name = "parsa",
    version,
    about = "Partition bipartite dependency graphs for distributed training"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a text graph into the binary cache format.
    Convert {
        #[command(flatten)]
        input: InputArgs,
        /// Cache file to write; the id map goes next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic power-law graph to a cache file.
    Generate {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition U, place V and evaluate.
    Partition(PartitionArgs),
    /// Place V for an existing U partition.
    AssignV {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        u_partition: PathBuf,
        #[arg(long, default_value_t = 8)]
        sweeps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report metrics of existing U and V partitions.
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        u_partition: PathBuf,
        #[arg(long)]
        v_partition: PathBuf,
        /// Random placements to compare against; 0 skips the comparison.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        baseline_seed: u64,
        /// Place V uniformly in the random baseline instead of among machines needing it.
        #[arg(long)]
        uniform_v: bool,
        /// Also write the report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep k or (a, b) and emit quality and timing as CSV.
    Bench {
        #[command(flatten)]
        input: OptionalInputArgs,
        #[command(flatten)]
        synth: SynthArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated partition counts, e.g. `2,4,8,16`.
        #[arg(long, value_delimiter = ',', conflicts_with = "ab")]
        ks: Vec<usize>,
        /// Comma-separated `a:b` pairs, e.g. `0:16,16:16`.
        #[arg(long, value_delimiter = ',')]
        ab: Vec<String>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        uniform_v: bool,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// libsvm, edgelist-directed, edgelist-undirected or cache.
    #[arg(long, default_value = "libsvm")]
    format: InputFormat,
}

#[derive(Args)]
struct OptionalInputArgs {
    /// Graph file; a synthetic graph is generated when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "libsvm")]
    format: InputFormat,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10_000)]
    num_u: usize,
    #[arg(long, default_value_t = 5_000)]
    num_v: usize,
    #[arg(long, default_value_t = 1.5)]
    exponent: f64,
    #[arg(long = "graph-seed", default_value_t = 0)]
    graph_seed: u64,
}

impl SynthArgs {
    fn config(&self) -> SyntheticConfig {
        SyntheticConfig {
            num_u: self.num_u,
            num_v: self.num_v,
            exponent: self.exponent,
            seed: self.graph_seed,
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 16)]
    k: usize,
    /// Initialization passes.
    #[arg(long, default_value_t = 16)]
    a: usize,
    /// Subgraph blocks.
    #[arg(long, default_value_t = 16)]
    b: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// neighbor-set-size or partition-size.
    #[arg(long, default_value = "neighbor-set-size")]
    balance_rule: BalanceRule,
    /// Maximum delay in blocks, or `inf`.
    #[arg(long, default_value = "0")]
    tau: MaxDelay,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 1)]
    server_shards: usize,
    /// Seed the neighbor sets from a greedy run on this fraction of U.
    #[arg(long)]
    global_init: Option<f64>,
    #[arg(long)]
    prefetch: bool,
    /// Maximum V placement sweeps.
    #[arg(long, default_value_t = 8)]
    sweeps: usize,
}

impl ParamArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            greedy: GreedyConfig {
                k: self.k,
                a: self.a,
                b: self.b,
                seed: self.seed,
                balance_rule: self.balance_rule,
            },
            runtime: RuntimeConfig {
                workers: self.workers,
                server_shards: self.server_shards,
                max_delay: self.tau,
                prefetch: self.prefetch,
                global_init: self.global_init,
                record_deltas: false,
            },
            sweeps: self.sweeps,
        }
    }
}

#[derive(Args)]
struct PartitionArgs {
    /// Re-run the configuration recorded in a manifest; other graph and
    /// parameter flags are ignored.
    #[arg(long, conflicts_with = "input")]
    manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "libsvm")]
    format: InputFormat,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    out: PathBuf,
}

fn load(source: &GraphSource) -> anyhow::Result<(BipartiteGraph, Option<IdMap>)> {
    let what = match source {
        GraphSource::File { path, .. } => path.clone(),
        GraphSource::Synthetic(_) => "synthetic graph".to_string(),
    };
    let (g, ids) = source.load().with_context(|| format!("loading {what}"))?;
    log::info!(
        "loaded {what}: |U|={} |V|={} |E|={}",
        g.num_u(),
        g.num_v(),
        g.num_edges()
    );
    Ok((g, ids))
}

fn file_source(path: &Path, format: InputFormat) -> GraphSource {
    GraphSource::File {
        path: path.display().to_string(),
        format,
    }
}

fn sidecar(
    side: &str,
    k: usize,
    assign: &[usize],
    sizes: &[usize],
    cfg: &PipelineConfig,
) -> anyhow::Result<AssignmentSidecar> {
    Ok(AssignmentSidecar {
        side: side.to_string(),
        k,
        count: assign.len(),
        sizes: sizes.to_vec(),
        seed: Some(cfg.greedy.seed),
        config: serde_json::to_value(cfg)?,
    })
}

fn cmd_convert(input: &InputArgs, out: &Path) -> anyhow::Result<()> {
    let (g, ids) = load(&file_source(&input.input, input.format))?;
    cache::write(&g, out).with_context(|| format!("writing {}", out.display()))?;
    let ids = ids.unwrap_or_else(|| IdMap::identity(g.num_u(), g.num_v()));
    ids.write_to(out.with_extension("ids"))?;
    println!("|U|={} |V|={} |E|={}", g.num_u(), g.num_v(), g.num_edges());
    Ok(())
}

fn cmd_generate(synth: &SynthArgs, out: &Path) -> anyhow::Result<()> {
    let g = power_law_bipartite(&synth.config())?;
    cache::write(&g, out).with_context(|| format!("writing {}", out.display()))?;
    println!("|U|={} |V|={} |E|={}", g.num_u(), g.num_v(), g.num_edges());
    Ok(())
}

fn cmd_partition(args: &PartitionArgs) -> anyhow::Result<()> {
    let mut manifest = match &args.manifest {
        Some(path) => RunManifest::read(path).with_context(|| format!("reading {}", path.display()))?,
        None => {
            let input = args.input.as_deref().expect("clap enforces --input");
            RunManifest::new(file_source(input, args.format), args.params.config())
        }
    };
    manifest.output_dir = Some(args.out.display().to_string());
    manifest.started_at_ms = Some(now_ms());

    let (g, ids) = load(&manifest.source)?;
    let cfg = &manifest.config;
    let result = run_partition(&g, cfg)?;

    let out = &args.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_assignment(
        &out.join("u_partition.txt"),
        result.u.assign(),
        &sidecar("u", cfg.greedy.k, result.u.assign(), result.u.sizes(), cfg)?,
    )?;
    write_assignment(
        &out.join("v_partition.txt"),
        result.v.assign(),
        &sidecar("v", cfg.greedy.k, result.v.assign(), result.v.sizes(), cfg)?,
    )?;
    write_metrics(out, &result.metrics)?;
    if let Some(ids) = ids {
        ids.write_to(out.join("id_map.txt"))?;
    }
    manifest.finished_at_ms = Some(now_ms());
    manifest.write(out.join("manifest.json"))?;

    if !result.converged {
        log::warn!(
            "V placement stopped after {} sweeps without converging",
            result.sweeps
        );
    }
    print!("{}", result.metrics.to_table());
    Ok(())
}

fn read_u(path: &Path, k_hint: Option<usize>, g: &BipartiteGraph) -> anyhow::Result<UPartition> {
    let assign = read_assignment(path).with_context(|| format!("reading {}", path.display()))?;
    if assign.len() != g.num_u() {
        bail!(Error::InvalidArgument(format!(
            "{} lists {} vertices, graph has |U|={}",
            path.display(),
            assign.len(),
            g.num_u()
        )));
    }
    let k = k_hint.unwrap_or_else(|| assign.iter().max().map_or(1, |m| m + 1));
    Ok(UPartition::new(k, assign)?)
}

fn k_from_sidecar(path: &Path) -> Option<usize> {
    let text = fs::read_to_string(parsa_core::output::sidecar_path(path)).ok()?;
    serde_json::from_str::<AssignmentSidecar>(&text).ok().map(|s| s.k)
}

fn cmd_assign_v(input: &InputArgs, u_path: &Path, sweeps: usize, out: &Path) -> anyhow::Result<()> {
    let (g, _) = load(&file_source(&input.input, input.format))?;
    let up = read_u(u_path, k_from_sidecar(u_path), &g)?;
    let placed = sweep_to_convergence(&Demand::from_partition(&g, &up), sweeps, None)?;
    let report = evaluate(&g, &up, &placed.partition)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let side = AssignmentSidecar {
        side: "v".into(),
        k: up.k(),
        count: placed.partition.len(),
        sizes: placed.partition.sizes().to_vec(),
        seed: None,
        config: serde_json::json!({ "sweeps": sweeps, "sweeps_used": placed.sweeps, "converged": placed.converged }),
    };
    write_assignment(&out.join("v_partition.txt"), placed.partition.assign(), &side)?;
    write_metrics(out, &report)?;
    print!("{}", report.to_table());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    input: &InputArgs,
    u_path: &Path,
    v_path: &Path,
    trials: usize,
    baseline_seed: u64,
    uniform_v: bool,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let (g, _) = load(&file_source(&input.input, input.format))?;
    let k = k_from_sidecar(u_path).or_else(|| k_from_sidecar(v_path));
    let up = read_u(u_path, k, &g)?;
    let v_assign = read_assignment(v_path).with_context(|| format!("reading {}", v_path.display()))?;
    let vp = VPartition::new(up.k(), v_assign)?;
    let report: MetricsReport = evaluate(&g, &up, &vp)?;
    print!("{}", report.to_table());
    let mut json = serde_json::to_value(&report)?;
    if trials > 0 {
        let baseline = random_baseline(&g, up.k(), trials, baseline_seed, BaselineOptions { uniform_v })?;
        let mut improvements = serde_json::Map::new();
        for which in MetricSelector::ALL {
            let pct = baseline.improvement_of(&report, which);
            println!(
                "improvement {:<14} {pct:.2}%",
                serde_json::to_value(which)?.as_str().unwrap_or("")
            );
            improvements.insert(
                serde_json::to_value(which)?.as_str().unwrap_or("").to_string(),
                pct.into(),
            );
        }
        json["improvement_vs_random"] = improvements.into();
        json["random_baseline"] = serde_json::to_value(&baseline)?;
    }
    if let Some(path) = out {
        fs::write(path, serde_json::to_string_pretty(&json)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn parse_ab(items: &[String]) -> anyhow::Result<Vec<(usize, usize)>> {
    items
        .iter()
        .map(|s| {
            let (a, b) = s
                .split_once(':')
                .ok_or_else(|| Error::InvalidArgument(format!("expected `a:b`, got `{s}`")))?;
            let parse = |x: &str| {
                x.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad number `{x}` in `{s}`")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Convert { input, out } => cmd_convert(&input, &out),
        Command::Generate { synth, out } => cmd_generate(&synth, &out),
        Command::Partition(args) => cmd_partition(&args),
        Command::AssignV {
            input,
            u_partition,
            sweeps,
            out,
        } => cmd_assign_v(&input, &u_partition, sweeps, &out),
        Command::Evaluate {
            input,
            u_partition,
            v_partition,
            trials,
            baseline_seed,
            uniform_v,
            out,
        } => cmd_evaluate(
            &input,
            &u_partition,
            &v_partition,
            trials,
            baseline_seed,
            uniform_v,
            out.as_deref(),
        ),
        Command::Bench {
            input,
            synth,
            params,
            ks,
            ab,
            trials,
            uniform_v,
            out,
        } => {
            let source = match &input.input {
                Some(path) => file_source(path, input.format),
                None => GraphSource::Synthetic(synth.config()),
            };
            let sweep = if !ab.is_empty() {
                Sweep::Ab(parse_ab(&ab)?)
            } else if !ks.is_empty() {
                Sweep::K(ks)
            } else {
                Sweep::K(vec![params.k])
            };
            let (g, _) = load(&source)?;
            let rows = run_bench(
                &g,
                &params.config(),
                &sweep,
                trials,
                BaselineOptions { uniform_v },
            )?;
            let csv = to_csv(&rows)?;
            match out {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidArgument(_) => EXIT_CONFIG,
                Error::Parse { .. } | Error::Cache(_) | Error::Json(_) => EXIT_PARSE,
                Error::Protocol(_) | Error::Runtime(_) => EXIT_RUNTIME,
                Error::Io(_) => EXIT_IO,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return EXIT_PARSE;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_RUNTIME
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PARSA_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

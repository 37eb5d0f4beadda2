use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use sembed::config::load_config;
use sembed::dataset::{parse_manifest, Dataset, DescriptorCache};
use sembed::encoding::{subsample, Encoder, EncodingKind, FitParams};
use sembed::evaluation::{
    default_gamma, gen_synthetic, run_lopo, sweep, sweep_to_text, EvalConfig, SweepGrid, SyntheticSpec,
};
use sembed::inference::{SembedModel, WalkConfig};
use sembed::semantics::{parse_taxonomy, Relation, RelationMode, SemanticClasses, Taxonomy};
use sembed::svg::{build_svg, SvgGraph, SvgNode};
use sembed::write_atomic;

mod settings;
use settings::Settings;

#[derive(Parser)]
#[command(name = "sembed", version, about = "Semantic-visual graph embedding for action videos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a BoW codebook or Fisher-vector GMM on a manifest's descriptors.
    Encode,
    /// Build the semantic-visual graph for a training manifest.
    BuildGraph,
    /// Classify the segments of a manifest against a built graph.
    Classify,
    /// Leave-one-person-out evaluation of one method.
    Evaluate,
    /// Evaluate every point of a parameter grid (comma-separated lists).
    Sweep,
    /// Write a synthetic dataset with a planted label structure.
    GenSynthetic(SynthArgs),
}

#[derive(Args, Default)]
struct Opts {
    /// `key=value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    manifest: Option<String>,
    #[arg(long, global = true)]
    taxonomy: Option<String>,
    /// Encoder model file.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Graph dump file.
    #[arg(long, global = true)]
    graph: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    /// verb | am | as | ah
    #[arg(long, global = true)]
    mode: Option<String>,
    /// bow | fv
    #[arg(long, global = true)]
    encoding: Option<String>,
    /// sembed | knn | linear
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    gamma: Option<String>,
    #[arg(long, global = true)]
    m: Option<String>,
    #[arg(long, global = true)]
    z: Option<String>,
    #[arg(long, global = true)]
    t: Option<String>,
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    lambda: Option<String>,
    #[arg(long, global = true)]
    fraction: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Evaluate a seeded random subset of this many segments.
    #[arg(long, global = true)]
    sample: Option<String>,
    #[arg(long, global = true)]
    max_iters: Option<String>,
    #[arg(long, global = true)]
    workers: Option<String>,
}

#[derive(Args, Default)]
struct SynthArgs {
    #[arg(long)]
    clusters: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    separation: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    persons: Option<String>,
    #[arg(long)]
    descriptors: Option<String>,
}

fn collect_flags(o: &Opts, s: Option<&SynthArgs>) -> BTreeMap<&'static str, String> {
    let mut flags = BTreeMap::new();
    let mut put = |k: &'static str, v: &Option<String>| {
        if let Some(v) = v {
            flags.insert(k, v.clone());
        }
    };
    put("manifest", &o.manifest);
    put("taxonomy", &o.taxonomy);
    put("model", &o.model);
    put("graph", &o.graph);
    put("out", &o.out);
    put("mode", &o.mode);
    put("encoding", &o.encoding);
    put("method", &o.method);
    put("gamma", &o.gamma);
    put("m", &o.m);
    put("z", &o.z);
    put("t", &o.t);
    put("k", &o.k);
    put("lambda", &o.lambda);
    put("fraction", &o.fraction);
    put("seed", &o.seed);
    put("sample", &o.sample);
    put("max_iters", &o.max_iters);
    put("workers", &o.workers);
    if let Some(s) = s {
        put("clusters", &s.clusters);
        put("points", &s.points);
        put("dim", &s.dim);
        put("separation", &s.separation);
        put("sigma", &s.sigma);
        put("persons", &s.persons);
        put("descriptors", &s.descriptors);
    }
    flags
}

fn load_taxonomy(s: &Settings, mode: RelationMode) -> Result<Taxonomy> {
    match s.path("taxonomy") {
        Some(p) => Ok(parse_taxonomy(&p)?),
        None if mode.needs_meanings() => bail!("mode {mode} requires --taxonomy"),
        None => Ok(Taxonomy::default()),
    }
}

fn load_manifest(s: &Settings) -> Result<Dataset> {
    Ok(parse_manifest(&s.require_path("manifest")?)?)
}

fn fit_params(s: &Settings) -> Result<FitParams> {
    let d = FitParams::default();
    Ok(FitParams { max_iters: s.parse("max_iters", d.max_iters)?, ..d })
}

fn eval_config(s: &Settings) -> Result<EvalConfig> {
    let d = EvalConfig::default();
    let encoding: EncodingKind = s.parse("encoding", d.encoding)?;
    let seed = s.parse("seed", d.seed)?;
    let cfg = EvalConfig {
        method: s.parse("method", d.method)?,
        mode: s.parse("mode", d.mode)?,
        encoding,
        gamma: s.single("gamma", default_gamma(encoding))?,
        fraction: s.parse("fraction", d.fraction)?,
        fit: fit_params(s)?,
        walk: WalkConfig {
            z: s.single("z", d.walk.z)?,
            t: s.single("t", d.walk.t)?,
        },
        m: s.single("m", d.m)?,
        k: s.single("k", d.k)?,
        lambda: s.parse("lambda", d.lambda)?,
        linear: d.linear,
        seed,
        sample: s.opt("sample")?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(s: &Settings, text: &str) -> Result<()> {
    match s.path("out") {
        Some(p) => {
            write_atomic(&p, text.as_bytes())?;
            info!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_encode(s: &Settings) -> Result<()> {
    let dataset = load_manifest(s)?;
    let kind: EncodingKind = s.parse("encoding", EncodingKind::Fv)?;
    let gamma = s.single("gamma", default_gamma(kind))?;
    let seed = s.parse("seed", 0u64)?;
    let cache = DescriptorCache::new();
    let sets = dataset
        .segments()
        .iter()
        .map(|seg| cache.get(&dataset, seg))
        .collect::<sembed::Result<Vec<_>>>()?;
    let refs: Vec<_> = sets.iter().map(|d| d.as_ref()).collect();
    let pool = subsample(&refs, s.parse("fraction", 0.25)?, seed)?;
    let encoder = Encoder::train(kind, &pool, gamma, seed, fit_params(s)?)?;
    let out = s.require_path("out")?;
    write_atomic(&out, encoder.to_text().as_bytes())?;
    println!("{kind} model with gamma={gamma} fitted on {} descriptors", pool.rows());
    Ok(())
}

fn cmd_build_graph(s: &Settings) -> Result<()> {
    let dataset = load_manifest(s)?;
    let mode: RelationMode = s.parse("mode", RelationMode::Verb)?;
    let taxonomy = load_taxonomy(s, mode)?;
    let encoder = Encoder::load(&s.require_path("model")?)?;
    let relation = Relation::new(mode, &taxonomy);
    let cache = DescriptorCache::new();
    let nodes = dataset
        .segments()
        .iter()
        .map(|seg| {
            Ok(SvgNode {
                segment_id: seg.segment_id.clone(),
                key: relation.key(&seg.annotation)?.to_string(),
                vector: encoder.encode(cache.get(&dataset, seg)?.as_ref())?,
            })
        })
        .collect::<sembed::Result<Vec<_>>>()?;
    let graph = build_svg(nodes, &relation, s.single("m", 240)?)?;
    let out = s.require_path("out")?;
    write_atomic(&out, graph.to_text().as_bytes())?;
    println!(
        "graph with {} nodes and {} directed edges",
        graph.len(),
        graph.directed_edge_count()
    );
    Ok(())
}

fn cmd_classify(s: &Settings) -> Result<()> {
    let graph = SvgGraph::load(&s.require_path("graph")?)?;
    let encoder = Encoder::load(&s.require_path("model")?)?;
    let queries = load_manifest(s)?;
    let mode: RelationMode = s.parse("mode", graph.mode())?;
    let taxonomy = load_taxonomy(s, mode)?;
    let relation = Relation::new(mode, &taxonomy);
    graph.check_semantics(&relation)?;
    let query_keys: Vec<Option<&str>> = queries
        .segments()
        .iter()
        .map(|q| relation.key(&q.annotation).ok())
        .collect();
    let keys = graph
        .nodes()
        .iter()
        .map(|n| n.key.as_str())
        .chain(query_keys.iter().flatten().copied());
    let classes = SemanticClasses::from_keys(&relation, keys)?;
    let model = SembedModel::new(graph, classes)?;
    let walk = WalkConfig {
        z: s.single("z", 4)?,
        t: s.single("t", 8)?,
    };
    let cache = DescriptorCache::new();
    let mut out = String::from("# segment_id\tpredicted\ttrue\tp_predicted\tdistribution\n");
    for (q, key) in queries.segments().iter().zip(&query_keys) {
        let vector = encoder.encode(cache.get(&queries, q)?.as_ref())?;
        let c = model.classify(&vector, walk)?;
        let truth = match key {
            Some(k) => model.classes().class_name_of(k)?,
            None => "-",
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            q.segment_id,
            c.label,
            truth,
            c.probability,
            c.distribution.to_dump()
        ));
    }
    write_out(s, &out)
}

fn cmd_evaluate(s: &Settings) -> Result<()> {
    let dataset = load_manifest(s)?;
    let cfg = eval_config(s)?;
    let taxonomy = load_taxonomy(s, cfg.mode)?;
    let cache = DescriptorCache::new();
    let report = run_lopo(&dataset, &taxonomy, &cache, &cfg)?;
    if let Some(bad) = report.folds.iter().find(|f| !f.is_clean()) {
        bail!("fold for person {} leaked test data into training", bad.held_out);
    }
    let text = report.to_text()?;
    if let Some(p) = s.path("out") {
        write_atomic(&p, text.as_bytes())?;
    }
    println!("accuracy={}", report.accuracy()?);
    Ok(())
}

fn cmd_sweep(s: &Settings) -> Result<()> {
    let dataset = load_manifest(s)?;
    let mut base = eval_config_for_sweep(s)?;
    let taxonomy = load_taxonomy(s, base.mode)?;
    let grid = SweepGrid {
        gamma: s.list("gamma")?,
        m: s.list("m")?,
        z: s.list("z")?,
        t: s.list("t")?,
        k: s.list("k")?,
    };
    if grid.gamma.is_empty() {
        base.gamma = default_gamma(base.encoding);
    }
    let cache = DescriptorCache::new();
    let rows = sweep(&dataset, &taxonomy, &cache, &base, &grid)?;
    write_out(s, &sweep_to_text(&rows))
}

/// Like [`eval_config`] but list-valued knobs are left to the grid.
fn eval_config_for_sweep(s: &Settings) -> Result<EvalConfig> {
    let d = EvalConfig::default();
    let encoding: EncodingKind = s.parse("encoding", d.encoding)?;
    Ok(EvalConfig {
        method: s.parse("method", d.method)?,
        mode: s.parse("mode", d.mode)?,
        encoding,
        gamma: default_gamma(encoding),
        fraction: s.parse("fraction", d.fraction)?,
        fit: fit_params(s)?,
        lambda: s.parse("lambda", d.lambda)?,
        seed: s.parse("seed", d.seed)?,
        sample: s.opt("sample")?,
        ..d
    })
}

fn cmd_gen_synthetic(s: &Settings) -> Result<()> {
    let d = SyntheticSpec::planted(s.parse("seed", 0u64)?);
    let spec = SyntheticSpec {
        clusters: s.parse("clusters", d.clusters)?,
        points_per_cluster: s.parse("points", d.points_per_cluster)?,
        dim: s.parse("dim", d.dim)?,
        separation: s.parse("separation", d.separation)?,
        sigma: s.parse("sigma", d.sigma)?,
        persons: s.parse("persons", d.persons)?,
        descriptors_per_segment: s.parse("descriptors", d.descriptors_per_segment)?,
        ..d
    };
    let out = s.require_path("out")?;
    let paths = gen_synthetic(&spec, &out)?;
    println!("manifest={}", paths.manifest.display());
    println!("taxonomy={}", paths.taxonomy.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.opts.config {
        Some(p) => load_config(p)?,
        None => BTreeMap::new(),
    };
    let synth = match &cli.command {
        Command::GenSynthetic(a) => Some(a),
        _ => None,
    };
    let s = Settings::new(collect_flags(&cli.opts, synth), config);
    if let Some(w) = s.opt::<usize>("workers")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("configuring worker pool")?;
    }
    match cli.command {
        Command::Encode => cmd_encode(&s),
        Command::BuildGraph => cmd_build_graph(&s),
        Command::Classify => cmd_classify(&s),
        Command::Evaluate => cmd_evaluate(&s),
        Command::Sweep => cmd_sweep(&s),
        Command::GenSynthetic(_) => cmd_gen_synthetic(&s),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Command-line front end.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use esec_core::chaining::{human_timings, schedule_means, MonteCarloConfig, PredictionMode};
use esec_core::cluster::{cluster, Linkage};
use esec_core::event_chain::{project_sec, Esec, Sec};
use esec_core::generator::{generate_scene, Action, GenParams};
use esec_core::predict::{predict, ReferenceLibrary};
use esec_core::similarity::{esec_similarity, SimilarityMatrix};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::esec_io::{esec_to_json, load_esec, sec_to_json};
use crate::parallel;
use crate::scene_io::{serialize_scene, write_scene};
use crate::suite::{collect_inputs, generate_suite, item_id};
use crate::timing::read_timings;

/// Invalid combination of arguments; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(
    name = "esec",
    version,
    about = "Extended semantic event chains: extraction, similarity, prediction and action chaining"
)]
pub struct Cli {
    /// Worker threads (0 = one per core). Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// TOML file with [esec], [similarity] and [predictor] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Where to write the effective configuration (JSON). Defaults to a
    /// sidecar next to --out.
    #[arg(long, global = true)]
    pub config_out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one scene or a labelled suite of scenes.
    Gen(GenArgs),
    /// Extract event chains from scene files.
    Extract(ExtractArgs),
    /// Similarity (percent) of two chains.
    Sim(SimArgs),
    /// All-pairs similarity matrix as CSV.
    Simmatrix(MatrixArgs),
    /// Agglomerative clustering of a similarity matrix.
    Cluster(ClusterArgs),
    /// Predict the action of one scene against a reference library.
    Predict(PredictArgs),
    /// Leave-self-out prediction over a whole suite.
    BenchPredict(BenchArgs),
    /// Schedule a two-agent action chain on mean timings.
    Chain(ChainArgs),
    /// Monte-Carlo evaluation of all orderings of the timing table.
    ChainMc(ChainMcArgs),
}

#[derive(Debug, Args, Default)]
pub struct RelationArgs {
    /// Touching threshold on the per-axis box gap (m).
    #[arg(long)]
    pub eps_touch: Option<f64>,
    /// Separation beyond which the static relation is O (m).
    #[arg(long)]
    pub null_radius: Option<f64>,
    /// Radius of the Around relation (m).
    #[arg(long)]
    pub around_radius: Option<f64>,
    /// Use point samples for touching when both objects carry them.
    #[arg(long)]
    pub point_mode: bool,
    /// Dynamic-relation window (frames).
    #[arg(long)]
    pub window: Option<usize>,
    /// Distance change marking GC or MA (m).
    #[arg(long)]
    pub xi: Option<f64>,
    /// Distance change below which a pair is S (m).
    #[arg(long)]
    pub stable_eps: Option<f64>,
    /// Separation beyond which a stationary pair is Q rather than S (m).
    #[arg(long)]
    pub far_threshold: Option<f64>,
    /// Displacement counted as motion for touching pairs (m).
    #[arg(long)]
    pub move_eps: Option<f64>,
    /// Read GC as any change below xi, including no change.
    #[arg(long)]
    pub literal_gc: bool,
    /// Frames a relation change must persist (default: half a second).
    #[arg(long)]
    pub debounce: Option<usize>,
    /// Number objects 2 and 3 by the verbal rule instead of chronologically.
    #[arg(long)]
    pub literal_roles: bool,
}

#[derive(Debug, Args, Default)]
pub struct SimFlags {
    /// Divide cell differences by sqrt(3) so Sim lies in [0, 100].
    #[arg(long)]
    pub normalize: bool,
    /// Clamp negative similarities to zero.
    #[arg(long)]
    pub clamp: bool,
    /// Compare touching rows only (SEC projection).
    #[arg(long)]
    pub sec: bool,
}

#[derive(Debug, Args, Default)]
pub struct PredictorFlags {
    /// Reference exemplars sampled per class.
    #[arg(long)]
    pub refs_per_class: Option<usize>,
    /// Lead (Sim points) of the best class over the runner-up.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Reference sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Consecutive columns the lead must hold.
    #[arg(long)]
    pub persistence: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generate the full suite (every action, --variants each) into --out.
    #[arg(long)]
    pub suite: bool,
    /// Action for a single scene.
    #[arg(long)]
    pub action: Option<String>,
    /// Comma-separated subset of actions for --suite.
    #[arg(long)]
    pub actions: Option<String>,
    #[arg(long, default_value_t = 30)]
    pub variants: usize,
    /// Scene seed, or master seed with --suite.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub distractors: Option<usize>,
    #[arg(long)]
    pub speed_scale: Option<f64>,
    #[arg(long)]
    pub size_scale: Option<f64>,
    #[arg(long)]
    pub jitter: Option<f64>,
    #[arg(long)]
    pub fps: Option<f64>,
    /// Duration mean (s); defaults to the action's statistics.
    #[arg(long, requires = "duration_sd")]
    pub duration_mean: Option<f64>,
    #[arg(long, requires = "duration_mean")]
    pub duration_sd: Option<f64>,
    /// Output file (single scene) or directory (suite).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Scene files or directories.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output directory; a single input prints to stdout without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the touching-only projection instead.
    #[arg(long)]
    pub sec: bool,
    #[command(flatten)]
    pub relations: RelationArgs,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Scene (.jsonl) or chain (.json) file.
    pub a: PathBuf,
    pub b: PathBuf,
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub relations: RelationArgs,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub relations: RelationArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LinkageArg {
    Average,
    Single,
    Complete,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Complete => Linkage::Complete,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Similarity matrix CSV written by simmatrix.
    #[arg(long, conflicts_with = "inputs")]
    pub matrix: Option<PathBuf>,
    /// Scenes or chains to compare when no matrix is given.
    pub inputs: Vec<PathBuf>,
    /// Cut height on the distance 1 - Sim/100.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value = "average")]
    pub linkage: LinkageArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub relations: RelationArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Library directory or file (labelled scenes or chains); repeatable.
    #[arg(long, required = true)]
    pub library: Vec<PathBuf>,
    /// Query scene or chain.
    pub query: PathBuf,
    #[command(flatten)]
    pub predictor: PredictorFlags,
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub relations: RelationArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Suite directory or labelled files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Directory for summary.csv, confusion.csv and predictions.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub predictor: PredictorFlags,
    #[command(flatten)]
    pub sim: SimFlags,
    #[command(flatten)]
    pub relations: RelationArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Esec,
    Sec,
    None,
}

impl From<ModeArg> for PredictionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Esec => PredictionMode::Esec,
            ModeArg::Sec => PredictionMode::Sec,
            ModeArg::None => PredictionMode::None,
        }
    }
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Timing table CSV (default: the built-in human timings).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Comma-separated action order; unique prefixes are accepted.
    #[arg(long)]
    pub order: String,
    #[arg(long, value_enum, default_value = "esec")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct ChainMcArgs {
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "esec")]
    pub mode: ModeArg,
    /// Base samples; each is evaluated under every ordering.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Histogram bin width (s).
    #[arg(long, default_value_t = 1.0)]
    pub bin_width: f64,
    /// Directory for stats.json, histogram.csv and permutations.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Ctx {
    jobs: usize,
    base: RunConfig,
    config_out: Option<PathBuf>,
}

impl Ctx {
    fn config(
        &self,
        rel: &RelationArgs,
        sim: Option<&SimFlags>,
        pred: Option<&PredictorFlags>,
    ) -> Result<RunConfig> {
        let mut cfg = self.base;
        let s = &mut cfg.esec.static_cfg;
        set(&mut s.eps_touch, rel.eps_touch);
        set(&mut s.null_radius, rel.null_radius);
        set(&mut s.around_radius, rel.around_radius);
        s.point_mode |= rel.point_mode;
        let d = &mut cfg.esec.dynamic;
        set(&mut d.window, rel.window);
        set(&mut d.xi, rel.xi);
        set(&mut d.stable_eps, rel.stable_eps);
        set(&mut d.far_threshold, rel.far_threshold);
        set(&mut d.move_eps, rel.move_eps);
        d.literal_gc |= rel.literal_gc;
        if rel.debounce.is_some() {
            cfg.esec.debounce = rel.debounce;
        }
        cfg.esec.literal_roles |= rel.literal_roles;
        if let Some(f) = sim {
            cfg.similarity.normalize |= f.normalize;
            cfg.similarity.clamp_nonnegative |= f.clamp;
        }
        if let Some(p) = pred {
            set(&mut cfg.predictor.refs_per_class, p.refs_per_class);
            set(&mut cfg.predictor.margin, p.margin);
            set(&mut cfg.predictor.seed, p.seed);
            set(&mut cfg.predictor.persistence, p.persistence);
        }
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }

    /// Record the effective settings next to the main output.
    fn sidecar(&self, out: Option<&Path>, command: &str, params: serde_json::Value) -> Result<()> {
        let path = match (&self.config_out, out) {
            (Some(p), _) => p.clone(),
            (None, Some(o)) if o.is_dir() => o.join("run_config.json"),
            (None, Some(o)) => {
                let mut name = o.as_os_str().to_owned();
                name.push(".config.json");
                PathBuf::from(name)
            }
            (None, None) => return Ok(()),
        };
        let doc = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "params": params,
        });
        write_text(&path, &(serde_json::to_string_pretty(&doc)? + "\n"))
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Write to stdout; a reader that closed the pipe early is not an error.
fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Parse arguments and run; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            eprintln!("For more information, try '--help'.");
            2
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx {
        jobs: cli.jobs,
        base,
        config_out: cli.config_out,
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(&ctx, a),
        Command::Extract(a) => cmd_extract(&ctx, a),
        Command::Sim(a) => cmd_sim(&ctx, a),
        Command::Simmatrix(a) => cmd_simmatrix(&ctx, a),
        Command::Cluster(a) => cmd_cluster(&ctx, a),
        Command::Predict(a) => cmd_predict(&ctx, a),
        Command::BenchPredict(a) => cmd_bench(&ctx, a),
        Command::Chain(a) => cmd_chain(&ctx, a),
        Command::ChainMc(a) => cmd_chain_mc(&ctx, a),
    }
}

fn parse_actions(list: &str) -> Result<Vec<Action>> {
    list.split(',')
        .map(|s| s.trim().parse::<Action>().map_err(|e| usage(e.to_string())))
        .collect()
}

fn cmd_gen(ctx: &Ctx, a: GenArgs) -> Result<()> {
    if a.suite {
        if a.action.is_some() {
            return Err(usage("--suite and --action are exclusive"));
        }
        let out = a
            .out
            .as_deref()
            .ok_or_else(|| usage("--suite needs --out DIR"))?;
        let actions = match &a.actions {
            Some(list) => parse_actions(list)?,
            None => Action::ALL.to_vec(),
        };
        let m = generate_suite(out, &actions, a.variants, a.seed, ctx.jobs)?;
        ctx.sidecar(
            Some(out),
            "gen",
            json!({"suite": true, "actions": actions, "variants": a.variants, "master_seed": a.seed, "defaults": GenParams::default()}),
        )?;
        eprintln!("wrote {} scenes to {}", m.entries.len(), out.display());
        return Ok(());
    }
    let action: Action = a
        .action
        .as_deref()
        .ok_or_else(|| usage("gen needs --action NAME or --suite"))?
        .parse()
        .map_err(|e: esec_core::Error| usage(e.to_string()))?;
    let mut p = GenParams::new(action, a.seed);
    set(&mut p.distractors, a.distractors);
    set(&mut p.speed_scale, a.speed_scale);
    set(&mut p.size_scale, a.size_scale);
    set(&mut p.position_jitter, a.jitter);
    set(&mut p.fps, a.fps);
    if let (Some(m), Some(s)) = (a.duration_mean, a.duration_sd) {
        p.duration = Some((m, s));
    }
    p.validate().map_err(|e| usage(e.to_string()))?;
    let stream = generate_scene(&p)?;
    match &a.out {
        Some(path) => write_scene(path, &stream)?,
        None => print(std::str::from_utf8(&serialize_scene(&stream))?)?,
    }
    ctx.sidecar(a.out.as_deref(), "gen", json!({"params": p}))
}

/// Chains of the inputs, with their ids, as ESECs or SEC projections.
enum Chains {
    Esec(Vec<(String, Esec)>),
    Sec(Vec<(String, Sec)>),
}

fn load_chains(ctx: &Ctx, inputs: &[PathBuf], cfg: &RunConfig, sec: bool) -> Result<Chains> {
    let files = collect_inputs(inputs)?;
    let pool = parallel::pool(ctx.jobs)?;
    let esecs: Vec<(String, Esec)> = pool.install(|| {
        use rayon::prelude::*;
        files
            .par_iter()
            .map(|p| Ok((item_id(p), load_esec(p, &cfg.esec)?)))
            .collect::<crate::error::Result<Vec<_>>>()
    })?;
    Ok(if sec {
        Chains::Sec(
            esecs
                .into_iter()
                .map(|(id, e)| (id, project_sec(&e)))
                .collect(),
        )
    } else {
        Chains::Esec(esecs)
    })
}

fn cmd_extract(ctx: &Ctx, a: ExtractArgs) -> Result<()> {
    let cfg = ctx.config(&a.relations, None, None)?;
    let chains = load_chains(ctx, &a.inputs, &cfg, a.sec)?;
    let docs: Vec<(String, String)> = match &chains {
        Chains::Esec(v) => v
            .iter()
            .map(|(id, e)| (format!("{id}.esec.json"), esec_to_json(e)))
            .collect(),
        Chains::Sec(v) => v
            .iter()
            .map(|(id, s)| (format!("{id}.sec.json"), sec_to_json(s)))
            .collect(),
    };
    match &a.out {
        Some(dir) => {
            create_dir(dir)?;
            for (name, text) in &docs {
                write_text(&dir.join(name), text)?;
            }
        }
        None if docs.len() == 1 => print(&docs[0].1)?,
        None => return Err(usage("several inputs need --out DIR")),
    }
    ctx.sidecar(
        a.out.as_deref(),
        "extract",
        json!({"sec": a.sec, "config": cfg.esec}),
    )
}

fn cmd_sim(ctx: &Ctx, a: SimArgs) -> Result<()> {
    let cfg = ctx.config(&a.relations, Some(&a.sim), None)?;
    let x = load_esec(&a.a, &cfg.esec)?;
    let y = load_esec(&a.b, &cfg.esec)?;
    let sim = if a.sim.sec {
        esec_similarity(&project_sec(&x), &project_sec(&y), &cfg.similarity)?
    } else {
        esec_similarity(&x, &y, &cfg.similarity)?
    };
    print(&format!("{sim:?}\n"))?;
    ctx.sidecar(None, "sim", json!({"sec": a.sim.sec, "config": cfg}))
}

fn matrix_of(
    ctx: &Ctx,
    inputs: &[PathBuf],
    cfg: &RunConfig,
    sec: bool,
) -> Result<SimilarityMatrix> {
    Ok(match load_chains(ctx, inputs, cfg, sec)? {
        Chains::Esec(v) => {
            let (ids, items): (Vec<_>, Vec<_>) = v.into_iter().unzip();
            parallel::similarity_matrix(ids, &items, &cfg.similarity, ctx.jobs)?
        }
        Chains::Sec(v) => {
            let (ids, items): (Vec<_>, Vec<_>) = v.into_iter().unzip();
            parallel::similarity_matrix(ids, &items, &cfg.similarity, ctx.jobs)?
        }
    })
}

pub fn matrix_to_csv(m: &SimilarityMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![String::new()];
    header.extend(m.labels.iter().cloned());
    w.write_record(&header)?;
    for (i, label) in m.labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend((0..m.len()).map(|j| m.get(i, j).to_string()));
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn matrix_from_csv(text: &str) -> Result<SimilarityMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut rows = rdr.records();
    let header = rows.next().context("empty matrix file")??;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut values = Vec::with_capacity(labels.len() * labels.len());
    for (i, rec) in rows.enumerate() {
        let rec = rec?;
        if rec.get(0) != labels.get(i).map(String::as_str) {
            bail!("row {} label does not match the header", i + 1);
        }
        for v in rec.iter().skip(1) {
            values.push(
                v.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad value {v:?}"))?,
            );
        }
    }
    Ok(SimilarityMatrix::new(labels, values)?)
}

fn cmd_simmatrix(ctx: &Ctx, a: MatrixArgs) -> Result<()> {
    let cfg = ctx.config(&a.relations, Some(&a.sim), None)?;
    let m = matrix_of(ctx, &a.inputs, &cfg, a.sim.sec)?;
    let text = matrix_to_csv(&m)?;
    match &a.out {
        Some(p) => write_text(p, &text)?,
        None => print(&text)?,
    }
    ctx.sidecar(
        a.out.as_deref(),
        "simmatrix",
        json!({"sec": a.sim.sec, "config": cfg}),
    )
}

fn cmd_cluster(ctx: &Ctx, a: ClusterArgs) -> Result<()> {
    if !(a.threshold.is_finite() && a.threshold >= 0.0) {
        return Err(usage("--threshold must be a non-negative number"));
    }
    let cfg = ctx.config(&a.relations, Some(&a.sim), None)?;
    let m = match (&a.matrix, a.inputs.is_empty()) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            matrix_from_csv(&text).with_context(|| p.display().to_string())?
        }
        (None, false) => matrix_of(ctx, &a.inputs, &cfg, a.sim.sec)?,
        (None, true) => return Err(usage("cluster needs --matrix FILE or input files")),
    };
    let linkage: Linkage = a.linkage.into();
    let d = cluster(&m, linkage)?;
    let doc = json!({
        "linkage": linkage,
        "threshold": a.threshold,
        "clusters": d.cut_labels(a.threshold),
        "newick": d.newick(),
        "tree": d.tree(),
        "merges": d.merges,
    });
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match &a.out {
        Some(p) => write_text(p, &text)?,
        None => print(&text)?,
    }
    ctx.sidecar(
        a.out.as_deref(),
        "cluster",
        json!({"threshold": a.threshold, "linkage": linkage, "config": cfg}),
    )
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

fn cmd_predict(ctx: &Ctx, a: PredictArgs) -> Result<()> {
    let cfg = ctx.config(&a.relations, Some(&a.sim), Some(&a.predictor))?;
    let pcfg = cfg.predictor_config();
    let files = collect_inputs(&a.library)?;
    // Leave the query out when it is itself a library member.
    let exclude = files
        .iter()
        .any(|f| same_file(f, &a.query))
        .then(|| item_id(&a.query));
    let query = load_esec(&a.query, &cfg.esec)?;
    let label = query.label.clone();
    let chains = load_chains(ctx, &a.library, &cfg, a.sim.sec)?;
    let pred = match chains {
        Chains::Esec(v) => predict(&query, exclude.as_deref(), &library(v)?, &pcfg)?,
        Chains::Sec(v) => predict(
            &project_sec(&query),
            exclude.as_deref(),
            &library(v)?,
            &pcfg,
        )?,
    };
    let doc = json!({
        "label": label,
        "predicted": pred.class,
        "column": pred.column,
        "T": pred.t,
        "Tot": pred.tot,
        "P": pred.p,
        "margin": pcfg.margin,
        "classes": pred.classes,
        "trace": pred.trace,
    });
    print(&(serde_json::to_string_pretty(&doc)? + "\n"))?;
    ctx.sidecar(None, "predict", json!({"sec": a.sim.sec, "config": cfg}))
}

fn library<T: esec_core::event_chain::EventChain>(
    items: Vec<(String, T)>,
) -> Result<ReferenceLibrary<T>> {
    let mut lib = ReferenceLibrary::new();
    for (id, chain) in items {
        let class = chain
            .label()
            .map(str::to_string)
            .with_context(|| format!("library item {id} has no label"))?;
        lib.insert(class, id, chain);
    }
    Ok(lib)
}

fn cmd_bench(ctx: &Ctx, a: BenchArgs) -> Result<()> {
    let cfg = ctx.config(&a.relations, Some(&a.sim), Some(&a.predictor))?;
    let pcfg = cfg.predictor_config();
    let report = match load_chains(ctx, &a.inputs, &cfg, a.sim.sec)? {
        Chains::Esec(v) => parallel::bench_predict(&v, &pcfg, ctx.jobs)?,
        Chains::Sec(v) => parallel::bench_predict(&v, &pcfg, ctx.jobs)?,
    };
    let summary = report.summary_csv()?;
    let confusion = report.confusion_csv()?;
    print(&format!("{summary}\n{confusion}"))?;
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_text(&dir.join("summary.csv"), &summary)?;
        write_text(&dir.join("confusion.csv"), &confusion)?;
        let mut lines = String::new();
        for r in &report.results {
            lines += &serde_json::to_string(r)?;
            lines.push('\n');
        }
        write_text(&dir.join("predictions.jsonl"), &lines)?;
    }
    eprintln!("accuracy {:.4}", report.accuracy());
    ctx.sidecar(
        a.out.as_deref(),
        "bench-predict",
        json!({"sec": a.sim.sec, "config": cfg}),
    )
}

fn timing_table(path: &Option<PathBuf>) -> Result<Vec<esec_core::chaining::ActionTiming>> {
    Ok(match path {
        Some(p) => read_timings(p).with_context(|| p.display().to_string())?,
        None => human_timings(),
    })
}

fn cmd_chain(ctx: &Ctx, a: ChainArgs) -> Result<()> {
    let table = timing_table(&a.table)?;
    let order: Vec<&str> = a
        .order
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if order.is_empty() {
        return Err(usage("--order lists no actions"));
    }
    let mode: PredictionMode = a.mode.into();
    let timeline = schedule_means(&table, &order, mode)?;
    let doc = json!({"mode": a.mode, "timeline": timeline});
    print(&(serde_json::to_string_pretty(&doc)? + "\n"))?;
    ctx.sidecar(
        None,
        "chain",
        json!({"mode": a.mode, "order": order, "table": table}),
    )
}

fn cmd_chain_mc(ctx: &Ctx, a: ChainMcArgs) -> Result<()> {
    let table = timing_table(&a.table)?;
    let mc = MonteCarloConfig {
        base_samples: a.samples,
        seed: a.seed,
        mode: a.mode.into(),
        bin_width: a.bin_width,
    };
    esec_core::chaining::validate_mc(&mc).map_err(|e| usage(e.to_string()))?;
    let (stats, perms) = parallel::monte_carlo(&table, &mc, ctx.jobs)?;
    let doc = json!({
        "mode": a.mode,
        "base_samples": a.samples,
        "seed": a.seed,
        "cases": stats.cases,
        "mean": stats.mean,
        "sd": stats.sd,
        "mean_p_chain": stats.mean_p_chain,
        "min": stats.min,
        "max": stats.max,
        "bin_width": stats.bin_width,
    });
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    print(&text)?;
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_text(&dir.join("stats.json"), &text)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bin_start", "count"])?;
        for (bin, count) in &stats.histogram {
            w.write_record([
                (*bin as f64 * stats.bin_width).to_string(),
                count.to_string(),
            ])?;
        }
        write_text(
            &dir.join("histogram.csv"),
            &String::from_utf8(w.into_inner()?)?,
        )?;
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &perms {
            w.serialize(p)?;
        }
        write_text(
            &dir.join("permutations.csv"),
            &String::from_utf8(w.into_inner()?)?,
        )?;
    }
    ctx.sidecar(
        a.out.as_deref(),
        "chain-mc",
        json!({"monte_carlo": mc, "table": table}),
    )
}

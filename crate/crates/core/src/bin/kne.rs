//! `kne`: random walks, kernel embedding training and evaluation.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use kne::eval::classify::DEFAULT_RATIOS;
use kne::eval::{load_labels, run_classification, run_link_prediction, ClassifyConfig, LinkPredConfig, LogRegConfig};
use kne::graph::load_edge_list;
use kne::io::{sha256_file, write_atomic};
use kne::manifest::{manifest_path, Manifest};
use kne::walk::read_corpus;
use kne::{generate_walks, train, Embeddings, Error, Graph, KernelFamily, KernelSpec, Result, TrainConfig, WalkConfig, WalkCorpus};

const SEED_ENV: &str = "KNE_SEED";

#[derive(Parser, Debug)]
#[command(name = "kne", version, about = "Kernel node embeddings from biased random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random-walk corpus, one walk per line.
    Walk(WalkCmd),
    /// Train embeddings from a graph or an existing walk corpus.
    Train(TrainCmd),
    /// Node classification Micro-F1 over training ratios.
    EvalClassify(ClassifyCmd),
    /// Link-prediction AUC on a held-out edge split.
    EvalLinkpred(LinkPredCmd),
    /// Train and classify over a grid of one parameter.
    Sweep(SweepCmd),
    /// Re-run a walk or train command from its manifest.
    Replay(ReplayCmd),
}

#[derive(Args, Debug, Clone)]
struct WalkArgs {
    /// Walks started from every node.
    #[arg(long, default_value_t = 80)]
    num_walks: usize,
    #[arg(long, default_value_t = 10)]
    walk_length: usize,
    /// Context window size.
    #[arg(long, default_value_t = 10)]
    gamma: usize,
    /// Return parameter.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// In-out parameter.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
}

#[derive(Args, Debug, Clone)]
struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelArg::Gauss)]
    kernel: KernelArg,
    /// Gaussian σ² (default 2).
    #[arg(long, conflicts_with_all = ["sigma", "alpha"])]
    sigma2: Option<f64>,
    /// Gaussian σ; squared internally.
    #[arg(long, conflicts_with = "alpha")]
    sigma: Option<f64>,
    /// Schoenberg exponent (default 1).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum KernelArg {
    Gauss,
    Sch,
}

#[derive(Args, Debug, Clone)]
struct TrainArgs {
    #[arg(long, default_value_t = 128)]
    dim: usize,
    /// Negative samples per positive pair.
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    /// Initial learning rate.
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    /// Learning-rate floor (default lr · 1e-4).
    #[arg(long)]
    lr_min: Option<f64>,
    #[arg(long, default_value_t = 1)]
    epochs: usize,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Master seed; the KNE_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for walks and training.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Single worker in corpus order: bit-reproducible output.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Debug, Clone)]
struct LogRegArgs {
    /// Inverse L2 strength of the logistic regression.
    #[arg(long, default_value_t = 1.0)]
    logreg_c: f64,
    #[arg(long, default_value_t = 500)]
    logreg_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    logreg_tol: f64,
}

#[derive(Args, Debug, Clone)]
struct ClassifyArgs {
    /// Comma-separated training fractions.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50)]
    repeats: usize,
    #[command(flatten)]
    logreg: LogRegArgs,
}

#[derive(Args, Debug)]
struct WalkCmd {
    graph: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Restrict to the largest connected component.
    #[arg(long)]
    lcc: bool,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct TrainCmd {
    /// Edge list; optional when --corpus is given.
    #[arg(required_unless_present = "corpus")]
    graph: Option<PathBuf>,
    /// Train on this walk file instead of generating walks.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    lcc: bool,
    /// Also write the `token id` node map here.
    #[arg(long)]
    nodemap: Option<PathBuf>,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct ClassifyCmd {
    graph: PathBuf,
    labels: PathBuf,
    embeddings: PathBuf,
    /// TSV destination (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    classify: ClassifyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct LinkPredCmd {
    graph: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Fraction of edges held out for testing.
    #[arg(long, default_value_t = 0.5)]
    fraction: f64,
    /// Remove edges even when that disconnects the residual graph.
    #[arg(long)]
    allow_disconnect: bool,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    logreg: LogRegArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Dim,
    Sigma2,
    Alpha,
}

#[derive(Args, Debug)]
struct SweepCmd {
    graph: PathBuf,
    labels: PathBuf,
    #[arg(long, value_enum)]
    axis: Axis,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    classify: ClassifyArgs,
}

#[derive(Args, Debug)]
struct ReplayCmd {
    manifest: PathBuf,
    /// Output path (default: the one recorded in the manifest).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

impl KernelArgs {
    fn spec(&self) -> Result<KernelSpec> {
        match self.kernel {
            KernelArg::Gauss => {
                if self.alpha.is_some() {
                    return Err(usage("--alpha applies to the sch kernel"));
                }
                match self.sigma {
                    Some(s) if s > 0.0 => KernelSpec::gauss_sigma(s),
                    Some(s) => Err(usage(format!("--sigma must be positive, got {s}"))),
                    None => KernelSpec::gauss(self.sigma2.unwrap_or(2.0)),
                }
            }
            KernelArg::Sch => {
                if self.sigma.is_some() || self.sigma2.is_some() {
                    return Err(usage("--sigma/--sigma2 apply to the gauss kernel"));
                }
                KernelSpec::sch(self.alpha.unwrap_or(1.0))
            }
        }
    }
}

impl RunArgs {
    fn deterministic(&self) -> bool {
        self.deterministic || self.threads == 1
    }

    fn workers(&self) -> usize {
        if self.deterministic() {
            1
        } else {
            self.threads
        }
    }
}

fn walk_config(w: &WalkArgs, run: &RunArgs, seed: u64) -> WalkConfig {
    WalkConfig {
        walks_per_node: w.num_walks,
        walk_length: w.walk_length,
        p: w.p,
        q: w.q,
        window: w.gamma,
        seed,
        threads: run.workers(),
    }
}

fn train_config(t: &TrainArgs, w: &WalkArgs, run: &RunArgs, seed: u64) -> TrainConfig {
    TrainConfig {
        dim: t.dim,
        negatives: t.negatives,
        lr0: t.lr,
        lr_min: t.lr_min,
        epochs: t.epochs,
        window: w.gamma,
        seed,
        threads: run.workers(),
        deterministic: run.deterministic(),
    }
}

fn logreg_config(a: &LogRegArgs) -> LogRegConfig {
    LogRegConfig {
        c: a.logreg_c,
        max_iters: a.logreg_iters,
        tol: a.logreg_tol,
    }
}

fn classify_config(a: &ClassifyArgs, seed: u64) -> ClassifyConfig {
    ClassifyConfig {
        ratios: a.ratios.clone().unwrap_or_else(|| DEFAULT_RATIOS.to_vec()),
        repeats: a.repeats,
        logreg: logreg_config(&a.logreg),
        seed,
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "graph".into())
}

fn load_graph(path: &Path, lcc: bool) -> Result<Graph> {
    let g = load_edge_list(path)?;
    info!("{}: {} nodes, {} edges", path.display(), g.node_count(), g.edge_count());
    if lcc {
        let l = g.largest_connected_component();
        info!("largest component: {} nodes, {} edges", l.node_count(), l.edge_count());
        Ok(l)
    } else {
        Ok(g)
    }
}

/// Everything needed to reproduce a walk or train output.
#[derive(Debug, Clone)]
struct Job {
    train: bool,
    graph: Option<PathBuf>,
    corpus: Option<PathBuf>,
    lcc: bool,
    nodemap: Option<PathBuf>,
    walk: WalkConfig,
    train_cfg: TrainConfig,
    kernel: KernelSpec,
    output: PathBuf,
}

impl Job {
    fn manifest(&self) -> Result<Manifest> {
        let mut m = Manifest::new();
        m.set("command", if self.train { "train" } else { "walk" });
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("output", self.output.display());
        for (key, path) in [("input.graph", &self.graph), ("input.corpus", &self.corpus)] {
            if let Some(p) = path {
                m.set(key, p.display());
                m.set(&format!("{key}.sha256"), sha256_file(p)?);
            }
        }
        if let Some(p) = &self.nodemap {
            m.set("nodemap", p.display());
        }
        m.set("lcc", self.lcc);
        let w = &self.walk;
        m.set("walk.num_walks", w.walks_per_node)
            .set("walk.length", w.walk_length)
            .set("walk.gamma", w.window)
            .set("walk.p", w.p)
            .set("walk.q", w.q)
            .set("seed", w.seed)
            .set("threads", w.threads);
        if self.train {
            let t = &self.train_cfg;
            m.set("kernel", self.kernel.family())
                .set("kernel.param", self.kernel.param())
                .set("train.dim", t.dim)
                .set("train.negatives", t.negatives)
                .set("train.lr", t.lr0)
                .set("train.lr_min", t.lr_floor())
                .set("train.epochs", t.epochs)
                .set("deterministic", t.deterministic);
        }
        Ok(m)
    }

    fn from_manifest(m: &Manifest) -> Result<Job> {
        fn need<T: std::str::FromStr>(m: &Manifest, key: &str) -> Result<T> {
            m.parse(key)?
                .ok_or_else(|| Error::Data(format!("manifest lacks {key}")))
        }
        let train = match m.get("command") {
            Some("train") => true,
            Some("walk") => false,
            other => return Err(Error::Data(format!("cannot replay command {other:?}"))),
        };
        let recorded = m.get("version").unwrap_or("?");
        if recorded != env!("CARGO_PKG_VERSION") {
            warn!("manifest written by version {recorded}, replaying with {}", env!("CARGO_PKG_VERSION"));
        }
        let graph: Option<PathBuf> = m.get("input.graph").map(PathBuf::from);
        let corpus: Option<PathBuf> = m.get("input.corpus").map(PathBuf::from);
        for (key, path) in [("input.graph", &graph), ("input.corpus", &corpus)] {
            if let Some(p) = path {
                let want: String = need(m, &format!("{key}.sha256"))?;
                if sha256_file(p)? != want {
                    return Err(Error::Data(format!("{} changed since the manifest was written", p.display())));
                }
            }
        }
        let seed: u64 = need(m, "seed")?;
        let threads: usize = need(m, "threads")?;
        let walk = WalkConfig {
            walks_per_node: need(m, "walk.num_walks")?,
            walk_length: need(m, "walk.length")?,
            p: need(m, "walk.p")?,
            q: need(m, "walk.q")?,
            window: need(m, "walk.gamma")?,
            seed,
            threads,
        };
        let (kernel, train_cfg) = if train {
            let family: KernelFamily = need::<String>(m, "kernel")?.parse()?;
            let kernel = KernelSpec::new(family, need(m, "kernel.param")?)?;
            let cfg = TrainConfig {
                dim: need(m, "train.dim")?,
                negatives: need(m, "train.negatives")?,
                lr0: need(m, "train.lr")?,
                lr_min: Some(need(m, "train.lr_min")?),
                epochs: need(m, "train.epochs")?,
                window: walk.window,
                seed,
                threads,
                deterministic: need(m, "deterministic")?,
            };
            (kernel, cfg)
        } else {
            (KernelSpec::gauss(2.0)?, TrainConfig::default())
        };
        Ok(Job {
            train,
            graph,
            corpus,
            lcc: need(m, "lcc")?,
            nodemap: m.get("nodemap").map(PathBuf::from),
            walk,
            train_cfg,
            kernel,
            output: need::<String>(m, "output")?.into(),
        })
    }

    fn run(&self) -> Result<()> {
        let mut manifest = self.manifest()?;
        let graph = match &self.graph {
            Some(p) => Some(load_graph(p, self.lcc)?),
            None => None,
        };
        if let (Some(g), Some(p)) = (&graph, &self.nodemap) {
            write_atomic(p, |w| g.write_nodemap(w))?;
        }
        let t0 = Instant::now();
        let (corpus, tokens): (WalkCorpus, Vec<String>) = match (&self.corpus, &graph) {
            (Some(c), g) => read_corpus(c, g.as_ref())?,
            (None, Some(g)) => (generate_walks(g, &self.walk)?, g.tokens().to_vec()),
            (None, None) => return Err(usage("need a graph or a corpus")),
        };
        manifest.set("seconds.walk", format!("{:.3}", t0.elapsed().as_secs_f64()));
        info!("{} walks", corpus.len());

        if !self.train {
            let g = graph.as_ref().expect("walk jobs have a graph");
            write_atomic(&self.output, |w| corpus.write(g, w))?;
        } else {
            let (model, report) = train(&corpus, &self.train_cfg, self.kernel)?;
            manifest
                .set("seconds.train", format!("{:.3}", report.seconds))
                .set("train.pairs", report.pairs)
                .set("train.mean_loss", report.mean_loss());
            let emb = Embeddings::from_model(&model, &tokens)?;
            write_atomic(&self.output, |w| emb.write(w))?;
        }
        manifest.set("output.sha256", sha256_file(&self.output)?);
        manifest.write(manifest_path(&self.output))
    }
}

fn cmd_walk(c: &WalkCmd) -> Result<()> {
    let seed = resolve_seed(c.run.seed)?;
    Job {
        train: false,
        graph: Some(c.graph.clone()),
        corpus: None,
        lcc: c.lcc,
        nodemap: None,
        walk: walk_config(&c.walk, &c.run, seed),
        train_cfg: TrainConfig::default(),
        kernel: KernelSpec::gauss(2.0)?,
        output: c.output.clone(),
    }
    .run()
}

fn cmd_train(c: &TrainCmd) -> Result<()> {
    let seed = resolve_seed(c.run.seed)?;
    Job {
        train: true,
        graph: c.graph.clone(),
        corpus: c.corpus.clone(),
        lcc: c.lcc,
        nodemap: c.nodemap.clone(),
        walk: walk_config(&c.walk, &c.run, seed),
        train_cfg: train_config(&c.train, &c.walk, &c.run, seed),
        kernel: c.kernel.spec()?,
        output: c.output.clone(),
    }
    .run()
}

fn cmd_replay(c: &ReplayCmd) -> Result<()> {
    let mut job = Job::from_manifest(&Manifest::read(&c.manifest)?)?;
    if let Some(o) = &c.output {
        job.output = o.clone();
    }
    job.run()
}

/// Writes a TSV to `output` with a manifest, or to stdout.
fn emit(output: Option<&Path>, text: &str, manifest: &mut Manifest) -> Result<()> {
    match output {
        Some(p) => {
            write_atomic(p, |w| w.write_all(text.as_bytes()))?;
            manifest.set("output", p.display()).set("output.sha256", sha256_file(p)?);
            manifest.write(manifest_path(p))
        }
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn ratio_header(first: &str, ratios: &[f64]) -> String {
    let mut s = first.to_owned();
    for r in ratios {
        s.push_str(&format!("\t{r}"));
    }
    s.push('\n');
    s
}

fn cmd_classify(c: &ClassifyCmd) -> Result<()> {
    let seed = resolve_seed(c.seed)?;
    let cfg = classify_config(&c.classify, seed);
    cfg.validate()?;
    let graph = load_graph(&c.graph, false)?;
    let labels = load_labels(&c.labels, &graph)?;
    let emb = Embeddings::read(&c.embeddings)?.aligned_to(&graph)?;
    let started = Instant::now();
    let scores = run_classification(&emb, &labels, &cfg)?;
    let name = dataset_name(&c.embeddings);
    let mut text = ratio_header("method", &cfg.ratios);
    text.push_str(&name);
    scores.iter().for_each(|s| text.push_str(&format!("\t{:.4}", s.mean)));
    text.push('\n');
    text.push_str(&format!("{name}.std"));
    scores.iter().for_each(|s| text.push_str(&format!("\t{:.4}", s.std)));
    text.push('\n');

    let mut m = Manifest::new();
    m.set("command", "eval-classify")
        .set("version", env!("CARGO_PKG_VERSION"))
        .set("input.graph", c.graph.display())
        .set("input.graph.sha256", sha256_file(&c.graph)?)
        .set("input.labels", c.labels.display())
        .set("input.labels.sha256", sha256_file(&c.labels)?)
        .set("input.embeddings", c.embeddings.display())
        .set("input.embeddings.sha256", sha256_file(&c.embeddings)?)
        .set("ratios", format!("{:?}", cfg.ratios))
        .set("repeats", cfg.repeats)
        .set("logreg.c", cfg.logreg.c)
        .set("logreg.iters", cfg.logreg.max_iters)
        .set("logreg.tol", cfg.logreg.tol)
        .set("seed", seed)
        .set("seconds.eval", format!("{:.3}", started.elapsed().as_secs_f64()));
    emit(c.output.as_deref(), &text, &mut m)
}

fn cmd_linkpred(c: &LinkPredCmd) -> Result<()> {
    if !(c.fraction > 0.0 && c.fraction < 1.0) {
        return Err(usage(format!("--fraction must lie in (0, 1), got {}", c.fraction)));
    }
    if c.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    let base = resolve_seed(c.run.seed)?;
    let kernel = c.kernel.spec()?;
    let graph = load_graph(&c.graph, false)?;
    let name = dataset_name(&c.graph);
    let started = Instant::now();
    let mut text = String::from("dataset\tkernel\tparam\tseed\tauc\n");
    let mut aucs = Vec::new();
    for seed in base..base + c.runs {
        let cfg = LinkPredConfig {
            fraction: c.fraction,
            allow_disconnect: c.allow_disconnect,
            logreg: logreg_config(&c.logreg),
            seed,
        };
        let r = run_link_prediction(
            &graph,
            kernel,
            &walk_config(&c.walk, &c.run, seed),
            &train_config(&c.train, &c.walk, &c.run, seed),
            &cfg,
        )?;
        if r.test_pairs < r.requested {
            warn!("seed {seed}: removed {} of {} requested edges", r.test_pairs, r.requested);
        }
        text.push_str(&format!(
            "{name}\t{}\t{}\t{seed}\t{:.4}\n",
            kernel.family(),
            kernel.param(),
            r.auc
        ));
        aucs.push(r.auc);
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    info!("mean AUC over {} runs: {mean:.4}", aucs.len());

    let mut m = Manifest::new();
    m.set("command", "eval-linkpred")
        .set("version", env!("CARGO_PKG_VERSION"))
        .set("input.graph", c.graph.display())
        .set("input.graph.sha256", sha256_file(&c.graph)?)
        .set("kernel", kernel.family())
        .set("kernel.param", kernel.param())
        .set("fraction", c.fraction)
        .set("allow_disconnect", c.allow_disconnect)
        .set("runs", c.runs)
        .set("seed", base)
        .set("train.dim", c.train.dim)
        .set("mean_auc", mean)
        .set("seconds.total", format!("{:.3}", started.elapsed().as_secs_f64()));
    emit(c.output.as_deref(), &text, &mut m)
}

fn cmd_sweep(c: &SweepCmd) -> Result<()> {
    let seed = resolve_seed(c.run.seed)?;
    let cfg = classify_config(&c.classify, seed);
    cfg.validate()?;
    let graph = load_graph(&c.graph, false)?;
    let labels = load_labels(&c.labels, &graph)?;
    let base_kernel = c.kernel.spec()?;
    let walk = walk_config(&c.walk, &c.run, seed);
    let corpus = generate_walks(&graph, &walk)?;
    let axis = match c.axis {
        Axis::Dim => "dim",
        Axis::Sigma2 => "sigma2",
        Axis::Alpha => "alpha",
    };
    let started = Instant::now();
    let mut text = ratio_header(axis, &cfg.ratios);
    for &value in &c.values {
        let mut tcfg = train_config(&c.train, &c.walk, &c.run, seed);
        let kernel = match c.axis {
            Axis::Dim => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(usage(format!("dimension must be a positive integer, got {value}")));
                }
                tcfg.dim = value as usize;
                base_kernel
            }
            Axis::Sigma2 => KernelSpec::gauss(value)?,
            Axis::Alpha => KernelSpec::sch(value)?,
        };
        let (model, _) = train(&corpus, &tcfg, kernel)?;
        let emb = Embeddings::from_model(&model, graph.tokens())?;
        let scores = run_classification(&emb, &labels, &cfg)?;
        text.push_str(&value.to_string());
        scores.iter().for_each(|s| text.push_str(&format!("\t{:.4}", s.mean)));
        text.push('\n');
        info!("{axis}={value}: {:?}", scores.iter().map(|s| s.mean).collect::<Vec<_>>());
    }

    let mut m = Manifest::new();
    m.set("command", "sweep")
        .set("version", env!("CARGO_PKG_VERSION"))
        .set("input.graph", c.graph.display())
        .set("input.graph.sha256", sha256_file(&c.graph)?)
        .set("input.labels", c.labels.display())
        .set("input.labels.sha256", sha256_file(&c.labels)?)
        .set("axis", axis)
        .set("values", format!("{:?}", c.values))
        .set("kernel", base_kernel)
        .set("ratios", format!("{:?}", cfg.ratios))
        .set("repeats", cfg.repeats)
        .set("seed", seed)
        .set("seconds.total", format!("{:.3}", started.elapsed().as_secs_f64()));
    emit(c.output.as_deref(), &text, &mut m)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Walk(c) => cmd_walk(c),
        Command::Train(c) => cmd_train(c),
        Command::EvalClassify(c) => cmd_classify(c),
        Command::EvalLinkpred(c) => cmd_linkpred(c),
        Command::Sweep(c) => cmd_sweep(c),
        Command::Replay(c) => cmd_replay(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kne: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

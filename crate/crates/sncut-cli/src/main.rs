//! Command-line front end for signed graph clustering.
//!
//! Data goes to stdout or `--output`; progress notes go to stderr; failures
//! print a one-line JSON object on stderr and exit nonzero. All randomized
//! stages take their seed from `--seed`, so reruns with identical inputs
//! produce identical bytes.

mod config;

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use sncut::construct::{build_graph, load_embeddings, read_thesaurus, KernelParams};
use sncut::discrete::{cluster, ClusterOpts};
use sncut::metrics::{
    read_gold_classes, read_similarity_pairs, report, GoldClasses, ReportOpts, SimilarityPairs,
};
use sncut::sgraph::{
    partition_from_raw, read_graph, read_labels, read_partition, write_graph, write_labels,
    write_partition, Partition, SignedGraph,
};
use sncut::spectral::{smallest_eigenpairs, spectrum_csv, DEFAULT_EIG_TOL};
use sncut::synth::{curve_csv, generate_planted, nne_ndc_curve, PlantedConfig};
use sncut::Error;

use config::Settings;

#[derive(Parser)]
#[command(
    name = "sncut",
    version,
    about = "Cluster signed weighted graphs by spectral relaxation and rounding"
)]
struct Cli {
    /// Seed for every randomized stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Config file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Primary output path (defaults to stdout where applicable).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a signed graph from embeddings plus optional thesaurus signs.
    BuildGraph(BuildGraphArgs),
    /// Cluster a signed graph into k clusters.
    Cluster(ClusterArgs),
    /// Score an existing partition against reference data.
    Evaluate(EvaluateArgs),
    /// Sweep construction and clustering parameters, ranked by error.
    GridSearch(GridSearchArgs),
    /// Generate a planted-partition graph, optionally sweeping k.
    Synth(SynthArgs),
    /// Print the smallest eigenvalues of the normalized signed Laplacian.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct BuildGraphArgs {
    /// Embeddings file: `word x1 x2 ... xd` per line.
    #[arg(long)]
    embeddings: PathBuf,
    /// Thesaurus TSV: `word1<TAB>word2<TAB>syn|ant`.
    #[arg(long)]
    thesaurus: Option<PathBuf>,
    /// Restrict to the words listed in this file (one per line).
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Heat kernel bandwidth.
    #[arg(long)]
    sigma: Option<f64>,
    /// Similarity cutoff below which kernel edges are dropped.
    #[arg(long)]
    thresh: Option<f64>,
    /// Weight on the thresholded similarity graph.
    #[arg(long)]
    gamma: Option<f64>,
    /// Weight on thesaurus sign constraints.
    #[arg(long)]
    beta: Option<f64>,
    /// Extra weight on antonym constraints.
    #[arg(long = "beta-ant")]
    beta_ant: Option<f64>,
    /// Labels sidecar destination (default: `<output>.labels`).
    #[arg(long = "labels-out")]
    labels_out: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    /// Graph file in the edge-list format.
    #[arg(long)]
    graph: PathBuf,
    /// Node labels, one per line (default: `<graph>.labels` when present).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Number of clusters.
    #[arg(short, long)]
    k: Option<usize>,
    /// Rounding restarts; the best objective wins.
    #[arg(long)]
    restarts: Option<usize>,
    /// Cap on alternation sweeps per restart.
    #[arg(long = "max-sweeps")]
    max_sweeps: Option<usize>,
    /// Stop a restart when the residual drop falls below this.
    #[arg(long)]
    tol: Option<f64>,
    /// Metrics JSON destination (default: stdout, or stderr when the
    /// partition already claims stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Graph file in the edge-list format.
    #[arg(long)]
    graph: PathBuf,
    /// Node labels, one per line (default: `<graph>.labels` when present).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Partition TSV as written by `cluster`.
    #[arg(long)]
    partition: PathBuf,
    /// Thesaurus TSV for antonym/synonym counts.
    #[arg(long)]
    thesaurus: Option<PathBuf>,
    /// Gold classes TSV: `word<TAB>class`.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Rated pairs TSV: `word1<TAB>word2<TAB>rating`.
    #[arg(long)]
    simlex: Option<PathBuf>,
    /// Ratings strictly above this count as highly similar.
    #[arg(long = "high-cut")]
    high_cut: Option<f64>,
    /// Report raw synonym component totals instead of excess counts.
    #[arg(long = "ndc-raw")]
    ndc_raw: bool,
}

#[derive(Args)]
struct GridSearchArgs {
    /// Embeddings file: `word x1 x2 ... xd` per line.
    #[arg(long)]
    embeddings: PathBuf,
    /// Thesaurus TSV; enables the error/nne/ndc columns.
    #[arg(long)]
    thesaurus: Option<PathBuf>,
    /// Restrict to the words listed in this file (one per line).
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Comma-separated bandwidths, e.g. `0.1,0.2,0.5`.
    #[arg(long)]
    sigma: Option<String>,
    /// Comma-separated similarity cutoffs.
    #[arg(long)]
    thresh: Option<String>,
    /// Comma-separated cluster counts (required, here or in the config).
    #[arg(short, long)]
    k: Option<String>,
    /// Comma-separated weights on the similarity graph.
    #[arg(long)]
    gamma: Option<String>,
    /// Comma-separated weights on thesaurus constraints.
    #[arg(long)]
    beta: Option<String>,
    /// Comma-separated extra antonym weights.
    #[arg(long = "beta-ant")]
    beta_ant: Option<String>,
    /// Gold classes TSV; enables the purity/entropy columns.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Rounding restarts per cell.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of nodes.
    #[arg(long)]
    n: Option<usize>,
    /// Number of planted clusters.
    #[arg(short, long)]
    k: Option<usize>,
    /// In-cluster edge probability.
    #[arg(long = "p-in")]
    p_in: Option<f64>,
    /// Cross-cluster edge probability.
    #[arg(long = "p-out")]
    p_out: Option<f64>,
    /// Fraction of cross edges drawn negative.
    #[arg(long = "frac-neg")]
    frac_neg: Option<f64>,
    /// Minimum absolute edge weight.
    #[arg(long = "w-lo")]
    w_lo: Option<f64>,
    /// Maximum absolute edge weight.
    #[arg(long = "w-hi")]
    w_hi: Option<f64>,
    /// Ground-truth TSV destination (default: `<output>.truth.tsv`).
    #[arg(long = "truth-out")]
    truth_out: Option<PathBuf>,
    /// Also sweep these cluster counts and emit a `K,nne,ndc` CSV.
    #[arg(long)]
    curve: Option<String>,
    /// Curve CSV destination (default: stdout).
    #[arg(long = "curve-out")]
    curve_out: Option<PathBuf>,
    /// Rounding restarts used by the sweep.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Graph file in the edge-list format.
    #[arg(long)]
    graph: PathBuf,
    /// How many of the smallest eigenvalues to print (default: min(16, n)).
    #[arg(short, long)]
    k: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        let (kind, message) = match err.downcast_ref::<Error>() {
            Some(e) => (e.kind(), e.to_string()),
            None => ("error", format!("{err:#}")),
        };
        let line = serde_json::json!({ "error": kind, "message": message });
        eprintln!("{line}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let settings = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::empty(),
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => settings.u64("seed")?.unwrap_or(0),
    };
    let jobs = match cli.jobs {
        Some(j) => Some(j),
        None => settings.usize("jobs")?,
    };
    if let Some(0) = jobs {
        return Err(Error::BadParameter {
            name: "jobs",
            reason: "must be at least 1".to_string(),
        }
        .into());
    }
    let ctx = Ctx {
        settings,
        seed,
        output: cli.output,
    };
    let go = || -> anyhow::Result<()> {
        match cli.cmd {
            Cmd::BuildGraph(args) => cmd_build_graph(&ctx, args),
            Cmd::Cluster(args) => cmd_cluster(&ctx, args),
            Cmd::Evaluate(args) => cmd_evaluate(&ctx, args),
            Cmd::GridSearch(args) => cmd_grid_search(&ctx, args),
            Cmd::Synth(args) => cmd_synth(&ctx, args),
            Cmd::Spectrum(args) => cmd_spectrum(&ctx, args),
        }
    };
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .context("building worker pool")?;
            pool.install(go)
        }
        None => go(),
    }
}

struct Ctx {
    settings: Settings,
    seed: u64,
    output: Option<PathBuf>,
}

impl Ctx {
    fn require_output(&self, what: &str) -> anyhow::Result<&Path> {
        self.output.as_deref().ok_or_else(|| {
            Error::BadParameter {
                name: "output",
                reason: format!("{what} needs --output"),
            }
            .into()
        })
    }

    fn f64_setting(&self, flag: Option<f64>, key: &str, default: f64) -> anyhow::Result<f64> {
        Ok(match flag {
            Some(v) => v,
            None => self.settings.f64(key)?.unwrap_or(default),
        })
    }

    fn usize_setting(
        &self,
        flag: Option<usize>,
        key: &str,
        default: usize,
    ) -> anyhow::Result<usize> {
        Ok(match flag {
            Some(v) => v,
            None => self.settings.usize(key)?.unwrap_or(default),
        })
    }
}

fn sidecar_path(base: &Path, suffix: &str) -> PathBuf {
    let mut os = base.as_os_str().to_owned();
    os.push(suffix);
    PathBuf::from(os)
}

fn out_writer(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

/// Loads a graph and attaches labels from `--labels` or the default
/// `<graph>.labels` sidecar when it exists.
fn load_graph_with_labels(
    graph_path: &Path,
    labels: Option<&Path>,
) -> anyhow::Result<SignedGraph<f64>> {
    let mut g: SignedGraph<f64> = read_graph(graph_path)?;
    let label_path = match labels {
        Some(p) => Some(p.to_path_buf()),
        None => {
            let candidate = sidecar_path(graph_path, ".labels");
            candidate.exists().then_some(candidate)
        }
    };
    if let Some(p) = label_path {
        let ls = read_labels(&p)?;
        g.set_labels(Some(ls))?;
    }
    Ok(g)
}

fn parse_f64_list(raw: &str, name: &'static str) -> anyhow::Result<Vec<f64>> {
    let mut out = Vec::new();
    for tok in raw.split(',') {
        let t = tok.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t.parse().map_err(|e| Error::BadParameter {
            name,
            reason: format!("bad list entry {t:?}: {e}"),
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::BadParameter {
            name,
            reason: "empty list".to_string(),
        }
        .into());
    }
    Ok(out)
}

fn parse_usize_list(raw: &str, name: &'static str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in raw.split(',') {
        let t = tok.trim();
        if t.is_empty() {
            continue;
        }
        let v: usize = t.parse().map_err(|e| Error::BadParameter {
            name,
            reason: format!("bad list entry {t:?}: {e}"),
        })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::BadParameter {
            name,
            reason: "empty list".to_string(),
        }
        .into());
    }
    Ok(out)
}

fn read_vocab(path: &Path) -> anyhow::Result<HashSet<String>> {
    Ok(read_labels(path)?.into_iter().collect())
}

fn cmd_build_graph(ctx: &Ctx, args: BuildGraphArgs) -> anyhow::Result<()> {
    let defaults = KernelParams::<f64>::default();
    let params = KernelParams {
        sigma: ctx.f64_setting(args.sigma, "sigma", defaults.sigma)?,
        thresh: ctx.f64_setting(args.thresh, "thresh", defaults.thresh)?,
        gamma: ctx.f64_setting(args.gamma, "gamma", defaults.gamma)?,
        beta: ctx.f64_setting(args.beta, "beta", defaults.beta)?,
        beta_ant: ctx.f64_setting(args.beta_ant, "beta-ant", defaults.beta_ant)?,
    };
    // Reject bad parameters before touching any input file.
    params.validate()?;
    let output = ctx.require_output("build-graph")?;
    let vocab = match &args.vocab {
        Some(p) => Some(read_vocab(p)?),
        None => None,
    };
    let emb = load_embeddings::<f64>(&args.embeddings, vocab.as_ref())?;
    let thes = match &args.thesaurus {
        Some(p) => Some(read_thesaurus(p)?),
        None => None,
    };
    let (graph, build_report) = build_graph(&emb, thes.as_ref(), &params)?;
    let mut w = out_writer(Some(output))?;
    write_graph(&graph, &mut w)?;
    w.flush()?;
    let labels_path = args
        .labels_out
        .unwrap_or_else(|| sidecar_path(output, ".labels"));
    write_labels(emb.words(), &labels_path)?;
    println!("{}", serde_json::to_string_pretty(&build_report)?);
    Ok(())
}

fn cluster_opts(
    ctx: &Ctx,
    restarts: Option<usize>,
    max_sweeps: Option<usize>,
    tol: Option<f64>,
) -> anyhow::Result<ClusterOpts<f64>> {
    let defaults = ClusterOpts::<f64>::default();
    Ok(ClusterOpts {
        restarts: ctx.usize_setting(restarts, "restarts", defaults.restarts)?,
        max_sweeps: ctx.usize_setting(max_sweeps, "max-sweeps", defaults.max_sweeps)?,
        phi_tol: ctx.f64_setting(tol, "tol", defaults.phi_tol)?,
        eig_tol: ctx.f64_setting(None, "eig-tol", DEFAULT_EIG_TOL)?,
    })
}

fn cmd_cluster(ctx: &Ctx, args: ClusterArgs) -> anyhow::Result<()> {
    let k = match args.k {
        Some(k) => k,
        None => ctx
            .settings
            .usize("k")?
            .ok_or(Error::BadParameter {
                name: "k",
                reason: "cluster count is required (flag or config)".to_string(),
            })?,
    };
    let opts = cluster_opts(ctx, args.restarts, args.max_sweeps, args.tol)?;
    let g = load_graph_with_labels(&args.graph, args.labels.as_deref())?;
    let (partition, metrics) = cluster(&g, k, ctx.seed, &opts)?;
    let labels = g.labels_or_indices();
    let mut w = out_writer(ctx.output.as_deref())?;
    write_partition(&labels, &partition, &mut w)?;
    w.flush()?;
    let json = serde_json::to_string_pretty(&metrics)?;
    match (&args.report, &ctx.output) {
        (Some(path), _) => {
            let mut rw = out_writer(Some(path))?;
            writeln!(rw, "{json}")?;
            rw.flush()?;
        }
        (None, Some(_)) => println!("{json}"),
        // Partition already owns stdout; keep the report visible without
        // corrupting it.
        (None, None) => eprintln!("{json}"),
    }
    Ok(())
}

fn cmd_evaluate(ctx: &Ctx, args: EvaluateArgs) -> anyhow::Result<()> {
    let high_cut = ctx.f64_setting(args.high_cut, "high-cut", 8.0)?;
    let g = load_graph_with_labels(&args.graph, args.labels.as_deref())?;
    let labels = g.labels_or_indices();
    let (words, raw_ids) = read_partition(&args.partition)?;
    if words.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: words.len(),
        }
        .into());
    }
    let mut cluster_of: HashMap<&str, usize> = HashMap::with_capacity(words.len());
    for (w, &c) in words.iter().zip(raw_ids.iter()) {
        if cluster_of.insert(w.as_str(), c).is_some() {
            return Err(Error::DuplicateLabel(w.clone()).into());
        }
    }
    let mut raw_in_order = Vec::with_capacity(labels.len());
    for l in &labels {
        match cluster_of.get(l.as_str()) {
            Some(&c) => raw_in_order.push(c),
            None => {
                return Err(Error::BadParameter {
                    name: "partition",
                    reason: format!("node {l:?} missing from the partition file"),
                }
                .into())
            }
        }
    }
    let partition: Partition = partition_from_raw(&raw_in_order)?;
    let thes = match &args.thesaurus {
        Some(p) => Some(read_thesaurus(p)?),
        None => None,
    };
    let gold: Option<GoldClasses> = match &args.gold {
        Some(p) => Some(read_gold_classes(p)?),
        None => None,
    };
    let simlex: Option<SimilarityPairs> = match &args.simlex {
        Some(p) => Some(read_similarity_pairs(p)?),
        None => None,
    };
    let opts = ReportOpts {
        high_cut,
        ndc_raw: args.ndc_raw,
    };
    let rep = report(
        &g,
        &partition,
        thes.as_ref(),
        gold.as_ref(),
        simlex.as_ref(),
        &opts,
    )?;
    let mut w = out_writer(ctx.output.as_deref())?;
    writeln!(w, "{}", serde_json::to_string_pretty(&rep)?)?;
    w.flush()?;
    Ok(())
}

struct GridCell {
    params: KernelParams<f64>,
    k: usize,
    error: Option<f64>,
    purity: Option<f64>,
    entropy: Option<f64>,
    nne: Option<usize>,
    ndc: Option<usize>,
    sncut: f64,
}

fn cmd_grid_search(ctx: &Ctx, args: GridSearchArgs) -> anyhow::Result<()> {
    let defaults = KernelParams::<f64>::default();
    let list = |flag: &Option<String>, key: &'static str, dflt: f64| -> anyhow::Result<Vec<f64>> {
        let raw = match flag {
            Some(s) => Some(s.clone()),
            None => ctx.settings.string(key),
        };
        match raw {
            Some(s) => parse_f64_list(&s, key),
            None => Ok(vec![dflt]),
        }
    };
    let sigmas = list(&args.sigma, "sigma", defaults.sigma)?;
    let threshes = list(&args.thresh, "thresh", defaults.thresh)?;
    let gammas = list(&args.gamma, "gamma", defaults.gamma)?;
    let betas = list(&args.beta, "beta", defaults.beta)?;
    let beta_ants = list(&args.beta_ant, "beta-ant", defaults.beta_ant)?;
    let ks_raw = match &args.k {
        Some(s) => s.clone(),
        None => ctx.settings.string("k").ok_or(Error::BadParameter {
            name: "k",
            reason: "cluster count list is required (flag or config)".to_string(),
        })?,
    };
    let ks = parse_usize_list(&ks_raw, "k")?;
    let opts = cluster_opts(ctx, args.restarts, None, None)?;

    // Validate the whole grid before any file IO.
    let mut groups: Vec<KernelParams<f64>> = Vec::new();
    for &sigma in &sigmas {
        for &thresh in &threshes {
            for &gamma in &gammas {
                for &beta in &betas {
                    for &beta_ant in &beta_ants {
                        let p = KernelParams {
                            sigma,
                            thresh,
                            gamma,
                            beta,
                            beta_ant,
                        };
                        p.validate()?;
                        groups.push(p);
                    }
                }
            }
        }
    }

    let vocab = match &args.vocab {
        Some(p) => Some(read_vocab(p)?),
        None => None,
    };
    let emb = load_embeddings::<f64>(&args.embeddings, vocab.as_ref())?;
    let thes = match &args.thesaurus {
        Some(p) => Some(read_thesaurus(p)?),
        None => None,
    };
    let gold = match &args.gold {
        Some(p) => Some(read_gold_classes(p)?),
        None => None,
    };
    eprintln!(
        "grid-search: {} cells ({} graphs x {} cluster counts) over {} words",
        groups.len() * ks.len(),
        groups.len(),
        ks.len(),
        emb.n()
    );
    let seed = ctx.seed;
    let cells: Vec<GridCell> = groups
        .par_iter()
        .map(|params| -> anyhow::Result<Vec<GridCell>> {
            let (graph, _) = build_graph(&emb, thes.as_ref(), params)?;
            let labels = graph.labels_or_indices();
            let mut out = Vec::with_capacity(ks.len());
            for &k in &ks {
                let (partition, _) = cluster(&graph, k, seed, &opts)?;
                let mut cell = GridCell {
                    params: *params,
                    k,
                    error: None,
                    purity: None,
                    entropy: None,
                    nne: None,
                    ndc: None,
                    sncut: graph.sncut(&partition)?,
                };
                if let Some(t) = thes.as_ref() {
                    let nne = sncut::metrics::count_nne(&partition, t, &labels)?;
                    let ndc = sncut::metrics::count_ndc(&partition, t, &labels)?;
                    cell.nne = Some(nne);
                    cell.ndc = Some(ndc);
                    cell.error = Some((nne + ndc) as f64 / graph.n() as f64);
                }
                if let Some(gc) = gold.as_ref() {
                    cell.purity = Some(sncut::metrics::purity(&partition, gc, &labels)?);
                    cell.entropy = Some(sncut::metrics::entropy(&partition, gc, &labels)?);
                }
                out.push(cell);
            }
            Ok(out)
        })
        .collect::<anyhow::Result<Vec<Vec<GridCell>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut cells = cells;
    cells.sort_by(|a, b| {
        let ea = a.error.unwrap_or(f64::INFINITY);
        let eb = b.error.unwrap_or(f64::INFINITY);
        ea.partial_cmp(&eb)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| key_of(a).partial_cmp(&key_of(b)).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut w = out_writer(ctx.output.as_deref())?;
    writeln!(
        w,
        "sigma,thresh,K,gamma,beta,beta_ant,error,purity,entropy,nne,ndc,sncut"
    )?;
    for c in &cells {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            c.params.sigma,
            c.params.thresh,
            c.k,
            c.params.gamma,
            c.params.beta,
            c.params.beta_ant,
            opt_str(&c.error),
            opt_str(&c.purity),
            opt_str(&c.entropy),
            opt_str(&c.nne),
            opt_str(&c.ndc),
            c.sncut
        )?;
    }
    w.flush()?;
    eprintln!("grid-search: done ({} rows)", cells.len());
    Ok(())
}

fn key_of(c: &GridCell) -> (f64, f64, usize, f64, f64, f64) {
    (
        c.params.sigma,
        c.params.thresh,
        c.k,
        c.params.gamma,
        c.params.beta,
        c.params.beta_ant,
    )
}

fn opt_str<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => String::new(),
    }
}

fn cmd_synth(ctx: &Ctx, args: SynthArgs) -> anyhow::Result<()> {
    let defaults = PlantedConfig::default();
    let cfg = PlantedConfig {
        n: ctx.usize_setting(args.n, "n", defaults.n)?,
        k: ctx.usize_setting(args.k, "k", defaults.k)?,
        p_in: ctx.f64_setting(args.p_in, "p-in", defaults.p_in)?,
        p_out: ctx.f64_setting(args.p_out, "p-out", defaults.p_out)?,
        frac_neg_out: ctx.f64_setting(args.frac_neg, "frac-neg", defaults.frac_neg_out)?,
        w_lo: ctx.f64_setting(args.w_lo, "w-lo", defaults.w_lo)?,
        w_hi: ctx.f64_setting(args.w_hi, "w-hi", defaults.w_hi)?,
        seed: ctx.seed,
    };
    cfg.validate()?;
    let output = ctx.require_output("synth")?;
    let planted = generate_planted::<f64>(&cfg)?;
    let mut w = out_writer(Some(output))?;
    write_graph(&planted.graph, &mut w)?;
    w.flush()?;
    let labels = planted.graph.labels_or_indices();
    write_labels(&labels, sidecar_path(output, ".labels"))?;
    let truth_path = args
        .truth_out
        .unwrap_or_else(|| sidecar_path(output, ".truth.tsv"));
    let mut tw = BufWriter::new(File::create(&truth_path)?);
    write_partition(&labels, &planted.truth, &mut tw)?;
    tw.flush()?;
    let summary = serde_json::json!({
        "n": planted.graph.n(),
        "k": cfg.k,
        "edges": planted.graph.edge_count(),
        "negative_edges": planted.graph.negative_edge_count(),
        "patched_nodes": planted.patched.len(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if let Some(raw) = &args.curve {
        let ks = parse_usize_list(raw, "curve")?;
        let opts = cluster_opts(ctx, args.restarts, None, None)?;
        let points = nne_ndc_curve(&planted.graph, None, &ks, ctx.seed, &opts)?;
        let csv = curve_csv(&points);
        let mut cw = out_writer(args.curve_out.as_deref())?;
        cw.write_all(csv.as_bytes())?;
        cw.flush()?;
    }
    Ok(())
}

fn cmd_spectrum(ctx: &Ctx, args: SpectrumArgs) -> anyhow::Result<()> {
    let g = load_graph_with_labels(&args.graph, None)?;
    let k = match args.k {
        Some(k) => k,
        None => ctx.settings.usize("k")?.unwrap_or_else(|| g.n().min(16)),
    };
    let l = g.normalized_signed_laplacian()?;
    let tol = ctx.f64_setting(None, "eig-tol", DEFAULT_EIG_TOL)?;
    let (values, _) = smallest_eigenpairs(&l, k, tol, ctx.seed)?;
    let mut w = out_writer(ctx.output.as_deref())?;
    w.write_all(spectrum_csv(&values).as_bytes())?;
    w.flush()?;
    Ok(())
}

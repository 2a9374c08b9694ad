//! The `toporeg` command-line tool.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toporeg_core::embeddings::EmbeddingModel;
use toporeg_core::trajectory::cycle_projection;
use toporeg_core::{alpha_filtration, compute_persistence, PointCloud};

use crate::config::{parse_loss_spec, BackendJson, DataSource, LossSpecJson, MethodJson, OptimizerJson, RunConfig};
use crate::experiment::{build_model, load_data, optimize, report_rows, write_report, AnyModel, Input};
use crate::generate::{generate_bifurcation, generate_circle, generate_clusters, FOUR_CORNERS};
use crate::io::{
    align_labels, default_ids, feature_names, fmt_f64, pseudotime_rows, read_diagrams, read_labels, read_points, read_text, read_trace,
    write_diagrams, write_edge_list, write_labels, write_matrix, write_points, write_pseudotime, write_text,
};
use crate::karate::load_karate;
use crate::plot::{diagram_svg, scatter_svg, trace_svg};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "toporeg", version, about = "Topologically regularized data embeddings")]
pub struct Cli {
    /// Seed of every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving the output files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Fill the `seconds` column of traces with elapsed wall-clock time
    /// instead of zeros.
    #[arg(long, global = true)]
    pub wall_clock: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset or the bundled Karate network.
    Generate(GenerateArgs),
    /// Persistence diagrams of a point CSV.
    Persistence {
        /// Point CSV with columns `id,x,y`.
        #[arg(long)]
        input: PathBuf,
        /// Highest homology dimension, 0 or 1.
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
    },
    /// Optimize the coordinates of a point CSV for a topological loss.
    Optimize {
        /// Point CSV with columns `id,x,y`.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Fit an embedding backend, optionally topologically regularized.
    Embed {
        /// Embedding backend; required unless given by `--config`.
        #[arg(long, value_enum)]
        backend: Option<BackendName>,
        /// Data matrix CSV for linear/neighbor, edge list for graph backends.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Run configuration JSON; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Circular pseudotime of an embedding CSV.
    Pseudotime {
        /// Embedding CSV with columns `id,x,y`.
        #[arg(long)]
        input: PathBuf,
    },
    /// Render SVG figures from CSV outputs.
    Plot {
        /// Embedding CSV rendered as `scatter.svg`.
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// `id,label` CSV used to color the scatter plot.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Diagram CSV rendered as `diagram.svg`.
        #[arg(long)]
        diagram: Option<PathBuf>,
        /// Trace CSV rendered as `trace.svg`.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Ordinary, topology-only and regularized runs of each configuration,
    /// summarized in `report.csv`.
    Report {
        /// Run configuration JSON; repeat for several rows.
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendName {
    Linear,
    Neighbor,
    RandomWalk,
    InnerProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Plain,
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dataset {
    Circle,
    Clusters,
    Bifurcation,
    Karate,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub dataset: Dataset,
    /// Number of circle points.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Dimension of the space the circle is embedded in.
    #[arg(long, default_value_t = 500)]
    pub ambient_dim: usize,
    /// Half-width of the uniform noise in the extra dimensions.
    #[arg(long, default_value_t = 0.45)]
    pub noise: f64,
    /// Cluster centers as `x,y;x,y;...` (default: corners of a square of side 4).
    #[arg(long)]
    pub centers: Option<String>,
    /// Points drawn around each cluster center.
    #[arg(long, default_value_t = 25)]
    pub points_per_cluster: usize,
    /// Standard deviation of each cluster.
    #[arg(long, default_value_t = 0.5)]
    pub spread: f64,
    /// Points per arm of the bifurcation.
    #[arg(long, default_value_t = 30)]
    pub arm_points: usize,
}

#[derive(Debug, Args, Default)]
pub struct OptFlags {
    /// Loss spec JSON file.
    #[arg(long)]
    pub topo_spec: Option<PathBuf>,
    /// Weight of the topological loss.
    #[arg(long)]
    pub lambda_top: Option<f64>,
    /// Learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Number of optimization epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Drop the embedding loss and optimize the topological loss alone.
    #[arg(long)]
    pub topo_only: bool,
    /// Descent method (default plain).
    #[arg(long, value_enum)]
    pub method: Option<MethodName>,
    /// Record a trace row every this many epochs.
    #[arg(long)]
    pub record_every: Option<usize>,
}

impl OptFlags {
    fn apply(&self, config: &mut RunConfig) -> Result<()> {
        if let Some(path) = &self.topo_spec {
            let spec = parse_loss_spec(&read_text(path)?)?;
            config.topo_spec = Some(LossSpecJson::from_spec(&spec));
        }
        let o = &mut config.optimizer;
        if let Some(v) = self.lambda_top {
            o.lambda_top = v;
        }
        if let Some(v) = self.lr {
            o.learning_rate = v;
        }
        if let Some(v) = self.epochs {
            o.epochs = v;
        }
        if self.topo_only {
            o.topo_only = true;
        }
        if let Some(m) = self.method {
            o.method = match m {
                MethodName::Plain => MethodJson::Plain,
                MethodName::Adam => MethodJson::Adam,
            };
        }
        if let Some(v) = self.record_every {
            o.record_every = v;
        }
        Ok(())
    }
}

fn backend_json(name: BackendName) -> Result<BackendJson> {
    BackendJson::by_name(match name {
        BackendName::Linear => "linear",
        BackendName::Neighbor => "neighbor",
        BackendName::RandomWalk => "random_walk",
        BackendName::InnerProduct => "inner_product",
    })
}

fn parse_centers(text: &str) -> Result<Vec<[f64; 2]>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (x, y) = pair.split_once(',').ok_or_else(|| Error::Config(format!("center `{pair}` is not `x,y`")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("`{s}` is not a number")));
            Ok([num(x)?, num(y)?])
        })
        .collect()
}

struct Context {
    seed: u64,
    out_dir: PathBuf,
    start: Option<Instant>,
}

impl Context {
    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn clock(&self) -> impl FnMut() -> f64 + '_ {
        move || self.start.map_or(0.0, |s| s.elapsed().as_secs_f64())
    }
}

/// Parses arguments and runs the command. Errors come back to the caller.
pub fn run(cli: Cli) -> Result<()> {
    let ctx = Context {
        seed: cli.seed.unwrap_or(0),
        out_dir: cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
        start: cli.wall_clock.then(Instant::now),
    };
    match &cli.command {
        Command::Generate(args) => generate(&ctx, args),
        Command::Persistence { input, max_dim } => persistence(&ctx, input, *max_dim),
        Command::Optimize { input, opt } => {
            let mut config = RunConfig {
                experiment: "optimize".into(),
                data: DataSource::Points { path: input.clone() },
                backend: BackendJson::Points {},
                topo_spec: None,
                optimizer: OptimizerJson::default(),
                seed: ctx.seed,
                out_dir: None,
            };
            opt.apply(&mut config)?;
            embed(&ctx, config)
        }
        Command::Embed { backend, input, config, opt } => {
            let mut run_config = match config {
                Some(path) => RunConfig::parse(&read_text(path)?)?,
                None => {
                    let name = backend.ok_or_else(|| Error::Config("embed needs --backend or --config".into()))?;
                    let path = input.clone().ok_or_else(|| Error::Config("embed needs --input or --config".into()))?;
                    let data = match name {
                        BackendName::Linear | BackendName::Neighbor => DataSource::Matrix { path },
                        BackendName::RandomWalk | BackendName::InnerProduct => DataSource::Edges { path },
                    };
                    RunConfig {
                        experiment: "embed".into(),
                        data,
                        backend: backend_json(name)?,
                        topo_spec: None,
                        optimizer: OptimizerJson::default(),
                        seed: ctx.seed,
                        out_dir: None,
                    }
                }
            };
            if config.is_some() {
                if let Some(name) = backend {
                    if backend_json(*name)?.name() != run_config.backend.name() {
                        run_config.backend = backend_json(*name)?;
                    }
                }
                if let Some(path) = input {
                    run_config.data = match run_config.backend {
                        BackendJson::RandomWalk { .. } | BackendJson::InnerProduct {} => DataSource::Edges { path: path.clone() },
                        _ => DataSource::Matrix { path: path.clone() },
                    };
                }
                if let Some(seed) = cli.seed {
                    run_config.seed = seed;
                }
            }
            opt.apply(&mut run_config)?;
            let ctx = match (&cli.out_dir, &run_config.out_dir) {
                (None, Some(dir)) => Context { out_dir: dir.clone(), ..ctx },
                _ => ctx,
            };
            embed(&ctx, run_config)
        }
        Command::Pseudotime { input } => pseudotime(&ctx, input),
        Command::Plot { embedding, labels, diagram, trace } => {
            plot(&ctx, embedding.as_deref(), labels.as_deref(), diagram.as_deref(), trace.as_deref())
        }
        Command::Report { configs } => {
            let mut rows = Vec::new();
            for path in configs {
                let mut config = RunConfig::parse(&read_text(path)?)?;
                if let Some(seed) = cli.seed {
                    config.seed = seed;
                }
                rows.extend(report_rows(&config)?);
            }
            write_report(&ctx.out("report.csv"), &rows)
        }
    }
}

fn generate(ctx: &Context, args: &GenerateArgs) -> Result<()> {
    match args.dataset {
        Dataset::Circle => {
            let c = generate_circle(args.n, args.ambient_dim, args.noise, ctx.seed)?;
            write_matrix(&ctx.out("data.csv"), &feature_names(c.data.ncols()), &c.data)?;
            let ids = default_ids(args.n);
            let rows = ids.iter().zip(&c.angles).map(|(id, a)| format!("{id},{}\n", fmt_f64(*a))).collect::<String>();
            write_text(&ctx.out("angles.csv"), &format!("id,angle\n{rows}"))
        }
        Dataset::Clusters => {
            let centers = match &args.centers {
                Some(text) => parse_centers(text)?,
                None => FOUR_CORNERS.to_vec(),
            };
            let c = generate_clusters(&centers, args.points_per_cluster, args.spread, ctx.seed)?;
            let ids = default_ids(c.points.len());
            write_points(&ctx.out("points.csv"), &ids, &c.points)?;
            write_labels(&ctx.out("labels.csv"), &ids, &c.labels)
        }
        Dataset::Bifurcation => {
            let b = generate_bifurcation(args.arm_points, args.ambient_dim, args.noise, ctx.seed)?;
            write_matrix(&ctx.out("data.csv"), &feature_names(b.data.ncols()), &b.data)?;
            write_labels(&ctx.out("labels.csv"), &default_ids(b.data.nrows()), &b.labels)
        }
        Dataset::Karate => {
            let k = load_karate()?;
            write_edge_list(&ctx.out("edges.txt"), &k.names, &k.graph)?;
            write_labels(&ctx.out("labels.csv"), &k.names, &k.labels)
        }
    }
}

fn persistence(ctx: &Context, input: &Path, max_dim: usize) -> Result<()> {
    if max_dim > 1 {
        return Err(Error::Config(format!("max_dim must be 0 or 1, got {max_dim}")));
    }
    let points = read_points(input)?;
    let cloud = PointCloud::with_ids(points.points, Some(points.ids))?;
    let pers = compute_persistence(&alpha_filtration(&cloud)?, max_dim);
    write_diagrams(&ctx.out("diagram.csv"), &pers.diagrams)
}

fn embed(ctx: &Context, config: RunConfig) -> Result<()> {
    config.validate()?;
    let spec = config.spec()?;
    let data = load_data(&config.data, config.seed)?;
    let model = build_model(&config.backend, &data, config.seed)?;
    let opt = config.optimizer.to_config(config.seed);
    let mut clock = ctx.clock();
    let outcome = optimize(model, spec.as_ref(), &opt, &mut clock)?;
    write_points(&ctx.out("embedding.csv"), &data.ids, &outcome.output.embedding)?;
    crate::io::write_trace(&ctx.out("trace.csv"), &outcome.output.trace.rows)?;
    if let (AnyModel::Linear(m), Input::Matrix(x)) = (&outcome.model, &data.input) {
        let importance = toporeg_core::embeddings::feature_importance(m.loadings());
        let w = m.loadings();
        let mut text = String::from("feature,w1,w2,importance\n");
        for (f, name) in x.features.iter().enumerate() {
            text.push_str(&format!("{name},{},{},{}\n", fmt_f64(w[(f, 0)]), fmt_f64(w[(f, 1)]), fmt_f64(importance[f])));
        }
        write_text(&ctx.out("loadings.csv"), &text)?;
    }
    if let Some(labels) = &data.labels {
        write_labels(&ctx.out("labels.csv"), &data.ids, labels)?;
    }
    debug_assert_eq!(outcome.model.parameters(), &outcome.output.parameters[..]);
    write_text(&ctx.out("config.json"), &(config.to_json() + "\n"))
}

fn pseudotime(ctx: &Context, input: &Path) -> Result<()> {
    let points = read_points(input)?;
    let ids = points.ids.clone();
    let projection = cycle_projection(&PointCloud::with_ids(points.points, Some(points.ids))?)?;
    write_pseudotime(&ctx.out("pseudotime.csv"), &pseudotime_rows(&ids, &projection))
}

fn plot(ctx: &Context, embedding: Option<&Path>, labels: Option<&Path>, diagram: Option<&Path>, trace: Option<&Path>) -> Result<()> {
    if embedding.is_none() && diagram.is_none() && trace.is_none() {
        return Err(Error::Config("plot needs at least one of --embedding, --diagram, --trace".into()));
    }
    let mut figures = Vec::new();
    if let Some(path) = embedding {
        let points = read_points(path)?;
        let aligned = match labels {
            Some(lp) => Some(align_labels(lp, &points.ids, &read_labels(lp)?)?),
            None => None,
        };
        figures.push(("scatter.svg", scatter_svg("embedding", &points.points, aligned.as_deref())));
    }
    if let Some(path) = diagram {
        figures.push(("diagram.svg", diagram_svg("persistence diagram", &read_diagrams(path)?)));
    }
    if let Some(path) = trace {
        figures.push(("trace.svg", trace_svg("loss trace", &read_trace(path)?)));
    }
    for (name, svg) in figures {
        write_text(&ctx.out(name), &svg)?;
    }
    Ok(())
}

/// One-line JSON description of an error, for standard error.
pub fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

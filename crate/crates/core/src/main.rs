use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use hiddenlink::attack::{
    attack, budget_from_fraction, pagerank, single_index_weights, weight_graph, weighted_pagerank, write_attack_csv,
    AttackOptions, PageRankParams, Strategy,
};
use hiddenlink::config::{parse_fractions, RunConfig};
use hiddenlink::corruption::{correlate_structure_vs_auc, run_corruption_experiment, write_corruption_csv, CorruptionOptions};
use hiddenlink::dataset::{
    build_dataset, generate, read_feature_csv, split, write_feature_csv, Dataset, DatasetManifest, DatasetShape,
    PowerLawGraphConfig,
};
use hiddenlink::eval::{evaluate, forward_select, hidden_link_probability_by_distance};
use hiddenlink::gbm::{load_model, save_model, train_on, GbmModel};
use hiddenlink::graph::{
    compute_stats, degree_distribution, fit_power_law, load_edge_list, write_edge_list, Edge, Graph, LoadedGraph,
};
use hiddenlink::metrics::{features_batch, Metric};
use hiddenlink::{Error, Result};

#[derive(Parser)]
#[command(name = "hiddenlink", version, about = "Link prediction and network destruction toolkit")]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving all artifacts (default: current directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct GraphArg {
    /// Edge list: two integer ids per line, `#` comments.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args, Default)]
struct GbmArgs {
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    n_trees: Option<usize>,
    #[arg(long)]
    min_leaf: Option<usize>,
    #[arg(long)]
    n_bins: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Structural summary of a graph.
    Stats {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        diameter_sample: Option<usize>,
    },
    /// Power-law fit of the degree sequence.
    FitPowerlaw {
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Random graph with a power-law degree sequence.
    GenGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        min_degree: usize,
        #[arg(long, default_value_t = 0.0)]
        triangle_prob: f64,
        #[arg(long, default_value = "graph.tsv")]
        output: String,
    },
    /// Labeled feature dataset with a stratified train/test split.
    BuildDataset {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        positive_cap: Option<usize>,
        #[arg(long)]
        negatives_per_positive: Option<usize>,
        #[arg(long)]
        train_fraction: Option<f64>,
    },
    /// Fit a boosted-tree model on a feature CSV.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated feature names (default: all eight).
        #[arg(long)]
        features: Option<String>,
        #[arg(long, default_value = "model.json")]
        output: String,
        #[command(flatten)]
        gbm: GbmArgs,
    },
    /// ROC analysis of a model on a feature CSV.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
    },
    /// Greedy forward feature selection.
    SelectFeatures {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        gbm: GbmArgs,
    },
    /// Mean predicted probability of non-edges by hop distance.
    HiddenByDistance {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        d_min: Option<u32>,
        #[arg(long)]
        d_max: Option<u32>,
        #[arg(long)]
        count_per_d: Option<usize>,
    },
    /// Edge-removal experiment over a grid of fractions.
    CorruptExperiment {
        #[command(flatten)]
        graph: GraphArg,
        /// `start:stop:step` or a comma list.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        nested: bool,
        #[arg(long)]
        diameter_sample: Option<usize>,
        #[arg(long)]
        positive_cap: Option<usize>,
        #[command(flatten)]
        gbm: GbmArgs,
    },
    /// PageRank scores, optionally weighted by a model or a single index.
    Pagerank {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, conflicts_with = "index")]
        model: Option<PathBuf>,
        #[arg(long)]
        index: Option<String>,
        #[arg(long)]
        damping: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Node-removal attack simulation, one trace per strategy.
    Attack {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Comma-separated strategies (default: all that the inputs allow).
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long, conflicts_with = "budget_fraction")]
        budget: Option<usize>,
        #[arg(long)]
        budget_fraction: Option<f64>,
        #[arg(long)]
        measure_every: Option<usize>,
        #[arg(long)]
        diameter_sample: Option<usize>,
        #[arg(long)]
        hybrid_lookahead: Option<usize>,
        #[arg(long)]
        hybrid_commit: Option<usize>,
    },
    /// Score node pairs, or rank distance-2 non-edges.
    PredictEdges {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        model: Option<PathBuf>,
        /// File with two node ids per line.
        #[arg(long, conflicts_with = "top_k", required_unless_present = "top_k")]
        pairs: Option<PathBuf>,
        #[arg(long)]
        top_k: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Stats { .. } => "stats",
            Command::FitPowerlaw { .. } => "fit-powerlaw",
            Command::GenGraph { .. } => "gen-graph",
            Command::BuildDataset { .. } => "build-dataset",
            Command::Train { .. } => "train",
            Command::Evaluate { .. } => "evaluate",
            Command::SelectFeatures { .. } => "select-features",
            Command::HiddenByDistance { .. } => "hidden-by-distance",
            Command::CorruptExperiment { .. } => "corrupt-experiment",
            Command::Pagerank { .. } => "pagerank",
            Command::Attack { .. } => "attack",
            Command::PredictEdges { .. } => "predict-edges",
        }
    }

    fn stochastic(&self) -> bool {
        matches!(
            self,
            Command::Stats { .. }
                | Command::GenGraph { .. }
                | Command::BuildDataset { .. }
                | Command::HiddenByDistance { .. }
                | Command::CorruptExperiment { .. }
                | Command::Attack { .. }
        )
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(cli) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            // a closed pipe only loses the summary; artifacts are already written
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {name} failed: {e}");
            ExitCode::FAILURE
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_gbm(config: &mut RunConfig, gbm: &GbmArgs) {
    set(&mut config.max_depth, gbm.max_depth);
    set(&mut config.n_trees, gbm.n_trees);
    set(&mut config.min_leaf, gbm.min_leaf);
    set(&mut config.n_bins, gbm.n_bins);
    set(&mut config.learning_rate, gbm.learning_rate);
}

struct Context {
    config: RunConfig,
    out_dir: PathBuf,
}

impl Context {
    fn seed(&self) -> Result<u64> {
        self.config
            .seed
            .ok_or_else(|| Error::InvalidArgument("--seed is required for this command".into()))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn graph(&self) -> Result<LoadedGraph> {
        let path = self
            .config
            .graph
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("--graph is required".into()))?;
        load_edge_list(path)
    }

    fn model(&self) -> Result<GbmModel> {
        let path = self
            .config
            .model
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("--model is required".into()))?;
        load_model(path)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name);
        File::create(&path).map(BufWriter::new).map_err(|e| Error::io(&path, e))
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    fn finish(&self, mut w: BufWriter<File>, name: &str) -> Result<PathBuf> {
        let path = self.path(name);
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(io_err(path))?;
    let samples = read_feature_csv(BufReader::new(file))?;
    Ok(Dataset {
        samples,
        source_graph_id: String::new(),
        seed: 0,
    })
}

fn run(cli: Cli) -> Result<serde_json::Value> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut config.seed, cli.seed.map(Some));
    set(&mut config.out_dir, cli.out_dir.map(Some));
    let out_dir = config.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;

    match &cli.command {
        Command::Stats { graph, diameter_sample }
        | Command::CorruptExperiment { graph, diameter_sample, .. }
        | Command::Attack { graph, diameter_sample, .. } => {
            set(&mut config.graph, graph.graph.clone().map(Some));
            set(&mut config.diameter_sample, *diameter_sample);
        }
        Command::FitPowerlaw { graph }
        | Command::BuildDataset { graph, .. }
        | Command::HiddenByDistance { graph, .. }
        | Command::Pagerank { graph, .. }
        | Command::PredictEdges { graph, .. } => set(&mut config.graph, graph.graph.clone().map(Some)),
        _ => {}
    }
    match &cli.command {
        Command::Evaluate { model, .. }
        | Command::HiddenByDistance { model, .. }
        | Command::Pagerank { model, .. }
        | Command::Attack { model, .. }
        | Command::PredictEdges { model, .. } => set(&mut config.model, model.clone().map(Some)),
        _ => {}
    }
    match &cli.command {
        Command::Train { gbm, .. } | Command::SelectFeatures { gbm, .. } | Command::CorruptExperiment { gbm, .. } => {
            apply_gbm(&mut config, gbm)
        }
        _ => {}
    }

    let ctx = Context { config, out_dir };
    if cli.command.stochastic() {
        ctx.seed()?;
    }
    ctx.write_json("run_config.json", &ctx.config)?;

    match cli.command {
        Command::Stats { .. } => stats(&ctx),
        Command::FitPowerlaw { .. } => fit(&ctx),
        Command::GenGraph { n, alpha, min_degree, triangle_prob, output } => {
            gen_graph(&ctx, PowerLawGraphConfig { n, alpha, min_degree, triangle_prob }, &output)
        }
        Command::BuildDataset { positive_cap, negatives_per_positive, train_fraction, .. } => {
            let mut ctx = ctx;
            set(&mut ctx.config.positive_cap, positive_cap.map(Some));
            set(&mut ctx.config.negatives_per_positive, negatives_per_positive);
            set(&mut ctx.config.train_fraction, train_fraction);
            build(&ctx)
        }
        Command::Train { data, features, output, .. } => train_cmd(&ctx, &data, features.as_deref(), &output),
        Command::Evaluate { data, .. } => evaluate_cmd(&ctx, &data),
        Command::SelectFeatures { train, test, epsilon, .. } => {
            let mut ctx = ctx;
            set(&mut ctx.config.epsilon, epsilon);
            select(&ctx, &train, &test)
        }
        Command::HiddenByDistance { d_min, d_max, count_per_d, .. } => {
            let mut ctx = ctx;
            set(&mut ctx.config.d_min, d_min);
            set(&mut ctx.config.d_max, d_max);
            set(&mut ctx.config.count_per_d, count_per_d);
            hidden(&ctx)
        }
        Command::CorruptExperiment { p, nested, positive_cap, .. } => {
            let mut ctx = ctx;
            if let Some(p) = p {
                ctx.config.p_values = parse_fractions(&p)?;
            }
            ctx.config.nested |= nested;
            set(&mut ctx.config.positive_cap, positive_cap.map(Some));
            corrupt(&ctx)
        }
        Command::Pagerank { index, damping, tol, max_iter, .. } => {
            let mut ctx = ctx;
            set(&mut ctx.config.damping, damping);
            set(&mut ctx.config.tol, tol);
            set(&mut ctx.config.max_iter, max_iter);
            pagerank_cmd(&ctx, index.as_deref())
        }
        Command::Attack {
            strategy,
            budget,
            budget_fraction,
            measure_every,
            hybrid_lookahead,
            hybrid_commit,
            ..
        } => {
            let mut ctx = ctx;
            set(&mut ctx.config.budget, budget.map(Some));
            if let Some(f) = budget_fraction {
                ctx.config.budget_fraction = f;
                ctx.config.budget = None;
            }
            set(&mut ctx.config.measure_every, measure_every);
            set(&mut ctx.config.hybrid_lookahead, hybrid_lookahead);
            set(&mut ctx.config.hybrid_commit, hybrid_commit);
            attack_cmd(&ctx, strategy.as_deref())
        }
        Command::PredictEdges { pairs, top_k, .. } => predict_edges(&ctx, pairs.as_deref(), top_k),
    }
}

fn stats(ctx: &Context) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let stats = compute_stats(&loaded.graph, ctx.config.diameter_sample, ctx.seed()?)?;
    ctx.write_json("stats.json", &stats)?;
    let mut w = ctx.create("degree_distribution.csv")?;
    let path = ctx.path("degree_distribution.csv");
    writeln!(w, "degree,count,ccdf").map_err(io_err(&path))?;
    for bin in degree_distribution(&loaded.graph) {
        writeln!(w, "{},{},{}", bin.degree, bin.count, bin.ccdf).map_err(io_err(&path))?;
    }
    ctx.finish(w, "degree_distribution.csv")?;
    Ok(serde_json::to_value(stats)?)
}

fn fit(ctx: &Context) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let degrees: Vec<u64> = loaded.graph.degrees().into_iter().map(|k| k as u64).collect();
    let fit = fit_power_law(&degrees)?;
    ctx.write_json("powerlaw.json", &fit)?;
    Ok(serde_json::to_value(fit)?)
}

fn gen_graph(ctx: &Context, config: PowerLawGraphConfig, output: &str) -> Result<serde_json::Value> {
    let g = generate(&config, ctx.seed()?)?;
    let mut w = ctx.create(output)?;
    let path = ctx.path(output);
    write_edge_list(&g, None, &mut w).map_err(io_err(&path))?;
    ctx.finish(w, output)?;
    let degrees: Vec<u64> = g.degrees().into_iter().map(|k| k as u64).collect();
    let refit = fit_power_law(&degrees).ok();
    Ok(json!({
        "path": path,
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "isolated_nodes": degrees.iter().filter(|&&k| k == 0).count(),
        "fitted_alpha": refit.map(|f| f.alpha),
        "fitted_x_min": refit.map(|f| f.x_min),
    }))
}

fn write_dataset(ctx: &Context, name: &str, data: &Dataset, loaded: &LoadedGraph) -> Result<PathBuf> {
    let mut w = ctx.create(name)?;
    write_feature_csv(data, Some(&loaded.ids), &mut w)?;
    ctx.finish(w, name)
}

fn build(ctx: &Context) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let seed = ctx.seed()?;
    let shape = DatasetShape {
        positive_cap: ctx.config.positive_cap,
        negatives_per_positive: ctx.config.negatives_per_positive,
    };
    let data = build_dataset(&loaded.graph, seed, shape)?;
    let parts = split(&data, ctx.config.train_fraction, seed)?;
    write_dataset(ctx, "dataset.csv", &data, &loaded)?;
    write_dataset(ctx, "train.csv", &parts.train, &loaded)?;
    write_dataset(ctx, "test.csv", &parts.test, &loaded)?;
    let manifest = DatasetManifest::describe(&data);
    ctx.write_json("dataset_manifest.json", &manifest)?;
    Ok(json!({
        "manifest": manifest,
        "train_samples": parts.train.len(),
        "test_samples": parts.test.len(),
    }))
}

fn parse_features(list: Option<&str>) -> Result<Vec<Metric>> {
    match list {
        None => Ok(Metric::ALL.to_vec()),
        Some(text) => text.split(',').map(|s| s.trim().parse()).collect(),
    }
}

fn train_cmd(ctx: &Context, data: &Path, features: Option<&str>, output: &str) -> Result<serde_json::Value> {
    let data = read_dataset(data)?;
    let columns = parse_features(features)?;
    let (model, report) = train_on(&data, &columns, &ctx.config.gbm())?;
    let path = ctx.path(output);
    save_model(&model, &path)?;
    ctx.write_json("train_report.json", &report)?;
    Ok(json!({
        "model": path,
        "features": model.feature_names,
        "trees": model.trees.len(),
        "samples": data.len(),
        "final_loss": report.losses.last(),
    }))
}

fn evaluate_cmd(ctx: &Context, data: &Path) -> Result<serde_json::Value> {
    let model = ctx.model()?;
    let data = read_dataset(data)?;
    let report = evaluate(&model, &data)?;
    ctx.write_json("roc.json", &report)?;
    let mut w = ctx.create("roc.csv")?;
    let path = ctx.path("roc.csv");
    writeln!(w, "fpr,tpr").map_err(io_err(&path))?;
    for (x, y) in &report.roc_points {
        writeln!(w, "{x},{y}").map_err(io_err(&path))?;
    }
    ctx.finish(w, "roc.csv")?;
    let (positive, negative) = data.class_counts();
    Ok(json!({
        "auc": report.auc,
        "err_pos": report.err_pos,
        "err_neg": report.err_neg,
        "prediction_imbalance": report.prediction_imbalance,
        "positive": positive,
        "negative": negative,
    }))
}

fn select(ctx: &Context, train: &Path, test: &Path) -> Result<serde_json::Value> {
    let train = read_dataset(train)?;
    let test = read_dataset(test)?;
    let report = forward_select(&train, &test, &ctx.config.gbm(), ctx.config.epsilon)?;
    ctx.write_json("feature_selection.json", &report)?;
    Ok(json!({
        "selected": report.selected,
        "selected_aucs": report.selected_aucs,
        "stopping_round": report.stopping_round,
    }))
}

fn hidden(ctx: &Context) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let model = ctx.model()?;
    let c = &ctx.config;
    let probes = hidden_link_probability_by_distance(&model, &loaded.graph, c.d_min..=c.d_max, c.count_per_d, ctx.seed()?)?;
    let mut w = ctx.create("hidden_by_distance.csv")?;
    let path = ctx.path("hidden_by_distance.csv");
    writeln!(w, "d,mean_score,samples,shortfall").map_err(io_err(&path))?;
    for p in &probes {
        let mean = p.mean_score.map_or(String::new(), |m| m.to_string());
        writeln!(w, "{},{mean},{},{}", p.d, p.samples, u8::from(p.shortfall)).map_err(io_err(&path))?;
    }
    ctx.finish(w, "hidden_by_distance.csv")?;
    Ok(serde_json::to_value(probes)?)
}

fn corrupt(ctx: &Context) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let c = &ctx.config;
    let options = CorruptionOptions {
        nested: c.nested,
        diameter_sample: c.diameter_sample,
        train_fraction: c.train_fraction,
        positive_cap: c.positive_cap,
    };
    let runs = run_corruption_experiment(&loaded.graph, &c.p_values, ctx.seed()?, &c.gbm(), &options)?;
    let mut w = ctx.create("corruption.csv")?;
    let path = ctx.path("corruption.csv");
    write_corruption_csv(&runs, &mut w).map_err(io_err(&path))?;
    ctx.finish(w, "corruption.csv")?;
    let correlations = if runs.len() >= 3 {
        let table = correlate_structure_vs_auc(&runs)?;
        ctx.write_json("corruption_correlations.json", &table)?;
        Some(table.len())
    } else {
        None
    };
    let rows: Vec<_> = runs
        .iter()
        .map(|r| {
            json!({
                "p": r.p,
                "removed": r.removed_edges.len(),
                "model_auc": r.model_auc,
                "hidden_link_auc": r.hidden_link_auc,
                "note": r.note,
            })
        })
        .collect();
    Ok(json!({ "runs": rows, "correlations": correlations }))
}

fn pagerank_params(c: &RunConfig) -> PageRankParams {
    PageRankParams {
        damping: c.damping,
        tol: c.tol,
        max_iter: c.max_iter,
    }
}

fn pagerank_cmd(ctx: &Context, index: Option<&str>) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let g = &loaded.graph;
    let params = pagerank_params(&ctx.config);
    let mut uniform = None;
    let (kind, scores) = if let Some(name) = index {
        let w = single_index_weights(g, name.parse()?)?;
        uniform = Some(w.uniform);
        (format!("single_index_{name}"), weighted_pagerank(&w.graph, &params)?)
    } else if ctx.config.model.is_some() {
        let wg = weight_graph(g, &ctx.model()?)?;
        ("weighted".to_string(), weighted_pagerank(&wg, &params)?)
    } else {
        ("unweighted".to_string(), pagerank(g, &params)?)
    };
    let mut w = ctx.create("pagerank.csv")?;
    let path = ctx.path("pagerank.csv");
    writeln!(w, "node,score").map_err(io_err(&path))?;
    for (v, s) in scores.scores.iter().enumerate() {
        writeln!(w, "{},{s}", loaded.ids.original(v as u32)).map_err(io_err(&path))?;
    }
    ctx.finish(w, "pagerank.csv")?;
    let top: Vec<_> = scores
        .ranking()
        .into_iter()
        .take(10)
        .map(|v| json!({ "node": loaded.ids.original(v), "score": scores.scores[v as usize] }))
        .collect();
    Ok(json!({
        "kind": kind,
        "iterations_run": scores.iterations_run,
        "residual": scores.residual,
        "uniform_weights": uniform,
        "top": top,
    }))
}

fn attack_cmd(ctx: &Context, strategies: Option<&str>) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let g = &loaded.graph;
    let model = match &ctx.config.model {
        Some(_) => Some(ctx.model()?),
        None => None,
    };
    let strategies: Vec<Strategy> = match strategies {
        Some(list) => list.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?,
        None => {
            let mut all = vec![Strategy::Random, Strategy::DegreeDynamic, Strategy::PageRankStatic];
            if model.is_some() {
                all.extend([Strategy::WeightedPageRankStatic, Strategy::Hybrid]);
            }
            all
        }
    };
    let c = &ctx.config;
    let budget = match c.budget {
        Some(b) => b,
        None => budget_from_fraction(g, c.budget_fraction)?,
    };
    let mut summary = Vec::new();
    for strategy in strategies {
        let options = AttackOptions {
            strategy,
            budget,
            measure_every: c.measure_every,
            diameter_sample: c.diameter_sample,
            seed: ctx.seed()?,
            pagerank: pagerank_params(c),
            hybrid_lookahead: c.hybrid_lookahead,
            hybrid_commit: c.hybrid_commit,
        };
        let trace = attack(g, &options, model.as_ref())?;
        let name = trace.file_name();
        let mut w = ctx.create(&name)?;
        write_attack_csv(&trace, Some(&loaded.ids), &mut w).map_err(io_err(&ctx.path(&name)))?;
        ctx.finish(w, &name)?;
        summary.push(json!({
            "strategy": strategy.to_string(),
            "file": name,
            "steps": trace.steps.len(),
            "removed_fraction": trace.steps.len() as f64 / g.node_count() as f64,
            "final_lcc_fraction": trace.final_lcc_fraction(),
            "truncated": trace.truncated,
            "uniform_weights": trace.uniform_weights,
        }));
    }
    Ok(json!({ "budget": budget, "traces": summary }))
}

/// Non-edges whose endpoints share a neighbor, each once with `u < v`.
fn distance_two_pairs(g: &Graph) -> Vec<Edge> {
    let mut out = BTreeSet::new();
    for u in g.nodes() {
        for &w in g.neighbors(u) {
            for &v in g.neighbors(w) {
                if v > u && !g.has_edge(u, v) {
                    out.insert((u, v));
                }
            }
        }
    }
    out.into_iter().collect()
}

fn read_pairs(path: &Path, loaded: &LoadedGraph) -> Result<Vec<Edge>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut pairs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse { line: i + 1, message };
        let ids: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if ids.len() != 2 {
            return Err(bad(format!("expected two node ids, found `{text}`")));
        }
        let mut dense = [0; 2];
        for (slot, s) in dense.iter_mut().zip(&ids) {
            let original: u64 = s.parse().map_err(|_| bad(format!("`{s}` is not a node id")))?;
            *slot = loaded
                .ids
                .dense(original)
                .ok_or_else(|| bad(format!("node {original} is not in the graph")))?;
        }
        let [u, v] = dense;
        if u == v {
            return Err(bad(format!("pair ({}, {}) is a self pair", ids[0], ids[1])));
        }
        if loaded.graph.has_edge(u, v) {
            return Err(bad(format!("pair ({}, {}) is an existing edge", ids[0], ids[1])));
        }
        pairs.push((u, v));
    }
    Ok(pairs)
}

fn predict_edges(ctx: &Context, pairs: Option<&Path>, top_k: Option<usize>) -> Result<serde_json::Value> {
    let loaded = ctx.graph()?;
    let g = &loaded.graph;
    let model = ctx.model()?;
    let (candidates, keep) = match (pairs, top_k) {
        (Some(path), _) => {
            let p = read_pairs(path, &loaded)?;
            let n = p.len();
            (p, n)
        }
        (None, Some(0)) => return Err(Error::InvalidArgument("--top-k must be at least 1".into())),
        (None, Some(k)) => (distance_two_pairs(g), k),
        (None, None) => return Err(Error::InvalidArgument("give --pairs or --top-k".into())),
    };
    let scores = model.predict_batch(&features_batch(g, &candidates)?)?;
    let mut ranked: Vec<(Edge, f64)> = candidates.into_iter().zip(scores).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(keep);
    let mut w = ctx.create("predictions.csv")?;
    let path = ctx.path("predictions.csv");
    writeln!(w, "u,v,score").map_err(io_err(&path))?;
    for ((u, v), s) in &ranked {
        writeln!(w, "{},{},{s}", loaded.ids.original(*u), loaded.ids.original(*v)).map_err(io_err(&path))?;
    }
    ctx.finish(w, "predictions.csv")?;
    Ok(json!({
        "rows": ranked.len(),
        "best": ranked.first().map(|((u, v), s)| json!([loaded.ids.original(*u), loaded.ids.original(*v), s])),
    }))
}

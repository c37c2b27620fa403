use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use shs_bench::config::parse_list;
use shs_bench::dynamic::DynamicConfig;
use shs_bench::manifest::{ensure_dir, write_json, RunManifest};
use shs_bench::meta_bench::{build_corpus, write_corpus};
use shs_bench::report::{read_report, render, ReportFormat, TableRow};
use shs_bench::{
    load_dataset, prepare_dataset, run_dynamic_experiment, run_meta_benchmark, run_sensitivity_sweep,
    run_static_benchmark, write_dataset, DatasetSpec, ExperimentConfig, Family, MetaBenchConfig, Method,
    PrepareOptions, ReportRow, Scale, SweepAxis,
};
use shs_core::centrality::{accuracy, RankOrder};
use shs_core::gnn::{predict, predict_ranked, read_checkpoint, train, write_checkpoint, Checkpoint};
use shs_core::graph::{generate, write_edgelist, GeneratorSpec};
use shs_core::io::{write_labels, write_loss_history};
use shs_core::meta::{load_task_manifest, meta_train};

use crate::args::*;

/// Invalid flag values or combinations, reported with exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(result: shs_bench::Result<T>) -> Result<T> {
    result.map_err(|e| UsageError(e.to_string()).into())
}

pub struct RunContext {
    pub seed: u64,
    pub out: PathBuf,
    pub scale: Scale,
    pub timing_strict: bool,
    pub force: bool,
}

impl RunContext {
    fn repeat(&self, requested: usize) -> usize {
        if self.timing_strict {
            requested.max(3)
        } else {
            requested
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_all_formats<T: serde::Serialize + TableRow>(rows: &[T], dir: &Path, stem: &str) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for format in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Markdown] {
        let file = format!("{stem}.{}", format.extension());
        write_text(&dir.join(&file), &render(rows, format)?)?;
        files.push(file);
    }
    Ok(files)
}

pub fn generate_cmd(ctx: &RunContext, args: &GenerateArgs) -> Result<()> {
    let spec = args.generator.spec(ctx.scale.train_nodes(), ctx.seed);
    let graph = generate(&spec)?;
    ensure_dir(&ctx.out)?;
    let stem = DatasetSpec::generated(spec).id().to_string();
    let path = ctx.out.join(format!("{stem}.edges"));
    write_edgelist(&graph, &path)?;
    write_json(&spec, &ctx.out.join(format!("{stem}.json")))?;
    println!(
        "wrote {} ({} nodes, {} edges)",
        path.display(),
        graph.node_count(),
        graph.edge_count()
    );
    Ok(())
}

pub fn prepare_cmd(ctx: &RunContext, args: &PrepareArgs) -> Result<()> {
    let k_percents = usage(parse_list::<f64>(&args.k))?;
    let spec = match &args.graph {
        Some(path) => DatasetSpec::EdgeList {
            id: args.id.clone().unwrap_or_else(|| {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "graph".into())
            }),
            path: path.clone(),
        },
        None => match (
            DatasetSpec::generated(args.generator.spec(ctx.scale.train_nodes(), ctx.seed)),
            &args.id,
        ) {
            (DatasetSpec::Generated { generator, .. }, Some(id)) => DatasetSpec::Generated {
                id: id.clone(),
                generator,
            },
            (spec, _) => spec,
        },
    };
    if let Some(k) = k_percents.iter().find(|&&k| !(k > 0.0 && k <= 100.0)) {
        return Err(UsageError(format!("k = {k} is outside (0, 100]")).into());
    }
    let options = PrepareOptions {
        node_cap: args.node_cap,
        force: ctx.force,
    };
    let data = prepare_dataset(&spec, &k_percents, options)?;
    let dir = ctx.out.join(data.id());
    let manifest = write_dataset(&data, &dir)?;
    println!(
        "prepared {} ({} nodes, {} edges) in {}: betweenness {:.3}s, features {:.3}s",
        manifest.dataset,
        manifest.nodes,
        manifest.edges,
        dir.display(),
        data.timings.bc_seconds,
        data.timings.feature_seconds
    );
    for artifact in &manifest.artifacts {
        println!("  {}  {}", artifact.sha256, artifact.file);
    }
    Ok(())
}

pub fn train_cmd(ctx: &RunContext, args: &TrainArgs) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let labels = data.labels_for(args.k)?;
    let config = args.model.config(ctx.seed)?;
    let outcome = train(&data.graph, data.features.normalized().view(), &labels.labels, &config)?;
    ensure_dir(&ctx.out)?;
    let mut ckpt = Checkpoint::new(outcome.params);
    ckpt.meta.push(("method".into(), "graphshs".into()));
    ckpt.meta.push(("dataset".into(), data.id().into()));
    ckpt.meta.push(("k_percent".into(), args.k.to_string()));
    ckpt.meta.push(("epochs".into(), config.epochs.to_string()));
    ckpt.meta
        .push(("learning_rate".into(), config.learning_rate.to_string()));
    ckpt.meta.push(("weight_decay".into(), config.weight_decay.to_string()));
    ckpt.meta.push(("seed".into(), config.seed.to_string()));
    let ckpt_file = format!("graphshs_k{}.ckpt", args.k);
    let loss_file = format!("loss_k{}.csv", args.k);
    write_checkpoint(&ckpt, ctx.out.join(&ckpt_file))?;
    write_loss_history(&outcome.losses, ctx.out.join(&loss_file))?;
    let mut manifest = RunManifest::new("train", &config, vec![ctx.seed])?;
    manifest.add(&ctx.out, &ckpt_file)?;
    manifest.add(&ctx.out, &loss_file)?;
    write_json(&manifest, &ctx.out.join("manifest.json"))?;
    println!(
        "trained on {} for {} epochs: loss {:.6} -> {:.6}; checkpoint {}",
        data.id(),
        config.epochs,
        outcome.losses.first().copied().unwrap_or(f64::NAN),
        outcome.losses.last().copied().unwrap_or(f64::NAN),
        ctx.out.join(&ckpt_file).display()
    );
    Ok(())
}

pub fn train_meta_cmd(ctx: &RunContext, args: &TrainMetaArgs) -> Result<()> {
    ensure_dir(&ctx.out)?;
    let manifest_path = match &args.tasks {
        Some(path) => path.clone(),
        None => {
            let corpus_config = MetaBenchConfig::preset(ctx.scale, vec![ctx.seed]);
            let corpus = build_corpus(&corpus_config, ctx.seed)?;
            write_corpus(&corpus, &corpus_config, ctx.seed, &ctx.out.join("tasks"))?
        }
    };
    let tasks = load_task_manifest(&manifest_path)?;
    let meta_config = args.meta.config(ctx.seed)?;
    let model_config = args.model.config(ctx.seed)?;
    let outcome = meta_train(&tasks, &meta_config, &model_config)?;

    let mut ckpt = Checkpoint::new(outcome.params);
    ckpt.meta.push(("method".into(), "meta".into()));
    ckpt.meta.extend(meta_config.header());
    ckpt.meta.push(("best_epoch".into(), outcome.best_epoch.to_string()));
    write_checkpoint(&ckpt, ctx.out.join("meta.ckpt"))?;
    write_loss_history(&outcome.query_losses, ctx.out.join("meta_query_loss.csv"))?;
    let mut manifest = RunManifest::new("train-meta", &meta_config, vec![ctx.seed])?;
    manifest.add(&ctx.out, "meta.ckpt")?;
    manifest.add(&ctx.out, "meta_query_loss.csv")?;
    write_json(&manifest, &ctx.out.join("manifest.json"))?;
    println!(
        "meta-trained on {} tasks for {} epochs (best {}): mean query loss {:.6} -> {:.6}",
        tasks.len(),
        outcome.query_losses.len(),
        outcome.best_epoch,
        outcome.query_losses.first().copied().unwrap_or(f64::NAN),
        outcome.query_losses[outcome.best_epoch]
    );
    Ok(())
}

pub fn eval_cmd(ctx: &RunContext, args: &EvalArgs) -> Result<()> {
    let ckpt = read_checkpoint(&args.model)?;
    let data = load_dataset(&args.data)?;
    let truth = data.labels_for(args.k)?;
    let x = data.features.normalized().view();
    let prediction = match args.mode {
        ModeArg::Ranked => predict_ranked(&ckpt.params, &data.graph, x, args.k)?,
        ModeArg::Argmax => predict(&ckpt.params, &data.graph, x)?,
    };
    let metrics = accuracy(&prediction.labels.labels, &truth.labels)?;
    ensure_dir(&ctx.out)?;
    write_labels(&prediction.scores, &prediction.labels, ctx.out.join("predictions.csv"))?;
    write_json(&metrics, &ctx.out.join("metrics.json"))?;
    println!(
        "{} top-{}%: accuracy {:.4}, precision {:.4}, recall {:.4}, f1 {:.4}, overlap {:.4}",
        data.id(),
        args.k,
        metrics.accuracy,
        metrics.precision,
        metrics.recall,
        metrics.f1,
        metrics.overlap
    );
    Ok(())
}

pub fn bench_cmd(ctx: &RunContext, args: &BenchArgs) -> Result<()> {
    let family: Family = usage(args.family.parse())?;
    let mut config = ExperimentConfig::preset(ctx.scale, family, ctx.seed);
    config.k_percents = usage(parse_list(&args.k))?;
    config.methods = usage(parse_list::<Method>(&args.methods))?;
    if config.methods.contains(&Method::Meta) {
        return Err(UsageError("the meta method runs under bench-meta".into()).into());
    }
    let make = |n: usize, s: u64| match family {
        Family::Er => DatasetSpec::er(n, s),
        Family::Sf => DatasetSpec::sf(n, s),
    };
    if let Some(n) = args.train_nodes {
        config.train = make(n, ctx.seed);
    }
    if let Some(list) = &args.test_nodes {
        let sizes = usage(parse_list::<usize>(list))?;
        config.tests = sizes
            .into_iter()
            .enumerate()
            .map(|(i, n)| make(n, ctx.seed + 1 + i as u64))
            .collect();
    }
    config.model = args.model.config(ctx.seed)?;
    config.include_features = args.include_features;
    config.constraint_order = match args.constraint_order {
        OrderArg::Ascending => RankOrder::Ascending,
        OrderArg::Descending => RankOrder::Descending,
    };
    config.repeat = ctx.repeat(args.repeat);
    config.node_cap = args.node_cap;
    config.force = ctx.force;
    usage(config.validate())?;

    let outcome = run_static_benchmark(&config, Some(&ctx.out))?;
    print!("{}", render(&outcome.rows, ReportFormat::Markdown)?);
    println!("report and manifest written to {}", ctx.out.display());
    Ok(())
}

pub fn bench_meta_cmd(ctx: &RunContext, args: &BenchMetaArgs) -> Result<()> {
    let seeds = match &args.seeds {
        Some(list) => usage(parse_list::<u64>(list))?,
        None => (ctx.seed..ctx.seed + 5).collect(),
    };
    let mut config = MetaBenchConfig::preset(ctx.scale, seeds);
    config.model = args.model.config(ctx.seed)?;
    config.meta = args.meta.config(ctx.seed)?;
    usage(config.validate())?;
    let outcome = run_meta_benchmark(&config, Some(&ctx.out))?;
    print!("{}", render(&outcome.rows, ReportFormat::Markdown)?);
    for s in &outcome.summary {
        println!(
            "{:<20} mean query accuracy {:.4}  mean overlap {:.4}  ({} evaluations)",
            s.method, s.mean_accuracy, s.mean_overlap, s.evaluations
        );
    }
    println!("report and manifest written to {}", ctx.out.display());
    Ok(())
}

pub fn dynamic_cmd(ctx: &RunContext, args: &DynamicArgs) -> Result<()> {
    let spec = GeneratorSpec::Sf {
        n: args.nodes,
        params: Default::default(),
        seed: ctx.seed,
    };
    let graph = generate(&spec)?;
    let params = match &args.model {
        Some(path) => read_checkpoint(path)?.params,
        None => {
            let train_spec = DatasetSpec::sf(ctx.scale.train_nodes(), ctx.seed.wrapping_add(1));
            let options = PrepareOptions {
                node_cap: shs_bench::DEFAULT_NODE_CAP,
                force: ctx.force,
            };
            let data = prepare_dataset(&train_spec, &[args.k], options)?;
            let labels = data.labels_for(args.k)?;
            train(
                &data.graph,
                data.features.normalized().view(),
                &labels.labels,
                &args.model_args.config(ctx.seed)?,
            )?
            .params
        }
    };
    let config = DynamicConfig {
        deletions: args.deletions,
        k_percent: args.k,
        seed: ctx.seed,
    };
    let report = run_dynamic_experiment(&graph, &params, config).map_err(|e| match e {
        shs_bench::BenchError::Config(msg) => anyhow::Error::new(UsageError(msg)),
        other => other.into(),
    })?;
    ensure_dir(&ctx.out)?;
    let files = write_all_formats(&report.steps, &ctx.out, "dynamic")?;
    write_json(&report, &ctx.out.join("dynamic_summary.json"))?;
    let mut manifest = RunManifest::new("dynamic", &config, vec![ctx.seed])?;
    manifest.timed_outputs = files;
    manifest.timed_outputs.push("dynamic_summary.json".into());
    write_json(&manifest, &ctx.out.join("manifest.json"))?;
    println!(
        "{} deletions on SF-{}: average speedup {:.1}x (aggregate {:.1}x)",
        report.steps.len(),
        args.nodes,
        report.average_speedup,
        report.aggregate_speedup
    );
    Ok(())
}

pub fn sweep_cmd(ctx: &RunContext, args: &SweepArgs) -> Result<()> {
    let axis = match args.axis {
        AxisArg::Layers => SweepAxis::Layers,
        AxisArg::Hidden => SweepAxis::Hidden,
    };
    let model = args.model.config(ctx.seed)?;
    let options = PrepareOptions {
        node_cap: shs_bench::DEFAULT_NODE_CAP,
        force: ctx.force,
    };
    let n = ctx.scale.train_nodes();
    let train_data = prepare_dataset(&DatasetSpec::sf(n, ctx.seed), &[args.k], options)?;
    let test_count = match ctx.scale {
        Scale::Desk => 3,
        Scale::Paper => 1,
    };
    let tests = (0..test_count)
        .map(|i| prepare_dataset(&DatasetSpec::sf(n, ctx.seed + 1 + i), &[args.k], options))
        .collect::<shs_bench::Result<Vec<_>>>()?;
    let rows = run_sensitivity_sweep(&train_data, &tests, &model, axis, args.k)?;
    ensure_dir(&ctx.out)?;
    let files = write_all_formats(&rows, &ctx.out, &format!("sweep_{axis}"))?;
    let mut manifest = RunManifest::new("sweep", &model, vec![ctx.seed])?;
    manifest.timed_outputs = files;
    write_json(&manifest, &ctx.out.join("manifest.json"))?;
    print!("{}", render(&rows, ReportFormat::Markdown)?);
    Ok(())
}

pub fn report_cmd(args: &ReportArgs) -> Result<()> {
    let rows: Vec<ReportRow> = read_report(&args.input)?;
    let format = match args.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Markdown => ReportFormat::Markdown,
    };
    let text = render(&rows, format)?;
    match &args.output {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

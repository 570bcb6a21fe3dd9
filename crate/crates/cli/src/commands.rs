//! Subcommand implementations.

use crate::config::{pick, pick_opt, FileConfig};
use clap::Args;
use kneecast_core::analyze::{
    batch_stats, elastic_net_benchmark, export_attention, key_importance, recommend_input_size,
    ScoreKind, ALLOWED_INPUT_SIZES, DEFAULT_COVERAGE_TAU,
};
use kneecast_core::data::{
    convert_dump, generate_synthetic, load_corpus, save_cells_csv, save_cells_json, CellRecord,
    CorpusFormat, PreprocessOptions, SyntheticSpec, Variant,
};
use kneecast_core::knee::{label_corpus, load_labels_csv, save_labels_csv, KneeLabel};
use kneecast_core::model::{Architecture, Checkpoint, CnnConfig, ModelConfig};
use kneecast_core::train::{
    constant_baseline_rmse, grid_search, resolve_split, rmse, save_grid_csv, train_multi_seed,
    usable_cells, GridSpec, TrainSpec,
};
use kneecast_core::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub struct Context {
    pub file: FileConfig,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub jobs: usize,
}

impl Context {
    fn prepare_out(&self) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        Ok(())
    }

    /// Provenance capture: the exact resolved configuration of this run.
    fn write_run_config<T: Serialize>(&self, resolved: &T) -> Result<()> {
        let mut f = fs::File::create(self.out.join("run_config.json"))?;
        serde_json::to_writer_pretty(&mut f, resolved)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    fn load_cells(&self, flag: Option<&str>) -> Result<Vec<CellRecord>> {
        let path = pick_opt(flag.map(String::from), self.file.data.clone())
            .ok_or_else(|| Error::config("no dataset; pass --data or set \"data\""))?;
        let path = PathBuf::from(path);
        load_corpus(&path, CorpusFormat::from_path(&path))
    }

    fn load_labels(&self, flag: Option<&str>) -> Result<BTreeMap<String, KneeLabel>> {
        let path = pick_opt(flag.map(String::from), self.file.labels.clone())
            .ok_or_else(|| Error::config("no labels; pass --labels or set \"labels\""))?;
        load_labels_csv(Path::new(&path))
    }

    fn preprocess(&self, skip_smoothing: bool) -> PreprocessOptions {
        PreprocessOptions {
            skip_smoothing: skip_smoothing || self.file.skip_smoothing.unwrap_or(false),
            ..Default::default()
        }
    }
}

// ── convert ──────────────────────────────────────────────────────────

#[derive(Args)]
pub struct ConvertArgs {
    /// Dump directory: index.csv plus one <cell_id>.csv per cell.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output cells-csv path.
    #[arg(long = "to")]
    to: PathBuf,
}

pub fn convert(_ctx: &Context, args: ConvertArgs) -> Result<()> {
    let rows = convert_dump(&args.input, &args.to)?;
    println!("wrote {} sample rows to {}", rows, args.to.display());
    Ok(())
}

// ── synth ────────────────────────────────────────────────────────────

#[derive(Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 40)]
    cells: usize,
    /// Cycles with full intra-cycle traces.
    #[arg(long, default_value_t = 40)]
    detail: usize,
    /// Output corpus path (.csv or .json).
    #[arg(long = "to")]
    to: PathBuf,
}

pub fn synth(ctx: &Context, args: SynthArgs) -> Result<()> {
    ctx.prepare_out()?;
    let seed = ctx.seed.unwrap_or(42);
    let spec = SyntheticSpec {
        n_cells: args.cells,
        detail_cycles: args.detail,
        ..Default::default()
    };
    let corpus = generate_synthetic(&spec, seed);
    match CorpusFormat::from_path(&args.to) {
        CorpusFormat::CellsCsv => save_cells_csv(&args.to, &corpus.cells)?,
        CorpusFormat::CellsJson => save_cells_json(&args.to, &corpus.cells)?,
    }

    // Ground truth sidecar for verification workflows.
    let truth_path = args.to.with_extension("truth.csv");
    let mut w = csv::Writer::from_path(&truth_path)?;
    w.write_record([
        "cell_id",
        "batch",
        "c_ko",
        "c_2nd",
        "rest_charge_min",
        "rest_discharge_min",
    ])?;
    for (id, t) in &corpus.truth {
        w.write_record([
            id.as_str(),
            &t.batch.to_string(),
            &t.c_ko.to_string(),
            &t.c_2nd.to_string(),
            &t.rest_charge_min.to_string(),
            &t.rest_discharge_min.to_string(),
        ])?;
    }
    w.flush()?;
    ctx.write_run_config(&serde_json::json!({
        "command": "synth", "cells": args.cells, "detail": args.detail, "seed": seed,
        "out": args.to.display().to_string(),
    }))?;
    println!(
        "wrote {} cells to {} (truth: {})",
        args.cells,
        args.to.display(),
        truth_path.display()
    );
    Ok(())
}

// ── label ────────────────────────────────────────────────────────────

#[derive(Args)]
pub struct LabelArgs {
    #[arg(long)]
    data: Option<String>,
    #[arg(long = "to")]
    to: PathBuf,
    #[arg(long)]
    gamma: Option<f64>,
    /// Also write per-batch knee/C-rate statistics.
    #[arg(long)]
    stats: bool,
}

pub fn label(ctx: &Context, args: LabelArgs) -> Result<()> {
    ctx.prepare_out()?;
    let cells = ctx.load_cells(args.data.as_deref())?;
    let gamma = pick(
        args.gamma,
        ctx.file.gamma,
        kneecast_core::knee::DEFAULT_GAMMA,
    );
    let (labels, failures) = label_corpus(&cells, gamma);
    save_labels_csv(&args.to, &labels)?;
    for f in &failures {
        log::warn!("labeling failed for {}: {}", f.cell_id, f.reason);
    }
    if args.stats {
        let stats = batch_stats(&cells, &labels);
        let stats_path = ctx.out.join("batch_stats.csv");
        let mut w = csv::Writer::from_path(&stats_path)?;
        w.write_record([
            "batch",
            "n_cells",
            "mean_knee_onset",
            "std_knee_onset",
            "mean_c_rate",
        ])?;
        for s in &stats {
            w.write_record([
                s.batch.to_string(),
                s.n_cells.to_string(),
                s.mean_knee_onset.to_string(),
                s.std_knee_onset.to_string(),
                s.mean_c_rate.to_string(),
            ])?;
        }
        w.flush()?;
        println!("batch statistics in {}", stats_path.display());
    }
    ctx.write_run_config(&serde_json::json!({
        "command": "label", "gamma": gamma, "labels": args.to.display().to_string(),
        "failures": failures.len(),
    }))?;
    println!(
        "labeled {} cells ({} failures) -> {}",
        labels.len(),
        failures.len(),
        args.to.display()
    );
    Ok(())
}

// ── shared model/train argument handling ─────────────────────────────

#[derive(Args, Clone)]
pub struct ModelArgs {
    #[arg(long)]
    arch: Option<String>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    n_cy: Option<usize>,
    #[arg(long)]
    h_size: Option<usize>,
    #[arg(long)]
    heads: Option<usize>,
    #[arg(long)]
    he_size: Option<usize>,
    #[arg(long)]
    filters: Option<usize>,
    #[arg(long)]
    kernel: Option<usize>,
    #[arg(long)]
    n_pool: Option<usize>,
    #[arg(long)]
    n_nopool: Option<usize>,
    #[arg(long)]
    dense_width: Option<usize>,
}

impl ModelArgs {
    fn resolve(&self, ctx: &Context) -> Result<ModelConfig> {
        let arch_name = pick(
            self.arch.clone(),
            ctx.file.architecture.clone(),
            "rnn_ta_ca_1dcnn".to_string(),
        );
        let architecture = Architecture::from_str(&arch_name)?;
        let variant_name = pick(
            self.variant.clone(),
            ctx.file.variant.clone(),
            "combined".to_string(),
        );
        let default_heads = if architecture.has_ca() { 3 } else { 0 };
        let config = ModelConfig {
            architecture,
            h_size: pick(self.h_size, ctx.file.h_size, 3),
            n_he: pick(self.heads, ctx.file.heads, default_heads),
            he_size: pick_opt(self.he_size, ctx.file.he_size),
            cnn: CnnConfig {
                filters_init: pick(self.filters, ctx.file.filters, 5),
                kernel: pick(self.kernel, ctx.file.kernel, 3),
                n_pool: pick(self.n_pool, ctx.file.n_pool, 1),
                n_nopool: pick(self.n_nopool, ctx.file.n_nopool, 1),
                dense_width: pick_opt(self.dense_width, ctx.file.dense_width),
            },
            n_cy: pick(self.n_cy, ctx.file.n_cy, 30),
            variant: Variant::from_str(&variant_name)?,
            seed: 0,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Clone)]
pub struct TrainControlArgs {
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    /// Comma-separated seeds, e.g. 1,2,3,4,5.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Skip the Hampel/Savitzky-Golay pass (synthetic data is clean).
    #[arg(long)]
    skip_smoothing: bool,
}

impl TrainControlArgs {
    fn resolve(&self, ctx: &Context) -> TrainSpec {
        let default_seeds = ctx
            .seed
            .map(|s| vec![s])
            .unwrap_or_else(|| vec![1, 2, 3, 4, 5]);
        TrainSpec {
            lr: pick(self.lr, ctx.file.lr, 1e-2),
            max_epochs: pick(self.epochs, ctx.file.epochs, 3000),
            patience: pick(self.patience, ctx.file.patience, 500),
            seeds: pick(self.seeds.clone(), ctx.file.seeds.clone(), default_seeds),
        }
    }
}

// ── train ────────────────────────────────────────────────────────────

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    control: TrainControlArgs,
    /// Sweep the published hyperparameter grid instead of one config.
    #[arg(long)]
    grid: bool,
    /// JSON file overriding the grid (GridSpec schema).
    #[arg(long)]
    grid_file: Option<PathBuf>,
}

pub fn train(ctx: &Context, args: TrainArgs) -> Result<()> {
    ctx.prepare_out()?;
    let cells = ctx.load_cells(args.data.as_deref())?;
    let labels = ctx.load_labels(args.labels.as_deref())?;
    let config = args.model.resolve(ctx)?;
    let spec = args.control.resolve(ctx);
    let opts = ctx.preprocess(args.control.skip_smoothing);

    ctx.write_run_config(&serde_json::json!({
        "command": if args.grid { "train-grid" } else { "train" },
        "model": config, "train": spec, "jobs": ctx.jobs,
    }))?;

    if args.grid {
        let grid = match &args.grid_file {
            Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
            None => GridSpec::table_defaults(config.architecture.has_ca()),
        };
        let report = grid_search(&cells, &labels, &config, &grid, &spec, &opts, ctx.jobs)?;
        save_grid_csv(&ctx.out.join("grid.csv"), &report)?;
        let best = &report.summaries[report.best];
        let mut f = fs::File::create(ctx.out.join("grid_best.json"))?;
        serde_json::to_writer_pretty(&mut f, best)?;
        f.write_all(b"\n")?;
        println!(
            "grid of {} configs done; best mean val RMSE {:.2} (test {:.2} ± {:.2})",
            report.summaries.len(),
            best.mean_val_rmse,
            best.mean_test_rmse,
            best.std_test_rmse
        );
        return Ok(());
    }

    let (report, checkpoints) = train_multi_seed(&cells, &labels, &config, &spec, &opts, ctx.jobs)?;
    let mut f = fs::File::create(ctx.out.join("report.json"))?;
    serde_json::to_writer_pretty(&mut f, &report)?;
    f.write_all(b"\n")?;
    for (seed, ckpt) in spec.seeds.iter().zip(&checkpoints) {
        ckpt.save(&ctx.out.join(format!("ckpt_seed{}.json", seed)))?;
    }
    println!(
        "trained {} seeds: test RMSE {:.2} ± {:.2} cycles (report.json, ckpt_seed*.json)",
        spec.seeds.len(),
        report.mean_test_rmse,
        report.std_test_rmse
    );
    Ok(())
}

// ── evaluate ─────────────────────────────────────────────────────────

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    /// Split seed; defaults to the checkpoint's training seed.
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    skip_smoothing: bool,
}

pub fn evaluate(ctx: &Context, args: EvaluateArgs) -> Result<()> {
    ctx.prepare_out()?;
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let cells = ctx.load_cells(args.data.as_deref())?;
    let labels = ctx.load_labels(args.labels.as_deref())?;
    let opts = ctx.preprocess(args.skip_smoothing);
    let split_seed = args.split_seed.or(ctx.seed).unwrap_or(ckpt.config.seed);

    let ids = usable_cells(&cells, &labels, ckpt.config.n_cy);
    let split = resolve_split(&ids, split_seed);
    let params = ckpt.to_params()?;

    let by_id: BTreeMap<&str, &CellRecord> =
        cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();
    let subset_rmse = |ids: &[String]| -> Result<f64> {
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for id in ids {
            let raw = kneecast_core::data::build_raw_matrix(
                by_id[id.as_str()],
                ckpt.config.variant,
                ckpt.config.n_cy,
                &opts,
            )?;
            inputs.push(kneecast_core::data::InputTensor {
                cell_id: id.clone(),
                variant: ckpt.config.variant,
                n_cy: ckpt.config.n_cy,
                data: ckpt.input_norm.apply(&raw),
                norm: ckpt.input_norm.ranges.clone(),
            });
            targets.push(labels[id].c_ko);
        }
        let refs: Vec<&kneecast_core::data::InputTensor> = inputs.iter().collect();
        let batch = kneecast_core::model::BatchData::from_inputs(&refs)?;
        let mut tape = kneecast_core::autodiff::Tape::new();
        let fwd = kneecast_core::model::forward_batch(&mut tape, &params, &ckpt.config, &batch)?;
        let preds: Vec<f64> = tape
            .value(fwd.preds)
            .data()
            .iter()
            .map(|&p| ckpt.denormalize_target(p))
            .collect();
        Ok(rmse(&preds, &targets))
    };

    let train_targets: Vec<f64> = split.train.iter().map(|id| labels[id].c_ko).collect();
    let test_targets: Vec<f64> = split.test.iter().map(|id| labels[id].c_ko).collect();
    let report = serde_json::json!({
        "checkpoint": ckpt.id,
        "split_seed": split_seed,
        "train_rmse": subset_rmse(&split.train)?,
        "val_rmse": subset_rmse(&split.val)?,
        "test_rmse": subset_rmse(&split.test)?,
        "constant_baseline_test_rmse": constant_baseline_rmse(&train_targets, &test_targets),
    });
    let mut f = fs::File::create(ctx.out.join("report.json"))?;
    serde_json::to_writer_pretty(&mut f, &report)?;
    f.write_all(b"\n")?;
    ctx.write_run_config(&report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

// ── attention ────────────────────────────────────────────────────────

#[derive(Args)]
pub struct AttentionArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    /// ta, ca, or both.
    #[arg(long = "type", default_value = "both")]
    score_type: String,
    /// Averaging population: val_test (default) or all.
    #[arg(long, default_value = "val_test")]
    population: String,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    skip_smoothing: bool,
}

pub fn attention(ctx: &Context, args: AttentionArgs) -> Result<()> {
    ctx.prepare_out()?;
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let cells = ctx.load_cells(args.data.as_deref())?;
    let labels = ctx.load_labels(args.labels.as_deref())?;
    let opts = ctx.preprocess(args.skip_smoothing);
    let kind = match args.score_type.as_str() {
        "ta" => ScoreKind::Ta,
        "ca" => ScoreKind::Ca,
        "both" => ScoreKind::Both,
        other => return Err(Error::config(format!("unknown score type {:?}", other))),
    };
    let split_seed = args.split_seed.or(ctx.seed).unwrap_or(ckpt.config.seed);
    let population = match args.population.as_str() {
        "all" => usable_cells(&cells, &labels, ckpt.config.n_cy),
        "val_test" => kneecast_core::analyze::default_population(
            &cells,
            &labels,
            ckpt.config.n_cy,
            split_seed,
        ),
        other => return Err(Error::config(format!("unknown population {:?}", other))),
    };

    let report = export_attention(&ckpt, &cells, &population, kind, &opts)?;
    report.save(&ctx.out)?;
    ctx.write_run_config(&serde_json::json!({
        "command": "attention", "checkpoint": ckpt.id, "type": args.score_type,
        "population": args.population, "split_seed": split_seed,
        "batches": report.population,
    }))?;
    println!(
        "exported {} TA and {} CA batch matrices to {}",
        report.ta.len(),
        report.ca.values().map(|v| v.len()).sum::<usize>(),
        ctx.out.display()
    );
    Ok(())
}

// ── reduce ───────────────────────────────────────────────────────────

#[derive(Args)]
pub struct ReduceArgs {
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    control: TrainControlArgs,
    /// Input size of the baseline training stage.
    #[arg(long, default_value_t = 100)]
    base_cycles: usize,
}

#[derive(Serialize)]
struct ReduceRow {
    n_cy: usize,
    mean_test_rmse: f64,
    std_test_rmse: f64,
}

pub fn reduce(ctx: &Context, args: ReduceArgs) -> Result<()> {
    ctx.prepare_out()?;
    let cells = ctx.load_cells(args.data.as_deref())?;
    let labels = ctx.load_labels(args.labels.as_deref())?;
    let mut config = args.model.resolve(ctx)?;
    if !config.architecture.has_ca() {
        return Err(Error::config("reduce needs a CA-bearing architecture"));
    }
    config.n_cy = args.base_cycles;
    config.validate()?;
    let spec = args.control.resolve(ctx);
    let opts = ctx.preprocess(args.control.skip_smoothing);

    ctx.write_run_config(&serde_json::json!({
        "command": "reduce", "model": config, "train": spec, "base_cycles": args.base_cycles,
    }))?;

    // Stage 1: full-size training.
    let (base_report, checkpoints) =
        train_multi_seed(&cells, &labels, &config, &spec, &opts, ctx.jobs)?;
    println!(
        "base n_cy={}: test RMSE {:.2} ± {:.2}",
        args.base_cycles, base_report.mean_test_rmse, base_report.std_test_rmse
    );

    // Stage 2: CA scores of the first seed's checkpoint drive the plan.
    let first_seed = spec.seeds[0];
    let population =
        kneecast_core::analyze::default_population(&cells, &labels, config.n_cy, first_seed);
    let att = export_attention(&checkpoints[0], &cells, &population, ScoreKind::Ca, &opts)?;
    let all_heads: Vec<&kneecast_core::autodiff::Tensor> =
        att.ca.values().flat_map(|heads| heads.iter()).collect();
    let importance = key_importance(all_heads.iter().copied());
    let plan = recommend_input_size(&importance, &ALLOWED_INPUT_SIZES, DEFAULT_COVERAGE_TAU);
    plan.save(&ctx.out.join("reduction_plan.json"))?;
    println!("recommended input size: {} cycles", plan.recommended_n_cy);

    // Stage 3: retrain at the recommended size.
    let reduced_config = ModelConfig {
        n_cy: plan.recommended_n_cy,
        ..config.clone()
    };
    reduced_config.validate()?;
    let (reduced_report, _) =
        train_multi_seed(&cells, &labels, &reduced_config, &spec, &opts, ctx.jobs)?;
    println!(
        "reduced n_cy={}: test RMSE {:.2} ± {:.2}",
        plan.recommended_n_cy, reduced_report.mean_test_rmse, reduced_report.std_test_rmse
    );

    let table = [
        ReduceRow {
            n_cy: args.base_cycles,
            mean_test_rmse: base_report.mean_test_rmse,
            std_test_rmse: base_report.std_test_rmse,
        },
        ReduceRow {
            n_cy: plan.recommended_n_cy,
            mean_test_rmse: reduced_report.mean_test_rmse,
            std_test_rmse: reduced_report.std_test_rmse,
        },
    ];
    let mut w = csv::Writer::from_path(ctx.out.join("reduction_comparison.csv"))?;
    w.write_record(["n_cy", "mean_test_rmse", "std_test_rmse"])?;
    for row in &table {
        w.write_record([
            row.n_cy.to_string(),
            row.mean_test_rmse.to_string(),
            row.std_test_rmse.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// ── benchmark ────────────────────────────────────────────────────────

#[derive(Args)]
pub struct BenchmarkArgs {
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    labels: Option<String>,
    /// Comma-separated input sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 80, 50, 30])]
    cycle_counts: Vec<usize>,
    /// Also benchmark each batch separately.
    #[arg(long)]
    per_batch: bool,
}

pub fn benchmark(ctx: &Context, args: BenchmarkArgs) -> Result<()> {
    ctx.prepare_out()?;
    let cells = ctx.load_cells(args.data.as_deref())?;
    let labels = ctx.load_labels(args.labels.as_deref())?;
    let split_seed = ctx.seed.unwrap_or(1);
    let lambdas = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
    let rhos = [0.1, 0.5, 0.9];

    let mut scopes: Vec<(String, Vec<CellRecord>)> = vec![("all".into(), cells.clone())];
    if args.per_batch {
        for batch in [1u8, 2, 3] {
            let subset: Vec<CellRecord> =
                cells.iter().filter(|c| c.batch == batch).cloned().collect();
            if !subset.is_empty() {
                scopes.push((format!("batch{}", batch), subset));
            }
        }
    }

    let path = ctx.out.join("benchmark.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["scope", "n_cy", "lambda", "rho", "val_rmse", "test_rmse"])?;
    for (scope, subset) in &scopes {
        for &n_cy in &args.cycle_counts {
            match elastic_net_benchmark(subset, &labels, split_seed, n_cy, &lambdas, &rhos) {
                Ok(res) => {
                    w.write_record([
                        scope.clone(),
                        n_cy.to_string(),
                        res.lambda.to_string(),
                        res.rho.to_string(),
                        res.val_rmse.to_string(),
                        res.test_rmse.to_string(),
                    ])?;
                    println!("{} n_cy={}: test RMSE {:.2}", scope, n_cy, res.test_rmse);
                }
                Err(e) => log::warn!("{} n_cy={}: {}", scope, n_cy, e),
            }
        }
    }
    w.flush()?;
    ctx.write_run_config(&serde_json::json!({
        "command": "benchmark", "cycle_counts": args.cycle_counts,
        "split_seed": split_seed, "per_batch": args.per_batch,
    }))?;
    println!("benchmark table in {}", path.display());
    Ok(())
}

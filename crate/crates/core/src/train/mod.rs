//! Supervised training: full-batch RMSE objective, Adam updates, early
//! stopping on validation loss, multi-seed runs, and grid sweeps.

use crate::autodiff::{Tape, Tensor};
use crate::data::{build_raw_matrix, CellRecord, InputTensor, Normalizer, PreprocessOptions};
use crate::error::{Error, Result};
use crate::knee::KneeLabel;
use crate::model::{forward_batch, BatchData, Checkpoint, CnnConfig, ModelConfig, ModelParams};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// Root mean squared error in the units of its inputs.
pub fn rmse(preds: &[f64], targets: &[f64]) -> f64 {
    assert!(
        !preds.is_empty() && preds.len() == targets.len(),
        "contract violation: rmse over {} predictions vs {} targets",
        preds.len(),
        targets.len()
    );
    let mse = preds
        .iter()
        .zip(targets)
        .map(|(&p, &t)| (p - t) * (p - t))
        .sum::<f64>()
        / preds.len() as f64;
    mse.sqrt()
}

/// RMSE of predicting the training-target mean for every test cell.
pub fn constant_baseline_rmse(train_targets: &[f64], test_targets: &[f64]) -> f64 {
    let mean = train_targets.iter().sum::<f64>() / train_targets.len() as f64;
    rmse(&vec![mean; test_targets.len()], test_targets)
}

// ── Adam ─────────────────────────────────────────────────────────────

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// First/second moment accumulators, one pair per parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: u64,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        let mut m = Vec::new();
        params.visit(&mut |_, t| m.push(vec![0.0; t.numel()]));
        AdamState {
            v: m.clone(),
            m,
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update. `grads` must follow `visit` order.
pub fn adam_step(params: &mut ModelParams, grads: &[Tensor], state: &mut AdamState, lr: f64) {
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - ADAM_BETA1.powi(t);
    let bc2 = 1.0 - ADAM_BETA2.powi(t);
    let mut k = 0usize;
    params.visit_mut(&mut |_, tensor| {
        let g = grads[k].data();
        let (m, v) = (&mut state.m[k], &mut state.v[k]);
        let p = tensor.data_mut();
        for i in 0..p.len() {
            m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g[i];
            v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g[i] * g[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
        k += 1;
    });
    assert_eq!(k, grads.len(), "gradient count mismatch");
}

// ── splits ───────────────────────────────────────────────────────────

/// Seeded train/validation/test split. The full 124-cell corpus uses the
/// published 80/20/24 counts; other sizes scale proportionally with floor
/// rounding and the remainder going to train.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedSplit {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

pub fn split_counts(n: usize) -> (usize, usize, usize) {
    if n == 124 {
        return (80, 20, 24);
    }
    let val = n * 20 / 124;
    let test = n * 24 / 124;
    (n - val - test, val, test)
}

/// Shuffle the sorted usable cell ids and deal them out.
pub fn resolve_split(cell_ids: &[String], seed: u64) -> ResolvedSplit {
    let mut ids = cell_ids.to_vec();
    ids.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let (n_train, n_val, _) = split_counts(ids.len());
    let mut split = ResolvedSplit {
        train: ids[..n_train].to_vec(),
        val: ids[n_train..n_train + n_val].to_vec(),
        test: ids[n_train + n_val..].to_vec(),
    };
    split.train.sort();
    split.val.sort();
    split.test.sort();
    split
}

/// Cells that can be trained on: labeled and long enough for `n_cy`.
pub fn usable_cells(
    cells: &[CellRecord],
    labels: &BTreeMap<String, KneeLabel>,
    n_cy: usize,
) -> Vec<String> {
    let mut ids: Vec<String> = cells
        .iter()
        .filter(|c| c.cycles.len() >= n_cy && labels.contains_key(&c.cell_id))
        .map(|c| c.cell_id.clone())
        .collect();
    ids.sort();
    ids
}

// ── prepared data ────────────────────────────────────────────────────

/// One split's tensors, normalizers, and targets, ready for epochs.
pub struct PreparedData {
    pub split: ResolvedSplit,
    pub input_norm: Normalizer,
    pub target_range: (f64, f64),
    pub train: SubsetData,
    pub val: SubsetData,
    pub test: SubsetData,
}

pub struct SubsetData {
    pub batch: BatchData,
    /// Raw knee-onset targets in cycles, aligned with batch cells.
    pub targets: Vec<f64>,
}

impl SubsetData {
    fn normalized_targets(&self, range: (f64, f64)) -> Vec<f64> {
        let (lo, hi) = range;
        let span = if hi > lo { hi - lo } else { 1.0 };
        self.targets.iter().map(|&t| (t - lo) / span).collect()
    }
}

/// Build matrices for every split member. The normalizer and target range
/// are fit on the training split only, so validation and test cells never
/// influence the model.
pub fn prepare(
    cells: &[CellRecord],
    labels: &BTreeMap<String, KneeLabel>,
    split: &ResolvedSplit,
    config: &ModelConfig,
    opts: &PreprocessOptions,
) -> Result<PreparedData> {
    config.validate()?;
    let by_id: BTreeMap<&str, &CellRecord> =
        cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();
    let lookup = |id: &String| -> Result<&CellRecord> {
        by_id
            .get(id.as_str())
            .copied()
            .ok_or_else(|| Error::contract(format!("split names unknown cell {}", id)))
    };

    let mut train_raw = Vec::with_capacity(split.train.len());
    for id in &split.train {
        train_raw.push(build_raw_matrix(
            lookup(id)?,
            config.variant,
            config.n_cy,
            opts,
        )?);
    }
    let input_norm = Normalizer::fit(train_raw.iter());

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for id in &split.train {
        let c_ko = labels[id].c_ko;
        lo = lo.min(c_ko);
        hi = hi.max(c_ko);
    }

    let subset = |ids: &[String]| -> Result<SubsetData> {
        let mut inputs = Vec::with_capacity(ids.len());
        let mut targets = Vec::with_capacity(ids.len());
        for id in ids {
            let rec = lookup(id)?;
            inputs.push(InputTensor {
                cell_id: id.clone(),
                variant: config.variant,
                n_cy: config.n_cy,
                data: input_norm.apply(&build_raw_matrix(rec, config.variant, config.n_cy, opts)?),
                norm: input_norm.ranges.clone(),
            });
            targets.push(
                labels
                    .get(id)
                    .ok_or_else(|| Error::contract(format!("cell {} has no label", id)))?
                    .c_ko,
            );
        }
        let refs: Vec<&InputTensor> = inputs.iter().collect();
        Ok(SubsetData {
            batch: BatchData::from_inputs(&refs)?,
            targets,
        })
    };

    let train = subset(&split.train)?;
    let val = subset(&split.val)?;
    let test = subset(&split.test)?;
    Ok(PreparedData {
        split: split.clone(),
        input_norm,
        target_range: (lo, hi),
        train,
        val,
        test,
    })
}

// ── training loop ────────────────────────────────────────────────────

/// Early-stopping bookkeeping: track the best validation loss and stop
/// once `patience` epochs pass without improvement.
#[derive(Debug, Clone)]
pub struct EarlyStopper {
    patience: usize,
    best: f64,
    best_epoch: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    NewBest,
    Continue,
    Stop,
}

impl EarlyStopper {
    pub fn new(patience: usize) -> Self {
        EarlyStopper {
            patience,
            best: f64::INFINITY,
            best_epoch: 0,
        }
    }

    pub fn observe(&mut self, epoch: usize, val_loss: f64) -> StopDecision {
        if val_loss < self.best {
            self.best = val_loss;
            self.best_epoch = epoch;
            StopDecision::NewBest
        } else if epoch - self.best_epoch >= self.patience {
            StopDecision::Stop
        } else {
            StopDecision::Continue
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best
    }
}

/// Loop controls. Full-batch gradients; `patience` epochs without a new
/// validation best stop the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainSpec {
    pub lr: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub seeds: Vec<u64>,
}

impl Default for TrainSpec {
    fn default() -> Self {
        TrainSpec {
            lr: 1e-2,
            max_epochs: 3000,
            patience: 500,
            seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Training RMSE in cycles at the parameters entering the epoch.
    pub train_rmse: f64,
    /// Validation RMSE in cycles after the epoch's update.
    pub val_rmse: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedReport {
    pub seed: u64,
    pub best_epoch: usize,
    pub train_rmse: f64,
    pub val_rmse: f64,
    pub test_rmse: f64,
    pub diverged: bool,
    pub wall_time_s: f64,
    pub epochs: Vec<EpochRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: ModelConfig,
    pub split_seed: u64,
    pub per_seed: Vec<SeedReport>,
    pub mean_test_rmse: f64,
    pub std_test_rmse: f64,
    pub wall_time_s: f64,
}

pub struct TrainOutcome {
    pub report: SeedReport,
    pub checkpoint: Checkpoint,
}

/// Predictions in cycles for one subset at the given parameters.
pub fn predict_cycles(
    params: &ModelParams,
    config: &ModelConfig,
    subset: &SubsetData,
    target_range: (f64, f64),
) -> Result<Vec<f64>> {
    let mut tape = Tape::new();
    let fwd = forward_batch(&mut tape, params, config, &subset.batch)?;
    let (lo, hi) = target_range;
    Ok(tape
        .value(fwd.preds)
        .data()
        .iter()
        .map(|&p| lo + p * (hi - lo))
        .collect())
}

fn subset_rmse(
    params: &ModelParams,
    config: &ModelConfig,
    subset: &SubsetData,
    target_range: (f64, f64),
) -> Result<f64> {
    Ok(rmse(
        &predict_cycles(params, config, subset, target_range)?,
        &subset.targets,
    ))
}

/// Train one (config, seed) pair end to end: resolve the split from the
/// seed, prepare tensors, and run the loop.
pub fn train_run(
    cells: &[CellRecord],
    labels: &BTreeMap<String, KneeLabel>,
    config: &ModelConfig,
    spec: &TrainSpec,
    opts: &PreprocessOptions,
    seed: u64,
) -> Result<TrainOutcome> {
    let ids = usable_cells(cells, labels, config.n_cy);
    if ids.is_empty() {
        return Err(Error::contract("no usable labeled cells"));
    }
    let split = resolve_split(&ids, seed);
    let prep = prepare(cells, labels, &split, config, opts)?;
    train_prepared(&prep, config, spec, seed)
}

/// Train on an already-prepared split (the split is not re-derived from
/// the seed; only initialization uses it).
pub fn train_prepared(
    prep: &PreparedData,
    config: &ModelConfig,
    spec: &TrainSpec,
    seed: u64,
) -> Result<TrainOutcome> {
    let started = Instant::now();
    let run_config = ModelConfig {
        seed,
        ..config.clone()
    };
    run_config.validate()?;
    let mut params = ModelParams::init(&run_config)?;
    let mut adam = AdamState::new(&params);

    let targets_norm = prep.train.normalized_targets(prep.target_range);
    let span = (prep.target_range.1 - prep.target_range.0).max(1e-12);

    let mut best_params = params.clone();
    let mut stopper = EarlyStopper::new(spec.patience);
    let mut epochs = Vec::new();
    let mut diverged = false;

    for epoch in 1..=spec.max_epochs {
        let mut tape = Tape::new();
        let fwd = forward_batch(&mut tape, &params, &run_config, &prep.train.batch)?;
        let target_var = tape.leaf(Tensor::matrix(targets_norm.len(), 1, targets_norm.clone()));
        let diff = tape.sub(fwd.preds, target_var);
        let sq = tape.mul(diff, diff);
        // Descend on the mean square; the square root shares its minimizer
        // but keeps gradient magnitude from decaying near it, which makes
        // full-batch Adam oscillate. Losses are still reported as RMSE.
        let loss = tape.mean(sq);
        let loss_val = tape.value(loss).scalar_value().sqrt();
        if !loss_val.is_finite() {
            diverged = true;
            break;
        }
        tape.backward(loss);
        let grads = ModelParams::collect_grads(&tape, &fwd.vars);
        if grads.iter().any(|g| !g.all_finite()) {
            diverged = true;
            break;
        }
        adam_step(&mut params, &grads, &mut adam, spec.lr);

        let val_rmse = subset_rmse(&params, &run_config, &prep.val, prep.target_range)?;
        epochs.push(EpochRecord {
            epoch,
            train_rmse: loss_val * span,
            val_rmse,
        });
        match stopper.observe(epoch, val_rmse) {
            StopDecision::NewBest => best_params = params.clone(),
            StopDecision::Continue => {}
            StopDecision::Stop => break,
        }
    }

    if stopper.best_epoch() == 0 {
        // Nothing improved (or the first epoch diverged); keep the init.
        best_params = params.clone();
    }
    let report = SeedReport {
        seed,
        best_epoch: stopper.best_epoch(),
        train_rmse: subset_rmse(&best_params, &run_config, &prep.train, prep.target_range)?,
        val_rmse: if stopper.best_loss().is_finite() {
            stopper.best_loss()
        } else {
            subset_rmse(&best_params, &run_config, &prep.val, prep.target_range)?
        },
        test_rmse: subset_rmse(&best_params, &run_config, &prep.test, prep.target_range)?,
        diverged,
        wall_time_s: started.elapsed().as_secs_f64(),
        epochs,
    };
    let checkpoint = Checkpoint::new(
        &run_config,
        &best_params,
        prep.input_norm.clone(),
        prep.target_range,
    );
    Ok(TrainOutcome { report, checkpoint })
}

/// Train every seed; each seed drives both the split and initialization.
/// Returns the aggregate report plus the per-seed checkpoints.
pub fn train_multi_seed(
    cells: &[CellRecord],
    labels: &BTreeMap<String, KneeLabel>,
    config: &ModelConfig,
    spec: &TrainSpec,
    opts: &PreprocessOptions,
    jobs: usize,
) -> Result<(TrainReport, Vec<Checkpoint>)> {
    let started = Instant::now();
    let results = run_parallel(jobs, &spec.seeds, |&seed| {
        train_run(cells, labels, config, spec, opts, seed)
    })?;

    let per_seed: Vec<SeedReport> = results.iter().map(|o| o.report.clone()).collect();
    let tests: Vec<f64> = per_seed.iter().map(|r| r.test_rmse).collect();
    let mean = tests.iter().sum::<f64>() / tests.len() as f64;
    let var = tests.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / tests.len() as f64;
    let report = TrainReport {
        config: config.clone(),
        split_seed: spec.seeds.first().copied().unwrap_or(0),
        per_seed,
        mean_test_rmse: mean,
        std_test_rmse: var.sqrt(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    Ok((report, results.into_iter().map(|o| o.checkpoint).collect()))
}

/// Run independent work items on up to `jobs` workers, preserving input
/// order in the output.
pub fn run_parallel<T: Sync, R: Send>(
    jobs: usize,
    items: &[T],
    f: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<R>>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("worker filled slot"))
        .collect()
}

// ── grid search ──────────────────────────────────────────────────────

/// Hyperparameter grid; the cross product is trained per seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub lrs: Vec<f64>,
    pub h_sizes: Vec<usize>,
    pub n_hes: Vec<usize>,
    pub filters: Vec<usize>,
    pub kernels: Vec<usize>,
    pub n_pools: Vec<usize>,
    pub n_nopools: Vec<usize>,
}

impl GridSpec {
    /// The published sweep for the attention models: five learning rates,
    /// initial filters {3,5,7}, kernel 3, one or two pooling and
    /// non-pooling layers, hidden sizes {3,5,7}, heads 1-5 when CA is
    /// present.
    pub fn table_defaults(has_ca: bool) -> GridSpec {
        GridSpec {
            lrs: vec![1e-4, 5e-4, 1e-3, 5e-3, 1e-2],
            h_sizes: vec![3, 5, 7],
            n_hes: if has_ca { vec![1, 2, 3, 4, 5] } else { vec![0] },
            filters: vec![3, 5, 7],
            kernels: vec![3],
            n_pools: vec![1, 2],
            n_nopools: vec![1, 2],
        }
    }

    /// Enumerate configs (paired with learning rates) over a base config.
    pub fn enumerate(&self, base: &ModelConfig) -> Vec<(ModelConfig, f64)> {
        let mut out = Vec::new();
        for &lr in &self.lrs {
            for &h in &self.h_sizes {
                for &n_he in &self.n_hes {
                    for &f_i in &self.filters {
                        for &k in &self.kernels {
                            for &n_p in &self.n_pools {
                                for &n_np in &self.n_nopools {
                                    let cfg = ModelConfig {
                                        h_size: h,
                                        n_he,
                                        cnn: CnnConfig {
                                            filters_init: f_i,
                                            kernel: k,
                                            n_pool: n_p,
                                            n_nopool: n_np,
                                            dense_width: base.cnn.dense_width,
                                        },
                                        ..base.clone()
                                    };
                                    if cfg.validate().is_ok() {
                                        out.push((cfg, lr));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridEntry {
    pub config: ModelConfig,
    pub lr: f64,
    pub seed: u64,
    pub best_epoch: usize,
    pub train_rmse: f64,
    pub val_rmse: f64,
    pub test_rmse: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfigSummary {
    pub config: ModelConfig,
    pub lr: f64,
    pub mean_val_rmse: f64,
    pub mean_test_rmse: f64,
    pub std_test_rmse: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridReport {
    pub entries: Vec<GridEntry>,
    pub summaries: Vec<GridConfigSummary>,
    /// Index into `summaries` of the minimal mean validation RMSE.
    pub best: usize,
}

/// Train every grid combination for every seed and pick the config with
/// the lowest mean validation RMSE. Work items run in parallel but the
/// report is assembled in enumeration order, so permuting the grid does
/// not change any per-config result.
pub fn grid_search(
    cells: &[CellRecord],
    labels: &BTreeMap<String, KneeLabel>,
    base: &ModelConfig,
    grid: &GridSpec,
    train_spec: &TrainSpec,
    opts: &PreprocessOptions,
    jobs: usize,
) -> Result<GridReport> {
    let combos = grid.enumerate(base);
    if combos.is_empty() {
        return Err(Error::config("hyperparameter grid is empty"));
    }
    let mut work = Vec::new();
    for (cfg, lr) in &combos {
        for &seed in &train_spec.seeds {
            work.push((cfg.clone(), *lr, seed));
        }
    }
    let outcomes = run_parallel(jobs, &work, |(cfg, lr, seed)| {
        let spec = TrainSpec {
            lr: *lr,
            seeds: vec![*seed],
            ..train_spec.clone()
        };
        train_run(cells, labels, cfg, &spec, opts, *seed)
    })?;

    let entries: Vec<GridEntry> = work
        .iter()
        .zip(&outcomes)
        .map(|((cfg, lr, seed), o)| GridEntry {
            config: cfg.clone(),
            lr: *lr,
            seed: *seed,
            best_epoch: o.report.best_epoch,
            train_rmse: o.report.train_rmse,
            val_rmse: o.report.val_rmse,
            test_rmse: o.report.test_rmse,
            diverged: o.report.diverged,
        })
        .collect();

    let n_seeds = train_spec.seeds.len();
    let mut summaries = Vec::with_capacity(combos.len());
    for (ci, (cfg, lr)) in combos.iter().enumerate() {
        let rows = &entries[ci * n_seeds..(ci + 1) * n_seeds];
        let mean = |f: &dyn Fn(&GridEntry) -> f64| {
            rows.iter().map(|e| f(e)).sum::<f64>() / rows.len() as f64
        };
        let mean_val = mean(&|e| e.val_rmse);
        let mean_test = mean(&|e| e.test_rmse);
        let var_test = rows
            .iter()
            .map(|e| (e.test_rmse - mean_test) * (e.test_rmse - mean_test))
            .sum::<f64>()
            / rows.len() as f64;
        summaries.push(GridConfigSummary {
            config: cfg.clone(),
            lr: *lr,
            mean_val_rmse: mean_val,
            mean_test_rmse: mean_test,
            std_test_rmse: var_test.sqrt(),
        });
    }
    let best = summaries
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.mean_val_rmse.partial_cmp(&b.1.mean_val_rmse).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    Ok(GridReport {
        entries,
        summaries,
        best,
    })
}

/// grid-csv: one row per (config, seed).
pub fn save_grid_csv(path: &Path, report: &GridReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "architecture",
        "lr",
        "h_size",
        "n_he",
        "f_i",
        "k_i",
        "n_p",
        "n_np",
        "n_cy",
        "seed",
        "best_epoch",
        "train_rmse",
        "val_rmse",
        "test_rmse",
        "diverged",
    ])?;
    for e in &report.entries {
        w.write_record([
            e.config.architecture.to_string(),
            e.lr.to_string(),
            e.config.h_size.to_string(),
            e.config.n_he.to_string(),
            e.config.cnn.filters_init.to_string(),
            e.config.cnn.kernel.to_string(),
            e.config.cnn.n_pool.to_string(),
            e.config.cnn.n_nopool.to_string(),
            e.config.n_cy.to_string(),
            e.seed.to_string(),
            e.best_epoch.to_string(),
            e.train_rmse.to_string(),
            e.val_rmse.to_string(),
            e.test_rmse.to_string(),
            e.diverged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

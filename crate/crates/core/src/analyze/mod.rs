//! Attention-score aggregation, input-size recommendation, batch
//! statistics, and the sparse-regression benchmark.

mod elastic_net;
mod export;

pub use elastic_net::{elastic_net_fit, elastic_net_objective, soft_threshold, ElasticNetFit};
pub use export::{save_matrix_csv, save_pgm};

use crate::autodiff::{Tape, Tensor};
use crate::data::{CellRecord, InputTensor, PreprocessOptions, Variant};
use crate::error::{Error, Result};
use crate::knee::KneeLabel;
use crate::model::{forward_batch, BatchData, Checkpoint};
use crate::train::{resolve_split, rmse, usable_cells};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Which attention scores to export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    Ta,
    Ca,
    Both,
}

impl ScoreKind {
    pub fn wants_ta(self) -> bool {
        matches!(self, ScoreKind::Ta | ScoreKind::Both)
    }

    pub fn wants_ca(self) -> bool {
        matches!(self, ScoreKind::Ca | ScoreKind::Both)
    }
}

/// Batch-averaged attention matrices from one checkpoint.
#[derive(Debug, Clone)]
pub struct AttentionReport {
    pub checkpoint_id: String,
    pub variant: Variant,
    pub n_cy: usize,
    /// Batch id -> mean TA matrix (cycle x timestep).
    pub ta: BTreeMap<u8, Tensor>,
    /// Batch id -> per-head mean CA matrix (query x key).
    pub ca: BTreeMap<u8, Vec<Tensor>>,
    /// Batch id -> cells that entered the average.
    pub population: BTreeMap<u8, Vec<String>>,
}

fn mean_matrices(mats: &[&Tensor]) -> Tensor {
    let first = mats[0];
    let mut acc = vec![0.0; first.numel()];
    for m in mats {
        for (a, &v) in acc.iter_mut().zip(m.data()) {
            *a += v;
        }
    }
    let n = mats.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    Tensor::new(first.shape().to_vec(), acc)
}

/// Run the checkpoint forward over the named cells and average TA and CA
/// scores within each batch.
pub fn export_attention(
    ckpt: &Checkpoint,
    cells: &[CellRecord],
    population: &[String],
    kind: ScoreKind,
    opts: &PreprocessOptions,
) -> Result<AttentionReport> {
    let arch = ckpt.config.architecture;
    if kind.wants_ta() && !arch.has_ta() {
        return Err(Error::ScoresNotAvailable("TA", arch.to_string()));
    }
    if kind.wants_ca() && !arch.has_ca() {
        return Err(Error::ScoresNotAvailable("CA", arch.to_string()));
    }
    let params = ckpt.to_params()?;

    let by_id: BTreeMap<&str, &CellRecord> =
        cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();
    let mut by_batch: BTreeMap<u8, Vec<&CellRecord>> = BTreeMap::new();
    for id in population {
        let rec = by_id
            .get(id.as_str())
            .ok_or_else(|| Error::contract(format!("population names unknown cell {}", id)))?;
        by_batch.entry(rec.batch).or_default().push(rec);
    }

    let mut report = AttentionReport {
        checkpoint_id: ckpt.id.clone(),
        variant: ckpt.config.variant,
        n_cy: ckpt.config.n_cy,
        ta: BTreeMap::new(),
        ca: BTreeMap::new(),
        population: BTreeMap::new(),
    };

    for (batch_id, members) in by_batch {
        let mut inputs = Vec::with_capacity(members.len());
        for rec in &members {
            let raw =
                crate::data::build_raw_matrix(rec, ckpt.config.variant, ckpt.config.n_cy, opts)?;
            inputs.push(InputTensor {
                cell_id: rec.cell_id.clone(),
                variant: ckpt.config.variant,
                n_cy: ckpt.config.n_cy,
                data: ckpt.input_norm.apply(&raw),
                norm: ckpt.input_norm.ranges.clone(),
            });
        }
        let refs: Vec<&InputTensor> = inputs.iter().collect();
        let batch = BatchData::from_inputs(&refs)?;
        let mut tape = Tape::new();
        let fwd = forward_batch(&mut tape, &params, &ckpt.config, &batch)?;

        if kind.wants_ta() {
            let tas: Vec<&Tensor> = fwd
                .scores
                .iter()
                .map(|s| s.ta.as_ref().expect("TA present"))
                .collect();
            report.ta.insert(batch_id, mean_matrices(&tas));
        }
        if kind.wants_ca() {
            let n_heads = fwd.scores[0].ca.len();
            let mut heads = Vec::with_capacity(n_heads);
            for p in 0..n_heads {
                let mats: Vec<&Tensor> = fwd.scores.iter().map(|s| &s.ca[p]).collect();
                heads.push(mean_matrices(&mats));
            }
            report.ca.insert(batch_id, heads);
        }
        report.population.insert(
            batch_id,
            members.iter().map(|r| r.cell_id.clone()).collect(),
        );
    }
    Ok(report)
}

/// Default attention-averaging population: validation plus test cells,
/// per the analyzer's configurable-population decision.
pub fn default_population(
    cells: &[CellRecord],
    labels: &BTreeMap<String, KneeLabel>,
    n_cy: usize,
    split_seed: u64,
) -> Vec<String> {
    let ids = usable_cells(cells, labels, n_cy);
    let split = resolve_split(&ids, split_seed);
    let mut pop = split.val;
    pop.extend(split.test);
    pop.sort();
    pop
}

impl AttentionReport {
    /// Write per-batch CSV matrices and PGM heatmaps into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (batch, ta) in &self.ta {
            save_matrix_csv(&dir.join(format!("ta_batch{}.csv", batch)), ta)?;
            save_pgm(&dir.join(format!("ta_batch{}.pgm", batch)), ta)?;
        }
        for (batch, heads) in &self.ca {
            for (p, ca) in heads.iter().enumerate() {
                save_matrix_csv(
                    &dir.join(format!("ca_batch{}_head{}.csv", batch, p + 1)),
                    ca,
                )?;
                save_pgm(
                    &dir.join(format!("ca_batch{}_head{}.pgm", batch, p + 1)),
                    ca,
                )?;
            }
        }
        Ok(())
    }
}

// ── key-cycle importance and input reduction ─────────────────────────

/// Mean attention received by each key cycle, over heads, batches, and
/// query cycles. A probability vector.
pub fn key_importance<'a>(ca_matrices: impl IntoIterator<Item = &'a Tensor>) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for m in ca_matrices {
        let (rows, cols) = (m.rows(), m.cols());
        assert_eq!(rows, cols, "CA matrices must be square");
        if acc.is_empty() {
            acc = vec![0.0; cols];
        }
        assert_eq!(acc.len(), cols, "CA matrices must share n_cy");
        for q in 0..rows {
            for (k, &v) in m.row(q).iter().enumerate() {
                acc[k] += v;
            }
        }
        count += rows;
    }
    assert!(count > 0, "contract violation: no CA matrices");
    for a in &mut acc {
        *a /= count as f64;
    }
    acc
}

pub const ALLOWED_INPUT_SIZES: [usize; 4] = [30, 50, 80, 100];
pub const DEFAULT_COVERAGE_TAU: f64 = 0.90;

/// Input-size recommendation derived from the key-importance profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub importance: Vec<f64>,
    /// Keys with importance above this (0.5 x max) count as high-score.
    pub threshold: f64,
    pub coverage_tau: f64,
    pub allowed: Vec<usize>,
    pub recommended_n_cy: usize,
    /// Set when no allowed size satisfied both rules and the largest was
    /// returned as a fallback.
    pub fallback: bool,
}

impl ReductionPlan {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        use std::io::Write;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// Pick the smallest allowed input size that covers every high-importance
/// key cycle and captures at least `tau` of the total importance mass.
pub fn recommend_input_size(importance: &[f64], allowed: &[usize], tau: f64) -> ReductionPlan {
    let total: f64 = importance.iter().sum();
    assert!(
        (total - 1.0).abs() < 1e-6,
        "contract violation: importance must sum to 1, got {}",
        total
    );
    let max = importance.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = 0.5 * max;
    let last_marked = importance
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > threshold)
        .map(|(k, _)| k)
        .max()
        .unwrap_or(0);

    let mut sorted: Vec<usize> = allowed.to_vec();
    sorted.sort_unstable();
    let prefix_mass = |v: usize| -> f64 { importance.iter().take(v).sum() };
    for &v in &sorted {
        if v >= last_marked + 1 && prefix_mass(v) >= tau {
            return ReductionPlan {
                importance: importance.to_vec(),
                threshold,
                coverage_tau: tau,
                allowed: sorted.clone(),
                recommended_n_cy: v,
                fallback: false,
            };
        }
    }
    let fallback_size = sorted.last().copied().unwrap_or(importance.len());
    log::warn!(
        "no allowed input size covers the high-importance keys; falling back to {}",
        fallback_size
    );
    ReductionPlan {
        importance: importance.to_vec(),
        threshold,
        coverage_tau: tau,
        allowed: sorted,
        recommended_n_cy: fallback_size,
        fallback: true,
    }
}

// ── batch statistics ─────────────────────────────────────────────────

/// Mean two-step C-rate over a batch of cells.
pub fn average_crate(cells: &[&CellRecord]) -> f64 {
    assert!(!cells.is_empty(), "contract violation: empty batch");
    cells.iter().map(|c| c.policy.average_c_rate()).sum::<f64>() / cells.len() as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchStats {
    pub batch: u8,
    pub n_cells: usize,
    pub mean_knee_onset: f64,
    /// Population standard deviation.
    pub std_knee_onset: f64,
    pub mean_c_rate: f64,
}

/// Per-batch knee-onset and C-rate statistics. Batches without any
/// labeled cell are omitted with a warning.
pub fn batch_stats(cells: &[CellRecord], labels: &BTreeMap<String, KneeLabel>) -> Vec<BatchStats> {
    let mut batches: BTreeMap<u8, Vec<&CellRecord>> = BTreeMap::new();
    for c in cells {
        batches.entry(c.batch).or_default().push(c);
    }
    let mut out = Vec::new();
    for (batch, members) in batches {
        let knees: Vec<f64> = members
            .iter()
            .filter_map(|c| labels.get(&c.cell_id).map(|l| l.c_ko))
            .collect();
        if knees.is_empty() {
            log::warn!(
                "batch {} has no labeled cells; omitting from statistics",
                batch
            );
            continue;
        }
        let mean = knees.iter().sum::<f64>() / knees.len() as f64;
        let var = knees.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / knees.len() as f64;
        out.push(BatchStats {
            batch,
            n_cells: members.len(),
            mean_knee_onset: mean,
            std_knee_onset: var.sqrt(),
            mean_c_rate: average_crate(&members),
        });
    }
    out
}

// ── elastic net benchmark ────────────────────────────────────────────

/// Per-cycle summary features (mean, std, min, max of V, I, T) for
/// cycles 1..n_cy, flattened.
pub fn vit_summary_features(record: &CellRecord, n_cy: usize) -> Result<Vec<f64>> {
    if record.cycles.len() < n_cy {
        return Err(Error::contract(format!(
            "cell {} has {} cycles, needs {}",
            record.cell_id,
            record.cycles.len(),
            n_cy
        )));
    }
    let mut out = Vec::with_capacity(n_cy * 12);
    for cy in &record.cycles[..n_cy] {
        for series in [&cy.voltage, &cy.current, &cy.temp] {
            let n = series.len() as f64;
            let mean = series.iter().sum::<f64>() / n;
            let var = series.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let min = series.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            out.extend_from_slice(&[mean, var.sqrt(), min, max]);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub n_cy: usize,
    pub lambda: f64,
    pub rho: f64,
    pub val_rmse: f64,
    pub test_rmse: f64,
}

/// Elastic-net knee-onset regression on per-cycle V/I/T summaries.
/// `lambdas` and `rhos` are searched on the validation split.
pub fn elastic_net_benchmark(
    cells: &[CellRecord],
    labels: &BTreeMap<String, KneeLabel>,
    split_seed: u64,
    n_cy: usize,
    lambdas: &[f64],
    rhos: &[f64],
) -> Result<BenchmarkResult> {
    let ids = usable_cells(cells, labels, n_cy);
    if ids.is_empty() {
        return Err(Error::contract("no usable labeled cells for the benchmark"));
    }
    let split = resolve_split(&ids, split_seed);
    let by_id: BTreeMap<&str, &CellRecord> =
        cells.iter().map(|c| (c.cell_id.as_str(), c)).collect();

    let gather = |ids: &[String]| -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let mut xs = Vec::with_capacity(ids.len());
        let mut ys = Vec::with_capacity(ids.len());
        for id in ids {
            xs.push(vit_summary_features(by_id[id.as_str()], n_cy)?);
            ys.push(labels[id].c_ko);
        }
        Ok((xs, ys))
    };
    let (x_train, y_train) = gather(&split.train)?;
    let (x_val, y_val) = gather(&split.val)?;
    let (x_test, y_test) = gather(&split.test)?;

    // Standardize features on training statistics.
    let p = x_train[0].len();
    let n = x_train.len() as f64;
    let mut mean = vec![0.0; p];
    for row in &x_train {
        for (j, &v) in row.iter().enumerate() {
            mean[j] += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut std = vec![0.0; p];
    for row in &x_train {
        for (j, &v) in row.iter().enumerate() {
            std[j] += (v - mean[j]) * (v - mean[j]);
        }
    }
    for s in &mut std {
        *s = (*s / n).sqrt();
    }
    let scale = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        if std[j] > 0.0 {
                            (v - mean[j]) / std[j]
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let (x_train, x_val, x_test) = (scale(&x_train), scale(&x_val), scale(&x_test));

    let mut best: Option<(f64, f64, f64, ElasticNetFit)> = None;
    for &lambda in lambdas {
        for &rho in rhos {
            let fit = elastic_net_fit(&x_train, &y_train, lambda, rho, 2000, 1e-9);
            let preds: Vec<f64> = x_val
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(&fit.weights)
                        .map(|(&a, &b)| a * b)
                        .sum::<f64>()
                        + fit.intercept
                })
                .collect();
            let val = rmse(&preds, &y_val);
            if best.as_ref().map_or(true, |(v, ..)| val < *v) {
                best = Some((val, lambda, rho, fit));
            }
        }
    }
    let (val_rmse, lambda, rho, fit) =
        best.ok_or_else(|| Error::config("empty lambda/rho grid"))?;
    let preds: Vec<f64> = x_test
        .iter()
        .map(|r| {
            r.iter()
                .zip(&fit.weights)
                .map(|(&a, &b)| a * b)
                .sum::<f64>()
                + fit.intercept
        })
        .collect();
    Ok(BenchmarkResult {
        n_cy,
        lambda,
        rho,
        val_rmse,
        test_rmse: rmse(&preds, &y_test),
    })
}

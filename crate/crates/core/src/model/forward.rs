//! Assembled architectures: batched forward over whole cell sets.
//!
//! The GRU treats every (cell, cycle) pair as an independent row and is
//! reset to zeros at each cycle boundary, so all cycles of all cells run
//! through the recurrence simultaneously. Per-cycle context vectors are
//! the last hidden state, or the temporal-attention mix of all hidden
//! states for TA architectures; CA architectures then refine each cell's
//! n_cy context vectors with (multi-head) self-attention before the CNN
//! head produces the scalar prediction in normalized target space.

use super::layers::{cnn_head, gru_sequence, multi_head_attention, ModelVars};
use super::{ModelConfig, ModelParams};
use crate::autodiff::{Tape, Tensor, Var};
use crate::data::InputTensor;
use crate::error::{Error, Result};

/// Attention scores captured from one cell's forward pass.
#[derive(Debug, Clone)]
pub struct CellScores {
    pub cell_id: String,
    /// n_cy x n_ts; rows are this cell's cycles.
    pub ta: Option<Tensor>,
    /// Per-head n_cy x n_cy score matrices (rows = query, cols = key).
    pub ca: Vec<Tensor>,
}

/// Pre-arranged per-timestep input matrices for a batch of cells.
///
/// Row `m * n_cy + j` of step `t` holds the n_v input values of cell m,
/// cycle j, timestep t. Building this is pure data movement, so it is
/// done once outside the tape and reused across epochs.
#[derive(Debug, Clone)]
pub struct BatchData {
    pub cell_ids: Vec<String>,
    pub n_cy: usize,
    pub n_ts: usize,
    pub n_v: usize,
    pub steps: Vec<Tensor>,
}

impl BatchData {
    pub fn from_inputs(inputs: &[&InputTensor]) -> Result<Self> {
        let first = inputs
            .first()
            .ok_or_else(|| Error::contract("empty input batch"))?;
        let (n_cy, n_ts, n_v) = (first.n_cy, first.n_ts(), first.n_v());
        for x in inputs {
            if x.n_cy != n_cy || x.variant != first.variant {
                return Err(Error::contract(format!(
                    "input tensor mismatch: cell {} has n_cy {} variant {}, expected {} {}",
                    x.cell_id, x.n_cy, x.variant, n_cy, first.variant
                )));
            }
        }
        let rows = inputs.len() * n_cy;
        let mut steps = Vec::with_capacity(n_ts);
        for t in 0..n_ts {
            let mut data = Vec::with_capacity(rows * n_v);
            for x in inputs {
                for j in 0..n_cy {
                    let col = j * n_ts + t;
                    for v in 0..n_v {
                        data.push(x.data.at(v, col));
                    }
                }
            }
            steps.push(Tensor::matrix(rows, n_v, data));
        }
        Ok(BatchData {
            cell_ids: inputs.iter().map(|x| x.cell_id.clone()).collect(),
            n_cy,
            n_ts,
            n_v,
            steps,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cell_ids.len()
    }
}

/// Result of a batched forward pass.
pub struct BatchForward {
    /// n_cells x 1 predictions in normalized target space.
    pub preds: Var,
    pub scores: Vec<CellScores>,
    pub vars: ModelVars,
}

/// Run `config.architecture` over a batch. The tape records everything,
/// so calling `tape.backward` on a loss built from `preds` yields
/// parameter gradients via `vars`.
pub fn forward_batch(
    tape: &mut Tape,
    params: &ModelParams,
    config: &ModelConfig,
    batch: &BatchData,
) -> Result<BatchForward> {
    if batch.n_cy != config.n_cy || batch.n_v != config.variant.n_v() {
        return Err(Error::contract(format!(
            "batch shape ({} cycles, {} vars) does not match config ({}, {})",
            batch.n_cy,
            batch.n_v,
            config.n_cy,
            config.variant.n_v()
        )));
    }
    let vars = params.vars(tape);
    let rows = batch.n_cells() * batch.n_cy;

    let step_vars: Vec<Var> = batch.steps.iter().map(|t| tape.leaf(t.clone())).collect();
    let h0 = tape.leaf(Tensor::zeros(vec![rows, config.h_size]));
    let hs = gru_sequence(tape, &vars.gru, &step_vars, h0);

    // Per-cycle context vectors, one row per (cell, cycle).
    let (contexts, ta_alpha) = match vars.ta_w_b {
        Some(w_b) => {
            let w_col = tape.transpose(w_b);
            let scored: Vec<Var> = hs.iter().map(|&h| tape.matmul(h, w_col)).collect();
            let logits = tape.concat_cols(&scored);
            let alpha = tape.softmax_rows(logits, 1.0);
            let mut ct: Option<Var> = None;
            for (t, &h) in hs.iter().enumerate() {
                let a_t = tape.slice_cols(alpha, t, t + 1);
                let weighted = tape.scale_rows(h, a_t);
                ct = Some(match ct {
                    Some(acc) => tape.add(acc, weighted),
                    None => weighted,
                });
            }
            (ct.expect("at least one timestep"), Some(alpha))
        }
        None => (*hs.last().expect("at least one timestep"), None),
    };

    let mut preds = Vec::with_capacity(batch.n_cells());
    let mut scores = Vec::with_capacity(batch.n_cells());
    for (m, cell_id) in batch.cell_ids.iter().enumerate() {
        let ct_cell = tape.slice_rows(contexts, m * batch.n_cy, (m + 1) * batch.n_cy);
        let (refined, ca_vars) = match &vars.mha {
            Some(mha) => {
                let (out, sc) = multi_head_attention(tape, ct_cell, mha);
                (out, sc)
            }
            None => (ct_cell, Vec::new()),
        };
        preds.push(cnn_head(tape, refined, &vars.cnn));

        let ta = ta_alpha.map(|alpha| {
            let full = tape.value(alpha);
            let mut rows_out = Vec::with_capacity(batch.n_cy);
            for j in 0..batch.n_cy {
                rows_out.push(full.row(m * batch.n_cy + j).to_vec());
            }
            Tensor::from_rows(&rows_out)
        });
        let ca = ca_vars.iter().map(|&v| tape.value(v).clone()).collect();
        scores.push(CellScores {
            cell_id: cell_id.clone(),
            ta,
            ca,
        });
    }

    Ok(BatchForward {
        preds: tape.concat_rows(&preds),
        scores,
        vars,
    })
}

/// Forward one cell; returns the normalized prediction and its scores.
pub fn forward_cell(
    tape: &mut Tape,
    params: &ModelParams,
    config: &ModelConfig,
    input: &InputTensor,
) -> Result<(f64, CellScores)> {
    let batch = BatchData::from_inputs(&[input])?;
    let fwd = forward_batch(tape, params, config, &batch)?;
    let pred = tape.value(fwd.preds).scalar_value();
    let scores = fwd.scores.into_iter().next().expect("one cell");
    Ok((pred, scores))
}

//! Layer primitives over the autodiff tape.
//!
//! Every function here works on matrices whose rows are independent
//! sequences, so one call can process a whole batch of (cell, cycle)
//! rows at once.

use super::{CnnParams, GruParams, MhaParams, ModelParams};
use crate::autodiff::{Tape, Tensor, Var};

/// Tape handles for GRU parameters.
#[derive(Debug, Clone)]
pub struct GruVars {
    pub w_update: Var,
    pub u_update: Var,
    pub b_update: Var,
    pub w_reset: Var,
    pub u_reset: Var,
    pub b_reset: Var,
    pub w_cand: Var,
    pub u_cand: Var,
    pub b_cand: Var,
}

impl GruParams {
    pub fn vars(&self, tape: &mut Tape) -> GruVars {
        GruVars {
            w_update: tape.leaf(self.w_update.clone()),
            u_update: tape.leaf(self.u_update.clone()),
            b_update: tape.leaf(self.b_update.clone()),
            w_reset: tape.leaf(self.w_reset.clone()),
            u_reset: tape.leaf(self.u_reset.clone()),
            b_reset: tape.leaf(self.b_reset.clone()),
            w_cand: tape.leaf(self.w_cand.clone()),
            u_cand: tape.leaf(self.u_cand.clone()),
            b_cand: tape.leaf(self.b_cand.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HeadVars {
    pub w_query: Var,
    pub w_key: Var,
    pub w_value: Var,
}

#[derive(Debug, Clone)]
pub struct MhaVars {
    pub heads: Vec<HeadVars>,
    pub w_out: Var,
}

impl MhaParams {
    pub fn vars(&self, tape: &mut Tape) -> MhaVars {
        MhaVars {
            heads: self
                .heads
                .iter()
                .map(|h| HeadVars {
                    w_query: tape.leaf(h.w_query.clone()),
                    w_key: tape.leaf(h.w_key.clone()),
                    w_value: tape.leaf(h.w_value.clone()),
                })
                .collect(),
            w_out: tape.leaf(self.w_out.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CnnVars {
    pub layers: Vec<(Var, Var, bool)>,
    pub dense: Vec<(Var, Var)>,
}

impl CnnParams {
    pub fn vars(&self, tape: &mut Tape) -> CnnVars {
        CnnVars {
            layers: self
                .layers
                .iter()
                .map(|l| {
                    (
                        tape.leaf(l.kernels.clone()),
                        tape.leaf(l.bias.clone()),
                        l.pool,
                    )
                })
                .collect(),
            dense: self
                .dense
                .iter()
                .map(|(w, b)| (tape.leaf(w.clone()), tape.leaf(b.clone())))
                .collect(),
        }
    }
}

/// All parameter handles for one model, in `visit` order.
#[derive(Debug, Clone)]
pub struct ModelVars {
    pub gru: GruVars,
    pub ta_w_b: Option<Var>,
    pub mha: Option<MhaVars>,
    pub cnn: CnnVars,
}

impl ModelParams {
    pub fn vars(&self, tape: &mut Tape) -> ModelVars {
        ModelVars {
            gru: self.gru.vars(tape),
            ta_w_b: self.ta.as_ref().map(|t| tape.leaf(t.w_b.clone())),
            mha: self.mha.as_ref().map(|m| m.vars(tape)),
            cnn: self.cnn.vars(tape),
        }
    }

    /// Gradients read back in the same order as [`ModelParams::visit`].
    pub fn collect_grads(tape: &Tape, vars: &ModelVars) -> Vec<Tensor> {
        let mut out = Vec::new();
        let g = &vars.gru;
        for v in [
            g.w_update, g.u_update, g.b_update, g.w_reset, g.u_reset, g.b_reset, g.w_cand,
            g.u_cand, g.b_cand,
        ] {
            out.push(tape.grad(v).clone());
        }
        if let Some(w_b) = vars.ta_w_b {
            out.push(tape.grad(w_b).clone());
        }
        if let Some(mha) = &vars.mha {
            for head in &mha.heads {
                out.push(tape.grad(head.w_query).clone());
                out.push(tape.grad(head.w_key).clone());
                out.push(tape.grad(head.w_value).clone());
            }
            out.push(tape.grad(mha.w_out).clone());
        }
        for (k, b, _) in &vars.cnn.layers {
            out.push(tape.grad(*k).clone());
            out.push(tape.grad(*b).clone());
        }
        for (w, b) in &vars.cnn.dense {
            out.push(tape.grad(*w).clone());
            out.push(tape.grad(*b).clone());
        }
        out
    }
}

/// One GRU step for a batch of rows: update and reset gates, then the
/// candidate state with the reset applied to the previous hidden state
/// before its matrix product.
pub fn gru_step(tape: &mut Tape, g: &GruVars, x: Var, h_prev: Var) -> Var {
    let zx = tape.matmul(x, g.w_update);
    let zh = tape.matmul(h_prev, g.u_update);
    let zs = tape.add(zx, zh);
    let zb = tape.add_row_vec(zs, g.b_update);
    let z = tape.sigmoid(zb);

    let rx = tape.matmul(x, g.w_reset);
    let rh = tape.matmul(h_prev, g.u_reset);
    let rs = tape.add(rx, rh);
    let rb = tape.add_row_vec(rs, g.b_reset);
    let r = tape.sigmoid(rb);

    let gated = tape.mul(r, h_prev);
    let nx = tape.matmul(x, g.w_cand);
    let nh = tape.matmul(gated, g.u_cand);
    let ns = tape.add(nx, nh);
    let nb = tape.add_row_vec(ns, g.b_cand);
    let cand = tape.tanh(nb);

    // h = (1 - z) * cand + z * h_prev
    let keep = tape.affine(z, -1.0, 1.0);
    let a = tape.mul(keep, cand);
    let b = tape.mul(z, h_prev);
    tape.add(a, b)
}

/// Run the recurrence over per-timestep input matrices (rows x n_v each),
/// returning the hidden state after every step.
pub fn gru_sequence(tape: &mut Tape, g: &GruVars, steps: &[Var], h0: Var) -> Vec<Var> {
    let mut hs = Vec::with_capacity(steps.len());
    let mut h = h0;
    for &x in steps {
        h = gru_step(tape, g, x, h);
        hs.push(h);
    }
    hs
}

/// Single-cycle GRU: consume an `n_v x n_ts` input matrix column by
/// column and return the hidden sequence as `n_ts x h_size`.
pub fn gru_forward(tape: &mut Tape, g: &GruVars, input: Var, h0: Var) -> Var {
    let by_time = tape.transpose(input);
    let n_ts = tape.value(by_time).rows();
    let steps: Vec<Var> = (0..n_ts)
        .map(|t| tape.slice_rows(by_time, t, t + 1))
        .collect();
    let hs = gru_sequence(tape, g, &steps, h0);
    tape.concat_rows(&hs)
}

/// Temporal attention over a hidden sequence `H` (n_ts x h_size):
/// `alpha_i = exp(w_b . h_i) / sum exp(w_b . h_i')`, context `ct = alpha H`.
/// Returns (context 1 x h_size, scores 1 x n_ts).
pub fn temporal_attention(tape: &mut Tape, h_seq: Var, w_b: Var) -> (Var, Var) {
    let w_col = tape.transpose(w_b);
    let scored = tape.matmul(h_seq, w_col);
    let scores_row = tape.transpose(scored);
    let alpha = tape.softmax_rows(scores_row, 1.0);
    let ct = tape.matmul(alpha, h_seq);
    (ct, alpha)
}

/// Constant-score attention: every timestep weighted 1/n_ts. Test hook
/// for the fixed-score formulation.
pub fn uniform_attention(tape: &mut Tape, h_seq: Var) -> (Var, Var) {
    let n_ts = tape.value(h_seq).rows();
    let alpha = tape.leaf(Tensor::matrix(1, n_ts, vec![1.0 / n_ts as f64; n_ts]));
    let ct = tape.matmul(alpha, h_seq);
    (ct, alpha)
}

/// Single-head self-attention. `x` is n_cy x d_model; the projections are
/// d_model x d_k. Scores are softmax rows of Q K^T / sqrt(d_k). Returns
/// (head output n_cy x d_v, score matrix n_cy x n_cy).
pub fn self_attention(
    tape: &mut Tape,
    x: Var,
    w_query: Var,
    w_key: Var,
    w_value: Var,
) -> (Var, Var) {
    let d_k = tape.value(w_key).cols();
    let q = tape.matmul(x, w_query);
    let k = tape.matmul(x, w_key);
    let v = tape.matmul(x, w_value);
    let k_t = tape.transpose(k);
    let logits = tape.matmul(q, k_t);
    let scores = tape.softmax_rows(logits, (d_k as f64).sqrt());
    let head = tape.matmul(scores, v);
    (head, scores)
}

/// Multi-head self-attention: per-head outputs concatenated and projected
/// back to one head's width. Returns the output and per-head score
/// matrices.
pub fn multi_head_attention(tape: &mut Tape, x: Var, mha: &MhaVars) -> (Var, Vec<Var>) {
    let mut heads = Vec::with_capacity(mha.heads.len());
    let mut scores = Vec::with_capacity(mha.heads.len());
    for head in &mha.heads {
        let (he, sc) = self_attention(tape, x, head.w_query, head.w_key, head.w_value);
        heads.push(he);
        scores.push(sc);
    }
    let concat = if heads.len() == 1 {
        heads[0]
    } else {
        tape.concat_cols(&heads)
    };
    let out = tape.matmul(concat, mha.w_out);
    (out, scores)
}

/// CNN regression head over a per-cycle context matrix (n_cy x width).
/// Cycles form the length axis, context dimensions the channels.
pub fn cnn_head(tape: &mut Tape, context: Var, cnn: &CnnVars) -> Var {
    let mut x = tape.transpose(context);
    for &(kernels, bias, pool) in &cnn.layers {
        let conv = tape.conv1d(x, kernels, 1);
        let with_bias = tape.add_col_vec(conv, bias);
        x = tape.tanh(with_bias);
        if pool {
            x = tape.max_pool1d(x, 2);
        }
    }
    let numel = tape.value(x).numel();
    let mut flat = tape.reshape(x, vec![1, numel]);
    let last = cnn.dense.len() - 1;
    for (d, &(w, b)) in cnn.dense.iter().enumerate() {
        let lin = tape.matmul(flat, w);
        let lin = tape.add(lin, b);
        flat = if d < last { tape.tanh(lin) } else { lin };
    }
    flat
}

//! A straight-line scalar re-implementation of the full TA + CA forward
//! pass, compared against the tape-based model and a frozen golden value.

mod common;

use kneecast_core::autodiff::{Tape, Tensor};
use kneecast_core::data::Variant;
use kneecast_core::model::{
    forward_batch, Architecture, BatchData, CnnConfig, ModelConfig, ModelParams,
};

const N_V: usize = 5;
const N_TS: usize = 3;
const N_CY: usize = 2;
const H: usize = 2;

/// Patterned but irregular weights so nothing cancels.
fn weight(tag: usize, i: usize) -> f64 {
    let x = ((tag * 31 + i * 17) % 23) as f64;
    0.05 * (x - 11.0) / 11.0
}

fn fill(t: &mut Tensor, tag: usize) {
    for (i, v) in t.data_mut().iter_mut().enumerate() {
        *v = weight(tag, i);
    }
}

fn fixed_config() -> ModelConfig {
    ModelConfig {
        architecture: Architecture::RnnTaCa1dCnn,
        h_size: H,
        n_he: 1,
        he_size: None,
        cnn: CnnConfig {
            filters_init: 1,
            kernel: 2,
            n_pool: 0,
            n_nopool: 1,
            dense_width: None,
        },
        n_cy: N_CY,
        variant: Variant::Combined,
        seed: 0,
    }
}

fn fixed_params(config: &ModelConfig) -> ModelParams {
    let mut params = ModelParams::init(config).unwrap();
    let mut tag = 1usize;
    params.visit_mut(&mut |_, t| {
        fill(t, tag);
        tag += 1;
    });
    params
}

fn fixed_input() -> Vec<f64> {
    // One cell, N_CY cycles, N_TS steps, N_V variables; value in [0, 1).
    (0..N_CY * N_TS * N_V)
        .map(|i| ((i * 7 + 3) % 10) as f64 / 10.0)
        .collect()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Plain loops, scalars only: GRU, temporal attention, single-head
/// self-attention with the stored output projection, conv, dense.
fn oracle_forward(params: &ModelParams) -> f64 {
    let input = fixed_input();
    let x_at = |cy: usize, t: usize, v: usize| input[(cy * N_TS + t) * N_V + v];

    let g = &params.gru;
    let dot_in = |w: &Tensor, cy: usize, t: usize, j: usize| -> f64 {
        (0..N_V).map(|v| x_at(cy, t, v) * w.at(v, j)).sum()
    };
    let dot_h =
        |u: &Tensor, h: &[f64; H], j: usize| -> f64 { (0..H).map(|k| h[k] * u.at(k, j)).sum() };

    // Hidden sequences per cycle, reset at each cycle boundary.
    let mut hidden = [[[0.0f64; H]; N_TS]; N_CY];
    for cy in 0..N_CY {
        let mut h = [0.0f64; H];
        for t in 0..N_TS {
            let mut z = [0.0; H];
            let mut r = [0.0; H];
            for j in 0..H {
                z[j] = sigmoid(
                    dot_in(&g.w_update, cy, t, j) + dot_h(&g.u_update, &h, j) + g.b_update.at(0, j),
                );
                r[j] = sigmoid(
                    dot_in(&g.w_reset, cy, t, j) + dot_h(&g.u_reset, &h, j) + g.b_reset.at(0, j),
                );
            }
            let gated = [r[0] * h[0], r[1] * h[1]];
            let mut cand = [0.0; H];
            for j in 0..H {
                cand[j] =
                    (dot_in(&g.w_cand, cy, t, j) + dot_h(&g.u_cand, &gated, j) + g.b_cand.at(0, j))
                        .tanh();
            }
            for j in 0..H {
                h[j] = (1.0 - z[j]) * cand[j] + z[j] * h[j];
            }
            hidden[cy][t] = h;
        }
    }

    // Temporal attention per cycle.
    let w_b = &params.ta.as_ref().unwrap().w_b;
    let mut contexts = [[0.0f64; H]; N_CY];
    for cy in 0..N_CY {
        let scores: Vec<f64> = (0..N_TS)
            .map(|t| (0..H).map(|j| w_b.at(0, j) * hidden[cy][t][j]).sum())
            .collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        for t in 0..N_TS {
            let a = exps[t] / total;
            for j in 0..H {
                contexts[cy][j] += a * hidden[cy][t][j];
            }
        }
    }

    // Single-head self-attention over the two context vectors.
    let head = &params.mha.as_ref().unwrap().heads[0];
    let w_out = &params.mha.as_ref().unwrap().w_out;
    let proj =
        |w: &Tensor, row: &[f64; H], j: usize| -> f64 { (0..H).map(|k| row[k] * w.at(k, j)).sum() };
    let mut q = [[0.0; H]; N_CY];
    let mut k = [[0.0; H]; N_CY];
    let mut v = [[0.0; H]; N_CY];
    for cy in 0..N_CY {
        for j in 0..H {
            q[cy][j] = proj(&head.w_query, &contexts[cy], j);
            k[cy][j] = proj(&head.w_key, &contexts[cy], j);
            v[cy][j] = proj(&head.w_value, &contexts[cy], j);
        }
    }
    let scale = (H as f64).sqrt();
    let mut refined = [[0.0f64; H]; N_CY];
    for qi in 0..N_CY {
        let logits: Vec<f64> = (0..N_CY)
            .map(|ki| (0..H).map(|j| q[qi][j] * k[ki][j]).sum::<f64>())
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| ((l - max) / scale).exp()).collect();
        let total: f64 = exps.iter().sum();
        let mut he = [0.0f64; H];
        for ki in 0..N_CY {
            let a = exps[ki] / total;
            for j in 0..H {
                he[j] += a * v[ki][j];
            }
        }
        // Output projection: concat of one head times w_out ((H) x H).
        for j in 0..H {
            refined[qi][j] = (0..H).map(|c| he[c] * w_out.at(c, j)).sum();
        }
    }

    // CNN head: channels = H, length = N_CY; one conv (kernel 2), tanh,
    // flatten, linear dense.
    let layer = &params.cnn.layers[0];
    let out_len = N_CY - 2 + 1;
    let mut feat = vec![0.0f64; out_len];
    for j in 0..out_len {
        let mut s = 0.0;
        for ci in 0..H {
            for t in 0..2 {
                // refined is (cycle x channel); channel ci at length j+t.
                s += refined[j + t][ci] * layer.kernels.data()[(ci) * 2 + t];
            }
        }
        feat[j] = (s + layer.bias.at(0, 0)).tanh();
    }
    let (dense_w, dense_b) = &params.cnn.dense[0];
    feat.iter()
        .enumerate()
        .map(|(i, &f)| f * dense_w.at(i, 0))
        .sum::<f64>()
        + dense_b.at(0, 0)
}

fn tape_forward(params: &ModelParams, config: &ModelConfig) -> f64 {
    let input = fixed_input();
    let steps = (0..N_TS)
        .map(|t| {
            let mut data = Vec::with_capacity(N_CY * N_V);
            for cy in 0..N_CY {
                for v in 0..N_V {
                    data.push(input[(cy * N_TS + t) * N_V + v]);
                }
            }
            Tensor::matrix(N_CY, N_V, data)
        })
        .collect();
    let batch = BatchData {
        cell_ids: vec!["golden".into()],
        n_cy: N_CY,
        n_ts: N_TS,
        n_v: N_V,
        steps,
    };
    let mut tape = Tape::new();
    let fwd = forward_batch(&mut tape, params, config, &batch).unwrap();
    tape.value(fwd.preds).scalar_value()
}

#[test]
fn tape_forward_matches_straight_line_oracle_and_golden() {
    let config = fixed_config();
    let params = fixed_params(&config);
    let oracle = oracle_forward(&params);
    let tape = tape_forward(&params, &config);
    assert!(
        (oracle - tape).abs() < 1e-14,
        "oracle {} vs tape {}",
        oracle,
        tape
    );

    // Frozen from the oracle; guards against silent forward drift.
    const GOLDEN: f64 = -2.23140877646128000e-2;
    assert!(
        (tape - GOLDEN).abs() < 1e-15,
        "tape {} vs golden {}",
        tape,
        GOLDEN
    );
}

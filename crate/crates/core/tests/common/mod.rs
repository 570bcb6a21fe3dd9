//! Shared oracles for integration tests: central finite differences and
//! batch construction at toy dimensions.

use kneecast_core::autodiff::{Tape, Tensor};
use kneecast_core::data::Variant;
use kneecast_core::model::{forward_batch, BatchData, ModelConfig, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;

/// Relative error against the finite-difference reference.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / numeric.abs().max(1e-8)
}

/// Central finite difference of `f` under a single perturbed value.
pub fn central_diff(mut f: impl FnMut(f64) -> f64, at: f64) -> f64 {
    (f(at + FD_STEP) - f(at - FD_STEP)) / (2.0 * FD_STEP)
}

/// Build a toy batch with an arbitrary timestep count (decoupled from the
/// variant's production grid).
pub fn toy_batch(config: &ModelConfig, n_cells: usize, n_ts: usize, seed: u64) -> BatchData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_v = config.variant.n_v();
    let rows = n_cells * config.n_cy;
    let steps = (0..n_ts)
        .map(|_| {
            Tensor::matrix(
                rows,
                n_v,
                (0..rows * n_v).map(|_| rng.gen_range(0.0..1.0)).collect(),
            )
        })
        .collect();
    BatchData {
        cell_ids: (0..n_cells).map(|i| format!("toy{}", i)).collect(),
        n_cy: config.n_cy,
        n_ts,
        n_v,
        steps,
    }
}

/// Smooth scalar functional for gradient checking: the weighted sum of
/// predictions. (The training loss's square root would amplify
/// finite-difference truncation error without testing anything new; its
/// constituent ops are each checked on their own.)
pub fn batch_loss(
    params: &ModelParams,
    config: &ModelConfig,
    batch: &BatchData,
    weights: &[f64],
) -> f64 {
    let mut tape = Tape::new();
    let fwd = forward_batch(&mut tape, params, config, batch).expect("forward");
    let w = tape.leaf(Tensor::matrix(weights.len(), 1, weights.to_vec()));
    let weighted = tape.mul(fwd.preds, w);
    let loss = tape.sum(weighted);
    tape.value(loss).scalar_value()
}

/// Analytic parameter gradients of the batch loss, in visit order.
pub fn batch_grads(
    params: &ModelParams,
    config: &ModelConfig,
    batch: &BatchData,
    weights: &[f64],
) -> Vec<Tensor> {
    let mut tape = Tape::new();
    let fwd = forward_batch(&mut tape, params, config, batch).expect("forward");
    let w = tape.leaf(Tensor::matrix(weights.len(), 1, weights.to_vec()));
    let weighted = tape.mul(fwd.preds, w);
    let loss = tape.sum(weighted);
    tape.backward(loss);
    ModelParams::collect_grads(&tape, &fwd.vars)
}

/// Worst relative error between reverse-mode and finite-difference
/// gradients over every parameter of the model.
pub fn max_param_rel_err(
    params: &ModelParams,
    config: &ModelConfig,
    batch: &BatchData,
    targets: &[f64],
) -> f64 {
    let analytic = batch_grads(params, config, batch, targets);
    let mut worst: f64 = 0.0;
    let n_tensors = analytic.len();
    for k in 0..n_tensors {
        let numel = analytic[k].numel();
        for i in 0..numel {
            let numeric = central_diff(
                |v| {
                    let mut probe = params.clone();
                    let mut idx = 0usize;
                    probe.visit_mut(&mut |_, t| {
                        if idx == k {
                            t.data_mut()[i] = v;
                        }
                        idx += 1;
                    });
                    batch_loss(&probe, config, batch, targets)
                },
                {
                    let mut at = 0.0;
                    let mut idx = 0usize;
                    params.visit(&mut |_, t| {
                        if idx == k {
                            at = t.data()[i];
                        }
                        idx += 1;
                    });
                    at
                },
            );
            worst = worst.max(rel_err(analytic[k].data()[i], numeric));
        }
    }
    worst
}

/// Toy model configuration within the acceptance bounds.
pub fn toy_config(
    architecture: kneecast_core::model::Architecture,
    n_he: usize,
    seed: u64,
) -> ModelConfig {
    ModelConfig {
        architecture,
        h_size: 3,
        n_he,
        he_size: None,
        cnn: kneecast_core::model::CnnConfig {
            filters_init: 2,
            kernel: 2,
            n_pool: 1,
            n_nopool: 1,
            dense_width: None,
        },
        n_cy: 4,
        variant: Variant::Combined,
        seed,
    }
}

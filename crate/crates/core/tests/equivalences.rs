//! Architecture collapse laws: attention reduced to degenerate weights
//! reproduces the simpler architectures.

use kneecast_core::autodiff::{Tape, Tensor};
use kneecast_core::model::{cnn_head, multi_head_attention, CnnVars, HeadVars, MhaVars};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_tensor(rng: &mut ChaCha8Rng, shape: Vec<usize>, scale: f64) -> Tensor {
    let n: usize = shape.iter().product();
    Tensor::new(
        shape,
        (0..n).map(|_| rng.gen_range(-scale..scale)).collect(),
    )
}

fn small_cnn(tape: &mut Tape, rng: &mut ChaCha8Rng, width: usize, length: usize) -> CnnVars {
    let f = 2usize;
    let k = 2usize;
    let out_len = length - k + 1;
    CnnVars {
        layers: vec![(
            tape.leaf(rand_tensor(rng, vec![f, width, k], 0.5)),
            tape.leaf(rand_tensor(rng, vec![f, 1], 0.2)),
            false,
        )],
        dense: vec![(
            tape.leaf(rand_tensor(rng, vec![f * out_len, 1], 0.5)),
            tape.leaf(rand_tensor(rng, vec![1, 1], 0.2)),
        )],
    }
}

#[test]
fn one_hot_ta_reduces_to_last_hidden_state() {
    // With all attention mass on the last timestep the TA context equals
    // the last hidden state, so the TA model's head sees exactly what the
    // plain model's head sees.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (n_ts, h, n_cy) = (5usize, 3usize, 4usize);
    let mut tape = Tape::new();

    let per_cycle: Vec<_> = (0..n_cy)
        .map(|_| tape.leaf(rand_tensor(&mut rng, vec![n_ts, h], 1.0)))
        .collect();
    let mut one_hot = Tensor::zeros(vec![1, n_ts]);
    one_hot.set(0, n_ts - 1, 1.0);
    let alpha = tape.leaf(one_hot);

    let mut ta_rows = Vec::new();
    let mut last_rows = Vec::new();
    for &h_seq in &per_cycle {
        ta_rows.push(tape.matmul(alpha, h_seq));
        last_rows.push(tape.slice_rows(h_seq, n_ts - 1, n_ts));
    }
    let ta_ct = tape.concat_rows(&ta_rows);
    let last_ct = tape.concat_rows(&last_rows);
    assert_eq!(tape.value(ta_ct).data(), tape.value(last_ct).data());

    let cnn = small_cnn(&mut tape, &mut rng, h, n_cy);
    let pred_ta = cnn_head(&mut tape, ta_ct, &cnn);
    let pred_last = cnn_head(&mut tape, last_ct, &cnn);
    assert_eq!(
        tape.value(pred_ta).scalar_value().to_bits(),
        tape.value(pred_last).scalar_value().to_bits()
    );
}

#[test]
fn equal_contexts_collapse_ca_to_identity_mix() {
    // n_he = 1, W^O = I, W_V = I, all context rows equal: attention is
    // uniform, every refined row equals the shared context row, and the
    // prediction matches running the head on the raw contexts.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n_cy, h) = (4usize, 3usize);
    let mut tape = Tape::new();

    let row: Vec<f64> = (0..h).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rows: Vec<Vec<f64>> = (0..n_cy).map(|_| row.clone()).collect();
    let contexts = tape.leaf(Tensor::from_rows(&rows));

    let mha = MhaVars {
        heads: vec![HeadVars {
            w_query: tape.leaf(rand_tensor(&mut rng, vec![h, h], 0.7)),
            w_key: tape.leaf(rand_tensor(&mut rng, vec![h, h], 0.7)),
            w_value: tape.leaf(Tensor::identity(h)),
        }],
        w_out: tape.leaf(Tensor::identity(h)),
    };
    let (refined, scores) = multi_head_attention(&mut tape, contexts, &mha);

    for q in 0..n_cy {
        for k in 0..n_cy {
            assert!((tape.value(scores[0]).at(q, k) - 1.0 / n_cy as f64).abs() < 1e-12);
        }
        for c in 0..h {
            assert!((tape.value(refined).at(q, c) - row[c]).abs() < 1e-12);
        }
    }

    let cnn = small_cnn(&mut tape, &mut rng, h, n_cy);
    let pred_refined = cnn_head(&mut tape, refined, &cnn);
    let pred_raw = cnn_head(&mut tape, contexts, &cnn);
    assert!(
        (tape.value(pred_refined).scalar_value() - tape.value(pred_raw).scalar_value()).abs()
            < 1e-12
    );
}

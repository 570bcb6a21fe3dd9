//! Acceptance suite. Each test prints one PASS line for its criterion;
//! the E-tier checks need the public dataset and run only when
//! `KNEECAST_DATA` points at a converted cells-csv (they report, they do
//! not gate).

mod common;

use common::{max_param_rel_err, toy_batch, toy_config};
use kneecast_core::analyze::{
    export_attention, recommend_input_size, ScoreKind, ALLOWED_INPUT_SIZES, DEFAULT_COVERAGE_TAU,
};
use kneecast_core::autodiff::{Tape, Tensor};
use kneecast_core::data::{
    generate_synthetic, load_corpus, CorpusFormat, PreprocessOptions, SyntheticSpec, Variant,
};
use kneecast_core::knee::{dbw_value, fit_double_bacon_watts, label_corpus, DEFAULT_GAMMA};
use kneecast_core::model::{
    multi_head_attention, self_attention, temporal_attention, Architecture, CnnConfig, HeadVars,
    MhaVars, ModelConfig, ModelParams,
};
use kneecast_core::train::{
    constant_baseline_rmse, prepare, resolve_split, train_prepared, train_run, usable_cells,
    TrainSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn rand_tensor(rng: &mut ChaCha8Rng, shape: Vec<usize>, scale: f64) -> Tensor {
    let n: usize = shape.iter().product();
    Tensor::new(
        shape,
        (0..n).map(|_| rng.gen_range(-scale..scale)).collect(),
    )
}

// ── A: gradient correctness ──────────────────────────────────────────

#[test]
fn acceptance_a_gradients() {
    let started = Instant::now();
    const TOL: f64 = 1e-4;
    let mut worst_overall: f64 = 0.0;

    // Every architecture at toy dimensions, at fixture points whose
    // parameter gradients are resolvable by h = 1e-5 central differences.
    for (arch, n_he, cfg_seed, batch_seed) in [
        (Architecture::Rnn1dCnn, 0usize, 99u64, 21u64),
        (Architecture::RnnTa1dCnn, 0, 7, 55),
        (Architecture::RnnCa1dCnn, 2, 99, 55),
        (Architecture::RnnTaCa1dCnn, 3, 5, 55),
    ] {
        let config = toy_config(arch, n_he, cfg_seed);
        let mut params = ModelParams::init(&config).unwrap();
        params.visit_mut(&mut |name, t| {
            if name == "ta.w_b" {
                for v in t.data_mut() {
                    *v *= 0.25;
                }
            }
        });
        let batch = toy_batch(&config, 3, 6, batch_seed);
        let worst = max_param_rel_err(&params, &config, &batch, &[0.3, 0.6, 0.9]);
        assert!(worst < TOL, "{}: max rel err {}", arch, worst);
        worst_overall = worst_overall.max(worst);
    }

    // Each layer in isolation under the same oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let layer_specs: Vec<(
        &str,
        Box<dyn Fn(&mut Tape, &[kneecast_core::autodiff::Var]) -> kneecast_core::autodiff::Var>,
        Vec<Tensor>,
    )> = vec![
        (
            "matmul",
            Box::new(|t: &mut Tape, v: &[kneecast_core::autodiff::Var]| t.matmul(v[0], v[1])),
            vec![
                rand_tensor(&mut rng, vec![3, 4], 0.8),
                rand_tensor(&mut rng, vec![4, 2], 0.8),
            ],
        ),
        (
            "softmax_rows",
            Box::new(|t: &mut Tape, v: &[kneecast_core::autodiff::Var]| {
                let s = t.softmax_rows(v[0], 1.4);
                t.mul(s, v[1])
            }),
            vec![
                rand_tensor(&mut rng, vec![3, 4], 1.5),
                rand_tensor(&mut rng, vec![3, 4], 1.0),
            ],
        ),
        (
            "conv1d+pool",
            Box::new(|t: &mut Tape, v: &[kneecast_core::autodiff::Var]| {
                let c = t.conv1d(v[0], v[1], 1);
                t.max_pool1d(c, 2)
            }),
            vec![
                rand_tensor(&mut rng, vec![2, 8], 1.0),
                rand_tensor(&mut rng, vec![3, 2, 3], 0.7),
            ],
        ),
        (
            "gru_step",
            Box::new(|t: &mut Tape, v: &[kneecast_core::autodiff::Var]| {
                let g = kneecast_core::model::GruVars {
                    w_update: v[1],
                    u_update: v[2],
                    b_update: v[3],
                    w_reset: v[4],
                    u_reset: v[5],
                    b_reset: v[6],
                    w_cand: v[7],
                    u_cand: v[8],
                    b_cand: v[9],
                };
                let h0 = t.leaf(Tensor::zeros(vec![1, 3]));
                kneecast_core::model::gru_forward(t, &g, v[0], h0)
            }),
            {
                let mut inputs = vec![rand_tensor(&mut rng, vec![2, 4], 1.0)];
                for _ in 0..3 {
                    inputs.push(rand_tensor(&mut rng, vec![2, 3], 0.6));
                    inputs.push(rand_tensor(&mut rng, vec![3, 3], 0.6));
                    inputs.push(rand_tensor(&mut rng, vec![1, 3], 0.3));
                }
                inputs
            },
        ),
        (
            "temporal_attention",
            Box::new(|t: &mut Tape, v: &[kneecast_core::autodiff::Var]| {
                temporal_attention(t, v[0], v[1]).0
            }),
            vec![
                rand_tensor(&mut rng, vec![5, 3], 1.0),
                rand_tensor(&mut rng, vec![1, 3], 1.0),
            ],
        ),
        (
            "self_attention",
            Box::new(|t: &mut Tape, v: &[kneecast_core::autodiff::Var]| {
                self_attention(t, v[0], v[1], v[2], v[3]).0
            }),
            vec![
                rand_tensor(&mut rng, vec![4, 3], 1.0),
                rand_tensor(&mut rng, vec![3, 2], 0.8),
                rand_tensor(&mut rng, vec![3, 2], 0.8),
                rand_tensor(&mut rng, vec![3, 2], 0.8),
            ],
        ),
    ];

    for (name, build, inputs) in layer_specs {
        let loss_of = |tensors: &[Tensor]| -> f64 {
            let mut tape = Tape::new();
            let vars: Vec<_> = tensors.iter().map(|t| tape.leaf(t.clone())).collect();
            let out = build(&mut tape, &vars);
            let loss = tape.sum(out);
            tape.value(loss).scalar_value()
        };
        let mut tape = Tape::new();
        let vars: Vec<_> = inputs.iter().map(|t| tape.leaf(t.clone())).collect();
        let out = build(&mut tape, &vars);
        let loss = tape.sum(out);
        tape.backward(loss);
        for (k, input) in inputs.iter().enumerate() {
            for i in 0..input.numel() {
                let analytic = tape.grad(vars[k]).data()[i];
                let numeric = common::central_diff(
                    |v| {
                        let mut probe = inputs.clone();
                        probe[k].data_mut()[i] = v;
                        loss_of(&probe)
                    },
                    input.data()[i],
                );
                let err = common::rel_err(analytic, numeric);
                assert!(
                    err < TOL,
                    "{} input {} elem {}: rel err {}",
                    name,
                    k,
                    i,
                    err
                );
                worst_overall = worst_overall.max(err);
            }
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "gradient suite took {:.1}s", elapsed);
    println!(
        "ACCEPTANCE A: PASS (max rel err {:.2e} < 1e-4 across layers and architectures, {:.1}s)",
        worst_overall, elapsed
    );
}

// ── B: attention algebra ─────────────────────────────────────────────

#[test]
fn acceptance_b_attention_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // (1) every TA score vector and AS row sums to 1 within 1e-9.
    for _ in 0..20 {
        let mut tape = Tape::new();
        let h = tape.leaf(rand_tensor(&mut rng, vec![6, 3], 2.0));
        let w = tape.leaf(rand_tensor(&mut rng, vec![1, 3], 2.0));
        let (_, alpha) = temporal_attention(&mut tape, h, w);
        assert!((tape.value(alpha).data().iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let x = tape.leaf(rand_tensor(&mut rng, vec![5, 3], 2.0));
        let wq = tape.leaf(rand_tensor(&mut rng, vec![3, 3], 1.0));
        let wk = tape.leaf(rand_tensor(&mut rng, vec![3, 3], 1.0));
        let wv = tape.leaf(rand_tensor(&mut rng, vec![3, 3], 1.0));
        let (_, scores) = self_attention(&mut tape, x, wq, wk, wv);
        for r in 0..5 {
            assert!((tape.value(scores).row(r).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    // (2) single-head MHA with identity output projection equals SA.
    for _ in 0..20 {
        let mut tape = Tape::new();
        let x = tape.leaf(rand_tensor(&mut rng, vec![4, 3], 1.5));
        let wq = rand_tensor(&mut rng, vec![3, 3], 1.0);
        let wk = rand_tensor(&mut rng, vec![3, 3], 1.0);
        let wv = rand_tensor(&mut rng, vec![3, 3], 1.0);
        let (q, k, v) = (
            tape.leaf(wq.clone()),
            tape.leaf(wk.clone()),
            tape.leaf(wv.clone()),
        );
        let (sa, _) = self_attention(&mut tape, x, q, k, v);
        let mha = MhaVars {
            heads: vec![HeadVars {
                w_query: tape.leaf(wq),
                w_key: tape.leaf(wk),
                w_value: tape.leaf(wv),
            }],
            w_out: tape.leaf(Tensor::identity(3)),
        };
        let (out, _) = multi_head_attention(&mut tape, x, &mha);
        for (a, b) in tape.value(out).data().iter().zip(tape.value(sa).data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    // (3) cycle-permutation equivariance on 20 random instances.
    for trial in 0..20u64 {
        let mut prng = ChaCha8Rng::seed_from_u64(500 + trial);
        let n = 5usize;
        let x_rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| prng.gen_range(-2.0..2.0)).collect())
            .collect();
        let wq = rand_tensor(&mut prng, vec![3, 2], 1.0);
        let wk = rand_tensor(&mut prng, vec![3, 2], 1.0);
        let wv = rand_tensor(&mut prng, vec![3, 2], 1.0);
        let mut order: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut prng);

        let run = |rows: &[Vec<f64>]| {
            let mut tape = Tape::new();
            let x = tape.leaf(Tensor::from_rows(rows));
            let (q, k, v) = (
                tape.leaf(wq.clone()),
                tape.leaf(wk.clone()),
                tape.leaf(wv.clone()),
            );
            let (he, sc) = self_attention(&mut tape, x, q, k, v);
            (tape.value(he).clone(), tape.value(sc).clone())
        };
        let (he, sc) = run(&x_rows);
        let permuted: Vec<Vec<f64>> = order.iter().map(|&i| x_rows[i].clone()).collect();
        let (he_p, sc_p) = run(&permuted);
        for (i, &src) in order.iter().enumerate() {
            for c in 0..2 {
                assert!((he_p.at(i, c) - he.at(src, c)).abs() < 1e-12);
            }
            for (j, &src_j) in order.iter().enumerate() {
                assert!((sc_p.at(i, j) - sc.at(src, src_j)).abs() < 1e-12);
            }
        }
    }

    // (4) identical hidden states give uniform TA scores.
    for _ in 0..20 {
        let mut tape = Tape::new();
        let row: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let rows: Vec<Vec<f64>> = (0..7).map(|_| row.clone()).collect();
        let h = tape.leaf(Tensor::from_rows(&rows));
        let w = tape.leaf(rand_tensor(&mut rng, vec![1, 3], 2.0));
        let (_, alpha) = temporal_attention(&mut tape, h, w);
        for &a in tape.value(alpha).data() {
            assert!((a - 1.0 / 7.0).abs() < 1e-12);
        }
    }

    println!(
        "ACCEPTANCE B: PASS (row sums, MHA==SA collapse, permutation equivariance, uniform TA)"
    );
}

// ── C: knee labeling ─────────────────────────────────────────────────

/// Independent oracle: exhaustive integer-grid profile search with its
/// own least-squares solve.
fn oracle_grid_search(fade: &[(f64, f64)], gamma: f64) -> (f64, f64) {
    let n = fade.len();
    let solve4 = |a: &mut [[f64; 5]; 4]| -> Option<[f64; 4]> {
        for col in 0..4 {
            let mut p = col;
            for r in col + 1..4 {
                if a[r][col].abs() > a[p][col].abs() {
                    p = r;
                }
            }
            if a[p][col].abs() < 1e-12 {
                return None;
            }
            a.swap(col, p);
            for r in col + 1..4 {
                let f = a[r][col] / a[col][col];
                for c in col..5 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
        let mut x = [0.0; 4];
        for r in (0..4).rev() {
            let mut s = a[r][4];
            for c in r + 1..4 {
                s -= a[r][c] * x[c];
            }
            x[r] = s / a[r][r];
        }
        Some(x)
    };

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for ko in 1..=n {
        for second in ko..=n {
            let (ko_f, second_f) = (ko as f64, second as f64);
            let mut sys = [[0.0f64; 5]; 4];
            for &(c, q) in fade {
                let d1 = c - ko_f;
                let d2 = c - second_f;
                let phi = [1.0, d1, d1 * (d1 / gamma).tanh(), d2 * (d2 / gamma).tanh()];
                for r in 0..4 {
                    for k in 0..4 {
                        sys[r][k] += phi[r] * phi[k];
                    }
                    sys[r][4] += phi[r] * q;
                }
            }
            if let Some(alpha) = solve4(&mut sys) {
                let mut sse = 0.0;
                for &(c, q) in fade {
                    let d1 = c - ko_f;
                    let d2 = c - second_f;
                    let pred = alpha[0]
                        + alpha[1] * d1
                        + alpha[2] * d1 * (d1 / gamma).tanh()
                        + alpha[3] * d2 * (d2 / gamma).tanh();
                    sse += (q - pred) * (q - pred);
                }
                if sse < best.0 {
                    best = (sse, ko_f, second_f);
                }
            }
        }
    }
    (best.1, best.2)
}

#[test]
fn acceptance_c_knee_labeling() {
    let started = Instant::now();
    let gamma = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut within_five = 0usize;
    let mut oracle_agreements = 0usize;
    let total = 50usize;

    for _ in 0..total {
        let c_ko = 60.0 + 60.0 * rng.gen::<f64>();
        let c_2nd = c_ko + 30.0 + 20.0 * rng.gen::<f64>();
        let slopes = [-3.75e-3, -6.0e-4, -2.55e-3];
        let mut alpha = [0.0, slopes[0], slopes[1], slopes[2]];
        alpha[0] = 1.078 - dbw_value(1.0, &alpha, c_ko, c_2nd, gamma);
        let n = 200usize;
        let fade: Vec<(f64, f64)> = (1..=n)
            .map(|c| {
                let noise = {
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    0.002 * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                };
                (
                    c as f64,
                    dbw_value(c as f64, &alpha, c_ko, c_2nd, gamma) + noise,
                )
            })
            .collect();

        let label = fit_double_bacon_watts(&fade, gamma).unwrap();
        if (label.c_ko - c_ko).abs() <= 5.0 {
            within_five += 1;
        }
        let (oracle_ko, oracle_2nd) = oracle_grid_search(&fade, gamma);
        if (label.c_ko - oracle_ko).abs() <= 2.0 && (label.c_2nd - oracle_2nd).abs() <= 2.0 {
            oracle_agreements += 1;
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        within_five * 10 >= total * 9,
        "only {}/{} within 5 cycles of truth",
        within_five,
        total
    );
    assert_eq!(
        oracle_agreements, total,
        "oracle disagreement on some curve"
    );
    assert!(elapsed < 60.0, "knee suite took {:.1}s", elapsed);
    println!(
        "ACCEPTANCE C: PASS ({}/{} within ±5 cycles, {}/{} oracle agreement ≤2 cycles, {:.1}s)",
        within_five, total, oracle_agreements, total, elapsed
    );
}

// ── D: desk-scale learning and interpretability ──────────────────────

fn desk_config() -> ModelConfig {
    ModelConfig {
        architecture: Architecture::RnnTaCa1dCnn,
        h_size: 3,
        n_he: 3,
        he_size: None,
        cnn: CnnConfig {
            filters_init: 5,
            kernel: 3,
            n_pool: 1,
            n_nopool: 1,
            dense_width: None,
        },
        n_cy: 30,
        variant: Variant::Combined,
        seed: 0,
    }
}

#[test]
fn acceptance_d_desk_scale() {
    let corpus_spec = SyntheticSpec {
        n_cells: 40,
        detail_cycles: 30,
        ..Default::default()
    };
    let corpus = generate_synthetic(&corpus_spec, 42);
    let (labels, failures) = label_corpus(&corpus.cells, DEFAULT_GAMMA);
    assert!(failures.is_empty(), "labeling failures: {:?}", failures);

    let opts = PreprocessOptions {
        skip_smoothing: true,
        ..Default::default()
    };
    let config = desk_config();
    let spec = TrainSpec {
        lr: 1e-2,
        max_epochs: 500,
        patience: 30,
        seeds: vec![],
    };
    let ids = usable_cells(&corpus.cells, &labels, config.n_cy);

    // Five runs: split seeds 1..5 paired with a pinned init stream.
    let mut outcomes = Vec::new();
    for split_seed in 1..=5u64 {
        let split = resolve_split(&ids, split_seed);
        let prep = prepare(&corpus.cells, &labels, &split, &config, &opts).unwrap();
        let out = train_prepared(&prep, &config, &spec, 300 + split_seed).unwrap();
        outcomes.push((split, out));
    }

    // D1: the first run beats half the constant-mean baseline in budget.
    let d1_started = Instant::now();
    let (split, out) = &outcomes[0];
    let train_t: Vec<f64> = split.train.iter().map(|id| labels[id].c_ko).collect();
    let test_t: Vec<f64> = split.test.iter().map(|id| labels[id].c_ko).collect();
    let baseline = constant_baseline_rmse(&train_t, &test_t);
    let ratio = out.report.test_rmse / baseline;
    assert!(
        ratio <= 0.5,
        "test RMSE {:.1} vs baseline {:.1} (ratio {:.2})",
        out.report.test_rmse,
        baseline,
        ratio
    );
    assert!(
        out.report.wall_time_s <= 600.0,
        "training took {:.0}s",
        out.report.wall_time_s
    );
    let _ = d1_started;

    // D2: TA mass concentrates on the rest plateaus of the long-rest
    // batch in at least 3 of the 5 runs.
    let b2: Vec<String> = corpus
        .cells
        .iter()
        .filter(|c| c.batch == 2)
        .map(|c| c.cell_id.clone())
        .collect();
    let mut hits = 0usize;
    let mut ratios = Vec::new();
    for (_, out) in &outcomes {
        let (mut rest_sum, mut rest_n, mut other_sum, mut other_n) = (0.0, 0usize, 0.0, 0usize);
        for id in &b2 {
            let mask = corpus.truth[id].rest_mask();
            let single = export_attention(
                &out.checkpoint,
                &corpus.cells,
                &[id.clone()],
                ScoreKind::Ta,
                &opts,
            )
            .unwrap();
            let m = &single.ta[&2];
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if mask[c] {
                        rest_sum += m.at(r, c);
                        rest_n += 1;
                    } else {
                        other_sum += m.at(r, c);
                        other_n += 1;
                    }
                }
            }
        }
        let ta_ratio = (rest_sum / rest_n as f64) / (other_sum / other_n as f64);
        ratios.push(ta_ratio);
        if ta_ratio >= 1.2 {
            hits += 1;
        }
    }
    assert!(
        hits >= 3,
        "rest-attention ratio ≥1.2 in only {}/5 seeds ({:?})",
        hits,
        ratios
    );

    // D3: the reduction rule reproduces the published selections on
    // fixture profiles shaped like the single- and multi-head score maps.
    let bump = |bumps: &[(usize, usize, f64)]| -> Vec<f64> {
        let n = 100;
        let bump_mass: f64 = bumps.iter().map(|b| b.2).sum();
        let floor = (1.0 - bump_mass) / n as f64;
        let mut imp = vec![floor; n];
        for &(lo, hi, mass) in bumps {
            let per = mass / (hi - lo + 1) as f64;
            for v in imp.iter_mut().take(hi + 1).skip(lo) {
                *v += per;
            }
        }
        imp
    };
    let sha_like = bump(&[(20, 40, 0.85)]);
    let plan_sha = recommend_input_size(&sha_like, &ALLOWED_INPUT_SIZES, DEFAULT_COVERAGE_TAU);
    assert_eq!(plan_sha.recommended_n_cy, 50);
    let mha_like = bump(&[(0, 20, 0.5), (20, 28, 0.42)]);
    let plan_mha = recommend_input_size(&mha_like, &ALLOWED_INPUT_SIZES, DEFAULT_COVERAGE_TAU);
    assert_eq!(plan_mha.recommended_n_cy, 30);

    println!(
        "ACCEPTANCE D: PASS (test RMSE {:.1} = {:.2}x baseline {:.1} in {:.0}s; rest-TA ratio ≥1.2 in {}/5 seeds {:?}; reduction fixtures -> 50 and 30)",
        out.report.test_rmse, ratio, baseline, out.report.wall_time_s, hits,
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
}

// ── E: extended dataset checks (reported, not gating) ────────────────

fn load_dataset() -> Option<Vec<kneecast_core::data::CellRecord>> {
    let path = std::env::var("KNEECAST_DATA").ok()?;
    let path = std::path::PathBuf::from(path);
    match load_corpus(&path, CorpusFormat::from_path(&path)) {
        Ok(cells) => Some(cells),
        Err(e) => {
            println!("ACCEPTANCE E: cannot load dataset: {}", e);
            None
        }
    }
}

#[test]
#[ignore = "needs the public dataset; set KNEECAST_DATA to a converted cells-csv"]
fn acceptance_e1_reference_label() {
    let Some(cells) = load_dataset() else { return };
    let Some(cell) = cells.iter().find(|c| c.cell_id == "b1c3") else {
        println!("ACCEPTANCE E1: b1c3 not present in dataset");
        return;
    };
    let label = fit_double_bacon_watts(&cell.fade_curve(), DEFAULT_GAMMA).unwrap();
    let delta = (label.c_ko - 842.03).abs();
    println!(
        "ACCEPTANCE E1 (non-gating): b1c3 knee-onset {:.2}, reference 842.03, |delta| {:.2} (target ≤ 15): {}",
        label.c_ko,
        delta,
        if delta <= 15.0 { "PASS" } else { "MISS" }
    );
}

#[test]
#[ignore = "needs the public dataset and hours of CPU; set KNEECAST_DATA"]
fn acceptance_e2_architecture_ordering() {
    let Some(cells) = load_dataset() else { return };
    let (labels, _) = label_corpus(&cells, DEFAULT_GAMMA);
    let opts = PreprocessOptions::default();
    let spec = TrainSpec {
        lr: 1e-2,
        max_epochs: 3000,
        patience: 500,
        seeds: vec![],
    };

    let mut results = Vec::new();
    for (arch, n_he) in [
        (Architecture::Rnn1dCnn, 0usize),
        (Architecture::RnnTa1dCnn, 0),
        (Architecture::RnnTaCa1dCnn, 3),
    ] {
        let config = ModelConfig {
            architecture: arch,
            h_size: 7,
            n_he,
            he_size: None,
            cnn: CnnConfig {
                filters_init: 5,
                kernel: 3,
                n_pool: 2,
                n_nopool: 1,
                dense_width: None,
            },
            n_cy: 100,
            variant: Variant::Combined,
            seed: 0,
        };
        let mut tests = Vec::new();
        for seed in 1..=5 {
            let out = train_run(&cells, &labels, &config, &spec, &opts, seed).unwrap();
            tests.push(out.report.test_rmse);
        }
        let mean = tests.iter().sum::<f64>() / tests.len() as f64;
        println!(
            "ACCEPTANCE E2 (non-gating): {} mean test RMSE {:.2}",
            arch, mean
        );
        results.push((arch, mean));
    }
    let ordered = results[2].1 < results[1].1 && results[1].1 < results[0].1;
    let best_delta = (results[2].1 - 56.23).abs();
    println!(
        "ACCEPTANCE E2 (non-gating): ordering ta_ca < ta < plain: {}; best {:.2} vs 56.23 (|delta| {:.2}, target ≤ 20): {}",
        if ordered { "PASS" } else { "MISS" },
        results[2].1,
        best_delta,
        if best_delta <= 20.0 { "PASS" } else { "MISS" }
    );
}

#[test]
#[ignore = "needs the public dataset and hours of CPU; set KNEECAST_DATA"]
fn acceptance_e3_reduced_input() {
    let Some(cells) = load_dataset() else { return };
    let (labels, _) = label_corpus(&cells, DEFAULT_GAMMA);
    let opts = PreprocessOptions::default();
    let spec = TrainSpec {
        lr: 5e-4,
        max_epochs: 3000,
        patience: 500,
        seeds: vec![],
    };
    let config = ModelConfig {
        architecture: Architecture::RnnTaCa1dCnn,
        h_size: 3,
        n_he: 3,
        he_size: None,
        cnn: CnnConfig {
            filters_init: 5,
            kernel: 3,
            n_pool: 2,
            n_nopool: 1,
            dense_width: None,
        },
        n_cy: 30,
        variant: Variant::Combined,
        seed: 0,
    };
    let mut tests = Vec::new();
    for seed in 1..=5 {
        let out = train_run(&cells, &labels, &config, &spec, &opts, seed).unwrap();
        tests.push(out.report.test_rmse);
    }
    let mean = tests.iter().sum::<f64>() / tests.len() as f64;
    let delta = (mean - 58.56).abs();
    println!(
        "ACCEPTANCE E3 (non-gating): 30-cycle MHA test RMSE {:.2} vs 58.56 (|delta| {:.2}, target ≤ 20): {}",
        mean,
        delta,
        if delta <= 20.0 { "PASS" } else { "MISS" }
    );
}

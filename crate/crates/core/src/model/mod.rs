//! Differentiable layers and the four knee-onset architectures.

mod checkpoint;
mod forward;
mod layers;

pub use checkpoint::Checkpoint;
pub use forward::{forward_batch, forward_cell, BatchData, BatchForward, CellScores};
pub use layers::{
    cnn_head, gru_forward, gru_sequence, gru_step, multi_head_attention, self_attention,
    temporal_attention, uniform_attention, CnnVars, GruVars, HeadVars, MhaVars, ModelVars,
};

use crate::autodiff::Tensor;
use crate::data::Variant;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The four model families. TA refines per-cycle context vectors from the
/// whole hidden sequence; CA applies (multi-head) self-attention across
/// the per-cycle context vectors before the CNN head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "rnn_1dcnn")]
    Rnn1dCnn,
    #[serde(rename = "rnn_ta_1dcnn")]
    RnnTa1dCnn,
    #[serde(rename = "rnn_ca_1dcnn")]
    RnnCa1dCnn,
    #[serde(rename = "rnn_ta_ca_1dcnn")]
    RnnTaCa1dCnn,
}

impl Architecture {
    pub fn has_ta(self) -> bool {
        matches!(self, Architecture::RnnTa1dCnn | Architecture::RnnTaCa1dCnn)
    }

    pub fn has_ca(self) -> bool {
        matches!(self, Architecture::RnnCa1dCnn | Architecture::RnnTaCa1dCnn)
    }

    pub const ALL: [Architecture; 4] = [
        Architecture::Rnn1dCnn,
        Architecture::RnnTa1dCnn,
        Architecture::RnnCa1dCnn,
        Architecture::RnnTaCa1dCnn,
    ];
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Architecture::Rnn1dCnn => "rnn_1dcnn",
            Architecture::RnnTa1dCnn => "rnn_ta_1dcnn",
            Architecture::RnnCa1dCnn => "rnn_ca_1dcnn",
            Architecture::RnnTaCa1dCnn => "rnn_ta_ca_1dcnn",
        };
        f.write_str(s)
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rnn_1dcnn" => Ok(Architecture::Rnn1dCnn),
            "rnn_ta_1dcnn" => Ok(Architecture::RnnTa1dCnn),
            "rnn_ca_1dcnn" => Ok(Architecture::RnnCa1dCnn),
            "rnn_ta_ca_1dcnn" => Ok(Architecture::RnnTaCa1dCnn),
            other => Err(Error::config(format!("unknown architecture {:?}", other))),
        }
    }
}

/// CNN head layout: `n_nopool` plain conv layers followed by `n_pool`
/// conv+maxpool(2) layers, all with kernel size `kernel` and tanh
/// activations. The first conv outputs `filters_init` channels and the
/// channel count doubles per pooling layer already applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnnConfig {
    pub filters_init: usize,
    pub kernel: usize,
    pub n_pool: usize,
    pub n_nopool: usize,
    /// Optional hidden dense width between flatten and the scalar output.
    #[serde(default)]
    pub dense_width: Option<usize>,
}

impl Default for CnnConfig {
    fn default() -> Self {
        CnnConfig {
            filters_init: 5,
            kernel: 3,
            n_pool: 1,
            n_nopool: 1,
            dense_width: None,
        }
    }
}

impl CnnConfig {
    /// (channels, length) after each layer, or a configuration error when
    /// the length underflows.
    pub fn stack_shape(&self, in_channels: usize, length: usize) -> Result<(usize, usize)> {
        if self.filters_init == 0 || self.kernel == 0 {
            return Err(Error::config("CNN filters and kernel must be positive"));
        }
        let mut c = in_channels;
        let mut len = length;
        let mut pools_done = 0usize;
        for layer in 0..self.n_nopool + self.n_pool {
            if len < self.kernel {
                return Err(Error::config(format!(
                    "CNN layer {}: length {} underflows kernel {}",
                    layer, len, self.kernel
                )));
            }
            c = self.filters_init << pools_done;
            len = len - self.kernel + 1;
            if layer >= self.n_nopool {
                if len < 2 {
                    return Err(Error::config(format!(
                        "CNN layer {}: length {} underflows pooling",
                        layer, len
                    )));
                }
                len /= 2;
                pools_done += 1;
            }
        }
        Ok((c, len))
    }
}

/// Everything needed to build and initialize one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub architecture: Architecture,
    pub h_size: usize,
    /// Attention heads; must be 0 for architectures without CA.
    #[serde(default)]
    pub n_he: usize,
    /// Per-head query/key/value size; defaults to `h_size`.
    #[serde(default)]
    pub he_size: Option<usize>,
    pub cnn: CnnConfig,
    pub n_cy: usize,
    pub variant: Variant,
    pub seed: u64,
}

impl ModelConfig {
    pub fn head_size(&self) -> usize {
        self.he_size.unwrap_or(self.h_size)
    }

    /// Channel count entering the CNN head.
    pub fn context_width(&self) -> usize {
        if self.architecture.has_ca() {
            self.head_size()
        } else {
            self.h_size
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_size == 0 || self.n_cy == 0 {
            return Err(Error::config("h_size and n_cy must be positive"));
        }
        if self.architecture.has_ca() {
            if self.n_he == 0 {
                return Err(Error::config(format!(
                    "{} needs at least one attention head",
                    self.architecture
                )));
            }
        } else if self.n_he != 0 {
            return Err(Error::config(format!(
                "{} takes no attention heads (n_he must be 0)",
                self.architecture
            )));
        }
        self.cnn.stack_shape(self.context_width(), self.n_cy)?;
        Ok(())
    }

    pub fn checkpoint_id(&self) -> String {
        format!("{}-ncy{}-seed{}", self.architecture, self.n_cy, self.seed)
    }
}

// ── parameters ───────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub w_update: Tensor,
    pub u_update: Tensor,
    pub b_update: Tensor,
    pub w_reset: Tensor,
    pub u_reset: Tensor,
    pub b_reset: Tensor,
    pub w_cand: Tensor,
    pub u_cand: Tensor,
    pub b_cand: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaParams {
    /// Scoring vector applied to each hidden state, 1 x h_size.
    pub w_b: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadParams {
    pub w_query: Tensor,
    pub w_key: Tensor,
    pub w_value: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MhaParams {
    pub heads: Vec<HeadParams>,
    /// Projection back to a single head's width, (n_he * he_size) x he_size.
    pub w_out: Tensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayerParams {
    pub kernels: Tensor,
    pub bias: Tensor,
    pub pool: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnParams {
    pub layers: Vec<ConvLayerParams>,
    /// Dense stack after flatten; the last pair is the linear output.
    pub dense: Vec<(Tensor, Tensor)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub gru: GruParams,
    pub ta: Option<TaParams>,
    pub mha: Option<MhaParams>,
    pub cnn: CnnParams,
}

fn uniform_fan_in(rng: &mut ChaCha8Rng, rows: usize, cols: usize, fan_in: usize) -> Tensor {
    let bound = 1.0 / (fan_in as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    Tensor::matrix(rows, cols, data)
}

impl ModelParams {
    /// Seeded initialization: weights uniform in +-1/sqrt(fan_in), biases
    /// zero. The draw order is fixed, so a seed pins every parameter.
    pub fn init(config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let n_v = config.variant.n_v();
        let h = config.h_size;

        let gate = |rng: &mut ChaCha8Rng| {
            (
                uniform_fan_in(rng, n_v, h, n_v),
                uniform_fan_in(rng, h, h, h),
                Tensor::zeros(vec![1, h]),
            )
        };
        let (w_update, u_update, mut b_update) = gate(&mut rng);
        // Bias the update gate low so the fresh recurrence is leaky:
        // hidden states start out tracking local inputs instead of
        // accumulating, which keeps zero-padded timesteps uninformative.
        b_update.data_mut().fill(-1.0);
        let (w_reset, u_reset, b_reset) = gate(&mut rng);
        let (w_cand, u_cand, b_cand) = gate(&mut rng);
        let gru = GruParams {
            w_update,
            u_update,
            b_update,
            w_reset,
            u_reset,
            b_reset,
            w_cand,
            u_cand,
            b_cand,
        };

        // The scoring projection is fixed during training (the recurrence
        // learns against it), so its scale sets the attention softmax
        // temperature. Draw it wide enough that hidden-state contrasts
        // register in the scores from the start.
        let ta = config.architecture.has_ta().then(|| {
            let bound = 4.0 / (h as f64).sqrt();
            let data = (0..h).map(|_| rng.gen_range(-bound..bound)).collect();
            TaParams {
                w_b: Tensor::matrix(1, h, data),
            }
        });

        let mha = if config.architecture.has_ca() {
            let he = config.head_size();
            let heads = (0..config.n_he)
                .map(|_| HeadParams {
                    w_query: uniform_fan_in(&mut rng, h, he, h),
                    w_key: uniform_fan_in(&mut rng, h, he, h),
                    w_value: uniform_fan_in(&mut rng, h, he, h),
                })
                .collect();
            let w_out = uniform_fan_in(&mut rng, config.n_he * he, he, config.n_he * he);
            Some(MhaParams { heads, w_out })
        } else {
            None
        };

        let cnn = Self::init_cnn(config, &mut rng)?;
        Ok(ModelParams { gru, ta, mha, cnn })
    }

    fn init_cnn(config: &ModelConfig, rng: &mut ChaCha8Rng) -> Result<CnnParams> {
        let cfg = &config.cnn;
        let mut layers = Vec::new();
        let mut c_in = config.context_width();
        let mut pools_done = 0usize;
        for layer in 0..cfg.n_nopool + cfg.n_pool {
            let c_out = cfg.filters_init << pools_done;
            let fan_in = c_in * cfg.kernel;
            let bound = 1.0 / (fan_in as f64).sqrt();
            let data = (0..c_out * c_in * cfg.kernel)
                .map(|_| rng.gen_range(-bound..bound))
                .collect();
            let pool = layer >= cfg.n_nopool;
            layers.push(ConvLayerParams {
                kernels: Tensor::new(vec![c_out, c_in, cfg.kernel], data),
                bias: Tensor::zeros(vec![c_out, 1]),
                pool,
            });
            c_in = c_out;
            if pool {
                pools_done += 1;
            }
        }

        // The output bias starts at the midpoint of the normalized target
        // range so early training is not dominated by a mean chase.
        let (c_last, l_last) = cfg.stack_shape(config.context_width(), config.n_cy)?;
        let flat = c_last * l_last;
        let mut dense = Vec::new();
        let mid = Tensor::matrix(1, 1, vec![0.5]);
        match cfg.dense_width {
            Some(w) if w > 0 => {
                dense.push((
                    uniform_fan_in(rng, flat, w, flat),
                    Tensor::zeros(vec![1, w]),
                ));
                dense.push((uniform_fan_in(rng, w, 1, w), mid));
            }
            _ => {
                dense.push((uniform_fan_in(rng, flat, 1, flat), mid));
            }
        }
        Ok(CnnParams { layers, dense })
    }

    /// Visit parameters in a fixed order with stable names.
    pub fn visit(&self, f: &mut impl FnMut(&str, &Tensor)) {
        let g = &self.gru;
        f("gru.w_update", &g.w_update);
        f("gru.u_update", &g.u_update);
        f("gru.b_update", &g.b_update);
        f("gru.w_reset", &g.w_reset);
        f("gru.u_reset", &g.u_reset);
        f("gru.b_reset", &g.b_reset);
        f("gru.w_cand", &g.w_cand);
        f("gru.u_cand", &g.u_cand);
        f("gru.b_cand", &g.b_cand);
        if let Some(ta) = &self.ta {
            f("ta.w_b", &ta.w_b);
        }
        if let Some(mha) = &self.mha {
            for (p, head) in mha.heads.iter().enumerate() {
                f(&format!("mha.head{}.w_query", p), &head.w_query);
                f(&format!("mha.head{}.w_key", p), &head.w_key);
                f(&format!("mha.head{}.w_value", p), &head.w_value);
            }
            f("mha.w_out", &mha.w_out);
        }
        for (l, layer) in self.cnn.layers.iter().enumerate() {
            f(&format!("cnn.layer{}.kernels", l), &layer.kernels);
            f(&format!("cnn.layer{}.bias", l), &layer.bias);
        }
        for (d, (w, b)) in self.cnn.dense.iter().enumerate() {
            f(&format!("cnn.dense{}.w", d), w);
            f(&format!("cnn.dense{}.b", d), b);
        }
    }

    pub fn visit_mut(&mut self, f: &mut impl FnMut(&str, &mut Tensor)) {
        let g = &mut self.gru;
        f("gru.w_update", &mut g.w_update);
        f("gru.u_update", &mut g.u_update);
        f("gru.b_update", &mut g.b_update);
        f("gru.w_reset", &mut g.w_reset);
        f("gru.u_reset", &mut g.u_reset);
        f("gru.b_reset", &mut g.b_reset);
        f("gru.w_cand", &mut g.w_cand);
        f("gru.u_cand", &mut g.u_cand);
        f("gru.b_cand", &mut g.b_cand);
        if let Some(ta) = &mut self.ta {
            f("ta.w_b", &mut ta.w_b);
        }
        if let Some(mha) = &mut self.mha {
            for (p, head) in mha.heads.iter_mut().enumerate() {
                f(&format!("mha.head{}.w_query", p), &mut head.w_query);
                f(&format!("mha.head{}.w_key", p), &mut head.w_key);
                f(&format!("mha.head{}.w_value", p), &mut head.w_value);
            }
            f("mha.w_out", &mut mha.w_out);
        }
        for (l, layer) in self.cnn.layers.iter_mut().enumerate() {
            f(&format!("cnn.layer{}.kernels", l), &mut layer.kernels);
            f(&format!("cnn.layer{}.bias", l), &mut layer.bias);
        }
        for (d, (w, b)) in self.cnn.dense.iter_mut().enumerate() {
            f(&format!("cnn.dense{}.w", d), w);
            f(&format!("cnn.dense{}.b", d), b);
        }
    }

    pub fn n_params(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_, t| n += t.numel());
        n
    }
}

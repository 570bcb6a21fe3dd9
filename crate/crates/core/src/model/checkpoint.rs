//! Versioned JSON checkpoints.
//!
//! Parameters are stored as flat f64 arrays in `visit` order. serde_json
//! prints doubles with a shortest round-tripping representation, so a
//! reloaded checkpoint reproduces forward outputs bitwise.

use super::{ModelConfig, ModelParams};
use crate::autodiff::Tensor;
use crate::data::Normalizer;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NamedTensor {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub id: String,
    pub config: ModelConfig,
    pub input_norm: Normalizer,
    /// (min, max) of the training-split knee-onset targets.
    pub target_range: (f64, f64),
    params: Vec<NamedTensor>,
}

impl Checkpoint {
    pub fn new(
        config: &ModelConfig,
        params: &ModelParams,
        input_norm: Normalizer,
        target_range: (f64, f64),
    ) -> Self {
        let mut tensors = Vec::new();
        params.visit(&mut |name, t| {
            tensors.push(NamedTensor {
                name: name.to_string(),
                shape: t.shape().to_vec(),
                data: t.data().to_vec(),
            });
        });
        Checkpoint {
            version: CHECKPOINT_VERSION,
            id: config.checkpoint_id(),
            config: config.clone(),
            input_norm,
            target_range,
            params: tensors,
        }
    }

    /// Rebuild model parameters; names and shapes must match the config's
    /// parameter layout exactly.
    pub fn to_params(&self) -> Result<ModelParams> {
        let mut params = ModelParams::init(&self.config)?;
        let mut iter = self.params.iter();
        let mut err: Option<Error> = None;
        params.visit_mut(&mut |name, t| {
            if err.is_some() {
                return;
            }
            match iter.next() {
                Some(saved) if saved.name == name && saved.shape == t.shape() => {
                    *t = Tensor::new(saved.shape.clone(), saved.data.clone());
                }
                Some(saved) => {
                    err = Some(Error::Checkpoint(format!(
                        "parameter mismatch: expected {} {:?}, found {} {:?}",
                        name,
                        t.shape(),
                        saved.name,
                        saved.shape
                    )));
                }
                None => {
                    err = Some(Error::Checkpoint(format!("missing parameter {}", name)));
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if iter.next().is_some() {
            return Err(Error::Checkpoint(
                "trailing parameters in checkpoint".into(),
            ));
        }
        Ok(params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        serde_json::to_writer(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_reader(fs::File::open(path)?)?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {}",
                ckpt.version
            )));
        }
        ckpt.config.validate()?;
        Ok(ckpt)
    }

    /// Map a normalized prediction back to cycles.
    pub fn denormalize_target(&self, normalized: f64) -> f64 {
        let (lo, hi) = self.target_range;
        lo + normalized * (hi - lo)
    }

    /// Map a knee-onset target in cycles to normalized space.
    pub fn normalize_target(&self, cycles: f64) -> f64 {
        let (lo, hi) = self.target_range;
        if hi > lo {
            (cycles - lo) / (hi - lo)
        } else {
            0.0
        }
    }
}

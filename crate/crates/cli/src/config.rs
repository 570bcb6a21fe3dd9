//! Flat key-value run configuration. Any field present in the file acts
//! as the default for the matching flag; explicit flags win.

use kneecast_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data: Option<String>,
    pub labels: Option<String>,
    pub architecture: Option<String>,
    pub variant: Option<String>,
    pub n_cy: Option<usize>,
    pub h_size: Option<usize>,
    pub heads: Option<usize>,
    pub he_size: Option<usize>,
    pub filters: Option<usize>,
    pub kernel: Option<usize>,
    pub n_pool: Option<usize>,
    pub n_nopool: Option<usize>,
    pub dense_width: Option<usize>,
    pub lr: Option<f64>,
    pub epochs: Option<usize>,
    pub patience: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub gamma: Option<f64>,
    pub skip_smoothing: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::config(format!("cannot read {}: {}", p.display(), e)))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::config(format!("bad config {}: {}", p.display(), e)))
            }
        }
    }
}

/// Flag-over-file resolution.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn pick_opt<T: Clone>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

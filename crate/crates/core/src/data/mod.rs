//! Raw cycling data, cleaning, and input-matrix construction.

mod clean;
mod input;
mod io;
mod synthetic;

pub use clean::{clean_outliers, clean_outliers_with, savitzky_golay, sg_weights};
pub use input::{
    build_input, build_raw_matrix, InputTensor, Normalizer, PreprocessOptions, Variant,
};
pub use io::{convert_dump, load_corpus, save_cells_csv, save_cells_json, CorpusFormat};
pub use synthetic::{generate_synthetic, CellTruth, SyntheticCorpus, SyntheticSpec};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Two-step constant-current charging policy, e.g. "5.4C(40%)-3.6C":
/// `cr_first` up to `q_tr_pct` % SOC, then `cr_second` up to 80 %.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargingPolicy {
    pub cr_first: f64,
    pub q_tr_pct: f64,
    pub cr_second: f64,
}

impl ChargingPolicy {
    /// Parse the "C1(Q1%)-C2" policy format. A trailing `C` on the second
    /// rate is optional; some published tables omit it.
    pub fn parse(s: &str) -> Result<Self> {
        let err = || Error::ingest(format!("malformed charging policy {:?}", s));
        let (first, rest) = s.split_once("C(").ok_or_else(err)?;
        let (q, second) = rest.split_once("%)-").ok_or_else(err)?;
        let second = second.strip_suffix('C').unwrap_or(second);
        let policy = ChargingPolicy {
            cr_first: first.trim().parse().map_err(|_| err())?,
            q_tr_pct: q.trim().parse().map_err(|_| err())?,
            cr_second: second.trim().parse().map_err(|_| err())?,
        };
        if policy.cr_first <= 0.0 || policy.cr_second <= 0.0 {
            return Err(Error::ingest(format!(
                "non-positive C-rate in policy {:?}",
                s
            )));
        }
        if policy.q_tr_pct <= 0.0 || policy.q_tr_pct > 80.0 {
            return Err(Error::ingest(format!(
                "transition SOC {}% outside (0, 80] in policy {:?}",
                policy.q_tr_pct, s
            )));
        }
        Ok(policy)
    }

    pub fn format(&self) -> String {
        format!("{}C({}%)-{}C", self.cr_first, self.q_tr_pct, self.cr_second)
    }

    /// Average C-rate of the two CC steps up to 80 % SOC.
    pub fn average_c_rate(&self) -> f64 {
        (self.cr_first * self.q_tr_pct + self.cr_second * (80.0 - self.q_tr_pct)) / 80.0
    }
}

/// One charge/rest/discharge/rest cycle of a cell: equal-length series
/// sampled against `t_min`, plus the cycle's total discharge capacity.
/// Current is signed, charge positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleTrace {
    pub index: u32,
    pub t_min: Vec<f64>,
    pub voltage: Vec<f64>,
    pub current: Vec<f64>,
    pub temp: Vec<f64>,
    pub q_c: Vec<f64>,
    pub q_d: Vec<f64>,
    pub q_end: f64,
}

impl CycleTrace {
    pub fn len(&self) -> usize {
        self.t_min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_min.is_empty()
    }

    pub fn validate(&self, cell: &str) -> Result<()> {
        let n = self.t_min.len();
        let coords =
            |msg: String| Error::ingest(format!("cell {} cycle {}: {}", cell, self.index, msg));
        if n < 2 {
            return Err(coords(format!("series length {} < 2", n)));
        }
        for series in [
            &self.voltage,
            &self.current,
            &self.temp,
            &self.q_c,
            &self.q_d,
        ] {
            if series.len() != n {
                return Err(coords(format!(
                    "series length {} does not match time length {}",
                    series.len(),
                    n
                )));
            }
        }
        for w in self.t_min.windows(2) {
            if w[1] <= w[0] {
                return Err(coords(format!("non-monotone time {} -> {}", w[0], w[1])));
            }
        }
        for (name, series) in [("Qc", &self.q_c), ("Qd", &self.q_d)] {
            for w in series.windows(2) {
                if w[1] < w[0] - 1e-9 {
                    return Err(coords(format!("{} decreases {} -> {}", name, w[0], w[1])));
                }
            }
        }
        Ok(())
    }
}

/// A cell's per-cycle raw time series plus metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub cell_id: String,
    pub batch: u8,
    pub policy: ChargingPolicy,
    pub cycles: Vec<CycleTrace>,
}

impl CellRecord {
    /// Cycles must be ordered from 1 with no gaps in the retained prefix.
    pub fn validate(&self) -> Result<()> {
        if self.cycles.is_empty() {
            return Err(Error::ingest(format!(
                "cell {} has no cycles",
                self.cell_id
            )));
        }
        for (i, cy) in self.cycles.iter().enumerate() {
            if cy.index as usize != i + 1 {
                return Err(Error::ingest(format!(
                    "cell {}: cycle index {} at position {} (expected {})",
                    self.cell_id,
                    cy.index,
                    i,
                    i + 1
                )));
            }
            cy.validate(&self.cell_id)?;
        }
        Ok(())
    }

    /// Capacity-fade curve: (cycle number, discharge capacity).
    pub fn fade_curve(&self) -> Vec<(f64, f64)> {
        self.cycles
            .iter()
            .map(|c| (c.index as f64, c.q_end))
            .collect()
    }
}

//! Per-cell input matrices: resampling, zero-padding, normalization.
//!
//! Each cell becomes an `n_v x (n_cy * n_ts)` matrix whose columns are
//! grouped cycle by cycle. Three variants exist: the combined dataset
//! samples every variable on a fixed 0.5-minute grid; the charging-only
//! dataset resamples the charge phase to 40 points; the discharging-only
//! dataset re-indexes the discharge by voltage.

use super::{CellRecord, CycleTrace};
use crate::autodiff::Tensor;
use crate::data::clean::{clean_outliers_with, savitzky_golay};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Which subset of each cycle feeds the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Combined,
    ChargingOnly,
    DischargingOnly,
}

impl Variant {
    /// Number of input variables (matrix rows per cycle block).
    pub fn n_v(self) -> usize {
        match self {
            Variant::Combined => 5,
            Variant::ChargingOnly => 4,
            Variant::DischargingOnly => 3,
        }
    }

    /// Number of resampled timesteps per cycle.
    pub fn n_ts(self) -> usize {
        match self {
            Variant::Combined => 120,
            Variant::ChargingOnly => 40,
            Variant::DischargingOnly => 1000,
        }
    }

    pub fn variable_names(self) -> &'static [&'static str] {
        match self {
            Variant::Combined => &["V", "I", "T", "Qc", "Qd"],
            Variant::ChargingOnly => &["V", "I", "T", "Qc"],
            Variant::DischargingOnly => &["dQdV", "Qd", "T"],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::Combined => "combined",
            Variant::ChargingOnly => "charging_only",
            Variant::DischargingOnly => "discharging_only",
        };
        f.write_str(s)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combined" => Ok(Variant::Combined),
            "charging_only" => Ok(Variant::ChargingOnly),
            "discharging_only" => Ok(Variant::DischargingOnly),
            other => Err(Error::config(format!("unknown variant {:?}", other))),
        }
    }
}

/// Cleaning and resampling knobs. Defaults follow the module's ledger:
/// Hampel window 11 / k = 6, Savitzky-Golay window 11 / order 2, and a
/// fixed descending discharge voltage grid over [2.0 V, 3.5 V].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PreprocessOptions {
    pub hampel_window: usize,
    pub hampel_k: f64,
    pub sg_window: usize,
    pub sg_order: usize,
    pub discharge_v_top: f64,
    pub discharge_v_bottom: f64,
    /// Skip Hampel + Savitzky-Golay (synthetic corpora are already clean).
    pub skip_smoothing: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            hampel_window: 11,
            hampel_k: 6.0,
            sg_window: 11,
            sg_order: 2,
            discharge_v_top: 3.5,
            discharge_v_bottom: 2.0,
            skip_smoothing: false,
        }
    }
}

/// Combined-variant sampling grid: 0.5-minute steps up to 60 minutes.
pub const COMBINED_DT_MIN: f64 = 0.5;
pub const COMBINED_SPAN_MIN: f64 = 60.0;

/// The normalized per-cell input matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTensor {
    pub cell_id: String,
    pub variant: Variant,
    pub n_cy: usize,
    pub data: Tensor,
    /// Per-variable (min, max) that produced the normalization.
    pub norm: Vec<(f64, f64)>,
}

impl InputTensor {
    pub fn n_v(&self) -> usize {
        self.variant.n_v()
    }

    pub fn n_ts(&self) -> usize {
        self.variant.n_ts()
    }

    /// The `n_v x n_ts` block of cycle `j` (0-based).
    pub fn cycle_block(&self, j: usize) -> Vec<f64> {
        let n_ts = self.n_ts();
        let mut out = Vec::with_capacity(self.n_v() * n_ts);
        for r in 0..self.n_v() {
            let row = self.data.row(r);
            out.extend_from_slice(&row[j * n_ts..(j + 1) * n_ts]);
        }
        out
    }
}

/// Per-variable min-max scaler fit on the training corpus only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub ranges: Vec<(f64, f64)>,
}

impl Normalizer {
    /// Fit from raw (unnormalized) matrices; row r of each matrix is
    /// variable r.
    pub fn fit<'a>(matrices: impl IntoIterator<Item = &'a Tensor>) -> Self {
        let mut ranges: Vec<(f64, f64)> = Vec::new();
        for m in matrices {
            if ranges.is_empty() {
                ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); m.rows()];
            }
            assert_eq!(
                ranges.len(),
                m.rows(),
                "variable count mismatch across matrices"
            );
            for (r, range) in ranges.iter_mut().enumerate() {
                for &v in m.row(r) {
                    range.0 = range.0.min(v);
                    range.1 = range.1.max(v);
                }
            }
        }
        Normalizer { ranges }
    }

    /// Map to [0, 1], clamping values outside the fitted range. Constant
    /// variables map to 0.
    pub fn apply(&self, raw: &Tensor) -> Tensor {
        assert_eq!(raw.rows(), self.ranges.len(), "variable count mismatch");
        let cols = raw.cols();
        let mut data = Vec::with_capacity(raw.numel());
        for (r, &(lo, hi)) in self.ranges.iter().enumerate() {
            let span = hi - lo;
            for &v in raw.row(r) {
                if span <= 0.0 {
                    data.push(0.0);
                } else {
                    data.push(((v - lo) / span).clamp(0.0, 1.0));
                }
            }
        }
        Tensor::matrix(self.ranges.len(), cols, data)
    }
}

/// Linear interpolation of `(xs, ys)` at `x`, holding the first value
/// before the first sample. Caller handles padding past the last sample.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let n = xs.len();
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    // Binary search for the bracketing segment.
    let mut hi = match xs.binary_search_by(|probe| probe.partial_cmp(&x).unwrap()) {
        Ok(i) => return ys[i],
        Err(i) => i,
    };
    if hi == 0 {
        hi = 1;
    }
    let (x0, x1) = (xs[hi - 1], xs[hi]);
    let (y0, y1) = (ys[hi - 1], ys[hi]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn smooth(series: &[f64], opts: &PreprocessOptions) -> Vec<f64> {
    if opts.skip_smoothing {
        return series.to_vec();
    }
    let cleaned = clean_outliers_with(series, opts.hampel_window, opts.hampel_k);
    if cleaned.len() >= opts.sg_window {
        savitzky_golay(&cleaned, opts.sg_window, opts.sg_order).unwrap_or(cleaned)
    } else {
        cleaned
    }
}

/// Resample one series onto the combined grid: linear interpolation up to
/// the cycle's last timestamp, exact zeros beyond it.
fn resample_combined(t: &[f64], series: &[f64], n_ts: usize) -> Vec<f64> {
    let t_last = *t.last().unwrap();
    (0..n_ts)
        .map(|i| {
            let g = i as f64 * COMBINED_DT_MIN;
            if g > t_last {
                0.0
            } else {
                interp(t, series, g)
            }
        })
        .collect()
}

fn combined_rows(cycle: &CycleTrace, cell: &str, opts: &PreprocessOptions) -> Vec<Vec<f64>> {
    let n_ts = Variant::Combined.n_ts();
    if *cycle.t_min.last().unwrap() > COMBINED_SPAN_MIN {
        log::warn!(
            "cell {} cycle {}: {:.1} min exceeds the {} min window, truncating",
            cell,
            cycle.index,
            cycle.t_min.last().unwrap(),
            COMBINED_SPAN_MIN
        );
    }
    [
        &cycle.voltage,
        &cycle.current,
        &cycle.temp,
        &cycle.q_c,
        &cycle.q_d,
    ]
    .into_iter()
    .map(|series| resample_combined(&cycle.t_min, &smooth(series, opts), n_ts))
    .collect()
}

/// Indices of the charge phase: every sample with positive current.
fn charge_indices(cycle: &CycleTrace) -> Vec<usize> {
    (0..cycle.len())
        .filter(|&i| cycle.current[i] > 0.0)
        .collect()
}

fn charging_rows(cycle: &CycleTrace, cell: &str, opts: &PreprocessOptions) -> Vec<Vec<f64>> {
    let n_ts = Variant::ChargingOnly.n_ts();
    let idx = charge_indices(cycle);
    if idx.len() < 2 {
        log::warn!(
            "cell {} cycle {}: no charge phase, padding zeros",
            cell,
            cycle.index
        );
        return vec![vec![0.0; n_ts]; Variant::ChargingOnly.n_v()];
    }
    let t: Vec<f64> = idx.iter().map(|&i| cycle.t_min[i]).collect();
    let span = t[t.len() - 1] - t[0];
    let grid: Vec<f64> = (0..n_ts)
        .map(|i| t[0] + span * i as f64 / (n_ts - 1) as f64)
        .collect();
    [&cycle.voltage, &cycle.current, &cycle.temp, &cycle.q_c]
        .into_iter()
        .map(|series| {
            let seg: Vec<f64> = idx.iter().map(|&i| series[i]).collect();
            let seg = smooth(&seg, opts);
            grid.iter().map(|&g| interp(&t, &seg, g)).collect()
        })
        .collect()
}

fn discharging_rows(cycle: &CycleTrace, cell: &str, opts: &PreprocessOptions) -> Vec<Vec<f64>> {
    let n_ts = Variant::DischargingOnly.n_ts();
    let idx: Vec<usize> = (0..cycle.len())
        .filter(|&i| cycle.current[i] < 0.0)
        .collect();
    if idx.len() < 3 {
        log::warn!(
            "cell {} cycle {}: no discharge phase, padding zeros",
            cell,
            cycle.index
        );
        return vec![vec![0.0; n_ts]; Variant::DischargingOnly.n_v()];
    }

    // Re-sort by voltage ascending, averaging duplicate voltages, so Q(V)
    // and T(V) become functions of V.
    let mut pts: Vec<(f64, f64, f64)> = idx
        .iter()
        .map(|&i| (cycle.voltage[i], cycle.q_d[i], cycle.temp[i]))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut vs = Vec::with_capacity(pts.len());
    let mut qs = Vec::with_capacity(pts.len());
    let mut ts = Vec::with_capacity(pts.len());
    for (v, q, t) in pts {
        if let Some(&last) = vs.last() {
            if v - last < 1e-12 {
                let k = vs.len() - 1;
                qs[k] = 0.5 * (qs[k] + q);
                ts[k] = 0.5 * (ts[k] + t);
                continue;
            }
        }
        vs.push(v);
        qs.push(q);
        ts.push(t);
    }
    let qs = smooth(&qs, opts);
    let ts = smooth(&ts, opts);

    // Descending uniform grid (surrogate of time) over the configured span.
    let (v_top, v_bot) = (opts.discharge_v_top, opts.discharge_v_bottom);
    let grid: Vec<f64> = (0..n_ts)
        .map(|i| v_top - (v_top - v_bot) * i as f64 / (n_ts - 1) as f64)
        .collect();
    let (v_min, v_max) = (vs[0], vs[vs.len() - 1]);
    let on_grid = |series: &[f64], g: f64| -> f64 {
        if g < v_min || g > v_max {
            0.0
        } else {
            interp(&vs, series, g)
        }
    };

    let q_grid: Vec<f64> = grid.iter().map(|&g| on_grid(&qs, g)).collect();
    let t_grid: Vec<f64> = grid.iter().map(|&g| on_grid(&ts, g)).collect();

    // Central differences on the gridded smoothed Q(V).
    let mut dqdv = vec![0.0; n_ts];
    for i in 0..n_ts {
        let (a, b) = if i == 0 {
            (i, i + 1)
        } else if i == n_ts - 1 {
            (i - 1, i)
        } else {
            (i - 1, i + 1)
        };
        let dv = grid[b] - grid[a];
        dqdv[i] = if dv == 0.0 {
            0.0
        } else {
            (q_grid[b] - q_grid[a]) / dv
        };
        // Keep padding regions exactly zero.
        if grid[i] < v_min || grid[i] > v_max {
            dqdv[i] = 0.0;
        }
    }
    let _ = cell;
    vec![dqdv, q_grid, t_grid]
}

/// Build the raw (pre-normalization) input matrix for one cell.
pub fn build_raw_matrix(
    record: &CellRecord,
    variant: Variant,
    n_cy: usize,
    opts: &PreprocessOptions,
) -> Result<Tensor> {
    if record.cycles.len() < n_cy {
        return Err(Error::contract(format!(
            "cell {} has {} cycles, needs {}",
            record.cell_id,
            record.cycles.len(),
            n_cy
        )));
    }
    let (n_v, n_ts) = (variant.n_v(), variant.n_ts());
    let mut rows = vec![Vec::with_capacity(n_cy * n_ts); n_v];
    for cycle in &record.cycles[..n_cy] {
        let block = match variant {
            Variant::Combined => combined_rows(cycle, &record.cell_id, opts),
            Variant::ChargingOnly => charging_rows(cycle, &record.cell_id, opts),
            Variant::DischargingOnly => discharging_rows(cycle, &record.cell_id, opts),
        };
        for (r, series) in block.into_iter().enumerate() {
            rows[r].extend(series);
        }
    }
    Ok(Tensor::from_rows(&rows))
}

/// Resample, pad, and normalize one cell with an already-fitted scaler.
pub fn build_input(
    record: &CellRecord,
    variant: Variant,
    n_cy: usize,
    opts: &PreprocessOptions,
    norm: &Normalizer,
) -> Result<InputTensor> {
    let raw = build_raw_matrix(record, variant, n_cy, opts)?;
    Ok(InputTensor {
        cell_id: record.cell_id.clone(),
        variant,
        n_cy,
        data: norm.apply(&raw),
        norm: norm.ranges.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ChargingPolicy;

    fn ramp_cell(last_min: f64, dt: f64) -> CellRecord {
        let n = (last_min / dt) as usize + 1;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let cycle = CycleTrace {
            index: 1,
            voltage: t.iter().map(|&x| 3.0 + 0.01 * x).collect(),
            current: t
                .iter()
                .map(|&x| if x < last_min * 0.5 { 2.0 } else { -4.0 })
                .collect(),
            temp: vec![30.0; n],
            q_c: t.iter().map(|&x| 0.02 * x).collect(),
            q_d: t.iter().map(|&x| (0.01 * x).max(0.0)).collect(),
            q_end: 1.1,
            t_min: t,
        };
        CellRecord {
            cell_id: "syn0".into(),
            batch: 1,
            policy: ChargingPolicy::parse("4C(80%)-4C").unwrap(),
            cycles: vec![cycle],
        }
    }

    fn opts() -> PreprocessOptions {
        PreprocessOptions {
            skip_smoothing: true,
            ..Default::default()
        }
    }

    #[test]
    fn combined_shape_law() {
        let rec = ramp_cell(50.0, 0.5);
        let raw = build_raw_matrix(&rec, Variant::Combined, 1, &opts()).unwrap();
        assert_eq!(raw.shape(), &[5, 120]);
    }

    #[test]
    fn padding_zero_after_cycle_end() {
        let rec = ramp_cell(45.0, 0.5);
        let raw = build_raw_matrix(&rec, Variant::Combined, 1, &opts()).unwrap();
        // Grid columns strictly after 45 min are exactly zero.
        let first_padded = (45.0 / COMBINED_DT_MIN) as usize + 1;
        for r in 0..5 {
            for c in first_padded..120 {
                assert_eq!(raw.at(r, c), 0.0, "row {} col {}", r, c);
            }
            // Last in-range column is the endpoint value, not zero.
            assert_ne!(raw.at(0, first_padded - 1), 0.0);
        }
    }

    #[test]
    fn resampling_preserves_first_sample() {
        let rec = ramp_cell(50.0, 0.7);
        let raw = build_raw_matrix(&rec, Variant::Combined, 1, &opts()).unwrap();
        assert_eq!(raw.at(0, 0), rec.cycles[0].voltage[0]);
    }

    #[test]
    fn charging_only_ignores_discharge_edits() {
        let rec = ramp_cell(50.0, 0.5);
        let a = build_raw_matrix(&rec, Variant::ChargingOnly, 1, &opts()).unwrap();
        let mut edited = rec.clone();
        for (i, cur) in edited.cycles[0].current.clone().iter().enumerate() {
            if *cur < 0.0 {
                edited.cycles[0].voltage[i] += 0.5;
                edited.cycles[0].temp[i] += 3.0;
            }
        }
        let b = build_raw_matrix(&edited, Variant::ChargingOnly, 1, &opts()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shape(), &[4, 40]);
    }

    #[test]
    fn discharge_dqdv_matches_quadratic_derivative() {
        // CC discharge with Q(V) = a(v_top - V) + b(v_top - V)^2 so that
        // dQ/dV = -a - 2b(v_top - V).
        let n = 400;
        let (v_top, v_bot) = (3.5, 2.0);
        let (a, b) = (0.6, 0.12);
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.05).collect();
        let v: Vec<f64> = (0..n)
            .map(|i| v_top - (v_top - v_bot) * i as f64 / (n - 1) as f64)
            .collect();
        let q: Vec<f64> = v
            .iter()
            .map(|&vi| a * (v_top - vi) + b * (v_top - vi).powi(2))
            .collect();
        let cycle = CycleTrace {
            index: 1,
            voltage: v,
            current: vec![-4.4; n],
            temp: vec![31.0; n],
            q_c: vec![1.1; n],
            q_d: q,
            q_end: 1.1,
            t_min: t,
        };
        let rec = CellRecord {
            cell_id: "dq".into(),
            batch: 1,
            policy: ChargingPolicy::parse("4C(80%)-4C").unwrap(),
            cycles: vec![cycle],
        };
        let raw = build_raw_matrix(&rec, Variant::DischargingOnly, 1, &opts()).unwrap();
        assert_eq!(raw.shape(), &[3, 1000]);
        let n_ts = 1000;
        for i in 20..n_ts - 20 {
            let gv = v_top - (v_top - v_bot) * i as f64 / (n_ts - 1) as f64;
            let truth = -a - 2.0 * b * (v_top - gv);
            let got = raw.at(0, i);
            assert!(
                (got - truth).abs() <= 0.02 * truth.abs(),
                "col {}: {} vs {}",
                i,
                got,
                truth
            );
        }
    }

    #[test]
    fn normalizer_basics() {
        let m = Tensor::matrix(2, 2, vec![2.0, 4.0, 7.0, 7.0]);
        let norm = Normalizer::fit([&m]);
        let applied = norm.apply(&Tensor::matrix(2, 2, vec![3.0, 1.0, 7.0, 9.0]));
        // x=3 in {2,4} -> 0.5; x=1 clamps to 0; constant row -> zeros.
        assert_eq!(applied.data(), &[0.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn build_input_idempotent() {
        let rec = ramp_cell(50.0, 0.5);
        let raw = build_raw_matrix(&rec, Variant::Combined, 1, &opts()).unwrap();
        let norm = Normalizer::fit([&raw]);
        let a = build_input(&rec, Variant::Combined, 1, &opts(), &norm).unwrap();
        let b = build_input(&rec, Variant::Combined, 1, &opts(), &norm).unwrap();
        assert_eq!(a, b);
        assert!(a.data.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}

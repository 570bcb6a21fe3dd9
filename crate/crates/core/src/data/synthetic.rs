//! Synthetic cycling corpora for desk-scale testing.
//!
//! The generator mimics the structure of the public dataset: three
//! batches with different rest lengths, two-step CC charging to 80 % SOC,
//! a shared 4C CC discharge, and capacity fade that follows an exact
//! double Bacon-Watts curve whose true breakpoints are recorded.
//!
//! The cell-to-cell signal that makes the corpora learnable is the
//! voltage relaxation during the post-charge rest: cells with earlier
//! knees (higher internal resistance) relax further, and the relaxation
//! deepens slowly over cycles. The long-rest batch (batch 2) exposes this
//! plateau for ten combined-grid columns; batch 2 cells also have shorter
//! lifespans, and within the batch longer rests pair with earlier knees.

use super::{CellRecord, ChargingPolicy, CycleTrace};
use crate::knee::dbw_value;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::Range;

/// Nominal cell capacity in Ah.
pub const NOMINAL_CAPACITY_AH: f64 = 1.1;

const AMBIENT_C: f64 = 30.0;
const DISCHARGE_C_RATE: f64 = 4.0;
/// Fade-model coefficients a1..a3 shared by all generated cells.
const FADE_ALPHA: [f64; 3] = [-3.75e-3, -6.0e-4, -2.55e-3];
const FADE_GAMMA: f64 = 10.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_cells: usize,
    /// Relative share of cells per batch 1..3.
    pub batch_mix: [f64; 3],
    /// Knee-onset range for the short-rest batches (1 and 3).
    pub knee_range: (f64, f64),
    /// Knee-onset range for the long-rest batch (2); keep it below
    /// `knee_range` so batch statistics reproduce the rest/lifespan story.
    pub batch2_knee_range: (f64, f64),
    /// Gaussian noise on per-cycle discharge capacity, Ah.
    pub noise_sigma_ah: f64,
    /// Cycles with full intra-cycle traces; later cycles carry only a
    /// two-sample stub with the fade value, enough for labeling.
    pub detail_cycles: usize,
    /// Raw sampling interval in minutes.
    pub dt_min: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_cells: 40,
            batch_mix: [0.4, 0.3, 0.3],
            knee_range: (200.0, 420.0),
            batch2_knee_range: (90.0, 200.0),
            noise_sigma_ah: 0.002,
            detail_cycles: 40,
            dt_min: 0.25,
        }
    }
}

/// Ground truth recorded next to each generated cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellTruth {
    pub batch: u8,
    pub c_ko: f64,
    pub c_2nd: f64,
    /// Post-charge and post-discharge rest lengths, minutes.
    pub rest_charge_min: f64,
    pub rest_discharge_min: f64,
    /// Normalized internal-resistance proxy in [0, 1]; drives the rest
    /// relaxation depth.
    pub ir_factor: f64,
    /// End of the charge phase, minutes from cycle start.
    pub charge_end_min: f64,
    /// Nominal (first-cycle) discharge duration, minutes.
    pub discharge_min: f64,
}

impl CellTruth {
    /// Combined-grid columns covered by the post-charge rest plateau.
    pub fn rest_column_range(&self) -> Range<usize> {
        let dt = super::input::COMBINED_DT_MIN;
        let start = (self.charge_end_min / dt).ceil() as usize;
        let end = ((self.charge_end_min + self.rest_charge_min) / dt).floor() as usize + 1;
        start..end.min(120)
    }

    /// Combined-grid columns covered by the post-discharge rest plateau.
    pub fn rest2_column_range(&self) -> Range<usize> {
        let dt = super::input::COMBINED_DT_MIN;
        let dis_end = self.charge_end_min + self.rest_charge_min + self.discharge_min;
        let start = (dis_end / dt).ceil() as usize;
        let end = ((dis_end + self.rest_discharge_min) / dt).floor() as usize + 1;
        start.min(120)..end.min(120)
    }

    /// Union mask over both rest plateaus on the combined grid.
    pub fn rest_mask(&self) -> [bool; 120] {
        let mut mask = [false; 120];
        for c in self.rest_column_range() {
            mask[c] = true;
        }
        for c in self.rest2_column_range() {
            mask[c] = true;
        }
        mask
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub cells: Vec<CellRecord>,
    pub truth: BTreeMap<String, CellTruth>,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 kept away from zero.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

struct CellPlan {
    id: String,
    batch: u8,
    policy: ChargingPolicy,
    truth: CellTruth,
    alpha0: f64,
    /// Knee-irrelevant per-cell discharge shape nuisance.
    discharge_sag: f64,
    discharge_heat: f64,
}

fn plan_cell(i: usize, batch: u8, spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> CellPlan {
    let cr_first = 3.6 + 3.6 * rng.gen::<f64>();
    let q_tr_pct = (20.0 + 60.0 * rng.gen::<f64>()).round();
    let cr_second = 3.0 + 2.5 * rng.gen::<f64>();
    let policy = ChargingPolicy {
        cr_first,
        q_tr_pct,
        cr_second,
    };

    // Short-rest batches degrade faster under aggressive charging; the
    // long-rest batch is dominated by its rest-driven resistance growth.
    // The effect scales with the requested knee spread so a degenerate
    // range yields exactly the requested knee.
    let spread = (spec.knee_range.1 - spec.knee_range.0) / 220.0;
    let policy_effect = 10.0 * (policy.average_c_rate() - 4.95) * spread;
    let (rest_charge_min, rest_discharge_min, c_ko) = match batch {
        2 => {
            let rest = 5.0 + 3.0 * rng.gen::<f64>();
            // Longer rest, earlier knee.
            let (lo, hi) = spec.batch2_knee_range;
            let c_ko = hi - (hi - lo) * (rest - 5.0) / 3.0 + 4.0 * gauss(rng);
            (rest, rest, c_ko.max(lo * 0.8))
        }
        3 => {
            let (lo, hi) = spec.knee_range;
            let c_ko = (lo + (hi - lo) * rng.gen::<f64>() - policy_effect).max(lo * 0.6);
            (5.0 / 60.0, 5.0 / 60.0, c_ko)
        }
        _ => {
            let (lo, hi) = spec.knee_range;
            let c_ko = (lo + (hi - lo) * rng.gen::<f64>() - policy_effect).max(lo * 0.6);
            (1.0, 1.0 / 60.0, c_ko)
        }
    };
    let c_2nd = c_ko + (30.0f64).max(0.2 * c_ko) * (1.0 + 0.3 * rng.gen::<f64>());

    // Internal-resistance proxy spans the whole corpus knee range.
    let global_lo = spec.batch2_knee_range.0;
    let global_hi = spec.knee_range.1;
    let ir_factor = ((global_hi - c_ko) / (global_hi - global_lo)).clamp(0.0, 1.0);

    let charge_end_min =
        60.0 * (q_tr_pct / 100.0 / cr_first + (0.8 - q_tr_pct / 100.0) / cr_second);
    let discharge_min =
        0.98 * NOMINAL_CAPACITY_AH / (DISCHARGE_C_RATE * NOMINAL_CAPACITY_AH) * 60.0;
    let discharge_sag = 0.04 + 0.10 * rng.gen::<f64>();
    let discharge_heat = 2.0 + 2.5 * rng.gen::<f64>();

    // Anchor the fade curve at Q(1) = 0.98 * nominal.
    let alpha = [0.0, FADE_ALPHA[0], FADE_ALPHA[1], FADE_ALPHA[2]];
    let alpha0 = 0.98 * NOMINAL_CAPACITY_AH - dbw_value(1.0, &alpha, c_ko, c_2nd, FADE_GAMMA);

    CellPlan {
        id: format!("b{}c{:03}", batch, i),
        batch,
        policy,
        truth: CellTruth {
            batch,
            c_ko,
            c_2nd,
            rest_charge_min,
            rest_discharge_min,
            ir_factor,
            charge_end_min,
            discharge_min,
        },
        alpha0,
        discharge_sag,
        discharge_heat,
    }
}

fn fade_at(plan: &CellPlan, cycle: f64) -> f64 {
    let alpha = [plan.alpha0, FADE_ALPHA[0], FADE_ALPHA[1], FADE_ALPHA[2]];
    dbw_value(cycle, &alpha, plan.truth.c_ko, plan.truth.c_2nd, FADE_GAMMA)
        .max(0.35 * NOMINAL_CAPACITY_AH)
}

/// Sample one detailed cycle. Time runs charge -> rest -> discharge -> rest.
///
/// Voltage and temperature carry sensor noise while current flows; rests
/// are quiet. The knee signal therefore reads most cleanly from the rest
/// plateau, as it does for resistance growth in real cycling data.
fn detailed_cycle(
    plan: &CellPlan,
    cycle: u32,
    q_end: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> CycleTrace {
    let p = &plan.policy;
    let t1 = 60.0 * p.q_tr_pct / 100.0 / p.cr_first;
    let t_charge = plan.truth.charge_end_min;
    let rest1_end = t_charge + plan.truth.rest_charge_min;
    let dis_len = q_end / (DISCHARGE_C_RATE * NOMINAL_CAPACITY_AH) * 60.0;
    let dis_end = rest1_end + dis_len;
    let total = dis_end + plan.truth.rest_discharge_min;

    // Rest relaxation deepens with resistance and slowly with age.
    let ir = plan.truth.ir_factor;
    let age = 1.0 + 0.15 * (cycle as f64 - 1.0) / plan.truth.c_ko.max(1.0);
    let relax_drop = (0.05 + 0.40 * ir) * age;

    let soc_at = |t: f64| -> f64 {
        if t <= t1 {
            p.cr_first * t / 60.0 * 100.0
        } else {
            (p.q_tr_pct + p.cr_second * (t - t1) / 60.0 * 100.0).min(80.0)
        }
    };
    let v_charge_end = 3.05 + 0.5 * 0.8 + 0.02 * p.cr_second + 0.06 * ir;
    let t_peak = AMBIENT_C + 0.9 * p.average_c_rate() + 0.5 * ir;

    // Sample grid: uniform steps plus exact phase boundaries.
    let mut ts: Vec<f64> = Vec::new();
    let mut t = 0.0;
    while t < total - 1e-9 {
        ts.push(t);
        t += dt;
    }
    for b in [t1, t_charge, rest1_end, dis_end, total] {
        ts.push(b);
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let n = ts.len();
    let mut voltage = Vec::with_capacity(n);
    let mut current = Vec::with_capacity(n);
    let mut temp = Vec::with_capacity(n);
    let mut q_c = Vec::with_capacity(n);
    let mut q_d = Vec::with_capacity(n);
    const V_NOISE_CHARGE: f64 = 0.008;
    const V_NOISE_DISCHARGE: f64 = 0.012;
    const V_NOISE_REST: f64 = 0.001;
    const T_NOISE_ACTIVE: f64 = 0.15;
    const T_NOISE_REST: f64 = 0.02;

    for &t in &ts {
        let (v, i, tc, qc, qd);
        let resting = (t_charge..rest1_end).contains(&t) || t >= dis_end;
        if t < t_charge {
            let soc = soc_at(t);
            let cr = if t <= t1 { p.cr_first } else { p.cr_second };
            v = 3.05 + 0.5 * soc / 100.0 + 0.02 * cr + 0.06 * ir;
            i = cr * NOMINAL_CAPACITY_AH;
            tc = AMBIENT_C + (t_peak - AMBIENT_C) * soc / 80.0;
            qc = soc / 100.0 * NOMINAL_CAPACITY_AH;
            qd = 0.0;
        } else if t < rest1_end {
            let dt_rest = t - t_charge;
            v = v_charge_end - relax_drop * (1.0 - 0.7 * (-dt_rest / 0.4).exp());
            i = 0.0;
            tc = AMBIENT_C + (t_peak - AMBIENT_C) * (-dt_rest / 1.5).exp();
            qc = 0.8 * NOMINAL_CAPACITY_AH;
            qd = 0.0;
        } else if t < dis_end {
            let s = ((t - rest1_end) / dis_len).clamp(0.0, 1.0);
            let v0 = 3.30;
            v = v0 - (v0 - 2.0) * s - plan.discharge_sag * (std::f64::consts::PI * s).sin();
            i = -DISCHARGE_C_RATE * NOMINAL_CAPACITY_AH;
            tc = AMBIENT_C + plan.discharge_heat * s;
            qc = 0.8 * NOMINAL_CAPACITY_AH;
            qd = (DISCHARGE_C_RATE * NOMINAL_CAPACITY_AH * (t - rest1_end) / 60.0).min(q_end);
        } else {
            let dt_rest = t - dis_end;
            let fade_frac = 1.0 - q_end / (0.98 * NOMINAL_CAPACITY_AH);
            let v_end = 2.0 - 3.0 * fade_frac.clamp(0.0, 0.1);
            v = v_end + (0.20 + 0.25 * ir) * (1.0 - (-dt_rest / 0.5).exp());
            i = 0.0;
            tc = AMBIENT_C + plan.discharge_heat * (-dt_rest / 1.5).exp();
            qc = 0.8 * NOMINAL_CAPACITY_AH;
            qd = q_end;
        }
        let (vn, tn) = if resting {
            (V_NOISE_REST, T_NOISE_REST)
        } else if t < t_charge {
            (V_NOISE_CHARGE, T_NOISE_ACTIVE)
        } else {
            (V_NOISE_DISCHARGE, T_NOISE_ACTIVE)
        };
        voltage.push(v + vn * gauss(rng));
        current.push(i);
        temp.push(tc + tn * gauss(rng));
        q_c.push(qc);
        q_d.push(qd);
    }

    CycleTrace {
        index: cycle,
        t_min: ts,
        voltage,
        current,
        temp,
        q_c,
        q_d,
        q_end,
    }
}

/// Two-sample stub past the detailed prefix: carries the fade value only.
fn stub_cycle(cycle: u32, q_end: f64) -> CycleTrace {
    CycleTrace {
        index: cycle,
        t_min: vec![0.0, 30.0],
        voltage: vec![3.2, 2.0],
        current: vec![1.0, -1.0],
        temp: vec![AMBIENT_C, AMBIENT_C],
        q_c: vec![0.0, 0.8 * NOMINAL_CAPACITY_AH],
        q_d: vec![0.0, q_end],
        q_end,
    }
}

/// Deterministically generate a corpus; the same seed yields bitwise
/// identical cells.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total_mix: f64 = spec.batch_mix.iter().sum();
    let mut cells = Vec::with_capacity(spec.n_cells);
    let mut truth = BTreeMap::new();

    for i in 0..spec.n_cells {
        // Proportional batch assignment, deterministic in i.
        let frac = (i as f64 + 0.5) / spec.n_cells as f64 * total_mix;
        let batch = if frac < spec.batch_mix[0] {
            1
        } else if frac < spec.batch_mix[0] + spec.batch_mix[1] {
            2
        } else {
            3
        };
        let plan = plan_cell(i, batch, spec, &mut rng);
        let n_cycles = plan.truth.c_2nd.ceil() as u32 + 60;

        let mut cycles = Vec::with_capacity(n_cycles as usize);
        for c in 1..=n_cycles {
            let q_end =
                (fade_at(&plan, c as f64) + spec.noise_sigma_ah * gauss(&mut rng)).max(0.05);
            if (c as usize) <= spec.detail_cycles {
                cycles.push(detailed_cycle(&plan, c, q_end, spec.dt_min, &mut rng));
            } else {
                cycles.push(stub_cycle(c, q_end));
            }
        }
        truth.insert(plan.id.clone(), plan.truth.clone());
        cells.push(CellRecord {
            cell_id: plan.id,
            batch: plan.batch,
            policy: plan.policy,
            cycles,
        });
    }
    SyntheticCorpus { cells, truth }
}

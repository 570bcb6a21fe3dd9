//! Knee-onset labeling via the double Bacon-Watts change-point model.
//!
//! Capacity fade is modeled as
//! `Q(c) = a0 + a1 (c - c_ko) + a2 (c - c_ko) tanh((c - c_ko)/gamma)
//!        + a3 (c - c_2nd) tanh((c - c_2nd)/gamma)`,
//! which is linear in the `a` coefficients once the two breakpoints are
//! fixed. The fitter profiles the exact least-squares solution for the
//! coefficients over a coarse breakpoint grid and refines the best grid
//! point with Nelder-Mead, keeping `c_ko <= c_2nd` by searching over
//! `(c_ko, delta)` with `c_2nd = c_ko + delta`.

mod nelder_mead;

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Default tanh transition width, in cycles.
pub const DEFAULT_GAMMA: f64 = 10.0;

/// Fitted change-point model and the knee-onset regression target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KneeLabel {
    pub c_ko: f64,
    pub c_2nd: f64,
    pub alpha: [f64; 4],
    pub gamma: f64,
    pub sse: f64,
    /// Set when the two-breakpoint fit barely improves on a single line.
    pub low_confidence: bool,
}

/// Evaluate the double Bacon-Watts model at cycle `c`.
pub fn dbw_value(c: f64, alpha: &[f64; 4], c_ko: f64, c_2nd: f64, gamma: f64) -> f64 {
    let d1 = c - c_ko;
    let d2 = c - c_2nd;
    alpha[0]
        + alpha[1] * d1
        + alpha[2] * d1 * (d1 / gamma).tanh()
        + alpha[3] * d2 * (d2 / gamma).tanh()
}

/// Exact OLS coefficients and SSE for fixed breakpoints; `None` when the
/// normal equations are singular.
fn profile_ols(fade: &[(f64, f64)], c_ko: f64, c_2nd: f64, gamma: f64) -> Option<([f64; 4], f64)> {
    let mut ata = vec![vec![0.0; 4]; 4];
    let mut atb = [0.0; 4];
    for &(c, q) in fade {
        let d1 = c - c_ko;
        let d2 = c - c_2nd;
        let phi = [1.0, d1, d1 * (d1 / gamma).tanh(), d2 * (d2 / gamma).tanh()];
        for r in 0..4 {
            for k in 0..4 {
                ata[r][k] += phi[r] * phi[k];
            }
            atb[r] += phi[r] * q;
        }
    }
    let sol = solve_dense(&ata, &atb)?;
    let alpha = [sol[0], sol[1], sol[2], sol[3]];
    let mut sse = 0.0;
    for &(c, q) in fade {
        let r = q - dbw_value(c, &alpha, c_ko, c_2nd, gamma);
        sse += r * r;
    }
    Some((alpha, sse))
}

fn line_sse(fade: &[(f64, f64)]) -> f64 {
    let n = fade.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in fade {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let (slope, icept) = if denom.abs() < 1e-12 {
        (0.0, sy / n)
    } else {
        let b = (n * sxy - sx * sy) / denom;
        (b, (sy - b * sx) / n)
    };
    fade.iter()
        .map(|&(x, y)| (y - slope * x - icept).powi(2))
        .sum()
}

/// Fit the double Bacon-Watts model with `gamma` held fixed.
pub fn fit_double_bacon_watts(fade: &[(f64, f64)], gamma: f64) -> Result<KneeLabel> {
    if fade.len() < 20 {
        return Err(Error::contract(format!(
            "need at least 20 fade points, got {}",
            fade.len()
        )));
    }
    if let Some(&(c, q)) = fade.iter().find(|&&(_, q)| q <= 0.0) {
        return Err(Error::contract(format!(
            "non-positive capacity {} at cycle {}",
            q, c
        )));
    }
    let c_lo = fade.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let c_hi = fade.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let step = (fade.len() / 100).max(1) as f64;

    // Coarse grid over ordered breakpoint pairs, anchored at the first cycle.
    let mut best: Option<(f64, f64, f64)> = None;
    let mut c_ko = c_lo;
    while c_ko <= c_hi {
        let mut c_2nd = c_ko;
        while c_2nd <= c_hi {
            if let Some((_, sse)) = profile_ols(fade, c_ko, c_2nd, gamma) {
                if best.map_or(true, |(_, _, b)| sse < b) {
                    best = Some((c_ko, c_2nd, sse));
                }
            }
            c_2nd += step;
        }
        c_ko += step;
    }
    let (g_ko, g_2nd, grid_sse) =
        best.ok_or_else(|| Error::contract("degenerate fade curve: all grid fits singular"))?;

    // Refinement runs in offsets from the best grid point. Offsets are
    // invariant under shifting every cycle index, which keeps the search
    // path identical for shifted data; quantizing the result to 2^-20
    // cycles makes the final anchor + offset sums exact, so the fitted
    // breakpoints shift by exactly the applied constant.
    let anchored: Vec<(f64, f64)> = fade.iter().map(|&(c, q)| (c - g_ko, q)).collect();
    let (lo_u, hi_u) = (c_lo - g_ko, c_hi - g_ko);
    let objective = |p: [f64; 2]| -> f64 {
        let (u, delta) = (p[0], p[1]);
        if !(lo_u..=hi_u).contains(&u) || delta < 0.0 || u + delta > hi_u {
            return f64::INFINITY;
        }
        profile_ols(&anchored, u, u + delta, gamma).map_or(f64::INFINITY, |(_, sse)| sse)
    };
    let ([r_u, r_delta], refined_sse) =
        nelder_mead::minimize(objective, [0.0, g_2nd - g_ko], step, 200);

    const QUANTUM: f64 = (1u64 << 20) as f64;
    let quantize = |v: f64| (v * QUANTUM).round() / QUANTUM;
    let (c_ko, c_2nd) = if refined_sse <= grid_sse {
        let u = quantize(r_u).clamp(lo_u, hi_u);
        let delta = quantize(r_delta).clamp(0.0, hi_u - u);
        (g_ko + u, g_ko + (u + delta))
    } else {
        (g_ko, g_2nd)
    };
    // Quantization can nudge the objective; never return worse than the
    // grid candidate.
    let (c_ko, c_2nd) = match profile_ols(fade, c_ko, c_2nd, gamma) {
        Some((_, sse)) if sse <= grid_sse => (c_ko, c_2nd),
        _ => (g_ko, g_2nd),
    };
    let (alpha, sse) = profile_ols(fade, c_ko, c_2nd, gamma)
        .ok_or_else(|| Error::contract("singular system at refined breakpoints"))?;

    let straight = line_sse(fade);
    // Exact lines leave both SSEs at rounding level; flag those outright.
    let low_confidence = straight < 1e-10 || (straight - sse) / straight < 0.05;

    Ok(KneeLabel {
        c_ko,
        c_2nd,
        alpha,
        gamma,
        sse,
        low_confidence,
    })
}

/// A labeling failure, kept alongside the successful labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelFailure {
    pub cell_id: String,
    pub reason: String,
}

/// Label every cell's fade curve; failures are collected, not fatal.
pub fn label_corpus(
    records: &[crate::data::CellRecord],
    gamma: f64,
) -> (BTreeMap<String, KneeLabel>, Vec<LabelFailure>) {
    let mut labels = BTreeMap::new();
    let mut failures = Vec::new();
    for rec in records {
        match fit_double_bacon_watts(&rec.fade_curve(), gamma) {
            Ok(label) => {
                labels.insert(rec.cell_id.clone(), label);
            }
            Err(e) => failures.push(LabelFailure {
                cell_id: rec.cell_id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    (labels, failures)
}

/// Write labels-csv: `cell_id,c_ko,c_2nd,alpha0..alpha3,gamma,sse,flag`.
pub fn save_labels_csv(path: &Path, labels: &BTreeMap<String, KneeLabel>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "cell_id", "c_ko", "c_2nd", "alpha0", "alpha1", "alpha2", "alpha3", "gamma", "sse", "flag",
    ])?;
    for (id, l) in labels {
        w.write_record([
            id.as_str(),
            &l.c_ko.to_string(),
            &l.c_2nd.to_string(),
            &l.alpha[0].to_string(),
            &l.alpha[1].to_string(),
            &l.alpha[2].to_string(),
            &l.alpha[3].to_string(),
            &l.gamma.to_string(),
            &l.sse.to_string(),
            if l.low_confidence {
                "low-confidence"
            } else {
                "ok"
            },
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_labels_csv(path: &Path) -> Result<BTreeMap<String, KneeLabel>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let need = [
        "cell_id", "c_ko", "c_2nd", "alpha0", "alpha1", "alpha2", "alpha3", "gamma", "sse", "flag",
    ];
    let mut idx = [0usize; 10];
    for (k, name) in need.iter().enumerate() {
        idx[k] = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| Error::MissingColumn((*name).to_string()))?;
    }
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let rec = row?;
        let get = |k: usize| rec.get(idx[k]).unwrap_or("");
        let f = |k: usize| -> Result<f64> {
            get(k)
                .parse()
                .map_err(|_| Error::ingest(format!("bad number {:?} in labels", get(k))))
        };
        out.insert(
            get(0).to_string(),
            KneeLabel {
                c_ko: f(1)?,
                c_2nd: f(2)?,
                alpha: [f(3)?, f(4)?, f(5)?, f(6)?],
                gamma: f(7)?,
                sse: f(8)?,
                low_confidence: get(9) == "low-confidence",
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact fade curve with the level anchored so capacity stays
    /// positive over the sampled range.
    pub(crate) fn exact_curve(
        slopes: &[f64; 3],
        c_ko: f64,
        c_2nd: f64,
        gamma: f64,
        n: usize,
    ) -> (Vec<(f64, f64)>, [f64; 4]) {
        let mut alpha = [0.0, slopes[0], slopes[1], slopes[2]];
        alpha[0] = 1.078 - dbw_value(1.0, &alpha, c_ko, c_2nd, gamma);
        let fade = (1..=n)
            .map(|c| (c as f64, dbw_value(c as f64, &alpha, c_ko, c_2nd, gamma)))
            .collect();
        (fade, alpha)
    }

    const SLOPES: [f64; 3] = [-3.05e-3, -5.5e-4, -2.4e-3];

    #[test]
    fn recovers_exact_model() {
        let (fade, alpha) = exact_curve(&SLOPES, 400.0, 600.0, 10.0, 660);
        let label = fit_double_bacon_watts(&fade, 10.0).unwrap();
        assert!((label.c_ko - 400.0).abs() <= 1.0, "c_ko {}", label.c_ko);
        assert!((label.c_2nd - 600.0).abs() <= 1.0, "c_2nd {}", label.c_2nd);
        for (a, b) in label.alpha.iter().zip(alpha) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-3), "{} vs {}", a, b);
        }
        assert!(!label.low_confidence);
    }

    #[test]
    fn ols_satisfies_normal_equations() {
        let (fade, _) = exact_curve(&SLOPES, 300.0, 420.0, 10.0, 480);
        let label = fit_double_bacon_watts(&fade, 10.0).unwrap();
        // Residual must be orthogonal to every basis function.
        let mut dots = [0.0; 4];
        for &(c, q) in &fade {
            let d1 = c - label.c_ko;
            let d2 = c - label.c_2nd;
            let phi = [
                1.0,
                d1,
                d1 * (d1 / label.gamma).tanh(),
                d2 * (d2 / label.gamma).tanh(),
            ];
            let r = q - dbw_value(c, &label.alpha, label.c_ko, label.c_2nd, label.gamma);
            for k in 0..4 {
                dots[k] += phi[k] * r;
            }
        }
        for d in dots {
            assert!(d.abs() < 1e-8, "normal equation residual {}", d);
        }
    }

    #[test]
    fn knee_less_line_gets_flagged() {
        let fade: Vec<(f64, f64)> = (1..=200)
            .map(|c| (c as f64, 1.1 - 1e-4 * c as f64))
            .collect();
        let label = fit_double_bacon_watts(&fade, 10.0).unwrap();
        assert!(label.low_confidence);
    }

    #[test]
    fn shift_equivariance() {
        let (fade, _) = exact_curve(&SLOPES, 180.0, 260.0, 10.0, 320);
        let shifted: Vec<(f64, f64)> = fade.iter().map(|&(c, q)| (c + 500.0, q)).collect();
        let a = fit_double_bacon_watts(&fade, 10.0).unwrap();
        let b = fit_double_bacon_watts(&shifted, 10.0).unwrap();
        assert_eq!(a.c_ko + 500.0, b.c_ko);
        assert_eq!(a.c_2nd + 500.0, b.c_2nd);
    }

    #[test]
    fn too_few_points_rejected() {
        let fade: Vec<(f64, f64)> = (1..=10).map(|c| (c as f64, 1.0)).collect();
        assert!(fit_double_bacon_watts(&fade, 10.0).is_err());
    }

    #[test]
    fn empty_corpus_labels_empty() {
        let (labels, failures) = label_corpus(&[], 10.0);
        assert!(labels.is_empty());
        assert!(failures.is_empty());
    }

    #[test]
    fn labels_csv_roundtrip() {
        let (fade, _) = exact_curve(&SLOPES, 150.0, 220.0, 10.0, 280);
        let label = fit_double_bacon_watts(&fade, 10.0).unwrap();
        let mut labels = BTreeMap::new();
        labels.insert("b1c3".to_string(), label);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        save_labels_csv(&path, &labels).unwrap();
        let loaded = load_labels_csv(&path).unwrap();
        assert_eq!(labels, loaded);
    }
}

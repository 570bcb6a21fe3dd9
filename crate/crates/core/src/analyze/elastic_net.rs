//! Elastic net by cyclic coordinate descent with soft thresholding.
//!
//! Minimizes `(1/2n) ||y - X w - b||^2 + lambda (rho ||w||_1
//! + (1 - rho)/2 ||w||^2)` with an unpenalized intercept.

#[derive(Debug, Clone)]
pub struct ElasticNetFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    pub rho: f64,
    pub sweeps: usize,
}

pub fn soft_threshold(c: f64, t: f64) -> f64 {
    if c > t {
        c - t
    } else if c < -t {
        c + t
    } else {
        0.0
    }
}

pub fn elastic_net_objective(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
    b: f64,
    lambda: f64,
    rho: f64,
) -> f64 {
    let n = y.len() as f64;
    let mut sse = 0.0;
    for (row, &yi) in x.iter().zip(y) {
        let pred: f64 = row.iter().zip(w).map(|(&xi, &wi)| xi * wi).sum::<f64>() + b;
        sse += (yi - pred) * (yi - pred);
    }
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    let l2: f64 = w.iter().map(|v| v * v).sum();
    sse / (2.0 * n) + lambda * (rho * l1 + (1.0 - rho) / 2.0 * l2)
}

/// Cyclic coordinate descent. `x` is row-major (one row per sample).
pub fn elastic_net_fit(
    x: &[Vec<f64>],
    y: &[f64],
    lambda: f64,
    rho: f64,
    max_sweeps: usize,
    tol: f64,
) -> ElasticNetFit {
    assert!(
        lambda >= 0.0,
        "contract violation: lambda must be non-negative"
    );
    assert!(
        (0.0..=1.0).contains(&rho),
        "contract violation: rho must be in [0, 1]"
    );
    let n = y.len();
    assert!(
        n > 0 && x.len() == n,
        "contract violation: empty or ragged design"
    );
    let p = x.first().map_or(0, |r| r.len());

    // Per-feature second moments z_j = (1/n) sum x_ij^2.
    let mut z = vec![0.0; p];
    for row in x {
        for (j, &v) in row.iter().enumerate() {
            z[j] += v * v;
        }
    }
    for zj in &mut z {
        *zj /= n as f64;
    }

    let mut w = vec![0.0; p];
    let mut b = y.iter().sum::<f64>() / n as f64;
    // Residual r_i = y_i - b - x_i . w
    let mut resid: Vec<f64> = y.iter().map(|&yi| yi - b).collect();

    let mut sweeps = 0;
    for sweep in 1..=max_sweeps {
        sweeps = sweep;
        let mut max_delta: f64 = 0.0;
        for j in 0..p {
            if z[j] == 0.0 {
                continue;
            }
            // c_j = (1/n) sum x_ij (r_i + x_ij w_j)
            let mut c = 0.0;
            for i in 0..n {
                c += x[i][j] * resid[i];
            }
            c = c / n as f64 + z[j] * w[j];
            let new_w = soft_threshold(c, lambda * rho) / (z[j] + lambda * (1.0 - rho));
            let delta = new_w - w[j];
            if delta != 0.0 {
                for i in 0..n {
                    resid[i] -= x[i][j] * delta;
                }
                w[j] = new_w;
                max_delta = max_delta.max(delta.abs());
            }
        }
        // Intercept re-centering.
        let shift = resid.iter().sum::<f64>() / n as f64;
        if shift != 0.0 {
            b += shift;
            for r in &mut resid {
                *r -= shift;
            }
            max_delta = max_delta.max(shift.abs());
        }
        if max_delta < tol {
            break;
        }
    }
    ElasticNetFit {
        weights: w,
        intercept: b,
        lambda,
        rho,
        sweeps,
    }
}

//! Outlier removal and Savitzky-Golay smoothing.

use crate::error::{Error, Result};
use crate::linalg::solve_dense;

/// Hampel outlier replacement with the default window (11) and threshold
/// (6 scaled MADs).
pub fn clean_outliers(series: &[f64]) -> Vec<f64> {
    clean_outliers_with(series, 11, 6.0)
}

/// Flag points deviating from the local windowed median by more than
/// `k * 1.4826 * MAD`, then replace each flagged point by the line through
/// its two nearest retained neighbours.
pub fn clean_outliers_with(series: &[f64], window: usize, k: f64) -> Vec<f64> {
    let n = series.len();
    if n < 4 {
        return series.to_vec();
    }
    let half = window / 2;
    let mut flagged = vec![false; n];

    let mut buf = Vec::with_capacity(window);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        buf.clear();
        buf.extend_from_slice(&series[lo..hi]);
        let med = median(&mut buf);
        buf.clear();
        buf.extend(series[lo..hi].iter().map(|&x| (x - med).abs()));
        let mad = median(&mut buf);
        if (series[i] - med).abs() > k * 1.4826 * mad {
            flagged[i] = true;
        }
    }

    let mut out = series.to_vec();
    for i in 0..n {
        if !flagged[i] {
            continue;
        }
        let left_near = (0..i).rev().find(|&j| !flagged[j]);
        let right_near = (i + 1..n).find(|&j| !flagged[j]);
        let pair = match (left_near, right_near) {
            (Some(l), Some(r)) => Some((l, r)),
            (Some(l), None) => (0..l).rev().find(|&j| !flagged[j]).map(|l2| (l2, l)),
            (None, Some(r)) => (r + 1..n).find(|&j| !flagged[j]).map(|r2| (r, r2)),
            (None, None) => None,
        };
        out[i] = match pair {
            Some((a, b)) => {
                let slope = (series[b] - series[a]) / (b as f64 - a as f64);
                series[a] + slope * (i as f64 - a as f64)
            }
            None => left_near.or(right_near).map_or(series[i], |j| series[j]),
        };
    }
    out
}

fn median(buf: &mut [f64]) -> f64 {
    buf.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = buf.len();
    if n % 2 == 1 {
        buf[n / 2]
    } else {
        0.5 * (buf[n / 2 - 1] + buf[n / 2])
    }
}

/// Weights of the least-squares polynomial fit over integer offsets
/// `-h..=h`, evaluated at offset `eval`. The smoothed value is the dot
/// product of these weights with the window samples.
pub fn sg_weights(window: usize, order: usize, eval: i64) -> Result<Vec<f64>> {
    if window % 2 == 0 {
        return Err(Error::contract(format!(
            "Savitzky-Golay window {} must be odd",
            window
        )));
    }
    if order >= window {
        return Err(Error::contract(format!(
            "Savitzky-Golay order {} must be below window {}",
            order, window
        )));
    }
    let h = (window / 2) as i64;
    let m = order + 1;

    // Normal equations A^T A beta = A^T x; weights w(e) = p(e) (A^T A)^-1 A^T.
    let mut ata = vec![vec![0.0; m]; m];
    for off in -h..=h {
        let mut powers = vec![1.0; m];
        for p in 1..m {
            powers[p] = powers[p - 1] * off as f64;
        }
        for r in 0..m {
            for c in 0..m {
                ata[r][c] += powers[r] * powers[c];
            }
        }
    }

    // Column j of (A^T A)^-1 A^T is the solve against A's row for offset j.
    let mut weights = Vec::with_capacity(window);
    let mut eval_pow = vec![1.0; m];
    for p in 1..m {
        eval_pow[p] = eval_pow[p - 1] * eval as f64;
    }
    for off in -h..=h {
        let mut rhs = vec![1.0; m];
        for p in 1..m {
            rhs[p] = rhs[p - 1] * off as f64;
        }
        let col = solve_dense(&ata, &rhs)
            .ok_or_else(|| Error::contract("singular Savitzky-Golay system"))?;
        weights.push(eval_pow.iter().zip(&col).map(|(&e, &c)| e * c).sum());
    }
    Ok(weights)
}

/// Savitzky-Golay smoothing. Interior points take the centre of the local
/// polynomial fit; the first and last half-windows are fit once on the
/// first/last full window and evaluated at their edge offsets.
pub fn savitzky_golay(series: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if series.len() < window {
        return Err(Error::contract(format!(
            "series length {} below Savitzky-Golay window {}",
            series.len(),
            window
        )));
    }
    let h = window / 2;
    let center = sg_weights(window, order, 0)?;
    let n = series.len();
    let mut out = vec![0.0; n];

    for i in h..n - h {
        let seg = &series[i - h..i + h + 1];
        out[i] = dot(&center, seg);
    }
    for i in 0..h {
        let w = sg_weights(window, order, i as i64 - h as i64)?;
        out[i] = dot(&w, &series[0..window]);
    }
    for i in n - h..n {
        let e = i as i64 - (n - 1 - h) as i64;
        let w = sg_weights(window, order, e)?;
        out[i] = dot(&w, &series[n - window..n]);
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

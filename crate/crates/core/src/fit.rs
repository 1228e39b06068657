//! Least-squares helpers shared by the density, discrepancy, and bound-shape
//! reports.

use crate::error::Error;
use crate::Result;

/// Ordinary least squares `y = slope * x + intercept`; returns
/// `(slope, intercept, rms_residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}

/// Nonnegative least squares for a small design matrix (one or two columns):
/// minimizes `|A c - y|` subject to `c >= 0`. Returns `(coeffs, rms_residual)`.
pub fn nonneg_ls(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let k = columns.len();
    if k == 0 || k > 2 || columns.iter().any(|c| c.len() != y.len()) || y.len() < k {
        return Err(Error::DegenerateFit("bad design matrix".into()));
    }
    let solve_unconstrained = |cols: &[&Vec<f64>]| -> Option<Vec<f64>> {
        match cols.len() {
            1 => {
                let aa: f64 = cols[0].iter().map(|v| v * v).sum();
                if aa == 0.0 {
                    return None;
                }
                let ay: f64 = cols[0].iter().zip(y).map(|(a, b)| a * b).sum();
                Some(vec![ay / aa])
            }
            2 => {
                let a11: f64 = cols[0].iter().map(|v| v * v).sum();
                let a22: f64 = cols[1].iter().map(|v| v * v).sum();
                let a12: f64 = cols[0].iter().zip(cols[1]).map(|(a, b)| a * b).sum();
                let b1: f64 = cols[0].iter().zip(y).map(|(a, b)| a * b).sum();
                let b2: f64 = cols[1].iter().zip(y).map(|(a, b)| a * b).sum();
                let det = a11 * a22 - a12 * a12;
                if det.abs() < 1e-300 {
                    return None;
                }
                Some(vec![(b1 * a22 - b2 * a12) / det, (b2 * a11 - b1 * a12) / det])
            }
            _ => None,
        }
    };
    let residual = |coeffs: &[(usize, f64)]| -> f64 {
        let n = y.len();
        let mut rss = 0.0;
        for i in 0..n {
            let fitted: f64 = coeffs.iter().map(|&(j, c)| c * columns[j][i]).sum();
            let e = y[i] - fitted;
            rss += e * e;
        }
        (rss / n as f64).sqrt()
    };

    // Try the full unconstrained solution, then active-set fallbacks.
    let mut best: Option<(Vec<f64>, f64)> = None;
    let consider = |assign: Vec<(usize, f64)>, res: f64, best: &mut Option<(Vec<f64>, f64)>| {
        let mut full = vec![0.0; k];
        for &(j, c) in &assign {
            full[j] = c;
        }
        if best.as_ref().map_or(true, |(_, r)| res < *r) {
            *best = Some((full, res));
        }
    };
    let all: Vec<&Vec<f64>> = columns.iter().collect();
    if let Some(c) = solve_unconstrained(&all) {
        if c.iter().all(|&v| v >= 0.0) {
            let assign: Vec<(usize, f64)> = c.iter().copied().enumerate().collect();
            let r = residual(&assign);
            consider(assign, r, &mut best);
        }
    }
    for j in 0..k {
        if let Some(c) = solve_unconstrained(&[&columns[j].clone()]) {
            if c[0] >= 0.0 {
                let assign = vec![(j, c[0])];
                let r = residual(&assign);
                consider(assign, r, &mut best);
            }
        }
    }
    let zero_res = residual(&[]);
    consider(vec![], zero_res, &mut best);
    best.ok_or_else(|| Error::DegenerateFit("no feasible fit".into()))
}

//! Limit extrapolation for renormalized-volume schedules: linear fit in a
//! small parameter (here `1/|log rho|`) with a fitted remainder order.

use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// One schedule point of a limit computation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SchedulePoint {
    /// Small parameter `x` the remainder is measured in.
    pub x: f64,
    pub value: f64,
}

/// Extrapolated limit with convergence diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub limit: f64,
    /// Least-squares slope of `value` against `x` (the remainder coefficient).
    pub slope: f64,
    /// Fitted remainder order `p` in `value - limit ~ C x^p`, from the decay
    /// of successive increments.
    pub rate: f64,
    pub points: Vec<SchedulePoint>,
    /// Successive increments `value_{k+1} - value_k`.
    pub increments: Vec<f64>,
}

/// Fits the limit by least squares in the basis `(1, x, x^3)` and estimates
/// the remainder order from increment ratios. Points must come with
/// strictly decreasing `x` (schedule marching toward the limit).
///
/// The leading remainder is linear in `x`; the `x^3` term is included
/// because the expansion of the volume tail `c(rho)` in `x = 1/|log rho|`
/// has no quadratic term, and dropping the cubic contaminates the intercept
/// on short schedules. With fewer than 4 points the fit falls back to a
/// plain line.
pub fn fit_limit(points: &[SchedulePoint]) -> Result<LimitEstimate> {
    if points.len() < 3 {
        return Err(CoreError::NonConvergent(
            "need at least 3 schedule points".into(),
        ));
    }
    for w in points.windows(2) {
        if !(w[1].x < w[0].x) {
            return Err(CoreError::NonConvergent(
                "schedule must have strictly decreasing x".into(),
            ));
        }
    }
    let (limit, slope) = if points.len() >= 4 {
        lsq_1_x_x3(points)?
    } else {
        lsq_line(points)?
    };

    let increments: Vec<f64> = points.windows(2).map(|w| w[1].value - w[0].value).collect();
    // order p from |delta_k| ~ C |x_{k+1}^p - x_k^p|: regress log|delta|
    // against log(x_k - x_{k+1}) (valid for p near 1).
    let mut logs = Vec::new();
    for (k, d) in increments.iter().enumerate() {
        let dx = points[k].x - points[k + 1].x;
        if d.abs() > 1e-300 && dx > 0.0 {
            logs.push((dx.ln(), d.abs().ln()));
        }
    }
    if logs.len() < 2 {
        return Err(CoreError::NonConvergent(
            "increments vanish; rate fit impossible".into(),
        ));
    }
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let det = m * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(CoreError::NonConvergent("degenerate rate fit".into()));
    }
    let rate = (m * sxy - sx * sy) / det;
    Ok(LimitEstimate {
        limit,
        slope,
        rate,
        points: points.to_vec(),
        increments,
    })
}

/// Cauchy check: increments shrink monotonically in magnitude (within a
/// tolerance factor for rounding plateaus).
pub fn is_cauchy(increments: &[f64], slack: f64) -> bool {
    increments
        .windows(2)
        .all(|w| w[1].abs() <= w[0].abs() * (1.0 + slack))
}

fn lsq_line(points: &[SchedulePoint]) -> Result<(f64, f64)> {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.x).sum();
    let sy: f64 = points.iter().map(|p| p.value).sum();
    let sxx: f64 = points.iter().map(|p| p.x * p.x).sum();
    let sxy: f64 = points.iter().map(|p| p.x * p.value).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(CoreError::NonConvergent("degenerate schedule".into()));
    }
    let slope = (n * sxy - sx * sy) / det;
    Ok(((sy - slope * sx) / n, slope))
}

/// Normal-equations solve for `a + b x + d x^3`; returns `(a, b)`.
fn lsq_1_x_x3(points: &[SchedulePoint]) -> Result<(f64, f64)> {
    let mut m = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for p in points {
        let basis = [1.0, p.x, p.x * p.x * p.x];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            r[i] += basis[i] * p.value;
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system
    let mut a = m;
    let mut b = r;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(CoreError::NonConvergent("degenerate schedule".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut sol = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in (row + 1)..3 {
            acc -= a[row][k] * sol[k];
        }
        sol[row] = acc / a[row][row];
    }
    Ok((sol[0], sol[1]))
}

//! Adaptive Gauss-Kronrod quadrature (G7/K15), 1D and tensorized 2D.
//!
//! Subdivision is a deterministic bisection tree: each refinement halves
//! the interval and the tolerance, and results are summed left-to-right
//! through the recursion, so a fixed cell tree reproduces bit-for-bit no
//! matter how many threads evaluate it. Cells at the same depth are
//! independent work units and are evaluated in parallel via `rayon::join`.

use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Tolerances and caps for adaptive integration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Panels the interval is pre-split into before adaptive refinement.
    pub initial_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 1 << 16,
            initial_panels: 8,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: rel_tol * 1e-2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(CoreError::Validation("tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 || self.initial_panels == 0 {
            return Err(CoreError::Validation(
                "subdivision and panel counts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub cells: usize,
    /// Depth of the deepest cell in the bisection tree.
    pub depth: usize,
}

// Kronrod-15 abscissae (positive half) and weights; rows 1,3,5,7 are the
// embedded Gauss-7 nodes.
const XK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One G7/K15 evaluation on `[a, b]`: returns `(kronrod, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = WK[7] * f(c);
    let mut g = WG[3] * f(c);
    for i in 0..7 {
        let fp = f(c + h * XK[i]);
        let fm = f(c - h * XK[i]);
        k += WK[i] * (fp + fm);
        if i % 2 == 1 {
            g += WG[i / 2] * (fp + fm);
        }
    }
    (k * h, (k - g).abs() * h.abs())
}

struct Budget {
    max_cells: usize,
}

fn adapt_1d<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    budget: &Budget,
) -> (f64, f64, usize, usize) {
    let (value, err) = gk15(f, a, b);
    if err <= tol || (1usize << depth.min(60)) >= budget.max_cells {
        return (value, err, 1, depth);
    }
    let mid = 0.5 * (a + b);
    let ((lv, le, lc, ld), (rv, re, rc, rd)) = if depth < 6 {
        rayon::join(
            || adapt_1d(f, a, mid, 0.5 * tol, depth + 1, budget),
            || adapt_1d(f, mid, b, 0.5 * tol, depth + 1, budget),
        )
    } else {
        (
            adapt_1d(f, a, mid, 0.5 * tol, depth + 1, budget),
            adapt_1d(f, mid, b, 0.5 * tol, depth + 1, budget),
        )
    };
    (lv + rv, le + re, lc + rc, ld.max(rd))
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_1d<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            cells: 0,
            depth: 0,
        });
    }
    // coarse pass to scale the relative tolerance
    let (coarse, _) = gk15(f, a, b);
    let tol = cfg.abs_tol.max(cfg.rel_tol * coarse.abs());
    let budget = Budget {
        max_cells: cfg.max_subdivisions,
    };
    let n = cfg.initial_panels;
    let panel_tol = tol / n as f64;
    let panels: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t0 = a + (b - a) * i as f64 / n as f64;
            let t1 = a + (b - a) * (i + 1) as f64 / n as f64;
            (t0, t1)
        })
        .collect();
    use rayon::prelude::*;
    let parts: Vec<(f64, f64, usize, usize)> = panels
        .par_iter()
        .map(|&(t0, t1)| adapt_1d(f, t0, t1, panel_tol, 0, &budget))
        .collect();
    // deterministic left-to-right pairwise sum
    let value = pairwise(&parts.iter().map(|p| p.0).collect::<Vec<_>>());
    let error = parts.iter().map(|p| p.1).sum::<f64>();
    let cells = parts.iter().map(|p| p.2).sum();
    let depth = parts.iter().map(|p| p.3).max().unwrap_or(0);
    if error > tol * 4.0 {
        return Err(CoreError::QuadratureNonConvergence {
            subdivisions: cells,
            error,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        cells,
        depth,
    })
}

/// Pairwise summation; deterministic for a fixed slice order.
pub fn pairwise(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}

/// Tensor G7/K15 on a rectangle: Kronrod x Kronrod value with the error
/// taken against the embedded Gauss x Gauss rule.
fn gk15_2d<F: Fn(f64, f64) -> f64>(f: &F, ax: f64, bx: f64, ay: f64, by: f64) -> (f64, f64) {
    let cx = 0.5 * (ax + bx);
    let hx = 0.5 * (bx - ax);
    let cy = 0.5 * (ay + by);
    let hy = 0.5 * (by - ay);
    let mut nodes_x = [0.0f64; 15];
    let mut wk_x = [0.0f64; 15];
    let mut wg_x = [0.0f64; 15];
    fill_nodes(cx, hx, &mut nodes_x, &mut wk_x, &mut wg_x);
    let mut nodes_y = [0.0f64; 15];
    let mut wk_y = [0.0f64; 15];
    let mut wg_y = [0.0f64; 15];
    fill_nodes(cy, hy, &mut nodes_y, &mut wk_y, &mut wg_y);
    let mut k = 0.0;
    let mut g = 0.0;
    for i in 0..15 {
        for j in 0..15 {
            let v = f(nodes_x[i], nodes_y[j]);
            k += wk_x[i] * wk_y[j] * v;
            g += wg_x[i] * wg_y[j] * v;
        }
    }
    (k * hx * hy, (k - g).abs() * (hx * hy).abs())
}

fn fill_nodes(c: f64, h: f64, nodes: &mut [f64; 15], wk: &mut [f64; 15], wg: &mut [f64; 15]) {
    for i in 0..7 {
        nodes[i] = c - h * XK[i];
        nodes[14 - i] = c + h * XK[i];
        wk[i] = WK[i];
        wk[14 - i] = WK[i];
        let g = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        wg[i] = g;
        wg[14 - i] = g;
    }
    nodes[7] = c;
    wk[7] = WK[7];
    wg[7] = WG[3];
}

fn adapt_2d<F: Fn(f64, f64) -> f64 + Sync>(
    f: &F,
    r: [f64; 4],
    tol: f64,
    depth: usize,
    budget: &Budget,
) -> (f64, f64, usize) {
    let (value, err) = gk15_2d(f, r[0], r[1], r[2], r[3]);
    if err <= tol || (1usize << depth.min(60)) >= budget.max_cells {
        return (value, err, 1);
    }
    // split the longer side
    let (ra, rb) = if r[1] - r[0] >= r[3] - r[2] {
        let m = 0.5 * (r[0] + r[1]);
        ([r[0], m, r[2], r[3]], [m, r[1], r[2], r[3]])
    } else {
        let m = 0.5 * (r[2] + r[3]);
        ([r[0], r[1], r[2], m], [r[0], r[1], m, r[3]])
    };
    let ((lv, le, lc), (rv, re, rc)) = if depth < 5 {
        rayon::join(
            || adapt_2d(f, ra, 0.5 * tol, depth + 1, budget),
            || adapt_2d(f, rb, 0.5 * tol, depth + 1, budget),
        )
    } else {
        (
            adapt_2d(f, ra, 0.5 * tol, depth + 1, budget),
            adapt_2d(f, rb, 0.5 * tol, depth + 1, budget),
        )
    };
    (lv + rv, le + re, lc + rc)
}

/// Adaptive integral of `f(x, y)` over the rectangle `[ax,bx] x [ay,by]`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64 + Sync>(
    f: &F,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if ax == bx || ay == by {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            cells: 0,
            depth: 0,
        });
    }
    let (coarse, _) = gk15_2d(f, ax, bx, ay, by);
    let tol = cfg.abs_tol.max(cfg.rel_tol * coarse.abs());
    let budget = Budget {
        max_cells: cfg.max_subdivisions,
    };
    let (value, error, cells) = adapt_2d(f, [ax, bx, ay, by], tol, 0, &budget);
    if error > tol * 4.0 {
        return Err(CoreError::QuadratureNonConvergence {
            subdivisions: cells,
            error,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        cells,
        depth: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_1d() {
        let cfg = QuadratureConfig::default();
        let r = integrate_1d(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrates_log_singular_endpointish() {
        // int_a^1 log(x) dx = -1 - a(log a - 1); the endpoint singularity
        // needs a deep bisection budget
        let mut cfg = QuadratureConfig::with_rel_tol(1e-10);
        cfg.max_subdivisions = 1 << 48;
        let a = 1e-12;
        let r = integrate_1d(&|x: f64| x.ln(), a, 1.0, &cfg).unwrap();
        let exact = -1.0 - a * (a.ln() - 1.0);
        assert!((r.value - exact).abs() < 1e-9, "value {}", r.value);
    }

    #[test]
    fn integrates_2d_product() {
        let cfg = QuadratureConfig::default();
        let r = integrate_2d(&|x: f64, y: f64| x * y.cos(), 0.0, 1.0, 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 0.5 * 1.0f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_runs() {
        let cfg = QuadratureConfig::with_rel_tol(1e-9);
        let f = |x: f64| (10.0 * x).sin() / (1.0 + x * x);
        let a = integrate_1d(&f, 0.0, 20.0, &cfg).unwrap();
        let b = integrate_1d(&f, 0.0, 20.0, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

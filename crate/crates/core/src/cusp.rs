//! The hyperbolic cusp on the punctured disk: closed-form Epstein surface,
//! volume and mean-curvature integrals, W-volume divergence, and the
//! renormalized volume of a truncated cusp, with the holomorphic
//! perturbation `e^{2 nu} I_0` handled through the Polyakov formula.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::extrapolate::{fit_limit, LimitEstimate, SchedulePoint};
use crate::field::{ConformalMetric, CuspField, Holomorphic, PerturbedCuspField};
use crate::quadrature::QuadratureConfig;
use crate::wvolume::{
    boundary_counterterm, w_volume, BoundaryCircle, ConformalFactor, RegionSpec, WVolumeReport,
};
use crate::{Complex, CoreError, Result};

/// Radius below which the cusp Epstein surface crosses the vertical axis
/// (`log^2 rho = 2` kills the radial coordinate).
pub fn flip_radius() -> f64 {
    (-std::f64::consts::SQRT_2).exp()
}

/// Truncation `0 < rho_1 < rho_2 < e^{-sqrt 2}` of the cusp, also
/// addressable through horocycle lengths `eps = 2 pi / |log rho|`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CuspTruncation {
    pub rho1: f64,
    pub rho2: f64,
}

impl CuspTruncation {
    pub fn new(rho1: f64, rho2: f64) -> Result<Self> {
        if !(0.0 < rho1 && rho1 < rho2 && rho2 < flip_radius()) {
            return Err(CoreError::Validation(format!(
                "cusp truncation needs 0 < rho1 < rho2 < e^(-sqrt 2), got ({rho1}, {rho2})"
            )));
        }
        Ok(Self { rho1, rho2 })
    }

    pub fn from_horocycle_lengths(eps: f64, eps_bar: f64) -> Result<Self> {
        Self::new(rho_of_eps(eps), rho_of_eps(eps_bar))
    }

    pub fn horocycle_lengths(&self) -> (f64, f64) {
        (eps_of_rho(self.rho1), eps_of_rho(self.rho2))
    }
}

/// `rho(eps) = e^{-2 pi / eps}`.
pub fn rho_of_eps(eps: f64) -> f64 {
    (-2.0 * PI / eps).exp()
}

/// `eps = 2 pi / |log rho|`.
pub fn eps_of_rho(rho: f64) -> f64 {
    2.0 * PI / rho.ln().abs()
}

/// Metric density `e^{2 phi_0} = 1/(rho^2 log^2 rho)` of the cusp.
pub fn i0_density(z: Complex) -> Result<f64> {
    let rho = z.norm();
    if !(0.0 < rho && rho < 1.0) {
        return Err(CoreError::OutsideDomain(format!("{z}")));
    }
    let l = rho.ln();
    Ok(1.0 / (rho * rho * l * l))
}

/// Closed-form Epstein coordinates of the cusp surface over radius `rho`:
/// radial distance, angular flip indicator, and height, with
/// `A(rho) = log^2 rho + 2 log rho + 2`:
/// `r_0 = |rho (log^2 rho - 2)/A|`, `t_0 = -2 rho log rho / A`, and the
/// image sits at angle `theta + pi` once `rho <= e^{-sqrt 2}`.
pub fn cusp_epstein_coords(rho: f64) -> Result<(f64, bool, f64)> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(CoreError::OutsideDomain(format!("rho = {rho}")));
    }
    let l = rho.ln();
    let a = l * l + 2.0 * l + 2.0;
    let r0 = (rho * (l * l - 2.0) / a).abs();
    let t0 = -2.0 * rho * l / a;
    Ok((r0, rho <= flip_radius(), t0))
}

/// `(1/2) int H da` over the cusp Epstein surface of the annulus:
/// `pi/12 (log^3 rho_2 - log^3 rho_1)`.
pub fn cusp_h_integral(rho1: f64, rho2: f64) -> f64 {
    PI / 12.0 * (rho2.ln().powi(3) - rho1.ln().powi(3))
}

/// The bounded tail `c(rho)` of the truncated-cusp volume:
/// `c = pi log(1 + 2/log rho + 2/log^2 rho) - (pi/2) log(1 + 4/log^4 rho)`.
pub fn c_term(rho: f64) -> f64 {
    let l = rho.ln();
    PI * (1.0 + 2.0 / l + 2.0 / (l * l)).ln() - 0.5 * PI * (1.0 + 4.0 / l.powi(4)).ln()
}

/// Hyperbolic volume of the region between the cusp Epstein surface over
/// the annulus and the hyperplanes through its boundary circles:
/// `pi/12 [log^3] - pi/2 [log] + c(rho_2) - c(rho_1)`.
pub fn cusp_volume(rho1: f64, rho2: f64) -> f64 {
    if rho1 == rho2 {
        return 0.0;
    }
    let (l1, l2) = (rho1.ln(), rho2.ln());
    PI / 12.0 * (l2.powi(3) - l1.powi(3)) - PI / 2.0 * (l2 - l1) + c_term(rho2) - c_term(rho1)
}

/// Exact boundary term assembled from the caterpillar and edge components:
/// `b(rho) = -cat(rho) + (pi/8) edge_length(rho)`, which evaluates to
/// `-(pi^2/8 + pi/2) log rho + (pi/6 + pi^2/8)/log rho`. Its asymptote
/// `-(pi^2/8) log rho - (pi/2) log rho + O(1/log rho)` / in horocycle form
/// `pi^3/(4 eps) + pi^2/eps + O(eps)` / is exposed separately.
pub fn boundary_term_b(rho: f64) -> Result<f64> {
    if !(0.0 < rho && rho < flip_radius()) {
        return Err(CoreError::OutsideDomain(format!(
            "b(rho) needs 0 < rho < e^(-sqrt 2), got {rho}"
        )));
    }
    boundary_term_b_log(rho.ln())
}

/// `b` addressed by log-radius, for truncations too deep for linear radii.
pub fn boundary_term_b_log(log_rho: f64) -> Result<f64> {
    if !(log_rho < -std::f64::consts::SQRT_2) {
        return Err(CoreError::OutsideDomain(format!(
            "b needs log rho < -sqrt 2, got {log_rho}"
        )));
    }
    let b = BoundaryCircle::from_radial_log(&CuspField, log_rho);
    Ok(boundary_counterterm(&b, &CuspField, 1))
}

/// `b` in horocycle-length form: `b(rho(eps))` evaluated in log-space.
pub fn boundary_term_b_eps(eps: f64) -> Result<f64> {
    boundary_term_b_log(-2.0 * PI / eps)
}

/// Leading part of `b` in horocycle length: `pi^3/(4 eps) + pi^2/eps`.
pub fn boundary_term_b_asymptote_eps(eps: f64) -> f64 {
    PI.powi(3) / (4.0 * eps) + PI * PI / eps
}

/// Closed-form W-volume of the truncated cusp, itemized like the engine's
/// report:
/// `W = -pi/2 log(rho2/rho1) + [c + b](rho2) - [c + b](rho1)`.
pub fn cusp_w_volume(tr: &CuspTruncation) -> Result<WVolumeReport> {
    let volume = cusp_volume(tr.rho1, tr.rho2);
    let h_int = cusp_h_integral(tr.rho1, tr.rho2);
    let b1 = BoundaryCircle::from_radial(&CuspField, tr.rho1);
    let b2 = BoundaryCircle::from_radial(&CuspField, tr.rho2);
    let ct1 = boundary_counterterm(&b1, &CuspField, 1);
    let ct2 = boundary_counterterm(&b2, &CuspField, -1);
    let cat1 = -crate::wvolume::caterpillar_h_integral(&b1, 1);
    let cat2 = crate::wvolume::caterpillar_h_integral(&b2, 1);
    let edge1 = -(-ct1 + cat1);
    let edge2 = -(ct2 + cat2);
    Ok(WVolumeReport {
        volume,
        epstein_h_integral: h_int,
        caterpillar_terms: vec![cat1, cat2],
        edge_terms: vec![edge1, edge2],
        total_w: volume - h_int - ct1 + ct2,
        error_estimate: 0.0,
        quadrature_tree_depth: 0,
        one_plus_h_terms: None,
    })
}

/// Renormalization schedule toward the puncture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schedule {
    /// Inner radii marching to 0, strictly decreasing.
    pub radii: Vec<f64>,
}

impl Schedule {
    /// `rho = 10^{-k}` for `k = k0..=k1`.
    pub fn decades(k0: u32, k1: u32) -> Self {
        Self {
            radii: (k0..=k1).map(|k| 10f64.powi(-(k as i32))).collect(),
        }
    }

    /// Geometric schedule `rho_0 q^j`, `j = 0..n`.
    pub fn geometric(rho0: f64, q: f64, n: usize) -> Self {
        Self {
            radii: (0..=n).map(|j| rho0 * q.powi(j as i32)).collect(),
        }
    }

    fn validate(&self, rho_bar: f64) -> Result<()> {
        if self.radii.len() < 3 {
            return Err(CoreError::Validation("schedule needs >= 3 points".into()));
        }
        for w in self.radii.windows(2) {
            if !(w[1] < w[0]) {
                return Err(CoreError::Validation(
                    "schedule radii must strictly decrease".into(),
                ));
            }
        }
        if self.radii[0] >= rho_bar {
            return Err(CoreError::Validation(
                "schedule must start below the truncation radius".into(),
            ));
        }
        Ok(())
    }
}

/// Renormalized volume of the truncated cusp of outer radius `rho_bar`:
/// the limit of `W(D_rho^rho_bar) - (pi/2) log rho + b(rho)` along the
/// schedule, extrapolated linearly in `1/|log rho|`.
pub fn truncated_cusp_renvol(rho_bar: f64, schedule: &Schedule) -> Result<LimitEstimate> {
    if !(rho_bar < flip_radius()) {
        return Err(CoreError::Validation(
            "truncation radius must stay below e^(-sqrt 2)".into(),
        ));
    }
    schedule.validate(rho_bar)?;
    use rayon::prelude::*;
    let pts = schedule
        .radii
        .par_iter()
        .map(|&rho| {
            let tr = CuspTruncation::new(rho, rho_bar)?;
            let w = cusp_w_volume(&tr)?.total_w;
            Ok(SchedulePoint {
                x: 1.0 / rho.ln().abs(),
                value: w - 0.5 * PI * rho.ln() + boundary_term_b(rho)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_limit(&pts)?;
    if !(fit.rate).is_finite() {
        return Err(CoreError::NonConvergent("rate fit failed".into()));
    }
    Ok(fit)
}

/// The same limit in horocycle-length form: `W + pi^2/eps + b(rho(eps))`
/// along `eps_k = 2 pi / |log rho_k|`.
pub fn truncated_cusp_renvol_eps_form(rho_bar: f64, schedule: &Schedule) -> Result<LimitEstimate> {
    schedule.validate(rho_bar)?;
    let pts = schedule
        .radii
        .iter()
        .map(|&rho| {
            let tr = CuspTruncation::new(rho, rho_bar)?;
            let w = cusp_w_volume(&tr)?.total_w;
            let eps = eps_of_rho(rho);
            Ok(SchedulePoint {
                x: eps / (2.0 * PI),
                value: w + PI * PI / eps + boundary_term_b(rho)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fit_limit(&pts)
}

/// A holomorphic cusp perturbation `psi` with `psi(0) = 0`, inducing the
/// conformal factor `nu` with `h_0 = e^{2 nu} I_0`.
pub struct CuspPerturbation {
    pub psi: Holomorphic,
}

impl CuspPerturbation {
    pub fn new(psi: Holomorphic) -> Result<Self> {
        let at0 = (psi.f)(Complex::new(0.0, 0.0));
        if at0.norm() > 1e-12 {
            return Err(CoreError::Validation("psi(0) must vanish".into()));
        }
        Ok(Self { psi })
    }

    pub fn field(&self) -> PerturbedCuspField {
        PerturbedCuspField {
            psi: self.psi.clone(),
        }
    }

    /// Sampled check that `nu(z) = O(|z|)` near the puncture.
    pub fn check_nu_small(&self, rho_bar: f64) -> Result<()> {
        let f = self.field();
        for k in 1..=6 {
            let rho = rho_bar * 10f64.powi(-k);
            for &theta in &[0.0, 1.3, 2.9, 4.4] {
                let z = Complex::from_polar(rho, theta);
                let nu = f.nu(z);
                if nu.abs() > 10.0 * rho {
                    return Err(CoreError::Validation(format!(
                        "nu({z}) = {nu} is not O(|z|)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Diagnostics of the perturbed renormalized volume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbedRenvol {
    pub base: LimitEstimate,
    /// Polyakov corrections on the nested annuli of the schedule.
    pub polyakov_sequence: Vec<f64>,
    pub limit: f64,
}

/// Renormalized volume of a general cusp `e^{2 nu} I_0` on the disk of
/// radius `rho_bar`: the unperturbed limit plus the limit of the Polyakov
/// difference on nested annuli (finite because `nu = O(|z|)`).
pub fn perturbed_cusp_renvol(
    pert: &CuspPerturbation,
    rho_bar: f64,
    schedule: &Schedule,
    cfg: &QuadratureConfig,
) -> Result<PerturbedRenvol> {
    pert.check_nu_small(rho_bar)?;
    let base = truncated_cusp_renvol(rho_bar, schedule)?;
    let field = Arc::new(pert.field());
    // embeddedness of the perturbed surface, sampled: the immersion must
    // stay non-degenerate over the outermost annulus
    {
        let metric = ConformalMetric::new(
            crate::field::Domain::annulus(schedule.radii[0], rho_bar)?,
            field.clone(),
        );
        for k in 0..24 {
            let rho = schedule.radii[0]
                * (rho_bar / schedule.radii[0]).powf((k as f64 + 0.5) / 24.0);
            let z = Complex::from_polar(rho, 0.7 * k as f64);
            let f = crate::epstein::forms_at_infinity(&metric, z)?;
            let tr = f.b_hat[0][0] + f.b_hat[1][1];
            let det = f.b_hat[0][0] * f.b_hat[1][1] - f.b_hat[0][1] * f.b_hat[1][0];
            if (1.0 + tr + det).abs() < 1e-9 {
                return Err(CoreError::NotEmbedded(format!(
                    "perturbation too large near {z}"
                )));
            }
        }
    }
    let nu_field = field.clone();
    let grad_field = field.clone();
    let u = ConformalFactor::General {
        u: Arc::new(move |z| nu_field.nu(z)),
        grad: Arc::new(move |z| grad_field.nu_grad(z)),
    };
    use rayon::prelude::*;
    let seq = schedule
        .radii
        .par_iter()
        .map(|&rho| {
            let metric = ConformalMetric::cusp_annulus(rho, rho_bar)?;
            let region = RegionSpec::annulus(metric, rho, rho_bar)?;
            crate::wvolume::polyakov_delta(&region, &u, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let last = *seq.last().expect("nonempty schedule");
    let prev = seq[seq.len() - 2];
    if (last - prev).abs() > 1e-2 * (1.0 + last.abs()) {
        return Err(CoreError::NonConvergent(
            "Polyakov sequence not settling".into(),
        ));
    }
    Ok(PerturbedRenvol {
        limit: base.limit + last,
        base,
        polyakov_sequence: seq,
    })
}

/// Engine-vs-closed-form cross check used by tests and the CLI `wvol`
/// command: the generic quadrature W-volume of the cusp annulus.
pub fn cusp_w_volume_engine(tr: &CuspTruncation, cfg: &QuadratureConfig) -> Result<WVolumeReport> {
    let metric = ConformalMetric::cusp_annulus(tr.rho1, tr.rho2)?;
    let region = RegionSpec::annulus(metric, tr.rho1, tr.rho2)?;
    w_volume(&region, cfg)
}

//! The symmetric projective tube: developing map `f_l(z) = z^{2 pi i / l}`,
//! push-forward hyperbolic metric, Schwarzian, doubling by inversion, and
//! the tube W-volume with its `-pi^3/l` divergence.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cusp::{boundary_term_b, c_term, rho_of_eps, CuspTruncation};
use crate::field::{ConformalMetric, Domain, RadialProfile, TubeField};
use crate::quadrature::QuadratureConfig;
use crate::wvolume::{
    boundary_counterterm, polyakov_delta, w_volume, BoundaryCircle, ConformalFactor, RegionSpec,
    WVolumeReport,
};
use crate::{Complex, CoreError, Result};

/// A symmetric tube with core length `ell` and boundary circles of induced
/// length `eps > ell`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TubeSpec {
    pub ell: f64,
    pub eps: f64,
}

impl TubeSpec {
    pub fn new(ell: f64, eps: f64) -> Result<Self> {
        let eps0 = 2.0 * 1.0f64.asinh();
        if !(ell > 0.0 && eps > ell) {
            return Err(CoreError::Validation(format!(
                "tube needs 0 < ell < eps, got ({ell}, {eps})"
            )));
        }
        if eps > eps0 {
            return Err(CoreError::Validation(format!(
                "boundary length eps = {eps} exceeds the collar cap eps_0 = {eps0}"
            )));
        }
        Ok(Self { ell, eps })
    }

    /// `a = ell / (2 pi)`.
    pub fn a(&self) -> f64 {
        self.ell / (2.0 * PI)
    }

    /// Log-radii of the annulus `A_l(eps)`: inner and outer boundary, and
    /// the core circle at `-pi^2 / ell`.
    pub fn log_radii(&self) -> (f64, f64, f64) {
        let y = (self.ell / self.eps).asin();
        let l_in = -2.0 * PI * PI / self.ell + 2.0 * PI / self.ell * y;
        let l_out = -2.0 * PI / self.ell * y;
        let l_core = -PI * PI / self.ell;
        (l_in, l_out, l_core)
    }

    pub fn field(&self) -> TubeField {
        TubeField { a: self.a() }
    }

    pub fn metric(&self) -> Result<ConformalMetric> {
        let (l_in, l_out, _) = self.log_radii();
        Ok(ConformalMetric::new(
            Domain::log_annulus(l_in, l_out)?,
            Arc::new(self.field()),
        ))
    }

    /// Developing map `f_l(z) = z^{2 pi i / ell}` on the upper half plane.
    pub fn developing_map(&self) -> impl Fn(Complex) -> Complex {
        let k = Complex::new(0.0, 2.0 * PI / self.ell);
        move |z: Complex| (k * z.ln()).exp()
    }
}

/// Tube metric density `e^{2 phi_l} = l^2 / (4 pi^2 rho^2 sin^2(a log rho))`.
pub fn tube_density(spec: &TubeSpec, z: Complex) -> Result<f64> {
    let (l_in, l_out, _) = spec.log_radii();
    let l = z.norm().ln();
    if !(l_in <= l && l <= l_out) {
        return Err(CoreError::OutsideDomain(format!("{z}")));
    }
    let s = spec.field().s(l);
    Ok(s * s / (2.0 * l).exp())
}

/// Closed-form Schwarzian coefficient of the developing map:
/// `S(f_l) = (1/(2 z^2)) (1 + 4 pi^2 / ell^2) dz^2`.
pub fn tube_schwarzian(spec: &TubeSpec, z: Complex) -> Complex {
    (1.0 + 4.0 * PI * PI / (spec.ell * spec.ell)) / (2.0 * z * z)
}

/// The inversion `r(z) = conj(z)^{-1} e^{-2 pi^2 / ell}` across the core
/// hyperplane; an anti-Moebius isometry swapping the two tube halves.
pub fn tube_inversion(spec: &TubeSpec, z: Complex) -> Result<Complex> {
    if z.norm() == 0.0 {
        return Err(CoreError::Validation("inversion undefined at 0".into()));
    }
    Ok((-2.0 * PI * PI / spec.ell).exp() / z.conj())
}

/// Tube W-volume, with both computation routes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeWVolume {
    /// Direct engine quadrature of `W(A_l(eps), I_l)`.
    pub direct: WVolumeReport,
    /// The comparison route: cusp closed form on the half tube, Polyakov
    /// correction by `w_l`, doubled across the core.
    pub polyakov_route: f64,
    /// `|direct - route|`, the dual-route cross-validation gap.
    pub route_gap: f64,
}

/// Direct engine W-volume of the full tube annulus.
pub fn tube_w_volume_direct(spec: &TubeSpec, cfg: &QuadratureConfig) -> Result<WVolumeReport> {
    let (l_in, l_out, _) = spec.log_radii();
    let region = RegionSpec::log_annulus(spec.metric()?, l_in, l_out)?;
    w_volume(&region, cfg)
}

/// The comparison factor `w_l(rho) = log( a log rho / sin(a log rho) )`
/// with `I_l = e^{2 w_l} I_0`; `w_l(core) = log(pi/2)`.
pub fn tube_comparison_factor(spec: &TubeSpec, log_rho: f64) -> f64 {
    let a = spec.a();
    (a * log_rho / (a * log_rho).sin()).ln()
}

/// W-volume of the half tube `[core, outer]` by the cusp-closed-form +
/// Polyakov route, and the doubling counterterm at the core.
pub fn tube_half_route(spec: &TubeSpec, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let (_, l_out, l_core) = spec.log_radii();
    let tr = CuspTruncation::new(l_core.exp(), l_out.exp())?;
    let w_cusp = crate::cusp::cusp_w_volume(&tr)?.total_w;
    let a = spec.a();
    let u = ConformalFactor::Radial {
        u: Arc::new(move |l| (a * l / (a * l).sin()).ln()),
        du: Arc::new(move |l| 1.0 / l - a / (a * l).tan()),
    };
    let region = RegionSpec::annulus(
        ConformalMetric::cusp_annulus(l_core.exp(), l_out.exp())?,
        l_core.exp(),
        l_out.exp(),
    )?;
    let poly = polyakov_delta(&region, &u, cfg)?;
    // doubling counterterm: the cusp-model boundary term at the core radius,
    // which is what the route's half-tube W carries at its inner boundary
    let b_core = boundary_term_b(l_core.exp())?;
    Ok((w_cusp + poly, b_core))
}

/// Both routes for `W(A_l(eps), I_l)`.
pub fn tube_w_volume(spec: &TubeSpec, cfg: &QuadratureConfig) -> Result<TubeWVolume> {
    let direct = tube_w_volume_direct(spec, cfg)?;
    let (w_half, b_core) = tube_half_route(spec, cfg)?;
    let route = 2.0 * (w_half + b_core);
    Ok(TubeWVolume {
        route_gap: (direct.total_w - route).abs(),
        direct,
        polyakov_route: route,
    })
}

/// Doubling data: `W(A) = 2 W(C) + 2 b(core)` with the core counterterm
/// taken in the tube metric, where the caterpillar degenerates and only the
/// edge term `(pi^2/8)(1/a - a)` survives.
pub fn tube_doubling_terms(spec: &TubeSpec, cfg: &QuadratureConfig) -> Result<(f64, f64, f64)> {
    let (_, l_out, l_core) = spec.log_radii();
    let field = spec.field();
    let half = RegionSpec::log_annulus(
        ConformalMetric::new(Domain::log_annulus(l_core, l_out)?, Arc::new(field)),
        l_core,
        l_out,
    )?;
    let w_half = w_volume(&half, cfg)?.total_w;
    let b = BoundaryCircle::from_radial_log(&field, l_core);
    let b_core = boundary_counterterm(&b, &field, 1);
    let w_full = tube_w_volume_direct(spec, cfg)?.total_w;
    Ok((w_full, w_half, b_core))
}

/// Leading-order prediction `-pi^3/ell + 2 pi^2/eps + 2 b(rho(eps))` with
/// the exact cusp-model boundary term.
pub fn tube_wvol_asymptote(spec: &TubeSpec) -> Result<f64> {
    Ok(-PI.powi(3) / spec.ell + 2.0 * PI * PI / spec.eps
        + 2.0 * boundary_term_b(rho_of_eps(spec.eps))?)
}

/// The asymptote completed by the finite volume tail `2 c(rho(eps))`, the
/// exact `ell -> 0` limit of `W + pi^3/ell`; the bare asymptote misses it
/// at order `O(eps)`.
pub fn tube_wvol_asymptote_exact(spec: &TubeSpec) -> Result<f64> {
    Ok(tube_wvol_asymptote(spec)? + 2.0 * c_term(rho_of_eps(spec.eps)))
}

/// Error budget of the general-tube extension: for a tube of core length
/// `ell` carrying a Schwarzian perturbation of magnitude `q_sup` on top of
/// the symmetric model, the W-volume differs from the symmetric one by at
/// most `C * max(q_sup, e^{-pi^2/(2 ell)} / ell^2)` in the developing-map
/// comparison; only the budget is reported, no developing-map integration.
pub fn general_tube_error_budget(spec: &TubeSpec, q_sup: f64) -> f64 {
    q_sup.max((-PI * PI / (2.0 * spec.ell)).exp() / (spec.ell * spec.ell))
}

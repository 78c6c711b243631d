//! W-volumes of annular regions bounded by Epstein surfaces, caterpillar
//! regions and hyperplanes, with the Polyakov variation and the rescaling
//! and additivity identities.
//!
//! # Sign ledger
//!
//! The engine fixes one convention and validates it against the cusp and
//! tube closed forms:
//!
//! `W = Vol - (1/2) int_Sigma H da + sum_i or_i * b_i`
//!
//! where `Vol` is the volume of the region bounded by the Epstein surface
//! over the annulus and the two hyperplanes through the Epstein images of
//! its boundary circles, `or_i` is `-1` on the inner and `+1` on the outer
//! boundary, and the per-boundary term is
//!
//! `b_i = -cat_i + sign(1 + P_i) * (pi/8) * edge_length_i`
//!
//! with `cat_i = -(1/2) int_{C_i} H da` the caterpillar mean-curvature
//! integral and `P_i = rho phi'(rho)` the log-radial derivative at the
//! circle. The edge sign is the sign of the geodesic curvature of the
//! boundary circle with respect to the outward-from-center direction;
//! with it, additivity under concentric splits and the doubling identity
//! for symmetric tubes both hold exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::{ConformalMetric, RadialProfile};
use crate::halfspace::{Complex, HyperbolicPoint3};
use crate::quadrature::{integrate_1d, integrate_2d, QuadratureConfig};
use crate::{CoreError, Result};

/// Annular region with round boundary circles carrying a conformal metric.
/// Radii are held as logs so deep thin parts stay representable.
pub struct RegionSpec {
    pub metric: ConformalMetric,
    pub log_rho1: f64,
    pub log_rho2: f64,
    /// Euler characteristic of the domain; 0 for annuli.
    pub euler_characteristic: i32,
    /// Orientation of (inner, outer) boundary: `-1` reversed, `+1` standard.
    /// The ledger's `or_i` factors; the defaults `(-1, +1)` are the annulus
    /// convention validated against the cusp model.
    pub orientations: (i8, i8),
}

impl RegionSpec {
    pub fn annulus(metric: ConformalMetric, rho1: f64, rho2: f64) -> Result<Self> {
        if !(0.0 < rho1 && rho1 <= rho2) {
            return Err(CoreError::Validation(format!(
                "region needs 0 < rho1 <= rho2, got ({rho1}, {rho2})"
            )));
        }
        Self::log_annulus(metric, rho1.ln(), rho2.ln())
    }

    pub fn log_annulus(metric: ConformalMetric, log_rho1: f64, log_rho2: f64) -> Result<Self> {
        if !(log_rho1 <= log_rho2) || !log_rho1.is_finite() || !log_rho2.is_finite() {
            return Err(CoreError::Validation(format!(
                "region needs finite log_rho1 <= log_rho2, got ({log_rho1}, {log_rho2})"
            )));
        }
        Ok(Self {
            metric,
            log_rho1,
            log_rho2,
            euler_characteristic: 0,
            orientations: (-1, 1),
        })
    }
}

/// Itemized W-volume. The ledger identity
/// `total_w = volume - epstein_h_integral - sum(caterpillar_terms) - sum(edge_terms)`
/// holds exactly; the per-boundary entries already carry their signs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WVolumeReport {
    /// Hyperbolic volume of the region bounded by the Epstein surface and
    /// the hyperplanes through its boundary circles.
    pub volume: f64,
    /// `(1/2) int H da` over the interior Epstein piece.
    pub epstein_h_integral: f64,
    /// Signed caterpillar contributions, inner then outer.
    pub caterpillar_terms: Vec<f64>,
    /// Signed bending-line contributions, inner then outer.
    pub edge_terms: Vec<f64>,
    pub total_w: f64,
    pub error_estimate: f64,
    /// Deepest refinement level used by the adaptive quadrature.
    pub quadrature_tree_depth: usize,
    /// The `-(3/2) int (1 + H) da_C` term of the original round-boundary
    /// definition; reported for reference, excluded from `total_w`.
    pub one_plus_h_terms: Option<Vec<f64>>,
}

/// Radial boundary data of a round boundary circle, in scale-safe form:
/// log-radius, the field value, and `P = rho phi'(rho)`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryCircle {
    pub log_radius: f64,
    /// `phi` on the circle (constant there).
    pub phi: f64,
    /// `P = rho phi'(rho)` on the circle.
    pub p: f64,
}

impl BoundaryCircle {
    pub fn from_radial(profile: &dyn RadialProfile, rho: f64) -> Self {
        Self::from_radial_log(profile, rho.ln())
    }

    pub fn from_radial_log(profile: &dyn RadialProfile, l: f64) -> Self {
        Self {
            log_radius: l,
            phi: profile.phi(l),
            p: profile.p(l),
        }
    }

    pub fn radius(&self) -> f64 {
        self.log_radius.exp()
    }

    /// `S = rho e^phi`: induced circle length over `2 pi`.
    pub fn s(&self) -> f64 {
        (self.log_radius + self.phi).exp()
    }

    /// Caterpillar `v`-bracket: from the Epstein-surface contact
    /// `v = -phi'` to the hyperplane contact `v = 1/rho`.
    pub fn v_bracket(&self) -> (f64, f64) {
        let rho = self.radius();
        let vs = -self.p / rho;
        let vp = 1.0 / rho;
        if vs <= vp {
            (vs, vp)
        } else {
            (vp, vs)
        }
    }
}

/// Point of the caterpillar region over a boundary circle, at arclength `s`
/// (unit-velocity parameterization of the circle) and normal parameter `v`:
///
/// `C(s, v) = ( e^{i s/rho} (rho - 2v/(e^{2 phi} + v^2)), 2 e^{phi}/(e^{2 phi} + v^2) )`.
pub fn caterpillar_point(b: &BoundaryCircle, s: f64, v: f64) -> Result<HyperbolicPoint3> {
    let (lo, hi) = b.v_bracket();
    let slack = 1e-12 * (1.0 + hi.abs());
    if v < lo - slack || v > hi + slack {
        return Err(CoreError::CaterpillarBracket { v, lo, hi });
    }
    let rho = b.radius();
    let e2p = (2.0 * b.phi).exp();
    let den = e2p + v * v;
    let dir = Complex::new(0.0, s / rho).exp();
    Ok(HyperbolicPoint3 {
        horizontal: dir * (rho - 2.0 * v / den),
        height: 2.0 * b.phi.exp() / den,
    })
}

/// `-(1/2) int_C H da_C` for the caterpillar over a round boundary circle
/// with constant `phi`, from `H da_C = (1/2) e^{-2 phi} (2 k v - v^2) dv ds`:
/// in scale-invariant form `(pi / 2 S^2)(P^2 + P^3/3 - 2/3)`.
/// `orientation = -1` negates (reversed boundary orientation).
pub fn caterpillar_h_integral(b: &BoundaryCircle, orientation: i8) -> f64 {
    let s2 = b.s() * b.s();
    let p = b.p;
    f64::from(orientation) * (PI / (2.0 * s2)) * (p * p + p * p * p / 3.0 - 2.0 / 3.0)
}

/// Hyperbolic length of the lower caterpillar edge on the hyperplane:
/// `2 pi r_b / t_b` at `v = 1/rho`, which reduces to `pi |S^2 - 1| / S`.
pub fn edge_length(b: &BoundaryCircle) -> f64 {
    let s = b.s();
    PI * (s * s - 1.0).abs() / s
}

/// Bending-line contribution `(1/4) theta ell` of an edge with constant
/// exterior angle; the caterpillar edges all have `theta = pi/2`.
pub fn edge_term(exterior_angle: f64, edge_len: f64) -> Result<f64> {
    if !(exterior_angle > 0.0 && exterior_angle <= PI) {
        return Err(CoreError::Validation(format!(
            "exterior angle must lie in (0, pi], got {exterior_angle}"
        )));
    }
    if edge_len < 0.0 {
        return Err(CoreError::Validation("edge length must be >= 0".into()));
    }
    Ok(0.25 * exterior_angle * edge_len)
}

/// Per-boundary counterterm `b = -cat + sign(1 + P) (pi/8) edge_length`.
///
/// `interior_side` is `+1` when the domain lies at larger radii than the
/// circle (inner boundary) and `-1` otherwise; it only matters on the
/// measure-zero locus `1 + P = 0`, where the sign is taken as the limit
/// from within the domain.
pub fn boundary_counterterm(b: &BoundaryCircle, profile: &dyn RadialProfile, interior_side: i8) -> f64 {
    let mut one_plus_p = 1.0 + b.p;
    if one_plus_p == 0.0 {
        one_plus_p = 1.0 + profile.p(b.log_radius + f64::from(interior_side) * 1e-9);
    }
    let sign = if one_plus_p >= 0.0 { 1.0 } else { -1.0 };
    -caterpillar_h_integral(b, 1) + sign * PI / 8.0 * edge_length(b)
}

// ---------------------------------------------------------------------------
// radial engine in log-radius

/// Scale-invariant Epstein profile over log-radius `l`: the surface point is
/// `(rho f, rho tau)` with signed `f`.
pub(crate) fn radial_profile_point(r: &dyn RadialProfile, l: f64) -> (f64, f64) {
    let s = r.s(l);
    let p = r.p(l);
    let den = s * s + p * p;
    (1.0 + 2.0 * p / den, 2.0 * s / den)
}

fn radial_profile_derivative(r: &dyn RadialProfile, l: f64) -> (f64, f64) {
    let s = r.s(l);
    let p = r.p(l);
    let dp = r.dp(l);
    let ds = s * (1.0 + p);
    let den = s * s + p * p;
    let dden = 2.0 * s * ds + 2.0 * p * dp;
    let df = (2.0 * dp * den - 2.0 * p * dden) / (den * den);
    let dt = (2.0 * ds * den - 2.0 * s * dden) / (den * den);
    (df, dt)
}

/// `(1/2) int H da` over the Epstein face of the annulus `[l1, l2]`,
/// as `(1/8) int (1 - det B) da_Ihat` with the signed area convention:
/// integrand `(pi/4) [S^2 - (P'^2 - q~^2)/S^2]` in log-radius, where
/// `q~ = P' - 2P - P^2`.
fn radial_h_integral(
    r: &dyn RadialProfile,
    l1: f64,
    l2: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, usize)> {
    let f = |l: f64| {
        let s2 = (2.0 * r.log_s(l)).exp();
        let p = r.p(l);
        let dp = r.dp(l);
        let qt = dp - 2.0 * p - p * p;
        0.25 * PI * (s2 - (dp * dp - qt * qt) / s2)
    };
    let out = integrate_1d(&f, l1, l2, cfg)?;
    Ok((out.value, out.error_estimate, out.depth))
}

/// Antiderivative of `cos^3/sin^3` used by the hemisphere caps:
/// `G(theta) = -1/(2 sin^2 theta) - log sin theta`.
fn hemi_green(theta: f64) -> f64 {
    let s = theta.sin();
    -0.5 / (s * s) - s.ln()
}

/// Volume of the region bounded by the Epstein face over `[l1, l2]` and the
/// hyperplanes through its boundary circles, via the boundary integral
/// `V = pi * closed-loop int r^2 / t^3 dt`. The hemisphere arcs integrate in
/// closed form; the face contributes `int f^2 (tau + tau') / tau^3 dl`.
fn radial_volume(
    r: &dyn RadialProfile,
    l1: f64,
    l2: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, usize)> {
    let (f1, t1) = radial_profile_point(r, l1);
    let (f2, t2) = radial_profile_point(r, l2);
    let a1 = t1.atan2(f1.abs());
    let a2 = t2.atan2(f2.abs());
    // loop: pole_1 -> (hemi 1) -> face l1..l2 -> (hemi 2) -> pole_2 -> axis
    let hemi1 = hemi_green(a1) - hemi_green(0.5 * PI);
    let hemi2 = hemi_green(0.5 * PI) - hemi_green(a2);
    let face = |l: f64| {
        let (f, t) = radial_profile_point(r, l);
        let (_, dt) = radial_profile_derivative(r, l);
        f * f * (t + dt) / (t * t * t)
    };
    let out = integrate_1d(&face, l1, l2, cfg)?;
    Ok((
        PI * (hemi1 + out.value + hemi2),
        PI * out.error_estimate,
        out.depth,
    ))
}

/// Sampled region-validity check: finite profile, positive heights, no
/// degenerate immersion, and a simple rotation profile. Profiles whose
/// distance from the center grows monotonically are accepted outright;
/// otherwise sampled profile segments are tested pairwise for crossings
/// (only nearby log-radii can interact, so the test runs in the local
/// scale and never underflows).
fn check_embedded(r: &dyn RadialProfile, l1: f64, l2: f64) -> Result<()> {
    let n = 513usize;
    let mut pts = Vec::with_capacity(n);
    let mut monotone = true;
    let mut prev_omega = f64::NEG_INFINITY;
    for i in 0..n {
        let l = l1 + (l2 - l1) * i as f64 / (n - 1) as f64;
        let (f, t) = radial_profile_point(r, l);
        if !f.is_finite() || !t.is_finite() || t <= 0.0 {
            return Err(CoreError::NotEmbedded(format!(
                "profile not finite/positive at log-radius {l}"
            )));
        }
        let s2 = (2.0 * r.log_s(l)).exp();
        let p = r.p(l);
        let dp = r.dp(l);
        let qt = dp - 2.0 * p - p * p;
        // det(id + B) in scale-free form
        let det_id_b = 1.0 + 2.0 * dp / s2 + (dp * dp - qt * qt) / (s2 * s2);
        if det_id_b.abs() < 1e-12 {
            return Err(CoreError::DegenerateImmersion(format!("log-radius {l}")));
        }
        let omega = l + 0.5 * (f * f + t * t).ln();
        monotone &= omega > prev_omega;
        prev_omega = omega;
        pts.push((l, f.abs(), t));
    }
    if monotone {
        return Ok(());
    }
    // windowed self-intersection test on the sampled polyline
    let seg = |i: usize, scale: f64| {
        let (la, fa, ta) = pts[i];
        let (lb, fb, tb) = pts[i + 1];
        (
            ((la - scale).exp() * fa, (la - scale).exp() * ta),
            ((lb - scale).exp() * fb, (lb - scale).exp() * tb),
        )
    };
    for i in 0..n - 1 {
        let scale = pts[i].0;
        for j in (i + 2)..n - 1 {
            if pts[j].0 - scale > 3.0 {
                break;
            }
            let (a, b) = seg(i, scale);
            let (c, d) = seg(j, scale);
            if segments_cross(a, b, c, d) {
                return Err(CoreError::NotEmbedded(format!(
                    "profile self-intersects between log-radii {:.6} and {:.6}",
                    pts[i].0, pts[j].0
                )));
            }
        }
    }
    Ok(())
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    };
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// The `-(3/2) int_C (1 + H) da_C` term of the original round-boundary
/// definition: with `da_C = (1/2 - H/...) dv ds` the mean-curvature parts
/// cancel and the term collapses to `-(3/2) pi rho (v_hi - v_lo)`, which
/// vanishes like `1/|log rho|` in the cusp limit.
fn one_plus_h_term(b: &BoundaryCircle) -> f64 {
    let (lo, hi) = b.v_bracket();
    -1.5 * PI * b.radius() * (hi - lo)
}

/// W-volume of an annular region, itemized.
///
/// Rotationally symmetric metrics use the 1D log-radius integrator; other
/// metrics are rejected for the volume term (use [`polyakov_delta`] from a
/// symmetric base instead).
pub fn w_volume(region: &RegionSpec, cfg: &QuadratureConfig) -> Result<WVolumeReport> {
    cfg.validate()?;
    let profile = region
        .metric
        .field
        .radial()
        .ok_or_else(|| CoreError::NonSymmetricVolume("a non-radial Liouville field".into()))?;
    if region.log_rho1 == region.log_rho2 {
        return Ok(WVolumeReport {
            volume: 0.0,
            epstein_h_integral: 0.0,
            caterpillar_terms: vec![0.0, 0.0],
            edge_terms: vec![0.0, 0.0],
            total_w: 0.0,
            error_estimate: 0.0,
            quadrature_tree_depth: 0,
            one_plus_h_terms: Some(vec![0.0, 0.0]),
        });
    }
    let (l1, l2) = (region.log_rho1, region.log_rho2);
    check_embedded(profile, l1, l2)?;
    let (volume, verr, vdepth) = radial_volume(profile, l1, l2, cfg)?;
    let (h_int, herr, hdepth) = radial_h_integral(profile, l1, l2, cfg)?;

    let b1 = BoundaryCircle::from_radial_log(profile, l1);
    let b2 = BoundaryCircle::from_radial_log(profile, l2);
    let (or1, or2) = (region.orientations.0, region.orientations.1);
    // ledger: W = Vol - H + or1*b(1) + or2*b(2); report entries are the
    // subtracted items so that total = volume - h - sum(cat) - sum(edge).
    let ct1 = boundary_counterterm(&b1, profile, 1);
    let ct2 = boundary_counterterm(&b2, profile, -1);
    let cat1 = f64::from(or1) * caterpillar_h_integral(&b1, 1);
    let cat2 = f64::from(or2) * caterpillar_h_integral(&b2, 1);
    let edge1 = -(f64::from(or1) * ct1 + cat1);
    let edge2 = -(f64::from(or2) * ct2 + cat2);
    let total = volume - h_int + f64::from(or1) * ct1 + f64::from(or2) * ct2;
    Ok(WVolumeReport {
        volume,
        epstein_h_integral: h_int,
        caterpillar_terms: vec![cat1, cat2],
        edge_terms: vec![edge1, edge2],
        total_w: total,
        error_estimate: verr + herr,
        quadrature_tree_depth: vdepth.max(hdepth),
        one_plus_h_terms: Some(vec![one_plus_h_term(&b1), one_plus_h_term(&b2)]),
    })
}

/// `(1/2) int H da` over the Epstein face by 2D adaptive quadrature in
/// `(l, theta)`; works for any field and cross-checks the radial path.
pub fn epstein_h_integral_2d(
    metric: &ConformalMetric,
    rho1: f64,
    rho2: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let field = Arc::clone(&metric.field);
    let f = move |l: f64, theta: f64| {
        let z = Complex::from_polar(l.exp(), theta);
        let jet = field.jet(z);
        let q = jet.phi_zz - jet.phi_z * jet.phi_z;
        let e2p = (2.0 * jet.phi).exp();
        let em2p = 1.0 / e2p;
        let det_b = 16.0 * em2p * em2p * (jet.phi_zzbar * jet.phi_zzbar - q.norm_sqr());
        // (1/8)(1 - det B) e^{2 phi} rho^2, the |dz|^2 measure in (l, theta)
        0.125 * (1.0 - det_b) * e2p * (2.0 * l).exp()
    };
    Ok(integrate_2d(&f, rho1.ln(), rho2.ln(), 0.0, 2.0 * PI, cfg)?.value)
}

// ---------------------------------------------------------------------------
// Polyakov variation

/// A smooth conformal factor `u` for the Polyakov formula.
pub enum ConformalFactor {
    /// Radial `u(l)` with `du/dl`, in log-radius.
    Radial {
        u: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        du: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    /// General `u(z)` with euclidean gradient `(u_x, u_y)` as a complex number.
    General {
        u: Arc<dyn Fn(Complex) -> f64 + Send + Sync>,
        grad: Arc<dyn Fn(Complex) -> Complex + Send + Sync>,
    },
}

/// Predicted difference `W(Omega, e^{2u} g) - W(Omega, g)` from the Polyakov
/// formula:
///
/// `-(1/4) int (|grad_g u|^2 + K(g) u) da(g) - (1/2) int_bdry k(g) u ds(g)`
///
/// with `K` the scalar curvature (twice the Gaussian) and `k` the geodesic
/// curvature of the boundary with respect to the outward normal. In the
/// conformal gauge every exponential cancels: the area integrand is
/// `|grad u|^2_eucl - 8 phi_zzbar u` against euclidean measure, and the
/// boundary integrand is `or (1 + P) u` against `d theta`.
pub fn polyakov_delta(
    region: &RegionSpec,
    u: &ConformalFactor,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let (l1, l2) = (region.log_rho1, region.log_rho2);
    match u {
        ConformalFactor::Radial { u, du } => {
            let profile = region.metric.field.radial().ok_or_else(|| {
                CoreError::NonSymmetricVolume("radial Polyakov factor on a non-radial metric".into())
            })?;
            let u = Arc::clone(u);
            let du = Arc::clone(du);
            let f = |l: f64| {
                let g = du(l);
                g * g - 2.0 * profile.dp(l) * u(l)
            };
            let area = integrate_1d(&f, l1, l2, cfg)?.value;
            // -1/2 * 2pi * [ or_1 (1+P_1) u_1 + or_2 (1+P_2) u_2 ]
            let boundary = -PI * (-(1.0 + profile.p(l1)) * u(l1) + (1.0 + profile.p(l2)) * u(l2));
            Ok(-0.25 * 2.0 * PI * area + boundary)
        }
        ConformalFactor::General { u, grad } => {
            let field = Arc::clone(&region.metric.field);
            let uf = Arc::clone(u);
            let gf = Arc::clone(grad);
            let area_f = move |l: f64, theta: f64| {
                let z = Complex::from_polar(l.exp(), theta);
                let jet = field.jet(z);
                let g = gf(z);
                // euclidean measure rho^2 dl dtheta
                (g.norm_sqr() - 8.0 * jet.phi_zzbar * uf(z)) * (2.0 * l).exp()
            };
            let area = integrate_2d(&area_f, l1, l2, 0.0, 2.0 * PI, cfg)?.value;
            let field = Arc::clone(&region.metric.field);
            let uf = Arc::clone(u);
            let circle_term = |rho: f64, or: f64| -> Result<f64> {
                let field = Arc::clone(&field);
                let uf = Arc::clone(&uf);
                let f = move |theta: f64| {
                    let z = Complex::from_polar(rho, theta);
                    let radial_dir = Complex::from_polar(1.0, theta);
                    // P at the circle point: rho * radial derivative of phi
                    let jet = field.jet(z);
                    let grad_phi = 2.0 * jet.phi_z.conj();
                    let p = rho * (grad_phi.re * radial_dir.re + grad_phi.im * radial_dir.im);
                    or * (1.0 + p) * uf(z)
                };
                Ok(integrate_1d(&f, 0.0, 2.0 * PI, cfg)?.value)
            };
            let k1 = circle_term(region.log_rho1.exp(), -1.0)?;
            let k2 = circle_term(region.log_rho2.exp(), 1.0)?;
            Ok(-0.25 * area - 0.5 * (k1 + k2))
        }
    }
}

/// Both sides of the round-boundary rescaling identity: the Polyakov value
/// of the constant factor `u = r` (left) and `-r pi chi(Omega)` (right).
pub fn rescale_identity_check(
    region: &RegionSpec,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let u = ConformalFactor::Radial {
        u: Arc::new(move |_| r),
        du: Arc::new(|_| 0.0),
    };
    let lhs = polyakov_delta(region, &u, cfg)?;
    let rhs = -r * PI * f64::from(region.euler_characteristic);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CuspField;

    fn cusp_region(rho1: f64, rho2: f64) -> RegionSpec {
        RegionSpec::annulus(ConformalMetric::cusp_annulus(rho1, rho2).unwrap(), rho1, rho2)
            .unwrap()
    }

    #[test]
    fn caterpillar_closed_form_matches_1d_quadrature() {
        // -1/2 int H da over the caterpillar, against direct v-integration
        let rho: f64 = (-3.0f64).exp();
        let b = BoundaryCircle::from_radial(&CuspField, rho);
        let closed = caterpillar_h_integral(&b, 1);
        let e2p = (2.0 * b.phi).exp();
        let (lo, hi) = b.v_bracket();
        let f = |v: f64| -0.25 / e2p * (2.0 * v / rho - v * v) * 2.0 * PI * rho;
        let q = integrate_1d(&f, lo, hi, &QuadratureConfig::default()).unwrap();
        assert!((closed - q.value).abs() < 1e-10 * closed.abs());
        // evaluated bracket at rho = e^{-1}: -pi/2 + pi/6 = -pi/3
        let b1 = BoundaryCircle::from_radial(&CuspField, (-1.0f64).exp());
        assert!((caterpillar_h_integral(&b1, 1) + PI / 3.0).abs() < 1e-14);
        assert!((caterpillar_h_integral(&b1, -1) - PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn caterpillar_endpoints_lie_on_hyperplane_and_surface() {
        let rho: f64 = (-2.5f64).exp();
        let m = ConformalMetric::cusp_annulus(rho * 0.5, rho * 1.5).unwrap();
        let b = BoundaryCircle::from_radial(&CuspField, rho);
        let (lo, hi) = b.v_bracket();
        // v = 1/rho: on the hemisphere |z|^2 + t^2 = rho^2
        let p = caterpillar_point(&b, 0.3, hi).unwrap();
        let r2 = p.horizontal.norm_sqr() + p.height * p.height;
        assert!((r2.sqrt() - rho).abs() < 1e-12);
        // v = -phi': coincides with the Epstein point over the circle
        let q = caterpillar_point(&b, 0.0, lo).unwrap();
        let e = crate::epstein::epstein_point(&m, Complex::new(rho, 0.0)).unwrap();
        assert!((q.height - e.height).abs() < 1e-12);
        assert!((q.horizontal.norm() - e.horizontal.norm()).abs() < 1e-12);
        // periodicity in s
        let a = caterpillar_point(&b, 0.1, hi).unwrap();
        let c = caterpillar_point(&b, 0.1 + 2.0 * PI * rho, hi).unwrap();
        assert!((a.horizontal - c.horizontal).norm() < 1e-12);
    }

    #[test]
    fn degenerate_annulus_is_zero() {
        let region = cusp_region(0.05, 0.05 + 0.0);
        let rep = w_volume(&region, &QuadratureConfig::default()).unwrap();
        assert_eq!(rep.total_w, 0.0);
    }

    #[test]
    fn additivity_under_concentric_split() {
        let cfg = QuadratureConfig::with_rel_tol(1e-11);
        let w = w_volume(&cusp_region((-5.0f64).exp(), (-2.0f64).exp()), &cfg).unwrap();
        let wa = w_volume(&cusp_region((-5.0f64).exp(), (-3.3f64).exp()), &cfg).unwrap();
        let wb = w_volume(&cusp_region((-3.3f64).exp(), (-2.0f64).exp()), &cfg).unwrap();
        let gap = (w.total_w - wa.total_w - wb.total_w).abs();
        assert!(gap < 1e-8, "additivity gap {gap}");
    }

    #[test]
    fn report_ledger_identity() {
        let rep = w_volume(
            &cusp_region((-4.0f64).exp(), (-2.0f64).exp()),
            &QuadratureConfig::default(),
        )
        .unwrap();
        let total = rep.volume
            - rep.epstein_h_integral
            - rep.caterpillar_terms.iter().sum::<f64>()
            - rep.edge_terms.iter().sum::<f64>();
        assert!((total - rep.total_w).abs() < 1e-12 * (1.0 + rep.total_w.abs()));
    }

    #[test]
    fn rescale_check_is_zero_for_annulus() {
        let region = cusp_region((-4.0f64).exp(), (-2.0f64).exp());
        let (lhs, rhs) = rescale_identity_check(&region, 0.7, &QuadratureConfig::default()).unwrap();
        assert_eq!(rhs, 0.0);
        assert!(lhs.abs() < 1e-10, "lhs {lhs}");
    }
}

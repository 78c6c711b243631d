//! Pointwise Epstein surface of a conformal metric: explicit coordinates,
//! fundamental forms at infinity, shape operator, and mean curvature.

use std::sync::Arc;

use serde::Serialize;

use crate::field::{ConformalMetric, ConstField, Jet, LiouvilleField, RadialScaled};
use crate::halfspace::{Complex, HyperbolicPoint3};
use crate::{CoreError, Result};

/// Per-point package of the surface data driven by a metric at infinity.
///
/// Tensors are stored in the real `(x, y)` coordinate basis, where the
/// trace/determinant bookkeeping is plain 2x2 linear algebra. The unit
/// normal is recorded by its ideal endpoint: the geodesic ray from
/// `surface_point` in the normal direction lands at `base`.
#[derive(Debug, Clone, Serialize)]
pub struct EpsteinFrame {
    pub base: (f64, f64),
    pub surface_point: HyperbolicPoint3,
    /// First fundamental form at infinity, `e^{2 phi} Id`.
    pub i_hat: [[f64; 2]; 2],
    /// Second fundamental form at infinity.
    pub ii_hat: [[f64; 2]; 2],
    /// Third fundamental form at infinity, `I(B., B.)`.
    pub iii_hat: [[f64; 2]; 2],
    /// Shape operator at infinity `I^{-1} II`.
    pub b_hat: [[f64; 2]; 2],
    /// Coefficient of `dz^2` in `II = 2q dz^2 + 2 conj(q) dzbar^2 + 4 phi_zzbar |dz|^2`.
    pub q: (f64, f64),
    pub mean_curvature: f64,
}

/// Epstein surface point over `z`:
/// `Sigma(z) = ( z + 2 e^{-2phi} grad(phi) / D, 2 e^{-phi} / D )` with
/// `D = 1 + e^{-2phi} |grad phi|^2` and `grad phi = 2 phi_zbar`.
pub fn epstein_point(metric: &ConformalMetric, z: Complex) -> Result<HyperbolicPoint3> {
    let jet = metric.liouville_jet(z)?;
    Ok(epstein_point_from_jet(z, &jet))
}

/// Epstein point of a bare field without a domain check; used where the
/// domain is implicit (pulled-back fields in the naturality identity).
pub fn epstein_point_unchecked(field: &dyn LiouvilleField, z: Complex) -> HyperbolicPoint3 {
    epstein_point_from_jet(z, &field.jet(z))
}

pub(crate) fn epstein_point_from_jet(z: Complex, jet: &Jet) -> HyperbolicPoint3 {
    let grad = 2.0 * jet.phi_z.conj();
    let e2p = (-2.0 * jet.phi).exp();
    let den = 1.0 + e2p * grad.norm_sqr();
    HyperbolicPoint3 {
        horizontal: z + 2.0 * e2p * grad / den,
        height: 2.0 * (-jet.phi).exp() / den,
    }
}

/// Builds the full frame from the 2-jet.
///
/// `II` in `(x, y)` coordinates is
/// `[[4 phi_zzbar + 4 Re q, -4 Im q], [-4 Im q, 4 phi_zzbar - 4 Re q]]`
/// with `q = phi_zz - phi_z^2`, and `B = e^{-2 phi} II`.
pub fn forms_at_infinity(metric: &ConformalMetric, z: Complex) -> Result<EpsteinFrame> {
    let jet = metric.liouville_jet(z)?;
    let q = jet.phi_zz - jet.phi_z * jet.phi_z;
    let e2p = (2.0 * jet.phi).exp();
    let a = 4.0 * jet.phi_zzbar;
    let ii = [
        [a + 4.0 * q.re, -4.0 * q.im],
        [-4.0 * q.im, a - 4.0 * q.re],
    ];
    let em2p = 1.0 / e2p;
    let b = [
        [em2p * ii[0][0], em2p * ii[0][1]],
        [em2p * ii[1][0], em2p * ii[1][1]],
    ];
    // III = I(B., B.) = e^{2phi} B^T B (B symmetric here)
    let iii = [
        [
            e2p * (b[0][0] * b[0][0] + b[0][1] * b[1][0]),
            e2p * (b[0][0] * b[0][1] + b[0][1] * b[1][1]),
        ],
        [
            e2p * (b[1][0] * b[0][0] + b[1][1] * b[1][0]),
            e2p * (b[1][0] * b[0][1] + b[1][1] * b[1][1]),
        ],
    ];
    let tr_b = b[0][0] + b[1][1];
    let det_b = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let den = 1.0 + tr_b + det_b;
    if den.abs() < 1e-12 * (1.0 + tr_b.abs() + det_b.abs()) {
        return Err(CoreError::DegenerateImmersion(format!("{z}")));
    }
    Ok(EpsteinFrame {
        base: (z.re, z.im),
        surface_point: epstein_point_from_jet(z, &jet),
        i_hat: [[e2p, 0.0], [0.0, e2p]],
        ii_hat: ii,
        iii_hat: iii,
        b_hat: b,
        q: (q.re, q.im),
        mean_curvature: (1.0 - det_b) / den,
    })
}

/// Mean curvature `H = (1 - det B) / (1 + tr B + det B)` of the surface at
/// the image of `z`, with respect to the Epstein normal (the one whose ray
/// ends at `z`).
pub fn mean_curvature_at(metric: &ConformalMetric, z: Complex) -> Result<f64> {
    Ok(forms_at_infinity(metric, z)?.mean_curvature)
}

/// Signed factor converting the area form of `I_hat` to the induced area
/// form on the Epstein surface: `(1/4)(1 + tr B + det B) e^{2 phi}`.
///
/// The sign tracks the orientation of the normal projection; it is negative
/// where the surface is traversed with reversed orientation (for the cusp,
/// below `rho = e^{-sqrt 2}`), and it is exactly this signed density that
/// enters the mean-curvature integrals.
pub fn area_density_induced(metric: &ConformalMetric, z: Complex) -> Result<f64> {
    let f = forms_at_infinity(metric, z)?;
    let tr_b = f.b_hat[0][0] + f.b_hat[1][1];
    let det_b = f.b_hat[0][0] * f.b_hat[1][1] - f.b_hat[0][1] * f.b_hat[1][0];
    Ok(0.25 * (1.0 + tr_b + det_b) * f.i_hat[0][0])
}

/// The metric `e^{2r} g` whose Epstein surface is the `r`-equidistant
/// surface of `Sigma(g)`.
pub fn offset_metric(metric: &ConformalMetric, r: f64) -> ConformalMetric {
    let base = Arc::clone(&metric.field);
    let field: Arc<dyn LiouvilleField> = if base.radial().is_some() {
        Arc::new(RadialScaled {
            base,
            u: Arc::new(move |_| r),
            du: Arc::new(|_| 0.0),
            ddu: Arc::new(|_| 0.0),
        })
    } else {
        Arc::new(ShiftedField { base, shift: r })
    };
    ConformalMetric::new(metric.domain, field)
}

struct ShiftedField {
    base: Arc<dyn LiouvilleField>,
    shift: f64,
}

impl LiouvilleField for ShiftedField {
    fn phi(&self, z: Complex) -> f64 {
        self.base.phi(z) + self.shift
    }
    fn jet(&self, z: Complex) -> Jet {
        let mut jet = self.base.jet(z);
        jet.phi += self.shift;
        jet
    }
    fn mode(&self) -> crate::field::DerivativeMode {
        self.base.mode()
    }
}

/// Point of the `r`-equidistant surface over `z`: the Epstein point of the
/// rescaled metric `e^{2r} g`.
pub fn equidistant_offset(metric: &ConformalMetric, z: Complex, r: f64) -> Result<HyperbolicPoint3> {
    epstein_point(&offset_metric(metric, r), z)
}

/// Horosphere membership defect of the surface point: distance of the point
/// from the sphere of euclidean radius `e^{-phi(z)}` tangent to `C` at `z`.
/// Zero (to rounding) by construction; exposed for the tangency check.
pub fn horosphere_defect(metric: &ConformalMetric, z: Complex) -> Result<f64> {
    let jet = metric.liouville_jet(z)?;
    let p = epstein_point_from_jet(z, &jet);
    let r = (-jet.phi).exp();
    let dz = (p.horizontal - z).norm_sqr();
    let dt = p.height - r;
    Ok(((dz + dt * dt).sqrt() - r).abs())
}

/// Flat-metric sanity constructor: `phi = c` on an annulus.
pub fn flat_metric(rho1: f64, rho2: f64, c: f64) -> Result<ConformalMetric> {
    Ok(ConformalMetric::new(
        crate::field::Domain::annulus(rho1, rho2)?,
        Arc::new(ConstField(c)),
    ))
}

//! Conformal metrics `g = e^{2 phi} |dz|^2` on annular domains: Liouville
//! fields with analytic or finite-difference 2-jets, and a log-radius fast
//! path for rotationally symmetric fields.
//!
//! Rotationally symmetric fields are described by the scale-invariant pair
//! `S(l) = rho * e^{phi}` (induced circumference over `2 pi`) and
//! `P(l) = rho * phi'(rho) = d phi / d l` at log-radius `l = log rho`.
//! Working in `l` keeps the deep thin parts of cusps and tubes (where
//! `rho` underflows) exactly representable.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::halfspace::{polar, Complex};
use crate::{CoreError, Result};

/// 2-jet of a Liouville field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub phi: f64,
    pub phi_z: Complex,
    pub phi_zz: Complex,
    pub phi_zzbar: f64,
}

/// Scale-invariant radial data at log-radius `l`.
pub trait RadialProfile: Send + Sync {
    /// `log S(l)` with `S = rho e^{phi(rho)}`.
    fn log_s(&self, l: f64) -> f64;
    /// `P(l) = d phi / d l`.
    fn p(&self, l: f64) -> f64;
    /// `dP/dl`.
    fn dp(&self, l: f64) -> f64;

    fn s(&self, l: f64) -> f64 {
        self.log_s(l).exp()
    }
    /// `phi(rho)` recovered from `log S - l`.
    fn phi(&self, l: f64) -> f64 {
        self.log_s(l) - l
    }
}

/// How second derivatives of a general field are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// A Liouville field: evaluator plus 2-jet, with an optional radial profile.
pub trait LiouvilleField: Send + Sync {
    fn phi(&self, z: Complex) -> f64;
    fn jet(&self, z: Complex) -> Jet;
    fn radial(&self) -> Option<&dyn RadialProfile> {
        None
    }
    fn mode(&self) -> DerivativeMode {
        DerivativeMode::Analytic
    }
}

/// Central-difference step `h = max(1e-5, 1e-7 |z|)`: balances truncation
/// and cancellation for the log-singular fields near the puncture.
pub fn fd_step(z: Complex) -> f64 {
    (1e-7 * z.norm()).max(1e-5)
}

/// 2-jet by second-order central differences of `phi` alone.
pub fn fd_jet(phi: &dyn Fn(Complex) -> f64, z: Complex) -> Jet {
    let h = fd_step(z);
    let ex = Complex::new(h, 0.0);
    let ey = Complex::new(0.0, h);
    let f0 = phi(z);
    let fpx = phi(z + ex);
    let fmx = phi(z - ex);
    let fpy = phi(z + ey);
    let fmy = phi(z - ey);
    let phi_x = (fpx - fmx) / (2.0 * h);
    let phi_y = (fpy - fmy) / (2.0 * h);
    let phi_xx = (fpx - 2.0 * f0 + fmx) / (h * h);
    let phi_yy = (fpy - 2.0 * f0 + fmy) / (h * h);
    let phi_xy = (phi(z + ex + ey) - phi(z + ex - ey) - phi(z - ex + ey) + phi(z - ex - ey))
        / (4.0 * h * h);
    Jet {
        phi: f0,
        phi_z: Complex::new(phi_x, -phi_y) * 0.5,
        phi_zz: Complex::new(phi_xx - phi_yy, -2.0 * phi_xy) * 0.25,
        phi_zzbar: 0.25 * (phi_xx + phi_yy),
    }
}

/// Jet of a radial profile at `z` from `(P, P')`:
/// `phi_z = P/(2z)`, `phi_zz = (P' - 2P)/(4 z^2)`, `phi_zzbar = P'/(4|z|^2)`.
pub fn radial_jet(r: &dyn RadialProfile, z: Complex) -> Jet {
    let l = z.norm().ln();
    let p = r.p(l);
    let dp = r.dp(l);
    let z2 = z * z;
    Jet {
        phi: r.phi(l),
        phi_z: 0.5 * p / z,
        phi_zz: (dp - 2.0 * p) / (4.0 * z2),
        phi_zzbar: dp / (4.0 * z.norm_sqr()),
    }
}

// ---------------------------------------------------------------------------
// concrete fields

/// Hyperbolic cusp `1/(rho^2 log^2 rho) |dz|^2` on the punctured disk.
#[derive(Debug, Clone, Copy, Default)]
pub struct CuspField;

impl RadialProfile for CuspField {
    fn log_s(&self, l: f64) -> f64 {
        // S = 1/|l| on 0 < rho < 1 (l < 0)
        -(-l).ln()
    }
    fn p(&self, l: f64) -> f64 {
        -(l + 1.0) / l
    }
    fn dp(&self, l: f64) -> f64 {
        1.0 / (l * l)
    }
}

impl LiouvilleField for CuspField {
    fn phi(&self, z: Complex) -> f64 {
        let rho = z.norm();
        -(rho * rho.ln().abs()).ln()
    }
    fn jet(&self, z: Complex) -> Jet {
        radial_jet(self, z)
    }
    fn radial(&self) -> Option<&dyn RadialProfile> {
        Some(self)
    }
}

/// Push-forward tube metric `l^2 / (4 pi^2 rho^2 sin^2((l/2pi) log rho)) |dz|^2`.
#[derive(Debug, Clone, Copy)]
pub struct TubeField {
    /// `a = ell / (2 pi)`.
    pub a: f64,
}

impl TubeField {
    pub fn new(ell: f64) -> Result<Self> {
        if !(ell > 0.0) {
            return Err(CoreError::Validation("core length ell must be > 0".into()));
        }
        Ok(Self { a: ell / (2.0 * PI) })
    }
}

impl RadialProfile for TubeField {
    fn log_s(&self, l: f64) -> f64 {
        self.a.ln() - (self.a * l).sin().abs().ln()
    }
    fn p(&self, l: f64) -> f64 {
        -1.0 - self.a / (self.a * l).tan()
    }
    fn dp(&self, l: f64) -> f64 {
        let s = (self.a * l).sin();
        self.a * self.a / (s * s)
    }
}

impl LiouvilleField for TubeField {
    fn phi(&self, z: Complex) -> f64 {
        RadialProfile::phi(self, z.norm().ln())
    }
    fn jet(&self, z: Complex) -> Jet {
        radial_jet(self, z)
    }
    fn radial(&self) -> Option<&dyn RadialProfile> {
        Some(self)
    }
}

/// Constant field `phi = c` (flat metric `e^{2c} |dz|^2`).
#[derive(Debug, Clone, Copy)]
pub struct ConstField(pub f64);

impl RadialProfile for ConstField {
    fn log_s(&self, l: f64) -> f64 {
        l + self.0
    }
    fn p(&self, _l: f64) -> f64 {
        0.0
    }
    fn dp(&self, _l: f64) -> f64 {
        0.0
    }
}

impl LiouvilleField for ConstField {
    fn phi(&self, _z: Complex) -> f64 {
        self.0
    }
    fn jet(&self, _z: Complex) -> Jet {
        Jet {
            phi: self.0,
            phi_z: Complex::new(0.0, 0.0),
            phi_zz: Complex::new(0.0, 0.0),
            phi_zzbar: 0.0,
        }
    }
    fn radial(&self) -> Option<&dyn RadialProfile> {
        Some(self)
    }
}

/// Radial conformal rescaling `e^{2u} g` of a radial base field, with
/// `u` given in log-radius together with its first two derivatives.
pub struct RadialScaled {
    pub base: Arc<dyn LiouvilleField>,
    pub u: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub du: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub ddu: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadialProfile for RadialScaled {
    fn log_s(&self, l: f64) -> f64 {
        self.base.radial().expect("radial base").log_s(l) + (self.u)(l)
    }
    fn p(&self, l: f64) -> f64 {
        self.base.radial().expect("radial base").p(l) + (self.du)(l)
    }
    fn dp(&self, l: f64) -> f64 {
        self.base.radial().expect("radial base").dp(l) + (self.ddu)(l)
    }
}

impl LiouvilleField for RadialScaled {
    fn phi(&self, z: Complex) -> f64 {
        self.base.phi(z) + (self.u)(z.norm().ln())
    }
    fn jet(&self, z: Complex) -> Jet {
        radial_jet(self, z)
    }
    fn radial(&self) -> Option<&dyn RadialProfile> {
        Some(self)
    }
}

/// Holomorphic function with its first two derivatives, used for cusp
/// perturbations and pulled-back fields.
#[derive(Clone)]
pub struct Holomorphic {
    pub f: Arc<dyn Fn(Complex) -> Complex + Send + Sync>,
    pub df: Arc<dyn Fn(Complex) -> Complex + Send + Sync>,
    pub ddf: Arc<dyn Fn(Complex) -> Complex + Send + Sync>,
}

impl Holomorphic {
    pub fn linear(a: Complex) -> Self {
        Self {
            f: Arc::new(move |z| a * z),
            df: Arc::new(move |_| a),
            ddf: Arc::new(|_| Complex::new(0.0, 0.0)),
        }
    }
}

/// Field `phi(z) = base(f^{-1}... )` pulled back through a Moebius map:
/// `(f^* phi)(w) = phi(f(w)) + log |f'(w)|`, the transformation rule that
/// makes the Epstein map natural.
pub struct PulledBack {
    pub base: Arc<dyn LiouvilleField>,
    pub map: crate::halfspace::MoebiusMap,
}

impl LiouvilleField for PulledBack {
    fn phi(&self, w: Complex) -> f64 {
        let z = self.map.apply(w).finite().expect("pulled-back field away from the pole");
        let df = self.map.derivative(w).expect("derivative away from the pole");
        self.base.phi(z) + df.norm().ln()
    }
    fn jet(&self, w: Complex) -> Jet {
        let z = self.map.apply(w).finite().expect("pulled-back field away from the pole");
        let df = self.map.derivative(w).expect("derivative away from the pole");
        let ddf = self.map.second_derivative(w).expect("derivative away from the pole");
        let base = self.base.jet(z);
        // log-derivative of the conformal factor: (log f')' = f''/f'
        let lg = ddf / df;
        // d/dw (f''/f') for a Moebius map: f'''/f' - (f''/f')^2 = (1/2)(f''/f')^2
        // since the Schwarzian of a Moebius map vanishes.
        let dlg = 0.5 * lg * lg;
        Jet {
            phi: base.phi + df.norm().ln(),
            phi_z: base.phi_z * df + 0.5 * lg,
            phi_zz: base.phi_zz * df * df + base.phi_z * ddf + 0.5 * dlg,
            phi_zzbar: base.phi_zzbar * df.norm_sqr(),
        }
    }
}

/// General cusp `e^{2 nu} I_0` induced by a holomorphic coordinate change
/// `w = z e^{psi(z)}` with `psi(0) = 0`:
/// `nu(z) = log( |1 + z psi'(z)| / (1 + Re psi(z) / log |z|) )`.
pub struct PerturbedCuspField {
    pub psi: Holomorphic,
}

impl PerturbedCuspField {
    pub fn nu(&self, z: Complex) -> f64 {
        let psi = (self.psi.f)(z);
        let dpsi = (self.psi.df)(z);
        let num = (Complex::new(1.0, 0.0) + z * dpsi).norm();
        let den = 1.0 + psi.re / z.norm().ln();
        (num / den).ln()
    }

    /// Euclidean gradient of `nu` as a complex number `(nu_x, nu_y)`, from
    /// the holomorphic data: with `F = 1 + z psi'` and `L = log |z|`,
    /// `grad log|F| = conj(F'/F)` and
    /// `grad (Re psi / L) = conj(psi')/L - Re(psi) z / (|z|^2 L^2)`.
    pub fn nu_grad(&self, z: Complex) -> Complex {
        let psi = (self.psi.f)(z);
        let dpsi = (self.psi.df)(z);
        let ddpsi = (self.psi.ddf)(z);
        let f = Complex::new(1.0, 0.0) + z * dpsi;
        let df = dpsi + z * ddpsi;
        let l = z.norm().ln();
        let g = 1.0 + psi.re / l;
        let grad_g = dpsi.conj() / l - psi.re * z / (z.norm_sqr() * l * l);
        (df / f).conj() - grad_g / g
    }
}

impl LiouvilleField for PerturbedCuspField {
    fn phi(&self, z: Complex) -> f64 {
        LiouvilleField::phi(&CuspField, z) + self.nu(z)
    }
    fn jet(&self, z: Complex) -> Jet {
        // nu is smooth but not radial; differentiate it numerically on top
        // of the exact cusp jet.
        let cusp = CuspField.jet(z);
        let nu = fd_jet(&|w| self.nu(w), z);
        Jet {
            phi: cusp.phi + nu.phi,
            phi_z: cusp.phi_z + nu.phi_z,
            phi_zz: cusp.phi_zz + nu.phi_zz,
            phi_zzbar: cusp.phi_zzbar + nu.phi_zzbar,
        }
    }
    fn mode(&self) -> DerivativeMode {
        DerivativeMode::FiniteDifference
    }
}

/// Field defined by a bare `phi` evaluator; the 2-jet comes from central
/// finite differences with step `fd_step`.
pub struct FiniteDiffField {
    pub eval: Arc<dyn Fn(Complex) -> f64 + Send + Sync>,
}

impl LiouvilleField for FiniteDiffField {
    fn phi(&self, z: Complex) -> f64 {
        (self.eval)(z)
    }
    fn jet(&self, z: Complex) -> Jet {
        fd_jet(&|w| (self.eval)(w), z)
    }
    fn mode(&self) -> DerivativeMode {
        DerivativeMode::FiniteDifference
    }
}

// ---------------------------------------------------------------------------
// domains and the metric bundle

/// Supported domain shapes: round annuli about a center (stored in
/// log-radius so that the deep thin parts of tubes stay representable),
/// and half-plane sectors in polar coordinates (used by the norm
/// computations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `log_rho1 <= log |z - center| <= log_rho2`.
    Annulus {
        center: Complex,
        log_rho1: f64,
        log_rho2: f64,
    },
    /// `r1 <= |z| <= r2`, `theta_a <= arg z <= theta_b` in the upper half plane.
    HalfPlaneSector {
        r1: f64,
        r2: f64,
        theta_a: f64,
        theta_b: f64,
    },
}

impl Domain {
    pub fn annulus(rho1: f64, rho2: f64) -> Result<Self> {
        if !(0.0 < rho1 && rho1 <= rho2 && rho2.is_finite()) {
            return Err(CoreError::Validation(format!(
                "annulus needs 0 < rho1 <= rho2, got ({rho1}, {rho2})"
            )));
        }
        Ok(Domain::Annulus {
            center: Complex::new(0.0, 0.0),
            log_rho1: rho1.ln(),
            log_rho2: rho2.ln(),
        })
    }

    /// Annulus about the origin given by log-radii.
    pub fn log_annulus(log_rho1: f64, log_rho2: f64) -> Result<Self> {
        if !(log_rho1 <= log_rho2) || !log_rho1.is_finite() || !log_rho2.is_finite() {
            return Err(CoreError::Validation(format!(
                "log-annulus needs finite log_rho1 <= log_rho2, got ({log_rho1}, {log_rho2})"
            )));
        }
        Ok(Domain::Annulus {
            center: Complex::new(0.0, 0.0),
            log_rho1,
            log_rho2,
        })
    }

    pub fn contains(&self, z: Complex) -> bool {
        match *self {
            Domain::Annulus {
                center,
                log_rho1,
                log_rho2,
            } => {
                let l = (z - center).norm().ln();
                log_rho1 <= l && l <= log_rho2
            }
            Domain::HalfPlaneSector {
                r1,
                r2,
                theta_a,
                theta_b,
            } => {
                let (r, th) = polar(z);
                r1 <= r && r <= r2 && theta_a <= th && th <= theta_b
            }
        }
    }
}

/// A conformal metric: a domain plus a Liouville field.
pub struct ConformalMetric {
    pub domain: Domain,
    pub field: Arc<dyn LiouvilleField>,
}

impl ConformalMetric {
    pub fn new(domain: Domain, field: Arc<dyn LiouvilleField>) -> Self {
        Self { domain, field }
    }

    pub fn cusp_annulus(rho1: f64, rho2: f64) -> Result<Self> {
        if rho2 >= 1.0 {
            return Err(CoreError::Validation(
                "cusp metric lives on the punctured unit disk".into(),
            ));
        }
        Ok(Self::new(Domain::annulus(rho1, rho2)?, Arc::new(CuspField)))
    }

    fn check_inside(&self, z: Complex) -> Result<()> {
        if self.domain.contains(z) {
            Ok(())
        } else {
            Err(CoreError::OutsideDomain(format!("{z}")))
        }
    }

    /// The 2-jet `(phi, phi_z, phi_zz, phi_zzbar)` at `z`.
    ///
    /// In finite-difference mode the caller must stay `>= 2h` away from the
    /// domain boundary; that margin is checked here.
    pub fn liouville_jet(&self, z: Complex) -> Result<Jet> {
        self.check_inside(z)?;
        if self.field.mode() == DerivativeMode::FiniteDifference {
            let h = fd_step(z);
            if let Domain::Annulus {
                center,
                log_rho1,
                log_rho2,
            } = self.domain
            {
                let r = (z - center).norm();
                if (r - 2.0 * h).ln() < log_rho1 || (r + 2.0 * h).ln() > log_rho2 {
                    return Err(CoreError::OutsideDomain(format!(
                        "{z} is within 2h of the domain boundary (finite-difference mode)"
                    )));
                }
            }
        }
        Ok(self.field.jet(z))
    }

    /// Gaussian curvature `K = -4 phi_zzbar e^{-2 phi}`.
    pub fn gaussian_curvature(&self, z: Complex) -> Result<f64> {
        let jet = self.liouville_jet(z)?;
        Ok(-4.0 * jet.phi_zzbar * (-2.0 * jet.phi).exp())
    }

    /// Cross-check the analytic jet against finite differences on a small
    /// sample grid; used to validate analytic callbacks on construction.
    pub fn validate_jets(&self, samples: &[Complex], tol: f64) -> Result<()> {
        for &z in samples {
            let a = self.field.jet(z);
            let f = fd_jet(&|w| self.field.phi(w), z);
            let scale = 1.0 + a.phi_z.norm() + a.phi_zz.norm() + a.phi_zzbar.abs();
            let err = (a.phi_z - f.phi_z).norm()
                + (a.phi_zz - f.phi_zz).norm()
                + (a.phi_zzbar - f.phi_zzbar).abs();
            if err > tol * scale {
                return Err(CoreError::Validation(format!(
                    "analytic jet disagrees with finite differences at {z}: err {err:.3e}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_phi_zzbar_value() {
        // phi_zzbar = 1/(4 |z|^2 log^2 |z|) = e^2/4 at rho = e^{-1}
        let z = Complex::new((-1.0f64).exp(), 0.0);
        let jet = CuspField.jet(z);
        assert!((jet.phi_zzbar - (2.0f64).exp() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn fd_jet_matches_analytic_on_cusp() {
        let z = Complex::new(0.11, 0.07);
        let a = CuspField.jet(z);
        let f = fd_jet(&|w| LiouvilleField::phi(&CuspField, w), z);
        assert!((a.phi_z - f.phi_z).norm() < 1e-6);
        assert!((a.phi_zz - f.phi_zz).norm() < 1e-4);
        assert!((a.phi_zzbar - f.phi_zzbar).abs() < 1e-4);
    }

    #[test]
    fn curvature_of_cusp_is_minus_one() {
        let m = ConformalMetric::cusp_annulus(0.01, 0.2).unwrap();
        for &x in &[0.02, 0.05, 0.1, 0.18] {
            let k = m.gaussian_curvature(Complex::new(x, 0.0)).unwrap();
            assert!((k + 1.0).abs() < 1e-12, "K = {k}");
        }
    }
}

//! Upper half-space model of hyperbolic 3-space and Moebius transformations
//! with their Poincare extension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Complex coordinate on the boundary plane `C` of the upper half-space.
pub type Complex = Complex64;

/// Polar radius and angle of a nonzero complex number, with the angle
/// normalized to `[0, 2*pi)`.
pub fn polar(z: Complex) -> (f64, f64) {
    let rho = z.norm();
    let mut theta = z.arg();
    if theta < 0.0 {
        theta += 2.0 * std::f64::consts::PI;
    }
    (rho, theta)
}

/// Point of `H^3` in upper half-space coordinates `(z, t)`, `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPoint3 {
    pub horizontal: Complex,
    pub height: f64,
}

impl HyperbolicPoint3 {
    pub fn new(horizontal: Complex, height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() || !horizontal.is_finite() {
            return Err(CoreError::Validation(format!(
                "half-space point needs finite coordinates and height > 0, got ({horizontal}, {height})"
            )));
        }
        Ok(Self { horizontal, height })
    }

    /// Euclidean distance from the vertical axis through the origin.
    pub fn axis_distance(&self) -> f64 {
        self.horizontal.norm()
    }
}

/// Hyperbolic distance via `cosh d = 1 + (|z_p - z_q|^2 + (t_p - t_q)^2) / (2 t_p t_q)`.
pub fn hyp_distance(p: HyperbolicPoint3, q: HyperbolicPoint3) -> f64 {
    let dz2 = (p.horizontal - q.horizontal).norm_sqr();
    let dt = p.height - q.height;
    let arg = 1.0 + (dz2 + dt * dt) / (2.0 * p.height * q.height);
    // guard against rounding below 1 for coincident points
    arg.max(1.0).acosh()
}

/// Image of a boundary point under a Moebius map; poles go to the explicit
/// infinity variant, never to large floats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MoebiusImage {
    Finite(Complex),
    Infinity,
}

impl MoebiusImage {
    pub fn finite(self) -> Option<Complex> {
        match self {
            MoebiusImage::Finite(z) => Some(z),
            MoebiusImage::Infinity => None,
        }
    }
}

/// Moebius transformation `z -> (az + b)/(cz + d)`, normalized so that
/// `ad - bc = 1` on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl MoebiusMap {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(CoreError::Validation(
                "Moebius map needs ad - bc != 0".into(),
            ));
        }
        let k = det.sqrt().inv();
        Ok(Self {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex::new(1.0, 0.0),
            b: Complex::new(0.0, 0.0),
            c: Complex::new(0.0, 0.0),
            d: Complex::new(1.0, 0.0),
        }
    }

    /// Dilation `z -> k z` for real `k > 0`.
    pub fn dilation(k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(CoreError::Validation("dilation factor must be > 0".into()));
        }
        Self::new(
            Complex::new(k, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        )
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Composition `self . rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &MoebiusMap) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Boundary action on `C ⊂ CP^1`.
    pub fn apply(&self, z: Complex) -> MoebiusImage {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return MoebiusImage::Infinity;
        }
        MoebiusImage::Finite((self.a * z + self.b) / den)
    }

    /// Derivative `1/(cz + d)^2` of the boundary action (unit determinant).
    pub fn derivative(&self, z: Complex) -> Result<Complex> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Err(CoreError::Validation("derivative at a pole".into()));
        }
        Ok((den * den).inv())
    }

    /// Second derivative `-2c/(cz + d)^3` of the boundary action.
    pub fn second_derivative(&self, z: Complex) -> Result<Complex> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return Err(CoreError::Validation("derivative at a pole".into()));
        }
        Ok(-2.0 * self.c / (den * den * den))
    }

    /// Poincare extension to the upper half-space; an isometry of `H^3`.
    ///
    /// With `ad - bc = 1` the extension of `(z, t)` is
    /// `( (az + b) conj(cz + d) + a conj(c) t^2, t ) / (|cz + d|^2 + |c|^2 t^2)`.
    pub fn extend(&self, p: HyperbolicPoint3) -> HyperbolicPoint3 {
        let z = p.horizontal;
        let t = p.height;
        let den = (self.c * z + self.d).norm_sqr() + self.c.norm_sqr() * t * t;
        let num =
            (self.a * z + self.b) * (self.c * z + self.d).conj() + self.a * self.c.conj() * t * t;
        HyperbolicPoint3 {
            horizontal: num / den,
            height: t / den,
        }
    }
}

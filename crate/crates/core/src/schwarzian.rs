//! Schwarzian derivative of locally injective holomorphic maps:
//! `S(f) = f'''/f' - (3/2)(f''/f')^2`, the operator whose kernel is exactly
//! the Moebius maps.

use crate::halfspace::{Complex, MoebiusMap};
use crate::{CoreError, Result};

/// Derivatives `f'`, `f''`, `f'''` of a black-box holomorphic function by
/// trapezoidal (spectrally accurate) Cauchy-circle differentiation on `m`
/// points of radius `h` around `z`.
pub fn cauchy_derivatives(
    f: &dyn Fn(Complex) -> Complex,
    z: Complex,
    h: f64,
    m: usize,
) -> [Complex; 3] {
    let mut sums = [Complex::new(0.0, 0.0); 3];
    for j in 0..m {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let w = Complex::from_polar(1.0, theta);
        let fw = f(z + h * w);
        // f^(k)(z) = k!/(m h^k) sum f(z + h w_j) w_j^{-k}
        let mut wk = w;
        for s in sums.iter_mut() {
            *s += fw / wk;
            wk *= w;
        }
    }
    let m = m as f64;
    [
        sums[0] / (m * h),
        sums[1] * 2.0 / (m * h * h),
        sums[2] * 6.0 / (m * h * h * h),
    ]
}

/// Numerical Schwarzian of a black-box holomorphic map at `z`, using a
/// differentiation circle of radius `scale * |z|` (the map must be analytic
/// on that disk).
pub fn schwarzian_numeric(
    f: &dyn Fn(Complex) -> Complex,
    z: Complex,
    scale: f64,
) -> Result<Complex> {
    schwarzian_numeric_with_radius(f, z, scale * z.norm().max(1e-3))
}

/// As [`schwarzian_numeric`] with an explicit circle radius `h`; pick `h`
/// as large as analyticity allows, since roundoff in `f'''` grows like
/// `eps / h^3`.
pub fn schwarzian_numeric_with_radius(
    f: &dyn Fn(Complex) -> Complex,
    z: Complex,
    h: f64,
) -> Result<Complex> {
    let [d1, d2, d3] = cauchy_derivatives(f, z, h, 32);
    if d1.norm() < 1e-300 {
        return Err(CoreError::Validation(
            "Schwarzian needs a locally injective map (f' = 0)".into(),
        ));
    }
    let r = d2 / d1;
    Ok(d3 / d1 - 1.5 * r * r)
}

/// Schwarzian of the boundary action of a Moebius map; identically zero,
/// provided as the closed-form counterpart for the vanishing check.
pub fn schwarzian_of_moebius(_m: &MoebiusMap, _z: Complex) -> Complex {
    Complex::new(0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_derivatives_of_exp() {
        let z = Complex::new(0.3, -0.2);
        let d = cauchy_derivatives(&|w| w.exp(), z, 0.1, 32);
        for k in 0..3 {
            // roundoff grows like eps/h^k; 0.1^3 leaves ~1e-12 headroom
            assert!((d[k] - z.exp()).norm() < 1e-10, "order {k}");
        }
    }

    #[test]
    fn schwarzian_of_moebius_vanishes_numerically() {
        let m = MoebiusMap::new(
            Complex::new(2.0, 1.0),
            Complex::new(0.0, -1.0),
            Complex::new(0.5, 0.0),
            Complex::new(1.0, 0.3),
        )
        .unwrap();
        let z = Complex::new(0.8, 0.4);
        let s = schwarzian_numeric(&|w| m.apply(w).finite().unwrap(), z, 0.05).unwrap();
        assert!(s.norm() < 1e-11, "|S| = {}", s.norm());
    }
}

//! Epstein map: closed-form cross-checks, tangency, offsets, naturality,
//! and the finite-difference shape-operator oracle.

use std::sync::Arc;

use renvol_core::cusp::{cusp_epstein_coords, flip_radius};
use renvol_core::epstein::{
    area_density_induced, epstein_point, epstein_point_unchecked, equidistant_offset,
    forms_at_infinity, horosphere_defect, mean_curvature_at, offset_metric,
};
use renvol_core::field::{CuspField, Domain, PulledBack};
use renvol_core::tube::TubeSpec;
use renvol_core::{hyp_distance, Complex, ConformalMetric, MoebiusMap};

#[test]
fn cusp_surface_matches_closed_form_coordinates() {
    let m = ConformalMetric::cusp_annulus(1e-6, flip_radius() * 0.999).unwrap();
    for k in 0..40 {
        let rho = 1e-6 * (flip_radius() * 0.99 / 1e-6).powf(k as f64 / 39.0);
        let theta = 0.37 * k as f64;
        let z = Complex::from_polar(rho, theta);
        let p = epstein_point(&m, z).unwrap();
        let (r0, flip, t0) = cusp_epstein_coords(rho).unwrap();
        assert!(
            (p.horizontal.norm() - r0).abs() <= 1e-12 * (1.0 + r0),
            "radius mismatch at rho = {rho}"
        );
        assert!((p.height - t0).abs() <= 1e-12 * t0);
        // angular flip: image sits at theta + pi below the flip radius
        let expected_angle = if flip { theta + std::f64::consts::PI } else { theta };
        let diff = (p.horizontal.arg() - expected_angle).rem_euclid(2.0 * std::f64::consts::PI);
        assert!(diff.min(2.0 * std::f64::consts::PI - diff) < 1e-9, "angle at rho = {rho}");
    }
}

#[test]
fn tangency_to_the_defining_horospheres() {
    let m = ConformalMetric::cusp_annulus(0.005, 0.2).unwrap();
    for k in 0..25 {
        let rho = 0.005 * (0.2f64 / 0.005).powf(k as f64 / 24.0);
        let d = horosphere_defect(&m, Complex::from_polar(rho, 1.1 * k as f64)).unwrap();
        assert!(d < 1e-10, "defect {d} at rho {rho}");
    }
}

#[test]
fn offset_coherence() {
    // offset by r + s equals offsetting the r-shifted metric by s
    let m = ConformalMetric::cusp_annulus(0.01, 0.2).unwrap();
    let z = Complex::from_polar(0.07, 0.4);
    let a = equidistant_offset(&m, z, 0.9).unwrap();
    let shifted = offset_metric(&m, 0.5);
    let b = equidistant_offset(&shifted, z, 0.4).unwrap();
    assert!((a.horizontal - b.horizontal).norm() < 1e-14);
    assert!((a.height - b.height).abs() < 1e-14);
    // r = 0 is the surface itself
    let c = equidistant_offset(&m, z, 0.0).unwrap();
    let p = epstein_point(&m, z).unwrap();
    assert_eq!(c, p);
    // offset distance along the normal equals r
    for &r in &[0.5, 1.0, 2.0] {
        let q = equidistant_offset(&m, z, r).unwrap();
        assert!((hyp_distance(p, q) - r).abs() < 1e-9);
    }
}

#[test]
fn moebius_naturality_pointwise() {
    let m = ConformalMetric::cusp_annulus(0.02, 0.2).unwrap();
    let f = MoebiusMap::new(
        Complex::new(1.1, 0.05),
        Complex::new(0.02, -0.04),
        Complex::new(0.1, 0.08),
        Complex::new(0.95, -0.03),
    )
    .unwrap();
    for k in 0..10 {
        let z = Complex::from_polar(0.04 + 0.012 * k as f64, 0.6 * k as f64);
        let w = f.inverse().apply(z).finite().unwrap();
        let lhs = epstein_point(&m, z).unwrap();
        let pulled = PulledBack {
            base: Arc::new(CuspField),
            map: f,
        };
        let rhs = f.extend(epstein_point_unchecked(&pulled, w));
        assert!(hyp_distance(lhs, rhs) < 1e-11, "defect at sample {k}");
    }
}

/// Finite-difference shape-operator oracle: embed the surface numerically,
/// take the euclidean second fundamental form by central differences, and
/// convert to the hyperbolic mean curvature via the conformal relation
/// `H_hyp = t H_euc + nu_t` (sign calibrated on the flat model where the
/// surface is a horizontal plane with H = 1).
fn mean_curvature_fd_oracle(metric: &ConformalMetric, z: Complex) -> f64 {
    let h = 1e-5 * z.norm().max(1e-3);
    let p = |w: Complex| epstein_point(metric, w).unwrap();
    let at = |w: Complex| {
        let q = p(w);
        [q.horizontal.re, q.horizontal.im, q.height]
    };
    let ex = Complex::new(h, 0.0);
    let ey = Complex::new(0.0, h);
    let x0 = at(z);
    let xu = diff(at(z + ex), at(z - ex), 2.0 * h);
    let xv = diff(at(z + ey), at(z - ey), 2.0 * h);
    let xuu = second(at(z + ex), x0, at(z - ex), h);
    let xvv = second(at(z + ey), x0, at(z - ey), h);
    let xuv = cross_second(at(z + ex + ey), at(z + ex - ey), at(z - ex + ey), at(z - ex - ey), h);
    // euclidean normal, oriented so that the geodesic ray it spans ends at
    // the parameter point z (the Epstein normal convention): the ideal
    // endpoint of the ray from (w, t) in unit direction n is
    // w + t n_h (n_t + 1)/|n_h|^2
    let mut n = [
        xu[1] * xv[2] - xu[2] * xv[1],
        xu[2] * xv[0] - xu[0] * xv[2],
        xu[0] * xv[1] - xu[1] * xv[0],
    ];
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    for c in &mut n {
        *c /= norm;
    }
    let endpoint = |n: &[f64; 3]| {
        let nh = Complex::new(n[0], n[1]);
        let w = Complex::new(x0[0], x0[1]);
        if nh.norm() < 1e-14 {
            if n[2] < 0.0 {
                w
            } else {
                Complex::new(f64::INFINITY, f64::INFINITY)
            }
        } else {
            w + x0[2] * nh * (n[2] + 1.0) / nh.norm_sqr()
        }
    };
    let flipped = [-n[0], -n[1], -n[2]];
    if (endpoint(&flipped) - z).norm() < (endpoint(&n) - z).norm() {
        n = flipped;
    }
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let (e, ff, g) = (dot(&xu, &xu), dot(&xu, &xv), dot(&xv, &xv));
    let (l, mm, nn) = (dot(&xuu, &n), dot(&xuv, &n), dot(&xvv, &n));
    let h_euc = (e * nn - 2.0 * ff * mm + g * l) / (2.0 * (e * g - ff * ff));
    // conformal change t^{-2} * euclidean: H_hyp = -(t H_euc + n_t) in the
    // frame convention, calibrated on the geodesic hemisphere (H = 0) and
    // the flat model (plane t = 2, n = (0,0,-1), H = 1)
    -(x0[2] * h_euc + n[2])
}

fn diff(a: [f64; 3], b: [f64; 3], d: f64) -> [f64; 3] {
    [(a[0] - b[0]) / d, (a[1] - b[1]) / d, (a[2] - b[2]) / d]
}

fn second(p: [f64; 3], c: [f64; 3], m: [f64; 3], h: f64) -> [f64; 3] {
    [
        (p[0] - 2.0 * c[0] + m[0]) / (h * h),
        (p[1] - 2.0 * c[1] + m[1]) / (h * h),
        (p[2] - 2.0 * c[2] + m[2]) / (h * h),
    ]
}

fn cross_second(pp: [f64; 3], pm: [f64; 3], mp: [f64; 3], mm: [f64; 3], h: f64) -> [f64; 3] {
    [
        (pp[0] - pm[0] - mp[0] + mm[0]) / (4.0 * h * h),
        (pp[1] - pm[1] - mp[1] + mm[1]) / (4.0 * h * h),
        (pp[2] - pm[2] - mp[2] + mm[2]) / (4.0 * h * h),
    ]
}

#[test]
fn mean_curvature_matches_embedding_oracle() {
    // flat calibration
    let flat = renvol_core::epstein::flat_metric(0.5, 2.0, 0.0).unwrap();
    let z = Complex::new(1.1, 0.2);
    assert!((mean_curvature_fd_oracle(&flat, z) - 1.0).abs() < 1e-6);
    assert!((mean_curvature_at(&flat, z).unwrap() - 1.0).abs() < 1e-14);
    // tube metric at the core circle
    let spec = TubeSpec::new(0.8, 1.4).unwrap();
    let (_, _, l_core) = spec.log_radii();
    let metric = spec.metric().unwrap();
    let zc = Complex::from_polar(l_core.exp(), 0.3);
    let engine = mean_curvature_at(&metric, zc).unwrap();
    let oracle = mean_curvature_fd_oracle(&metric, zc);
    assert!(
        (engine - oracle).abs() < 1e-6 * (1.0 + engine.abs()),
        "engine {engine} vs oracle {oracle}"
    );
    // cusp at a moderate radius
    let cusp = ConformalMetric::cusp_annulus(0.01, 0.23).unwrap();
    let zk = Complex::from_polar(0.1, 2.0);
    let engine = mean_curvature_at(&cusp, zk).unwrap();
    let oracle = mean_curvature_fd_oracle(&cusp, zk);
    assert!((engine - oracle).abs() < 1e-6 * (1.0 + engine.abs()));
}

#[test]
fn area_density_matches_jacobian_pullback() {
    // |signed density| equals the induced hyperbolic area density of the
    // numerically embedded surface
    let m = ConformalMetric::cusp_annulus(0.01, 0.23).unwrap();
    let z = Complex::from_polar((-2.0f64).exp(), 0.9);
    let signed = area_density_induced(&m, z).unwrap();
    // spec value: (1/4)(1 + tr B + det B) / (rho^2 log^2 rho)
    let f = forms_at_infinity(&m, z).unwrap();
    let tr = f.b_hat[0][0] + f.b_hat[1][1];
    let det = f.b_hat[0][0] * f.b_hat[1][1] - f.b_hat[0][1] * f.b_hat[1][0];
    let rho = z.norm();
    let expect = 0.25 * (1.0 + tr + det) / (rho * rho * rho.ln() * rho.ln());
    assert!((signed - expect).abs() < 1e-10 * expect.abs());
    // Jacobian oracle
    let h = 1e-6;
    let p = |w: Complex| epstein_point(&m, w).unwrap();
    let (pp, pm) = (p(z + Complex::new(h, 0.0)), p(z - Complex::new(h, 0.0)));
    let (qp, qm) = (p(z + Complex::new(0.0, h)), p(z - Complex::new(0.0, h)));
    let c = p(z);
    let xu = [
        (pp.horizontal.re - pm.horizontal.re) / (2.0 * h),
        (pp.horizontal.im - pm.horizontal.im) / (2.0 * h),
        (pp.height - pm.height) / (2.0 * h),
    ];
    let xv = [
        (qp.horizontal.re - qm.horizontal.re) / (2.0 * h),
        (qp.horizontal.im - qm.horizontal.im) / (2.0 * h),
        (qp.height - qm.height) / (2.0 * h),
    ];
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let gram = (dot(&xu, &xu) * dot(&xv, &xv) - dot(&xu, &xv).powi(2)).sqrt();
    let density_hyp = gram / (c.height * c.height);
    assert!(
        (signed.abs() - density_hyp).abs() < 1e-4 * density_hyp,
        "signed {signed} vs jacobian {density_hyp}"
    );
}

#[test]
fn offset_metric_convergence_to_i_hat() {
    // 4 e^{-2t} I_t -> I_hat with error decaying like e^{-2t}
    let m = ConformalMetric::cusp_annulus(0.01, 0.23).unwrap();
    let z = Complex::from_polar(0.08, 0.5);
    let jet = m.liouville_jet(z).unwrap();
    let e2p = (2.0 * jet.phi).exp();
    let h = 1e-5;
    let err_at = |t: f64| {
        let shifted = offset_metric(&m, t);
        let p = |w: Complex| epstein_point(&shifted, w).unwrap();
        let (pp, pm) = (p(z + Complex::new(h, 0.0)), p(z - Complex::new(h, 0.0)));
        let (qp, qm) = (p(z + Complex::new(0.0, h)), p(z - Complex::new(0.0, h)));
        let c = p(z);
        let xu = [
            (pp.horizontal.re - pm.horizontal.re) / (2.0 * h),
            (pp.horizontal.im - pm.horizontal.im) / (2.0 * h),
            (pp.height - pm.height) / (2.0 * h),
        ];
        let xv = [
            (qp.horizontal.re - qm.horizontal.re) / (2.0 * h),
            (qp.horizontal.im - qm.horizontal.im) / (2.0 * h),
            (qp.height - qm.height) / (2.0 * h),
        ];
        let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let t2 = c.height * c.height;
        let scale = 4.0 * (-2.0 * t).exp();
        let exx = (scale * dot(&xu, &xu) / t2 - e2p).abs();
        let eyy = (scale * dot(&xv, &xv) / t2 - e2p).abs();
        let exy = (scale * dot(&xu, &xv) / t2).abs();
        (exx + eyy + exy) / e2p
    };
    let (e2, e4, e8) = (err_at(2.0), err_at(4.0), err_at(8.0));
    assert!(e4 < e2 && e8 < e4, "errors {e2:.3e}, {e4:.3e}, {e8:.3e}");
    // fitted decay exponent in t over the first gap (the last is near the
    // finite-difference noise floor)
    let rate = (e2 / e4).ln() / 2.0;
    assert!(
        (rate - 2.0).abs() <= 0.6,
        "decay exponent {rate}, errors {e2:.3e}, {e4:.3e}, {e8:.3e}"
    );
}

#[test]
fn degenerate_immersion_is_an_error_not_a_nan() {
    let m = ConformalMetric::new(
        Domain::annulus(0.1, 0.4).unwrap(),
        std::sync::Arc::new(CuspField),
    );
    // the cusp surface has a principal curvature -1 exactly at e^{-sqrt 2}
    let z = Complex::new(flip_radius(), 0.0);
    match mean_curvature_at(&m, z) {
        Err(renvol_core::CoreError::DegenerateImmersion(_)) => {}
        other => panic!("expected a degenerate-immersion error, got {other:?}"),
    }
}

#[test]
fn offset_point_lies_on_the_normal_geodesic() {
    // geodesic-flow oracle: extend the circle through the surface point and
    // its offset to the ideal boundary; it must land at the parameter point
    let m = ConformalMetric::cusp_annulus(0.01, 0.2).unwrap();
    let rho = 0.07;
    let z = Complex::from_polar(rho, 0.0);
    let p0 = epstein_point(&m, z).unwrap();
    let p1 = equidistant_offset(&m, z, 1.0).unwrap();
    // everything sits in the vertical plane of the real axis; use signed
    // horizontal coordinates
    let (x0, t0) = (p0.horizontal.re, p0.height);
    let (x1, t1) = (p1.horizontal.re, p1.height);
    let c = (x0 * x0 + t0 * t0 - x1 * x1 - t1 * t1) / (2.0 * (x0 - x1));
    let r = ((x0 - c) * (x0 - c) + t0 * t0).sqrt();
    let endpoints = [c - r, c + r];
    let nearest = endpoints
        .iter()
        .map(|e| (e - rho).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(nearest < 1e-9, "ray endpoint misses z by {nearest}");
    assert!((crate_distance(p0, p1) - 1.0).abs() < 1e-9);
}

fn crate_distance(p: renvol_core::HyperbolicPoint3, q: renvol_core::HyperbolicPoint3) -> f64 {
    renvol_core::hyp_distance(p, q)
}

#[test]
#[allow(clippy::needless_range_loop)]
fn third_form_is_b_transpose_b_in_the_metric() {
    let m = ConformalMetric::cusp_annulus(0.01, 0.23).unwrap();
    let f = forms_at_infinity(&m, Complex::from_polar(0.09, 0.7)).unwrap();
    let e2p = f.i_hat[0][0];
    let b = f.b_hat;
    for i in 0..2 {
        for j in 0..2 {
            let expect = e2p * (b[0][i] * b[0][j] + b[1][i] * b[1][j]);
            assert!((f.iii_hat[i][j] - expect).abs() < 1e-10 * (1.0 + expect.abs()));
        }
    }
    // and II = e^{2 phi} B for the symmetric shape operator
    for i in 0..2 {
        for j in 0..2 {
            assert!((f.ii_hat[i][j] - e2p * b[i][j]).abs() < 1e-9 * (1.0 + e2p));
        }
    }
}

//! Foundational geometry: distances, Moebius action, Liouville jets.

use proptest::prelude::*;
use renvol_core::field::{fd_jet, fd_step, LiouvilleField};
use renvol_core::halfspace::polar;
use renvol_core::{hyp_distance, Complex, ConformalMetric, HyperbolicPoint3, MoebiusMap};

fn pt(x: f64, y: f64, t: f64) -> HyperbolicPoint3 {
    HyperbolicPoint3::new(Complex::new(x, y), t).unwrap()
}

/// Independent oracle: arclength of the geodesic between two points in a
/// common vertical plane, integrated along the semicircle orthogonal to
/// the boundary.
fn geodesic_length_oracle(x0: f64, t0: f64, x1: f64, t1: f64) -> f64 {
    // semicircle center c on the axis, radius r: (x - c)^2 + t^2 = r^2
    let c = (x1 * x1 + t1 * t1 - x0 * x0 - t0 * t0) / (2.0 * (x1 - x0));
    let a0 = t0.atan2(x0 - c);
    let a1 = t1.atan2(x1 - c);
    // ds = |dx| / t with |dx| = r dtheta, t = r sin theta
    let n = 20000;
    let mut acc = 0.0;
    for i in 0..n {
        let th = a0 + (a1 - a0) * (i as f64 + 0.5) / n as f64;
        acc += 1.0 / th.sin();
    }
    (acc * (a1 - a0) / n as f64).abs()
}

#[test]
fn distance_between_offset_points_matches_geodesic_integration() {
    let d = hyp_distance(pt(1.0, 0.0, 1.0), pt(0.0, 0.0, 1.0));
    assert!((d - 1.5f64.acosh()).abs() < 1e-14);
    let oracle = geodesic_length_oracle(1.0, 1.0, 0.0, 1.0);
    assert!((d - oracle).abs() < 1e-7, "formula {d} vs oracle {oracle}");
}

#[test]
fn polar_accessors() {
    let (rho, theta) = polar(Complex::new(0.0, -2.0));
    assert!((rho - 2.0).abs() < 1e-15);
    assert!((theta - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn identity_map_fixes_everything() {
    let m = MoebiusMap::identity();
    let z = Complex::new(0.3, -0.8);
    assert_eq!(m.apply(z).finite().unwrap(), z);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moebius_extension_is_an_isometry(
        a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64,
        e in -2.0..2.0f64, f in -2.0..2.0f64, g in -2.0..2.0f64, h in -2.0..2.0f64,
        px in -3.0..3.0f64, py in -3.0..3.0f64, pt_ in 0.1..4.0f64,
        qx in -3.0..3.0f64, qy in -3.0..3.0f64, qt in 0.1..4.0f64,
    ) {
        let m = MoebiusMap::new(
            Complex::new(a, b),
            Complex::new(c, d),
            Complex::new(e, f),
            Complex::new(g, h),
        );
        prop_assume!(m.is_ok());
        let m = m.unwrap();
        let p = pt(px, py, pt_);
        let q = pt(qx, qy, qt);
        let before = hyp_distance(p, q);
        let after = hyp_distance(m.extend(p), m.extend(q));
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before));
    }

    #[test]
    fn triangle_inequality(
        ax in -2.0..2.0f64, ay in -2.0..2.0f64, at in 0.1..3.0f64,
        bx in -2.0..2.0f64, by in -2.0..2.0f64, bt in 0.1..3.0f64,
        cx in -2.0..2.0f64, cy in -2.0..2.0f64, ct in 0.1..3.0f64,
    ) {
        let (a, b, c) = (pt(ax, ay, at), pt(bx, by, bt), pt(cx, cy, ct));
        prop_assert!(hyp_distance(a, c) <= hyp_distance(a, b) + hyp_distance(b, c) + 1e-12);
    }

    #[test]
    fn composition_agrees_with_sequential_application(
        a in -2.0..2.0f64, b in -2.0..2.0f64, c in -0.5..0.5f64, d in 1.0..2.0f64,
        e in -2.0..2.0f64, f in -2.0..2.0f64, g in -0.5..0.5f64, h in 1.0..2.0f64,
        zx in -1.0..1.0f64, zy in -1.0..1.0f64,
    ) {
        let m1 = MoebiusMap::new(Complex::new(a, 0.0), Complex::new(b, 0.0), Complex::new(c, 0.0), Complex::new(d, 0.0));
        let m2 = MoebiusMap::new(Complex::new(h, 0.0), Complex::new(e, 0.0), Complex::new(g, 0.0), Complex::new(f.abs() + 1.0, 0.0));
        prop_assume!(m1.is_ok() && m2.is_ok());
        let (m1, m2) = (m1.unwrap(), m2.unwrap());
        let z = Complex::new(zx, zy);
        let via_compose = m1.compose(&m2).apply(z).finite();
        let sequential = m2.apply(z).finite().and_then(|w| m1.apply(w).finite());
        if let (Some(x), Some(y)) = (via_compose, sequential) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + x.norm()));
        }
    }
}

/// Finite differences converge to the analytic jet at second order: halving
/// the step scales the error by ~4 (fitted order within 20% of 2).
#[test]
fn jet_finite_difference_convergence_order() {
    struct StepField(f64);
    impl LiouvilleField for StepField {
        fn phi(&self, z: Complex) -> f64 {
            renvol_core::field::CuspField.phi(z)
        }
        fn jet(&self, z: Complex) -> renvol_core::field::Jet {
            // fd_jet with the step scaled by self.0
            let h = fd_step(z) * self.0;
            let scaled = |w: Complex| renvol_core::field::CuspField.phi(w);
            // reimplement the stencil at the scaled step
            let ex = Complex::new(h, 0.0);
            let ey = Complex::new(0.0, h);
            let f0 = scaled(z);
            let phi_x = (scaled(z + ex) - scaled(z - ex)) / (2.0 * h);
            let phi_y = (scaled(z + ey) - scaled(z - ey)) / (2.0 * h);
            let phi_xx = (scaled(z + ex) - 2.0 * f0 + scaled(z - ex)) / (h * h);
            let phi_yy = (scaled(z + ey) - 2.0 * f0 + scaled(z - ey)) / (h * h);
            let phi_xy = (scaled(z + ex + ey) - scaled(z + ex - ey) - scaled(z - ex + ey)
                + scaled(z - ex - ey))
                / (4.0 * h * h);
            renvol_core::field::Jet {
                phi: f0,
                phi_z: Complex::new(phi_x, -phi_y) * 0.5,
                phi_zz: Complex::new(phi_xx - phi_yy, -2.0 * phi_xy) * 0.25,
                phi_zzbar: 0.25 * (phi_xx + phi_yy),
            }
        }
    }
    let z = Complex::new(0.09, 0.05);
    let exact = renvol_core::field::CuspField.jet(z);
    let err = |scale: f64| {
        let j = StepField(scale).jet(z);
        (j.phi_z - exact.phi_z).norm()
            + (j.phi_zz - exact.phi_zz).norm()
            + (j.phi_zzbar - exact.phi_zzbar).abs()
    };
    // steps 32h and 16h: truncation dominates, roundoff negligible
    let e1 = err(32.0);
    let e2 = err(16.0);
    let order = (e1 / e2).ln() / 2.0f64.ln();
    assert!(
        (order - 2.0).abs() <= 0.4,
        "fitted order {order}, errors {e1:.3e} / {e2:.3e}"
    );
}

#[test]
fn analytic_jets_cross_checked_against_finite_differences() {
    let m = ConformalMetric::cusp_annulus(0.02, 0.2).unwrap();
    let samples: Vec<Complex> = (0..8)
        .map(|k| Complex::from_polar(0.04 + 0.015 * k as f64, 0.7 * k as f64))
        .collect();
    m.validate_jets(&samples, 1e-4).unwrap();
}

#[test]
fn jet_outside_domain_errors() {
    let m = ConformalMetric::cusp_annulus(0.05, 0.2).unwrap();
    assert!(m.liouville_jet(Complex::new(0.3, 0.0)).is_err());
    assert!(m.liouville_jet(Complex::new(0.01, 0.0)).is_err());
}

#[test]
fn finite_difference_mode_recovers_the_curvature() {
    // a bare phi evaluator, second derivatives by central differences
    let metric = ConformalMetric::new(
        renvol_core::field::Domain::annulus(0.02, 0.3).unwrap(),
        std::sync::Arc::new(renvol_core::field::FiniteDiffField {
            eval: std::sync::Arc::new(|z: Complex| {
                let rho = z.norm();
                -(rho * rho.ln().abs()).ln()
            }),
        }),
    );
    for &x in &[0.05, 0.1, 0.2] {
        let k = metric.gaussian_curvature(Complex::new(x, 0.02)).unwrap();
        assert!((k + 1.0).abs() < 1e-4, "K = {k} at {x}");
    }
    // the 2h boundary margin is enforced in this mode
    assert!(metric.liouville_jet(Complex::new(0.0200001, 0.0)).is_err());
}

#[test]
fn fd_jet_of_flat_field_is_zero() {
    let j = fd_jet(&|_| 1.25, Complex::new(0.4, 0.2));
    assert_eq!(j.phi, 1.25);
    assert!(j.phi_z.norm() < 1e-12);
    assert!(j.phi_zzbar.abs() < 1e-7);
}

#[test]
fn tube_jet_finite_difference_vs_symbolic_at_the_core() {
    // a = 1 tube: the core circle sits at rho = e^{-pi/2}, comfortably
    // above the finite-difference step
    let field = renvol_core::field::TubeField { a: 1.0 };
    let z = Complex::from_polar((-std::f64::consts::FRAC_PI_2).exp(), 0.9);
    let analytic = field.jet(z);
    let fd = fd_jet(&|w| LiouvilleField::phi(&field, w), z);
    let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + a.abs());
    assert!(
        (analytic.phi_z - fd.phi_z).norm() / analytic.phi_z.norm() < 1e-8,
        "phi_z rel {:.3e} (analytic {}, fd {})",
        (analytic.phi_z - fd.phi_z).norm() / analytic.phi_z.norm(),
        analytic.phi_z,
        fd.phi_z
    );
    assert!((analytic.phi_zz - fd.phi_zz).norm() / analytic.phi_zz.norm() < 1e-6);
    assert!(rel(analytic.phi_zzbar, fd.phi_zzbar) < 1e-6);
    // curvature from the finite-difference jet carries the O(h^2)
    // second-derivative error (the 1e-8 curvature identity is an
    // analytic-jet statement)
    let k = -4.0 * fd.phi_zzbar * (-2.0 * fd.phi).exp();
    assert!((k + 1.0).abs() < 1e-6, "K = {k}");
}

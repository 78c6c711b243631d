//! Multicurve correction: search equivalence, thresholds, collar geometry,
//! norm values, and the JSON interface.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use renvol_core::adapted::{
    adapted_value, collar_boundary_length, collar_width, correction_max, epsilon1_threshold,
    margulis_eps0, qd_l1_on_sector, qd_l1_on_sector_quadrature, Curve, CurveSystem,
};
use renvol_core::quadrature::integrate_1d;
use renvol_core::QuadratureConfig;

fn curve(id: u32, length: f64, compressible: bool) -> Curve {
    Curve {
        id,
        length,
        compressible,
    }
}

#[test]
fn search_routes_agree_and_respect_cardinality() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..40 {
        let sys = renvol_core::acceptance::random_system(&mut rng, 14);
        let a = sys.correction_max_exhaustive();
        let b = sys.correction_max_branch_and_bound();
        assert_eq!(a.value, b.value);
        assert_eq!(a.optima, b.optima);
        let cap = 3 * 4 * 10; // generous bound; the real cap check below
        for sel in &a.optima {
            assert!(sel.members.len() <= cap);
        }
    }
}

#[test]
fn cardinality_never_exceeds_slot_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let sys = renvol_core::acceptance::random_system(&mut rng, 12);
        let g = sys.system.genus_sum as usize;
        for sel in correction_max(&sys).optima {
            assert!(sel.members.len() <= 3 * g - 3);
        }
    }
}

#[test]
fn long_only_multicurves_are_never_optimal() {
    // the existence argument: families made solely of curves longer than
    // (3g-3) * l_min fall below the singleton of the shortest compressible
    // curve
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..25 {
        let sys = renvol_core::acceptance::random_system(&mut rng, 10);
        let lengths: Vec<f64> = sys
            .system
            .curves
            .iter()
            .filter(|c| c.compressible)
            .map(|c| c.length)
            .collect();
        if lengths.is_empty() {
            continue;
        }
        let l_min = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let slots = (3 * sys.system.genus_sum - 3) as f64;
        let threshold = slots * l_min;
        let best = correction_max(&sys).value;
        // any long-only family is bounded by slots * pi^3 / threshold
        assert!(
            slots * PI.powi(3) / threshold <= best + 1e-9,
            "long-only bound must not beat the optimum"
        );
    }
}

#[test]
fn adapted_value_adds_the_correction() {
    let sys = CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, PI.powi(3), true)],
        intersections: vec![],
    }
    .validate()
    .unwrap();
    assert!((adapted_value(-2.5, &sys).unwrap() - (-1.5)).abs() < 1e-12);
    assert!(adapted_value(f64::NAN, &sys).is_err());
    // monotonicity: shrinking a selected curve increases the value
    let shorter = CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, PI.powi(3) / 2.0, true)],
        intersections: vec![],
    }
    .validate()
    .unwrap();
    assert!(adapted_value(0.0, &shorter).unwrap() > adapted_value(0.0, &sys).unwrap());
}

#[test]
fn short_curve_inclusion_on_collar_respecting_systems() {
    // generator honoring the full collar constraint the argument needs:
    // a curve crossing a short one must be longer than the collar width
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let eps1 = epsilon1_threshold(2).unwrap();
    let mut tested = 0;
    while tested < 40 {
        let n = rng.gen_range(3..9usize);
        let mut curves: Vec<Curve> = (0..n)
            .map(|i| curve(i as u32 + 1, (rng.gen_range(0.1f64.ln()..3.0f64.ln())).exp(), true))
            .collect();
        let mut inter = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.3) {
                    inter.push((i as u32 + 1, j as u32 + 1));
                }
            }
        }
        // enforce the collar bound on intersecting pairs
        for &(a, b) in &inter {
            let (i, j) = (a as usize - 1, b as usize - 1);
            let need_j = collar_width(curves[i].length);
            if curves[j].length < need_j {
                curves[j].length = need_j * rng.gen_range(1.01..1.5);
            }
            let need_i = collar_width(curves[j].length);
            if curves[i].length < need_i {
                curves[i].length = need_i * rng.gen_range(1.01..1.5);
            }
        }
        let mut sys = None;
        for g in 2..12 {
            let cand = CurveSystem {
                genus_sum: g,
                curves: curves.clone(),
                intersections: inter.clone(),
            };
            if let Ok(v) = cand.validate() {
                sys = Some(v);
                break;
            }
        }
        let Some(sys) = sys else { continue };
        if sys.check_collar_disjointness().is_err() {
            continue;
        }
        tested += 1;
        let eps = eps1.min(epsilon1_threshold(sys.system.genus_sum).unwrap());
        assert!(
            sys.short_curves_included(eps).unwrap(),
            "inclusion failed on a collar-respecting system"
        );
    }
}

#[test]
fn single_short_disjoint_curve_always_selected() {
    let sys = CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, 0.2, true), curve(2, 4.0, true), curve(3, 5.0, false)],
        intersections: vec![(2, 3)],
    }
    .validate()
    .unwrap();
    assert!(sys.short_curves_included(0.4).unwrap());
}

#[test]
fn epsilon1_decreases_in_genus() {
    let mut prev = f64::INFINITY;
    for g in 2..=6 {
        let e = epsilon1_threshold(g).unwrap();
        assert!(e < prev);
        assert!(e < margulis_eps0());
        prev = e;
    }
    // g = 2 root bracket
    let e2 = epsilon1_threshold(2).unwrap();
    assert!(e2 > 0.3 && e2 < 1.0);
    let f = |eps: f64| collar_width(eps) - 3.0 * eps;
    assert!(f(0.3) > 0.0 && f(1.0) < 0.0);
}

#[test]
fn collar_width_identity_oracle() {
    // 1/cosh^2 L = tanh^2(l/2)
    for &ell in &[0.1, 0.5, 1.3] {
        let lw = collar_width(ell);
        let lhs = 1.0 / (lw.cosh() * lw.cosh());
        let rhs = (0.5 * ell).tanh().powi(2);
        assert!((lhs - rhs).abs() < 1e-14, "l = {ell}");
    }
    assert!(collar_width(0.5) > collar_width(0.6));
}

#[test]
fn collar_boundary_length_by_line_integral() {
    // length of the collar boundary rho = L in the metric
    // d rho^2 + (l/2pi)^2 cosh^2(rho) d theta^2
    let ell = 0.1;
    let lw = collar_width(ell);
    let cfg = QuadratureConfig::default();
    let quad = integrate_1d(
        &|_theta: f64| ell / (2.0 * PI) * lw.cosh(),
        0.0,
        2.0 * PI,
        &cfg,
    )
    .unwrap()
    .value;
    assert!((quad - collar_boundary_length(ell)).abs() < 1e-12);
}

#[test]
fn sector_l1_closed_form_vs_quadrature() {
    let cfg = QuadratureConfig::with_rel_tol(1e-12);
    for &(ell, a, b) in &[(0.5, 0.1, 2.8), (2.0, 0.0, PI)] {
        let closed = qd_l1_on_sector(ell, a, b).unwrap();
        let quad = qd_l1_on_sector_quadrature(ell, a, b, &cfg).unwrap();
        assert!((closed - quad).abs() < 1e-8);
    }
    assert!(qd_l1_on_sector(0.5, -0.1, 1.0).is_err());
    assert!(qd_l1_on_sector(0.5, 2.0, 1.0).is_err());
}

#[test]
fn curve_system_json_round_trip() {
    let sys = CurveSystem {
        genus_sum: 3,
        curves: vec![curve(1, 0.1, true), curve(2, 0.7, false)],
        intersections: vec![(1, 2)],
    };
    let text = serde_json::to_string(&sys).unwrap();
    let back: CurveSystem = serde_json::from_str(&text).unwrap();
    assert_eq!(back.genus_sum, 3);
    assert_eq!(back.curves.len(), 2);
    assert_eq!(back.intersections, vec![(1, 2)]);
    let m = correction_max(&back.validate().unwrap());
    let sel_text = serde_json::to_string(&m).unwrap();
    let m2: renvol_core::adapted::CorrectionMax = serde_json::from_str(&sel_text).unwrap();
    assert_eq!(m2.value, m.value);
    assert_eq!(m2.optima, m.optima);
}

#[test]
fn validation_rejects_malformed_systems() {
    // unknown id in the intersection list
    assert!(CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, 1.0, true)],
        intersections: vec![(1, 9)],
    }
    .validate()
    .is_err());
    // self-intersection entry
    assert!(CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, 1.0, true)],
        intersections: vec![(1, 1)],
    }
    .validate()
    .is_err());
    // nonpositive length
    assert!(CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, 0.0, true)],
        intersections: vec![],
    }
    .validate()
    .is_err());
    // duplicate ids
    assert!(CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, 1.0, true), curve(1, 2.0, false)],
        intersections: vec![],
    }
    .validate()
    .is_err());
}

#[test]
fn ties_report_every_optimum() {
    let sys = CurveSystem {
        genus_sum: 2,
        curves: vec![curve(1, 2.0, true), curve(2, 2.0, true)],
        intersections: vec![(1, 2)],
    }
    .validate()
    .unwrap();
    let m = correction_max(&sys);
    assert_eq!(m.optima.len(), 2);
    assert_eq!(m.optima[0].members, vec![1]);
    assert_eq!(m.optima[1].members, vec![2]);
    // maximality completion never changes the value
    let completed = sys.complete_to_maximal(&m.optima[0]);
    assert_eq!(completed.value, m.optima[0].value);
}

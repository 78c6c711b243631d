//! The correction term of the adapted renormalized volume: maximization of
//! `L(X, m) = pi^3 sum 1/l_gamma` over disjoint families of compressible
//! curves, the short-curve threshold `eps_1(g)`, collar geometry, and the
//! quadratic-differential norm values on annulus covers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate_2d, QuadratureConfig};
use crate::{CoreError, Result};

/// Two-dimensional Margulis constant `eps_0 = 2 arsinh(1)`.
pub fn margulis_eps0() -> f64 {
    2.0 * 1.0f64.asinh()
}

/// A curve on the boundary surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    pub id: u32,
    pub length: f64,
    pub compressible: bool,
}

/// Finite curve system with pairwise intersection data.
///
/// The JSON wire format is
/// `{ "genus_sum": g, "curves": [{id, length, compressible}], "intersections": [[i, j], ...] }`
/// with intersection pairs listed by curve id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSystem {
    pub genus_sum: u32,
    pub curves: Vec<Curve>,
    /// Pairs of ids with nonzero geometric intersection number.
    pub intersections: Vec<(u32, u32)>,
}

/// Validated system with the intersection matrix in index form.
pub struct ValidatedSystem {
    pub system: CurveSystem,
    /// `meets[i][j]` true iff curves `i`, `j` (by index) intersect.
    meets: Vec<Vec<bool>>,
}

impl CurveSystem {
    /// Checks the structural invariants:
    /// ids unique, lengths positive, `g >= 2`, the intersection relation
    /// symmetric and irreflexive, no two curves shorter than `eps_0`
    /// intersecting (collar disjointness), and no disjoint family larger
    /// than `3g - 3`.
    pub fn validate(self) -> Result<ValidatedSystem> {
        if self.genus_sum < 2 {
            return Err(CoreError::Validation("genus sum must be >= 2".into()));
        }
        let n = self.curves.len();
        let mut ids = std::collections::HashMap::new();
        for (i, c) in self.curves.iter().enumerate() {
            if !(c.length > 0.0) || !c.length.is_finite() {
                return Err(CoreError::Validation(format!(
                    "curve {} needs a positive finite length",
                    c.id
                )));
            }
            if ids.insert(c.id, i).is_some() {
                return Err(CoreError::Validation(format!("duplicate curve id {}", c.id)));
            }
        }
        let mut meets = vec![vec![false; n]; n];
        for &(a, b) in &self.intersections {
            let (i, j) = match (ids.get(&a), ids.get(&b)) {
                (Some(&i), Some(&j)) => (i, j),
                _ => {
                    return Err(CoreError::Validation(format!(
                        "intersection pair ({a}, {b}) references unknown ids"
                    )))
                }
            };
            if i == j {
                return Err(CoreError::Validation(format!(
                    "curve {a} cannot intersect itself in the input matrix"
                )));
            }
            meets[i][j] = true;
            meets[j][i] = true;
        }
        let validated = ValidatedSystem { system: self, meets };
        // no disjoint family may exceed 3g - 3
        let cap = validated.slot_cap();
        let all: Vec<usize> = (0..n).collect();
        let largest = validated.max_disjoint_size(&all);
        if largest > cap {
            return Err(CoreError::Validation(format!(
                "system admits a disjoint family of {largest} curves, above the 3g-3 = {cap} cap"
            )));
        }
        Ok(validated)
    }
}

/// A maximizing multicurve selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticurveSelection {
    /// Curve ids, sorted ascending.
    pub members: Vec<u32>,
    /// `L(X, m) = pi^3 sum 1/l`.
    pub value: f64,
}

/// Result of the correction maximization: the optimum value and every
/// selection attaining it (ties are the locus where smoothness fails).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectionMax {
    pub value: f64,
    pub optima: Vec<MulticurveSelection>,
}

/// Relative tie tolerance for reporting multiple optima.
const TIE_REL_TOL: f64 = 1e-9;

impl ValidatedSystem {
    pub fn curve_count(&self) -> usize {
        self.system.curves.len()
    }

    fn slot_cap(&self) -> usize {
        (3 * self.system.genus_sum as usize).saturating_sub(3)
    }

    fn weight(&self, i: usize) -> f64 {
        PI.powi(3) / self.system.curves[i].length
    }

    fn compressible_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.curve_count())
            .filter(|&i| self.system.curves[i].compressible)
            .collect();
        // deterministic order: by weight descending, ties by id
        idx.sort_by(|&a, &b| {
            self.weight(b)
                .partial_cmp(&self.weight(a))
                .unwrap()
                .then(self.system.curves[a].id.cmp(&self.system.curves[b].id))
        });
        idx
    }

    /// Size of the largest pairwise-disjoint subfamily of `pool`.
    fn max_disjoint_size(&self, pool: &[usize]) -> usize {
        let mut best = 0;
        let mut chosen: Vec<usize> = Vec::new();
        self.mis_size(pool, 0, &mut chosen, &mut best);
        best
    }

    fn mis_size(&self, pool: &[usize], from: usize, chosen: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(chosen.len());
        if from == pool.len() || chosen.len() + (pool.len() - from) <= *best {
            return;
        }
        for k in from..pool.len() {
            let c = pool[k];
            if chosen.iter().all(|&x| !self.meets[x][c]) {
                chosen.push(c);
                self.mis_size(pool, k + 1, chosen, best);
                chosen.pop();
            }
        }
    }

    /// Exhaustive enumeration over disjoint compressible families of
    /// cardinality `<= 3g - 3`; intended for `<= 20` curves.
    pub fn correction_max_exhaustive(&self) -> CorrectionMax {
        let pool = self.compressible_indices();
        let cap = self.slot_cap();
        let mut best = CorrectionMax {
            value: 0.0,
            optima: vec![MulticurveSelection {
                members: vec![],
                value: 0.0,
            }],
        };
        let mut chosen: Vec<usize> = Vec::new();
        self.enumerate(&pool, 0, cap, 0.0, &mut chosen, &mut best, None);
        finalize(best)
    }

    /// Branch and bound with the slot bound
    /// `value + pi^3 * remaining_slots / shortest_remaining_length`;
    /// agrees exactly with the exhaustive route. Subtrees rooted at each
    /// first curve run in parallel and merge in deterministic root order.
    pub fn correction_max_branch_and_bound(&self) -> CorrectionMax {
        use rayon::prelude::*;
        let pool = self.compressible_indices();
        let cap = self.slot_cap();
        let empty = CorrectionMax {
            value: 0.0,
            optima: vec![MulticurveSelection {
                members: vec![],
                value: 0.0,
            }],
        };
        if pool.is_empty() || cap == 0 {
            return finalize(empty);
        }
        let subtree_bests: Vec<CorrectionMax> = (0..pool.len())
            .into_par_iter()
            .map(|k| {
                let mut best = CorrectionMax {
                    value: 0.0,
                    optima: Vec::new(),
                };
                let mut chosen = vec![pool[k]];
                self.enumerate(
                    &pool,
                    k + 1,
                    cap - 1,
                    self.weight(pool[k]),
                    &mut chosen,
                    &mut best,
                    Some(()),
                );
                best
            })
            .collect();
        let mut best = empty;
        for sub in subtree_bests {
            let tol = TIE_REL_TOL * best.value.max(sub.value).max(1e-300);
            if sub.value > best.value + tol {
                best = sub;
            } else if (sub.value - best.value).abs() <= tol {
                for sel in sub.optima {
                    if !best.optima.contains(&sel) {
                        best.optima.push(sel);
                    }
                }
            }
        }
        finalize(best)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        pool: &[usize],
        from: usize,
        slots: usize,
        value: f64,
        chosen: &mut Vec<usize>,
        best: &mut CorrectionMax,
        bound: Option<()>,
    ) {
        self.record(value, chosen, best);
        if from == pool.len() || slots == 0 {
            return;
        }
        if bound.is_some() {
            // pool is sorted by weight descending, so pool[from] carries the
            // largest remaining weight = pi^3 / shortest remaining length
            let cap = value + slots as f64 * self.weight(pool[from]);
            if cap < best.value * (1.0 - TIE_REL_TOL) {
                return;
            }
        }
        for k in from..pool.len() {
            let c = pool[k];
            if chosen.iter().all(|&x| !self.meets[x][c]) {
                chosen.push(c);
                self.enumerate(pool, k + 1, slots - 1, value + self.weight(c), chosen, best, bound);
                chosen.pop();
            } else if bound.is_none() {
                continue;
            }
        }
    }

    fn record(&self, value: f64, chosen: &[usize], best: &mut CorrectionMax) {
        let tol = TIE_REL_TOL * best.value.max(value).max(1e-300);
        if value > best.value + tol {
            best.value = value;
            best.optima.clear();
        } else if (value - best.value).abs() > tol {
            return;
        }
        let mut members: Vec<u32> = chosen.iter().map(|&i| self.system.curves[i].id).collect();
        members.sort_unstable();
        let sel = MulticurveSelection { members, value };
        if !best.optima.contains(&sel) {
            best.optima.push(sel);
        }
    }

    /// Maximality completion: greedily extend a selection (by id order) with
    /// compressible curves disjoint from it whose marginal value is zero.
    /// Never changes the value; with positive lengths every addition has
    /// positive marginal, so at a true optimum this is the identity.
    pub fn complete_to_maximal(&self, sel: &MulticurveSelection) -> MulticurveSelection {
        let mut out = sel.clone();
        let idx_of: std::collections::HashMap<u32, usize> = self
            .system
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id, i))
            .collect();
        let mut chosen: Vec<usize> = out.members.iter().map(|id| idx_of[id]).collect();
        let mut ids: Vec<u32> = self
            .system
            .curves
            .iter()
            .filter(|c| c.compressible)
            .map(|c| c.id)
            .collect();
        ids.sort_unstable();
        for id in ids {
            let i = idx_of[&id];
            if chosen.contains(&i) || chosen.len() >= self.slot_cap() {
                continue;
            }
            if chosen.iter().all(|&x| !self.meets[x][i]) && self.weight(i) == 0.0 {
                chosen.push(i);
                out.members.push(id);
            }
        }
        out.members.sort_unstable();
        out
    }

    /// Collar disjointness: no two intersecting curves may both be shorter
    /// than `eps_0` (the thin tubes around curves of length `<= eps_0` are
    /// embedded and disjoint, so short intersecting geodesics cannot
    /// coexist on a surface).
    pub fn check_collar_disjointness(&self) -> Result<()> {
        let eps0 = margulis_eps0();
        let n = self.curve_count();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.meets[i][j]
                    && self.system.curves[i].length < eps0
                    && self.system.curves[j].length < eps0
                {
                    return Err(CoreError::Validation(format!(
                        "curves {} and {} are both shorter than eps_0 but intersect (collar disjointness)",
                        self.system.curves[i].id, self.system.curves[j].id
                    )));
                }
            }
        }
        Ok(())
    }

    /// True iff every optimal selection contains every compressible curve
    /// shorter than `eps`. Requires a collar-disjoint system and
    /// `eps <= eps_1(g)`.
    pub fn short_curves_included(&self, eps: f64) -> Result<bool> {
        let eps1 = epsilon1_threshold(self.system.genus_sum)?;
        if eps > eps1 {
            return Err(CoreError::Validation(format!(
                "inclusion threshold {eps} exceeds eps_1(g) = {eps1}"
            )));
        }
        self.check_collar_disjointness()?;
        let opt = self.correction_max_exhaustive();
        let short: Vec<u32> = self
            .system
            .curves
            .iter()
            .filter(|c| c.compressible && c.length < eps)
            .map(|c| c.id)
            .collect();
        Ok(opt
            .optima
            .iter()
            .all(|sel| short.iter().all(|id| sel.members.contains(id))))
    }
}

fn finalize(mut best: CorrectionMax) -> CorrectionMax {
    for sel in &mut best.optima {
        sel.members.sort_unstable();
    }
    best.optima.sort_by(|a, b| a.members.cmp(&b.members));
    best
}

/// The maximum of `L(X, .)` over compressible multicurves, by exhaustive
/// enumeration up to 20 curves and branch and bound beyond.
pub fn correction_max(system: &ValidatedSystem) -> CorrectionMax {
    if system.curve_count() <= 20 {
        system.correction_max_exhaustive()
    } else {
        system.correction_max_branch_and_bound()
    }
}

/// Adapted value `V~ = V_R + max_m L(X, m)`.
pub fn adapted_value(base_vr: f64, system: &ValidatedSystem) -> Result<f64> {
    if !base_vr.is_finite() {
        return Err(CoreError::Validation("base renormalized volume must be finite".into()));
    }
    Ok(base_vr + correction_max(system).value)
}

/// Threshold `eps_1(g)`: the largest `eps` with
/// `-pi^3/eps + pi^3 (3g-3) / arsinh(1/sinh(eps/2)) < 0` on `(0, eps]`,
/// found by bisection on the root of `arsinh(1/sinh(eps/2)) = (3g-3) eps`.
pub fn epsilon1_threshold(genus_sum: u32) -> Result<f64> {
    if genus_sum < 2 {
        return Err(CoreError::Validation("genus sum must be >= 2".into()));
    }
    let slots = (3 * genus_sum - 3) as f64;
    let f = |eps: f64| collar_width(eps) - slots * eps;
    // f > 0 for small eps (collar width diverges), f < 0 past the root
    let (mut lo, mut hi) = (1e-8, margulis_eps0());
    if f(hi) > 0.0 {
        return Err(CoreError::NonConvergent(
            "no sign change below eps_0 in the threshold bisection".into(),
        ));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Collar half-width `arsinh(1 / sinh(l/2))` of a closed geodesic.
pub fn collar_width(ell: f64) -> f64 {
    (1.0 / (0.5 * ell).sinh()).asinh()
}

/// Induced length `l cosh(collar_width(l))` of a collar boundary circle in
/// the collar metric `d rho^2 + (l/2pi)^2 cosh^2(rho) d theta^2`.
pub fn collar_boundary_length(ell: f64) -> f64 {
    ell * collar_width(ell).cosh()
}

/// `L^1` mass of `dz^2/z^2` over the annulus cover sector
/// `{1 <= |z| <= e^l, theta_a <= arg z <= theta_b}`: closed form
/// `(theta_b - theta_a) * l`.
pub fn qd_l1_on_sector(ell: f64, theta_a: f64, theta_b: f64) -> Result<f64> {
    if !(0.0 <= theta_a && theta_a <= theta_b && theta_b <= PI) {
        return Err(CoreError::Validation(format!(
            "sector needs 0 <= theta_a <= theta_b <= pi, got ({theta_a}, {theta_b})"
        )));
    }
    Ok((theta_b - theta_a) * ell)
}

/// Quadrature cross-check of [`qd_l1_on_sector`]: integrates `|q| = rho^{-2}`
/// against euclidean measure over the sector.
pub fn qd_l1_on_sector_quadrature(
    ell: f64,
    theta_a: f64,
    theta_b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let f = |rho: f64, _theta: f64| 1.0 / rho;
    Ok(integrate_2d(&f, 1.0, ell.exp(), theta_a, theta_b, cfg)?.value)
}

/// Thin-part value `(2/(pi l^2)) * int_{off-collar} |dz^2/z^2| = 4 theta/(pi l)`
/// with `theta = arcsin(1/cosh(collar_width)) = arcsin(tanh(l/2))`.
pub fn qd_l1_thin_part_value(ell: f64) -> f64 {
    let theta = (0.5 * ell).tanh().asin();
    4.0 * theta / (PI * ell)
}

/// `L^infinity` bound of `(2 pi^2/l^2) dz^2/z^2` off the collar:
/// `(2 pi^2 / l^2) tanh^2(l/2)`, at most `pi^2` for `l <= eps_0`.
pub fn qd_linf_thick_bound(ell: f64) -> Result<f64> {
    if !(0.0 < ell && ell <= margulis_eps0()) {
        return Err(CoreError::Validation(format!(
            "thick bound defined for 0 < l <= eps_0, got {ell}"
        )));
    }
    let t = (0.5 * ell).tanh();
    Ok(2.0 * PI * PI / (ell * ell) * t * t)
}

/// Report for the full-annulus `L^1` mass of `2 dz^2 / (pi z^2)`: the
/// sector integral over `(0, pi)` gives `2 l`, against the stated `4 l`;
/// both are recorded and the discrepancy is flagged, not resolved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullAnnulusL1Report {
    pub ell: f64,
    pub computed: f64,
    pub stated: f64,
    pub discrepancy_factor: f64,
}

pub fn full_annulus_l1_report(ell: f64) -> Result<FullAnnulusL1Report> {
    let computed = 2.0 / PI * qd_l1_on_sector(ell, 0.0, PI)?;
    let stated = 4.0 * ell;
    Ok(FullAnnulusL1Report {
        ell,
        computed,
        stated,
        discrepancy_factor: stated / computed,
    })
}

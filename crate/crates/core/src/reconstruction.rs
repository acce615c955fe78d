//! Rebuilding the space from its boundary.
//!
//! Two geodesics meet exactly when an `⊕`-combination of cross ratios
//! equals one, and then the shared chart coordinates form the set
//! `χ(α, β; γ, δ)`. Chart elements `(α, β, γ, t)` modulo the relations
//! generated by orientation reversal and these shared coordinates form
//! `Ω(X)`, and `d_ω` measures chart differences on a common geodesic.
//!
//! The model is consulted only to locate a geodesic through two given
//! points (or a third geodesic through a crossing); every coordinate and
//! distance below is then computed from cross ratios.

use serde::{Deserialize, Serialize};

use crate::boundary::{
    chart_transfer, ensure_distinct, log_cross_ratio, oplus_defect, BoundaryModel, Chart, ChartElement, Coord, OPlus,
};
use crate::error::{GeometryError, Result};
use crate::hyperbolic::{geodesic_symmetry, gromov_product_closed, HBoundaryPoint, HPoint, HyperbolicSpace};
use crate::sample::{SampleRng, Sampler};
use crate::tree::{TreeEnd, TreeSpace, Q};

/// Defect below which two geodesics are treated as coplanar crossers when
/// choosing a route. Stricter than [`intersection_tol`] so that nearly
/// coplanar pairs take the third-geodesic route instead.
const ROUTE_TOL: f64 = 1e-11;

/// Largest `|ln ω|` for which a direct hop is trusted in floating point.
/// Beyond it the crossing is so shallow that two ends nearly coincide and
/// the cross ratio loses precision, so the third-geodesic route is taken.
const SHALLOW_LOG: f64 = 8.0;

/// Longest chain of shared-coordinate relations any decision may use.
pub const MAX_CHAIN: usize = 4;

/// Tolerance on `|ω ⊕ ω' - 1|` for declaring an intersection.
pub fn intersection_tol<M: BoundaryModel>(_model: &M) -> f64 {
    if M::Real::EXACT {
        0.0
    } else {
        1e-8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreeCaseLabel {
    Case1,
    Case2,
    Case3,
    Case4,
}

/// Classification of a quadruple of distinct ends.
#[derive(Clone, Debug, PartialEq)]
pub struct FourCase {
    pub label: TreeCaseLabel,
    /// `ln ω(α,β;γ,δ)`, `ln ω(α,γ;δ,β)`, `ln ω(α,δ;γ,β)`.
    pub logs: [Q; 3],
    /// Whether the coincidences among `p(α,β;γ)`, `p(α,β;δ)`, `p(γ,δ;α)`,
    /// `p(γ,δ;β)` are exactly those the label predicts.
    pub pattern_matches: bool,
}

pub fn tree_four_case(tree: &TreeSpace, a: &TreeEnd, b: &TreeEnd, c: &TreeEnd, d: &TreeEnd) -> Result<FourCase> {
    ensure_distinct(tree, &[a, b, c, d])?;
    let x = log_cross_ratio(tree, a, b, c, d)?;
    let y = log_cross_ratio(tree, a, c, d, b)?;
    let z = log_cross_ratio(tree, a, d, c, b)?;
    let zero = Q::ZERO;
    let label = if x < zero && y == zero && z < zero {
        TreeCaseLabel::Case1
    } else if x > zero && y < zero && z == zero {
        TreeCaseLabel::Case2
    } else if x == zero && y > zero && z > zero {
        TreeCaseLabel::Case3
    } else if x == zero && y == zero && z == zero {
        TreeCaseLabel::Case4
    } else {
        return Err(GeometryError::Internal("cross ratios fit none of the four cases"));
    };
    let p_abc = tree.special_point(a, b, c)?;
    let p_abd = tree.special_point(a, b, d)?;
    let p_cda = tree.special_point(c, d, a)?;
    let p_cdb = tree.special_point(c, d, b)?;
    let expected = match label {
        // (p_abc, p_abd, p_cda, p_cdb) grouped into equal classes.
        TreeCaseLabel::Case1 => [0, 1, 0, 1],
        TreeCaseLabel::Case2 => [0, 1, 1, 0],
        TreeCaseLabel::Case3 => [0, 0, 1, 1],
        TreeCaseLabel::Case4 => [0, 0, 0, 0],
    };
    let pts = [&p_abc, &p_abd, &p_cda, &p_cdb];
    let mut pattern_matches = true;
    for i in 0..4 {
        for j in i + 1..4 {
            if (pts[i] == pts[j]) != (expected[i] == expected[j]) {
                pattern_matches = false;
            }
        }
    }
    Ok(FourCase { label, logs: [x, y, z], pattern_matches })
}

/// Whether `[a, b]` meets `[c, d]` according to the `⊕`-condition.
pub fn intersects<M: BoundaryModel>(model: &M, a: &M::Ideal, b: &M::Ideal, c: &M::Ideal, d: &M::Ideal) -> Result<bool> {
    Ok(oplus_defect(model, a, b, c, d)?.abs() <= intersection_tol(model))
}

/// `χ(α, β; γ, δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntersectionSet<R> {
    Singleton(R),
    Interval(R, R),
}

impl<R: Coord> IntersectionSet<R> {
    pub fn contains(&self, t: R, tol: f64) -> bool {
        match *self {
            IntersectionSet::Singleton(s) => (t - s).magnitude().to_f64() <= tol,
            IntersectionSet::Interval(lo, hi) => (lo - t).to_f64() <= tol && (t - hi).to_f64() <= tol,
        }
    }

    /// Representative coordinates: the singleton, or both ends and the
    /// midpoint of the interval.
    pub fn probes(&self) -> Vec<R> {
        match *self {
            IntersectionSet::Singleton(s) => vec![s],
            IntersectionSet::Interval(lo, hi) => vec![lo, (lo + hi).half(), hi],
        }
    }

    pub fn upper(&self) -> R {
        match *self {
            IntersectionSet::Singleton(s) => s,
            IntersectionSet::Interval(_, hi) => hi,
        }
    }
}

pub fn chi_set<M: BoundaryModel>(
    model: &M,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<IntersectionSet<M::Real>> {
    if !intersects(model, a, b, c, d)? {
        return Err(GeometryError::Hypotheses("geodesics do not satisfy the intersection condition"));
    }
    let lw = log_cross_ratio(model, a, b, c, d)?;
    if lw.to_f64() > intersection_tol(model) {
        return Err(GeometryError::Hypotheses("cross ratio exceeds one"));
    }
    let len = lw.magnitude();
    Ok(match model.oplus() {
        OPlus::Sum => IntersectionSet::Singleton(len.half()),
        OPlus::Max => IntersectionSet::Interval(M::Real::ZERO, len),
    })
}

/// A quadruple relabeled so that the shared-coordinate hypotheses hold.
#[derive(Clone, Debug)]
pub struct Normalized<I> {
    pub quad: [I; 4],
    pub swapped_ab: bool,
    pub swapped_cd: bool,
}

/// Try the identity, then `γ↔δ`, then `α↔β`, then both; the first labeling
/// with `ω(α,β;γ,δ) ≤ 1` (and the `⊕`-condition) wins.
pub fn normalize_for_chi<M: BoundaryModel>(
    model: &M,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<Normalized<M::Ideal>> {
    let tol = intersection_tol(model);
    if oplus_defect(model, a, b, c, d)?.abs() > tol {
        return Err(GeometryError::NotIntersecting);
    }
    for (swapped_ab, swapped_cd) in [(false, false), (false, true), (true, false), (true, true)] {
        let (p, q) = if swapped_ab { (b, a) } else { (a, b) };
        let (r, s) = if swapped_cd { (d, c) } else { (c, d) };
        if log_cross_ratio(model, p, q, r, s)?.to_f64() <= tol {
            return Ok(Normalized { quad: [p.clone(), q.clone(), r.clone(), s.clone()], swapped_ab, swapped_cd });
        }
    }
    Err(GeometryError::NotIntersecting)
}

/// Residuals of the midpoint property at a crossing `o` of `[a,b]` and
/// `[c,d]`: `|d(o,p(a,b;c)) - d(o,p(a,b;d))|`, the distance between the
/// reflected special point and its partner, and the Gromov-product
/// symmetry `(a|c)_p = (b|d)_{φ_o(p)}` at `probe`.
pub fn midpoint_residual(
    space: &HyperbolicSpace,
    o: &HPoint,
    a: &HBoundaryPoint,
    b: &HBoundaryPoint,
    c: &HBoundaryPoint,
    d: &HBoundaryPoint,
    probe: &HPoint,
) -> Result<f64> {
    if !space.on_line(o, a, b)? || !space.on_line(o, c, d)? {
        return Err(GeometryError::NotIntersecting);
    }
    let pc = space.special_point(a, b, c)?;
    let pd = space.special_point(a, b, d)?;
    let r1 = (space.distance(o, &pc)? - space.distance(o, &pd)?).abs();
    let r2 = space.distance(&geodesic_symmetry(o, &pc), &pd)?;
    let image = geodesic_symmetry(o, probe);
    let r3 = (gromov_product_closed(probe, a, c)? - gromov_product_closed(&image, b, d)?).abs();
    let r4 = (gromov_product_closed(probe, b, c)? - gromov_product_closed(&image, a, d)?).abs();
    Ok(r1.max(r2).max(r3).max(r4))
}

fn same_line<M: BoundaryModel>(model: &M, e: &Chart<M>, a: &M::Ideal, b: &M::Ideal) -> Option<bool> {
    if model.same_ideal(&e.alpha, a) && model.same_ideal(&e.beta, b) {
        Some(false)
    } else if model.same_ideal(&e.alpha, b) && model.same_ideal(&e.beta, a) {
        Some(true)
    } else {
        None
    }
}

fn coordinate_tol<M: BoundaryModel>(model: &M) -> f64 {
    model.eq_tol()
}

/// Move `e` to the `γ`-chart of `[α, β]`, which must be its own geodesic.
fn reorient<M: BoundaryModel>(
    model: &M,
    e: &Chart<M>,
    alpha: &M::Ideal,
    beta: &M::Ideal,
    gamma: &M::Ideal,
) -> Result<Chart<M>> {
    let oriented = match same_line(model, e, alpha, beta) {
        Some(false) => e.clone(),
        Some(true) => e.reversed(),
        None => return Err(GeometryError::Internal("reorient across different geodesics")),
    };
    chart_transfer(model, &oriented, gamma)
}

/// One application of the shared-coordinate relation: re-express `e`,
/// whose point must lie on `[c, d]`, as an element of `[c, d]`.
fn chi_hop<M: BoundaryModel>(model: &M, e: &Chart<M>, c: &M::Ideal, d: &M::Ideal) -> Result<Chart<M>> {
    ensure_distinct(model, &[&e.alpha, &e.beta, c, d])?;
    let n = normalize_for_chi(model, &e.alpha, &e.beta, c, d)?;
    let [a, b, c, d] = &n.quad;
    let s = reorient(model, e, a, b, c)?.t;
    let chi = chi_set_unchecked(model, a, b, c, d)?;
    if !chi.contains(s, coordinate_tol(model)) {
        return Err(GeometryError::NotIntersecting);
    }
    Ok(ChartElement::new(c.clone(), d.clone(), a.clone(), s))
}

fn chi_set_unchecked<M: BoundaryModel>(
    model: &M,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<IntersectionSet<M::Real>> {
    let len = log_cross_ratio(model, a, b, c, d)?.magnitude();
    Ok(match model.oplus() {
        OPlus::Sum => IntersectionSet::Singleton(len.half()),
        OPlus::Max => IntersectionSet::Interval(M::Real::ZERO, len),
    })
}

/// Whether `e` can be moved onto `[c, d]` with a single well-conditioned
/// hop.
fn direct_hop<M: BoundaryModel>(model: &M, e: &Chart<M>, c: &M::Ideal, d: &M::Ideal) -> bool {
    if ensure_distinct(model, &[&e.alpha, &e.beta, c, d]).is_err() {
        return false;
    }
    let Ok(defect) = oplus_defect(model, &e.alpha, &e.beta, c, d) else {
        return false;
    };
    if M::Real::EXACT {
        return defect == 0.0;
    }
    defect.abs() <= ROUTE_TOL
        && log_cross_ratio(model, &e.alpha, &e.beta, c, d).is_ok_and(|l| l.to_f64().abs() <= SHALLOW_LOG)
}

/// A chart element moved onto a target geodesic, with the number of
/// shared-coordinate relations used.
#[derive(Clone, Debug)]
pub struct Expressed<M: BoundaryModel> {
    pub element: Chart<M>,
    pub hops: usize,
}

/// Re-express `e` in the chart `[α, β]_γ`, where the point of `e` is known
/// to lie on `[α, β]`.
pub fn express_on<M: BoundaryModel>(
    model: &M,
    e: &Chart<M>,
    alpha: &M::Ideal,
    beta: &M::Ideal,
    gamma: &M::Ideal,
) -> Result<Expressed<M>> {
    if same_line(model, e, alpha, beta).is_some() {
        return Ok(Expressed { element: reorient(model, e, alpha, beta, gamma)?, hops: 0 });
    }
    if direct_hop(model, e, alpha, beta) {
        let h = chi_hop(model, e, alpha, beta)?;
        return Ok(Expressed { element: reorient(model, &h, alpha, beta, gamma)?, hops: 1 });
    }
    let o = model.chart_point(e)?;
    let (a2, b2) = model.third_line(&o, (&e.alpha, &e.beta), (alpha, beta))?;
    let mid = chi_hop(model, e, &a2, &b2)?;
    let h = chi_hop(model, &mid, alpha, beta)?;
    Ok(Expressed { element: reorient(model, &h, alpha, beta, gamma)?, hops: 2 })
}

/// Outcome of an equivalence decision in `Ω(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equivalent: bool,
    pub hops: usize,
}

/// Decide `e1 ∼ e2`.
///
/// On a common geodesic this is orientation plus chart transfer. For
/// geodesics meeting in the `⊕` sense it is one shared-coordinate relation.
/// Otherwise a third geodesic through the point of `e1` is used when that
/// point lies on the geodesic of `e2`; if it does not, no chain through
/// that point exists and the elements are inequivalent.
pub fn omega_equivalent<M: BoundaryModel>(model: &M, e1: &Chart<M>, e2: &Chart<M>) -> Result<Equivalence> {
    let tol = coordinate_tol(model);
    let close = |x: M::Real, y: M::Real| (x - y).magnitude().to_f64() <= tol;
    if same_line(model, e1, &e2.alpha, &e2.beta).is_some() {
        let moved = reorient(model, e1, &e2.alpha, &e2.beta, &e2.gamma)?;
        return Ok(Equivalence { equivalent: close(moved.t, e2.t), hops: 0 });
    }
    if direct_hop(model, e1, &e2.alpha, &e2.beta) {
        return match chi_hop(model, e1, &e2.alpha, &e2.beta) {
            Ok(h) => {
                let moved = reorient(model, &h, &e2.alpha, &e2.beta, &e2.gamma)?;
                Ok(Equivalence { equivalent: close(moved.t, e2.t), hops: 1 })
            }
            Err(GeometryError::NotIntersecting) => Ok(Equivalence { equivalent: false, hops: 1 }),
            Err(err) => Err(err),
        };
    }
    let o = model.chart_point(e1)?;
    if !model.on_line(&o, &e2.alpha, &e2.beta)? {
        return Ok(Equivalence { equivalent: false, hops: 0 });
    }
    let moved = express_on(model, e1, &e2.alpha, &e2.beta, &e2.gamma)?;
    Ok(Equivalence { equivalent: close(moved.element.t, e2.t), hops: moved.hops })
}

/// `d_ω(e1, e2)` and the data used to compute it.
#[derive(Clone, Debug)]
pub struct OmegaDistance<M: BoundaryModel> {
    pub value: M::Real,
    pub joining: (M::Ideal, M::Ideal, M::Ideal),
    pub hops: usize,
}

/// `d_ω` via the joining geodesic selected by `variant` and a reference
/// point drawn with `salt`.
pub fn d_omega<M: BoundaryModel>(
    model: &M,
    e1: &Chart<M>,
    e2: &Chart<M>,
    variant: usize,
    salt: u64,
) -> Result<OmegaDistance<M>> {
    let p1 = model.chart_point(e1)?;
    let p2 = model.chart_point(e2)?;
    let (alpha, beta) = model.line_through_points(&p1, &p2, variant)?;
    let gamma = model.fresh_ideal(&[&alpha, &beta], salt);
    let s1 = express_on(model, e1, &alpha, &beta, &gamma)?;
    let s2 = express_on(model, e2, &alpha, &beta, &gamma)?;
    Ok(OmegaDistance {
        value: (s1.element.t - s2.element.t).magnitude(),
        joining: (alpha, beta, gamma),
        hops: s1.hops.max(s2.hops),
    })
}

/// A third geodesic through the common point of two chart elements.
#[derive(Clone, Debug)]
pub struct ThirdGeodesic<M: BoundaryModel> {
    pub alpha: M::Ideal,
    pub beta: M::Ideal,
    pub gamma: M::Ideal,
    pub r: M::Real,
    /// `⊕`-defects against the geodesics of `e1` and `e2`.
    pub defects: [f64; 2],
}

pub fn third_geodesic<M: BoundaryModel>(
    model: &M,
    e1: &Chart<M>,
    e2: &Chart<M>,
    salt: u64,
) -> Result<ThirdGeodesic<M>> {
    let o = model.chart_point(e1)?;
    if !model.same_point(&o, &model.chart_point(e2)?)? {
        return Err(GeometryError::NotIntersecting);
    }
    let (alpha, beta) = model.third_line(&o, (&e1.alpha, &e1.beta), (&e2.alpha, &e2.beta))?;
    let gamma = model.fresh_ideal(&[&alpha, &beta], salt);
    let on_third = chi_hop(model, e1, &alpha, &beta)?;
    let r = reorient(model, &on_third, &alpha, &beta, &gamma)?.t;
    let defects = [
        oplus_defect(model, &e1.alpha, &e1.beta, &alpha, &beta)?,
        oplus_defect(model, &e2.alpha, &e2.beta, &alpha, &beta)?,
    ];
    Ok(ThirdGeodesic { alpha, beta, gamma, r, defects })
}

/// Residual of the injectivity chain for two elements naming one point:
/// `(α,β,γ,s) = (α,β,α″,s′) ∼ (α″,β″,α,r′) = (α″,β″,γ″,r) = (α″,β″,α′,r″)
/// ∼ (α′,β′,α″,t′) = (α′,β′,γ′,t)`. Returns the largest model distance
/// from the common point over the chain, or an error when a relation of
/// the chain fails.
pub fn chain_residual<M: BoundaryModel>(model: &M, e1: &Chart<M>, e2: &Chart<M>, salt: u64) -> Result<f64> {
    let third = third_geodesic(model, e1, e2, salt)?;
    let (a2, b2) = (&third.alpha, &third.beta);
    let at = ChartElement::new(a2.clone(), b2.clone(), third.gamma.clone(), third.r);
    let s1 = chart_transfer(model, e1, a2)?;
    let r1 = chart_transfer(model, &at, &e1.alpha)?;
    let r2 = chart_transfer(model, &at, &e2.alpha)?;
    let t1 = chart_transfer(model, e2, a2)?;
    for (x, y) in [(&s1, &r1), (&r2, &t1)] {
        if !omega_equivalent(model, x, y)?.equivalent {
            return Err(GeometryError::Internal("chain relation failed"));
        }
    }
    let o = model.chart_point(e1)?;
    let mut worst: f64 = 0.0;
    for e in [&s1, &r1, &at, &r2, &t1, e2] {
        worst = worst.max(model.distance(&o, &model.chart_point(e)?)?.to_f64());
    }
    Ok(worst.max(third.defects[0].abs()).max(third.defects[1].abs()))
}

/// Result of certifying one sampled pair.
#[derive(Clone, Debug, Default)]
pub struct Certificate {
    /// `|d_ω - d_X|` over every joining variant and reference point.
    pub metric: f64,
    /// Spread of `d_ω` over the chart choices.
    pub spread: f64,
    /// Largest residual of the injectivity chain.
    pub chain: f64,
    pub longest_chain: usize,
    pub failures: Vec<String>,
}

impl Certificate {
    pub fn violation(&self) -> f64 {
        self.metric.max(self.spread).max(self.chain)
    }
}

pub const GAMMA_CHARTS: u64 = 3;
pub const JOINING_VARIANTS: usize = 2;

/// Certify the isometry `Ω(X) → X` on one random pair.
pub fn certify_sample<M: Sampler>(model: &M, rng: &mut SampleRng) -> Result<Certificate> {
    let e1 = model.random_chart(rng)?;
    let e2 = model.random_chart(rng)?;
    certify_pair(model, &e1, &e2)
}

pub fn certify_pair<M: BoundaryModel>(model: &M, e1: &Chart<M>, e2: &Chart<M>) -> Result<Certificate> {
    let mut cert = Certificate::default();
    let p1 = model.chart_point(e1)?;
    let p2 = model.chart_point(e2)?;
    let dx = model.distance(&p1, &p2)?.to_f64();

    let mut values = Vec::new();
    let mut first_join = None;
    for variant in 0..JOINING_VARIANTS {
        for salt in 0..GAMMA_CHARTS {
            let d = d_omega(model, e1, e2, variant, salt)?;
            cert.longest_chain = cert.longest_chain.max(d.hops);
            values.push(d.value.to_f64());
            if first_join.is_none() {
                first_join = Some(d.joining);
            }
        }
    }
    cert.metric = values.iter().map(|v| (v - dx).abs()).fold(0.0, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    cert.spread = hi - lo;

    // Injectivity spot checks.
    let shifted = e1.shifted(M::Real::ratio(1, 10));
    if omega_equivalent(model, e1, &shifted)?.equivalent {
        cert.failures.push("element equivalent to its 0.1 shift".into());
    }
    if !omega_equivalent(model, e1, &e1.reversed())?.equivalent {
        cert.failures.push("orientation reversal not equivalent".into());
    }
    if dx > 100.0 * model.eq_tol().max(1e-12) && omega_equivalent(model, e1, e2)?.equivalent {
        cert.failures.push(format!("distinct points (d = {dx:.3e}) declared equivalent"));
    }

    // The same point on the joining geodesic, and the chain between them.
    let (ja, jb, jg) = first_join.expect("at least one joining chart");
    let f1 = express_on(model, e1, &ja, &jb, &jg)?.element;
    let eq = omega_equivalent(model, e1, &f1)?;
    cert.longest_chain = cert.longest_chain.max(eq.hops);
    if !eq.equivalent {
        cert.failures.push("element not equivalent to its image on the joining geodesic".into());
    }
    if same_line(model, e1, &ja, &jb).is_none() {
        match chain_residual(model, e1, &f1, 7) {
            Ok(r) => cert.chain = r,
            Err(err) => cert.failures.push(format!("injectivity chain: {err}")),
        }
    }
    if cert.longest_chain > MAX_CHAIN {
        cert.failures.push(format!("needed a chain of length {}", cert.longest_chain));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Field, FormVector};
    use std::f64::consts::PI;

    fn t3() -> TreeSpace {
        TreeSpace::new(3).unwrap()
    }

    fn e(s: &str) -> TreeEnd {
        t3().end_from_str(s).unwrap()
    }

    fn circle(theta: f64) -> HBoundaryPoint {
        HBoundaryPoint::new(FormVector::from_reals(Field::Real, &[theta.cos(), theta.sin(), 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn four_at_one_vertex_is_case_four() {
        let t = TreeSpace::new(4).unwrap();
        let ends: Vec<TreeEnd> = ["(01)", "(12)", "(23)", "(30)"].iter().map(|s| t.end_from_str(s).unwrap()).collect();
        let fc = tree_four_case(&t, &ends[0], &ends[1], &ends[2], &ends[3]).unwrap();
        assert_eq!(fc.label, TreeCaseLabel::Case4);
        assert!(fc.pattern_matches);
    }

    #[test]
    fn overlap_is_case_one_with_interval() {
        // γ branches off two steps toward α, δ three steps toward β.
        let t = t3();
        let (a, b, c, d) = (e("(01)"), e("(12)"), e("012(01)"), e("1210(20)"));
        let fc = tree_four_case(&t, &a, &b, &c, &d).unwrap();
        assert_eq!(fc.label, TreeCaseLabel::Case1);
        assert!(fc.pattern_matches);
        assert!(intersects(&t, &a, &b, &c, &d).unwrap());
        assert_eq!(chi_set(&t, &a, &b, &c, &d).unwrap(), IntersectionSet::Interval(Q::ZERO, Q::from_integer(5)));
        // Swapping γ and δ gives case 2, which the normalizer undoes.
        let fc2 = tree_four_case(&t, &a, &b, &d, &c).unwrap();
        assert_eq!(fc2.label, TreeCaseLabel::Case2);
        let n = normalize_for_chi(&t, &a, &b, &d, &c).unwrap();
        assert!(n.swapped_cd && !n.swapped_ab);
    }

    #[test]
    fn bridge_is_case_three() {
        // [α,β] through the root; [γ,δ] hangs off a bridge of length one.
        let t = t3();
        let (a, b) = (e("(01)"), e("(12)"));
        let (c, d) = (e("020(12)"), e("021(01)"));
        let fc = tree_four_case(&t, &a, &b, &c, &d).unwrap();
        assert_eq!(fc.label, TreeCaseLabel::Case3);
        assert!(!intersects(&t, &a, &b, &c, &d).unwrap());
        assert_eq!(fc.logs[1], Q::from_integer(1));
        assert!(chi_set(&t, &a, &b, &c, &d).is_err());
    }

    #[test]
    fn diameters_intersect_with_singleton() {
        let x = HyperbolicSpace::new(Field::Real, 2).unwrap();
        let (a, b, c, d) = (circle(PI), circle(0.0), circle(PI / 2.0), circle(-PI / 2.0));
        assert!(intersects(&x, &a, &b, &c, &d).unwrap());
        match chi_set(&x, &a, &b, &c, &d).unwrap() {
            IntersectionSet::Singleton(s) => assert!(s.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let r = midpoint_residual(&x, &x.origin(), &a, &b, &c, &d, &x.origin()).unwrap();
        assert!(r < 1e-9);
    }

    #[test]
    fn orientation_relation() {
        let x = HyperbolicSpace::new(Field::Real, 2).unwrap();
        let el = ChartElement::new(circle(0.3), circle(2.0), circle(4.0), 0.4);
        assert!(omega_equivalent(&x, &el, &el.reversed()).unwrap().equivalent);
        assert!(!omega_equivalent(&x, &el, &el.shifted(0.1)).unwrap().equivalent);
    }

    #[test]
    fn same_geodesic_distance() {
        let x = HyperbolicSpace::new(Field::Real, 2).unwrap();
        let el = ChartElement::new(circle(0.3), circle(2.0), circle(4.0), 1.5);
        let other = ChartElement::new(circle(0.3), circle(2.0), circle(4.0), -2.5);
        let d = d_omega(&x, &el, &other, 0, 0).unwrap();
        assert!((d.value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn tree_pairs_certify_exactly() {
        let t = t3();
        let e1 = ChartElement::new(e("(01)"), e("(12)"), e("012(01)"), Q::new(1, 2));
        let e2 = ChartElement::new(e("2(01)"), e("1(02)"), e("0(12)"), Q::from_integer(2));
        let cert = certify_pair(&t, &e1, &e2).unwrap();
        assert!(cert.failures.is_empty(), "{:?}", cert.failures);
        assert_eq!(cert.violation(), 0.0);
    }
}

//! Seeded random configurations for the verification suites.
//!
//! Hyperbolic samples stay within a few units of the origin, where the
//! projective coordinates are well conditioned.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{FormVector, Scalar};
use crate::boundary::{BoundaryModel, Chart, ChartElement};
use crate::error::Result;
use crate::hyperbolic::{
    bourdon_third_direction, endpoints, geodesic_point, real_plane_completion, HBoundaryPoint, HPoint, HyperbolicSpace,
    RealPlane, TangentVector,
};
use crate::tree::{q, TreeEnd, TreePoint, TreeSpace, TreeVertex, Q};

pub type SampleRng = ChaCha8Rng;

/// Radius of the ball around the origin that sampled points live in.
pub const POINT_RADIUS: f64 = 2.5;
/// Sampled chart points farther than this from the origin are redrawn.
pub const CHART_RADIUS: f64 = 4.0;

/// Two geodesics through a known common point.
#[derive(Clone, Debug)]
pub struct Crossing<M: BoundaryModel> {
    pub alpha: M::Ideal,
    pub beta: M::Ideal,
    pub gamma: M::Ideal,
    pub delta: M::Ideal,
    pub point: M::Point,
}

/// Random generation of model objects.
pub trait Sampler: BoundaryModel {
    fn random_ideal(&self, rng: &mut SampleRng) -> Self::Ideal;
    fn random_point(&self, rng: &mut SampleRng) -> Self::Point;
    /// A chart element whose point lies near the base point.
    fn random_chart(&self, rng: &mut SampleRng) -> Result<Chart<Self>>;
    /// Two geodesics through a common point whose four endpoints satisfy
    /// the `⊕`-condition (coplanar crossings for hyperbolic spaces).
    fn random_crossing(&self, rng: &mut SampleRng) -> Result<Crossing<Self>>
    where
        Self: Sized;

    fn distinct_ideals(&self, rng: &mut SampleRng, k: usize) -> Vec<Self::Ideal> {
        let mut out: Vec<Self::Ideal> = Vec::with_capacity(k);
        while out.len() < k {
            let a = self.random_ideal(rng);
            if out.iter().all(|b| !self.same_ideal(&a, b)) {
                out.push(a);
            }
        }
        out
    }
}

fn unit_direction(space: &HyperbolicSpace, rng: &mut SampleRng) -> Vec<Scalar> {
    let field = space.field();
    let dim = field.dim();
    loop {
        let xs: Vec<f64> = (0..space.n() * dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = xs.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return xs
                .chunks(dim)
                .map(|c| Scalar::new(field, &c.iter().map(|x| x / norm).collect::<Vec<_>>()).expect("chunk size"))
                .collect();
        }
    }
}

/// Unit tangent at the origin in direction `xi`.
fn origin_tangent(space: &HyperbolicSpace, xi: &[Scalar]) -> TangentVector {
    let mut entries = xi.to_vec();
    entries.push(Scalar::zero(space.field()));
    let u = FormVector::new(space.field(), entries).expect("valid length");
    TangentVector::new(space.origin(), u).expect("unit tangent at origin")
}

impl HyperbolicSpace {
    pub fn random_tangent(&self, p: &HPoint, rng: &mut SampleRng) -> Result<TangentVector> {
        let field = self.field();
        loop {
            let xs: Vec<f64> = (0..(self.n() + 1) * field.dim()).map(|_| rng.sample(StandardNormal)).collect();
            let raw = FormVector::from_real_coords(field, &xs)?;
            if let Ok(u) = TangentVector::normalized(p, &raw) {
                return Ok(u);
            }
        }
    }

    /// A point at distance at most `radius` from the origin.
    pub fn random_point_within(&self, rng: &mut SampleRng, radius: f64) -> HPoint {
        let u = origin_tangent(self, &unit_direction(self, rng));
        let r = rng.random_range(0.0..radius);
        geodesic_point(&u, r).expect("bounded parameter")
    }

    /// An isometrically embedded real plane through a random point.
    pub fn random_real_plane(&self, rng: &mut SampleRng) -> Result<RealPlane> {
        let o = self.random_point(rng);
        let u = self.random_tangent(&o, rng)?;
        let v = self.random_tangent(&o, rng)?;
        let w = bourdon_third_direction(&o, &u, &v)?;
        real_plane_completion(&o, &u, &w)
    }

    /// Two geodesics through a random point with independent random
    /// directions; for `K ≠ R` they are almost surely not coplanar.
    pub fn random_general_crossing(&self, rng: &mut SampleRng) -> Result<Crossing<Self>> {
        let o = self.random_point(rng);
        loop {
            let u = self.random_tangent(&o, rng)?;
            let v = self.random_tangent(&o, rng)?;
            if u.pairing(&v).norm() > 0.95 {
                continue;
            }
            let (alpha, beta) = endpoints(&u)?;
            let (gamma, delta) = endpoints(&v)?;
            return Ok(Crossing { alpha, beta, gamma, delta, point: o });
        }
    }

    /// Four boundary points of an embedded real plane, in cyclic order.
    pub fn random_planar_quadruple(&self, rng: &mut SampleRng) -> Result<[HBoundaryPoint; 4]> {
        let plane = self.random_real_plane(rng)?;
        let mut thetas: Vec<f64> = Vec::new();
        while thetas.len() < 4 {
            let th = rng.random_range(0.0..2.0 * PI);
            if thetas.iter().all(|x: &f64| angular_gap(*x, th) > 0.05) {
                thetas.push(th);
            }
        }
        thetas.sort_by(f64::total_cmp);
        Ok([
            plane.boundary_at(thetas[0])?,
            plane.boundary_at(thetas[1])?,
            plane.boundary_at(thetas[2])?,
            plane.boundary_at(thetas[3])?,
        ])
    }
}

fn angular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Minimal coordinate separation between sampled boundary points.
pub const IDEAL_SEPARATION: f64 = 0.05;

impl Sampler for HyperbolicSpace {
    fn random_ideal(&self, rng: &mut SampleRng) -> HBoundaryPoint {
        HBoundaryPoint::from_direction(self.field(), &unit_direction(self, rng)).expect("unit direction")
    }

    fn distinct_ideals(&self, rng: &mut SampleRng, k: usize) -> Vec<HBoundaryPoint> {
        let mut out: Vec<HBoundaryPoint> = Vec::with_capacity(k);
        while out.len() < k {
            let a = self.random_ideal(rng);
            if out.iter().all(|b| a.vector().max_abs_diff(b.vector()) > IDEAL_SEPARATION) {
                out.push(a);
            }
        }
        out
    }

    fn random_point(&self, rng: &mut SampleRng) -> HPoint {
        self.random_point_within(rng, POINT_RADIUS)
    }

    fn random_chart(&self, rng: &mut SampleRng) -> Result<Chart<Self>> {
        let o = self.origin();
        loop {
            let ideals = self.distinct_ideals(rng, 3);
            let [alpha, beta, gamma]: [HBoundaryPoint; 3] = ideals.try_into().expect("three ideals");
            let e = ChartElement::new(alpha, beta, gamma, rng.random_range(-1.5..1.5));
            let p = self.chart_point(&e)?;
            if self.distance(&o, &p)? <= CHART_RADIUS {
                return Ok(e);
            }
        }
    }

    fn random_crossing(&self, rng: &mut SampleRng) -> Result<Crossing<Self>> {
        let plane = self.random_real_plane(rng)?;
        let th1 = rng.random_range(0.0..PI);
        let th2 = th1 + rng.random_range(0.2..PI - 0.2);
        Ok(Crossing {
            alpha: plane.boundary_at(th1)?,
            beta: plane.boundary_at(th1 + PI)?,
            gamma: plane.boundary_at(th2)?,
            delta: plane.boundary_at(th2 + PI)?,
            point: plane.base().clone(),
        })
    }
}

impl TreeSpace {
    fn random_letter_after(&self, rng: &mut SampleRng, last: Option<u8>) -> u8 {
        loop {
            let l = rng.random_range(0..self.degree() as u8);
            if Some(l) != last {
                return l;
            }
        }
    }

    pub fn random_vertex(&self, rng: &mut SampleRng, max_depth: usize) -> TreeVertex {
        let depth = rng.random_range(0..=max_depth);
        let mut word = Vec::with_capacity(depth);
        for _ in 0..depth {
            let l = self.random_letter_after(rng, word.last().copied());
            word.push(l);
        }
        TreeVertex::new(word).expect("reduced by construction")
    }

    /// A random end extending the reduced word `start`.
    pub fn random_end_from(&self, rng: &mut SampleRng, start: &[u8]) -> TreeEnd {
        loop {
            let mut prefix = start.to_vec();
            for _ in 0..rng.random_range(0..=4) {
                let l = self.random_letter_after(rng, prefix.last().copied());
                prefix.push(l);
            }
            let len = rng.random_range(2..=4);
            let mut period: Vec<u8> = Vec::with_capacity(len);
            for _ in 0..len {
                let prev = period.last().copied().or(prefix.last().copied());
                let l = self.random_letter_after(rng, prev);
                period.push(l);
            }
            if let Ok(e) = TreeEnd::new(prefix, period) {
                return e;
            }
        }
    }

    /// A random end whose ray from `v` leaves along letter `l`.
    pub fn random_end_via(&self, rng: &mut SampleRng, v: &TreeVertex, l: u8) -> TreeEnd {
        let mut start = v.word().to_vec();
        if start.last() == Some(&l) {
            start.pop();
            let side = self.random_letter_after_two(rng, l, start.last().copied());
            start.push(side);
        } else {
            start.push(l);
        }
        self.random_end_from(rng, &start)
    }

    fn random_letter_after_two(&self, rng: &mut SampleRng, a: u8, b: Option<u8>) -> u8 {
        loop {
            let l = rng.random_range(0..self.degree() as u8);
            if l != a && Some(l) != b {
                return l;
            }
        }
    }

    /// Two distinct directions at `v`.
    fn random_direction_pair(&self, rng: &mut SampleRng) -> (u8, u8) {
        let a = rng.random_range(0..self.degree() as u8);
        let b = self.random_letter_after(rng, Some(a));
        (a, b)
    }
}

impl Sampler for TreeSpace {
    fn random_ideal(&self, rng: &mut SampleRng) -> TreeEnd {
        self.random_end_from(rng, &[])
    }

    fn random_point(&self, rng: &mut SampleRng) -> TreePoint {
        let v = self.random_vertex(rng, 5);
        if rng.random_bool(0.5) {
            return TreePoint::vertex(v);
        }
        let l = self.random_letter_after(rng, v.word().last().copied());
        self.on_edge(&v, l, Q::new(rng.random_range(1..4), 4))
    }

    fn random_chart(&self, rng: &mut SampleRng) -> Result<Chart<Self>> {
        let ideals = self.distinct_ideals(rng, 3);
        let [alpha, beta, gamma]: [TreeEnd; 3] = ideals.try_into().expect("three ideals");
        Ok(ChartElement::new(alpha, beta, gamma, Q::new(rng.random_range(-8..=8), 2)))
    }

    fn random_crossing(&self, rng: &mut SampleRng) -> Result<Crossing<Self>> {
        loop {
            let v = self.random_vertex(rng, 4);
            let (l1, l2) = self.random_direction_pair(rng);
            let (l3, l4) = self.random_direction_pair(rng);
            let alpha = self.random_end_via(rng, &v, l1);
            let beta = self.random_end_via(rng, &v, l2);
            let gamma = self.random_end_via(rng, &v, l3);
            let delta = self.random_end_via(rng, &v, l4);
            let ends = [&alpha, &beta, &gamma, &delta];
            if crate::boundary::ensure_distinct(self, &ends).is_err() {
                continue;
            }
            return Ok(Crossing { alpha, beta, gamma, delta, point: TreePoint::vertex(v) });
        }
    }
}

/// A rational in `[0, bound]` with denominator 2.
pub fn random_half_step(rng: &mut SampleRng, bound: Q) -> Q {
    let steps = (bound * q(2)).floor().to_integer();
    Q::new(rng.random_range(0..=steps), 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use rand::SeedableRng;

    #[test]
    fn tree_crossings_pass_through_point() {
        let t = TreeSpace::new(3).unwrap();
        let mut rng = SampleRng::seed_from_u64(1);
        for _ in 0..200 {
            let c = t.random_crossing(&mut rng).unwrap();
            assert!(t.on_line(&c.point, &c.alpha, &c.beta));
            assert!(t.on_line(&c.point, &c.gamma, &c.delta));
        }
    }

    #[test]
    fn hyperbolic_crossings_pass_through_point() {
        let x = HyperbolicSpace::new(Field::Complex, 2).unwrap();
        let mut rng = SampleRng::seed_from_u64(2);
        for _ in 0..50 {
            let c = x.random_crossing(&mut rng).unwrap();
            assert!(x.on_line(&c.point, &c.alpha, &c.beta).unwrap());
            assert!(x.on_line(&c.point, &c.gamma, &c.delta).unwrap());
        }
    }

    #[test]
    fn charts_stay_near_origin() {
        let x = HyperbolicSpace::new(Field::Quaternion, 2).unwrap();
        let mut rng = SampleRng::seed_from_u64(3);
        for _ in 0..50 {
            let e = x.random_chart(&mut rng).unwrap();
            let p = x.chart_point(&e).unwrap();
            assert!(x.distance(&x.origin(), &p).unwrap() <= CHART_RADIUS);
        }
    }
}

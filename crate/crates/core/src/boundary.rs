//! Boundary calculus shared by both model families.
//!
//! Everything here is written against [`BoundaryModel`]: Gromov products,
//! the Bourdon metric, cross ratios, special points and charts
//! `[α, β]_γ(t)`. Hyperbolic spaces evaluate in `f64`; trees stay in exact
//! rationals until a value leaves through [`Coord::to_f64`].

use std::fmt::Debug;
use std::ops::{Add, Neg, Sub};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Scalar};
use crate::error::{GeometryError, Result};
use crate::hyperbolic::{
    self, bourdon_third_direction, endpoints, ends_through, gromov_product_closed, horospherical_closed, tangent_basis,
    HBoundaryPoint, HLine, HPoint, HyperbolicSpace, TangentVector,
};
use crate::tree::{rat_to_f64, TreeEnd, TreePoint, TreeSpace, Q};

/// Scalar type of chart coordinates and Gromov products.
pub trait Coord:
    Copy + PartialOrd + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    const EXACT: bool;
    const ZERO: Self;
    fn ratio(num: i64, den: i64) -> Self;
    fn to_f64(self) -> f64;
    fn magnitude(self) -> Self;
    fn half(self) -> Self;
}

impl Coord for f64 {
    const EXACT: bool = false;
    const ZERO: Self = 0.0;
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn magnitude(self) -> Self {
        self.abs()
    }
    fn half(self) -> Self {
        0.5 * self
    }
}

impl Coord for Q {
    const EXACT: bool = true;
    const ZERO: Self = Q::new_raw(0, 1);
    fn ratio(num: i64, den: i64) -> Self {
        Q::new(num, den)
    }
    fn to_f64(self) -> f64 {
        rat_to_f64(self)
    }
    fn magnitude(self) -> Self {
        Signed::abs(&self)
    }
    fn half(self) -> Self {
        self / Q::from_integer(2)
    }
}

/// `⊕`: `+` on hyperbolic spaces, `max` on trees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OPlus {
    Sum,
    Max,
}

impl OPlus {
    /// `e^x ⊕ e^y - 1`, from the logarithms.
    pub fn defect<R: Coord>(self, x: R, y: R) -> f64 {
        match self {
            OPlus::Sum => x.to_f64().exp() + y.to_f64().exp() - 1.0,
            OPlus::Max => {
                let m = if x > y { x } else { y };
                if m == R::ZERO {
                    0.0
                } else {
                    m.to_f64().exp() - 1.0
                }
            }
        }
    }
}

/// A tuple `(α, β, γ, t)` naming the point `[α, β]_γ(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartElement<I, R> {
    pub alpha: I,
    pub beta: I,
    pub gamma: I,
    pub t: R,
}

impl<I: Clone, R: Coord> ChartElement<I, R> {
    pub fn new(alpha: I, beta: I, gamma: I, t: R) -> Self {
        Self { alpha, beta, gamma, t }
    }

    /// `(β, α, γ, -t)`, which names the same point.
    pub fn reversed(&self) -> Self {
        Self { alpha: self.beta.clone(), beta: self.alpha.clone(), gamma: self.gamma.clone(), t: -self.t }
    }

    pub fn shifted(&self, dt: R) -> Self {
        Self { t: self.t + dt, ..self.clone() }
    }
}

pub type Chart<M> = ChartElement<<M as BoundaryModel>::Ideal, <M as BoundaryModel>::Real>;

/// A proper CAT(-1) model with its boundary.
///
/// Model-side operations (distances, special points, locators) live here;
/// the cross-ratio calculus built on top of them is generic.
pub trait BoundaryModel: Sync {
    type Point: Clone + Debug + Send + Sync;
    type Ideal: Clone + Debug + Send + Sync;
    type Real: Coord;

    fn oplus(&self) -> OPlus;
    /// Equality tolerance for points and coordinates; zero for exact models.
    fn eq_tol(&self) -> f64;
    fn base_point(&self) -> Self::Point;
    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<Self::Real>;
    fn same_ideal(&self, a: &Self::Ideal, b: &Self::Ideal) -> bool;
    /// `(a|b)_o` for distinct boundary points.
    fn gromov_product(&self, o: &Self::Point, a: &Self::Ideal, b: &Self::Ideal) -> Result<Self::Real>;
    /// `B_a(x, y)`.
    fn horospherical(&self, a: &Self::Ideal, x: &Self::Point, y: &Self::Point) -> Result<Self::Real>;
    /// `p(a, b; c)`.
    fn special_point(&self, a: &Self::Ideal, b: &Self::Ideal, c: &Self::Ideal) -> Result<Self::Point>;
    /// `[α, β]_γ(t)`.
    fn chart_point(&self, e: &Chart<Self>) -> Result<Self::Point>;
    /// Chart coordinate in `[a, b]_c` of the projection of `p` onto `[a, b]`.
    fn coordinate_on_line(
        &self,
        p: &Self::Point,
        a: &Self::Ideal,
        b: &Self::Ideal,
        c: &Self::Ideal,
    ) -> Result<Self::Real>;
    fn on_line(&self, p: &Self::Point, a: &Self::Ideal, b: &Self::Ideal) -> Result<bool>;
    /// Ends of a geodesic through `p` and `q`; `variant` picks among
    /// admissible choices (orientation, or extensions in a tree).
    fn line_through_points(
        &self,
        p: &Self::Point,
        q: &Self::Point,
        variant: usize,
    ) -> Result<(Self::Ideal, Self::Ideal)>;
    /// A geodesic through `o` meeting each given line in a configuration
    /// where the `⊕`-condition holds, with fresh endpoints.
    fn third_line(
        &self,
        o: &Self::Point,
        first: (&Self::Ideal, &Self::Ideal),
        second: (&Self::Ideal, &Self::Ideal),
    ) -> Result<(Self::Ideal, Self::Ideal)>;
    /// A deterministic boundary point distinct from `avoid`.
    fn fresh_ideal(&self, avoid: &[&Self::Ideal], salt: u64) -> Self::Ideal;

    fn same_point(&self, p: &Self::Point, q: &Self::Point) -> Result<bool> {
        Ok(self.distance(p, q)?.to_f64() <= self.eq_tol())
    }

    /// Whether a value is zero up to the model tolerance.
    fn negligible(&self, x: Self::Real) -> bool {
        x.magnitude().to_f64() <= self.eq_tol()
    }
}

pub fn ensure_distinct<M: BoundaryModel + ?Sized>(model: &M, ideals: &[&M::Ideal]) -> Result<()> {
    for i in 0..ideals.len() {
        for j in i + 1..ideals.len() {
            if model.same_ideal(ideals[i], ideals[j]) {
                return Err(GeometryError::RepeatedBoundaryPoint);
            }
        }
    }
    Ok(())
}

/// `(x|y)_o = ½(d(x,o) + d(y,o) - d(x,y))`.
pub fn gromov_product_points<M: BoundaryModel>(model: &M, o: &M::Point, x: &M::Point, y: &M::Point) -> Result<M::Real> {
    Ok((model.distance(x, o)? + model.distance(y, o)? - model.distance(x, y)?).half())
}

/// `d_o(a, b) = e^{-(a|b)_o}`, zero on the diagonal.
pub fn bourdon_metric<M: BoundaryModel>(model: &M, o: &M::Point, a: &M::Ideal, b: &M::Ideal) -> Result<f64> {
    if model.same_ideal(a, b) {
        return Ok(0.0);
    }
    Ok((-model.gromov_product(o, a, b)?.to_f64()).exp())
}

/// `ln ω(a, b; c, d)` computed from Gromov products at `o`.
pub fn log_cross_ratio_at<M: BoundaryModel>(
    model: &M,
    o: &M::Point,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<M::Real> {
    ensure_distinct(model, &[a, b, c, d])?;
    let g = |x, y| model.gromov_product(o, x, y);
    Ok(g(a, d)? + g(b, c)? - g(a, c)? - g(b, d)?)
}

/// `ln ω(a, b; c, d)` at the model's base point.
pub fn log_cross_ratio<M: BoundaryModel>(
    model: &M,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<M::Real> {
    log_cross_ratio_at(model, &model.base_point(), a, b, c, d)
}

/// `ω(a, b; c, d) = d_o(a,c) d_o(b,d) / (d_o(a,d) d_o(b,c))`.
pub fn cross_ratio<M: BoundaryModel>(model: &M, a: &M::Ideal, b: &M::Ideal, c: &M::Ideal, d: &M::Ideal) -> Result<f64> {
    Ok(log_cross_ratio(model, a, b, c, d)?.to_f64().exp())
}

/// Residual of the base change `(a|b)_y = (a|b)_x - ½(B_a(x,y) + B_b(x,y))`.
pub fn base_change_residual<M: BoundaryModel>(
    model: &M,
    x: &M::Point,
    y: &M::Point,
    a: &M::Ideal,
    b: &M::Ideal,
) -> Result<f64> {
    let lhs = model.gromov_product(y, a, b)?;
    let rhs = model.gromov_product(x, a, b)? - (model.horospherical(a, x, y)? + model.horospherical(b, x, y)?).half();
    Ok((lhs - rhs).magnitude().to_f64())
}

/// `ω(α,δ;γ,β) + ω(α,γ;δ,β) - 1`, nonnegative by the Ptolemy inequality.
pub fn ptolemy_defect<M: BoundaryModel>(
    model: &M,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<f64> {
    let x = log_cross_ratio(model, a, d, c, b)?;
    let y = log_cross_ratio(model, a, c, d, b)?;
    if M::Real::EXACT {
        // Exact logs: decide the sign before rounding.
        if x >= M::Real::ZERO || y >= M::Real::ZERO {
            return Ok((x.to_f64().exp() + y.to_f64().exp() - 1.0).max(0.0));
        }
    }
    Ok(x.to_f64().exp() + y.to_f64().exp() - 1.0)
}

/// `ω(α,γ;δ,β) ⊕ ω(α,δ;γ,β) - 1`.
pub fn oplus_defect<M: BoundaryModel>(
    model: &M,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<f64> {
    let x = log_cross_ratio(model, a, c, d, b)?;
    let y = log_cross_ratio(model, a, d, c, b)?;
    Ok(model.oplus().defect(x, y))
}

/// Re-express a chart element in the `δ`-chart of the same geodesic.
pub fn chart_transfer<M: BoundaryModel>(model: &M, e: &Chart<M>, delta: &M::Ideal) -> Result<Chart<M>> {
    if model.same_ideal(&e.gamma, delta) {
        return Ok(e.clone());
    }
    ensure_distinct(model, &[&e.alpha, &e.beta, delta])?;
    let shift = log_cross_ratio(model, &e.alpha, &e.beta, &e.gamma, delta)?;
    Ok(ChartElement::new(e.alpha.clone(), e.beta.clone(), delta.clone(), e.t + shift))
}

/// Signed position of `p(a,b;d)` in the `c`-chart, read off the model.
pub fn special_point_offset<M: BoundaryModel>(
    model: &M,
    a: &M::Ideal,
    b: &M::Ideal,
    c: &M::Ideal,
    d: &M::Ideal,
) -> Result<M::Real> {
    let pd = model.special_point(a, b, d)?;
    model.coordinate_on_line(&pd, a, b, c)
}

// ---------------------------------------------------------------------------
// Hyperbolic spaces.

/// Bracket half-width for the special-point bisection guard.
const SPECIAL_BRACKET: f64 = 1e-6;
const SPECIAL_TOL: f64 = 1e-10;

impl HyperbolicSpace {
    fn line(&self, a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<HLine> {
        HLine::new(a, b)
    }

    /// Line coordinate of `p(a, b; c)`, confirmed by bisection on
    /// `s ↦ (a|c)_{x(s)} - (b|c)_{x(s)}`, which increases with slope 1.
    fn special_coordinate(
        &self,
        line: &HLine,
        a: &HBoundaryPoint,
        b: &HBoundaryPoint,
        c: &HBoundaryPoint,
    ) -> Result<f64> {
        let s0 = line.foot_coordinate(c);
        let f = |s: f64| -> Result<f64> {
            let p = line.point(s)?;
            Ok(gromov_product_closed(&p, a, c)? - gromov_product_closed(&p, b, c)?)
        };
        let (mut lo, mut hi) = (s0 - SPECIAL_BRACKET, s0 + SPECIAL_BRACKET);
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if !(flo <= 0.0 && fhi >= 0.0) {
            return Err(GeometryError::Internal("special point not bracketed"));
        }
        while hi - lo > SPECIAL_TOL {
            let mid = 0.5 * (lo + hi);
            if f(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (0.5 * (lo + hi) - s0).abs() > 1e-9 {
            return Err(GeometryError::Internal("special point bisection disagrees"));
        }
        Ok(s0)
    }

    /// A unit tangent direction derived from `salt`.
    fn salted_direction(&self, salt: u64) -> Vec<Scalar> {
        let mut rng = ChaCha8Rng::seed_from_u64(salt);
        let field = self.field();
        let dim = field.dim();
        loop {
            let xs: Vec<f64> = (0..self.n() * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = xs.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.1 && norm <= 1.0 {
                return xs
                    .chunks(dim)
                    .map(|c| Scalar::new(field, &c.iter().map(|x| x / norm).collect::<Vec<_>>()).unwrap())
                    .collect();
            }
        }
    }

    /// The angle at `o` between the rays toward `a` and `b`. Only defined
    /// in the real hyperbolic plane.
    pub fn angle_at(&self, o: &HPoint, a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<f64> {
        if self.field() != Field::Real || self.n() != 2 {
            return Err(GeometryError::Unsupported("angles are only provided in the real hyperbolic plane"));
        }
        let u = TangentVector::toward(o, a)?;
        let v = TangentVector::toward(o, b)?;
        Ok(u.pairing(&v).re().clamp(-1.0, 1.0).acos())
    }
}

impl BoundaryModel for HyperbolicSpace {
    type Point = HPoint;
    type Ideal = HBoundaryPoint;
    type Real = f64;

    fn oplus(&self) -> OPlus {
        OPlus::Sum
    }

    fn eq_tol(&self) -> f64 {
        match self.field() {
            Field::Quaternion | Field::Octonion => 1e-7,
            _ => 1e-8,
        }
    }

    fn base_point(&self) -> HPoint {
        self.origin()
    }

    fn distance(&self, p: &HPoint, q: &HPoint) -> Result<f64> {
        hyperbolic::distance(p, q)
    }

    fn same_ideal(&self, a: &HBoundaryPoint, b: &HBoundaryPoint) -> bool {
        a.projectively_eq(b)
    }

    fn gromov_product(&self, o: &HPoint, a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<f64> {
        if a.projectively_eq(b) {
            return Err(GeometryError::RepeatedBoundaryPoint);
        }
        gromov_product_closed(o, a, b)
    }

    fn horospherical(&self, a: &HBoundaryPoint, x: &HPoint, y: &HPoint) -> Result<f64> {
        Ok(horospherical_closed(a, x, y))
    }

    fn special_point(&self, a: &HBoundaryPoint, b: &HBoundaryPoint, c: &HBoundaryPoint) -> Result<HPoint> {
        ensure_distinct(self, &[a, b, c])?;
        let line = self.line(a, b)?;
        line.point(self.special_coordinate(&line, a, b, c)?)
    }

    fn chart_point(&self, e: &Chart<Self>) -> Result<HPoint> {
        ensure_distinct(self, &[&e.alpha, &e.beta, &e.gamma])?;
        let line = self.line(&e.alpha, &e.beta)?;
        line.point(line.foot_coordinate(&e.gamma) + e.t)
    }

    fn coordinate_on_line(
        &self,
        p: &HPoint,
        a: &HBoundaryPoint,
        b: &HBoundaryPoint,
        c: &HBoundaryPoint,
    ) -> Result<f64> {
        ensure_distinct(self, &[a, b, c])?;
        let line = self.line(a, b)?;
        Ok(line.coordinate_of(p) - line.foot_coordinate(c))
    }

    fn on_line(&self, p: &HPoint, a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<bool> {
        Ok(self.line(a, b)?.distance_to(p)? <= self.eq_tol())
    }

    fn line_through_points(&self, p: &HPoint, q: &HPoint, variant: usize) -> Result<(HBoundaryPoint, HBoundaryPoint)> {
        let (back, fwd) = match ends_through(p, q) {
            Err(GeometryError::Degenerate(_)) => {
                let basis = tangent_basis(p)?;
                endpoints(&basis[(variant / 2) % basis.len()])?
            }
            other => other?,
        };
        // The line through two distinct points is unique; variants only
        // flip its orientation.
        Ok(if variant % 2 == 0 { (back, fwd) } else { (fwd, back) })
    }

    fn third_line(
        &self,
        o: &HPoint,
        first: (&HBoundaryPoint, &HBoundaryPoint),
        second: (&HBoundaryPoint, &HBoundaryPoint),
    ) -> Result<(HBoundaryPoint, HBoundaryPoint)> {
        if !self.on_line(o, first.0, first.1)? || !self.on_line(o, second.0, second.1)? {
            return Err(GeometryError::NotIntersecting);
        }
        let u = TangentVector::toward(o, first.1)?;
        let v = TangentVector::toward(o, second.1)?;
        let w = bourdon_third_direction(o, &u, &v)?;
        endpoints(&w)
    }

    fn fresh_ideal(&self, avoid: &[&HBoundaryPoint], salt: u64) -> HBoundaryPoint {
        let mut k = salt;
        loop {
            let xi = self.salted_direction(k);
            let a = HBoundaryPoint::from_direction(self.field(), &xi).expect("unit direction");
            // Keep a visible margin from the avoided points.
            if avoid.iter().all(|b| a.vector().max_abs_diff(b.vector()) > 1e-3) {
                return a;
            }
            k = k.wrapping_add(0x9e37_79b9_7f4a_7c15);
        }
    }
}

// ---------------------------------------------------------------------------
// Trees.

impl BoundaryModel for TreeSpace {
    type Point = TreePoint;
    type Ideal = TreeEnd;
    type Real = Q;

    fn oplus(&self) -> OPlus {
        OPlus::Max
    }

    fn eq_tol(&self) -> f64 {
        0.0
    }

    fn base_point(&self) -> TreePoint {
        self.root()
    }

    fn distance(&self, p: &TreePoint, q: &TreePoint) -> Result<Q> {
        Ok(TreeSpace::distance(self, p, q))
    }

    fn same_ideal(&self, a: &TreeEnd, b: &TreeEnd) -> bool {
        a == b
    }

    fn gromov_product(&self, o: &TreePoint, a: &TreeEnd, b: &TreeEnd) -> Result<Q> {
        self.gromov_product_ends(o, a, b)
    }

    fn horospherical(&self, a: &TreeEnd, x: &TreePoint, y: &TreePoint) -> Result<Q> {
        Ok(TreeSpace::horospherical(self, a, x, y))
    }

    fn special_point(&self, a: &TreeEnd, b: &TreeEnd, c: &TreeEnd) -> Result<TreePoint> {
        self.end_geodesic_point(a, b, c, Q::ZERO)
    }

    fn chart_point(&self, e: &Chart<Self>) -> Result<TreePoint> {
        self.end_geodesic_point(&e.alpha, &e.beta, &e.gamma, e.t)
    }

    fn coordinate_on_line(&self, p: &TreePoint, a: &TreeEnd, b: &TreeEnd, c: &TreeEnd) -> Result<Q> {
        ensure_distinct(self, &[a, b, c])?;
        Ok(self.line_coordinate(a, b, p) - self.tripod_coordinate(a, b, c)?)
    }

    fn on_line(&self, p: &TreePoint, a: &TreeEnd, b: &TreeEnd) -> Result<bool> {
        Ok(TreeSpace::on_line(self, p, a, b))
    }

    fn line_through_points(&self, p: &TreePoint, q: &TreePoint, variant: usize) -> Result<(TreeEnd, TreeEnd)> {
        Ok(TreeSpace::line_through_points(self, p, q, variant, &[]))
    }

    fn third_line(
        &self,
        o: &TreePoint,
        first: (&TreeEnd, &TreeEnd),
        second: (&TreeEnd, &TreeEnd),
    ) -> Result<(TreeEnd, TreeEnd)> {
        if !TreeSpace::on_line(self, o, first.0, first.1) || !TreeSpace::on_line(self, o, second.0, second.1) {
            return Err(GeometryError::NotIntersecting);
        }
        let avoid = [first.0, first.1, second.0, second.1];
        Ok(TreeSpace::line_through_points(self, o, o, 0, &avoid))
    }

    fn fresh_ideal(&self, avoid: &[&TreeEnd], salt: u64) -> TreeEnd {
        let mut rng = ChaCha8Rng::seed_from_u64(salt);
        let mut start: Vec<u8> = Vec::new();
        for _ in 0..rng.random_range(0..4) {
            let l = loop {
                let l = rng.random_range(0..self.degree() as u8);
                if start.last() != Some(&l) {
                    break l;
                }
            };
            start.push(l);
        }
        self.fresh_tail(&start, avoid)
    }
}

//! Projective model of `KH^n`.
//!
//! Points are classes `[x]` with `⟨x|x⟩ < 0`, boundary points classes of
//! nonzero null vectors. Every stored representative is canonical:
//!
//! * [`HPoint`]: `⟨x|x⟩ = -1` and, over associative algebras, a real
//!   positive last coordinate;
//! * [`HBoundaryPoint`]: last coordinate exactly `1`.
//!
//! Octonionic support stops at points and the metric; boundary calculus
//! over O is rejected with [`GeometryError::Unsupported`].

use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebra::{form, form_sq, is_associative_triple, Field, FormVector, Scalar};
use crate::error::{GeometryError, Result};

/// Projective equality tolerance on canonical representatives.
pub const PROJECTIVE_TOL: f64 = 1e-9;
/// Largest geodesic parameter accepted by [`geodesic_point`].
pub const MAX_PARAMETER: f64 = 40.0;
/// Null-vector tolerance after canonicalization.
/// Largest null-cone defect accepted (and projected away) when building
/// a boundary point.
pub const NULL_TOL: f64 = 1e-6;
/// Reality tolerance for pairings.
pub const REAL_TOL: f64 = 1e-10;

/// `KH^n` for `K ∈ {R, C, H}` and `n ≥ 2`, or `OH^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HyperbolicSpace {
    field: Field,
    n: usize,
}

impl HyperbolicSpace {
    pub fn new(field: Field, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::DimensionMismatch { expected: 2, found: n });
        }
        if field == Field::Octonion && n != 2 {
            return Err(GeometryError::DimensionMismatch { expected: 2, found: n });
        }
        Ok(Self { field, n })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The base point `[(0, …, 0, 1)]`.
    pub fn origin(&self) -> HPoint {
        HPoint { v: FormVector::origin(self.field, self.n) }
    }
}

/// Right-multiply by the unit scalar that turns the last coordinate real
/// and positive.
fn fix_last_phase(v: &FormVector) -> FormVector {
    match v.last().unit() {
        Some(u) if !v.field().is_associative() => {
            // Only real rescaling is legitimate without an associativity proof.
            if u.is_real(0.0) {
                v.scale(u.re())
            } else {
                v.clone()
            }
        }
        Some(u) => v.right_mul(&u.conj()),
        None => v.clone(),
    }
}

/// A point of `KH^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoint {
    v: FormVector,
}

impl HPoint {
    pub fn new(v: FormVector) -> Result<Self> {
        if !is_associative_triple(&v) {
            return Err(GeometryError::NonAssociative);
        }
        let q = form_sq(&v);
        let scale = v.max_abs().powi(2);
        if !(q < -1e-14 * scale) {
            return Err(GeometryError::NotTimelike(q));
        }
        let v = fix_last_phase(&v.scale(1.0 / (-q).sqrt()));
        Ok(Self { v })
    }

    /// Wrap a vector already known to satisfy `⟨v|v⟩ = -1`; only the phase
    /// of the last coordinate is adjusted.
    pub(crate) fn from_unit(v: FormVector) -> Self {
        Self { v: fix_last_phase(&v) }
    }

    pub fn vector(&self) -> &FormVector {
        &self.v
    }

    pub fn field(&self) -> Field {
        self.v.field()
    }

    pub fn projectively_eq(&self, other: &Self) -> bool {
        let scale = self.v.max_abs().max(other.v.max_abs()).max(1.0);
        self.v.max_abs_diff(&other.v) <= PROJECTIVE_TOL * scale
    }

    /// Poincaré-ball coordinates `x_k / (1 + x_{n+1})` (real parts only).
    pub fn ball_coords(&self) -> Vec<f64> {
        let n = self.v.n();
        let denom = 1.0 + self.v.last().re();
        self.v.entries()[..n].iter().flat_map(|e| e.coeffs().iter().map(move |c| c / denom)).collect()
    }
}

/// A point of `∂KH^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HBoundaryPoint {
    v: FormVector,
}

impl HBoundaryPoint {
    pub fn new(v: FormVector) -> Result<Self> {
        if !v.field().is_associative() {
            return Err(GeometryError::Unsupported("octonionic boundary points"));
        }
        let last_inv =
            v.last().inverse().map_err(|_| GeometryError::Degenerate("null vector with zero last coordinate"))?;
        let mut v = v.right_mul(&last_inv);
        let n = v.n();
        v.set(n, Scalar::one(v.field()));
        let q = form_sq(&v);
        if q.abs() > NULL_TOL {
            return Err(GeometryError::NotNull(q));
        }
        // Rescale the spatial part to unit length.
        let mut v = v.scale(1.0 / (1.0 + q).sqrt());
        v.set(n, Scalar::one(v.field()));
        Ok(Self { v })
    }

    /// Boundary point in direction `ξ` (a unit vector of `K^n`) from the origin.
    pub fn from_direction(field: Field, xi: &[Scalar]) -> Result<Self> {
        let mut entries = xi.to_vec();
        entries.push(Scalar::one(field));
        Self::new(FormVector::new(field, entries)?)
    }

    pub fn vector(&self) -> &FormVector {
        &self.v
    }

    pub fn projectively_eq(&self, other: &Self) -> bool {
        self.v.max_abs_diff(&other.v) <= PROJECTIVE_TOL
    }

    /// Coordinates on the unit sphere of the ball model.
    pub fn sphere_coords(&self) -> Vec<f64> {
        let n = self.v.n();
        self.v.entries()[..n].iter().flat_map(|e| e.coeffs().iter().copied()).collect()
    }
}

/// A unit tangent vector `u ∈ x^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: HPoint,
    u: FormVector,
}

impl TangentVector {
    /// Checked constructor: `u` must be orthogonal to the base and unit.
    pub fn new(base: HPoint, u: FormVector) -> Result<Self> {
        let scale = 1.0 + base.v.max_abs().powi(2) + u.max_abs().powi(2);
        let ortho = form(&base.v, &u).norm();
        let unit = (form_sq(&u) - 1.0).abs();
        if ortho > 1e-10 * scale || unit > 1e-10 * scale {
            return Err(GeometryError::BadTangent(ortho.max(unit)));
        }
        Ok(Self { base, u })
    }

    /// Project a raw vector onto `x^⊥` and normalize it.
    pub fn normalized(base: &HPoint, raw: &FormVector) -> Result<Self> {
        let x = &base.v;
        let p = raw + &x.right_mul(&form(x, raw));
        let q = form_sq(&p);
        if q <= 1e-24 {
            return Err(GeometryError::Degenerate("tangent vector vanishes"));
        }
        Ok(Self { base: base.clone(), u: p.scale(1.0 / q.sqrt()) })
    }

    /// The unit tangent at `base` pointing toward the boundary point `a`.
    pub fn toward(base: &HPoint, a: &HBoundaryPoint) -> Result<Self> {
        let x = &base.v;
        let mu = -form(x, &a.v);
        let proj = &a.v + &x.right_mul(&form(x, &a.v));
        let u = proj.right_mul(&mu.inverse()?);
        Self::normalized(base, &u)
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn vector(&self) -> &FormVector {
        &self.u
    }

    pub fn negate(&self) -> Self {
        Self { base: self.base.clone(), u: self.u.scale(-1.0) }
    }

    /// `⟨self|other⟩`.
    pub fn pairing(&self, other: &Self) -> Scalar {
        form(&self.u, &other.u)
    }
}

fn acosh_stable(c: f64) -> f64 {
    // ln(c + sqrt(c² - 1)) without forming c² for huge c.
    if c > 1e8 {
        c.ln() + std::f64::consts::LN_2
    } else {
        c.max(1.0).acosh()
    }
}

/// `d([x], [y])`, with `cosh² d = ⟨x|y⟩⟨y|x⟩ / (⟨x|x⟩⟨y|y⟩)`.
pub fn distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    if p.field() != q.field() || p.v.len() != q.v.len() {
        return Err(GeometryError::FieldMismatch(p.field(), q.field()));
    }
    if p.field() == Field::Octonion {
        let (x, y) = normalize_octonion_pair(p, q)?;
        return Ok(octonion_distance(&x, &y));
    }
    let g = form(&p.v, &q.v);
    let c = g.norm();
    if c >= 2.0 {
        return Ok(acosh_stable(c));
    }
    // Near the diagonal: align phases and use 4 sinh²(d/2) = ⟨y'-x|y'-x⟩.
    let lambda = match g.unit() {
        Some(u) => -u.conj(),
        None => Scalar::one(p.field()),
    };
    let aligned = q.v.right_mul(&lambda);
    let diff = &aligned - &p.v;
    let s = form_sq(&diff).max(0.0);
    Ok(2.0 * (s.sqrt() / 2.0).asinh())
}

fn octonion_distance(x: &FormVector, y: &FormVector) -> f64 {
    let gxy = form(x, y);
    let gyx = form(y, x);
    let num = (gxy * gyx).re();
    let den = form_sq(x) * form_sq(y);
    let r = num / den;
    if r < 4.0 {
        (r - 1.0).max(0.0).sqrt().asinh()
    } else {
        acosh_stable(r.sqrt())
    }
}

/// Rescale octonionic representatives so that some `x_i` and `y_j`
/// (`i ≠ j`) are real. Scalings use conjugates of the vector's own entries,
/// which stay inside the associative subalgebra generated by the entries.
pub fn normalize_octonion_pair(p: &HPoint, q: &HPoint) -> Result<(FormVector, FormVector)> {
    if !is_associative_triple(&p.v) || !is_associative_triple(&q.v) {
        return Err(GeometryError::NonAssociative);
    }
    let argmax = |v: &FormVector, skip: Option<usize>| {
        (0..v.len())
            .filter(|k| Some(*k) != skip)
            .max_by(|a, b| v.entry(*a).norm().total_cmp(&v.entry(*b).norm()))
            .expect("nonempty")
    };
    let realify = |v: &FormVector, k: usize| match v.entry(k).unit() {
        Some(u) => v.right_mul(&u.conj()),
        None => v.clone(),
    };
    let i = argmax(&p.v, None);
    let j = argmax(&q.v, Some(i));
    let x = realify(&p.v, i);
    let y = realify(&q.v, j);
    if !x.entry(i).is_real(1e-12) || !y.entry(j).is_real(1e-12) {
        return Err(GeometryError::Internal("octonion normalization lost reality"));
    }
    Ok((x, y))
}

/// `c(t) = [cosh t · x + sinh t · u]`.
pub fn geodesic_point(u: &TangentVector, t: f64) -> Result<HPoint> {
    if !t.is_finite() || t.abs() > MAX_PARAMETER {
        return Err(GeometryError::ParameterRange(t));
    }
    let v = u.base.v.lin_comb(t.cosh(), &u.u, t.sinh());
    Ok(HPoint::from_unit(v))
}

/// Backward and forward endpoints `[x - u]`, `[x + u]` of the geodesic.
pub fn endpoints(u: &TangentVector) -> Result<(HBoundaryPoint, HBoundaryPoint)> {
    let x = &u.base.v;
    Ok((HBoundaryPoint::new(x - &u.u)?, HBoundaryPoint::new(x + &u.u)?))
}

/// A geodesic line stored as null representatives with `⟨a|b⟩ = -1/2`, so
/// that `s ↦ [a e^{-s} + b e^{s}]` is an arclength parametrization.
#[derive(Clone, Debug)]
pub struct HLine {
    a: FormVector,
    b: FormVector,
}

impl HLine {
    pub fn new(a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<Self> {
        if a.projectively_eq(b) {
            return Err(GeometryError::RepeatedBoundaryPoint);
        }
        let g = form(&a.v, &b.v);
        let mag = g.norm();
        if mag < 1e-14 {
            return Err(GeometryError::RepeatedBoundaryPoint);
        }
        let mu = -g.unit().expect("nonzero").conj();
        let k = 1.0 / (2.0 * mag).sqrt();
        Ok(Self { a: a.v.scale(k), b: b.v.right_mul(&mu).scale(k) })
    }

    pub fn point(&self, s: f64) -> Result<HPoint> {
        if !s.is_finite() || s.abs() > MAX_PARAMETER {
            return Err(GeometryError::ParameterRange(s));
        }
        Ok(HPoint::from_unit(self.a.lin_comb((-s).exp(), &self.b, s.exp())))
    }

    /// Unit tangent at `point(s)`, pointing toward `b`.
    pub fn tangent(&self, s: f64) -> Result<TangentVector> {
        let base = self.point(s)?;
        let raw = self.a.lin_comb(-(-s).exp(), &self.b, s.exp());
        // Re-project against the phase-adjusted base representative.
        TangentVector::normalized(&base, &raw_aligned(&base, &raw, &self.a.lin_comb((-s).exp(), &self.b, s.exp())))
    }

    /// Line coordinate of a point (its orthogonal projection for points
    /// off the line).
    pub fn coordinate_of(&self, p: &HPoint) -> f64 {
        0.5 * (form(&self.a, &p.v).norm() / form(&self.b, &p.v).norm()).ln()
    }

    /// Line coordinate of the foot of the perpendicular from a boundary point.
    pub fn foot_coordinate(&self, c: &HBoundaryPoint) -> f64 {
        0.5 * (form(&self.a, &c.v).norm() / form(&self.b, &c.v).norm()).ln()
    }

    /// Distance from a point to the line.
    pub fn distance_to(&self, p: &HPoint) -> Result<f64> {
        let s = self.coordinate_of(p);
        distance(&self.point(s)?, p)
    }
}

/// Express `raw` (a tangent at the unphased representative `unphased`)
/// relative to the phase-adjusted representative stored in `base`.
fn raw_aligned(base: &HPoint, raw: &FormVector, unphased: &FormVector) -> FormVector {
    match unphased.last().unit() {
        Some(u) if base.field().is_associative() => raw.right_mul(&u.conj()),
        _ => raw.clone(),
    }
}

/// Base point and unit tangent (toward `b`) of the geodesic `[a, b]`.
pub fn line_through(a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<(HPoint, TangentVector)> {
    let line = HLine::new(a, b)?;
    let t = line.tangent(0.0)?;
    Ok((t.base.clone(), t))
}

/// The unit tangent at `p` pointing to `q` together with `d(p, q)`.
pub fn direction_to(p: &HPoint, q: &HPoint) -> Result<(TangentVector, f64)> {
    let d = distance(p, q)?;
    if d < 1e-12 {
        return Err(GeometryError::Degenerate("coincident points"));
    }
    let g = form(&p.v, &q.v);
    let lambda = -g.unit().expect("nonzero").conj();
    let y = q.v.right_mul(&lambda);
    let raw = y.lin_comb(1.0, &p.v, -d.cosh());
    Ok((TangentVector::normalized(p, &raw)?, d))
}

/// Ends of the geodesic through distinct points `p` and `q`, the one
/// behind `p` first. They are the null vectors `p - e^{-d} q'` and
/// `q' - e^{-d} p` of the span, where `q' = qλ` has `⟨p|q'⟩ = -cosh d`;
/// no coefficient exceeds one, so far points keep their precision.
pub fn ends_through(p: &HPoint, q: &HPoint) -> Result<(HBoundaryPoint, HBoundaryPoint)> {
    let d = distance(p, q)?;
    if d < 1e-12 {
        return Err(GeometryError::Degenerate("coincident points"));
    }
    let g = form(&p.v, &q.v);
    let lambda = -g.unit().expect("nonzero").conj();
    let q1 = q.v.right_mul(&lambda);
    let k = (-d).exp();
    Ok((HBoundaryPoint::new(p.v.lin_comb(1.0, &q1, -k))?, HBoundaryPoint::new(q1.lin_comb(1.0, &p.v, -k))?))
}

/// The geodesic symmetry at `o`: `y ↦ -y - 2 o ⟨o|y⟩`.
fn symmetry_vector(o: &HPoint, y: &FormVector) -> FormVector {
    let g = form(&o.v, y);
    let oy = o.v.right_mul(&g);
    y.lin_comb(-1.0, &oy, -2.0)
}

pub fn geodesic_symmetry(o: &HPoint, p: &HPoint) -> HPoint {
    HPoint::from_unit(symmetry_vector(o, &p.v))
}

pub fn geodesic_symmetry_boundary(o: &HPoint, a: &HBoundaryPoint) -> Result<HBoundaryPoint> {
    HBoundaryPoint::new(symmetry_vector(o, &a.v))
}

/// An orthonormal K-basis of `x^⊥` (as unit tangent vectors at `x`).
pub fn tangent_basis(base: &HPoint) -> Result<Vec<TangentVector>> {
    let x = &base.v;
    let field = x.field();
    let n = x.n();
    let mut basis: Vec<TangentVector> = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = FormVector::zeros(field, n + 1);
        e.set(k, Scalar::one(field));
        let mut w = &e + &x.right_mul(&form(x, &e));
        for b in &basis {
            w = &w - &b.u.right_mul(&form(&b.u, &w));
        }
        basis.push(TangentVector::normalized(base, &w)?);
    }
    Ok(basis)
}

/// An isometrically embedded real hyperbolic plane through `o` spanned over
/// R by `o`, `e1`, `e2`.
#[derive(Clone, Debug)]
pub struct RealPlane {
    o: HPoint,
    e1: TangentVector,
    e2: TangentVector,
}

pub fn real_plane_completion(o: &HPoint, u: &TangentVector, v: &TangentVector) -> Result<RealPlane> {
    let g = u.pairing(v);
    if g.imag_norm() > REAL_TOL {
        return Err(GeometryError::NonRealPairing(g.imag_norm()));
    }
    let r = g.re();
    if 1.0 - r * r < 1e-12 {
        return Err(GeometryError::Degenerate("parallel tangent vectors"));
    }
    let raw = v.u.lin_comb(1.0, &u.u, -r);
    let e2 = TangentVector::normalized(o, &raw)?;
    let e1 = TangentVector::normalized(o, &u.u)?;
    Ok(RealPlane { o: o.clone(), e1, e2 })
}

impl RealPlane {
    pub fn base(&self) -> &HPoint {
        &self.o
    }

    pub fn frame(&self) -> (&TangentVector, &TangentVector) {
        (&self.e1, &self.e2)
    }

    /// Gram matrix of the frame.
    pub fn gram(&self) -> [[Scalar; 2]; 2] {
        [[self.e1.pairing(&self.e1), self.e1.pairing(&self.e2)], [self.e2.pairing(&self.e1), self.e2.pairing(&self.e2)]]
    }

    /// Image of a vector of `R^{2,1}`.
    pub fn embed(&self, xyz: [f64; 3]) -> FormVector {
        let v = self.e1.u.lin_comb(xyz[0], &self.e2.u, xyz[1]);
        v.lin_comb(1.0, &self.o.v, xyz[2])
    }

    /// Boundary point at angle `theta` of the plane's ideal circle.
    pub fn boundary_at(&self, theta: f64) -> Result<HBoundaryPoint> {
        HBoundaryPoint::new(self.embed([theta.cos(), theta.sin(), 1.0]))
    }

    /// Point with Poincaré-disk coordinates `(x, y)`.
    pub fn point_at_disk(&self, x: f64, y: f64) -> Result<HPoint> {
        let r2 = x * x + y * y;
        if r2 >= 1.0 {
            return Err(GeometryError::NotTimelike(r2));
        }
        let k = 1.0 / (1.0 - r2);
        HPoint::new(self.embed([2.0 * x * k, 2.0 * y * k, (1.0 + r2) * k]))
    }

    fn real_coords(&self, v: &FormVector) -> Option<[f64; 3]> {
        let c = [-form(&self.o.v, v), form(&self.e1.u, v), form(&self.e2.u, v)];
        let rebuilt = {
            let a = self.o.v.right_mul(&c[0]);
            let b = self.e1.u.right_mul(&c[1]);
            let d = self.e2.u.right_mul(&c[2]);
            &(&a + &b) + &d
        };
        let scale = v.max_abs().max(1e-300);
        if rebuilt.max_abs_diff(v) > 1e-9 * scale {
            return None;
        }
        let lead = c.iter().max_by(|a, b| a.norm().total_cmp(&b.norm()))?.unit()?;
        let mut out = [0.0; 3];
        for (k, ck) in c.iter().enumerate() {
            let r = *ck * lead.conj();
            if r.imag_norm() > 1e-9 * ck.norm().max(1.0) {
                return None;
            }
            out[k] = r.re();
        }
        Some(out)
    }

    pub fn contains_point(&self, p: &HPoint) -> bool {
        self.real_coords(&p.v).is_some()
    }

    pub fn contains_boundary(&self, a: &HBoundaryPoint) -> bool {
        self.real_coords(&a.v).is_some()
    }

    /// Poincaré-disk coordinates of a point of the plane.
    pub fn disk_coords(&self, p: &HPoint) -> Option<(f64, f64)> {
        let [x, y, z] = self.real_coords(&p.v)?;
        let (x, y, z) = if z < 0.0 { (-x, -y, -z) } else { (x, y, z) };
        Some((x / (z + (z * z - x * x - y * y).max(0.0).sqrt()), y / (z + (z * z - x * x - y * y).max(0.0).sqrt())))
    }

    /// Angle of a boundary point of the plane on its ideal circle.
    pub fn boundary_angle(&self, a: &HBoundaryPoint) -> Option<f64> {
        let [x, y, z] = self.real_coords(&a.v)?;
        let s = z.signum();
        Some((s * y).atan2(s * x))
    }
}

/// A unit tangent `w` at `o` with `⟨u|w⟩` and `⟨v|w⟩` real and `w` not
/// parallel to `u` or `v`.
pub fn bourdon_third_direction(o: &HPoint, u: &TangentVector, v: &TangentVector) -> Result<TangentVector> {
    let field = o.field();
    if !field.is_associative() {
        return Err(GeometryError::Unsupported("octonionic tangent calculus"));
    }
    let d = field.dim();
    let basis = tangent_basis(o)?;
    // Real basis of x^⊥: e_k · ε_j.
    let mut real_basis: Vec<FormVector> = Vec::with_capacity(basis.len() * d);
    for e in &basis {
        for j in 0..d {
            real_basis.push(e.u.right_mul(&Scalar::basis(field, j)));
        }
    }
    let cols = real_basis.len();
    let rows = 2 * (d - 1);
    let mut a = DMatrix::<f64>::zeros(rows.max(1), cols);
    if rows > 0 {
        for (c, b) in real_basis.iter().enumerate() {
            let gu = form(&u.u, b);
            let gv = form(&v.u, b);
            for i in 1..d {
                a[(i - 1, c)] = gu.coeffs()[i];
                a[(d - 1 + i - 1, c)] = gv.coeffs()[i];
            }
        }
    }
    let ata = a.transpose() * &a;
    let eig = SymmetricEigen::new(ata);
    let top = eig.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
    let null: Vec<Vec<f64>> = (0..cols)
        .filter(|&i| eig.eigenvalues[i].abs() <= 1e-12 * top)
        .map(|i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();

    let to_vector = |coef: &[f64]| {
        real_basis.iter().zip(coef).fold(FormVector::zeros(field, o.v.len()), |acc, (b, c)| acc.lin_comb(1.0, b, *c))
    };
    let mut candidates: Vec<Vec<f64>> = null.clone();
    for i in 0..null.len() {
        for j in (i + 1)..null.len() {
            for sign in [1.0, -1.0] {
                candidates.push(null[i].iter().zip(&null[j]).map(|(x, y)| x + sign * y).collect());
            }
        }
    }
    let mut best: Option<(f64, TangentVector)> = None;
    for coef in candidates {
        let Ok(w) = TangentVector::normalized(o, &to_vector(&coef)) else {
            continue;
        };
        let pu = form(&u.u, &w.u);
        let pv = form(&v.u, &w.u);
        if pu.imag_norm() > REAL_TOL || pv.imag_norm() > REAL_TOL {
            continue;
        }
        let score = pu.norm().max(pv.norm());
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, w));
        }
    }
    match best {
        Some((score, w)) if score < 1.0 - 1e-6 => Ok(w),
        _ => Err(GeometryError::Internal("no admissible third direction")),
    }
}

/// `(a|b)_o` from the closed form
/// `e^{-2(a|b)_o} = |⟨a|b⟩| |⟨o|o⟩| / (2 |⟨a|o⟩| |⟨o|b⟩|)`.
pub fn gromov_product_closed(o: &HPoint, a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<f64> {
    let ab = form(&a.v, &b.v).norm();
    if ab <= 1e-300 || a.projectively_eq(b) {
        return Err(GeometryError::RepeatedBoundaryPoint);
    }
    let ao = form(&a.v, &o.v).norm();
    let bo = form(&b.v, &o.v).norm();
    Ok(-0.5 * (ab.ln() - std::f64::consts::LN_2 - ao.ln() - bo.ln()))
}

/// `B_a(x, y)` in closed form: `ln(|⟨x|a⟩| / |⟨y|a⟩|)`.
pub fn horospherical_closed(a: &HBoundaryPoint, x: &HPoint, y: &HPoint) -> f64 {
    (form(&x.v, &a.v).norm() / form(&y.v, &a.v).norm()).ln()
}

const LIMIT_TIMES: [f64; 3] = [20.0, 25.0, 30.0];

/// Aitken extrapolation of a sequence with geometric error decay; falls
/// back to the last term when the differences carry no signal.
fn extrapolate(f: [f64; 3]) -> f64 {
    let d1 = f[1] - f[0];
    let d2 = f[2] - f[1];
    let den = d2 - d1;
    if den.abs() < 1e-13 || d1 == 0.0 {
        return f[2];
    }
    let ratio = d2 / d1;
    if !(0.0..1.0).contains(&ratio) {
        return f[2];
    }
    f[2] - d2 * d2 / den
}

/// `(a|b)_o` as the limit of `(x(t)|y(t))_o` along the rays from `o`.
pub fn gromov_product_limit(o: &HPoint, a: &HBoundaryPoint, b: &HBoundaryPoint) -> Result<f64> {
    if a.projectively_eq(b) {
        return Err(GeometryError::RepeatedBoundaryPoint);
    }
    let ua = TangentVector::toward(o, a)?;
    let ub = TangentVector::toward(o, b)?;
    let mut f = [0.0; 3];
    for (k, &t) in LIMIT_TIMES.iter().enumerate() {
        let x = geodesic_point(&ua, t)?;
        let y = geodesic_point(&ub, t)?;
        f[k] = 0.5 * (2.0 * t - distance(&x, &y)?);
    }
    Ok(extrapolate(f))
}

/// `B_a(x, y)` as the limit of `d(x, r(t)) - d(y, r(t))` along the ray
/// from `x` to `a`.
pub fn horospherical_limit(a: &HBoundaryPoint, x: &HPoint, y: &HPoint) -> Result<f64> {
    let ua = TangentVector::toward(x, a)?;
    let mut f = [0.0; 3];
    for (k, &t) in LIMIT_TIMES.iter().enumerate() {
        let r = geodesic_point(&ua, t)?;
        f[k] = t - distance(y, &r)?;
    }
    Ok(extrapolate(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rh2() -> HyperbolicSpace {
        HyperbolicSpace::new(Field::Real, 2).unwrap()
    }

    fn real_vec(xs: &[f64]) -> FormVector {
        FormVector::from_reals(Field::Real, xs).unwrap()
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(HyperbolicSpace::new(Field::Real, 1).is_err());
        assert!(HyperbolicSpace::new(Field::Octonion, 3).is_err());
        assert!(HyperbolicSpace::new(Field::Octonion, 2).is_ok());
    }

    #[test]
    fn distance_basics() {
        let o = rh2().origin();
        assert_eq!(distance(&o, &o).unwrap(), 0.0);
        let u = TangentVector::new(o.clone(), real_vec(&[1.0, 0.0, 0.0])).unwrap();
        for t in [0.3, 1.0, 7.5, 25.0] {
            let p = geodesic_point(&u, t).unwrap();
            assert!((distance(&o, &p).unwrap() - t).abs() < 1e-10 * t.max(1.0));
        }
    }

    #[test]
    fn invalid_points_rejected() {
        assert!(matches!(HPoint::new(real_vec(&[1.0, 0.0, 1.0])), Err(GeometryError::NotTimelike(_))));
        assert!(matches!(HPoint::new(real_vec(&[2.0, 0.0, 1.0])), Err(GeometryError::NotTimelike(_))));
    }

    #[test]
    fn endpoints_of_axis() {
        let o = rh2().origin();
        let u = TangentVector::new(o, real_vec(&[1.0, 0.0, 0.0])).unwrap();
        let (a, b) = endpoints(&u).unwrap();
        assert_eq!(a.vector(), &real_vec(&[-1.0, 0.0, 1.0]));
        assert_eq!(b.vector(), &real_vec(&[1.0, 0.0, 1.0]));
        assert_eq!(form_sq(a.vector()), 0.0);
    }

    #[test]
    fn line_through_diameter() {
        let a = HBoundaryPoint::new(real_vec(&[-1.0, 0.0, 1.0])).unwrap();
        let b = HBoundaryPoint::new(real_vec(&[1.0, 0.0, 1.0])).unwrap();
        let (x, u) = line_through(&a, &b).unwrap();
        assert!(x.projectively_eq(&rh2().origin()));
        assert!(u.vector().max_abs_diff(&real_vec(&[1.0, 0.0, 0.0])) < 1e-12);
        let (y, w) = line_through(&b, &a).unwrap();
        assert!(y.projectively_eq(&x));
        assert!(w.vector().max_abs_diff(&u.vector().scale(-1.0)) < 1e-12);
        assert!(line_through(&a, &a).is_err());
    }

    #[test]
    fn line_round_trip_far_points() {
        let a = HBoundaryPoint::new(real_vec(&[0.6, 0.8, 1.0])).unwrap();
        let b = HBoundaryPoint::new(real_vec(&[-1.0, 0.0, 1.0])).unwrap();
        let (_, u) = line_through(&a, &b).unwrap();
        let (ea, eb) = endpoints(&u).unwrap();
        assert!(ea.projectively_eq(&a) && eb.projectively_eq(&b));
        let far = geodesic_point(&u, 30.0).unwrap();
        let v = far.vector().right_mul(&far.vector().last().inverse().unwrap());
        assert!(v.max_abs_diff(b.vector()) < 1e-9);
    }

    #[test]
    fn symmetry_properties() {
        let o = rh2().origin();
        let p = HPoint::new(real_vec(&[0.3, -0.2, 1.2])).unwrap();
        assert!(geodesic_symmetry(&o, &o).projectively_eq(&o));
        let sp = geodesic_symmetry(&o, &p);
        assert!(geodesic_symmetry(&o, &sp).projectively_eq(&p));
        assert!((distance(&o, &p).unwrap() - distance(&o, &sp).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn third_direction_complex_example() {
        let f = Field::Complex;
        let sp = HyperbolicSpace::new(f, 2).unwrap();
        let o = sp.origin();
        let s = |re, im| Scalar::complex(f, re, im);
        let u = TangentVector::new(o.clone(), FormVector::new(f, vec![s(1.0, 0.0), s(0.0, 0.0), s(0.0, 0.0)]).unwrap())
            .unwrap();
        let v = TangentVector::new(o.clone(), FormVector::new(f, vec![s(0.0, 1.0), s(0.0, 0.0), s(0.0, 0.0)]).unwrap())
            .unwrap();
        let w = bourdon_third_direction(&o, &u, &v).unwrap();
        assert!(w.vector().entry(0).norm() < 1e-10);
        assert!((w.vector().entry(1).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn third_direction_real_plane() {
        let o = rh2().origin();
        let u = TangentVector::new(o.clone(), real_vec(&[1.0, 0.0, 0.0])).unwrap();
        let v = TangentVector::new(o.clone(), real_vec(&[0.0, 1.0, 0.0])).unwrap();
        let w = bourdon_third_direction(&o, &u, &v).unwrap();
        assert!(u.pairing(&w).norm() < 0.99 && v.pairing(&w).norm() < 0.99);
    }

    #[test]
    fn real_plane_gram_identity() {
        let o = rh2().origin();
        let u = TangentVector::new(o.clone(), real_vec(&[1.0, 0.0, 0.0])).unwrap();
        let v = TangentVector::normalized(&o, &real_vec(&[1.0, 1.0, 0.0])).unwrap();
        let plane = real_plane_completion(&o, &u, &v).unwrap();
        let g = plane.gram();
        assert!((g[0][0].re() - 1.0).abs() < 1e-12 && (g[1][1].re() - 1.0).abs() < 1e-12);
        assert!(g[0][1].norm() < 1e-12);
        assert!(real_plane_completion(&o, &u, &u).is_err());
    }

    #[test]
    fn real_plane_rejects_complex_pairing() {
        let f = Field::Complex;
        let o = HyperbolicSpace::new(f, 2).unwrap().origin();
        let s = |re, im| Scalar::complex(f, re, im);
        let u = TangentVector::new(o.clone(), FormVector::new(f, vec![s(1.0, 0.0), s(0.0, 0.0), s(0.0, 0.0)]).unwrap())
            .unwrap();
        let v =
            TangentVector::normalized(&o, &FormVector::new(f, vec![s(0.0, 1.0), s(1.0, 0.0), s(0.0, 0.0)]).unwrap())
                .unwrap();
        assert!(matches!(real_plane_completion(&o, &u, &v), Err(GeometryError::NonRealPairing(_))));
    }

    #[test]
    fn eq3_angle_at_center() {
        let o = rh2().origin();
        let a = HBoundaryPoint::new(real_vec(&[1.0, 0.0, 1.0])).unwrap();
        let t = std::f64::consts::FRAC_PI_3;
        let b = HBoundaryPoint::new(real_vec(&[t.cos(), t.sin(), 1.0])).unwrap();
        let g = gromov_product_closed(&o, &a, &b).unwrap();
        assert!((g - std::f64::consts::LN_2).abs() < 1e-14);
        let gl = gromov_product_limit(&o, &a, &b).unwrap();
        assert!((gl - std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn octonion_normalization_keeps_quaternionic_data() {
        let h = Field::Quaternion;
        let q = |c: [f64; 4]| Scalar::new(h, &c).unwrap();
        let x = FormVector::new(h, vec![q([0.1, 0.2, -0.1, 0.3]), q([0.0, 0.1, 0.2, 0.0]), q([0.5, 0.5, 0.5, 0.5])])
            .unwrap();
        let y = FormVector::new(h, vec![q([-0.2, 0.1, 0.0, 0.1]), q([0.3, 0.0, 0.1, -0.2]), q([1.0, 0.0, 0.0, 0.0])])
            .unwrap();
        let (px, py) = (HPoint::new(x.clone()).unwrap(), HPoint::new(y.clone()).unwrap());
        let dh = distance(&px, &py).unwrap();
        let ox = HPoint::new(x.lift(Field::Octonion).unwrap()).unwrap();
        let oy = HPoint::new(y.lift(Field::Octonion).unwrap()).unwrap();
        let (nx, ny) = normalize_octonion_pair(&ox, &oy).unwrap();
        assert!(nx.entries().iter().any(|e| e.is_real(1e-12)));
        assert!(ny.entries().iter().any(|e| e.is_real(1e-12)));
        let d_o = distance(&ox, &oy).unwrap();
        assert!((dh - d_o).abs() < 1e-10, "{dh} vs {d_o}");
    }

    #[test]
    fn octonion_non_associative_rejected() {
        let o = Field::Octonion;
        let e = |k| Scalar::basis(o, k);
        let v = FormVector::new(o, vec![e(1).scale(0.1), e(2).scale(0.1), e(4)]).unwrap();
        assert!(matches!(HPoint::new(v), Err(GeometryError::NonAssociative)));
    }
}

//! Normed division algebras and the indefinite form on `K^{n+1}`.
//!
//! All four algebras share one representation: a fixed array of eight real
//! coefficients of which the first `Field::dim()` are live. Products are built
//! by Cayley–Dickson doubling, `(p, q)(r, s) = (pr - s̄q, sp + qr̄)`, so the
//! reals sit inside the complex numbers, the complex numbers inside the
//! quaternions and the quaternions inside the octonions as leading
//! coefficients.
//!
//! Octonion basis products `e_i · e_j = ± e_k` produced by this doubling
//! (row `i`, column `j`, entries are signed basis indices):
//!
//! ```text
//!        e0   e1   e2   e3   e4   e5   e6   e7
//!  e0    e0   e1   e2   e3   e4   e5   e6   e7
//!  e1    e1  -e0   e3  -e2   e5  -e4  -e7   e6
//!  e2    e2  -e3  -e0   e1   e6   e7  -e4  -e5
//!  e3    e3   e2  -e1  -e0   e7  -e6   e5  -e4
//!  e4    e4  -e5  -e6  -e7  -e0   e1   e2   e3
//!  e5    e5   e4  -e7   e6  -e1  -e0  -e3   e2
//!  e6    e6   e7   e4  -e5  -e2   e3  -e0  -e1
//!  e7    e7  -e6   e5   e4  -e3  -e2   e1  -e0
//! ```
//!
//! Scalars act on vectors from the right: `x·λ`. With that convention the
//! form `⟨x|y⟩ = Σ x̄_k y_k - x̄_{n+1} y_{n+1}` satisfies
//! `⟨xλ|y⟩ = λ̄⟨x|y⟩` and `⟨x|yλ⟩ = ⟨x|y⟩λ` over every associative algebra.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Which normed division algebra a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Real,
    Complex,
    Quaternion,
    Octonion,
}

impl Field {
    /// Real dimension of the algebra.
    pub const fn dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
            Field::Quaternion => 4,
            Field::Octonion => 8,
        }
    }

    pub const fn is_associative(self) -> bool {
        !matches!(self, Field::Octonion)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Field::Real => "R",
            Field::Complex => "C",
            Field::Quaternion => "H",
            Field::Octonion => "O",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An element of R, C, H or O.
#[derive(Clone, Copy, PartialEq)]
pub struct Scalar {
    field: Field,
    c: [f64; 8],
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.field, self.coeffs())
    }
}

fn cd_conj(x: &mut [f64]) {
    if x.len() == 1 {
        return;
    }
    let h = x.len() / 2;
    let (p, q) = x.split_at_mut(h);
    cd_conj(p);
    q.iter_mut().for_each(|v| *v = -*v);
}

fn cd_mul(a: &[f64], b: &[f64], out: &mut [f64]) {
    let n = a.len();
    if n == 1 {
        out[0] = a[0] * b[0];
        return;
    }
    let h = n / 2;
    let (p, q) = a.split_at(h);
    let (r, s) = b.split_at(h);
    let mut s_bar = [0.0; 4];
    let mut r_bar = [0.0; 4];
    s_bar[..h].copy_from_slice(s);
    r_bar[..h].copy_from_slice(r);
    cd_conj(&mut s_bar[..h]);
    cd_conj(&mut r_bar[..h]);

    let mut t1 = [0.0; 4];
    let mut t2 = [0.0; 4];
    let (lo, hi) = out.split_at_mut(h);
    // pr - s̄q
    cd_mul(p, r, &mut t1[..h]);
    cd_mul(&s_bar[..h], q, &mut t2[..h]);
    for i in 0..h {
        lo[i] = t1[i] - t2[i];
    }
    // sp + qr̄
    cd_mul(s, p, &mut t1[..h]);
    cd_mul(q, &r_bar[..h], &mut t2[..h]);
    for i in 0..h {
        hi[i] = t1[i] + t2[i];
    }
}

impl Scalar {
    pub fn zero(field: Field) -> Self {
        Self { field, c: [0.0; 8] }
    }

    pub fn one(field: Field) -> Self {
        Self::real(field, 1.0)
    }

    pub fn real(field: Field, x: f64) -> Self {
        let mut c = [0.0; 8];
        c[0] = x;
        Self { field, c }
    }

    /// The `k`-th basis unit `e_k` (`e_0 = 1`).
    pub fn basis(field: Field, k: usize) -> Self {
        assert!(k < field.dim(), "basis index {k} out of range for {field}");
        let mut c = [0.0; 8];
        c[k] = 1.0;
        Self { field, c }
    }

    pub fn new(field: Field, coeffs: &[f64]) -> Result<Self, GeometryError> {
        if coeffs.len() != field.dim() {
            return Err(GeometryError::DimensionMismatch { expected: field.dim(), found: coeffs.len() });
        }
        let mut c = [0.0; 8];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { field, c })
    }

    /// Complex number `re + im·i` inside `field` (which must not be `Real`).
    pub fn complex(field: Field, re: f64, im: f64) -> Self {
        assert!(field != Field::Real);
        let mut c = [0.0; 8];
        c[0] = re;
        c[1] = im;
        Self { field, c }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.field.dim()]
    }

    pub fn re(&self) -> f64 {
        self.c[0]
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        cd_conj(&mut out.c[..self.field.dim()]);
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs().iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs().iter().fold(0.0_f64, |acc, v| acc.hypot(*v))
    }

    /// Norm of the imaginary part.
    pub fn imag_norm(&self) -> f64 {
        self.coeffs()[1..].iter().fold(0.0_f64, |acc, v| acc.hypot(*v))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.imag_norm() <= tol
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|v| *v *= k);
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GeometryError> {
        if self.field != other.field {
            return Err(GeometryError::FieldMismatch(self.field, other.field));
        }
        let n = self.field.dim();
        let mut out = Self::zero(self.field);
        cd_mul(&self.c[..n], &other.c[..n], &mut out.c[..n]);
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self, GeometryError> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(GeometryError::Degenerate("inverse of zero scalar"));
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Unit scalar with the same direction; `None` for zero.
    pub fn unit(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    /// Re-embed into a larger algebra along the Cayley–Dickson inclusions.
    pub fn lift(&self, field: Field) -> Result<Self, GeometryError> {
        if field.dim() < self.field.dim() {
            return Err(GeometryError::FieldMismatch(self.field, field));
        }
        Ok(Self { field, c: self.c })
    }

    /// `(ab)c - a(bc)`.
    pub fn associator(a: &Self, b: &Self, c: &Self) -> Self {
        (*a * *b) * *c - *a * (*b * *c)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.c.iter().zip(other.c.iter()).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        assert_eq!(self.field, rhs.field, "field mismatch");
        self.c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a += b);
        self
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = *self + rhs;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        assert_eq!(self.field, rhs.field, "field mismatch");
        self.c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(-1.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.checked_mul(&rhs).expect("field mismatch")
    }
}

/// `a·b` for two scalars of the same algebra.
pub fn mul(a: &Scalar, b: &Scalar) -> Result<Scalar, GeometryError> {
    a.checked_mul(b)
}

/// A vector in `K^{n+1}`; the last entry is the negative-signature slot.
#[derive(Clone, Debug, PartialEq)]
pub struct FormVector {
    field: Field,
    entries: Vec<Scalar>,
}

impl FormVector {
    pub fn new(field: Field, entries: Vec<Scalar>) -> Result<Self, GeometryError> {
        if entries.len() < 3 {
            return Err(GeometryError::DimensionMismatch { expected: 3, found: entries.len() });
        }
        if let Some(bad) = entries.iter().find(|s| s.field() != field) {
            return Err(GeometryError::FieldMismatch(field, bad.field()));
        }
        Ok(Self { field, entries })
    }

    /// Vector with real entries.
    pub fn from_reals(field: Field, xs: &[f64]) -> Result<Self, GeometryError> {
        Self::new(field, xs.iter().map(|&x| Scalar::real(field, x)).collect())
    }

    pub fn zeros(field: Field, len: usize) -> Self {
        Self { field, entries: vec![Scalar::zero(field); len] }
    }

    /// Last standard basis vector `(0, …, 0, 1)`.
    pub fn origin(field: Field, n: usize) -> Self {
        let mut v = Self::zeros(field, n + 1);
        v.entries[n] = Scalar::one(field);
        v
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hyperbolic dimension `n` of the ambient `K^{n+1}`.
    pub fn n(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn entry(&self, k: usize) -> Scalar {
        self.entries[k]
    }

    pub fn set(&mut self, k: usize, s: Scalar) {
        assert_eq!(s.field(), self.field);
        self.entries[k] = s;
    }

    pub fn last(&self) -> Scalar {
        self.entries[self.entries.len() - 1]
    }

    /// `x·λ`.
    pub fn right_mul(&self, lambda: &Scalar) -> Self {
        Self { field: self.field, entries: self.entries.iter().map(|e| *e * *lambda).collect() }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { field: self.field, entries: self.entries.iter().map(|e| e.scale(k)).collect() }
    }

    /// `self·a + other·b` for real `a`, `b`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            field: self.field,
            entries: self.entries.iter().zip(&other.entries).map(|(x, y)| x.scale(a) + y.scale(b)).collect(),
        }
    }

    pub fn lift(&self, field: Field) -> Result<Self, GeometryError> {
        let entries = self.entries.iter().map(|e| e.lift(field)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { field, entries })
    }

    /// Flattened real coordinates, entry by entry.
    pub fn real_coords(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| e.coeffs().iter().copied()).collect()
    }

    pub fn from_real_coords(field: Field, xs: &[f64]) -> Result<Self, GeometryError> {
        let d = field.dim();
        if xs.len() % d != 0 {
            return Err(GeometryError::DimensionMismatch { expected: d, found: xs.len() % d });
        }
        let entries = xs.chunks(d).map(|c| Scalar::new(field, c)).collect::<Result<Vec<_>, _>>()?;
        Self::new(field, entries)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flat_map(|e| e.coeffs().iter()).fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Add for &FormVector {
    type Output = FormVector;
    fn add(self, rhs: &FormVector) -> FormVector {
        self.lin_comb(1.0, rhs, 1.0)
    }
}

impl Sub for &FormVector {
    type Output = FormVector;
    fn sub(self, rhs: &FormVector) -> FormVector {
        self.lin_comb(1.0, rhs, -1.0)
    }
}

/// `⟨x|y⟩ = Σ_{k≤n} x̄_k y_k - x̄_{n+1} y_{n+1}`.
pub fn hermitian_form(x: &FormVector, y: &FormVector) -> Result<Scalar, GeometryError> {
    if x.field != y.field {
        return Err(GeometryError::FieldMismatch(x.field, y.field));
    }
    if x.len() != y.len() {
        return Err(GeometryError::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    Ok(form(x, y))
}

/// Unchecked form; callers guarantee matching shapes.
pub(crate) fn form(x: &FormVector, y: &FormVector) -> Scalar {
    let n = x.len() - 1;
    let mut acc = Scalar::zero(x.field);
    for k in 0..n {
        acc += x.entries[k].conj() * y.entries[k];
    }
    acc - x.entries[n].conj() * y.entries[n]
}

/// Real value `⟨x|x⟩`.
pub(crate) fn form_sq(x: &FormVector) -> f64 {
    let n = x.len() - 1;
    let space: f64 = x.entries[..n].iter().map(Scalar::norm_sqr).sum();
    space - x.entries[n].norm_sqr()
}

/// Whether the entries of an octonionic triple generate an associative
/// subalgebra. Checks every associator among the entries and their
/// conjugates; always true over R, C and H.
pub fn is_associative_triple(x: &FormVector) -> bool {
    if x.field.is_associative() {
        return true;
    }
    let mut gens: Vec<Scalar> = Vec::with_capacity(2 * x.len());
    for e in &x.entries {
        gens.push(*e);
        gens.push(e.conj());
    }
    let scale = gens.iter().map(Scalar::norm).fold(0.0_f64, f64::max).max(1.0);
    let tol = 1e-12 * scale.powi(3);
    for a in &gens {
        for b in &gens {
            for c in &gens {
                if Scalar::associator(a, b, c).norm() > tol {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oct(k: usize) -> Scalar {
        Scalar::basis(Field::Octonion, k)
    }

    fn quat(k: usize) -> Scalar {
        Scalar::basis(Field::Quaternion, k)
    }

    #[test]
    fn quaternion_units() {
        let (i, j, k) = (quat(1), quat(2), quat(3));
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        assert_eq!(i * i, -Scalar::one(Field::Quaternion));
    }

    #[test]
    fn real_product() {
        let two = Scalar::real(Field::Real, 2.0);
        let three = Scalar::real(Field::Real, 3.0);
        assert_eq!((two * three).re(), 6.0);
    }

    #[test]
    fn mismatched_tags_are_rejected() {
        let a = Scalar::one(Field::Complex);
        let b = Scalar::one(Field::Quaternion);
        assert!(matches!(mul(&a, &b), Err(GeometryError::FieldMismatch(..))));
    }

    // Entries are ±(k + 1) for ±e_k, transcribed from the module docs.
    const DOC_TABLE: [[i8; 8]; 8] = [
        [1, 2, 3, 4, 5, 6, 7, 8],
        [2, -1, 4, -3, 6, -5, -8, 7],
        [3, -4, -1, 2, 7, 8, -5, -6],
        [4, 3, -2, -1, 8, -7, 6, -5],
        [5, -6, -7, -8, -1, 2, 3, 4],
        [6, 5, -8, 7, -2, -1, -4, 3],
        [7, 8, 5, -6, -3, 4, -1, -2],
        [8, -7, 6, 5, -4, -3, 2, -1],
    ];

    #[test]
    fn octonion_table_matches_docs() {
        for i in 0..8 {
            for j in 0..8 {
                let p = oct(i) * oct(j);
                let k = p.coeffs().iter().position(|v| v.abs() == 1.0).unwrap();
                let got = (k as i8 + 1) * p.coeffs()[k] as i8;
                assert_eq!(got, DOC_TABLE[i][j], "e{i}·e{j}");
            }
        }
    }

    #[test]
    fn octonion_units_anticommute() {
        for i in 1..8 {
            for j in 1..8 {
                if i != j {
                    assert_eq!(oct(i) * oct(j), -(oct(j) * oct(i)));
                }
            }
        }
    }

    #[test]
    fn octonions_are_not_associative() {
        let lhs = (oct(1) * oct(2)) * oct(4);
        let rhs = oct(1) * (oct(2) * oct(4));
        assert_eq!(lhs, -rhs);
        assert!(Scalar::associator(&oct(1), &oct(2), &oct(4)).norm() > 1.0);
    }

    #[test]
    fn form_examples() {
        let f = Field::Real;
        let o = FormVector::origin(f, 2);
        assert_eq!(hermitian_form(&o, &o).unwrap().re(), -1.0);
        let e1 = FormVector::from_reals(f, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(hermitian_form(&e1, &o).unwrap().re(), 0.0);

        let h = Field::Quaternion;
        let x = FormVector::new(h, vec![quat(1), Scalar::zero(h), Scalar::one(h)]).unwrap();
        let v = hermitian_form(&x, &x).unwrap();
        assert_eq!(v, Scalar::zero(h));
    }

    #[test]
    fn form_shape_errors() {
        let a = FormVector::origin(Field::Real, 2);
        let b = FormVector::origin(Field::Real, 3);
        assert!(hermitian_form(&a, &b).is_err());
        let c = FormVector::origin(Field::Complex, 2);
        assert!(hermitian_form(&a, &c).is_err());
    }

    #[test]
    fn associative_triples() {
        let o = Field::Octonion;
        let one = Scalar::one(o);
        let t = FormVector::new(o, vec![one, oct(1), oct(2)]).unwrap();
        assert!(is_associative_triple(&t));
        let t = FormVector::new(o, vec![oct(1), oct(2), oct(4)]).unwrap();
        assert!(!is_associative_triple(&t));
        let t = FormVector::new(o, vec![oct(1), oct(1), oct(1)]).unwrap();
        assert!(is_associative_triple(&t));
    }

    #[test]
    fn conjugation_and_norm() {
        let q = Scalar::new(Field::Quaternion, &[1.0, -2.0, 0.5, 3.0]).unwrap();
        assert_eq!(q.conj().conj(), q);
        let n2 = (q.conj() * q).re();
        assert!((n2 - q.norm_sqr()).abs() < 1e-14);
        assert!((q.norm() * q.norm() - n2).abs() < 1e-12);
    }
}

//! Regular thick trees with unit edges, in exact rational arithmetic.
//!
//! The `q`-regular tree is realized as the Cayley graph of the free product
//! of `q` copies of `Z/2`: vertices are words over `{0, …, q-1}` without two
//! equal consecutive letters, read from a fixed root `o`. Stepping along
//! letter `ℓ` from `w` appends `ℓ`, unless `w` already ends in `ℓ`, in which
//! case it steps back to the parent. Ends are eventually periodic infinite
//! reduced words `prefix · period^∞`.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::{GeometryError, Result};

/// Exact coordinate type used throughout the tree model.
pub type Q = Rational64;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn is_reduced(word: &[u8]) -> bool {
    word.windows(2).all(|w| w[0] != w[1])
}

fn fmt_word(word: &[u8], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for l in word {
        write!(f, "{l}")?;
    }
    Ok(())
}

fn parse_letters(s: &str) -> Result<Vec<u8>> {
    s.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| GeometryError::BadWord(s.to_string()))).collect()
}

/// The `degree`-regular tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeSpace {
    degree: usize,
}

impl TreeSpace {
    pub fn new(degree: usize) -> Result<Self> {
        if !(3..=8).contains(&degree) {
            return Err(GeometryError::BadDegree(degree));
        }
        Ok(Self { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn root(&self) -> TreePoint {
        TreePoint::vertex(TreeVertex::root())
    }

    fn check_letters(&self, word: &[u8]) -> Result<()> {
        if word.iter().any(|&l| l as usize >= self.degree) {
            return Err(GeometryError::BadWord(format!("{word:?}")));
        }
        Ok(())
    }

    pub fn vertex_from_str(&self, s: &str) -> Result<TreeVertex> {
        let word = if s == "o" { Vec::new() } else { parse_letters(s)? };
        self.check_letters(&word)?;
        TreeVertex::new(word)
    }

    /// Parse an end written `prefix(period)`, e.g. `01(20)`.
    pub fn end_from_str(&self, s: &str) -> Result<TreeEnd> {
        let bad = || GeometryError::BadWord(s.to_string());
        let open = s.find('(').ok_or_else(bad)?;
        let close = s.strip_suffix(')').ok_or_else(bad)?;
        let prefix = parse_letters(&s[..open])?;
        let period = parse_letters(&close[open + 1..])?;
        self.check_letters(&prefix)?;
        self.check_letters(&period)?;
        TreeEnd::new(prefix, period)
    }

    /// Neighbor of `w` along letter `l`.
    pub fn step(&self, w: &TreeVertex, l: u8) -> TreeVertex {
        let mut word = w.word.clone();
        if word.last() == Some(&l) {
            word.pop();
        } else {
            word.push(l);
        }
        TreeVertex { word }
    }

    /// First letter of the path from vertex `w` to vertex `target`.
    pub fn direction_to_vertex(&self, w: &TreeVertex, target: &TreeVertex) -> Option<u8> {
        if w == target {
            return None;
        }
        if target.word.len() > w.word.len() && target.word.starts_with(&w.word) {
            Some(target.word[w.word.len()])
        } else {
            w.word.last().copied()
        }
    }

    /// First letter of the path from vertex `w` to the point `p`.
    pub fn direction_to_point(&self, w: &TreeVertex, p: &TreePoint) -> Option<u8> {
        match p.toward {
            None => self.direction_to_vertex(w, &p.vertex),
            Some(l) => {
                let far = self.step(&p.vertex, l);
                if *w == p.vertex {
                    Some(l)
                } else if *w == far {
                    Some(l)
                } else {
                    let near = if vertex_distance(w, &p.vertex) <= vertex_distance(w, &far) { &p.vertex } else { &far };
                    self.direction_to_vertex(w, near)
                }
            }
        }
    }

    /// An end whose ray from `w` starts with letter `l`, different from all
    /// of `avoid`.
    pub fn end_via(&self, w: &TreeVertex, l: u8, avoid: &[&TreeEnd]) -> TreeEnd {
        let mut start = w.word.clone();
        if start.last() == Some(&l) {
            start.pop();
            let back = l;
            let prev = start.last().copied();
            let side = (0..self.degree as u8).find(|&x| x != back && Some(x) != prev).expect("degree at least 3");
            start.push(side);
        } else {
            start.push(l);
        }
        self.fresh_tail(&start, avoid)
    }

    /// An end extending `start` that avoids the given ends.
    pub fn fresh_tail(&self, start: &[u8], avoid: &[&TreeEnd]) -> TreeEnd {
        let last = start.last().copied();
        let letters = self.degree as u8;
        for ext in 0..letters {
            let mut prefix = start.to_vec();
            if Some(ext) != last {
                prefix.push(ext);
            }
            let tail_last = prefix.last().copied();
            for x in 0..letters {
                if Some(x) == tail_last {
                    continue;
                }
                for y in 0..letters {
                    if y == x {
                        continue;
                    }
                    if let Ok(e) = TreeEnd::new(prefix.clone(), vec![x, y]) {
                        if !avoid.contains(&&e) {
                            return e;
                        }
                    }
                }
            }
        }
        unreachable!("finitely many ends to avoid")
    }

    /// A point at exact distance `t` from `x` along `[x, y]` (`0 ≤ t ≤ d(x, y)`).
    pub fn point_on_segment(&self, x: &TreeVertex, y: &TreeVertex, t: Q) -> Result<TreePoint> {
        let d = q(vertex_distance(x, y) as i64);
        if t.is_negative() || t > d {
            return Err(GeometryError::ParameterRange(rat_to_f64(t)));
        }
        let steps = t.floor().to_integer() as usize;
        let frac = t - t.floor();
        let mut v = x.clone();
        for _ in 0..steps {
            let l = self.direction_to_vertex(&v, y).expect("inside segment");
            v = self.step(&v, l);
        }
        if frac.is_zero() {
            return Ok(TreePoint::vertex(v));
        }
        let l = self.direction_to_vertex(&v, y).expect("inside segment");
        Ok(self.on_edge(&v, l, frac))
    }

    /// Canonical point at offset `f ∈ [0, 1]` from `v` toward its `l`-neighbor.
    pub fn on_edge(&self, v: &TreeVertex, l: u8, f: Q) -> TreePoint {
        if f.is_zero() {
            return TreePoint::vertex(v.clone());
        }
        if f == Q::one() {
            return TreePoint::vertex(self.step(v, l));
        }
        if v.word.last() == Some(&l) {
            let parent = self.step(v, l);
            TreePoint { vertex: parent, toward: Some(l), offset: Q::one() - f }
        } else {
            TreePoint { vertex: v.clone(), toward: Some(l), offset: f }
        }
    }

    /// The two vertices of the edge carrying `p` (or `p` twice for a vertex).
    fn edge_ends(&self, p: &TreePoint) -> [(TreeVertex, Q); 2] {
        match p.toward {
            None => [(p.vertex.clone(), Q::zero()), (p.vertex.clone(), Q::zero())],
            Some(l) => [(p.vertex.clone(), p.offset), (self.step(&p.vertex, l), Q::one() - p.offset)],
        }
    }

    pub fn distance(&self, p: &TreePoint, r: &TreePoint) -> Q {
        if p.toward.is_some() && p.vertex == r.vertex && p.toward == r.toward {
            return (p.offset - r.offset).abs();
        }
        let mut best: Option<Q> = None;
        for (v, wv) in self.edge_ends(p) {
            for (u, wu) in self.edge_ends(r) {
                let d = wv + wu + q(vertex_distance(&v, &u) as i64);
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        best.expect("nonempty")
    }

    /// Busemann function `h_a(p) = lim d(p, a_k) - k` along the end's word.
    pub fn busemann(&self, a: &TreeEnd, p: &TreePoint) -> Q {
        let h = |v: &TreeVertex| q(v.word.len() as i64 - 2 * a.common_prefix_with_word(&v.word) as i64);
        match p.toward {
            None => h(&p.vertex),
            Some(l) => {
                let far = self.step(&p.vertex, l);
                let via_near = p.offset + h(&p.vertex);
                let via_far = Q::one() - p.offset + h(&far);
                via_near.min(via_far)
            }
        }
    }

    /// `(a|b)_p`, exact.
    pub fn gromov_product_ends(&self, p: &TreePoint, a: &TreeEnd, b: &TreeEnd) -> Result<Q> {
        let m = a.common_prefix(b).ok_or(GeometryError::RepeatedBoundaryPoint)?;
        Ok((self.busemann(a, p) + self.busemann(b, p)) / q(2) + q(m as i64))
    }

    /// `B_a(x, y) = h_a(x) - h_a(y)`.
    pub fn horospherical(&self, a: &TreeEnd, x: &TreePoint, y: &TreePoint) -> Q {
        self.busemann(a, x) - self.busemann(a, y)
    }

    /// Signed coordinate of (the projection of) `p` on `[a, b]`, measured
    /// from the point of `[a, b]` nearest the root and increasing toward `b`.
    pub fn line_coordinate(&self, a: &TreeEnd, b: &TreeEnd, p: &TreePoint) -> Q {
        (self.busemann(a, p) - self.busemann(b, p)) / q(2)
    }

    /// Line coordinate of the tripod center of `(a, b, c)` on `[a, b]`.
    pub fn tripod_coordinate(&self, a: &TreeEnd, b: &TreeEnd, c: &TreeEnd) -> Result<Q> {
        let la = c.common_prefix(a).ok_or(GeometryError::RepeatedBoundaryPoint)?;
        let lb = c.common_prefix(b).ok_or(GeometryError::RepeatedBoundaryPoint)?;
        a.common_prefix(b).ok_or(GeometryError::RepeatedBoundaryPoint)?;
        Ok(q(lb as i64 - la as i64))
    }

    /// The point of `[a, b]` with line coordinate `x`.
    pub fn point_at_coordinate(&self, a: &TreeEnd, b: &TreeEnd, x: Q) -> Result<TreePoint> {
        let m = a.common_prefix(b).ok_or(GeometryError::RepeatedBoundaryPoint)?;
        let (end, depth) = if x.is_negative() { (a, q(m as i64) - x) } else { (b, q(m as i64) + x) };
        let k = depth.floor().to_integer() as usize;
        let frac = depth - depth.floor();
        let vertex = TreeVertex { word: end.word_prefix(k) };
        if frac.is_zero() {
            Ok(TreePoint::vertex(vertex))
        } else {
            Ok(TreePoint { vertex, toward: Some(end.letter(k)), offset: frac })
        }
    }

    /// The point of `[a, b]` at signed distance `t` from the tripod center
    /// of `(a, b, reference)`, positive toward `b`.
    pub fn end_geodesic_point(&self, a: &TreeEnd, b: &TreeEnd, reference: &TreeEnd, t: Q) -> Result<TreePoint> {
        if a == b || a == reference || b == reference {
            return Err(GeometryError::RepeatedBoundaryPoint);
        }
        let c = self.tripod_coordinate(a, b, reference)?;
        self.point_at_coordinate(a, b, c + t)
    }

    /// Whether `[a, b]` and `[c, d]` share a point, decided from tripod
    /// centers: distinct feet of `c` and `d` on `[a, b]` bound a common
    /// segment; equal feet leave only that vertex as a candidate.
    pub fn geodesics_meet(&self, a: &TreeEnd, b: &TreeEnd, c: &TreeEnd, d: &TreeEnd) -> Result<bool> {
        let xc = self.tripod_coordinate(a, b, c)?;
        let xd = self.tripod_coordinate(a, b, d)?;
        if xc != xd {
            return Ok(true);
        }
        let v = self.point_at_coordinate(a, b, xc)?;
        Ok(self.on_line(&v, c, d))
    }

    pub fn on_line(&self, p: &TreePoint, a: &TreeEnd, b: &TreeEnd) -> bool {
        self.gromov_product_ends(p, a, b).map(|g| g.is_zero()).unwrap_or(false)
    }

    /// Two ends `(α, β)` with `p, r ∈ [α, β]`, built by extending the
    /// segment `[p, r]` past both endpoints. `variant` selects among the
    /// available continuations.
    pub fn line_through_points(
        &self,
        p: &TreePoint,
        r: &TreePoint,
        variant: usize,
        avoid: &[&TreeEnd],
    ) -> (TreeEnd, TreeEnd) {
        if p == r {
            let (v, banned) = match p.toward {
                None => (p.vertex.clone(), None),
                Some(l) => (p.vertex.clone(), Some(l)),
            };
            let letters: Vec<u8> = (0..self.degree as u8).collect();
            let l1 = banned.unwrap_or(letters[variant % letters.len()]);
            let l2 = letters.iter().copied().filter(|&x| x != l1).nth(variant % (letters.len() - 1)).unwrap();
            if banned.is_some() {
                // Both directions along the carrying edge.
                let far = self.step(&v, l1);
                let a = self.away_end(&far, &v, variant, avoid);
                let b = self.away_end(&v, &far, variant, &with(avoid, &a));
                return (b, a);
            }
            let a = self.end_via(&v, l1, avoid);
            let b = self.end_via(&v, l2, &with(avoid, &a));
            return (a, b);
        }
        let beyond_r = self.beyond(p, r, variant, avoid);
        let beyond_p = self.beyond(r, p, variant / 2, &with(avoid, &beyond_r));
        (beyond_p, beyond_r)
    }

    /// An end `ξ` with `y ∈ [x, ξ)`.
    fn beyond(&self, x: &TreePoint, y: &TreePoint, variant: usize, avoid: &[&TreeEnd]) -> TreeEnd {
        let v = match y.toward {
            None => y.vertex.clone(),
            Some(l) => {
                let far = self.step(&y.vertex, l);
                // `y` separates `x` from whichever edge end it lies between.
                let at_far = TreePoint::vertex(far.clone());
                if self.distance(x, &at_far) == self.distance(x, y) + self.distance(y, &at_far) {
                    far
                } else {
                    y.vertex.clone()
                }
            }
        };
        let back = self.direction_to_point(&v, x);
        let choices: Vec<u8> = (0..self.degree as u8).filter(|&l| Some(l) != back).collect();
        let l = choices[variant % choices.len()];
        self.end_via(&v, l, avoid)
    }

    /// An end leaving vertex `from` away from its neighbor `not_toward`.
    fn away_end(&self, from: &TreeVertex, not_toward: &TreeVertex, variant: usize, avoid: &[&TreeEnd]) -> TreeEnd {
        let back = self.direction_to_vertex(from, not_toward);
        let choices: Vec<u8> = (0..self.degree as u8).filter(|&l| Some(l) != back).collect();
        self.end_via(from, choices[variant % choices.len()], avoid)
    }
}

fn with<'a>(avoid: &[&'a TreeEnd], extra: &'a TreeEnd) -> Vec<&'a TreeEnd> {
    let mut v = avoid.to_vec();
    v.push(extra);
    v
}

pub fn rat_to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn common_prefix_len(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub fn vertex_distance(v: &TreeVertex, w: &TreeVertex) -> usize {
    v.word.len() + w.word.len() - 2 * common_prefix_len(&v.word, &w.word)
}

/// A vertex, as a reduced word from the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    word: Vec<u8>,
}

impl TreeVertex {
    pub fn root() -> Self {
        Self { word: Vec::new() }
    }

    pub fn new(word: Vec<u8>) -> Result<Self> {
        if !is_reduced(&word) {
            return Err(GeometryError::BadWord(format!("{word:?}")));
        }
        Ok(Self { word })
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("o");
        }
        fmt_word(&self.word, f)
    }
}

/// A point of the metric tree: a vertex, or a rational offset in `(0, 1)`
/// along the edge from `vertex` to its child `vertex·toward`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreePoint {
    vertex: TreeVertex,
    toward: Option<u8>,
    offset: Q,
}

impl TreePoint {
    pub fn vertex(v: TreeVertex) -> Self {
        Self { vertex: v, toward: None, offset: Q::zero() }
    }

    pub fn base_vertex(&self) -> &TreeVertex {
        &self.vertex
    }

    pub fn edge(&self) -> Option<(u8, Q)> {
        self.toward.map(|l| (l, self.offset))
    }

    pub fn is_vertex(&self) -> bool {
        self.toward.is_none()
    }
}

impl fmt::Display for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.toward {
            None => write!(f, "{}", self.vertex),
            Some(l) => write!(f, "{}+{}@{}", self.vertex, self.offset, l),
        }
    }
}

/// An end `prefix · period^∞`, kept in a canonical form so that equality
/// of ends is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeEnd {
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl TreeEnd {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        let bad = || GeometryError::BadWord(format!("{prefix:?}({period:?})"));
        if period.len() < 2 || !is_reduced(&prefix) || !is_reduced(&period) {
            return Err(bad());
        }
        if period.first() == period.last() || prefix.last() == period.first() {
            return Err(bad());
        }
        let mut period = primitive_root(&period);
        let mut prefix = prefix;
        while let (Some(&p), Some(&l)) = (prefix.last(), period.last()) {
            if p != l {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(Self { prefix, period })
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn letter(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn word_prefix(&self, k: usize) -> Vec<u8> {
        (0..k).map(|i| self.letter(i)).collect()
    }

    /// Length of the common prefix of two ends; `None` when they are equal.
    pub fn common_prefix(&self, other: &TreeEnd) -> Option<usize> {
        if self == other {
            return None;
        }
        let bound = self.prefix.len().max(other.prefix.len()) + lcm(self.period.len(), other.period.len());
        (0..bound).find(|&i| self.letter(i) != other.letter(i)).or(Some(bound))
    }

    pub fn common_prefix_with_word(&self, word: &[u8]) -> usize {
        word.iter().enumerate().take_while(|(i, l)| self.letter(*i) == **l).count()
    }
}

impl fmt::Display for TreeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_word(&self.prefix, f)?;
        f.write_str("(")?;
        fmt_word(&self.period, f)?;
        f.write_str(")")
    }
}

fn primitive_root(w: &[u8]) -> Vec<u8> {
    let n = w.len();
    for d in 1..=n {
        if n % d == 0 && (0..n).all(|i| w[i] == w[i % d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

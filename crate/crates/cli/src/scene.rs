//! Plot data for scenario files.
//!
//! A scenario is a JSON list of records. Each record names a `kind`
//! (`geodesic`, `special_point` or `chi_set`) and two, three or four
//! boundary points, given as unit-circle coordinates `[x, y]` in the real
//! hyperbolic plane or as end words such as `"01(20)"` in a tree. The
//! output lists polylines and marked points in the Poincaré disk, or in a
//! radial layout of the tree with unit edges drawn as unit radial steps.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crossratio_core::hyperbolic::geodesic_point;
use crossratio_core::reconstruction::{chi_set, normalize_for_chi};
use crossratio_core::tree::rat_to_f64;
use crossratio_core::{
    BoundaryModel, ChartElement, Coord, Field, GeometryError, HBoundaryPoint, HPoint, HyperbolicSpace, IntersectionSet,
    Scalar, SpaceSpec, TangentVector, TreeEnd, TreePoint, TreeSpace, TreeVertex,
};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Geodesic,
    SpecialPoint,
    ChiSet,
}

impl Kind {
    fn arity(self) -> usize {
        match self {
            Kind::Geodesic => 2,
            Kind::SpecialPoint => 3,
            Kind::ChiSet => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Coords(Vec<f64>),
    Word(String),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub kind: Kind,
    pub points: Vec<PointSpec>,
    #[serde(default)]
    pub label: Option<String>,
    /// Records sharing a panel belong to the same picture.
    #[serde(default)]
    pub panel: usize,
}

pub type Xy = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Path {
    pub role: &'static str,
    pub points: Vec<Xy>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mark {
    pub role: &'static str,
    pub at: Xy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Item {
    pub panel: usize,
    pub kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub paths: Vec<Path>,
    pub marks: Vec<Mark>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scene {
    pub model: &'static str,
    pub space: String,
    pub items: Vec<Item>,
}

/// Parse a scenario. Blank text is the empty scenario.
pub fn parse_scenario(text: &str) -> Result<Vec<Record>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    serde_json::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))
}

pub fn emit_scene(space: SpaceSpec, records: &[Record]) -> Result<Scene, CliError> {
    match space {
        SpaceSpec::Hyperbolic { field: Field::Real, n: 2 } => {
            draw(&HyperbolicSpace::new(Field::Real, 2)?, space, records)
        }
        SpaceSpec::Tree { degree } => draw(&TreeSpace::new(degree)?, space, records),
        _ => Err(CliError::Usage(format!("scenes are drawn in rh:2 or a tree, not {space}"))),
    }
}

/// A model with a planar picture.
trait Canvas: BoundaryModel {
    const MODEL: &'static str;
    /// Half-length of drawn geodesics, in chart units.
    const REACH: i64;
    /// Chart step between polyline vertices, as a fraction.
    const STEP: (i64, i64);

    fn ideal(&self, spec: &PointSpec) -> Result<Self::Ideal, String>;
    fn place(&self, p: &Self::Point) -> Xy;
    /// Where an ideal point is drawn, if it has a finite position.
    fn place_ideal(&self, a: &Self::Ideal) -> Option<Xy>;
    fn ray(&self, p: &Self::Point, a: &Self::Ideal) -> crossratio_core::Result<Vec<Xy>>;
}

fn draw<M: Canvas>(model: &M, space: SpaceSpec, records: &[Record]) -> Result<Scene, CliError> {
    let items = records
        .iter()
        .enumerate()
        .map(|(i, r)| item(model, r).map_err(|e| CliError::Scenario(format!("record {i}: {e}"))))
        .collect::<Result<_, _>>()?;
    Ok(Scene { model: M::MODEL, space: space.to_string(), items })
}

fn item<M: Canvas>(model: &M, r: &Record) -> Result<Item, String> {
    if r.points.len() != r.kind.arity() {
        return Err(format!("{:?} takes {} points, got {}", r.kind, r.kind.arity(), r.points.len()));
    }
    let v = r.points.iter().map(|p| model.ideal(p)).collect::<Result<Vec<_>, _>>()?;
    let geo = |e: GeometryError| e.to_string();
    let mut paths = Vec::new();
    let mut marks = Vec::new();
    match r.kind {
        Kind::Geodesic => {
            let c = model.fresh_ideal(&[&v[0], &v[1]], 0);
            paths.push(Path { role: "geodesic", points: geodesic(model, &v[0], &v[1], &c).map_err(geo)? });
        }
        Kind::SpecialPoint => {
            let p = model.special_point(&v[0], &v[1], &v[2]).map_err(geo)?;
            for a in &v {
                paths.push(Path { role: "ray", points: model.ray(&p, a).map_err(geo)? });
            }
            marks.push(Mark { role: "special_point", at: model.place(&p) });
        }
        Kind::ChiSet => {
            paths.push(Path { role: "geodesic", points: geodesic(model, &v[0], &v[1], &v[2]).map_err(geo)? });
            paths.push(Path { role: "geodesic", points: geodesic(model, &v[2], &v[3], &v[0]).map_err(geo)? });
            let p = model.special_point(&v[0], &v[1], &v[2]).map_err(geo)?;
            marks.push(Mark { role: "special_point", at: model.place(&p) });
            let n = normalize_for_chi(model, &v[0], &v[1], &v[2], &v[3]).map_err(geo)?;
            let [a, b, c, d] = &n.quad;
            let at = |t| model.chart_point(&ChartElement::new(a.clone(), b.clone(), c.clone(), t));
            match chi_set(model, a, b, c, d).map_err(geo)? {
                IntersectionSet::Singleton(t) => {
                    marks.push(Mark { role: "chi", at: model.place(&at(t).map_err(geo)?) })
                }
                IntersectionSet::Interval(lo, hi) => {
                    let points = steps(lo, hi, M::STEP).into_iter().map(|t| at(t).map(|p| model.place(&p)));
                    paths.push(Path { role: "chi", points: points.collect::<Result<_, _>>().map_err(geo)? });
                }
            }
        }
    }
    Ok(Item { panel: r.panel, kind: r.kind, label: r.label.clone(), paths, marks })
}

/// `lo, lo + step, …` up to and including `hi`.
fn steps<R: Coord>(lo: R, hi: R, (num, den): (i64, i64)) -> Vec<R> {
    let step = R::ratio(num, den);
    let mut out = vec![lo];
    let mut t = lo + step;
    while t < hi {
        out.push(t);
        t = t + step;
    }
    if hi > lo {
        out.push(hi);
    }
    out
}

fn geodesic<M: Canvas>(model: &M, a: &M::Ideal, b: &M::Ideal, c: &M::Ideal) -> crossratio_core::Result<Vec<Xy>> {
    let reach = M::Real::ratio(M::REACH, 1);
    let mut out: Vec<Xy> = model.place_ideal(a).into_iter().collect();
    for t in steps(-reach, reach, M::STEP) {
        out.push(model.place(&model.chart_point(&ChartElement::new(a.clone(), b.clone(), c.clone(), t))?));
    }
    out.extend(model.place_ideal(b));
    Ok(out)
}

impl Canvas for HyperbolicSpace {
    const MODEL: &'static str = "poincare-disk";
    const REACH: i64 = 8;
    const STEP: (i64, i64) = (1, 8);

    fn ideal(&self, spec: &PointSpec) -> Result<HBoundaryPoint, String> {
        let PointSpec::Coords(xy) = spec else {
            return Err(format!("expected unit-circle coordinates, got {spec:?}"));
        };
        let norm = xy.iter().map(|x| x * x).sum::<f64>().sqrt();
        if xy.len() != 2 || !norm.is_finite() || norm == 0.0 {
            return Err(format!("expected a nonzero [x, y], got {xy:?}"));
        }
        let dir: Vec<Scalar> = xy.iter().map(|x| Scalar::real(Field::Real, x / norm)).collect();
        HBoundaryPoint::from_direction(Field::Real, &dir).map_err(|e| e.to_string())
    }

    fn place(&self, p: &HPoint) -> Xy {
        let e = p.vector().entries();
        let last = e[2].re();
        let s = last.signum() / (1.0 + last.abs());
        [e[0].re() * s, e[1].re() * s]
    }

    fn place_ideal(&self, a: &HBoundaryPoint) -> Option<Xy> {
        let c = a.sphere_coords();
        Some([c[0], c[1]])
    }

    fn ray(&self, p: &HPoint, a: &HBoundaryPoint) -> crossratio_core::Result<Vec<Xy>> {
        let u = TangentVector::toward(p, a)?;
        let (num, den) = Self::STEP;
        let mut out = (0..=Self::REACH * den / num)
            .map(|k| geodesic_point(&u, k as f64 * num as f64 / den as f64).map(|q| self.place(&q)))
            .collect::<crossratio_core::Result<Vec<_>>>()?;
        out.extend(self.place_ideal(a));
        Ok(out)
    }
}

/// Radial layout: vertex `w` sits at radius `|w|`, at the middle of an
/// angular sector that its parent's sector splits evenly among children.
fn place_vertex(t: &TreeSpace, w: &TreeVertex) -> Xy {
    let (mut lo, mut hi) = (0.0, TAU);
    let mut prev = None;
    for &l in w.word() {
        let children: Vec<u8> = (0..t.degree() as u8).filter(|&x| Some(x) != prev).collect();
        let idx = children.iter().position(|&x| x == l).expect("reduced word");
        let width = (hi - lo) / children.len() as f64;
        lo += idx as f64 * width;
        hi = lo + width;
        prev = Some(l);
    }
    let (r, theta) = (w.depth() as f64, (lo + hi) / 2.0);
    // `+ 0.0` keeps the root at `[0, 0]` rather than `[-0, 0]`.
    [r * theta.cos() + 0.0, r * theta.sin() + 0.0]
}

impl Canvas for TreeSpace {
    const MODEL: &'static str = "tree-layout";
    const REACH: i64 = 4;
    const STEP: (i64, i64) = (1, 2);

    fn ideal(&self, spec: &PointSpec) -> Result<TreeEnd, String> {
        let PointSpec::Word(s) = spec else {
            return Err(format!("expected an end word like \"01(20)\", got {spec:?}"));
        };
        self.end_from_str(s).map_err(|e| e.to_string())
    }

    fn place(&self, p: &TreePoint) -> Xy {
        let v = p.base_vertex();
        let from = place_vertex(self, v);
        match p.edge() {
            None => from,
            Some((l, f)) => {
                let to = place_vertex(self, &self.step(v, l));
                let f = rat_to_f64(f);
                [from[0] + f * (to[0] - from[0]), from[1] + f * (to[1] - from[1])]
            }
        }
    }

    fn place_ideal(&self, _: &TreeEnd) -> Option<Xy> {
        None
    }

    /// From `p` up to the branch point with the root-to-`a` path, then out
    /// along `a` for `REACH` edges past the deeper of the two.
    fn ray(&self, p: &TreePoint, a: &TreeEnd) -> crossratio_core::Result<Vec<Xy>> {
        let mut out = vec![self.place(p)];
        let mut v = p.base_vertex().clone();
        if let Some((l, _)) = p.edge() {
            let w = self.step(&v, l);
            let (bv, bw) =
                (self.busemann(a, &TreePoint::vertex(v.clone())), self.busemann(a, &TreePoint::vertex(w.clone())));
            if bw < bv {
                v = w;
            }
        }
        let branch = a.common_prefix_with_word(v.word());
        let target = v.depth().max(branch) + Self::REACH as usize;
        let mut word = v.word().to_vec();
        out.push(place_vertex(self, &v));
        while word.len() > branch {
            word.pop();
            out.push(place_vertex(self, &TreeVertex::new(word.clone())?));
        }
        while word.len() < target {
            word.push(a.letter(word.len()));
            out.push(place_vertex(self, &TreeVertex::new(word.clone())?));
        }
        out.dedup();
        Ok(out)
    }
}

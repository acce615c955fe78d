//! Seeded verification suites.
//!
//! A suite draws `samples` independent configurations, evaluates a
//! residual on each, and folds the results into a [`SuiteReport`]. Sample
//! `i` uses the ChaCha stream `i` of the run seed, so reports do not depend
//! on how samples are scheduled across threads.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Field;
use crate::boundary::{
    base_change_residual, log_cross_ratio, oplus_defect, ptolemy_defect, special_point_offset, BoundaryModel,
    ChartElement, Coord,
};
use crate::error::{GeometryError, Result};
use crate::hyperbolic::{self, geodesic_point, gromov_product_limit, horospherical_limit, HPoint, HyperbolicSpace};
use crate::reconstruction::{
    certify_sample, chi_set, intersects, midpoint_residual, normalize_for_chi, third_geodesic, tree_four_case,
};
use crate::sample::{random_half_step, Crossing, SampleRng, Sampler};
use crate::tree::{TreePoint, TreeSpace, Q};

/// At most this many failures are kept in a report (those with the
/// smallest sample ids).
pub const MAX_LISTED_FAILURES: usize = 50;

/// `2 ln φ`, the thin-triangle constant of the real hyperbolic plane.
pub fn thin_triangle_bound() -> f64 {
    2.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

/// A model space named on the command line: `tree:q`, `rh:n`, `ch:n`,
/// `hh:n` or `oh:2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceSpec {
    Tree { degree: usize },
    Hyperbolic { field: Field, n: usize },
}

impl SpaceSpec {
    pub fn is_tree(&self) -> bool {
        matches!(self, SpaceSpec::Tree { .. })
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Tree { degree } => write!(f, "tree:{degree}"),
            SpaceSpec::Hyperbolic { field, n } => {
                let tag = match field {
                    Field::Real => "rh",
                    Field::Complex => "ch",
                    Field::Quaternion => "hh",
                    Field::Octonion => "oh",
                };
                write!(f, "{tag}:{n}")
            }
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = SuiteError;

    fn from_str(s: &str) -> std::result::Result<Self, SuiteError> {
        let bad = || SuiteError::BadSpace(s.to_string());
        let (family, size) = s.split_once(':').ok_or_else(bad)?;
        let size: usize = size.parse().map_err(|_| bad())?;
        let field = match family {
            "tree" => {
                TreeSpace::new(size).map_err(|_| bad())?;
                return Ok(SpaceSpec::Tree { degree: size });
            }
            "rh" => Field::Real,
            "ch" => Field::Complex,
            "hh" => Field::Quaternion,
            "oh" => Field::Octonion,
            _ => return Err(bad()),
        };
        HyperbolicSpace::new(field, size).map_err(|_| bad())?;
        Ok(SpaceSpec::Hyperbolic { field, n: size })
    }
}

macro_rules! suites {
    ($($variant:ident => $name:literal, $claim:literal;)*) => {
        /// The registered suites, one per verified statement.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum SuiteName {
            $($variant,)*
        }

        impl SuiteName {
            pub const ALL: &'static [SuiteName] = &[$(SuiteName::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(SuiteName::$variant => $name,)*
                }
            }

            /// The statement the suite checks.
            pub fn claim(self) -> &'static str {
                match self {
                    $(SuiteName::$variant => $claim,)*
                }
            }
        }

        impl FromStr for SuiteName {
            type Err = SuiteError;

            fn from_str(s: &str) -> std::result::Result<Self, SuiteError> {
                match s {
                    $($name => Ok(SuiteName::$variant),)*
                    _ => Err(SuiteError::UnknownSuite(s.to_string())),
                }
            }
        }
    };
}

suites! {
    Ptolemy => "ptolemy", "Ptolemy inequality ω(α,δ;γ,β) + ω(α,γ;δ,β) ≥ 1, with equality for crossing diagonals of an embedded real plane";
    FourCases => "four-cases", "four cases for the cross ratios of four tree ends, matching the special-point coincidences";
    Prop33 => "prop33", "|ln ω(α,β;γ,δ)| = d(p(α,β;γ), p(α,β;δ)) with the sign given by the side toward α";
    Eq3Angle => "eq3-angle", "e^{-(α|β)_o} = sin(θ/2) in the real hyperbolic plane";
    BaseChange => "base-change", "(α|β)_y = (α|β)_x - ½(B_α(x,y) + B_β(x,y))";
    ThinTriangles => "thin-triangles", "comparison points up to (y|z)_x are within 2 ln φ (trees: coincide)";
    Intersect => "intersect", "[α,β] meets [γ,δ] iff ω(α,γ;δ,β) ⊕ ω(α,δ;γ,β) = 1";
    Chi => "chi", "[α,β]_γ(s) = [γ,δ]_α(t) iff s = t ∈ χ(α,β;γ,δ)";
    Midpoint => "midpoint", "a crossing point is the midpoint of p(α,β;γ) and p(α,β;δ)";
    ThirdGeodesic => "third-geodesic", "a third geodesic through a crossing meets both lines in the ⊕ sense";
    Reconstruction => "reconstruction", "(Ω(X), d_ω) is isometric to X";
    Octonion => "octonion", "the octonionic metric restricts to the quaternionic one";
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl SuiteName {
    /// Default pass threshold on the maximal violation.
    pub fn default_tolerance(self, space: SpaceSpec) -> f64 {
        let quaternionic = matches!(space, SpaceSpec::Hyperbolic { field: Field::Quaternion, .. });
        if space.is_tree() {
            return 0.0;
        }
        match self {
            SuiteName::Eq3Angle | SuiteName::Octonion => 1e-10,
            SuiteName::ThinTriangles => 1e-9,
            SuiteName::Midpoint | SuiteName::Reconstruction if quaternionic => 1e-7,
            _ => 1e-8,
        }
    }

    /// Whether the suite is defined on the given space.
    pub fn supports(self, space: SpaceSpec) -> bool {
        match (self, space) {
            (SuiteName::Octonion, s) => s == SpaceSpec::Hyperbolic { field: Field::Octonion, n: 2 },
            (_, SpaceSpec::Hyperbolic { field: Field::Octonion, .. }) => false,
            (SuiteName::FourCases, s) => s.is_tree(),
            (SuiteName::Eq3Angle, s) => s == SpaceSpec::Hyperbolic { field: Field::Real, n: 2 },
            (SuiteName::Midpoint, s) => !s.is_tree(),
            _ => true,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("malformed space `{0}` (expected tree:q, rh:n, ch:n, hh:n or oh:2)")]
    BadSpace(String),
    #[error("suite `{suite}` is not defined on space `{space}`")]
    Unsupported { suite: String, space: String },
    #[error("sample count must be at least 1")]
    NoSamples,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub sample: u64,
    pub diagnostic: String,
}

/// Result of a suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub space: String,
    pub samples: u64,
    pub seed: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub failures: Vec<Failure>,
    pub failure_count: u64,
    pub claim: String,
    pub wall_time_secs: f64,
}

/// The mergeable part of a report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tally {
    pub samples: u64,
    pub max_violation: f64,
    pub failures: Vec<Failure>,
    pub failure_count: u64,
}

impl Tally {
    fn single(sample: u64, outcome: Result<Outcome>, tolerance: f64) -> Self {
        let mut t = Tally { samples: 1, ..Default::default() };
        match outcome {
            Ok(o) => {
                let v = if o.violation.is_nan() { f64::INFINITY } else { o.violation.max(0.0) };
                t.max_violation = v;
                let mut notes = o.notes;
                if v > tolerance {
                    notes.push(format!("violation {v:.3e} exceeds tolerance {tolerance:.1e}"));
                }
                if !notes.is_empty() {
                    t.failures.push(Failure { sample, diagnostic: notes.join("; ") });
                }
            }
            Err(e) => t.failures.push(Failure { sample, diagnostic: format!("error: {e}") }),
        }
        t.failure_count = t.failures.len() as u64;
        t
    }

    /// Associative and commutative combination of two tallies.
    pub fn merge(mut self, other: Tally) -> Tally {
        self.samples += other.samples;
        self.max_violation = self.max_violation.max(other.max_violation);
        self.failure_count += other.failure_count;
        self.failures.extend(other.failures);
        self.failures.sort_by_key(|f| f.sample);
        self.failures.truncate(MAX_LISTED_FAILURES);
        self
    }
}

/// Residual of one sample plus any qualitative failures.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub violation: f64,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn value(violation: f64) -> Self {
        Self { violation, notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, note: impl FnOnce() -> String) {
        if !ok {
            self.notes.push(note());
        }
    }

    fn absorb(&mut self, other: Outcome) {
        self.violation = self.violation.max(other.violation);
        self.notes.extend(other.notes);
    }
}

/// The random stream of sample `i`.
pub fn sample_rng(seed: u64, i: u64) -> SampleRng {
    let mut rng = SampleRng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Evaluate `check` on `samples` seeded samples in parallel.
pub fn run_samples<F>(samples: u64, seed: u64, tolerance: f64, check: F) -> Tally
where
    F: Fn(u64, &mut SampleRng) -> Result<Outcome> + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| Tally::single(i, check(i, &mut sample_rng(seed, i)), tolerance))
        .reduce(Tally::default, Tally::merge)
}

/// Run a registered suite.
pub fn run_suite(
    suite: SuiteName,
    space: SpaceSpec,
    samples: u64,
    seed: u64,
    tolerance: Option<f64>,
) -> std::result::Result<SuiteReport, SuiteError> {
    if samples == 0 {
        return Err(SuiteError::NoSamples);
    }
    if !suite.supports(space) {
        return Err(SuiteError::Unsupported { suite: suite.to_string(), space: space.to_string() });
    }
    let tolerance = tolerance.unwrap_or_else(|| suite.default_tolerance(space));
    let start = Instant::now();
    let tally = match space {
        SpaceSpec::Tree { degree } => {
            run_tree(suite, &TreeSpace::new(degree).expect("validated"), samples, seed, tolerance)
        }
        SpaceSpec::Hyperbolic { field, n } => {
            run_hyperbolic(suite, &HyperbolicSpace::new(field, n).expect("validated"), samples, seed, tolerance)
        }
    };
    let pass = tally.failure_count == 0 && tally.max_violation <= tolerance;
    Ok(SuiteReport {
        suite: suite.to_string(),
        space: space.to_string(),
        samples: tally.samples,
        seed,
        max_violation: tally.max_violation,
        tolerance,
        pass,
        failures: tally.failures,
        failure_count: tally.failure_count,
        claim: suite.claim().to_string(),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Certify that `(Ω(X), d_ω)` is isometric to the model on `samples`
/// random pairs of chart elements, at the default tolerance.
pub fn certify_isometry(space: SpaceSpec, samples: u64, seed: u64) -> std::result::Result<SuiteReport, SuiteError> {
    run_suite(SuiteName::Reconstruction, space, samples, seed, None)
}

fn run_tree(suite: SuiteName, t: &TreeSpace, samples: u64, seed: u64, tol: f64) -> Tally {
    match suite {
        SuiteName::Ptolemy => run_samples(samples, seed, tol, |_, rng| ptolemy_inequality(t, rng)),
        SuiteName::FourCases => run_samples(samples, seed, tol, |_, rng| four_cases(t, rng)),
        SuiteName::Prop33 => run_samples(samples, seed, tol, |_, rng| prop33(t, rng)),
        SuiteName::BaseChange => run_samples(samples, seed, tol, |_, rng| base_change_tree(t, rng)),
        SuiteName::ThinTriangles => run_samples(samples, seed, tol, |_, rng| thin_triangles_tree(t, rng)),
        SuiteName::Intersect => run_samples(samples, seed, tol, |_, rng| intersect_tree(t, rng)),
        SuiteName::Chi => run_samples(samples, seed, tol, |_, rng| chi_tree(t, rng)),
        SuiteName::ThirdGeodesic => run_samples(samples, seed, tol, |i, rng| third_geodesic_tree(t, rng, i % 2 == 1)),
        SuiteName::Reconstruction => run_samples(samples, seed, tol, |_, rng| reconstruction(t, rng)),
        SuiteName::Eq3Angle | SuiteName::Midpoint | SuiteName::Octonion => unreachable!("filtered by supports"),
    }
}

fn run_hyperbolic(suite: SuiteName, x: &HyperbolicSpace, samples: u64, seed: u64, tol: f64) -> Tally {
    match suite {
        SuiteName::Ptolemy => run_samples(samples, seed, tol, |_, rng| {
            let mut o = ptolemy_inequality(x, rng)?;
            o.absorb(ptolemy_equality(x, rng)?);
            Ok(o)
        }),
        SuiteName::Prop33 => run_samples(samples, seed, tol, |_, rng| prop33(x, rng)),
        SuiteName::Eq3Angle => run_samples(samples, seed, tol, |_, rng| eq3_angle(x, rng)),
        SuiteName::BaseChange => run_samples(samples, seed, tol, |_, rng| base_change_hyperbolic(x, rng)),
        SuiteName::ThinTriangles => run_samples(samples, seed, tol, |_, rng| thin_triangles_hyperbolic(x, rng)),
        SuiteName::Intersect => run_samples(samples, seed, tol, |_, rng| intersect_hyperbolic(x, rng)),
        SuiteName::Chi => run_samples(samples, seed, tol, |_, rng| chi_hyperbolic(x, rng)),
        SuiteName::Midpoint => run_samples(samples, seed, tol, |_, rng| midpoint(x, rng)),
        SuiteName::ThirdGeodesic => run_samples(samples, seed, tol, |_, rng| third_geodesic_hyperbolic(x, rng)),
        SuiteName::Reconstruction => run_samples(samples, seed, tol, |_, rng| reconstruction(x, rng)),
        SuiteName::Octonion => run_samples(samples, seed, tol, |_, rng| octonion_restriction(rng)),
        SuiteName::FourCases => unreachable!("filtered by supports"),
    }
}

// ---------------------------------------------------------------------------
// Per-sample checks.

/// Ptolemy inequality on a random quadruple: `max(0, 1 - sum)`.
pub fn ptolemy_inequality<M: Sampler>(model: &M, rng: &mut SampleRng) -> Result<Outcome> {
    let v = model.distinct_ideals(rng, 4);
    let defect = ptolemy_defect(model, &v[0], &v[1], &v[2], &v[3])?;
    Ok(Outcome::value((-defect).max(0.0)))
}

/// Ptolemy equality for crossing diagonals of an embedded real plane.
pub fn ptolemy_equality(x: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let [a, c, b, d] = x.random_planar_quadruple(rng)?;
    Ok(Outcome::value(ptolemy_defect(x, &a, &b, &c, &d)?.abs()))
}

pub fn four_cases(t: &TreeSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let v = t.distinct_ideals(rng, 4);
    let fc = tree_four_case(t, &v[0], &v[1], &v[2], &v[3])?;
    let [x, y, z] = fc.logs;
    let zero = Q::zero();
    let matched = [
        x < zero && y == zero && z < zero,
        x > zero && y < zero && z == zero,
        x == zero && y > zero && z > zero,
        x == zero && y == zero && z == zero,
    ]
    .iter()
    .filter(|b| **b)
    .count();
    let mut o = Outcome::value(0.0);
    o.require(matched == 1, || format!("{matched} case labels match"));
    o.require(fc.pattern_matches, || format!("special-point pattern disagrees with {:?}", fc.label));
    Ok(o)
}

/// `| |ln ω| - d(p_γ, p_δ) |` together with the sign rule: the offset of
/// `p(α,β;δ)` in the `γ`-chart equals `-ln ω`.
pub fn prop33<M: Sampler>(model: &M, rng: &mut SampleRng) -> Result<Outcome> {
    let v = model.distinct_ideals(rng, 4);
    let (a, b, c, d) = (&v[0], &v[1], &v[2], &v[3]);
    let lw = log_cross_ratio(model, a, b, c, d)?;
    let pc = model.special_point(a, b, c)?;
    let pd = model.special_point(a, b, d)?;
    let dist = model.distance(&pc, &pd)?;
    let offset = special_point_offset(model, a, b, c, d)?;
    let r1 = (lw.magnitude() - dist).magnitude().to_f64();
    let r2 = (lw + offset).magnitude().to_f64();
    let mut o = Outcome::value(r1.max(r2));
    let tol = model.eq_tol();
    o.require(!(lw.to_f64() > tol && offset.to_f64() > tol) && !(lw.to_f64() < -tol && offset.to_f64() < -tol), || {
        "sign of ln ω disagrees with the side of p(α,β;γ)".into()
    });
    Ok(o)
}

/// `|e^{-(α|β)_o} - sin(θ/2)|` with the Gromov product taken as a limit.
pub fn eq3_angle(x: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let o = x.random_point(rng);
    let v = x.distinct_ideals(rng, 2);
    let g = gromov_product_limit(&o, &v[0], &v[1])?;
    let theta = x.angle_at(&o, &v[0], &v[1])?;
    Ok(Outcome::value(((-g).exp() - (theta / 2.0).sin()).abs()))
}

pub fn base_change_tree(t: &TreeSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let x = t.random_point(rng);
    let y = t.random_point(rng);
    let v = t.distinct_ideals(rng, 2);
    Ok(Outcome::value(base_change_residual(t, &x, &y, &v[0], &v[1])?))
}

/// Base change with every term evaluated as a limit along rays.
pub fn base_change_hyperbolic(s: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let x = s.random_point(rng);
    let y = s.random_point(rng);
    let v = s.distinct_ideals(rng, 2);
    let (a, b) = (&v[0], &v[1]);
    let lhs = gromov_product_limit(&y, a, b)?;
    let rhs =
        gromov_product_limit(&x, a, b)? - 0.5 * (horospherical_limit(a, &x, &y)? + horospherical_limit(b, &x, &y)?);
    Ok(Outcome::value((lhs - rhs).abs()))
}

pub fn thin_triangles_tree(t: &TreeSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let x = t.random_vertex(rng, 6);
    let y = t.random_vertex(rng, 6);
    let z = t.random_vertex(rng, 6);
    let (px, py, pz) = (TreePoint::vertex(x.clone()), TreePoint::vertex(y.clone()), TreePoint::vertex(z.clone()));
    let g = crate::boundary::gromov_product_points(t, &px, &py, &pz)?;
    let s = random_half_step(rng, g);
    let p = t.point_on_segment(&x, &y, s)?;
    let r = t.point_on_segment(&x, &z, s)?;
    Ok(Outcome::value(t.distance(&p, &r).to_f64()))
}

pub fn thin_triangles_hyperbolic(s: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let x = s.random_point(rng);
    let y = s.random_point(rng);
    let z = s.random_point(rng);
    let g = crate::boundary::gromov_product_points(s, &x, &y, &z)?;
    let (Ok((uy, _)), Ok((uz, _))) = (hyperbolic::direction_to(&x, &y), hyperbolic::direction_to(&x, &z)) else {
        return Ok(Outcome::value(0.0));
    };
    let t = rng.random_range(0.0..=g.max(0.0));
    let p = geodesic_point(&uy, t)?;
    let r = geodesic_point(&uz, t)?;
    Ok(Outcome::value((s.distance(&p, &r)? - thin_triangle_bound()).max(0.0)))
}

/// Random quadruples and constructed crossings against the tripod oracle;
/// the `⊕`-value never drops below one.
pub fn intersect_tree(t: &TreeSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let mut o = Outcome::value(0.0);
    let c = t.random_crossing(rng)?;
    let v = t.distinct_ideals(rng, 4);
    for (a, b, g, d) in [(&c.alpha, &c.beta, &c.gamma, &c.delta), (&v[0], &v[1], &v[2], &v[3])] {
        let defect = oplus_defect(t, a, b, g, d)?;
        let meet = t.geodesics_meet(a, b, g, d)?;
        o.require(defect >= 0.0, || format!("⊕-value below one ({defect})"));
        o.require(intersects(t, a, b, g, d)? == meet, || format!("⊕-condition says {}, tripod oracle {meet}", !meet));
    }
    Ok(o)
}

/// Crossing and disjoint diagonals of an embedded real plane.
pub fn intersect_hyperbolic(x: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let [a, c, b, d] = x.random_planar_quadruple(rng)?;
    let mut o = Outcome::value(oplus_defect(x, &a, &b, &c, &d)?.abs());
    o.require(intersects(x, &a, &b, &c, &d)?, || "crossing diagonals not detected".into());
    // Sides [a, c] and [b, d] of the same quadrilateral are disjoint.
    o.require(!intersects(x, &a, &c, &b, &d)?, || "disjoint sides reported as meeting".into());
    Ok(o)
}

pub fn chi_tree(t: &TreeSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let c = t.random_crossing(rng)?;
    let n = normalize_for_chi(t, &c.alpha, &c.beta, &c.gamma, &c.delta)?;
    let [a, b, g, d] = &n.quad;
    let chi = chi_set(t, a, b, g, d)?;
    let len = chi.upper();
    let mut o = Outcome::value(0.0);
    let mut s = Q::zero();
    while s <= len {
        let p1 = t.chart_point(&ChartElement::new(a.clone(), b.clone(), g.clone(), s))?;
        let p2 = t.chart_point(&ChartElement::new(g.clone(), d.clone(), a.clone(), s))?;
        o.violation = o.violation.max(t.distance(&p1, &p2).to_f64());
        o.require(t.on_line(&p1, g, d), || format!("[α,β]_γ({s}) is off [γ,δ]"));
        s += Q::new(1, 2);
    }
    for s in [-Q::new(1, 2), len + Q::new(1, 2)] {
        let p = t.chart_point(&ChartElement::new(a.clone(), b.clone(), g.clone(), s))?;
        o.require(!t.on_line(&p, g, d), || format!("[α,β]_γ({s}) outside χ is still on [γ,δ]"));
    }
    o.require(t.on_line(&c.point, a, b) && t.on_line(&c.point, g, d), || "crossing point misplaced".into());
    Ok(o)
}

pub fn chi_hyperbolic(x: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let c = x.random_crossing(rng)?;
    let n = normalize_for_chi(x, &c.alpha, &c.beta, &c.gamma, &c.delta)?;
    let [a, b, g, d] = &n.quad;
    let s = match chi_set(x, a, b, g, d)? {
        crate::reconstruction::IntersectionSet::Singleton(s) => s,
        _ => return Err(GeometryError::Internal("interval on a hyperbolic space")),
    };
    let p1 = x.chart_point(&ChartElement::new(a.clone(), b.clone(), g.clone(), s))?;
    let p2 = x.chart_point(&ChartElement::new(g.clone(), d.clone(), a.clone(), s))?;
    Ok(Outcome::value(x.distance(&p1, &c.point)?.max(x.distance(&p2, &c.point)?)))
}

/// Midpoint residuals on a coplanar and a general crossing.
pub fn midpoint(x: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let probe = x.random_point(rng);
    let mut worst: f64 = 0.0;
    for c in [x.random_general_crossing(rng)?, x.random_crossing(rng)?] {
        worst = worst.max(midpoint_residual(x, &c.point, &c.alpha, &c.beta, &c.gamma, &c.delta, &probe)?);
    }
    Ok(Outcome::value(worst))
}

fn third_geodesic_outcome<M: BoundaryModel>(
    model: &M,
    c: &Crossing<M>,
    second: (&M::Ideal, &M::Ideal),
) -> Result<Outcome> {
    let g1 = model.fresh_ideal(&[&c.alpha, &c.beta], 11);
    let g2 = model.fresh_ideal(&[second.0, second.1], 13);
    let t1 = model.coordinate_on_line(&c.point, &c.alpha, &c.beta, &g1)?;
    let t2 = model.coordinate_on_line(&c.point, second.0, second.1, &g2)?;
    let e1 = ChartElement::new(c.alpha.clone(), c.beta.clone(), g1, t1);
    let e2 = ChartElement::new(second.0.clone(), second.1.clone(), g2, t2);
    let third = third_geodesic(model, &e1, &e2, 17)?;
    let p = model.chart_point(&ChartElement::new(third.alpha, third.beta, third.gamma, third.r))?;
    let off = model.distance(&p, &c.point)?.to_f64();
    Ok(Outcome::value(off.max(third.defects[0].abs()).max(third.defects[1].abs())))
}

/// Third geodesics through a tree crossing; with `shared` the second line
/// reuses `α`, so the two geodesics overlap along a ray.
pub fn third_geodesic_tree(t: &TreeSpace, rng: &mut SampleRng, shared: bool) -> Result<Outcome> {
    let c = t.random_crossing(rng)?;
    if shared {
        let v = c.point.base_vertex();
        let avoid = [&c.alpha, &c.beta];
        let eps = (0..t.degree() as u8)
            .map(|l| t.end_via(v, l, &avoid))
            .find(|e| t.on_line(&c.point, &c.alpha, e))
            .ok_or(GeometryError::Internal("no second line through the crossing"))?;
        third_geodesic_outcome(t, &c, (&c.alpha, &eps))
    } else {
        third_geodesic_outcome(t, &c, (&c.gamma, &c.delta))
    }
}

pub fn third_geodesic_hyperbolic(x: &HyperbolicSpace, rng: &mut SampleRng) -> Result<Outcome> {
    let c = x.random_general_crossing(rng)?;
    third_geodesic_outcome(x, &c, (&c.gamma, &c.delta))
}

pub fn reconstruction<M: Sampler>(model: &M, rng: &mut SampleRng) -> Result<Outcome> {
    let cert = certify_sample(model, rng)?;
    Ok(Outcome { violation: cert.violation(), notes: cert.failures })
}

/// A quaternionic pair measured in `HH²` and again through the octonionic
/// metric after the inclusion `H³ ⊂ O³₀`.
pub fn octonion_restriction(rng: &mut SampleRng) -> Result<Outcome> {
    let hh = HyperbolicSpace::new(Field::Quaternion, 2)?;
    let p = hh.random_point(rng);
    let r = hh.random_point(rng);
    let d_h = hh.distance(&p, &r)?;
    let lift = |x: &HPoint| HPoint::new(x.vector().lift(Field::Octonion)?);
    let d_o = hyperbolic::distance(&lift(&p)?, &lift(&r)?)?;
    Ok(Outcome::value((d_h - d_o).abs()))
}

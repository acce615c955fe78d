//! Acceptance run: one PASS/FAIL line per criterion, with per-space detail
//! lines underneath. Sample counts and tolerances are fixed here and do not
//! follow the suite defaults.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use crossratio_core::sample::SampleRng;
use crossratio_core::suites::{self, certify_isometry, run_samples, Outcome, SpaceSpec, Tally};
use crossratio_core::{Field, HyperbolicSpace, Result, TreeSpace};

const SEED: u64 = 20_240_601;

fn tree(q: usize) -> TreeSpace {
    TreeSpace::new(q).unwrap()
}

fn hyp(field: Field, n: usize) -> HyperbolicSpace {
    HyperbolicSpace::new(field, n).unwrap()
}

fn rh2() -> HyperbolicSpace {
    hyp(Field::Real, 2)
}
fn rh3() -> HyperbolicSpace {
    hyp(Field::Real, 3)
}
fn ch2() -> HyperbolicSpace {
    hyp(Field::Complex, 2)
}
fn hh2() -> HyperbolicSpace {
    hyp(Field::Quaternion, 2)
}

/// One space-level measurement inside a criterion.
struct Part {
    space: &'static str,
    tally: Tally,
    tolerance: f64,
    elapsed: Duration,
    time_limit: Option<Duration>,
}

impl Part {
    fn pass(&self) -> bool {
        self.tally.failure_count == 0
            && self.tally.max_violation <= self.tolerance
            && self.time_limit.is_none_or(|limit| self.elapsed <= limit)
    }
}

fn part<F>(space: &'static str, samples: u64, tolerance: f64, check: F) -> Part
where
    F: Fn(u64, &mut SampleRng) -> Result<Outcome> + Sync,
{
    let start = Instant::now();
    let tally = run_samples(samples, SEED, tolerance, check);
    Part { space, tally, tolerance, elapsed: start.elapsed(), time_limit: None }
}

fn timed(mut p: Part, limit: Duration) -> Part {
    p.time_limit = Some(limit);
    p
}

fn report(id: usize, name: &str, parts: &[Part]) -> bool {
    report_within(id, name, parts, None)
}

/// Like [`report`], with an overall runtime budget for the criterion.
fn report_within(id: usize, name: &str, parts: &[Part], budget: Option<(Duration, Duration)>) -> bool {
    let in_budget = budget.is_none_or(|(spent, limit)| spent <= limit);
    let pass = parts.iter().all(Part::pass) && in_budget;
    let worst = parts.iter().map(|p| p.tally.max_violation).fold(0.0, f64::max);
    let samples: u64 = parts.iter().map(|p| p.tally.samples).sum();
    println!(
        "[{}] {id:>2}. {name}: {samples} samples over {} space(s), worst violation {worst:.3e}",
        if pass { "PASS" } else { "FAIL" },
        parts.len()
    );
    for p in parts {
        let limit = p.time_limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        println!(
            "       {:<8} n={:<6} max={:.3e} tol={:.0e} failures={} time={:.2}s{limit}",
            p.space,
            p.tally.samples,
            p.tally.max_violation,
            p.tolerance,
            p.tally.failure_count,
            p.elapsed.as_secs_f64()
        );
        if let Some(f) = p.tally.failures.first() {
            println!("       first failure: sample {} {}", f.sample, f.diagnostic);
        }
    }
    if let Some((spent, limit)) = budget {
        println!("       total time {:.2}s (limit {}s)", spent.as_secs_f64(), limit.as_secs());
    }
    pass
}

fn main() -> ExitCode {
    let total = Instant::now();
    let minute = Duration::from_secs(60);
    let mut all = true;

    all &= report(
        1,
        "Ptolemy inequality, sum ≥ 1 - 1e-8",
        &[
            timed(part("tree:3", 10_000, 1e-8, |_, r| suites::ptolemy_inequality(&tree(3), r)), minute),
            timed(part("rh:2", 10_000, 1e-8, |_, r| suites::ptolemy_inequality(&rh2(), r)), minute),
            timed(part("rh:3", 10_000, 1e-8, |_, r| suites::ptolemy_inequality(&rh3(), r)), minute),
            timed(part("ch:2", 10_000, 1e-8, |_, r| suites::ptolemy_inequality(&ch2(), r)), minute),
            timed(part("hh:2", 10_000, 1e-8, |_, r| suites::ptolemy_inequality(&hh2(), r)), minute),
        ],
    );

    all &= report(
        2,
        "Ptolemy equality in embedded real planes, |sum - 1| ≤ 1e-8",
        &[
            part("rh:2", 1_000, 1e-8, |_, r| suites::ptolemy_equality(&rh2(), r)),
            part("rh:3", 1_000, 1e-8, |_, r| suites::ptolemy_equality(&rh3(), r)),
            part("ch:2", 1_000, 1e-8, |_, r| suites::ptolemy_equality(&ch2(), r)),
            part("hh:2", 1_000, 1e-8, |_, r| suites::ptolemy_equality(&hh2(), r)),
        ],
    );

    all &= report(
        3,
        "tree four cases, one label each and matching special-point pattern",
        &[
            part("tree:3", 10_000, 0.0, |_, r| suites::four_cases(&tree(3), r)),
            part("tree:5", 10_000, 0.0, |_, r| suites::four_cases(&tree(5), r)),
        ],
    );

    all &= report(
        4,
        "|ln ω| equals the special-point distance, with consistent sign",
        &[
            part("tree:3", 10_000, 0.0, |_, r| suites::prop33(&tree(3), r)),
            part("rh:2", 10_000, 1e-8, |_, r| suites::prop33(&rh2(), r)),
            part("rh:3", 10_000, 1e-8, |_, r| suites::prop33(&rh3(), r)),
            part("ch:2", 10_000, 1e-8, |_, r| suites::prop33(&ch2(), r)),
            part("hh:2", 10_000, 1e-8, |_, r| suites::prop33(&hh2(), r)),
        ],
    );

    all &= report(
        5,
        "Gromov product against the visual angle in rh:2, ≤ 1e-10",
        &[part("rh:2", 1_000, 1e-10, |_, r| suites::eq3_angle(&rh2(), r))],
    );

    all &= report(
        6,
        "base change of Gromov products",
        &[
            part("tree:3", 1_000, 0.0, |_, r| suites::base_change_tree(&tree(3), r)),
            part("rh:2", 1_000, 1e-8, |_, r| suites::base_change_hyperbolic(&rh2(), r)),
            part("rh:3", 1_000, 1e-8, |_, r| suites::base_change_hyperbolic(&rh3(), r)),
            part("ch:2", 1_000, 1e-8, |_, r| suites::base_change_hyperbolic(&ch2(), r)),
            part("hh:2", 1_000, 1e-8, |_, r| suites::base_change_hyperbolic(&hh2(), r)),
        ],
    );

    // Violation is the excess over 2 ln φ, so the tolerance is the 1e-9 slack.
    all &= report(
        7,
        "thin triangles, d(p,q) ≤ 2 ln φ + 1e-9 (trees: 0)",
        &[
            part("rh:2", 10_000, 1e-9, |_, r| suites::thin_triangles_hyperbolic(&rh2(), r)),
            part("rh:3", 10_000, 1e-9, |_, r| suites::thin_triangles_hyperbolic(&rh3(), r)),
            part("ch:2", 10_000, 1e-9, |_, r| suites::thin_triangles_hyperbolic(&ch2(), r)),
            part("hh:2", 10_000, 1e-9, |_, r| suites::thin_triangles_hyperbolic(&hh2(), r)),
            part("tree:3", 10_000, 0.0, |_, r| suites::thin_triangles_tree(&tree(3), r)),
        ],
    );

    all &= report(
        8,
        "crossing point is the midpoint of the special points",
        &[
            part("rh:3", 1_000, 1e-8, |_, r| suites::midpoint(&rh3(), r)),
            part("ch:2", 1_000, 1e-8, |_, r| suites::midpoint(&ch2(), r)),
            part("hh:2", 1_000, 1e-7, |_, r| suites::midpoint(&hh2(), r)),
        ],
    );

    all &= report(
        9,
        "shared chart coordinates reproduce the intersection (trees: whole interval)",
        &[
            part("tree:3", 1_000, 0.0, |_, r| suites::chi_tree(&tree(3), r)),
            part("tree:5", 1_000, 0.0, |_, r| suites::chi_tree(&tree(5), r)),
            part("rh:2", 1_000, 1e-8, |_, r| suites::chi_hyperbolic(&rh2(), r)),
            part("rh:3", 1_000, 1e-8, |_, r| suites::chi_hyperbolic(&rh3(), r)),
            part("ch:2", 1_000, 1e-8, |_, r| suites::chi_hyperbolic(&ch2(), r)),
            part("hh:2", 1_000, 1e-8, |_, r| suites::chi_hyperbolic(&hh2(), r)),
        ],
    );

    all &= report(
        10,
        "third geodesic through a crossing, both ⊕-conditions",
        &[
            part("tree:3", 1_000, 0.0, |i, r| suites::third_geodesic_tree(&tree(3), r, i % 2 == 1)),
            part("rh:2", 1_000, 1e-8, |_, r| suites::third_geodesic_hyperbolic(&rh2(), r)),
            part("rh:3", 1_000, 1e-8, |_, r| suites::third_geodesic_hyperbolic(&rh3(), r)),
            part("ch:2", 1_000, 1e-8, |_, r| suites::third_geodesic_hyperbolic(&ch2(), r)),
            part("hh:2", 1_000, 1e-8, |_, r| suites::third_geodesic_hyperbolic(&hh2(), r)),
        ],
    );

    let start = Instant::now();
    let isometry: Vec<Part> = [
        ("tree:3", 1_000, 0.0),
        ("rh:2", 1_000, 1e-8),
        ("rh:3", 1_000, 1e-8),
        ("ch:2", 500, 1e-8),
        ("hh:2", 200, 1e-7),
    ]
    .into_iter()
    .map(|(space, samples, tolerance)| {
        let t = Instant::now();
        let r = certify_isometry(space.parse::<SpaceSpec>().unwrap(), samples, SEED).unwrap();
        Part {
            space,
            tally: Tally {
                samples: r.samples,
                max_violation: r.max_violation,
                failures: r.failures,
                failure_count: r.failure_count,
            },
            tolerance,
            elapsed: t.elapsed(),
            time_limit: None,
        }
    })
    .collect();
    let budget = Some((start.elapsed(), Duration::from_secs(600)));
    all &= report_within(11, "(Ω, d_ω) isometric to the model, chart-independent", &isometry, budget);

    all &= report(
        12,
        "octonionic metric restricted to quaternionic pairs, ≤ 1e-10",
        &[part("oh:2", 500, 1e-10, |_, r| suites::octonion_restriction(r))],
    );

    println!(
        "acceptance total {:.1}s: {}",
        total.elapsed().as_secs_f64(),
        if all { "all criteria pass" } else { "FAILURES" }
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

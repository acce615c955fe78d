use crossratio_core::boundary::Chart;
use crossratio_core::reconstruction::{chain_residual, d_omega, omega_equivalent};
use crossratio_core::sample::{SampleRng, Sampler};
use crossratio_core::suites::sample_rng;
use crossratio_core::{BoundaryModel, ChartElement, Coord, Field, HyperbolicSpace, TreeSpace};
use proptest::prelude::*;

fn hyperbolic() -> impl Strategy<Value = HyperbolicSpace> {
    prop::sample::select(vec![
        HyperbolicSpace::new(Field::Real, 2).unwrap(),
        HyperbolicSpace::new(Field::Real, 3).unwrap(),
        HyperbolicSpace::new(Field::Complex, 2).unwrap(),
        HyperbolicSpace::new(Field::Quaternion, 2).unwrap(),
    ])
}

fn tree() -> impl Strategy<Value = TreeSpace> {
    (3usize..=5).prop_map(|q| TreeSpace::new(q).unwrap())
}

/// Another chart element naming the point of `e`, on the geodesic through
/// that point and a random second point.
fn rename<M: Sampler>(model: &M, e: &Chart<M>, rng: &mut SampleRng) -> Chart<M> {
    let p = model.chart_point(e).unwrap();
    let r = model.random_point(rng);
    let (a, b) = model.line_through_points(&p, &r, 0).unwrap();
    let g = model.fresh_ideal(&[&a, &b], 3);
    let t = model.coordinate_on_line(&p, &a, &b, &g).unwrap();
    ChartElement::new(a, b, g, t)
}

fn equivalent<M: BoundaryModel>(model: &M, x: &Chart<M>, y: &Chart<M>) -> bool {
    omega_equivalent(model, x, y).unwrap().equivalent
}

fn check_equivalence<M: Sampler>(model: &M, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = sample_rng(seed, 0);
    let e1 = model.random_chart(&mut rng).unwrap();
    let e2 = rename(model, &e1, &mut rng);
    let e3 = rename(model, &e2, &mut rng);
    let other = model.random_chart(&mut rng).unwrap();
    prop_assert!(equivalent(model, &e1, &e1));
    prop_assert!(equivalent(model, &e1, &e1.reversed()));
    prop_assert_eq!(equivalent(model, &e1, &e2), equivalent(model, &e2, &e1));
    prop_assert_eq!(equivalent(model, &e1, &other), equivalent(model, &other, &e1));
    prop_assert!(equivalent(model, &e1, &e2) && equivalent(model, &e2, &e3));
    prop_assert!(equivalent(model, &e1, &e3));
    let res = chain_residual(model, &e1, &e2, 5);
    prop_assert!(matches!(res, Ok(r) if r <= 1e-8), "chain residual {res:?}");
    Ok(())
}

fn check_metric<M: Sampler>(model: &M, seed: u64, tol: f64) -> Result<(), TestCaseError> {
    let mut rng = sample_rng(seed, 0);
    let [x, y, z] = [0; 3].map(|_| model.random_chart(&mut rng).unwrap());
    let d = |a: &Chart<M>, b: &Chart<M>| d_omega(model, a, b, 0, 0).unwrap().value.to_f64();
    let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
    prop_assert!(d(&x, &x) <= tol);
    prop_assert!(d(&x, &x.reversed()) <= tol);
    prop_assert!((xy - yx).abs() <= tol, "asymmetric: {xy} vs {yx}");
    prop_assert!(xz <= xy + yz + tol, "triangle: {xz} > {xy} + {yz}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn equivalence_is_reflexive_symmetric_transitive_hyperbolic(x in hyperbolic(), seed in any::<u64>()) {
        check_equivalence(&x, seed)?;
    }

    #[test]
    fn equivalence_is_reflexive_symmetric_transitive_tree(t in tree(), seed in any::<u64>()) {
        check_equivalence(&t, seed)?;
    }

    #[test]
    fn d_omega_is_a_metric_hyperbolic(x in hyperbolic(), seed in any::<u64>()) {
        check_metric(&x, seed, 1e-8)?;
    }

    #[test]
    fn d_omega_is_a_metric_tree(t in tree(), seed in any::<u64>()) {
        check_metric(&t, seed, 0.0)?;
    }
}

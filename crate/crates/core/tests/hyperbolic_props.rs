use crossratio_core::hyperbolic::{distance, geodesic_point};
use crossratio_core::sample::Sampler;
use crossratio_core::suites::sample_rng;
use crossratio_core::{Field, HPoint, HyperbolicSpace, Scalar};
use proptest::prelude::*;

fn spaces() -> Vec<HyperbolicSpace> {
    let mut out = Vec::new();
    for field in [Field::Real, Field::Complex, Field::Quaternion] {
        for n in [2, 3] {
            out.push(HyperbolicSpace::new(field, n).unwrap());
        }
    }
    out
}

fn space() -> impl Strategy<Value = HyperbolicSpace> {
    prop::sample::select(spaces())
}

#[test]
fn triangle_inequality_on_sampled_triples() {
    for x in spaces() {
        for i in 0..10_000 {
            let mut rng = sample_rng(5, i);
            let (p, q, r) = (x.random_point(&mut rng), x.random_point(&mut rng), x.random_point(&mut rng));
            let (pq, qr, pr) = (distance(&p, &q).unwrap(), distance(&q, &r).unwrap(), distance(&p, &r).unwrap());
            assert!(pr <= pq + qr + 1e-9, "{}:{} sample {i}", x.field(), x.n());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn geodesics_are_arclength_across_the_base(x in space(), seed in any::<u64>(), s in 0.0..20.0f64, t in 0.0..20.0f64) {
        let mut rng = sample_rng(seed, 0);
        let o = x.random_point(&mut rng);
        let u = x.random_tangent(&o, &mut rng).unwrap();
        let d = distance(&geodesic_point(&u, s).unwrap(), &geodesic_point(&u, -t).unwrap()).unwrap();
        prop_assert!((d - (s + t)).abs() <= 1e-10, "d = {d}, s + t = {}", s + t);
    }

    #[test]
    fn geodesics_are_arclength_near_the_base(x in space(), seed in any::<u64>(), s in -4.0..4.0f64, t in -4.0..4.0f64) {
        let mut rng = sample_rng(seed, 0);
        let o = x.random_point(&mut rng);
        let u = x.random_tangent(&o, &mut rng).unwrap();
        let d = distance(&geodesic_point(&u, s).unwrap(), &geodesic_point(&u, t).unwrap()).unwrap();
        prop_assert!((d - (s - t).abs()).abs() <= 1e-10, "d = {d}, |s - t| = {}", (s - t).abs());
    }

    /// Far out, a rounded hyperboloid vector with entries of size `e^r`
    /// only pins its point down to about `ε e^{2r}`. Here `r` is the length
    /// of the path that built the point, out to `o` and then along `u`,
    /// since the cancellation in `cosh(s) o + sinh(s) u` happens at that size.
    #[test]
    fn geodesics_are_arclength_up_to_conditioning(x in space(), seed in any::<u64>(), s in -20.0..20.0f64, t in -20.0..20.0f64) {
        let mut rng = sample_rng(seed, 0);
        let o = x.random_point(&mut rng);
        let u = x.random_tangent(&o, &mut rng).unwrap();
        let (p, q) = (geodesic_point(&u, s).unwrap(), geodesic_point(&u, t).unwrap());
        let r = distance(&o, &x.origin()).unwrap() + s.abs().max(t.abs());
        let bound = 1e-10 + 64.0 * f64::EPSILON * (2.0 * r).exp();
        let err = (distance(&p, &q).unwrap() - (s - t).abs()).abs();
        prop_assert!(err <= bound, "err = {err:e}, bound = {bound:e}");
    }

    #[test]
    fn distance_ignores_representatives(
        x in space(),
        seed in any::<u64>(),
        lam in prop::collection::vec(-2.0..2.0f64, 4),
        mu in prop::collection::vec(-2.0..2.0f64, 4),
    ) {
        let mut rng = sample_rng(seed, 0);
        let p = x.random_point(&mut rng);
        let q = x.random_point(&mut rng);
        let dim = x.field().dim();
        let (lam, mu) = (Scalar::new(x.field(), &lam[..dim]).unwrap(), Scalar::new(x.field(), &mu[..dim]).unwrap());
        prop_assume!(lam.norm() > 0.1 && mu.norm() > 0.1);
        let p2 = HPoint::new(p.vector().right_mul(&lam)).unwrap();
        let q2 = HPoint::new(q.vector().right_mul(&mu)).unwrap();
        let d = distance(&p, &q).unwrap();
        prop_assert!((distance(&p2, &q2).unwrap() - d).abs() <= 1e-10);
    }

    #[test]
    fn distance_is_symmetric_and_vanishes_on_the_diagonal(x in space(), seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 0);
        let p = x.random_point(&mut rng);
        let q = x.random_point(&mut rng);
        prop_assert!((distance(&p, &q).unwrap() - distance(&q, &p).unwrap()).abs() <= 1e-12);
        prop_assert!(distance(&p, &p).unwrap() <= 1e-7);
    }
}

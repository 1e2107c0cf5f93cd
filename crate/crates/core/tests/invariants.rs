//! Property tests over random primitives and generated families.

use proptest::prelude::*;

use linunion::depth::DiscArrangement;
use linunion::family::{gen_random_curves, gen_random_discs, Family, GeneratorParams};
use linunion::geom::{
    circle_circle_intersections, contains_point, curve_curve_intersections, Circle, Point, QuadCurve,
    Tolerance,
};
use linunion::graph::{
    build_graph, clique_number, degeneracy_order, greedy_color, max_back_degree, EdgeClass,
};

const EPS: f64 = 1e-9;

fn tol() -> Tolerance {
    Tolerance::new(EPS).unwrap()
}

fn circle(id: usize) -> impl Strategy<Value = Circle> {
    (-10.0..10.0f64, -10.0..10.0f64, 0.1..5.0f64).prop_map(move |(x, y, r)| Circle::new(id, x, y, r).unwrap())
}

fn curve(id: usize) -> impl Strategy<Value = QuadCurve> {
    (-2.0..2.0f64, -4.0..4.0f64, -4.0..4.0f64).prop_map(move |(a, b, c)| QuadCurve::new(id, a, b, c).unwrap())
}

fn same_points(u: &[Point], v: &[Point]) -> bool {
    u.len() == v.len() && u.iter().all(|p| v.iter().any(|q| p.dist(q) <= EPS))
}

fn disc_family() -> impl Strategy<Value = Family> {
    (1usize..40, any::<u64>()).prop_map(|(n, seed)| gen_random_discs(&GeneratorParams::new(n, seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn circle_intersections_symmetric_and_on_both(c1 in circle(0), c2 in circle(1)) {
        let (Ok(ab), Ok(ba)) = (circle_circle_intersections(&c1, &c2, tol()), circle_circle_intersections(&c2, &c1, tol())) else {
            return Ok(());
        };
        prop_assert!(ab.is_empty() || ab.len() == 2);
        prop_assert!(same_points(&ab, &ba));
        for p in &ab {
            prop_assert!((p.dist(&c1.center()) - c1.r).abs() <= EPS);
            prop_assert!((p.dist(&c2.center()) - c2.r).abs() <= EPS);
        }
    }

    #[test]
    fn curve_intersections_at_most_two_and_on_both(q1 in curve(0), q2 in curve(1)) {
        let Ok(pts) = curve_curve_intersections(&q1, &q2, tol()) else { return Ok(()); };
        prop_assert!(pts.len() <= 2);
        for p in &pts {
            // Residual relative to the magnitude of the terms being summed.
            let scale = 1.0 + p.x * p.x + p.x.abs();
            prop_assert!((p.y - q1.eval(p.x)).abs() <= EPS * scale);
            prop_assert!((p.y - q2.eval(p.x)).abs() <= EPS * scale);
        }
        prop_assert!(pts.windows(2).all(|w| w[0].x < w[1].x));
    }

    #[test]
    fn containment_invariant_under_rigid_motion(
        c in circle(0),
        px in -15.0..15.0f64,
        py in -15.0..15.0f64,
        theta in 0.0..std::f64::consts::TAU,
        tx in -100.0..100.0f64,
        ty in -100.0..100.0f64,
    ) {
        let p = Point::new(px, py);
        let gap = (p.dist(&c.center()) - c.r).abs();
        // Stay clear of the eps band edge, where rounding may flip the class.
        prop_assume!((gap - EPS).abs() > 1e-7);
        let (s, co) = theta.sin_cos();
        let mv = |x: f64, y: f64| Point::new(co * x - s * y + tx, s * x + co * y + ty);
        let cc = mv(c.cx, c.cy);
        let moved = Circle::new(0, cc.x, cc.y, c.r).unwrap();
        prop_assert_eq!(contains_point(&c, &p, tol()), contains_point(&moved, &mv(px, py), tol()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn depth_profile_and_points(f in disc_family()) {
        let arr = DiscArrangement::from_family(&f).unwrap();
        let total = arr.points().len();
        prop_assert_eq!(total % 2, 0);
        let profile = arr.profile();
        prop_assert_eq!(profile.total, total);
        let gs: Vec<usize> = profile.g.values().copied().collect();
        prop_assert!(gs.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(profile.g(profile.max_depth.max(2)), total);
        prop_assert!(arr.depths().all(|d| d >= 2));

        let g = build_graph(&f).unwrap();
        prop_assert!(arr.max_depth() <= clique_number(&g).unwrap());
        prop_assert_eq!(g.count_class(EdgeClass::BoundaryCrossing) * 2, total);
        prop_assert_eq!(
            g.m(),
            g.count_class(EdgeClass::BoundaryCrossing) + g.count_class(EdgeClass::Containment)
        );
    }

    #[test]
    fn degeneracy_and_coloring(f in disc_family()) {
        let g = build_graph(&f).unwrap();
        let deg = degeneracy_order(&g);
        let mut sorted = deg.order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..g.n()).collect::<Vec<_>>());
        prop_assert_eq!(max_back_degree(&g, &deg.order) + 1, deg.col);
        let coloring = greedy_color(&g, &deg.order).unwrap();
        prop_assert!(coloring.is_proper(&g));
        prop_assert!(coloring.used <= deg.col);
        prop_assert!(clique_number(&g).unwrap() <= coloring.used);
    }

    #[test]
    fn family_json_round_trip(f in disc_family(), cn in 1usize..12, cs in any::<u64>()) {
        let back = Family::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), f.to_json());
        prop_assert_eq!(back.disc_members().unwrap(), f.disc_members().unwrap());

        let curves = gen_random_curves(&GeneratorParams::new(cn, cs)).unwrap();
        let back = Family::from_json(&curves.to_json()).unwrap();
        prop_assert_eq!(back.curve_members().unwrap(), curves.curve_members().unwrap());
        prop_assert_eq!(back.tol(), curves.tol());
    }
}

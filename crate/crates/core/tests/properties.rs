use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use hypentropy::boundary::{BoundaryMap, ParamSpec};
use hypentropy::current::beam_measure;
use hypentropy::disk::{geodesic_through, hyperbolic_distance, nu_box, CirclePoint, Moebius};
use hypentropy::maskit::{build_polygon, MaskitParams};
use hypentropy::polygon::{build_regular_polygon, side_count, side_pairing_sigma};

fn interior() -> impl Strategy<Value = Complex64> {
    (0.0..0.9f64, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn automorphism() -> impl Strategy<Value = Moebius> {
    (interior(), -PI..PI).prop_map(|(p, t)| Moebius::disk_automorphism(p, t))
}

fn maskit_params() -> impl Strategy<Value = MaskitParams> {
    (0.8..2.5f64, 0.8..2.5f64, 0.8..2.5f64, -0.7..0.7f64, -0.7..0.7f64, -0.7..0.7f64)
        .prop_map(|(a, b, g, s, t, r)| MaskitParams::new(a, b, g, s, t, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_fixed_point_free_involution(genus in 2usize..12, k in 1usize..100) {
        let n = side_count(genus);
        let k = (k - 1) % n + 1;
        let s = side_pairing_sigma(genus, k).unwrap();
        prop_assert_ne!(s, k);
        prop_assert_eq!(side_pairing_sigma(genus, s).unwrap(), k);
    }

    #[test]
    fn translation_length_conjugation_invariant(g in automorphism(), k in 0usize..12) {
        let poly = build_regular_polygon(2).unwrap();
        let t = poly.generator(k);
        let conj = g.compose(t).compose(&g.inverse().unwrap());
        prop_assert!((conj.translation_length().unwrap() - t.translation_length().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn nu_box_splits_additively(mut t in prop::array::uniform4(0.0..TAU), s in 0.01..0.99f64) {
        t.sort_by(f64::total_cmp);
        prop_assume!((1..4).all(|i| t[i] - t[i - 1] > 1e-3) && t[0] + TAU - t[3] > 1e-3);
        let [a, b, c, d] = t.map(CirclePoint::new);
        let m = a.advance(s * a.offset_to(b));
        let whole = nu_box(a, b, c, d).unwrap();
        let parts = nu_box(a, m, c, d).unwrap() + nu_box(m, b, c, d).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-11 * whole.max(1.0));
    }

    #[test]
    fn geodesic_reversal_is_exact(p in interior(), q in interior()) {
        prop_assume!((p - q).norm() > 1e-9);
        prop_assert_eq!(geodesic_through(q, p).unwrap(), geodesic_through(p, q).unwrap().reversed());
    }

    #[test]
    fn distance_invariant_under_automorphisms(g in automorphism(), p in interior(), q in interior()) {
        let d0 = hyperbolic_distance(p, q).unwrap();
        let d1 = hyperbolic_distance(g.apply(p).unwrap(), g.apply(q).unwrap()).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9 * d0.max(1.0));
    }

    #[test]
    fn perimeter_invariant_under_automorphisms(params in maskit_params(), g in automorphism()) {
        let Ok(poly) = build_polygon(&params) else { return Ok(()); };
        let moved = poly.transformed(&g).unwrap();
        prop_assert!((moved.perimeter() - poly.perimeter()).abs() < 1e-9);
    }

    #[test]
    fn boundary_map_branch_contains_point(x in -PI..PI) {
        let poly = build_regular_polygon(2).unwrap();
        let bm = BoundaryMap::from_spec(&poly, &ParamSpec::Midpoint).unwrap();
        let x = CirclePoint::new(x);
        let k = bm.branch(x);
        prop_assert!(bm.a(k).offset_to(x) < bm.a(k).offset_to(bm.a(k + 1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn beam_equals_length(p in interior(), q in interior()) {
        prop_assume!((p - q).norm() > 1e-6);
        let v = beam_measure(p, q).unwrap();
        prop_assert!((v - hyperbolic_distance(p, q).unwrap()).abs() < 1e-8);
    }
}

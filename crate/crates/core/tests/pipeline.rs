use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hypentropy::boundary::{markov_partition, transition_matrix, BoundaryMap, ParamSpec, Variant};
use hypentropy::current::omega_geo_measure;
use hypentropy::maskit::{build_polygon, entropy, sample_valid_params};
use hypentropy::parry::{slope_profile, Conjugacy};
use hypentropy::polygon::build_regular_polygon;
use hypentropy::spectral::{h_mu_from_perimeter, h_top_formula, perron};

#[test]
fn topological_entropy_is_rigid_but_measure_entropy_is_not() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut entropies = Vec::new();
    for _ in 0..5 {
        let params = sample_valid_params(&mut rng);
        let poly = build_polygon(&params).unwrap();
        let bm = BoundaryMap::from_spec(&poly, &ParamSpec::AllP).unwrap();
        let tm = transition_matrix(&bm, &markov_partition(&bm, Variant::A).unwrap()).unwrap();
        let lambda = perron(&tm.matrix).unwrap().lambda;
        assert!((lambda.ln() - h_top_formula(2)).abs() < 1e-10);
        let h_mu = entropy(&params).unwrap();
        assert!((h_mu_from_perimeter(2, omega_geo_measure(&poly).unwrap()).unwrap() - h_mu).abs() < 1e-6);
        assert!(h_mu < h_top_formula(2));
        entropies.push(h_mu);
    }
    let spread = entropies.iter().cloned().fold(f64::MIN, f64::max) - entropies.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 1e-3);
}

#[test]
fn constant_slope_model_on_an_irregular_polygon() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let poly = build_polygon(&sample_valid_params(&mut rng)).unwrap();
    let psi = Conjugacy::for_spec(&poly, &ParamSpec::AllP, Variant::A).unwrap();
    let bm = BoundaryMap::from_spec(&poly, &ParamSpec::AllQ).unwrap();
    let profile = slope_profile(&bm, &psi, 4000, 13).unwrap();
    assert!(profile.max_deviation < 1e-5, "{profile:?}");
}

#[test]
fn genus_three_conjugacy_uses_scaled_depth() {
    let poly = build_regular_polygon(3).unwrap();
    let psi = Conjugacy::for_spec(&poly, &ParamSpec::AllP, Variant::A).unwrap();
    let depth = hypentropy::parry::default_depth(3, psi.lambda());
    let bm = BoundaryMap::from_spec(&poly, &ParamSpec::AllP).unwrap();
    assert!(slope_profile(&bm, &psi, 4000, depth).unwrap().max_deviation < 1e-6);
}

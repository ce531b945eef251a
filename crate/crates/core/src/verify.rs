//! Seeded invariant suites. Each check reports a measured defect against a
//! fixed tolerance; a check passes when the defect does not exceed it.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{markov_partition, raw_three_point_matrix, transition_matrix, BoundaryMap, ParamSpec, Variant};
use crate::current::{beam_measure, omega_geo_measure};
use crate::disk::{geodesic_through, hyperbolic_distance, in_half_open_arc, nu_box, CirclePoint, Moebius};
use crate::error::{Error, Result};
use crate::maskit::{build_polygon, perimeter_formula, perimeter_from_traces, sample_valid_params, MaskitParams, NamedSurface};
use crate::parry::{circle_grid, compare_conjugacies, rotation_defect, slope_profile, parry_weights, Conjugacy};
use crate::polygon::{build_regular_polygon, isoareal_bound, validate_canonical, CanonicalPolygon};
use crate::quadrature::integrate_2d;
use crate::spectral::{perron, perron_from, rigidity_lambda};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Geometry,
    Markov,
    Parry,
    Current,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Geometry, Suite::Markov, Suite::Parry, Suite::Current];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Markov => "markov",
            Suite::Parry => "parry",
            Suite::Current => "current",
        }
    }

    fn checks(self) -> &'static [(&'static str, f64, CheckFn)] {
        match self {
            Suite::Geometry => GEOMETRY,
            Suite::Markov => MARKOV,
            Suite::Parry => PARRY,
            Suite::Current => CURRENT,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `all` or one suite name.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    Ok(vec![s.parse()?])
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}; expected all, geometry, markov, parry or current")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

type CheckFn = fn(&mut ChaCha8Rng) -> Result<f64>;

/// Runs every check of `suite`, each from its own stream of `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<CheckResult> {
    suite
        .checks()
        .iter()
        .enumerate()
        .map(|(i, &(name, tolerance, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let out = check(&mut rng);
            match out {
                Ok(measured) => CheckResult {
                    suite,
                    name,
                    measured,
                    tolerance,
                    passed: measured <= tolerance,
                    error: None,
                },
                Err(e) => CheckResult {
                    suite,
                    name,
                    measured: f64::NAN,
                    tolerance,
                    passed: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// The tolerance table of a suite, by check name.
pub fn tolerances(suite: Suite) -> Vec<(&'static str, f64)> {
    suite.checks().iter().map(|&(n, t, _)| (n, t)).collect()
}

const GEOMETRY: &[(&str, f64, CheckFn)] = &[
    ("projective equality respected by composition", 1e-12, projective_compose),
    ("translation length invariant under conjugation", 1e-10, conjugation_invariance),
    ("nu_box additive", 1e-11, nu_box_additivity),
    ("geodesic reversal exact", 0.0, geodesic_reversal),
    ("nu_box closed form matches quadrature", 1e-10, nu_box_quadrature),
    ("generators map sides onto partners reversed", 1e-9, generator_sides),
    ("perimeter invariant under a global Moebius map", 1e-9, perimeter_invariance),
    ("random Maskit polygons validate", 1e-8, maskit_validation),
    ("regular perimeter minimal", 1e-9, regular_minimal),
    ("isoareal inequality in genus two", 0.0, isoareal),
    ("perimeter routes agree", 1e-8, perimeter_routes),
    ("identified sides share lengths", 1e-8, identified_sides),
    ("untwisted tuples symmetric under conjugation", 1e-8, real_axis_symmetry),
];

const MARKOV: &[(&str, f64, CheckFn)] = &[
    ("exactly one branch per point", 0.0, branch_covering),
    ("boundary map continuous on branches", 1e-6, branch_continuity),
    ("extremal partitions Markov and irreducible", 0.0, extremal_markov),
    ("extremal matrices agree across polygons", 0.0, matrices_invariant),
    ("collapsed three-point matrix equals variant d", 0.0, collapsed_matrix),
    ("Perron eigenvalue rigid", 1e-9, rigidity),
    ("Perron eigenvalue independent of start", 1e-11, perron_restart_lambda),
    ("Perron vector independent of start", 1e-9, perron_restart_vector),
];

const PARRY: &[(&str, f64, CheckFn)] = &[
    ("Parry weights additive", 1e-11, parry_additivity),
    ("conjugacy increasing with variation 2pi", 1e-12, psi_monotone),
    ("inverse by bisection", 1e-9, psi_inverse),
    ("image map has constant slope", 1e-6, psi_slope),
    ("conjugacy equivariant under the index rotation", 1e-8, psi_rotation),
    ("P and Q conjugacies agree", 1e-8, psi_p_vs_q),
    ("truncation stable", 1e-11, psi_truncation),
];

const CURRENT: &[(&str, f64, CheckFn)] = &[
    ("beam equals segment length", 1e-8, beam_length),
    ("beam additive along a geodesic", 1e-8, beam_additivity),
    ("Omega_geo equals perimeter", 1e-6, omega_perimeter),
    ("Omega_geo invariant under a global Moebius map", 1e-6, omega_invariance),
    ("nu_box closed form matches quadrature", 1e-10, nu_box_quadrature),
];

fn random_automorphism(rng: &mut ChaCha8Rng) -> Moebius {
    let p = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(-PI..PI));
    Moebius::disk_automorphism(p, rng.gen_range(-PI..PI))
}

fn random_interior(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..radius), rng.gen_range(-PI..PI))
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn random_maskit_polygons(rng: &mut ChaCha8Rng, count: usize) -> Result<Vec<(MaskitParams, CanonicalPolygon)>> {
    (0..count)
        .map(|_| {
            let p = sample_valid_params(rng);
            Ok((p, build_polygon(&p)?))
        })
        .collect()
}

/// Four sorted random angles with pairwise gaps of at least `gap`.
fn separated_angles(rng: &mut ChaCha8Rng, gap: f64) -> [CirclePoint; 4] {
    loop {
        let mut t: Vec<f64> = (0..4).map(|_| rng.gen_range(-PI..PI)).collect();
        t.sort_by(f64::total_cmp);
        let ok = (0..4).all(|i| (t[(i + 1) % 4] - t[i]).rem_euclid(TAU) >= gap);
        if ok {
            return [t[0], t[1], t[2], t[3]].map(CirclePoint::new);
        }
    }
}

fn projective_compose(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (m1, m2) = (random_automorphism(rng), random_automorphism(rng));
        let c1 = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-PI..PI));
        let c2 = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-PI..PI));
        let scale = |m: &Moebius, c: Complex64| Moebius::new(m.a * c, m.b * c, m.c * c, m.d * c);
        let scaled = scale(&m1, c1).compose(&scale(&m2, c2));
        worst = worst.max(scaled.projective_distance(&m1.compose(&m2))?);
    }
    Ok(worst)
}

fn conjugation_invariance(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, poly) in random_maskit_polygons(rng, 5)? {
        for m in poly.generators() {
            let g = random_automorphism(rng);
            let conj = g.compose(m).compose(&g.inverse()?);
            worst = worst.max((conj.translation_length()? - m.translation_length()?).abs());
        }
    }
    Ok(worst)
}

fn nu_box_additivity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let [a, b, c, d] = separated_angles(rng, 1e-3);
        let m = a.advance(rng.gen_range(0.01..0.99) * a.offset_to(b));
        let whole = nu_box(a, b, c, d)?;
        let parts = nu_box(a, m, c, d)? + nu_box(m, b, c, d)?;
        worst = worst.max((whole - parts).abs() / whole.max(1.0));
    }
    Ok(worst)
}

fn geodesic_reversal(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (p, q) = (random_interior(rng, 0.95), random_interior(rng, 0.95));
        if geodesic_through(q, p)? != geodesic_through(p, q)?.reversed() {
            mismatches += 1;
        }
    }
    Ok(mismatches as f64)
}

fn nu_box_quadrature(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let [a, b, c, d] = separated_angles(rng, 0.05);
        let closed = nu_box(a, b, c, d)?;
        let (u0, w0) = (a.theta(), c.theta());
        let (lu, lw) = (a.offset_to(b), c.offset_to(d));
        let q = integrate_2d(
            |s, t| 1.0 / (2.0 - 2.0 * ((u0 + s) - (w0 + t)).cos()),
            0.0,
            lu,
            |_| 0.0,
            |_| lw,
            1e-11,
            100_000,
        )?;
        worst = worst.max((closed - q.value).abs());
    }
    Ok(worst)
}

fn sample_polygons(rng: &mut ChaCha8Rng) -> Result<Vec<CanonicalPolygon>> {
    let mut polys: Vec<CanonicalPolygon> = (2..=6).map(build_regular_polygon).collect::<Result<_>>()?;
    polys.extend(random_maskit_polygons(rng, 5)?.into_iter().map(|(_, p)| p));
    Ok(polys)
}

fn generator_sides(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for poly in sample_polygons(rng)? {
        for k in 0..poly.n() {
            let side = poly.side_geodesic(k);
            let partner = poly.side_geodesic(poly.sigma(k));
            let t = poly.generator(k);
            worst = worst.max(t.apply_circle(side.u).distance(partner.w));
            worst = worst.max(t.apply_circle(side.w).distance(partner.u));
        }
    }
    Ok(worst)
}

fn perimeter_invariance(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for poly in sample_polygons(rng)? {
        let moved = poly.transformed(&random_automorphism(rng))?;
        worst = worst.max((moved.perimeter() - poly.perimeter()).abs());
    }
    Ok(worst)
}

fn maskit_validation(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, poly) in random_maskit_polygons(rng, 100)? {
        let r = validate_canonical(&poly);
        if !r.interleaved {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(r.max_side_diff()).max(r.max_angle_residual());
    }
    Ok(worst)
}

fn regular_minimal(rng: &mut ChaCha8Rng) -> Result<f64> {
    let regular = build_regular_polygon(2)?.perimeter();
    let polys = random_maskit_polygons(rng, 100)?;
    Ok(max_of(polys.iter().map(|(_, p)| regular - p.perimeter())))
}

fn isoareal(rng: &mut ChaCha8Rng) -> Result<f64> {
    let bound = isoareal_bound(2);
    let mut perimeters = vec![build_regular_polygon(2)?.perimeter()];
    perimeters.extend(random_maskit_polygons(rng, 100)?.iter().map(|(_, p)| p.perimeter()));
    Ok(max_of(perimeters.iter().map(|p| bound - p * p)))
}

fn perimeter_routes(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut params: Vec<MaskitParams> = NamedSurface::ALL.iter().map(|s| s.params()).collect();
    params.extend((0..20).map(|_| sample_valid_params(rng)));
    let mut worst: f64 = 0.0;
    for p in params {
        let closed = perimeter_formula(&p)?;
        let sides = build_polygon(&p)?.perimeter();
        let traces = perimeter_from_traces(&p)?;
        worst = worst.max((closed - sides).abs()).max((closed - traces).abs());
    }
    Ok(worst)
}

fn identified_sides(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, poly) in random_maskit_polygons(rng, 20)? {
        for (a, b) in [(6, 8), (7, 1), (10, 4), (11, 9), (12, 2)] {
            worst = worst.max((poly.side_length(a - 1) - poly.side_length(b - 1)).abs());
        }
    }
    Ok(worst)
}

fn real_axis_symmetry(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = loop {
            let mut p = sample_valid_params(rng);
            (p.sigma, p.tau, p.rho) = (0.0, 0.0, 0.0);
            if build_polygon(&p).is_ok() {
                break p;
            }
        };
        let poly = build_polygon(&p)?;
        let verts = poly.vertices();
        for v in verts {
            let nearest = verts.iter().map(|w| (w - v.conj()).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
    }
    Ok(worst)
}

fn branch_covering(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut failures = 0;
    for spec in [ParamSpec::AllP, ParamSpec::Midpoint] {
        let poly = build_regular_polygon(2)?;
        let bm = BoundaryMap::from_spec(&poly, &spec)?;
        for _ in 0..50_000 {
            let x = CirclePoint::new(rng.gen_range(-PI..PI));
            let hits = (0..bm.n()).filter(|&k| in_half_open_arc(x, bm.a(k), bm.a(k + 1))).count();
            if hits != 1 || !in_half_open_arc(x, bm.a(bm.branch(x)), bm.a(bm.branch(x) + 1)) {
                failures += 1;
            }
        }
    }
    Ok(failures as f64)
}

fn branch_continuity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let poly = build_regular_polygon(2)?;
    let bm = BoundaryMap::from_spec(&poly, &ParamSpec::Midpoint)?;
    let h = 1e-9;
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let x = CirclePoint::new(rng.gen_range(-PI..PI));
        let y = x.advance(h);
        let ((fx, kx), (fy, ky)) = (bm.apply(x), bm.apply(y));
        if kx == ky {
            worst = worst.max(fx.distance(fy));
        }
    }
    Ok(worst)
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> ParamSpec {
    ParamSpec::Bits((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

fn extremal_markov(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut failures = 0;
    for genus in [2, 3] {
        let poly = build_regular_polygon(genus)?;
        for _ in 0..20 {
            let bm = BoundaryMap::from_spec(&poly, &random_bits(rng, poly.n()))?;
            let ok = markov_partition(&bm, Variant::A)
                .and_then(|part| transition_matrix(&bm, &part))
                .is_ok_and(|tm| tm.matrix.is_irreducible());
            failures += usize::from(!ok);
        }
    }
    Ok(failures as f64)
}

fn matrices_invariant(rng: &mut ChaCha8Rng) -> Result<f64> {
    let regular = build_regular_polygon(2)?;
    let others: Vec<CanonicalPolygon> = random_maskit_polygons(rng, 3)?.into_iter().map(|(_, p)| p).collect();
    let mut specs = vec![ParamSpec::AllP, ParamSpec::AllQ, ParamSpec::Alternating];
    specs.extend((0..3).map(|_| random_bits(rng, 12)));
    let matrix = |poly: &CanonicalPolygon, spec: &ParamSpec| -> Result<_> {
        let bm = BoundaryMap::from_spec(poly, spec)?;
        Ok(transition_matrix(&bm, &markov_partition(&bm, Variant::A)?)?.matrix)
    };
    let mut mismatches = 0;
    for spec in &specs {
        let reference = matrix(&regular, spec)?;
        for poly in &others {
            mismatches += usize::from(matrix(poly, spec)? != reference);
        }
    }
    Ok(mismatches as f64)
}

fn collapsed_matrix(_: &mut ChaCha8Rng) -> Result<f64> {
    let mut mismatches = 0;
    for genus in [2, 3] {
        let poly = build_regular_polygon(genus)?;
        let bm = BoundaryMap::from_spec(&poly, &ParamSpec::Uneven)?;
        let (raw, collapsed) = raw_three_point_matrix(&bm)?;
        let d = transition_matrix(&bm, &markov_partition(&bm, Variant::D)?)?;
        mismatches += usize::from(collapsed.len() != 4 * genus - 2 || raw.without(&collapsed) != d.matrix);
    }
    Ok(mismatches as f64)
}

fn rigidity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut record = |bm: &BoundaryMap<'_>, variant: Variant, genus: usize| -> Result<()> {
        let tm = transition_matrix(bm, &markov_partition(bm, variant)?)?;
        worst = worst.max((perron(&tm.matrix)?.lambda - rigidity_lambda(genus)).abs());
        Ok(())
    };
    let regular = build_regular_polygon(2)?;
    for (spec, variant) in [
        (ParamSpec::AllP, Variant::A),
        (ParamSpec::AllQ, Variant::A),
        (ParamSpec::Alternating, Variant::B),
        (ParamSpec::Midpoint, Variant::C),
        (ParamSpec::Uneven, Variant::D),
    ] {
        record(&BoundaryMap::from_spec(&regular, &spec)?, variant, 2)?;
    }
    for genus in [2, 3] {
        let poly = build_regular_polygon(genus)?;
        for _ in 0..10 {
            record(&BoundaryMap::from_spec(&poly, &random_bits(rng, poly.n()))?, Variant::A, genus)?;
        }
    }
    for (_, poly) in random_maskit_polygons(rng, 3)? {
        for spec in [ParamSpec::AllP, ParamSpec::AllQ, random_bits(rng, 12)] {
            record(&BoundaryMap::from_spec(&poly, &spec)?, Variant::A, 2)?;
        }
    }
    Ok(worst)
}

/// Largest eigenvalue and vector deviations over ten random positive starts.
fn perron_restarts(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let poly = build_regular_polygon(2)?;
    let bm = BoundaryMap::from_spec(&poly, &ParamSpec::Midpoint)?;
    let tm = transition_matrix(&bm, &markov_partition(&bm, Variant::C)?)?;
    let base = perron(&tm.matrix)?;
    let (mut dl, mut dv): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let start: Vec<f64> = (0..tm.matrix.size()).map(|_| rng.gen_range(0.01..1.0)).collect();
        let other = perron_from(&tm.matrix, &start)?;
        dl = dl.max((other.lambda - base.lambda).abs());
        dv = dv.max(max_of(other.vector.iter().zip(&base.vector).map(|(a, b)| (a - b).abs())));
    }
    Ok((dl, dv))
}

fn perron_restart_lambda(rng: &mut ChaCha8Rng) -> Result<f64> {
    Ok(perron_restarts(rng)?.0)
}

fn perron_restart_vector(rng: &mut ChaCha8Rng) -> Result<f64> {
    Ok(perron_restarts(rng)?.1)
}

fn regular_psi(spec: ParamSpec) -> Result<(CanonicalPolygon, Conjugacy)> {
    let poly = build_regular_polygon(2)?;
    let psi = Conjugacy::for_spec(&poly, &spec, Variant::Auto)?;
    Ok((poly, psi))
}

fn parry_additivity(_: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for spec in [ParamSpec::AllP, ParamSpec::Midpoint, ParamSpec::Uneven] {
        let poly = build_regular_polygon(2)?;
        let bm = BoundaryMap::from_spec(&poly, &spec)?;
        let tm = transition_matrix(&bm, &markov_partition(&bm, Variant::Auto)?)?;
        worst = worst.max(parry_weights(&tm)?.additivity_residual(&tm));
    }
    Ok(worst)
}

fn psi_monotone(_: &mut ChaCha8Rng) -> Result<f64> {
    let (_, psi) = regular_psi(ParamSpec::AllP)?;
    let values: Vec<f64> = circle_grid(10_000).into_iter().map(|x| psi.eval(x, 13)).collect::<Result<_>>()?;
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Ok(f64::INFINITY);
    }
    let variation: f64 = values.windows(2).map(|w| w[1] - w[0]).sum::<f64>() + (values[0] - values[values.len() - 1]).rem_euclid(TAU);
    Ok((variation - TAU).abs())
}

fn psi_inverse(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (_, psi) = regular_psi(ParamSpec::AllP)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let y = rng.gen_range(-PI..PI);
        worst = worst.max((psi.eval(psi.inverse(y, 13)?, 13)? - y).abs());
    }
    Ok(worst)
}

fn psi_slope(_: &mut ChaCha8Rng) -> Result<f64> {
    let (poly, psi) = regular_psi(ParamSpec::AllP)?;
    let bm = BoundaryMap::from_spec(&poly, &ParamSpec::AllP)?;
    Ok(slope_profile(&bm, &psi, 10_000, 13)?.max_deviation)
}

fn psi_rotation(_: &mut ChaCha8Rng) -> Result<f64> {
    let (poly, psi) = regular_psi(ParamSpec::AllP)?;
    rotation_defect(&psi, 2.0 * TAU / poly.n() as f64, 2000, 13)
}

fn psi_p_vs_q(_: &mut ChaCha8Rng) -> Result<f64> {
    let (_, p) = regular_psi(ParamSpec::AllP)?;
    let (_, q) = regular_psi(ParamSpec::AllQ)?;
    compare_conjugacies(&p, &q, 10_000, 13)
}

fn psi_truncation(_: &mut ChaCha8Rng) -> Result<f64> {
    let (_, psi) = regular_psi(ParamSpec::AllP)?;
    let mut worst: f64 = 0.0;
    for x in circle_grid(2000) {
        worst = worst.max((psi.eval(x, 13)? - psi.eval(x, 15)?).abs());
    }
    Ok(worst)
}

fn beam_length(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (a, b) = (random_interior(rng, 0.9), random_interior(rng, 0.9));
        worst = worst.max((beam_measure(a, b)? - hyperbolic_distance(a, b)?).abs());
    }
    Ok(worst)
}

fn beam_additivity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (a, b) = (random_interior(rng, 0.9), random_interior(rng, 0.9));
        // a point at fraction s of the way from a to b along the geodesic
        let to0 = Moebius::to_origin(a);
        let image = to0.apply(b)?;
        let s = rng.gen_range(0.1..0.9) * hyperbolic_distance(a, b)?;
        let m = to0.inverse()?.apply(image / image.norm() * (0.5 * s).tanh())?;
        let whole = beam_measure(a, b)?;
        worst = worst.max((whole - beam_measure(a, m)? - beam_measure(m, b)?).abs());
    }
    Ok(worst)
}

fn omega_perimeter(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut polys = vec![build_regular_polygon(2)?];
    for s in NamedSurface::ALL {
        polys.push(build_polygon(&s.params())?);
    }
    polys.extend(random_maskit_polygons(rng, 5)?.into_iter().map(|(_, p)| p));
    let mut worst: f64 = 0.0;
    for poly in polys {
        worst = worst.max((omega_geo_measure(&poly)? - poly.perimeter()).abs());
    }
    Ok(worst)
}

fn omega_invariance(rng: &mut ChaCha8Rng) -> Result<f64> {
    let poly = build_polygon(&NamedSurface::Base.params())?;
    let base = omega_geo_measure(&poly)?;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let moved = poly.transformed(&random_automorphism(rng))?;
        worst = worst.max((omega_geo_measure(&moved)? - base).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(parse_suites("all").unwrap().len(), 4);
        assert!(parse_suites("nope").is_err());
    }

    #[test]
    fn geometry_suite_passes() {
        for r in run_suite(Suite::Geometry, 0) {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn markov_suite_passes() {
        for r in run_suite(Suite::Markov, 0) {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn parry_suite_passes() {
        for r in run_suite(Suite::Parry, 0) {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn current_suite_passes() {
        for r in run_suite(Suite::Current, 0) {
            assert!(r.passed, "{r:?}");
        }
    }
}

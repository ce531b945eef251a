//! Acceptance suite: one pass/fail line per criterion, with measured values
//! and wall time. Exits non-zero if any blocking criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypentropy::boundary::{markov_partition, transition_matrix, BoundaryMap, ParamSpec, Variant};
use hypentropy::current::{attractor_cloud, beam_measure, omega_geo_measure};
use hypentropy::disk::hyperbolic_distance;
use hypentropy::maskit::{build_polygon, entropy, perimeter_formula, perimeter_from_traces, sample_valid_params, NamedSurface};
use hypentropy::parry::{compare_conjugacies, extended_linearity, slope_profile, Conjugacy};
use hypentropy::polygon::{build_regular_polygon, isoareal_bound, validate_canonical};
use hypentropy::spectral::{entropy_table, perron, rigidity_lambda};
use hypentropy::Result;

const GOLDEN_P: &str = include_str!("golden/m_p.csv");
const GOLDEN_Q: &str = include_str!("golden/m_q.csv");

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

fn criterion_1() -> Result<Verdict> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut mismatched = Vec::new();
    for (param, golden) in [("P", GOLDEN_P), ("Q", GOLDEN_Q)] {
        let out = dir.path().join(param);
        let status = Command::new(env!("CARGO_BIN_EXE_hypentropy"))
            .args(["matrix", "--genus", "2", "--param", param, "--variant", "a", "--out"])
            .arg(&out)
            .output()
            .expect("run the binary");
        let csv = fs::read_to_string(out.join("matrix.csv")).unwrap_or_default();
        if !status.status.success() || csv != golden {
            mismatched.push(param);
        }
    }
    verdict(mismatched.is_empty(), format!("mismatched matrices: {mismatched:?}"))
}

fn lambda_of(bm: &BoundaryMap<'_>, variant: Variant) -> Result<(usize, f64)> {
    let tm = transition_matrix(bm, &markov_partition(bm, variant)?)?;
    Ok((tm.matrix.size(), perron(&tm.matrix)?.lambda))
}

fn criterion_2() -> Result<Verdict> {
    let poly = build_regular_polygon(2)?;
    let target = 5.0 + 2.0 * 6f64.sqrt();
    let mut worst: f64 = 0.0;
    let mut sizes = Vec::new();
    for (spec, variant) in [
        (ParamSpec::AllP, Variant::A),
        (ParamSpec::Alternating, Variant::B),
        (ParamSpec::Midpoint, Variant::C),
        (ParamSpec::Uneven, Variant::D),
    ] {
        let (size, lambda) = lambda_of(&BoundaryMap::from_spec(&poly, &spec)?, variant)?;
        sizes.push(size);
        worst = worst.max((lambda - target).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for genus in [2, 3] {
        let poly = build_regular_polygon(genus)?;
        for _ in 0..10 {
            let bits = ParamSpec::Bits((0..poly.n()).map(|_| rng.gen_bool(0.5)).collect());
            let (_, lambda) = lambda_of(&BoundaryMap::from_spec(&poly, &bits)?, Variant::A)?;
            worst = worst.max((lambda - rigidity_lambda(genus)).abs());
        }
    }
    verdict(
        sizes == [24, 12, 36, 30] && worst <= 1e-9,
        format!("sizes {sizes:?}, max |lambda - expected| = {worst:e}"),
    )
}

fn criterion_3() -> Result<Verdict> {
    let printed = [(19.955, 1.978), (21.071, 1.874), (28.137, 1.403)];
    let (mut printed_gap, mut route_gap): (f64, f64) = (0.0, 0.0);
    for (surface, (perimeter, h)) in NamedSurface::ALL.into_iter().zip(printed) {
        let p = surface.params();
        let closed = perimeter_formula(&p)?;
        let sides = build_polygon(&p)?.perimeter();
        let traces = perimeter_from_traces(&p)?;
        printed_gap = printed_gap.max((closed - perimeter).abs()).max((entropy(&p)? - h).abs());
        route_gap = route_gap.max((closed - sides).abs()).max((closed - traces).abs()).max((sides - traces).abs());
    }
    verdict(
        printed_gap <= 1e-3 && route_gap <= 1e-8,
        format!("max gap to printed values {printed_gap:e}, max gap between routes {route_gap:e}"),
    )
}

fn criterion_4() -> Result<Verdict> {
    let (mut side_gap, mut angle_gap): (f64, f64) = (0.0, 0.0);
    for genus in 2..=10 {
        let poly = build_regular_polygon(genus)?;
        let expected = (1.0 + 2.0 * (PI / (4.0 * genus as f64 - 2.0)).cos()).acosh();
        for k in 0..poly.n() {
            side_gap = side_gap.max((poly.side_length(k) - expected).abs());
            angle_gap = angle_gap.max((poly.interior_angle(k) - PI / 2.0).abs());
        }
    }
    verdict(
        side_gap <= 1e-10 && angle_gap <= 1e-9,
        format!("max side length error {side_gap:e}, max angle error {angle_gap:e}"),
    )
}

fn criterion_5() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let floor = 19.9547 - 1e-9;
    let bound = isoareal_bound(2);
    let (mut rejected, mut below_floor, mut isoareal_fail) = (0, 0, 0);
    let mut min_perimeter = f64::INFINITY;
    for _ in 0..100 {
        let poly = build_polygon(&sample_valid_params(&mut rng))?;
        let r = validate_canonical(&poly);
        if !(r.interleaved && r.max_side_diff() <= 1e-8 && r.max_angle_residual() <= 1e-8) {
            rejected += 1;
        }
        let p = poly.perimeter();
        min_perimeter = min_perimeter.min(p);
        below_floor += usize::from(p < floor);
        isoareal_fail += usize::from(p * p < bound);
    }
    verdict(
        rejected + below_floor + isoareal_fail == 0,
        format!("{rejected} rejected, {below_floor} below the regular perimeter, {isoareal_fail} isoareal failures, min perimeter {min_perimeter:.6}"),
    )
}

fn criterion_6() -> Result<Verdict> {
    let poly = build_regular_polygon(2)?;
    let p = Conjugacy::for_spec(&poly, &ParamSpec::AllP, Variant::A)?;
    let q = Conjugacy::for_spec(&poly, &ParamSpec::AllQ, Variant::A)?;
    let sup = compare_conjugacies(&p, &q, 10_000, 13)?;
    verdict(sup < 1e-8, format!("sup |psi_P - psi_Q| = {sup:e}"))
}

fn criterion_7() -> Result<Verdict> {
    let poly = build_regular_polygon(2)?;
    let psi = Conjugacy::for_spec(&poly, &ParamSpec::AllP, Variant::A)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut specs = vec![ParamSpec::Midpoint, ParamSpec::Uneven];
    for _ in 0..5 {
        let angles = (0..poly.n())
            .map(|k| poly.p(k).advance(rng.gen_range(0.0..1.0) * poly.p(k).offset_to(poly.q(k))).theta())
            .collect();
        specs.push(ParamSpec::Angles(angles));
    }
    let mut slope: f64 = 0.0;
    for spec in &specs {
        let bm = BoundaryMap::from_spec(&poly, spec)?;
        slope = slope.max(slope_profile(&bm, &psi, 10_000, 13)?.max_deviation);
    }
    let linear = extended_linearity(&psi, &poly, 1000, 13)?.into_iter().fold(0.0, f64::max);
    verdict(
        slope < 1e-5 && linear < 1e-6,
        format!("max slope deviation {slope:e}, max extended linearity deviation {linear:e}"),
    )
}

fn criterion_8() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut beam: f64 = 0.0;
    for _ in 0..50 {
        let mut point = || Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(-PI..PI));
        let (a, b) = (point(), point());
        beam = beam.max((beam_measure(a, b)? - hyperbolic_distance(a, b)?).abs());
    }
    let mut polys = vec![build_regular_polygon(2)?];
    for s in NamedSurface::ALL {
        polys.push(build_polygon(&s.params())?);
    }
    for _ in 0..5 {
        polys.push(build_polygon(&sample_valid_params(&mut rng))?);
    }
    let mut omega: f64 = 0.0;
    for poly in &polys {
        omega = omega.max((omega_geo_measure(poly)? - poly.perimeter()).abs());
    }
    verdict(
        beam <= 1e-8 && omega <= 1e-6,
        format!("max beam error {beam:e}, max Omega_geo error {omega:e}"),
    )
}

fn criterion_9() -> Result<Verdict> {
    let rows = entropy_table(2, 50)?;
    let below = rows.iter().all(|r| r.h_max < r.h_top);
    let increasing = rows.windows(2).all(|w| w[1].h_top > w[0].h_top && w[1].h_max > w[0].h_max);
    let gaps: Vec<f64> = rows.iter().map(|r| r.h_top - r.h_max).collect();
    let persistent = gaps.windows(2).all(|w| w[1] >= w[0]);
    verdict(
        below && increasing && persistent,
        format!("H < h_top: {below}, both increasing: {increasing}, gap {:.4} at g=2 to {:.4} at g=50", gaps[0], gaps[gaps.len() - 1]),
    )
}

fn criterion_10() -> Result<Verdict> {
    let poly = build_regular_polygon(2)?;
    let bm = BoundaryMap::from_spec(&poly, &ParamSpec::AllP)?;
    let cloud = attractor_cloud(&bm, 2000, 60, 500, 0)?;
    let r = &cloud.report;
    verdict(
        r.relative_gap <= 0.05,
        format!(
            "nu-mass {:.6} vs perimeter {:.6}, relative gap {:.4}, self-consistency {:.4}",
            r.nu_mass, r.perimeter, r.relative_gap, r.self_consistency
        ),
    )
}

fn monotone_sweep() -> Result<Verdict> {
    let base = NamedSurface::Base.params();
    let mut perimeters = Vec::new();
    let mut entropies = Vec::new();
    for i in 0..20 {
        let mut p = base;
        p.alpha *= 1.0 + 0.05 * i as f64;
        perimeters.push(build_polygon(&p)?.perimeter());
        entropies.push(entropy(&p)?);
    }
    let up = perimeters.windows(2).all(|w| w[1] > w[0]);
    let down = entropies.windows(2).all(|w| w[1] < w[0]);
    verdict(
        up && down,
        format!(
            "perimeter {:.4} to {:.4}, h_mu {:.4} to {:.4}",
            perimeters[0], perimeters[19], entropies[0], entropies[19]
        ),
    )
}

type Criterion = (&'static str, &'static str, bool, Duration, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 11] = [
        ("1", "transition matrix golden", true, secs(1), criterion_1),
        ("2", "rigidity eigenvalue", true, secs(5), criterion_2),
        ("3", "named surface numerics", true, secs(1), criterion_3),
        ("4", "regular polygon construction", true, secs(1), criterion_4),
        ("5", "canonical polygon properties", true, secs(30), criterion_5),
        ("6", "conjugacy agreement", true, secs(60), criterion_6),
        ("7", "rigidity mechanism", true, secs(60), criterion_7),
        ("8", "beam and Omega_geo identities", true, secs(120), criterion_8),
        ("9", "entropy comparison", true, secs(60), criterion_9),
        ("10", "attractor mass (exploratory)", false, secs(120), criterion_10),
        ("sweep", "monotone length sweep", true, secs(5), monotone_sweep),
    ];
    let mut failed = 0;
    for (id, title, blocking, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok(v) => (v.passed && elapsed <= budget, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if passed { "PASS" } else if blocking { "FAIL" } else { "WARN" };
        println!(
            "criterion {id:>5} {tag} {title}: {detail} [{:.3} s of {} s]",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !passed && blocking {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} blocking criteria failed");
        ExitCode::FAILURE
    }
}

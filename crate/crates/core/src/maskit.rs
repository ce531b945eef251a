//! Genus-2 Teichmüller coordinates: the six Maskit lengths and twists,
//! their derived quantities, generator matrices, side transforms, and the
//! resulting fundamental 12-gon.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::disk::{geodesic_intersection, CirclePoint, Geodesic, Moebius};
use crate::error::{Error, Result};
use crate::polygon::{is_interleaved, CanonicalPolygon};

const ACOSH_GUARD: f64 = 1e-14;
const GENERATOR_TRACE_TOL: f64 = 1e-9;
const CIRCLE_TOL: f64 = 1e-10;

/// Maskit's lengths `alpha, beta, gamma` and twists `sigma, tau, rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskitParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub tau: f64,
    pub rho: f64,
}

impl MaskitParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, sigma: f64, tau: f64, rho: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            sigma,
            tau,
            rho,
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            &[a, b, g, s, t, r] => Ok(Self::new(a, b, g, s, t, r)),
            _ => Err(Error::InvalidArgument(format!("expected 6 Maskit parameters, got {}", v.len()))),
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.alpha, self.beta, self.gamma, self.sigma, self.tau, self.rho]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub mu: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub phi: f64,
}

/// Which condition of the validity region failed, with the offending value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionViolation {
    MuDomain(f64),
    DeltaDomain(f64),
    DeltaNonPositive(f64),
    EpsilonDomain(f64),
    PhiDomain(f64),
}

impl fmt::Display for RegionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MuDomain(x) => write!(f, "arccosh argument for mu is {x} < 1"),
            Self::DeltaDomain(x) => write!(f, "arccoth argument for delta is {x}, |x| <= 1"),
            Self::DeltaNonPositive(d) => write!(f, "delta = {d} is not positive"),
            Self::EpsilonDomain(x) => write!(f, "arccosh argument for epsilon is {x}, epsilon not positive"),
            Self::PhiDomain(x) => write!(f, "arccosh argument for phi is {x} < 1"),
        }
    }
}

/// `arccosh` with arguments in `[1, 1 + 1e-14]` mapped to zero; `None` below 1.
fn guarded_acosh(x: f64) -> Option<f64> {
    if x.is_nan() || x < 1.0 {
        None
    } else if x <= 1.0 + ACOSH_GUARD {
        Some(0.0)
    } else {
        Some((x + (x * x - 1.0).sqrt()).ln())
    }
}

fn acoth(x: f64) -> Option<f64> {
    (x.abs() > 1.0).then(|| 0.5 * ((x + 1.0) / (x - 1.0)).ln())
}

fn coth(x: f64) -> f64 {
    x.cosh() / x.sinh()
}

fn check_lengths(p: &MaskitParams) -> Result<()> {
    for (name, value) in [("alpha", p.alpha), ("beta", p.beta), ("gamma", p.gamma)] {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveLength { name, value });
        }
    }
    Ok(())
}

/// Evaluates `mu, delta, epsilon, phi`, diagnosing the first failed validity
/// condition as [`Error::InvalidRegion`].
pub fn derived_quantities(p: &MaskitParams) -> Result<DerivedQuantities> {
    check_lengths(p)?;
    let MaskitParams {
        alpha: a,
        beta: b,
        gamma: g,
        sigma: s,
        tau: t,
        rho: r,
    } = *p;
    let invalid = |v| Err(Error::InvalidRegion(v));

    let mu_arg = coth(b) * s.cosh() * t.cosh() + s.sinh() * t.sinh();
    let Some(mu) = guarded_acosh(mu_arg) else {
        return invalid(RegionViolation::MuDomain(mu_arg));
    };
    let delta_arg = (g.cosh() * mu.cosh() - coth(a) * g.sinh() * mu.sinh() - r.sinh() * s.sinh()) / (r.cosh() * s.cosh());
    let Some(delta) = acoth(delta_arg) else {
        return invalid(RegionViolation::DeltaDomain(delta_arg));
    };
    if delta <= 0.0 {
        return invalid(RegionViolation::DeltaNonPositive(delta));
    }
    let eps_arg = coth(mu) * a.sinh() * g.sinh() - a.cosh() * g.cosh();
    let epsilon = match guarded_acosh(eps_arg) {
        Some(e) if e > 0.0 => e,
        _ => return invalid(RegionViolation::EpsilonDomain(eps_arg)),
    };
    let phi_arg = b.sinh() * delta.sinh() * (r.sinh() * t.sinh() + g.cosh()) / (r.cosh() * t.cosh()) - b.cosh() * delta.cosh();
    let Some(phi) = guarded_acosh(phi_arg) else {
        return invalid(RegionViolation::PhiDomain(phi_arg));
    };
    Ok(DerivedQuantities {
        mu,
        delta,
        epsilon,
        phi,
    })
}

/// `true` when the parameters lie in the valid region.
pub fn is_valid(p: &MaskitParams) -> bool {
    derived_quantities(p).is_ok()
}

/// The generators `A, B, C, D` and the products `E = A⁻¹C⁻¹`, `F = D⁻¹B⁻¹`.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorMatrices {
    pub a: Moebius,
    pub b: Moebius,
    pub c: Moebius,
    pub d: Moebius,
    pub e: Moebius,
    pub f: Moebius,
}

impl GeneratorMatrices {
    pub fn as_array(&self) -> [Moebius; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }
}

/// `X · diag(e^l, e^{-l}) · X⁻¹` with `X = [[i,1],[1,i]] · frame`.
fn conjugated_diagonal(frame: Moebius, l: f64) -> Result<Moebius> {
    let x = Moebius::cayley_frame().compose(&frame);
    let diag = Moebius::diagonal(Complex64::new(l.exp(), 0.0), Complex64::new((-l).exp(), 0.0));
    Ok(x.compose(&diag).compose(&x.inverse()?))
}

pub fn generator_matrices(p: &MaskitParams) -> Result<GeneratorMatrices> {
    let dq = derived_quantities(p)?;
    let e = f64::exp;
    let a = conjugated_diagonal(Moebius::from_real(1.0, 1.0, e(dq.mu), e(-dq.mu)), p.alpha)?;
    let b = conjugated_diagonal(
        Moebius::from_real(e(p.sigma), e(p.sigma), e(-p.tau), -e(p.tau)),
        p.beta,
    )?;
    let c = conjugated_diagonal(Moebius::identity(), p.gamma)?;
    let d = conjugated_diagonal(
        Moebius::from_real(e(p.sigma + p.gamma), e(p.sigma + p.gamma), -e(p.rho), e(-p.rho)),
        dq.delta,
    )?;
    let em = a.inverse()?.compose(&c.inverse()?);
    let fm = d.inverse()?.compose(&b.inverse()?);

    for (name, m, expected) in [("E", em, dq.epsilon), ("F", fm, dq.phi)] {
        let tr = m.normalized_trace_abs()?;
        let want = 2.0 * expected.cosh();
        if (tr - want).abs() > GENERATOR_TRACE_TOL * want.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "trace of {name} is {tr}, expected {want}"
            )));
        }
    }
    let out = GeneratorMatrices {
        a,
        b,
        c,
        d,
        e: em,
        f: fm,
    };
    if let Some(bad) = out.as_array().iter().find(|m| !m.preserves_circle(CIRCLE_TOL)) {
        return Err(Error::InvalidArgument(format!(
            "generator does not preserve the circle (residual {:e})",
            bad.circle_residual()
        )));
    }
    Ok(out)
}

/// The twelve side transforms; `s[k]` has the geodesic of side `k+1` as its axis.
pub fn side_transforms(p: &MaskitParams) -> Result<[Moebius; 12]> {
    let GeneratorMatrices { a, b, c, d, e, f } = generator_matrices(p)?;
    let inv = |m: &Moebius| m.inverse();
    let s1 = inv(&c)?.compose(&inv(&d)?).compose(&c);
    let s10 = inv(&b)?.compose(&a).compose(&b);
    let s = [
        s1,
        a.compose(&c),
        a.compose(&inv(&f)?).compose(&inv(&a)?),
        inv(&a)?,
        f,
        inv(&e)?,
        d,
        d.compose(&e).compose(&inv(&d)?),
        inv(&b)?.compose(&inv(&d)?),
        s10,
        inv(&s1)?.compose(&b),
        inv(&c)?.compose(&inv(&s10)?),
    ];
    for m in &s {
        if !m.is_hyperbolic() {
            return Err(Error::NotHyperbolic(m.normalized_trace_abs()?));
        }
    }
    Ok(s)
}

/// Builds the fundamental 12-gon: side `k` lies on the axis of `s_k`, from
/// its repelling to its attracting fixed point; vertices are intersections of
/// consecutive side geodesics.
pub fn build_polygon(p: &MaskitParams) -> Result<CanonicalPolygon> {
    let s = side_transforms(p)?;
    let n = s.len();
    let mut pts = vec![CirclePoint::new(0.0); n];
    let mut qts = vec![CirclePoint::new(0.0); n];
    for (k, m) in s.iter().enumerate() {
        let (attracting, repelling) = m.fixed_points()?;
        pts[k] = repelling;
        qts[(k + 1) % n] = attracting;
    }
    if !is_interleaved(&pts, &qts) {
        return Err(Error::OrientationMismatch);
    }
    let sides: Vec<Geodesic> = (0..n)
        .map(|k| Geodesic {
            u: pts[k],
            w: qts[(k + 1) % n],
        })
        .collect();
    let vertices = (0..n)
        .map(|k| {
            let prev = (k + n - 1) % n;
            geodesic_intersection(&sides[prev], &sides[k])
                .map(|(z, _)| z)
                .map_err(|_| Error::NonAdjacentSides(prev + 1, k + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    CanonicalPolygon::from_parts(2, vertices, pts, qts)
}

/// `4(alpha + delta + epsilon + phi)`.
pub fn perimeter_formula(p: &MaskitParams) -> Result<f64> {
    let dq = derived_quantities(p)?;
    Ok(4.0 * (p.alpha + dq.delta + dq.epsilon + dq.phi))
}

/// Perimeter from translation lengths: sides 1, 4, 7, 10 are closed
/// geodesics, and the axes of `s_2, s_3, s_5, s_6` each carry two sides.
pub fn perimeter_from_traces(p: &MaskitParams) -> Result<f64> {
    let s = side_transforms(p)?;
    [0, 3, 6, 9, 1, 2, 4, 5]
        .iter()
        .map(|&k| s[k].translation_length())
        .sum()
}

/// Measure-theoretic entropy `π² / (alpha + delta + epsilon + phi)`.
pub fn entropy(p: &MaskitParams) -> Result<f64> {
    let dq = derived_quantities(p)?;
    Ok(std::f64::consts::PI.powi(2) / (p.alpha + dq.delta + dq.epsilon + dq.phi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedSurface {
    Regular,
    Base,
    Bolza,
}

impl NamedSurface {
    pub const ALL: [NamedSurface; 3] = [Self::Regular, Self::Base, Self::Bolza];

    pub fn params(self) -> MaskitParams {
        match self {
            Self::Regular => {
                let a = 0.5 * (1.0 + 3f64.sqrt()).acosh();
                MaskitParams::new(a, 2.0 * a, 2.0 * a, 0.0, 0.0, 0.0)
            }
            Self::Base => {
                let a = 2f64.acosh();
                MaskitParams::new(a, a, a, 0.0, 0.0, 0.0)
            }
            Self::Bolza => {
                let a = 0.5 * bolza_systole();
                MaskitParams::new(a, a, a, 0.0, 0.0, 1f64.asinh())
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Regular => "regular",
            Self::Base => "base",
            Self::Bolza => "bolza",
        }
    }
}

impl fmt::Display for NamedSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedSurface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "regular" => Ok(Self::Regular),
            "base" => Ok(Self::Base),
            "bolza" => Ok(Self::Bolza),
            _ => Err(Error::UnknownSurface(s.to_string())),
        }
    }
}

/// Systole of the Bolza surface, `2 arccosh(1 + √2)`.
pub fn bolza_systole() -> f64 {
    2.0 * (1.0 + 2f64.sqrt()).acosh()
}

/// Length of the second Bolza geodesic class, `2 arccosh(3 + 2√2)`.
pub fn bolza_second_length() -> f64 {
    2.0 * (3.0 + 2.0 * 2f64.sqrt()).acosh()
}

/// Draws lengths from `[0.8, 2.5]` and twists from `[-0.7, 0.7]` until the
/// tuple is valid and its polygon builds.
pub fn sample_valid_params<R: Rng + ?Sized>(rng: &mut R) -> MaskitParams {
    loop {
        let p = MaskitParams::new(
            rng.gen_range(0.8..2.5),
            rng.gen_range(0.8..2.5),
            rng.gen_range(0.8..2.5),
            rng.gen_range(-0.7..0.7),
            rng.gen_range(-0.7..0.7),
            rng.gen_range(-0.7..0.7),
        );
        if build_polygon(&p).is_ok() {
            return p;
        }
    }
}

/// Serialized summary of one parameter tuple.
#[derive(Clone, Debug, Serialize)]
pub struct MaskitReport {
    pub params: MaskitParams,
    pub derived: Option<DerivedQuantities>,
    pub valid: bool,
    pub violation: Option<String>,
    pub perimeter: Option<f64>,
    pub entropy: Option<f64>,
}

pub fn report(p: &MaskitParams) -> MaskitReport {
    match derived_quantities(p) {
        Ok(dq) => {
            let sum = p.alpha + dq.delta + dq.epsilon + dq.phi;
            MaskitReport {
                params: *p,
                derived: Some(dq),
                valid: true,
                violation: None,
                perimeter: Some(4.0 * sum),
                entropy: Some(std::f64::consts::PI.powi(2) / sum),
            }
        }
        Err(e) => MaskitReport {
            params: *p,
            derived: None,
            valid: false,
            violation: Some(e.to_string()),
            perimeter: None,
            entropy: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{build_regular_polygon, validate_canonical};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn named_surface_parsing() {
        assert_eq!("base".parse::<NamedSurface>().unwrap(), NamedSurface::Base);
        assert!(matches!("klein".parse::<NamedSurface>(), Err(Error::UnknownSurface(_))));
        assert!((NamedSurface::Base.params().alpha - 1.31696).abs() < 1e-5);
        assert!((NamedSurface::Bolza.params().rho - 0.88137).abs() < 1e-5);
    }

    #[test]
    fn base_surface_closed_form() {
        let p = NamedSurface::Base.params();
        let per = perimeter_formula(&p).unwrap();
        assert!((per - 16.0 * 2f64.acosh()).abs() < 1e-9);
        assert!((entropy(&p).unwrap() - 1.874).abs() < 1e-3);
    }

    #[test]
    fn bolza_derived_values() {
        let dq = derived_quantities(&NamedSurface::Bolza.params()).unwrap();
        let l1 = bolza_systole();
        let l2 = bolza_second_length();
        assert!((dq.delta - 0.5 * l1).abs() < 1e-9);
        assert!((dq.epsilon - 0.5 * l2).abs() < 1e-9);
        assert!((dq.phi - 0.5 * l1).abs() < 1e-9);
        assert!((dq.delta - 1.52857).abs() < 1e-5);
        assert!((dq.epsilon - 2.44845).abs() < 1e-5);
    }

    #[test]
    fn non_positive_lengths_rejected() {
        let p = MaskitParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        assert!(matches!(derived_quantities(&p), Err(Error::NonPositiveLength { name: "alpha", .. })));
    }

    #[test]
    fn small_lengths_probe() {
        // the region boundary: tiny lengths fail one of the derived conditions
        let p = MaskitParams::new(0.1, 0.1, 0.1, 0.0, 0.0, 0.0);
        assert!(matches!(derived_quantities(&p), Err(Error::InvalidRegion(_))));
    }

    #[test]
    fn generator_traces() {
        let p = NamedSurface::Bolza.params();
        let g = generator_matrices(&p).unwrap();
        assert!((g.a.normalized_trace_abs().unwrap() - 2.0 * p.alpha.cosh()).abs() < 1e-9);
        assert!((g.e.translation_length().unwrap() - bolza_second_length()).abs() < 1e-9);
        let base = generator_matrices(&NamedSurface::Base.params()).unwrap();
        assert!((base.c.normalized_trace_abs().unwrap() / 2.0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn side_transform_lengths() {
        let p = NamedSurface::Bolza.params();
        let dq = derived_quantities(&p).unwrap();
        let s = side_transforms(&p).unwrap();
        assert!((s[0].translation_length().unwrap() - 2.0 * dq.delta).abs() < 1e-9);
        assert!((s[1].translation_length().unwrap() - 2.0 * dq.epsilon).abs() < 1e-9);
        assert!((s[3].translation_length().unwrap() - 2.0 * p.alpha).abs() < 1e-9);
        assert!((s[3].translation_length().unwrap() - 3.0571).abs() < 1e-4);
    }

    #[test]
    fn regular_surface_matches_regular_polygon() {
        let poly = build_polygon(&NamedSurface::Regular.params()).unwrap();
        let side = (1.0 + 3f64.sqrt()).acosh();
        for k in 0..12 {
            assert!((poly.side_length(k) - side).abs() < 1e-8);
        }
        let reg = build_regular_polygon(2).unwrap();
        assert!((poly.perimeter() - reg.perimeter()).abs() < 1e-8);
    }

    #[test]
    fn bolza_side_pattern() {
        let poly = build_polygon(&NamedSurface::Bolza.params()).unwrap();
        let (l1, l2) = (bolza_systole(), bolza_second_length());
        let pattern = [l1, l2 / 2.0, l1 / 2.0, l1, l1 / 2.0, l2 / 2.0, l1, l2 / 2.0, l1 / 2.0, l1, l1 / 2.0, l2 / 2.0];
        for (k, want) in pattern.iter().enumerate() {
            assert!((poly.side_length(k) - want).abs() < 1e-8, "side {}", k + 1);
        }
        assert!(validate_canonical(&poly).accepted);
    }

    #[test]
    fn perimeter_routes_agree() {
        for s in NamedSurface::ALL {
            let p = s.params();
            let closed = perimeter_formula(&p).unwrap();
            let geometric = build_polygon(&p).unwrap().perimeter();
            let traces = perimeter_from_traces(&p).unwrap();
            assert!((closed - geometric).abs() < 1e-8, "{s}");
            assert!((closed - traces).abs() < 1e-9, "{s}");
        }
    }

    #[test]
    fn paired_side_accounting() {
        let poly = build_polygon(&NamedSurface::Base.params()).unwrap();
        for (a, b) in [(6, 8), (7, 1), (10, 4), (11, 9), (12, 2)] {
            assert!((poly.side_length(a - 1) - poly.side_length(b - 1)).abs() < 1e-8);
        }
    }

    #[test]
    fn untwisted_real_axis_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 5 {
            let mut p = sample_valid_params(&mut rng);
            p.sigma = 0.0;
            p.tau = 0.0;
            p.rho = 0.0;
            let Ok(poly) = build_polygon(&p) else { continue };
            for v in poly.vertices() {
                let nearest = poly.vertices().iter().map(|w| (w - v.conj()).norm()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-8);
            }
            checked += 1;
        }
    }

    #[test]
    fn random_params_give_canonical_polygons() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = sample_valid_params(&mut rng);
            let poly = build_polygon(&p).unwrap();
            let r = validate_canonical(&poly);
            assert!(r.accepted, "{p:?}: {r:?}");
            assert!((poly.perimeter() - perimeter_formula(&p).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn report_serializes() {
        let r = report(&NamedSurface::Bolza.params());
        assert!(r.valid);
        assert!((r.perimeter.unwrap() - 28.137).abs() < 1e-3);
        let bad = report(&MaskitParams::new(0.1, 0.1, 0.1, 0.0, 0.0, 0.0));
        assert!(!bad.valid && bad.violation.is_some());
    }
}

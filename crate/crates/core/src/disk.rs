//! Hyperbolic geometry in the Poincaré disk.
//!
//! Points of the closed disk are plain [`Complex64`] values; points on the
//! boundary circle are [`CirclePoint`]s carrying an angle in `(-π, π]`. All
//! arc logic on the circle goes through [`ccw_offset`], which measures the
//! counterclockwise angular distance from one point to another.
//!
//! The metric is `2|dz| / (1 - |z|²)` (curvature −1). The geodesic current
//! `ν = du dw / (2 - 2cos(u - w))` on pairs of boundary points is exposed
//! through [`nu_box`].

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const POLE_TOL: f64 = 1e-15;
const SINGULAR_TOL: f64 = 1e-15;
const HYPERBOLIC_MARGIN: f64 = 1e-12;
const DEGENERATE_ARC: f64 = 1e-14;

/// Normalizes an angle to `(-π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Counterclockwise angular distance from `from` to `to`, in `[0, 2π)`.
pub fn ccw_offset(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if d >= TAU {
        0.0
    } else {
        d
    }
}

/// Shortest angular distance between two angles, in `[0, π]`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = ccw_offset(a, b);
    d.min(TAU - d)
}

/// A point on the boundary circle, stored as its argument in `(-π, π]`.
#[derive(Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint {
    theta: f64,
}

impl CirclePoint {
    pub fn new(theta: f64) -> Self {
        Self {
            theta: normalize_angle(theta),
        }
    }

    /// The boundary point with the same argument as `z` (`z` must be nonzero).
    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.arg())
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    /// Counterclockwise offset from `self` to `other`, in `[0, 2π)`.
    pub fn offset_to(self, other: CirclePoint) -> f64 {
        ccw_offset(self.theta, other.theta)
    }

    pub fn distance(self, other: CirclePoint) -> f64 {
        circle_distance(self.theta, other.theta)
    }

    pub fn rotated(self, by: f64) -> Self {
        Self::new(self.theta + by)
    }

    /// Point reached by moving `t` radians counterclockwise from `self`.
    pub fn advance(self, t: f64) -> Self {
        self.rotated(t)
    }
}

impl fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "∠{}", self.theta)
    }
}

/// `true` when `b` lies strictly inside the counterclockwise arc from `a` to `c`.
pub fn ccw(a: CirclePoint, b: CirclePoint, c: CirclePoint) -> bool {
    let ob = a.offset_to(b);
    ob > 0.0 && ob < a.offset_to(c)
}

/// `true` when `x` lies in the closed counterclockwise arc `[start, end]`,
/// allowing `tol` of slack at either end.
pub fn in_closed_arc(x: CirclePoint, start: CirclePoint, end: CirclePoint, tol: f64) -> bool {
    if x.distance(start) <= tol || x.distance(end) <= tol {
        return true;
    }
    start.offset_to(x) <= start.offset_to(end)
}

/// `true` when `x` lies in the half-open arc `[start, end)`.
pub fn in_half_open_arc(x: CirclePoint, start: CirclePoint, end: CirclePoint) -> bool {
    start.offset_to(x) < start.offset_to(end)
}

/// A point of the open disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.norm() < 1.0 {
            Ok(Self(z))
        } else {
            Err(Error::NotInterior(z.norm()))
        }
    }

    pub fn z(self) -> Complex64 {
        self.0
    }
}

/// Möbius transformation `z ↦ (az + b) / (cz + d)`.
///
/// Stored unnormalized; normalization to determinant one happens only when
/// comparing transforms or extracting traces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diagonal(a: Complex64, d: Complex64) -> Self {
        Self::new(a, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), d)
    }

    /// Rotation `z ↦ e^{iθ} z`.
    pub fn rotation(theta: f64) -> Self {
        let h = Complex64::from_polar(1.0, theta / 2.0);
        Self::diagonal(h, h.conj())
    }

    /// Disk automorphism sending `p` to the origin: `z ↦ (z - p) / (1 - p̄z)`.
    pub fn to_origin(p: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, -p, -p.conj(), one)
    }

    /// Circle-preserving transform `e^{iθ} (z - p) / (1 - p̄z)` for interior `p`.
    pub fn disk_automorphism(p: Complex64, theta: f64) -> Self {
        Self::rotation(theta).compose(&Self::to_origin(p))
    }

    /// The Cayley-type frame `[[i, 1], [1, i]]` carrying the upper half-plane
    /// onto the disk.
    pub fn cayley_frame() -> Self {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        Self::new(i, one, one, i)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_TOL {
            return Err(Error::PoleAtInput(den.norm()));
        }
        Ok((self.a * z + self.b) / den)
    }

    /// Applies the transform to a boundary point. Only meaningful for
    /// circle-preserving transforms; the result is projected back onto the
    /// circle by taking its argument.
    pub fn apply_circle(&self, p: CirclePoint) -> CirclePoint {
        let z = p.to_complex();
        let w = (self.a * z + self.b) / (self.c * z + self.d);
        CirclePoint::from_complex(w)
    }

    /// Matrix product `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        Moebius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Result<Moebius> {
        let det = self.det();
        if det.norm() < SINGULAR_TOL {
            return Err(Error::SingularMatrix(det.norm()));
        }
        Ok(Moebius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        })
    }

    /// Scales to determinant one and fixes the sign so that the first
    /// entry of non-negligible modulus has positive real part.
    pub fn normalized(&self) -> Result<Moebius> {
        let det = self.det();
        if det.norm() < SINGULAR_TOL {
            return Err(Error::SingularMatrix(det.norm()));
        }
        let s = det.sqrt();
        let mut m = Moebius {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        };
        let lead = [m.a, m.b, m.c, m.d]
            .into_iter()
            .find(|e| e.norm() > 1e-12)
            .unwrap_or(m.a);
        let flip = if lead.re.abs() > 1e-12 {
            lead.re < 0.0
        } else {
            lead.im < 0.0
        };
        if flip {
            m = Moebius {
                a: -m.a,
                b: -m.b,
                c: -m.c,
                d: -m.d,
            };
        }
        Ok(m)
    }

    /// Largest entrywise difference between the normalized forms.
    pub fn projective_distance(&self, other: &Moebius) -> Result<f64> {
        let x = self.normalized()?;
        let y = other.normalized()?;
        let direct = [x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d]
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        // sign convention can flip on entries near the 1e-12 threshold
        let flipped = [x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d]
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        Ok(direct.min(flipped))
    }

    pub fn projectively_eq(&self, other: &Moebius, tol: f64) -> bool {
        self.projective_distance(other).is_ok_and(|d| d <= tol)
    }

    /// Modulus of the trace after normalizing the determinant to one.
    pub fn normalized_trace_abs(&self) -> Result<f64> {
        Ok(self.normalized()?.trace().norm())
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.normalized_trace_abs()
            .is_ok_and(|t| t > 2.0 + HYPERBOLIC_MARGIN)
    }

    /// Translation length `2 arccosh |tr/2|` along the axis.
    pub fn translation_length(&self) -> Result<f64> {
        let t = self.normalized_trace_abs()?;
        if t <= 2.0 + HYPERBOLIC_MARGIN {
            return Err(Error::NotHyperbolic(t));
        }
        Ok(2.0 * (t / 2.0).acosh())
    }

    /// Attracting and repelling fixed points of a hyperbolic transform.
    pub fn fixed_points(&self) -> Result<(CirclePoint, CirclePoint)> {
        let m = self.normalized()?;
        let t = m.trace().norm();
        if t <= 2.0 + HYPERBOLIC_MARGIN {
            return Err(Error::NotHyperbolic(t));
        }
        let roots: [Complex64; 2] = if m.c.norm() < 1e-14 {
            // one fixed point at infinity: never on the circle
            return Err(Error::NotHyperbolic(t));
        } else {
            let disc = (m.trace() * m.trace() - 4.0).sqrt();
            [
                (m.a - m.d + disc) / (2.0 * m.c),
                (m.a - m.d - disc) / (2.0 * m.c),
            ]
        };
        // |f'(z)| = 1 / |cz + d|²
        let derivative = |z: Complex64| 1.0 / (m.c * z + m.d).norm_sqr();
        let (att, rep) = if derivative(roots[0]) < derivative(roots[1]) {
            (roots[0], roots[1])
        } else {
            (roots[1], roots[0])
        };
        Ok((CirclePoint::from_complex(att), CirclePoint::from_complex(rep)))
    }

    /// Unique transform sending `from[i]` to `to[i]` for three distinct points.
    pub fn from_three_points(from: [Complex64; 3], to: [Complex64; 3]) -> Result<Moebius> {
        let src = cross_ratio_frame(from)?;
        let dst = cross_ratio_frame(to)?;
        Ok(dst.inverse()?.compose(&src))
    }

    /// Largest deviation of `|M(p)|` from one over 16 equally spaced
    /// boundary points.
    pub fn circle_residual(&self) -> f64 {
        (0..16)
            .map(|i| {
                let z = Complex64::from_polar(1.0, TAU * i as f64 / 16.0 + 0.1);
                match self.apply(z) {
                    Ok(w) => (w.norm() - 1.0).abs(),
                    Err(_) => f64::INFINITY,
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn preserves_circle(&self, tol: f64) -> bool {
        self.circle_residual() <= tol
    }

    /// Entries as `[re a, im a, re b, im b, re c, im c, re d, im d]`.
    pub fn to_flat(&self) -> [f64; 8] {
        [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ]
    }
}

/// Transform sending `z[0] → 0`, `z[1] → ∞`, `z[2] → 1`.
fn cross_ratio_frame(z: [Complex64; 3]) -> Result<Moebius> {
    let [a, b, c] = z;
    if (a - b).norm() < 1e-15 || (b - c).norm() < 1e-15 || (a - c).norm() < 1e-15 {
        return Err(Error::CoincidentPoints);
    }
    Ok(Moebius::new(c - b, -a * (c - b), c - a, -b * (c - a)))
}

/// Oriented geodesic given by its backward endpoint `u` and forward endpoint `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geodesic {
    pub u: CirclePoint,
    pub w: CirclePoint,
}

impl Geodesic {
    pub fn new(u: CirclePoint, w: CirclePoint) -> Result<Self> {
        if u.distance(w) < 1e-15 {
            return Err(Error::CoincidentPoints);
        }
        Ok(Self { u, w })
    }

    pub fn reversed(self) -> Self {
        Self {
            u: self.w,
            w: self.u,
        }
    }

    /// Euclidean center and radius of the supporting circle, or `None` for a diameter.
    pub fn euclidean_circle(&self) -> Option<(Complex64, f64)> {
        let u = self.u.to_complex();
        let w = self.w.to_complex();
        let denom = 1.0 + (u * w.conj()).re;
        if denom.abs() < 1e-13 {
            return None;
        }
        let center = (u + w) / denom;
        Some((center, (center - u).norm()))
    }

    /// Euclidean distance from `z` to the supporting circle (or line).
    pub fn residual(&self, z: Complex64) -> f64 {
        match self.euclidean_circle() {
            Some((c, r)) => ((z - c).norm() - r).abs(),
            None => {
                let dir = self.w.to_complex() - self.u.to_complex();
                let dir = dir / dir.norm();
                (z.re * dir.im - z.im * dir.re).abs()
            }
        }
    }
}

/// Hyperbolic distance between interior points.
pub fn hyperbolic_distance(z1: Complex64, z2: Complex64) -> Result<f64> {
    let n1 = 1.0 - z1.norm_sqr();
    let n2 = 1.0 - z2.norm_sqr();
    if n1 <= 0.0 {
        return Err(Error::NotInterior(z1.norm()));
    }
    if n2 <= 0.0 {
        return Err(Error::NotInterior(z2.norm()));
    }
    // 2 asinh(|z1 - z2| / sqrt(n1 n2)) is the cancellation-free form
    let x = (z1 - z2).norm() / (n1 * n2).sqrt();
    Ok(2.0 * x.asinh())
}

fn on_circle(z: Complex64) -> bool {
    (z.norm() - 1.0).abs() < 1e-12
}

/// The geodesic through `p` and `q`, oriented from `p` toward `q`.
///
/// Each point may be interior or on the boundary circle. An interior input
/// is moved to the origin, where geodesics are diameters, and the opposite
/// endpoint is pulled back.
pub fn geodesic_through(p: Complex64, q: Complex64) -> Result<Geodesic> {
    if (p - q).norm() < 1e-15 {
        return Err(Error::CoincidentPoints);
    }
    let (p_circ, q_circ) = (on_circle(p), on_circle(q));
    if !p_circ && p.norm() >= 1.0 {
        return Err(Error::NotInterior(p.norm()));
    }
    if !q_circ && q.norm() >= 1.0 {
        return Err(Error::NotInterior(q.norm()));
    }
    match (p_circ, q_circ) {
        (true, true) => Geodesic::new(CirclePoint::from_complex(p), CirclePoint::from_complex(q)),
        (true, false) => {
            let g = Moebius::to_origin(q);
            let pp = g.apply(p)?;
            let w = g.inverse()?.apply(-pp / pp.norm())?;
            Geodesic::new(CirclePoint::from_complex(p), CirclePoint::from_complex(w))
        }
        (false, true) => Ok(geodesic_through(q, p)?.reversed()),
        (false, false) => {
            // always construct from the same point so that swapping the
            // inputs reverses the result exactly
            if (q.re, q.im) < (p.re, p.im) {
                return Ok(geodesic_through(q, p)?.reversed());
            }
            let g = Moebius::to_origin(p);
            let gi = g.inverse()?;
            let qq = g.apply(q)?;
            let dir = qq / qq.norm();
            let u = gi.apply(-dir)?;
            let w = gi.apply(dir)?;
            Geodesic::new(CirclePoint::from_complex(u), CirclePoint::from_complex(w))
        }
    }
}

/// `true` when the endpoints of the two geodesics interleave on the circle.
pub fn geodesics_cross(g1: &Geodesic, g2: &Geodesic) -> bool {
    let a = ccw(g1.u, g2.u, g1.w);
    let b = ccw(g1.u, g2.w, g1.w);
    a != b && g2.u.distance(g1.u) > 0.0 && g2.w.distance(g1.w) > 0.0
        && g2.u.distance(g1.w) > 0.0 && g2.w.distance(g1.u) > 0.0
}

/// Intersection point of two geodesics and the angle between their forward
/// tangent directions there, in `(0, π)`.
///
/// The point is found in the Klein model, where geodesics are chords.
pub fn geodesic_intersection(g1: &Geodesic, g2: &Geodesic) -> Result<(Complex64, f64)> {
    if !geodesics_cross(g1, g2) {
        return Err(Error::NoInteriorIntersection);
    }
    let (a, b) = (g1.u.to_complex(), g1.w.to_complex());
    let (c, d) = (g2.u.to_complex(), g2.w.to_complex());
    let r = b - a;
    let s = d - c;
    let cross = |x: Complex64, y: Complex64| x.re * y.im - x.im * y.re;
    let denom = cross(r, s);
    if denom.abs() < 1e-300 {
        return Err(Error::NoInteriorIntersection);
    }
    let t = cross(c - a, s) / denom;
    let klein = a + r * t;
    let k2 = klein.norm_sqr();
    if k2 >= 1.0 {
        return Err(Error::NoInteriorIntersection);
    }
    let z = klein / (1.0 + (1.0 - k2).sqrt());
    let g = Moebius::to_origin(z);
    let t1 = g.apply(g1.w.to_complex())?;
    let t2 = g.apply(g2.w.to_complex())?;
    let angle = (t2 / t1).arg().abs();
    Ok((z, angle))
}

/// Interior angle at `vertex` between the directions toward `next` and `prev`,
/// measured counterclockwise from `next` to `prev`.
pub fn vertex_angle(prev: Complex64, vertex: Complex64, next: Complex64) -> Result<f64> {
    let g = Moebius::to_origin(vertex);
    let a = g.apply(next)?;
    let b = g.apply(prev)?;
    Ok(ccw_offset(a.arg(), b.arg()))
}

/// ν-mass of the box `[a, b] × [c, d]` of oriented geodesics (counterclockwise
/// arcs), using the mixed second antiderivative of `1 / (2 - 2cos(u - w))`.
///
/// A zero-length arc gives zero mass. Arcs of positive length below 1e-14 are
/// rejected as degenerate.
pub fn nu_box(a: CirclePoint, b: CirclePoint, c: CirclePoint, d: CirclePoint) -> Result<f64> {
    let len1 = a.offset_to(b);
    let len2 = c.offset_to(d);
    if len1 == 0.0 || len2 == 0.0 {
        return Ok(0.0);
    }
    if len1 < DEGENERATE_ARC {
        return Err(Error::DegenerateArc(len1));
    }
    if len2 < DEGENERATE_ARC {
        return Err(Error::DegenerateArc(len2));
    }
    // ccw order a < b < c < d < a with strict gaps
    let oc = a.offset_to(c);
    let od = a.offset_to(d);
    if !(len1 < oc && oc < od && od < TAU) || oc == 0.0 {
        return Err(Error::OverlappingArcs);
    }
    let (a, b, c, d) = (0.0, len1, oc, od);
    let half_sin = |x: f64| (x / 2.0).sin();
    let num = half_sin(d - b) * half_sin(c - a);
    let den = half_sin(c - b) * half_sin(d - a);
    Ok((num / den).abs().ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_automorphism(rng: &mut impl Rng) -> Moebius {
        let r = rng.gen_range(0.0..0.9);
        let t = rng.gen_range(-PI..PI);
        Moebius::disk_automorphism(Complex64::from_polar(r, t), rng.gen_range(-PI..PI))
    }

    fn random_interior(rng: &mut impl Rng) -> Complex64 {
        Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(-PI..PI))
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-15);
        for t in [-7.0, -1.0, 0.0, 2.5, 10.0] {
            let n = normalize_angle(t);
            assert!(n > -PI && n <= PI);
            assert_eq!(normalize_angle(n), n);
        }
    }

    #[test]
    fn ccw_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let pts: Vec<f64> = (0..3).map(|_| rng.gen_range(-PI..PI)).collect();
            let rot = rng.gen_range(-10.0..10.0);
            let a = ccw(CirclePoint::new(pts[0]), CirclePoint::new(pts[1]), CirclePoint::new(pts[2]));
            let b = ccw(
                CirclePoint::new(pts[0] + rot),
                CirclePoint::new(pts[1] + rot),
                CirclePoint::new(pts[2] + rot),
            );
            assert_eq!(a, b);
        }
    }

    #[test]
    fn apply_identity_and_inversion() {
        let z = Complex64::new(0.3, 0.1);
        assert_eq!(Moebius::identity().apply(z).unwrap(), z);
        let inv = Moebius::from_real(0.0, 1.0, 1.0, 0.0);
        let w = inv.apply(Complex64::from_polar(1.0, PI / 3.0)).unwrap();
        assert!((w - Complex64::from_polar(1.0, -PI / 3.0)).norm() < 1e-15);
        assert!(matches!(inv.apply(Complex64::new(0.0, 0.0)), Err(Error::PoleAtInput(_))));
    }

    #[test]
    fn automorphisms_keep_circle_points_on_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_automorphism(&mut rng);
        assert!(m.preserves_circle(1e-12));
        for _ in 0..100 {
            let z = Complex64::from_polar(1.0, rng.gen_range(-PI..PI));
            assert!((m.apply(z).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn compose_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_automorphism(&mut rng);
        assert!(m.compose(&Moebius::identity()).projectively_eq(&m, 1e-14));
        let inv = Moebius::from_real(0.0, 1.0, 1.0, 0.0);
        assert!(inv.inverse().unwrap().projectively_eq(&inv, 1e-15));
        let id = m.compose(&m.inverse().unwrap());
        assert!(id.projectively_eq(&Moebius::identity(), 1e-12));
        let n = random_automorphism(&mut rng);
        let z = random_interior(&mut rng);
        let lhs = m.compose(&n).apply(z).unwrap();
        let rhs = m.apply(n.apply(z).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        let singular = Moebius::from_real(1.0, 2.0, 2.0, 4.0);
        assert!(matches!(singular.inverse(), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn fixed_points_of_conjugated_diagonal() {
        let e = std::f64::consts::E;
        let frame = Moebius::cayley_frame();
        let m = frame
            .compose(&Moebius::from_real(e, 0.0, 0.0, 1.0 / e))
            .compose(&frame.inverse().unwrap());
        let (att, rep) = m.fixed_points().unwrap();
        // frame(∞) = i is attracting (|e| > 1 pushes toward ∞), frame(0) = -i repelling
        assert!(att.distance(CirclePoint::new(PI / 2.0)) < 1e-12);
        assert!(rep.distance(CirclePoint::new(-PI / 2.0)) < 1e-12);
        let mut z = CirclePoint::new(0.3);
        for _ in 0..60 {
            z = m.apply_circle(z);
        }
        assert!(z.distance(att) < 1e-10);
        assert!((m.translation_length().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_residuals_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut seen = 0;
        while seen < 50 {
            let m = random_automorphism(&mut rng);
            if !m.is_hyperbolic() {
                continue;
            }
            seen += 1;
            let (att, rep) = m.fixed_points().unwrap();
            assert!(m.apply_circle(att).distance(att) < 1e-10);
            assert!(m.apply_circle(rep).distance(rep) < 1e-10);
        }
    }

    #[test]
    fn translation_length_rejects_non_hyperbolic() {
        assert!(matches!(Moebius::identity().translation_length(), Err(Error::NotHyperbolic(_))));
        assert!(matches!(Moebius::rotation(0.4).fixed_points(), Err(Error::NotHyperbolic(_))));
    }

    #[test]
    fn translation_length_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = 0;
        while seen < 50 {
            let m = random_automorphism(&mut rng);
            if !m.is_hyperbolic() {
                continue;
            }
            seen += 1;
            let g = random_automorphism(&mut rng);
            let conj = g.compose(&m).compose(&g.inverse().unwrap());
            let l = m.translation_length().unwrap();
            assert!((conj.translation_length().unwrap() - l).abs() < 1e-10);
            assert!((m.inverse().unwrap().translation_length().unwrap() - l).abs() < 1e-10);
        }
    }

    #[test]
    fn distance_basics() {
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(hyperbolic_distance(zero, zero).unwrap(), 0.0);
        let d = hyperbolic_distance(zero, Complex64::new(0.5, 0.0)).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-15);
        assert!(matches!(
            hyperbolic_distance(zero, Complex64::new(1.0, 0.0)),
            Err(Error::NotInterior(_))
        ));
    }

    #[test]
    fn distance_moebius_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let (z1, z2) = (random_interior(&mut rng), random_interior(&mut rng));
            let m = random_automorphism(&mut rng);
            let d0 = hyperbolic_distance(z1, z2).unwrap();
            let d1 = hyperbolic_distance(m.apply(z1).unwrap(), m.apply(z2).unwrap()).unwrap();
            assert!((d0 - d1).abs() < 1e-11, "{d0} {d1}");
            assert!((d0 - hyperbolic_distance(z2, z1).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn geodesic_through_diameter_and_boundary() {
        let g = geodesic_through(Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)).unwrap();
        assert!(g.u.distance(CirclePoint::new(PI)) < 1e-15);
        assert!(g.w.distance(CirclePoint::new(0.0)) < 1e-15);
        let g = geodesic_through(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!(g.w.distance(CirclePoint::new(PI)) < 1e-15);
        assert!(matches!(
            geodesic_through(Complex64::new(0.2, 0.0), Complex64::new(0.2, 0.0)),
            Err(Error::CoincidentPoints)
        ));
    }

    #[test]
    fn geodesic_through_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (p, q) = (random_interior(&mut rng), random_interior(&mut rng));
            let g = geodesic_through(p, q).unwrap();
            assert!(g.residual(p) < 1e-10 && g.residual(q) < 1e-10);
            let back = geodesic_through(q, p).unwrap();
            assert_eq!(back.u, g.w);
            assert_eq!(back.w, g.u);
            // p comes before q travelling from u to w
            let m = Moebius::to_origin(p);
            let qq = m.apply(q).unwrap();
            let ww = m.apply(g.w.to_complex()).unwrap();
            assert!((qq / qq.norm() - ww).norm() < 1e-9);
        }
    }

    #[test]
    fn intersection_of_diameters() {
        let g1 = Geodesic::new(CirclePoint::new(PI), CirclePoint::new(0.0)).unwrap();
        let g2 = Geodesic::new(CirclePoint::new(-PI / 2.0), CirclePoint::new(PI / 2.0)).unwrap();
        let (z, angle) = geodesic_intersection(&g1, &g2).unwrap();
        assert!(z.norm() < 1e-15);
        assert!((angle - PI / 2.0).abs() < 1e-15);
        let g3 = Geodesic::new(CirclePoint::new(0.1), CirclePoint::new(0.5)).unwrap();
        assert!(matches!(
            geodesic_intersection(&g3, &g2),
            Err(Error::NoInteriorIntersection)
        ));
    }

    #[test]
    fn intersection_angle_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut seen = 0;
        while seen < 50 {
            let pts: Vec<CirclePoint> = (0..4).map(|_| CirclePoint::new(rng.gen_range(-PI..PI))).collect();
            let g1 = Geodesic::new(pts[0], pts[1]).unwrap();
            let g2 = Geodesic::new(pts[2], pts[3]).unwrap();
            let Ok((z, angle)) = geodesic_intersection(&g1, &g2) else {
                continue;
            };
            seen += 1;
            assert!(g1.residual(z) < 1e-9 && g2.residual(z) < 1e-9);
            let m = random_automorphism(&mut rng);
            let map = |g: &Geodesic| Geodesic::new(m.apply_circle(g.u), m.apply_circle(g.w)).unwrap();
            let (z2, angle2) = geodesic_intersection(&map(&g1), &map(&g2)).unwrap();
            assert!((angle - angle2).abs() < 1e-10);
            assert!((m.apply(z).unwrap() - z2).norm() < 1e-9);
        }
    }

    #[test]
    fn nu_box_degenerate_and_overlap() {
        let p = |t: f64| CirclePoint::new(t);
        assert_eq!(nu_box(p(0.2), p(0.2), p(1.0), p(2.0)).unwrap(), 0.0);
        assert!(matches!(nu_box(p(0.0), p(1e-16 * 50.0), p(1.0), p(2.0)), Err(Error::DegenerateArc(_))));
        assert!(matches!(nu_box(p(0.0), p(1.5), p(1.0), p(2.0)), Err(Error::OverlappingArcs)));
        assert!(matches!(nu_box(p(0.0), p(1.0), p(1.0), p(2.0)), Err(Error::OverlappingArcs)));
    }

    #[test]
    fn nu_box_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let mut t: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..TAU)).collect();
            t.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let [a, b, c, d] = [t[0], t[1], t[2], t[3]].map(CirclePoint::new);
            let m = CirclePoint::new(rng.gen_range(t[0]..t[1]));
            let whole = nu_box(a, b, c, d).unwrap();
            let parts = nu_box(a, m, c, d).unwrap() + nu_box(m, b, c, d).unwrap();
            assert!((whole - parts).abs() < 1e-11 * whole.max(1.0));
            assert!(whole >= 0.0);
        }
    }

    #[test]
    fn nu_box_moebius_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let mut t: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..TAU)).collect();
            t.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let pts = [t[0], t[1], t[2], t[3]].map(CirclePoint::new);
            let m = random_automorphism(&mut rng);
            let img = pts.map(|p| m.apply_circle(p));
            let v0 = nu_box(pts[0], pts[1], pts[2], pts[3]).unwrap();
            let v1 = nu_box(img[0], img[1], img[2], img[3]).unwrap();
            assert!((v0 - v1).abs() < 1e-9 * v0.max(1.0), "{v0} {v1}");
        }
    }
}

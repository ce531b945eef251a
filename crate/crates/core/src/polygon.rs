//! Canonical `(8g-4)`-gons: side pairing, regular construction, side-pairing
//! generators, validation, perimeter, and tessellation.
//!
//! Side and vertex indices in this module are 0-based: `vertices[i]` is
//! `V_{i+1}`, side `i` runs from `vertices[i]` to `vertices[i+1]`, and lies on
//! the geodesic from `p[i]` to `q[i+1]`. [`side_pairing_sigma`] keeps the
//! 1-based convention of the pairing rule itself.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::disk::{geodesic_through, hyperbolic_distance, vertex_angle, CirclePoint, Geodesic, Moebius};
use crate::error::{Error, Result};

/// Tolerance for accepting a polygon as canonical.
pub const CANONICAL_TOL: f64 = 1e-8;
const GENERATOR_LENGTH_TOL: f64 = 1e-6;
const GENERATOR_CHECK_TOL: f64 = 1e-9;
const MAX_TESSELLATION_DEPTH: usize = 4;

/// Number of sides `8g - 4`.
pub fn side_count(genus: usize) -> usize {
    8 * genus - 4
}

fn check_genus(genus: usize) -> Result<()> {
    if genus < 2 {
        Err(Error::InvalidGenus(genus))
    } else {
        Ok(())
    }
}

/// The side pairing `σ(k)` with 1-based `k`: `4g - k` for odd `k` and
/// `2 - k` for even `k`, reduced into `1..=8g-4`.
pub fn side_pairing_sigma(genus: usize, k: usize) -> Result<usize> {
    check_genus(genus)?;
    let n = side_count(genus);
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    let (n, k, g) = (n as i64, k as i64, genus as i64);
    let raw = if k % 2 == 1 { 4 * g - k } else { 2 - k };
    let r = raw.rem_euclid(n);
    Ok(if r == 0 { n as usize } else { r as usize })
}

/// Side pairing on 0-based indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidePairing {
    genus: usize,
    partner: Vec<usize>,
}

impl SidePairing {
    pub fn new(genus: usize) -> Result<Self> {
        check_genus(genus)?;
        let n = side_count(genus);
        let partner = (1..=n)
            .map(|k| side_pairing_sigma(genus, k).map(|s| s - 1))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { genus, partner })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    /// `σ` on 0-based side indices.
    pub fn partner(&self, side: usize) -> usize {
        self.partner[side]
    }
}

/// A canonical fundamental polygon with its boundary data and generators.
#[derive(Clone, Debug)]
pub struct CanonicalPolygon {
    genus: usize,
    pairing: SidePairing,
    vertices: Vec<Complex64>,
    p: Vec<CirclePoint>,
    q: Vec<CirclePoint>,
    generators: Vec<Moebius>,
}

impl CanonicalPolygon {
    /// Builds the polygon from its vertices: extends the sides to the circle
    /// and constructs every side-pairing generator.
    pub fn from_vertices(genus: usize, vertices: Vec<Complex64>) -> Result<Self> {
        let pairing = SidePairing::new(genus)?;
        if vertices.len() != pairing.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} vertices, got {}",
                pairing.len(),
                vertices.len()
            )));
        }
        let (p, q) = split_endpoints(&extend_sides(&vertices)?);
        let mut poly = Self {
            genus,
            pairing,
            vertices,
            p,
            q,
            generators: Vec::new(),
        };
        poly.generators = (0..poly.n())
            .map(|k| pairing_generator(&poly.data(), k))
            .collect::<Result<Vec<_>>>()?;
        Ok(poly)
    }

    /// Builds the polygon from vertices and side-geodesic endpoints computed
    /// elsewhere (e.g. from fixed points of side transforms).
    pub fn from_parts(genus: usize, vertices: Vec<Complex64>, p: Vec<CirclePoint>, q: Vec<CirclePoint>) -> Result<Self> {
        let pairing = SidePairing::new(genus)?;
        let n = pairing.len();
        if vertices.len() != n || p.len() != n || q.len() != n {
            return Err(Error::InvalidArgument("vertex/endpoint counts do not match 8g-4".into()));
        }
        let mut poly = Self {
            genus,
            pairing,
            vertices,
            p,
            q,
            generators: Vec::new(),
        };
        poly.generators = (0..n)
            .map(|k| pairing_generator(&poly.data(), k))
            .collect::<Result<Vec<_>>>()?;
        Ok(poly)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of sides.
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn pairing(&self) -> &SidePairing {
        &self.pairing
    }

    pub fn sigma(&self, side: usize) -> usize {
        self.pairing.partner(side)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Complex64 {
        self.vertices[i % self.n()]
    }

    pub fn p(&self, i: usize) -> CirclePoint {
        self.p[i % self.n()]
    }

    pub fn q(&self, i: usize) -> CirclePoint {
        self.q[i % self.n()]
    }

    pub fn p_points(&self) -> &[CirclePoint] {
        &self.p
    }

    pub fn q_points(&self) -> &[CirclePoint] {
        &self.q
    }

    pub fn generators(&self) -> &[Moebius] {
        &self.generators
    }

    /// `T_{i+1}`, pairing side `i` with side `σ(i)`.
    pub fn generator(&self, i: usize) -> &Moebius {
        &self.generators[i % self.n()]
    }

    /// Geodesic carrying side `i`, from `P_i` to `Q_{i+1}`.
    pub fn side_geodesic(&self, i: usize) -> Geodesic {
        Geodesic {
            u: self.p(i),
            w: self.q(i + 1),
        }
    }

    pub fn side_length(&self, i: usize) -> f64 {
        hyperbolic_distance(self.vertex(i), self.vertex(i + 1)).expect("vertices are interior")
    }

    /// Interior angle at vertex `i`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.n();
        vertex_angle(self.vertex(i + n - 1), self.vertex(i), self.vertex(i + 1)).expect("vertices are interior")
    }

    /// The boundary points in counterclockwise order `P_1, Q_1, …, P_n, Q_n`.
    pub fn boundary_points(&self) -> Vec<CirclePoint> {
        self.p.iter().zip(&self.q).flat_map(|(&p, &q)| [p, q]).collect()
    }

    /// Sum of the hyperbolic side lengths.
    pub fn perimeter(&self) -> f64 {
        (0..self.n()).map(|i| self.side_length(i)).sum()
    }

    /// Applies one circle-preserving transform to all of the polygon's data.
    pub fn transformed(&self, m: &Moebius) -> Result<Self> {
        let vertices = self.vertices.iter().map(|&v| m.apply(v)).collect::<Result<Vec<_>>>()?;
        let p = self.p.iter().map(|&x| m.apply_circle(x)).collect();
        let q = self.q.iter().map(|&x| m.apply_circle(x)).collect();
        Self::from_parts(self.genus, vertices, p, q)
    }

    fn data(&self) -> PolygonData<'_> {
        PolygonData {
            pairing: &self.pairing,
            vertices: &self.vertices,
            p: &self.p,
            q: &self.q,
        }
    }

    pub fn to_json(&self) -> PolygonJson {
        PolygonJson {
            genus: self.genus,
            vertices: self.vertices.iter().map(|v| [v.re, v.im]).collect(),
            p: self.p.iter().map(|x| x.theta()).collect(),
            q: self.q.iter().map(|x| x.theta()).collect(),
            generators: self.generators.iter().map(Moebius::to_flat).collect(),
            perimeter: self.perimeter(),
        }
    }
}

/// Serialized form of a polygon; field order is the emission order.
#[derive(Clone, Debug, Serialize)]
pub struct PolygonJson {
    pub genus: usize,
    pub vertices: Vec<[f64; 2]>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub generators: Vec<[f64; 8]>,
    pub perimeter: f64,
}

/// Borrowed polygon data without generators.
#[derive(Clone, Copy)]
pub struct PolygonData<'a> {
    pub pairing: &'a SidePairing,
    pub vertices: &'a [Complex64],
    pub p: &'a [CirclePoint],
    pub q: &'a [CirclePoint],
}

fn split_endpoints(ends: &[(CirclePoint, CirclePoint)]) -> (Vec<CirclePoint>, Vec<CirclePoint>) {
    let n = ends.len();
    let p = ends.iter().map(|e| e.0).collect();
    let mut q = vec![CirclePoint::new(0.0); n];
    for (k, e) in ends.iter().enumerate() {
        q[(k + 1) % n] = e.1;
    }
    (p, q)
}

/// The regular right-angled `(8g-4)`-gon centered at the origin, with `V_1`
/// at angle `π/n`.
///
/// Circumradius from the right triangle (center, vertex, side midpoint):
/// `cosh R = cot(π/n) · cot(π/4)`.
pub fn build_regular_polygon(genus: usize) -> Result<CanonicalPolygon> {
    check_genus(genus)?;
    let n = side_count(genus);
    let nf = n as f64;
    let big_r = (1.0 / (PI / nf).tan()).acosh();
    let r = (big_r / 2.0).tanh();
    let vertices = (0..n)
        .map(|k| Complex64::from_polar(r, PI / nf + TAU * k as f64 / nf))
        .collect();
    CanonicalPolygon::from_vertices(genus, vertices)
}

/// Side length of the regular polygon: `arccosh(1 + 2cos(π/(4g-2)))`.
pub fn regular_side_length(genus: usize) -> f64 {
    (1.0 + 2.0 * (PI / (4 * genus - 2) as f64).cos()).acosh()
}

/// Endpoints `(P_k, Q_{k+1})` of the geodesic extension of each side.
pub fn extend_sides(vertices: &[Complex64]) -> Result<Vec<(CirclePoint, CirclePoint)>> {
    let n = vertices.len();
    (0..n)
        .map(|k| {
            let a = vertices[k];
            let b = vertices[(k + 1) % n];
            if (a - b).norm() < 1e-14 {
                return Err(Error::DegenerateSide(k + 1));
            }
            let g = geodesic_through(a, b)?;
            Ok((g.u, g.w))
        })
        .collect()
}

/// Three-point transform `P_k ↦ Q_{σ(k)+1}`, `Q_{k+1} ↦ P_{σ(k)}`, `V_k ↦ V_{σ(k)+1}`.
fn raw_generator(data: &PolygonData<'_>, k: usize) -> Result<Moebius> {
    let n = data.vertices.len();
    let s = data.pairing.partner(k);
    Moebius::from_three_points(
        [data.p[k].to_complex(), data.q[(k + 1) % n].to_complex(), data.vertices[k]],
        [data.q[(s + 1) % n].to_complex(), data.p[s].to_complex(), data.vertices[(s + 1) % n]],
    )
}

/// The side-pairing generator `T_k` for 0-based side `k`.
///
/// Determined by the three-point correspondence `P_k ↦ Q_{σ(k)+1}`,
/// `Q_{k+1} ↦ P_{σ(k)}`, `V_k ↦ V_{σ(k)+1}`, then checked against
/// `T_k(V_{k+1}) = V_{σ(k)}`.
pub fn pairing_generator(data: &PolygonData<'_>, k: usize) -> Result<Moebius> {
    let n = data.vertices.len();
    let s = data.pairing.partner(k);
    let len_k = hyperbolic_distance(data.vertices[k], data.vertices[(k + 1) % n])?;
    let len_s = hyperbolic_distance(data.vertices[s], data.vertices[(s + 1) % n])?;
    if (len_k - len_s).abs() > GENERATOR_LENGTH_TOL {
        return Err(Error::NotCanonical(format!(
            "sides {} and {} differ in length by {:e}",
            k + 1,
            s + 1,
            (len_k - len_s).abs()
        )));
    }
    let t = raw_generator(data, k)?;
    let image = t.apply(data.vertices[(k + 1) % n])?;
    let miss = (image - data.vertices[s]).norm();
    if miss > GENERATOR_CHECK_TOL {
        return Err(Error::NotCanonical(format!(
            "T_{} misses V_{} by {:e}",
            k + 1,
            s + 1,
            miss
        )));
    }
    Ok(t)
}

/// Per-pair residuals of the canonical-polygon properties.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    /// `(k, σ(k), |len_k - len_σ(k)|)`, 1-based, one entry per pair.
    pub side_length_diffs: Vec<(usize, usize, f64)>,
    /// `(k, σ(k)+1, angle_k + angle_{σ(k)+1} - π)`, 1-based.
    pub angle_sum_residuals: Vec<(usize, usize, f64)>,
    pub interleaved: bool,
    /// `(k, max(|T_k(V_{k+1}) - V_σ(k)|, ‖T_σ(k) T_k - id‖))` per side.
    pub generator_residuals: Vec<(usize, f64)>,
    pub accepted: bool,
}

impl ValidationReport {
    pub fn max_side_diff(&self) -> f64 {
        self.side_length_diffs.iter().map(|e| e.2).fold(0.0, f64::max)
    }

    pub fn max_angle_residual(&self) -> f64 {
        self.angle_sum_residuals.iter().map(|e| e.2.abs()).fold(0.0, f64::max)
    }

    pub fn max_generator_residual(&self) -> f64 {
        self.generator_residuals.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    /// First pair (1-based) whose side lengths or angle sum violate the tolerance.
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        self.side_length_diffs
            .iter()
            .find(|e| e.2 > CANONICAL_TOL)
            .map(|e| (e.0, e.1))
            .or_else(|| {
                self.angle_sum_residuals
                    .iter()
                    .find(|e| e.2.abs() > CANONICAL_TOL)
                    .map(|e| (e.0, e.1))
            })
    }
}

/// `true` when `P_1, Q_1, …, P_n, Q_n` is strictly increasing counterclockwise.
pub fn is_interleaved(p: &[CirclePoint], q: &[CirclePoint]) -> bool {
    let pts: Vec<CirclePoint> = p.iter().zip(q).flat_map(|(&a, &b)| [a, b]).collect();
    strictly_cyclic_increasing(&pts)
}

pub(crate) fn strictly_cyclic_increasing(pts: &[CirclePoint]) -> bool {
    let Some(&first) = pts.first() else {
        return true;
    };
    let mut last = 0.0;
    for &x in &pts[1..] {
        let o = first.offset_to(x);
        if o <= last {
            return false;
        }
        last = o;
    }
    true
}

/// Validates raw vertex data without requiring generator construction to succeed.
pub fn validate_vertices(genus: usize, vertices: &[Complex64]) -> Result<ValidationReport> {
    let pairing = SidePairing::new(genus)?;
    let n = pairing.len();
    if vertices.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} vertices, got {}", vertices.len())));
    }
    let (p, q) = split_endpoints(&extend_sides(vertices)?);
    validate_data(&PolygonData {
        pairing: &pairing,
        vertices,
        p: &p,
        q: &q,
    })
}

fn validate_data(data: &PolygonData<'_>) -> Result<ValidationReport> {
    let n = data.vertices.len();
    let v = |i: usize| data.vertices[i % n];
    let len = |i: usize| hyperbolic_distance(v(i), v(i + 1));
    let angle = |i: usize| vertex_angle(v(i + n - 1), v(i), v(i + 1));

    let mut side_length_diffs = Vec::new();
    let mut angle_sum_residuals = Vec::new();
    for k in 0..n {
        let s = data.pairing.partner(k);
        if k < s {
            side_length_diffs.push((k + 1, s + 1, (len(k)? - len(s)?).abs()));
        }
        let partner_vertex = (s + 1) % n;
        if k <= partner_vertex {
            angle_sum_residuals.push((k + 1, partner_vertex + 1, angle(k)? + angle(partner_vertex)? - PI));
        }
    }

    let raw: Vec<Result<Moebius>> = (0..n).map(|k| raw_generator(data, k)).collect();
    let mut generator_residuals = Vec::with_capacity(n);
    for k in 0..n {
        let s = data.pairing.partner(k);
        let residual = match (&raw[k], &raw[s]) {
            (Ok(t), Ok(ts)) => {
                let hit = t.apply(v(k + 1)).map(|z| (z - v(s)).norm()).unwrap_or(f64::INFINITY);
                let rel = ts
                    .compose(t)
                    .projective_distance(&Moebius::identity())
                    .unwrap_or(f64::INFINITY);
                hit.max(rel)
            }
            _ => f64::INFINITY,
        };
        generator_residuals.push((k + 1, residual));
    }

    let interleaved = is_interleaved(data.p, data.q);
    let mut report = ValidationReport {
        side_length_diffs,
        angle_sum_residuals,
        interleaved,
        generator_residuals,
        accepted: false,
    };
    report.accepted = interleaved
        && report.max_side_diff() <= CANONICAL_TOL
        && report.max_angle_residual() <= CANONICAL_TOL
        && report.max_generator_residual() <= CANONICAL_TOL;
    Ok(report)
}

/// Checks the canonical-polygon properties: paired sides of equal length,
/// paired vertex angles summing to π, interleaved endpoints, generator relations.
pub fn validate_canonical(poly: &CanonicalPolygon) -> ValidationReport {
    validate_data(&poly.data()).expect("polygon vertices are interior")
}

/// Gauss–Bonnet area `2π(2g - 2)`.
pub fn area(genus: usize) -> f64 {
    TAU * (2 * genus - 2) as f64
}

/// The isoareal bound `4 d_n Area` with `d_n = n tan(Area / 2n)`.
pub fn isoareal_bound(genus: usize) -> f64 {
    let n = side_count(genus) as f64;
    let a = area(genus);
    4.0 * n * (a / (2.0 * n)).tan() * a
}

/// An image `γF` of the polygon under a reduced word in the generators.
#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    /// Generator indices (0-based), applied right to left: `T_{w[0]} ∘ … ∘ T_{w[last]}`.
    pub word: Vec<usize>,
    #[serde(skip)]
    pub transform: Moebius,
    pub vertices: Vec<[f64; 2]>,
}

impl Tile {
    pub fn vertex_points(&self) -> Vec<Complex64> {
        self.vertices.iter().map(|v| Complex64::new(v[0], v[1])).collect()
    }
}

/// Images of the polygon under all reduced words of length `≤ depth`,
/// in lexicographic word order.
pub fn tessellate(poly: &CanonicalPolygon, depth: usize) -> Result<Vec<Tile>> {
    if depth > MAX_TESSELLATION_DEPTH {
        return Err(Error::DepthTooLarge(depth));
    }
    let n = poly.n();
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..n {
                // reduced: never follow T_g by its inverse T_σ(g)
                if w.last().is_some_and(|&last| poly.sigma(last) == g) {
                    continue;
                }
                let mut nw = w.clone();
                nw.push(g);
                next.push(nw);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words.sort();
    words
        .into_par_iter()
        .map(|word| {
            let transform = word
                .iter()
                .fold(Moebius::identity(), |acc, &g| acc.compose(poly.generator(g)));
            let vertices = poly
                .vertices()
                .iter()
                .map(|&v| transform.apply(v).map(|z| [z.re, z.im]))
                .collect::<Result<Vec<_>>>()?;
            Ok(Tile {
                word,
                transform,
                vertices,
            })
        })
        .collect()
}

/// `true` when `z` is strictly inside the geodesic polygon with the given
/// vertices, at hyperbolic distance more than `margin` from every edge.
///
/// The point is moved to the origin; winding is then the sum of vertex
/// direction increments.
pub fn point_in_polygon(z: Complex64, vertices: &[Complex64], margin: f64) -> bool {
    let g = Moebius::to_origin(z);
    let moved: Vec<Complex64> = match vertices.iter().map(|&v| g.apply(v)).collect::<Result<Vec<_>>>() {
        Ok(m) => m,
        Err(_) => return false,
    };
    let n = moved.len();
    let mut winding = 0.0;
    for i in 0..n {
        let a = moved[i];
        let b = moved[(i + 1) % n];
        if distance_origin_to_segment_geodesic(a, b) <= margin {
            return false;
        }
        winding += (b / a).arg();
    }
    winding.abs() > PI
}

/// Hyperbolic distance from the origin to the full geodesic through `a` and `b`.
fn distance_origin_to_segment_geodesic(a: Complex64, b: Complex64) -> f64 {
    match geodesic_through(a, b).ok().and_then(|g| g.euclidean_circle()) {
        Some((c, r)) => {
            let e = (c.norm() - r).abs();
            2.0 * e.min(1.0 - 1e-16).atanh()
        }
        None => 0.0,
    }
}

/// Result of sampling the extension condition against a set of tiles.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCheck {
    pub samples: usize,
    pub violations: usize,
}

/// Samples points along the extensions of every side beyond its vertices
/// and counts those falling strictly inside any tile.
pub fn check_extension_condition(poly: &CanonicalPolygon, tiles: &[Tile], samples_per_side: usize, margin: f64) -> ExtensionCheck {
    let n = poly.n();
    let tile_vertices: Vec<Vec<Complex64>> = tiles.iter().map(Tile::vertex_points).collect();
    let points: Vec<Complex64> = (0..n)
        .flat_map(|k| extension_samples(poly, k, samples_per_side))
        .collect();
    let violations = points
        .par_iter()
        .filter(|&&z| tile_vertices.iter().any(|t| point_in_polygon(z, t, margin)))
        .count();
    ExtensionCheck {
        samples: points.len(),
        violations,
    }
}

/// Points on the geodesic of side `k` outside the side itself: half beyond
/// `V_k` toward `P_k`, half beyond `V_{k+1}` toward `Q_{k+1}`.
fn extension_samples(poly: &CanonicalPolygon, k: usize, count: usize) -> Vec<Complex64> {
    let va = poly.vertex(k);
    let vb = poly.vertex(k + 1);
    let to_origin = Moebius::to_origin(va);
    let back = to_origin.inverse().expect("automorphism");
    let dir = to_origin.apply(vb).expect("interior");
    let dir = dir / dir.norm();
    let side = poly.side_length(k);
    let half = count / 2;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // hyperbolic distance from V_k along the geodesic, avoiding the side itself
        let s = if i < half {
            -0.05 - 3.0 * (i as f64 + 1.0) / half as f64
        } else {
            side + 0.05 + 3.0 * (i - half + 1) as f64 / (count - half) as f64
        };
        let r = (s.abs() / 2.0).tanh();
        let local = dir * r * s.signum();
        out.push(back.apply(local).expect("interior"));
    }
    out
}

//! The boundary map `f_A`, its natural extension, one-sided orbits, Markov
//! partitions, and transition matrices.
//!
//! Indices are 0-based throughout: branch `k` is the arc `[A_k, A_{k+1})` on
//! which the map acts by generator `k`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::disk::{in_closed_arc, CirclePoint};
use crate::error::{Error, Result};
use crate::polygon::{strictly_cyclic_increasing, CanonicalPolygon};
use crate::spectral::ZeroOneMatrix;

/// Tolerance for `A_k ∈ [P_k, Q_k]`.
pub const ARC_TOL: f64 = 1e-12;
/// Image endpoints within this distance snap to a partition point.
pub const SNAP_TOL: f64 = 1e-9;
/// Orbit points within this distance of a discontinuity are identified with it.
pub const ORBIT_SNAP: f64 = 1e-9;
/// Orbit points between `ORBIT_SNAP` and this distance are ambiguous.
pub const AMBIGUITY_BAND: f64 = 1e-8;
pub const PERIOD_MATCH: f64 = 1e-10;
pub const PERIOD_CONFIRM: f64 = 1e-9;
pub const MAX_ORBIT_LEN: usize = 10_000;
pub const AUTO_DEPTH: usize = 1_000;
/// Expected coincidence `C_k = B_k` for the uneven parameter.
pub const COLLAPSE_TOL: f64 = 1e-10;

/// How a multi-parameter was chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamTag {
    /// `false` selects `P_k`, `true` selects `Q_k`.
    Extremal(Vec<bool>),
    Midpoint,
    Uneven,
    Custom,
}

/// Request for a multi-parameter, resolved against a polygon.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamSpec {
    AllP,
    AllQ,
    /// `(P_1, Q_2, P_3, Q_4, …)`.
    Alternating,
    Bits(Vec<bool>),
    Midpoint,
    Uneven,
    Angles(Vec<f64>),
}

impl FromStr for ParamSpec {
    type Err = Error;

    /// Accepts `P`, `Q`, `PQ`, `midpoint`, `uneven`, `bits:0101…` or
    /// `angles:a1,a2,…`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(bits) = s.strip_prefix("bits:") {
            return bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::InvalidArgument(format!("bit string may only contain 0 and 1, got {c:?}"))),
                })
                .collect::<Result<Vec<_>>>()
                .map(ParamSpec::Bits);
        }
        if let Some(list) = s.strip_prefix("angles:") {
            return list
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::InvalidArgument(format!("bad angle {t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()
                .map(ParamSpec::Angles);
        }
        match s {
            "P" | "p" => Ok(Self::AllP),
            "Q" | "q" => Ok(Self::AllQ),
            "PQ" | "pq" => Ok(Self::Alternating),
            "midpoint" => Ok(Self::Midpoint),
            "uneven" => Ok(Self::Uneven),
            _ => Err(Error::InvalidArgument(format!("unknown parameter {s:?}"))),
        }
    }
}

/// The points `A_1 … A_n` with `A_k ∈ [P_k, Q_k]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiParameter {
    pub points: Vec<CirclePoint>,
    pub tag: ParamTag,
}

impl MultiParameter {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_extremal(&self) -> bool {
        matches!(self.tag, ParamTag::Extremal(_))
    }

    pub fn is_alternating(&self) -> bool {
        match &self.tag {
            ParamTag::Extremal(bits) => bits.iter().enumerate().all(|(k, &b)| b == (k % 2 == 1)),
            _ => false,
        }
    }
}

/// Angular midpoint of `[P_k, Q_k]`.
pub fn arc_midpoint(poly: &CanonicalPolygon, k: usize) -> CirclePoint {
    let p = poly.p(k);
    p.advance(p.offset_to(poly.q(k)) / 2.0)
}

/// Midpoints on odd sides; on even sides (1-based) the preimage of the next
/// midpoint under `T_{σ(k)+1} ∘ T_k`, that is
/// `A_k = T_{σ(k)}(T_{σ(σ(k)+1)}(mid_{k+1}))`.
fn uneven_points(poly: &CanonicalPolygon) -> Vec<CirclePoint> {
    let n = poly.n();
    let mids: Vec<CirclePoint> = (0..n).map(|k| arc_midpoint(poly, k)).collect();
    (0..n)
        .map(|k| {
            if k % 2 == 0 {
                mids[k]
            } else {
                let s = poly.sigma(k);
                let inner = poly.sigma((s + 1) % n);
                poly.generator(s).apply_circle(poly.generator(inner).apply_circle(mids[(k + 1) % n]))
            }
        })
        .collect()
}

pub fn make_multiparameter(poly: &CanonicalPolygon, spec: &ParamSpec) -> Result<MultiParameter> {
    let n = poly.n();
    let extremal = |bits: Vec<bool>| -> Result<MultiParameter> {
        if bits.len() != n {
            return Err(Error::ParameterLength {
                expected: n,
                got: bits.len(),
            });
        }
        let points = bits.iter().enumerate().map(|(k, &q)| if q { poly.q(k) } else { poly.p(k) }).collect();
        Ok(MultiParameter {
            points,
            tag: ParamTag::Extremal(bits),
        })
    };
    let mp = match spec {
        ParamSpec::AllP => return extremal(vec![false; n]),
        ParamSpec::AllQ => return extremal(vec![true; n]),
        ParamSpec::Alternating => return extremal((0..n).map(|k| k % 2 == 1).collect()),
        ParamSpec::Bits(bits) => return extremal(bits.clone()),
        ParamSpec::Midpoint => MultiParameter {
            points: (0..n).map(|k| arc_midpoint(poly, k)).collect(),
            tag: ParamTag::Midpoint,
        },
        ParamSpec::Uneven => MultiParameter {
            points: uneven_points(poly),
            tag: ParamTag::Uneven,
        },
        ParamSpec::Angles(a) => {
            if a.len() != n {
                return Err(Error::ParameterLength {
                    expected: n,
                    got: a.len(),
                });
            }
            MultiParameter {
                points: a.iter().map(|&t| CirclePoint::new(t)).collect(),
                tag: ParamTag::Custom,
            }
        }
    };
    check_in_arcs(poly, &mp.points)?;
    Ok(mp)
}

fn check_in_arcs(poly: &CanonicalPolygon, points: &[CirclePoint]) -> Result<()> {
    for (k, &a) in points.iter().enumerate() {
        if !in_closed_arc(a, poly.p(k), poly.q(k), ARC_TOL) {
            return Err(Error::OutOfArc { k: k + 1 });
        }
    }
    Ok(())
}

/// Approach direction for one-sided limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Periodicity {
    EventuallyPeriodic { preperiod: usize, period: usize },
    NotDetected,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub base: CirclePoint,
    pub side: Side,
    /// Branch used at each visited point.
    pub itinerary: Vec<usize>,
    /// `points[i + 1] = T_{itinerary[i]}(points[i])`.
    pub points: Vec<CirclePoint>,
    pub periodicity: Periodicity,
}

/// The boundary map of a polygon for one multi-parameter.
#[derive(Clone, Debug)]
pub struct BoundaryMap<'a> {
    poly: &'a CanonicalPolygon,
    param: MultiParameter,
}

impl<'a> BoundaryMap<'a> {
    pub fn new(poly: &'a CanonicalPolygon, param: MultiParameter) -> Result<Self> {
        if param.len() != poly.n() {
            return Err(Error::ParameterLength {
                expected: poly.n(),
                got: param.len(),
            });
        }
        check_in_arcs(poly, &param.points)?;
        Ok(Self { poly, param })
    }

    pub fn from_spec(poly: &'a CanonicalPolygon, spec: &ParamSpec) -> Result<Self> {
        Self::new(poly, make_multiparameter(poly, spec)?)
    }

    pub fn polygon(&self) -> &'a CanonicalPolygon {
        self.poly
    }

    pub fn param(&self) -> &MultiParameter {
        &self.param
    }

    pub fn n(&self) -> usize {
        self.poly.n()
    }

    pub fn a(&self, k: usize) -> CirclePoint {
        self.param.points[k % self.n()]
    }

    /// The unique `k` with `x ∈ [A_k, A_{k+1})`.
    pub fn branch(&self, x: CirclePoint) -> usize {
        let n = self.n();
        let a0 = self.a(0);
        let ox = a0.offset_to(x);
        // A offsets from A_1 increase with k, so the last one not past x wins
        let mut k = 0;
        for j in 1..n {
            if a0.offset_to(self.a(j)) <= ox {
                k = j;
            } else {
                break;
            }
        }
        k
    }

    /// `(T_k(x), k)` for the branch `k` containing `x`.
    pub fn apply(&self, x: CirclePoint) -> (CirclePoint, usize) {
        let k = self.branch(x);
        (self.poly.generator(k).apply_circle(x), k)
    }

    pub fn apply_generator(&self, k: usize, x: CirclePoint) -> CirclePoint {
        self.poly.generator(k).apply_circle(x)
    }

    /// `F_A(u, w) = (T_k u, T_k w)` with the branch chosen by `w`.
    pub fn natural_extension(&self, u: CirclePoint, w: CirclePoint) -> Result<(CirclePoint, CirclePoint)> {
        if u.distance(w) < 1e-15 {
            return Err(Error::DiagonalInput);
        }
        let (w2, k) = self.apply(w);
        Ok((self.apply_generator(k, u), w2))
    }

    /// Nearest `A_j` and its distance.
    fn nearest_discontinuity(&self, x: CirclePoint) -> (usize, f64) {
        (0..self.n())
            .map(|j| (j, x.distance(self.a(j))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one side")
    }

    /// One step of the one-sided limit: returns the (possibly snapped) point,
    /// the branch used, and the image.
    fn one_sided_step(&self, x: CirclePoint, side: Side, check_ambiguity: bool) -> Result<(CirclePoint, usize, CirclePoint)> {
        let n = self.n();
        let (j, d) = self.nearest_discontinuity(x);
        let (x, k) = if d <= ORBIT_SNAP {
            let k = match side {
                Side::Right => j,
                Side::Left => (j + n - 1) % n,
            };
            (self.a(j), k)
        } else if check_ambiguity && d < AMBIGUITY_BAND {
            return Err(Error::NumericalAmbiguity(d));
        } else {
            (x, self.branch(x))
        };
        Ok((x, k, self.apply_generator(k, x)))
    }

    /// Iterates `lim_{ε→0⁺} f^n(base ± ε)`.
    ///
    /// Orientation is preserved, so the side persists along the orbit. An
    /// iterate is declared periodic once it returns within 1e-10 of an
    /// earlier point and one further full period stays within 1e-9.
    pub fn one_sided_orbit(&self, base: CirclePoint, side: Side, max_len: usize) -> Result<OrbitRecord> {
        if max_len > MAX_ORBIT_LEN {
            return Err(Error::InvalidArgument(format!("orbit length {max_len} exceeds {MAX_ORBIT_LEN}")));
        }
        let mut points = vec![base];
        let mut itinerary = Vec::new();
        for i in 0..max_len {
            let (x, k, image) = self.one_sided_step(points[i], side, i > 0)?;
            points[i] = x;
            itinerary.push(k);
            let matched = points
                .iter()
                .position(|p| p.distance(image) <= PERIOD_MATCH);
            points.push(image);
            if let Some(j) = matched {
                let period = i + 1 - j;
                if self.confirm_period(&points, j, period, side)? {
                    return Ok(OrbitRecord {
                        base,
                        side,
                        itinerary,
                        points,
                        periodicity: Periodicity::EventuallyPeriodic { preperiod: j, period },
                    });
                }
            }
        }
        Ok(OrbitRecord {
            base,
            side,
            itinerary,
            points,
            periodicity: Periodicity::NotDetected,
        })
    }

    /// Re-iterates one period from the last point and compares against the
    /// recorded cycle starting at `start`.
    fn confirm_period(&self, points: &[CirclePoint], start: usize, period: usize, side: Side) -> Result<bool> {
        let mut x = *points.last().expect("nonempty");
        for t in 1..=period {
            let (_, _, image) = self.one_sided_step(x, side, true)?;
            x = image;
            if x.distance(points[start + t]) > PERIOD_CONFIRM {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Ordered partition points with the branch of each arc `[x_i, x_{i+1})`.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionIntervals {
    pub points: Vec<CirclePoint>,
    pub names: Vec<String>,
    pub branches: Vec<usize>,
}

impl PartitionIntervals {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self, i: usize) -> CirclePoint {
        self.points[i % self.len()]
    }

    pub fn end(&self, i: usize) -> CirclePoint {
        self.points[(i + 1) % self.len()]
    }

    pub fn arc_length(&self, i: usize) -> f64 {
        self.start(i).offset_to(self.end(i))
    }

    /// Index `i` with `x ∈ [x_i, x_{i+1})`.
    pub fn locate(&self, x: CirclePoint) -> usize {
        let x0 = self.points[0];
        let ox = x0.offset_to(x);
        let offsets: Vec<f64> = self.points.iter().map(|&p| x0.offset_to(p)).collect();
        offsets.partition_point(|&o| o <= ox).saturating_sub(1)
    }

    /// Nearest partition index and its circle distance.
    pub fn snap(&self, x: CirclePoint) -> (usize, f64) {
        let i = self.locate(x);
        let n = self.len();
        let a = (i, x.distance(self.points[i]));
        let b = ((i + 1) % n, x.distance(self.points[(i + 1) % n]));
        if b.1 < a.1 {
            b
        } else {
            a
        }
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson {
            points: self.points.iter().map(|p| p.theta()).collect(),
            labels: (1..=self.len()).collect(),
            names: self.names.clone(),
            branches: self.branches.iter().map(|b| b + 1).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionJson {
    pub points: Vec<f64>,
    pub labels: Vec<usize>,
    pub names: Vec<String>,
    /// 1-based branch of each interval.
    pub branches: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    A,
    B,
    C,
    D,
    Auto,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            "d" => Ok(Self::D),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::InvalidArgument(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
            Self::Auto => "auto",
        })
    }
}

/// The points `B_k = T_{σ(k-1)} A_{σ(k-1)}` and `C_k = T_{σ(k+1)} A_{σ(k+1)+1}`.
pub fn b_c_points(bm: &BoundaryMap<'_>) -> (Vec<CirclePoint>, Vec<CirclePoint>) {
    let poly = bm.polygon();
    let n = bm.n();
    let b = (0..n)
        .map(|k| {
            let s = poly.sigma((k + n - 1) % n);
            bm.apply_generator(s, bm.a(s))
        })
        .collect();
    let c = (0..n)
        .map(|k| {
            let s = poly.sigma((k + 1) % n);
            bm.apply_generator(s, bm.a(s + 1))
        })
        .collect();
    (b, c)
}

fn mismatch(v: Variant) -> Error {
    Error::VariantMismatch {
        variant: v.to_string(),
    }
}

/// Builds the partition of the requested variant and checks the Markov
/// property: both endpoint images of every interval snap to partition points.
pub fn markov_partition(bm: &BoundaryMap<'_>, variant: Variant) -> Result<PartitionIntervals> {
    let poly = bm.polygon();
    let n = bm.n();
    let (points, names): (Vec<CirclePoint>, Vec<String>) = match variant {
        Variant::A => {
            if !bm.param().is_extremal() {
                return Err(mismatch(variant));
            }
            (0..n)
                .flat_map(|k| [(poly.p(k), format!("P{}", k + 1)), (poly.q(k), format!("Q{}", k + 1))])
                .unzip()
        }
        Variant::B => {
            if !bm.param().is_alternating() {
                return Err(mismatch(variant));
            }
            (0..n)
                .map(|k| {
                    if k % 2 == 0 {
                        (poly.p(k), format!("P{}", k + 1))
                    } else {
                        (poly.q(k), format!("Q{}", k + 1))
                    }
                })
                .unzip()
        }
        Variant::C => {
            if !matches!(bm.param().tag, ParamTag::Midpoint | ParamTag::Custom) {
                return Err(mismatch(variant));
            }
            let (b, c) = b_c_points(bm);
            (0..n)
                .flat_map(|k| {
                    [
                        (bm.a(k), format!("A{}", k + 1)),
                        (c[k], format!("C{}", k + 1)),
                        (b[k], format!("B{}", k + 1)),
                    ]
                })
                .unzip()
        }
        Variant::D => {
            if bm.param().tag != ParamTag::Uneven {
                return Err(mismatch(variant));
            }
            let (b, c) = b_c_points(bm);
            let mut pts = Vec::new();
            for k in 0..n {
                pts.push((bm.a(k), format!("A{}", k + 1)));
                if k % 2 == 0 {
                    pts.push((c[k], format!("C{}", k + 1)));
                } else {
                    let gap = c[k].distance(b[k]);
                    if gap > COLLAPSE_TOL {
                        return Err(Error::CollapseMismatch { k: k + 1, gap });
                    }
                }
                pts.push((b[k], format!("B{}", k + 1)));
            }
            pts.into_iter().unzip()
        }
        Variant::Auto => auto_points(bm, AUTO_DEPTH)?,
    };
    let partition = assemble(bm, points, names)?;
    if let Err(e) = interval_images(bm, &partition) {
        return Err(match e {
            Error::SnapFailure(d) => Error::NotMarkov(format!("variant {variant}: image endpoint {d:e} from every partition point")),
            other => other,
        });
    }
    Ok(partition)
}

fn assemble(bm: &BoundaryMap<'_>, points: Vec<CirclePoint>, names: Vec<String>) -> Result<PartitionIntervals> {
    if !strictly_cyclic_increasing(&points) {
        return Err(Error::PartitionOrder);
    }
    let m = points.len();
    let branches = (0..m)
        .map(|i| {
            let s = points[i];
            let mid = s.advance(s.offset_to(points[(i + 1) % m]) / 2.0);
            bm.branch(mid)
        })
        .collect();
    Ok(PartitionIntervals {
        points,
        names,
        branches,
    })
}

/// Union of the one-sided orbits of all `A_k`, ordered from `A_1`.
fn auto_points(bm: &BoundaryMap<'_>, depth: usize) -> Result<(Vec<CirclePoint>, Vec<String>)> {
    let n = bm.n();
    let mut all: Vec<CirclePoint> = (0..n).map(|k| bm.a(k)).collect();
    for k in 0..n {
        for side in [Side::Right, Side::Left] {
            let orbit = bm.one_sided_orbit(bm.a(k), side, depth)?;
            if orbit.periodicity == Periodicity::NotDetected {
                return Err(Error::NotMarkov(format!(
                    "{side} orbit of A{} not eventually periodic within {depth} steps",
                    k + 1
                )));
            }
            all.extend(orbit.points);
        }
    }
    let origin = bm.a(0);
    all.sort_by(|x, y| origin.offset_to(*x).total_cmp(&origin.offset_to(*y)));
    let mut points: Vec<CirclePoint> = Vec::new();
    for x in all {
        let dup = points.last().is_some_and(|p| p.distance(x) <= SNAP_TOL) || points.first().is_some_and(|p| p.distance(x) <= SNAP_TOL);
        if !dup {
            points.push(x);
        }
    }
    // prefer the exact A_k values over nearby orbit copies
    for k in 0..n {
        if let Some(p) = points.iter_mut().find(|p| p.distance(bm.a(k)) <= SNAP_TOL) {
            *p = bm.a(k);
        }
    }
    let names = (1..=points.len()).map(|i| format!("x{i}")).collect();
    Ok((points, names))
}

/// Snapped partition indices `(start, end)` of the image of every interval.
fn interval_images(bm: &BoundaryMap<'_>, part: &PartitionIntervals) -> Result<Vec<(usize, usize)>> {
    (0..part.len())
        .map(|i| {
            let k = part.branches[i];
            let (a, da) = part.snap(bm.apply_generator(k, part.start(i)));
            let (b, db) = part.snap(bm.apply_generator(k, part.end(i)));
            let worst = da.max(db);
            if worst > SNAP_TOL {
                return Err(Error::SnapFailure(worst));
            }
            Ok((a, b))
        })
        .collect()
}

/// A 0/1 matrix together with the partition it is indexed by.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionMatrix {
    pub matrix: ZeroOneMatrix,
    pub partition: PartitionIntervals,
}

/// `m_ij = 1` iff the image of interval `i` covers interval `j`, read off
/// combinatorially from the snapped image endpoints.
pub fn transition_matrix(bm: &BoundaryMap<'_>, part: &PartitionIntervals) -> Result<TransitionMatrix> {
    let m = part.len();
    let images = interval_images(bm, part)?;
    let mut matrix = ZeroOneMatrix::zeros(m);
    for (i, &(a, b)) in images.iter().enumerate() {
        if a == b {
            return Err(Error::NotMarkov(format!("image of interval {} is degenerate", i + 1)));
        }
        let mut j = a;
        while j != b {
            matrix.set(i, j, true);
            j = (j + 1) % m;
        }
    }
    Ok(TransitionMatrix {
        matrix,
        partition: part.clone(),
    })
}

/// The midpoint-style partition `A_k, C_k, B_k` for any multi-parameter,
/// keeping coincident points, with its matrix. Zero-length intervals get
/// empty rows. Returns the matrix and the indices of zero-length intervals.
pub fn raw_three_point_matrix(bm: &BoundaryMap<'_>) -> Result<(ZeroOneMatrix, Vec<usize>)> {
    let n = bm.n();
    let (b, c) = b_c_points(bm);
    let points: Vec<CirclePoint> = (0..n).flat_map(|k| [bm.a(k), c[k], b[k]]).collect();
    let m = points.len();
    let collapsed: Vec<usize> = (0..m).filter(|&i| points[i].distance(points[(i + 1) % m]) <= COLLAPSE_TOL).collect();
    let part = PartitionIntervals {
        branches: (0..m).map(|i| i / 3).collect(),
        names: vec![String::new(); m],
        points,
    };
    let images = interval_images(bm, &part)?;
    let mut matrix = ZeroOneMatrix::zeros(m);
    for (i, &(a, bb)) in images.iter().enumerate() {
        if collapsed.contains(&i) {
            continue;
        }
        let mut j = a;
        while j != bb {
            matrix.set(i, j, true);
            j = (j + 1) % m;
        }
    }
    Ok((matrix, collapsed))
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleEntry {
    /// 1-based side index.
    pub k: usize,
    /// Least `(m_k, n_k)` found, ordered by `m + n` then `m`.
    pub cycle: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CycleReport {
    Extremal,
    Search { entries: Vec<CycleEntry>, short_cycle: bool },
}

/// Searches `f^m(T_k A_k) = f^n(T_{k-1} A_k)` with `1 ≤ m, n ≤ max_m`, using
/// the right and left one-sided orbits of `A_k`.
pub fn cycle_report(bm: &BoundaryMap<'_>, max_m: usize) -> Result<CycleReport> {
    if bm.param().is_extremal() {
        return Ok(CycleReport::Extremal);
    }
    let n = bm.n();
    let mut entries = Vec::with_capacity(n);
    for k in 0..n {
        let right = bm.one_sided_orbit(bm.a(k), Side::Right, max_m + 1)?;
        let left = bm.one_sided_orbit(bm.a(k), Side::Left, max_m + 1)?;
        let at = |o: &OrbitRecord, i: usize| -> Option<CirclePoint> {
            // a periodic record stops early; extend it around the cycle
            if i < o.points.len() {
                return Some(o.points[i]);
            }
            match o.periodicity {
                Periodicity::EventuallyPeriodic { preperiod, period } => {
                    Some(o.points[preperiod + (i - preperiod) % period])
                }
                Periodicity::NotDetected => None,
            }
        };
        let mut best: Option<(usize, usize)> = None;
        for total in 2..=2 * max_m {
            for m in 1..total {
                let nn = total - m;
                if m > max_m || nn > max_m || nn == 0 {
                    continue;
                }
                if let (Some(x), Some(y)) = (at(&right, 1 + m), at(&left, 1 + nn)) {
                    if x.distance(y) <= SNAP_TOL {
                        best = Some((m, nn));
                        break;
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        entries.push(CycleEntry { k: k + 1, cycle: best });
    }
    let short_cycle = entries.iter().all(|e| e.cycle == Some((1, 1)));
    Ok(CycleReport::Search { entries, short_cycle })
}

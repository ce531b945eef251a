//! Parry weights and the conjugacy `ψ` of a Markov boundary map to a circle
//! map of constant slope `λ`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{markov_partition, transition_matrix, BoundaryMap, PartitionIntervals, ParamSpec, TransitionMatrix, Variant};
use crate::disk::{CirclePoint, Moebius};
use crate::error::{Error, Result};
use crate::format::csv_row;
use crate::polygon::CanonicalPolygon;
use crate::spectral::perron;

pub const MAX_EVAL_DEPTH: usize = 60;
const INVERSE_ITERATIONS: usize = 80;

/// Perron vector scaled so that the weights sum to `2π`.
#[derive(Clone, Debug, Serialize)]
pub struct ParryWeights {
    pub weights: Vec<f64>,
    pub lambda: f64,
}

impl ParryWeights {
    /// `max_i |λ v_i - Σ_j m_ij v_j|`.
    pub fn additivity_residual(&self, tm: &TransitionMatrix) -> f64 {
        let mv = tm.matrix.mul_vec(&self.weights);
        mv.iter()
            .zip(&self.weights)
            .map(|(s, v)| (self.lambda * v - s).abs())
            .fold(0.0, f64::max)
    }
}

pub fn parry_weights(tm: &TransitionMatrix) -> Result<ParryWeights> {
    let pp = perron(&tm.matrix)?;
    let total: f64 = pp.vector.iter().sum();
    Ok(ParryWeights {
        weights: pp.vector.iter().map(|v| v * TAU / total).collect(),
        lambda: pp.lambda,
    })
}

/// Default evaluation depth: 13 in genus 2, `⌈14 / log₁₀ λ⌉` otherwise.
pub fn default_depth(genus: usize, lambda: f64) -> usize {
    if genus == 2 {
        13
    } else {
        (14.0 / lambda.log10()).ceil() as usize
    }
}

/// The conjugacy `ψ(x) = -π + ρ'([-π, x])` for one Markov boundary map.
///
/// `ρ'` of a partial interval is found by pushing the interval forward one
/// step, where the Parry measure scales by `λ`, and descending until the
/// requested depth; the last level interpolates linearly in angle.
#[derive(Clone, Debug)]
pub struct Conjugacy {
    partition: PartitionIntervals,
    weights: ParryWeights,
    generators: Vec<Moebius>,
    /// Snapped partition indices of each interval's image endpoints.
    image_start: Vec<usize>,
    image_end: Vec<usize>,
    /// Offsets of partition points from the first one.
    offsets: Vec<f64>,
    /// Cumulative weights before each interval.
    cumulative: Vec<f64>,
    anchor: f64,
    anchor_measure: f64,
}

impl Conjugacy {
    /// Builds `ψ` for a boundary map from its Markov partition of the given variant.
    pub fn new(bm: &BoundaryMap<'_>, variant: Variant) -> Result<Self> {
        let part = markov_partition(bm, variant)?;
        let tm = transition_matrix(bm, &part)?;
        Self::from_matrix(bm, &tm)
    }

    pub fn for_spec(poly: &CanonicalPolygon, spec: &ParamSpec, variant: Variant) -> Result<Self> {
        Self::new(&BoundaryMap::from_spec(poly, spec)?, variant)
    }

    pub fn from_matrix(bm: &BoundaryMap<'_>, tm: &TransitionMatrix) -> Result<Self> {
        let weights = parry_weights(tm)?;
        let part = tm.partition.clone();
        let m = part.len();
        let mut image_start = Vec::with_capacity(m);
        let mut image_end = Vec::with_capacity(m);
        for i in 0..m {
            let k = part.branches[i];
            image_start.push(part.snap(bm.apply_generator(k, part.start(i))).0);
            image_end.push(part.snap(bm.apply_generator(k, part.end(i))).0);
        }
        let x0 = part.points[0];
        let offsets = part.points.iter().map(|&p| x0.offset_to(p)).collect();
        let mut cumulative = Vec::with_capacity(m);
        let mut acc = 0.0;
        for w in &weights.weights {
            cumulative.push(acc);
            acc += w;
        }
        let generators = (0..bm.n()).map(|k| *bm.polygon().generator(k)).collect();
        let mut psi = Self {
            partition: part,
            weights,
            generators,
            image_start,
            image_end,
            offsets,
            cumulative,
            anchor: -PI,
            anchor_measure: 0.0,
        };
        psi.anchor_measure = psi.measure_from_start(CirclePoint::new(-PI), MAX_EVAL_DEPTH);
        Ok(psi)
    }

    pub fn lambda(&self) -> f64 {
        self.weights.lambda
    }

    pub fn weights(&self) -> &ParryWeights {
        &self.weights
    }

    pub fn partition(&self) -> &PartitionIntervals {
        &self.partition
    }

    /// The angle fixed by the normalization, `ψ(anchor) = anchor`.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    fn generator_image(&self, interval: usize, y: CirclePoint) -> CirclePoint {
        self.generators[self.partition.branches[interval]].apply_circle(y)
    }

    /// `ρ'` of the arc from `x_start` to `y`, where `y` lies in the image arc
    /// `[x_start, x_end]` of some interval. Points just outside, from
    /// rounding, clamp to the nearer end.
    fn measure_in_image(&self, start: usize, end: usize, y: CirclePoint, depth: usize) -> f64 {
        let m = self.partition.len();
        let xs = self.partition.points[start];
        let span = if start == end { TAU } else { xs.offset_to(self.partition.points[end]) };
        let mut o = xs.offset_to(y);
        if o > span {
            if o - span < TAU - o {
                o = span;
            } else {
                return 0.0;
            }
        }
        let mut acc = 0.0;
        let mut j = start;
        loop {
            let next = (j + 1) % m;
            let o_next = xs.offset_to(self.partition.points[next]);
            let o_next = if next == start { TAU } else { o_next };
            if o_next > o {
                break;
            }
            acc += self.weights.weights[j];
            j = next;
            if j == end {
                return acc;
            }
        }
        acc + self.partial(j, y, depth)
    }

    /// `ρ'([x_j, y])` for `y` in interval `j`.
    fn partial(&self, j: usize, y: CirclePoint, depth: usize) -> f64 {
        let xj = self.partition.start(j);
        if y == xj {
            return 0.0;
        }
        if depth == 0 {
            let len = self.partition.arc_length(j);
            return self.weights.weights[j] * xj.offset_to(y).min(len) / len;
        }
        let image = self.generator_image(j, y);
        self.measure_in_image(self.image_start[j], self.image_end[j], image, depth - 1) / self.weights.lambda
    }

    /// `ρ'` of the arc from the first partition point to `x`.
    fn measure_from_start(&self, x: CirclePoint, depth: usize) -> f64 {
        let ox = self.partition.points[0].offset_to(x);
        let j = self.offsets.partition_point(|&o| o <= ox).saturating_sub(1);
        self.cumulative[j] + self.partial(j, x, depth)
    }

    /// `ψ(x) = -π + (ρ'([x_1, x]) - ρ'([x_1, -π])) mod 2π`.
    pub fn eval(&self, x: CirclePoint, depth: usize) -> Result<f64> {
        if depth > MAX_EVAL_DEPTH {
            return Err(Error::EvalDepthTooLarge(depth));
        }
        let mut r = (self.measure_from_start(x, depth) - self.anchor_measure).rem_euclid(TAU);
        // truncation can leave -π a hair below the anchor
        if TAU - r < 1e-11 {
            r -= TAU;
        }
        Ok(-PI + r)
    }

    /// Angle `x` with `ψ(x) = y`, by bisection on the monotone map.
    pub fn inverse(&self, y: f64, depth: usize) -> Result<CirclePoint> {
        let target = -PI + (y + PI).rem_euclid(TAU);
        let (mut lo, mut hi) = (-PI, PI);
        for _ in 0..INVERSE_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if self.eval(CirclePoint::new(mid), depth)? < target || mid == PI {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(CirclePoint::new(0.5 * (lo + hi)))
    }
}

/// Equally spaced grid `-π + 2πi/n`.
pub fn circle_grid(n: usize) -> Vec<CirclePoint> {
    (0..n).map(|i| CirclePoint::new(-PI + TAU * i as f64 / n as f64)).collect()
}

fn cyclic_diff(a: f64, b: f64) -> f64 {
    (b - a).rem_euclid(TAU)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SlopeProfile {
    pub max_deviation: f64,
    pub pairs: usize,
    /// Grid pairs skipped because they straddle a discontinuity.
    pub straddles: usize,
}

/// Maximum deviation from `λ` of the difference quotients
/// `(ψ(f b) - ψ(f a)) / (ψ(b) - ψ(a))` over adjacent grid points in one branch.
pub fn slope_profile(dynamics: &BoundaryMap<'_>, psi: &Conjugacy, grid_n: usize, depth: usize) -> Result<SlopeProfile> {
    if grid_n < 1000 {
        return Err(Error::InvalidArgument(format!("slope grid needs at least 1000 points, got {grid_n}")));
    }
    let grid = circle_grid(grid_n);
    let values = evaluate_all(psi, &grid, depth)?;
    let images: Vec<(CirclePoint, usize)> = grid.iter().map(|&x| dynamics.apply(x)).collect();
    let image_points: Vec<CirclePoint> = images.iter().map(|i| i.0).collect();
    let image_values = evaluate_all(psi, &image_points, depth)?;
    let lambda = psi.lambda();
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    let mut straddles = 0;
    for i in 0..grid_n {
        let j = (i + 1) % grid_n;
        if images[i].1 != images[j].1 {
            straddles += 1;
            continue;
        }
        let q = cyclic_diff(image_values[i], image_values[j]) / cyclic_diff(values[i], values[j]);
        worst = worst.max((q - lambda).abs());
        pairs += 1;
    }
    Ok(SlopeProfile {
        max_deviation: worst,
        pairs,
        straddles,
    })
}

fn evaluate_all(psi: &Conjugacy, xs: &[CirclePoint], depth: usize) -> Result<Vec<f64>> {
    xs.par_iter().map(|&x| psi.eval(x, depth)).collect()
}

/// `sup |ψ_1 - ψ_2|` over the grid, in the cyclic metric.
pub fn compare_conjugacies(psi1: &Conjugacy, psi2: &Conjugacy, grid_n: usize, depth: usize) -> Result<f64> {
    if psi1.anchor() != psi2.anchor() {
        return Err(Error::AnchorMismatch);
    }
    let grid = circle_grid(grid_n);
    let a = evaluate_all(psi1, &grid, depth)?;
    let b = evaluate_all(psi2, &grid, depth)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(&x, &y)| {
            let d = cyclic_diff(x, y);
            d.min(TAU - d)
        })
        .fold(0.0, f64::max))
}

/// Largest deviation from `λ` of `(ψ(T a') - ψ(T a)) / (ψ(a') - ψ(a))` over
/// `grid_n` equal steps of the arc from `start` to `end`.
pub fn linearity_on_arc(psi: &Conjugacy, t: &Moebius, start: CirclePoint, end: CirclePoint, grid_n: usize, depth: usize) -> Result<f64> {
    let len = start.offset_to(end);
    let xs: Vec<CirclePoint> = (0..=grid_n).map(|i| start.advance(len * i as f64 / grid_n as f64)).collect();
    let images: Vec<CirclePoint> = xs.iter().map(|&x| t.apply_circle(x)).collect();
    let a = evaluate_all(psi, &xs, depth)?;
    let b = evaluate_all(psi, &images, depth)?;
    let lambda = psi.lambda();
    Ok((0..grid_n)
        .map(|i| (cyclic_diff(b[i], b[i + 1]) / cyclic_diff(a[i], a[i + 1]) - lambda).abs())
        .fold(0.0, f64::max))
}

/// For each side `k`, the linearity deviation of `ψ ∘ T_k ∘ ψ⁻¹` on the
/// longer arc `[P_k, Q_{k+1}]`.
pub fn extended_linearity(psi: &Conjugacy, poly: &CanonicalPolygon, grid_n: usize, depth: usize) -> Result<Vec<f64>> {
    (0..poly.n())
        .map(|k| linearity_on_arc(psi, poly.generator(k), poly.p(k), poly.q(k + 1), grid_n, depth))
        .collect()
}

/// `sup |ψ(x + r) - ψ(x) - r|` over the grid.
pub fn rotation_defect(psi: &Conjugacy, rotation: f64, grid_n: usize, depth: usize) -> Result<f64> {
    let grid = circle_grid(grid_n);
    let rotated: Vec<CirclePoint> = grid.iter().map(|x| x.advance(rotation)).collect();
    let a = evaluate_all(psi, &grid, depth)?;
    let b = evaluate_all(psi, &rotated, depth)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(&x, &y)| {
            let d = (cyclic_diff(x, y) - rotation.rem_euclid(TAU)).abs();
            d.min(TAU - d)
        })
        .fold(0.0, f64::max))
}

/// One sample of the graphs of `f`, `ψ`, and `ℓ = ψ ∘ f ∘ ψ⁻¹` at the same `x`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GraphRow {
    pub x: f64,
    pub f: f64,
    pub psi: f64,
    pub ell: f64,
}

pub fn graph_rows(bm: &BoundaryMap<'_>, psi: &Conjugacy, samples: usize, depth: usize) -> Result<Vec<GraphRow>> {
    circle_grid(samples)
        .into_par_iter()
        .map(|x| {
            let f = bm.apply(x).0;
            let pre = psi.inverse(x.theta(), depth)?;
            let ell = psi.eval(bm.apply(pre).0, depth)?;
            Ok(GraphRow {
                x: x.theta(),
                f: f.theta(),
                psi: psi.eval(x, depth)?,
                ell,
            })
        })
        .collect()
}

/// CSV with side-by-side graphs of two maps sampled on the same grid.
pub fn graph_csv(labels: [&str; 2], a: &[GraphRow], b: &[GraphRow]) -> String {
    let [la, lb] = labels;
    let mut s = format!("x,f_{la},psi_{la},ell_{la},f_{lb},psi_{lb},ell_{lb}\n");
    for (r, q) in a.iter().zip(b) {
        s.push_str(&csv_row(&[r.x, r.f, r.psi, r.ell, q.f, q.psi, q.ell]));
        s.push('\n');
    }
    s
}

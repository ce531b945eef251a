//! The Liouville current `du dw / (2 - 2cos(u - w))` on oriented geodesics:
//! beam masses of segments, the mass of all geodesics crossing a polygon,
//! and sampled attractors of the natural extension.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundaryMap;
use crate::disk::{geodesic_through, hyperbolic_distance, nu_box, CirclePoint};
use crate::error::{Error, Result};
use crate::format::csv_row;
use crate::polygon::CanonicalPolygon;
use crate::quadrature::integrate;

pub const BEAM_TOL: f64 = 1e-10;
pub const BEAM_MAX_EVALS: usize = 1_000_000;

pub const ATTRACTOR_BINS: usize = 256;
/// Fraction trimmed from each end of a bin's sorted `u` offsets.
pub const ATTRACTOR_TRIM: f64 = 0.005;
/// Slack, as a fraction of a bin's `u` extent, for the self-consistency test.
pub const ATTRACTOR_SLACK: f64 = 0.01;
/// Relative agreement of `u` extents under which adjacent bins are merged.
const MERGE_TOL: f64 = 0.02;

/// `ν` of the oriented geodesics crossing the segment `[z1, z2]` from right
/// to left.
///
/// For each backward endpoint `u` on the arc the segment faces, the forward
/// endpoints sweep the arc between the geodesics through `z1` and `z2`, and
/// the inner `w` integral has the closed form `-½ cot((w - u)/2)`.
pub fn beam_measure(z1: Complex64, z2: Complex64) -> Result<f64> {
    let g = geodesic_through(z1, z2)?;
    let back = g.u.theta();
    let ahead = g.w.theta();
    let span = (back - ahead).rem_euclid(TAU);
    let mut failure = None;
    let integrand = |t: f64| -> f64 {
        let u = ahead + t;
        let base = Complex64::from_polar(1.0, u);
        let ends = geodesic_through(base, z1).and_then(|g1| Ok((g1.w.theta(), geodesic_through(base, z2)?.w.theta())));
        match ends {
            Ok((w1, w2)) => {
                let d1 = (w1 - u).rem_euclid(TAU);
                let d2 = (w2 - u).rem_euclid(TAU);
                0.5 * (1.0 / (0.5 * d1).tan() - 1.0 / (0.5 * d2).tan()).abs()
            }
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let q = integrate(integrand, 0.0, span, BEAM_TOL, BEAM_MAX_EVALS)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// `ν(Ω_geo)` as the sum of the beams of the polygon's sides.
pub fn omega_geo_measure(poly: &CanonicalPolygon) -> Result<f64> {
    let n = poly.n();
    let beams: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| beam_measure(poly.vertex(k), poly.vertex(k + 1)))
        .collect::<Result<_>>()?;
    Ok(beams.iter().sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct BeamRow {
    pub side: usize,
    pub beam: f64,
    pub length: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurrentReport {
    pub sides: Vec<BeamRow>,
    pub omega_geo: f64,
    pub perimeter: f64,
    pub gap: f64,
}

/// Side-by-side beam masses and side lengths.
pub fn current_report(poly: &CanonicalPolygon) -> Result<CurrentReport> {
    let sides: Vec<BeamRow> = (0..poly.n())
        .into_par_iter()
        .map(|k| {
            let (a, b) = (poly.vertex(k), poly.vertex(k + 1));
            Ok(BeamRow {
                side: k + 1,
                beam: beam_measure(a, b)?,
                length: hyperbolic_distance(a, b)?,
            })
        })
        .collect::<Result<_>>()?;
    let omega_geo = sides.iter().map(|r| r.beam).sum();
    let perimeter = poly.perimeter();
    Ok(CurrentReport {
        sides,
        omega_geo,
        perimeter,
        gap: omega_geo - perimeter,
    })
}

/// One bin of the fitted attractor: `w` in `[w_lo, w_hi]`, `u` in `[u_lo, u_hi]`.
#[derive(Clone, Debug, Serialize)]
pub struct Rectangle {
    pub branch: usize,
    pub w_lo: f64,
    pub w_hi: f64,
    pub u_lo: f64,
    pub u_hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractorReport {
    pub points: usize,
    pub seed: u64,
    pub rectangles: Vec<Rectangle>,
    /// Adjacent bins of one branch with matching `u` extents counted once.
    pub merged_rectangles: usize,
    pub empty_bins: usize,
    pub nu_mass: f64,
    pub perimeter: f64,
    pub relative_gap: f64,
    pub self_consistency: f64,
}

#[derive(Clone, Debug)]
pub struct AttractorCloud {
    pub points: Vec<(CirclePoint, CirclePoint)>,
    pub report: AttractorReport,
}

impl AttractorCloud {
    /// `u,w` per row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,w\n");
        for (u, w) in &self.points {
            s.push_str(&csv_row(&[u.theta(), w.theta()]));
            s.push('\n');
        }
        s
    }
}

struct BinFit {
    /// Start of the branch arc and its length.
    start: CirclePoint,
    len: f64,
    /// Reference for `u` offsets: the end of the branch arc.
    end: CirclePoint,
    ranges: Vec<Option<(f64, f64)>>,
}

impl BinFit {
    fn bin(&self, w: CirclePoint) -> usize {
        ((self.start.offset_to(w) / self.len * ATTRACTOR_BINS as f64) as usize).min(ATTRACTOR_BINS - 1)
    }
}

/// Samples the attractor of `F_A` from uniform random starts and fits one
/// `u` range per `w` bin on each branch arc. Exploratory.
pub fn attractor_cloud(bm: &BoundaryMap<'_>, n_seeds: usize, n_transient: usize, n_keep: usize, seed: u64) -> Result<AttractorCloud> {
    if n_seeds == 0 || n_seeds > 10_000 {
        return Err(Error::InvalidArgument(format!("seed count must be in 1..=10000, got {n_seeds}")));
    }
    if n_transient < 50 {
        return Err(Error::InvalidArgument(format!("at least 50 transient steps are needed, got {n_transient}")));
    }
    let runs: Vec<Vec<(CirclePoint, CirclePoint)>> = (0..n_seeds)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (mut u, mut w) = loop {
                let u = CirclePoint::new(rng.gen_range(-TAU / 2.0..TAU / 2.0));
                let w = CirclePoint::new(rng.gen_range(-TAU / 2.0..TAU / 2.0));
                if u.distance(w) > 1e-6 {
                    break (u, w);
                }
            };
            let mut kept = Vec::with_capacity(n_keep);
            for step in 0..n_transient + n_keep {
                (u, w) = bm.natural_extension(u, w)?;
                if step >= n_transient {
                    kept.push((u, w));
                }
            }
            Ok(kept)
        })
        .collect::<Result<_>>()?;
    let points: Vec<(CirclePoint, CirclePoint)> = runs.into_iter().flatten().collect();

    let n = bm.n();
    let mut samples: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); ATTRACTOR_BINS]; n];
    let mut fits: Vec<BinFit> = (0..n)
        .map(|k| BinFit {
            start: bm.a(k),
            len: bm.a(k).offset_to(bm.a(k + 1)),
            end: bm.a(k + 1),
            ranges: vec![None; ATTRACTOR_BINS],
        })
        .collect();
    for &(u, w) in &points {
        let k = bm.branch(w);
        let b = fits[k].bin(w);
        samples[k][b].push(fits[k].end.offset_to(u));
    }
    let mut rectangles = Vec::new();
    let mut empty_bins = 0;
    let mut merged = 0;
    let mut nu_mass = 0.0;
    for (k, fit) in fits.iter_mut().enumerate() {
        let mut previous: Option<(f64, f64)> = None;
        for (b, offs) in samples[k].iter_mut().enumerate() {
            if offs.is_empty() {
                empty_bins += 1;
                previous = None;
                continue;
            }
            offs.sort_by(f64::total_cmp);
            let cut = (offs.len() as f64 * ATTRACTOR_TRIM).floor() as usize;
            let (lo, hi) = (offs[cut], offs[offs.len() - 1 - cut]);
            fit.ranges[b] = Some((lo, hi));
            let w_lo = fit.start.advance(fit.len * b as f64 / ATTRACTOR_BINS as f64);
            let w_hi = fit.start.advance(fit.len * (b + 1) as f64 / ATTRACTOR_BINS as f64);
            // the u arc must stay clear of this bin's w arc
            let room = fit.end.offset_to(w_lo);
            let (u_lo, u_hi) = (fit.end.advance(lo), fit.end.advance(hi.min(room)));
            if hi.min(room) > lo {
                nu_mass += nu_box(w_lo, w_hi, u_lo, u_hi)?;
            }
            let tol = MERGE_TOL * (hi - lo);
            if !previous.is_some_and(|(pl, ph)| (pl - lo).abs() < tol && (ph - hi).abs() < tol) {
                merged += 1;
            }
            previous = Some((lo, hi));
            rectangles.push(Rectangle {
                branch: k + 1,
                w_lo: w_lo.theta(),
                w_hi: w_hi.theta(),
                u_lo: u_lo.theta(),
                u_hi: u_hi.theta(),
                count: offs.len(),
            });
        }
    }

    let inside = points
        .par_iter()
        .filter(|&&(u, w)| {
            let Ok((u2, w2)) = bm.natural_extension(u, w) else {
                return false;
            };
            let fit = &fits[bm.branch(w2)];
            match fit.ranges[fit.bin(w2)] {
                Some((lo, hi)) => {
                    let slack = ATTRACTOR_SLACK * (hi - lo);
                    let o = fit.end.offset_to(u2);
                    o >= lo - slack && o <= hi + slack
                }
                None => false,
            }
        })
        .count();
    let perimeter = bm.polygon().perimeter();
    let report = AttractorReport {
        points: points.len(),
        seed,
        rectangles,
        merged_rectangles: merged,
        empty_bins,
        nu_mass,
        perimeter,
        relative_gap: (nu_mass - perimeter).abs() / perimeter,
        self_consistency: inside as f64 / points.len().max(1) as f64,
    };
    Ok(AttractorCloud { points, report })
}

//! Maximal δ-separated subsets of SO(3).
//!
//! Nets are grown by greedy random packing: Haar samples are accepted when
//! they are at distance `≥ δ` from everything accepted so far. Pure
//! sampling slows down sharply near saturation, so the default
//! configuration finishes with a deterministic sweep that probes the
//! δ-sphere around every net point and inserts any probe that is still
//! uncovered. After the sweep the covering radius is `δ` up to holes
//! smaller than the probe spacing.

mod grid;
mod io;
mod kdtree;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{stream, BATCH};
use crate::so3::{angle_for_norm, haar_sample, quat_mul, Rotation, DIAMETER};

use self::grid::Grid;
use self::kdtree::KdTree;

pub use self::io::{load, save, FORMAT_VERSION};

/// Distances within this of the minimum count as ties in nearest queries.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Slack allowed on the separation invariant.
pub const SEPARATION_SLACK: f64 = 1e-12;

/// Number of probe directions per point in the saturation sweep.
const PROBE_DIRECTIONS: usize = 192;

/// Smallest angular cell radius the probe refinement descends to.
const PROBE_MIN_CELL: f64 = 0.02;

/// When to stop drawing Haar samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Stop after this many consecutive rejections.
    Fixed(u64),
    /// Stop after `max(floor, factor · |X|)` consecutive rejections, with
    /// `|X|` the current size.
    Adaptive { floor: u64, factor: u64 },
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule::Adaptive {
            floor: 1000,
            factor: 20,
        }
    }
}

impl StopRule {
    fn limit(&self, size: usize) -> u64 {
        match *self {
            StopRule::Fixed(n) => n,
            StopRule::Adaptive { floor, factor } => floor.max(factor * size as u64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetConfig {
    pub delta: f64,
    pub seed: u64,
    pub stop: StopRule,
    /// Run the probe sweep after sampling stops.
    pub saturate: bool,
}

impl NetConfig {
    /// Adaptive stopping followed by the saturation sweep.
    pub fn new(delta: f64, seed: u64) -> Self {
        NetConfig {
            delta,
            seed,
            stop: StopRule::default(),
            saturate: true,
        }
    }
}

/// A δ-separated set of rotations with a nearest-neighbour index.
#[derive(Debug, Clone)]
pub struct Net {
    delta: f64,
    seed: u64,
    points: Vec<Rotation>,
    index: KdTree,
}

/// Greedy random packing with a fixed consecutive-rejection budget and no
/// saturation sweep.
pub fn build_net(delta: f64, seed: u64, stop_rejections: u64) -> Result<Net> {
    Net::build(&NetConfig {
        delta,
        seed,
        stop: StopRule::Fixed(stop_rejections),
        saturate: false,
    })
}

impl Net {
    pub fn build(config: &NetConfig) -> Result<Net> {
        let delta = config.delta;
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::input(format!(
                "delta {delta} must be a positive number"
            )));
        }
        if let StopRule::Fixed(0) = config.stop {
            return Err(Error::input("stop_rejections must be at least 1"));
        }

        let mut grid = Grid::new(delta);
        let mut points: Vec<Rotation> = Vec::new();
        let mut rng = stream(config.seed, 0);
        let mut rejected = 0u64;
        while rejected < config.stop.limit(points.len()) || points.is_empty() {
            let g = haar_sample(&mut rng);
            if grid.conflicts(&g.quaternion()) {
                rejected += 1;
            } else {
                grid.insert(&g.quaternion());
                points.push(g);
                rejected = 0;
            }
        }

        if config.saturate {
            saturate(&mut grid, &mut points, delta, config.seed);
        }
        Ok(Net::from_parts(delta, config.seed, points))
    }

    /// Wraps an existing point list without checking separation.
    pub fn from_points(delta: f64, seed: u64, points: Vec<Rotation>) -> Result<Net> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::input(format!(
                "delta {delta} must be a positive number"
            )));
        }
        Ok(Net::from_parts(delta, seed, points))
    }

    fn from_parts(delta: f64, seed: u64, points: Vec<Rotation>) -> Net {
        let coords: Vec<[f64; 4]> = points.iter().map(Rotation::quaternion).collect();
        Net {
            delta,
            seed,
            index: KdTree::new(&coords),
            points,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Rotation] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Result<&Rotation> {
        self.points.get(i).ok_or_else(|| {
            Error::input(format!("net index {i} out of range (size {})", self.len()))
        })
    }

    /// Nearest net point to `g` and its distance; ties within
    /// [`TIE_TOLERANCE`] of the minimum go to the lowest index.
    pub fn nn_query(&self, g: &Rotation) -> Result<(usize, f64)> {
        self.index
            .nearest(&g.quaternion(), TIE_TOLERANCE)
            .ok_or_else(|| Error::State("nearest-neighbour query on an empty net".into()))
    }

    /// Linear-scan reference for [`Net::nn_query`] with the same tie rule.
    pub fn nn_query_linear(&self, g: &Rotation) -> Result<(usize, f64)> {
        nearest_linear(&self.points, g)
    }

    /// Indices of net points within `radius` of `g`, ascending.
    pub fn within(&self, g: &Rotation, radius: f64) -> Vec<usize> {
        self.index.within(&g.quaternion(), radius)
    }

    /// Pairs `(i, j)`, `i < j`, closer than `delta − SEPARATION_SLACK`.
    pub fn separation_violations(&self) -> Vec<(usize, usize)> {
        let limit = self.delta - SEPARATION_SLACK;
        let mut bad: Vec<(usize, usize)> = (0..self.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let p = self.points[i];
                self.within(&p, limit)
                    .into_iter()
                    .filter(move |&j| j > i && p.distance(&self.points[j]) < limit)
                    .map(move |j| (i, j))
            })
            .collect();
        bad.sort_unstable();
        bad
    }

    /// Smallest pairwise distance by exhaustive comparison, `None` for
    /// fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let pts = &self.points;
        (pts.len() >= 2).then(|| {
            (0..pts.len())
                .into_par_iter()
                .map(|i| {
                    pts[i + 1..]
                        .iter()
                        .map(|q| pts[i].distance(q))
                        .fold(f64::INFINITY, f64::min)
                })
                .reduce(|| f64::INFINITY, f64::min)
        })
    }
}

/// Reference nearest-point search by scanning every point.
pub fn nearest_linear(points: &[Rotation], g: &Rotation) -> Result<(usize, f64)> {
    if points.is_empty() {
        return Err(Error::State(
            "nearest-neighbour query on an empty net".into(),
        ));
    }
    let dists: Vec<f64> = points.iter().map(|p| p.distance(g)).collect();
    let best = dists.iter().copied().fold(f64::INFINITY, f64::min);
    let i = dists
        .iter()
        .position(|&d| d <= best + TIE_TOLERANCE)
        .unwrap();
    Ok((i, dists[i]))
}

/// Evenly spread directions on the unit 2-sphere (golden-angle spiral).
fn spiral_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Six unit vectors at angle `spread` around `u`, plus `u` itself.
fn hex_children(u: [f64; 3], spread: f64) -> [[f64; 3]; 7] {
    let helper = if u[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize3(cross(u, helper));
    let e2 = cross(u, e1);
    let (s, c) = spread.sin_cos();
    let mut out = [u; 7];
    for (k, slot) in out.iter_mut().skip(1).enumerate() {
        let (sa, ca) = (k as f64 * std::f64::consts::FRAC_PI_3).sin_cos();
        *slot = normalize3([
            c * u[0] + s * (ca * e1[0] + sa * e2[0]),
            c * u[1] + s * (ca * e1[1] + sa * e2[1]),
            c * u[2] + s * (ca * e1[2] + sa * e2[2]),
        ]);
    }
    out
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

/// Probes every point's δ-sphere and inserts uncovered probes, including
/// around points inserted by the sweep itself.
///
/// Every hole in the cover is bounded by pieces of δ-spheres, so it shows
/// up as an uncovered patch on some point's sphere. Probe directions start
/// on a spiral; a probe whose coverage margin is within half the
/// worst-case change across its direction cell is subdivided into seven
/// smaller cells, down to [`PROBE_MIN_CELL`] radians. Holes that survive
/// are far below what a 10⁶-sample covering check resolves.
fn saturate(grid: &mut Grid, points: &mut Vec<Rotation>, delta: f64, seed: u64) {
    let reach = delta * (1.0 + 1e-9);
    if reach >= DIAMETER {
        return;
    }
    let angle = angle_for_norm(reach);
    let (s, c) = (0.5 * angle).sin_cos();
    // turning the probe direction by φ moves the probe by at most 2√2·s·φ
    let lipschitz = 0.5 * DIAMETER * s;
    let directions = spiral_directions(PROBE_DIRECTIONS);
    let cell0 = 1.3 * (4.837 / PROBE_DIRECTIONS as f64).sqrt();
    let mut rng = stream(seed, 1);
    let mut stack: Vec<([f64; 3], f64)> = Vec::new();
    let mut i = 0;
    while i < points.len() {
        // random spin of the direction set per point, so probe patterns
        // of neighbouring points do not align
        let spin = haar_sample(&mut rng).matrix();
        let base = points[i].quaternion();
        stack.extend(directions.iter().rev().map(|u| {
            let v = [
                spin[0][0] * u[0] + spin[0][1] * u[1] + spin[0][2] * u[2],
                spin[1][0] * u[0] + spin[1][1] * u[1] + spin[1][2] * u[2],
                spin[2][0] * u[0] + spin[2][1] * u[1] + spin[2][2] * u[2],
            ];
            (v, cell0)
        }));
        while let Some((v, cell)) = stack.pop() {
            let probe = quat_mul(&base, &[c, s * v[0], s * v[1], s * v[2]]);
            let margin = grid.nearest_distance(&probe) - delta;
            if margin >= 0.0 {
                let r = Rotation::from_quaternion(probe).expect("unit probe");
                grid.insert(&r.quaternion());
                points.push(r);
            } else if cell > PROBE_MIN_CELL && margin > -lipschitz * cell {
                let child = 0.6 * cell;
                stack.extend(hex_children(v, child).into_iter().map(|u| (u, child)));
            }
        }
        i += 1;
    }
}

/// Result of a statistical covering test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverReport {
    pub samples: u64,
    pub max_gap: f64,
    pub pass: bool,
}

/// Draws `samples` Haar rotations and records the largest distance to the
/// net; passes iff that gap is at most `delta`.
pub fn covering_check(net: &Net, samples: u64, seed: u64) -> Result<CoverReport> {
    if samples == 0 {
        return Err(Error::input("covering check needs at least one sample"));
    }
    if net.is_empty() {
        return Err(Error::State("covering check on an empty net".into()));
    }
    let batches = samples.div_ceil(BATCH);
    let max_gap = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = BATCH.min(samples - b * BATCH);
            let mut rng = stream(seed, b);
            (0..n)
                .map(|_| {
                    let g = haar_sample(&mut rng);
                    net.nn_query(&g).map(|(_, d)| d).unwrap_or(f64::INFINITY)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(CoverReport {
        samples,
        max_gap,
        pass: max_gap <= net.delta(),
    })
}

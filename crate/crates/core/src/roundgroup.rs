//! The rounding operation `x ∘ y` (nearest net point to `xy`) and the
//! statistics attached to it: associativity rate, proximal bound, fiber
//! sizes and multiplicative-energy counts.
//!
//! Every estimator is a deterministic function of `(net, trials, seed)`;
//! trials are split into fixed batches with one random stream per batch.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::net::Net;
use crate::rng::{batched_collect, batched_count, Stream};
use crate::so3::{ball_measure, DIAMETER};
use crate::stats::OpTableStats;

/// Largest triple count enumerated by exhaustive associativity.
pub const EXHAUSTIVE_TRIPLES: u64 = 100_000_000;

/// Largest quadruple count enumerated by exhaustive energy counts.
pub const EXHAUSTIVE_QUADRUPLES: u64 = 10_000_000_000;

/// `x_i ∘ x_j`: the index of the net point nearest to `x_i · x_j`.
pub fn round_op(net: &Net, i: usize, j: usize) -> Result<usize> {
    let g = net.point(i)? * net.point(j)?;
    Ok(net.nn_query(&g)?.0)
}

fn pick(rng: &mut Stream, n: usize) -> usize {
    rng.random_range(0..n)
}

fn require_points(net: &Net) -> Result<usize> {
    if net.is_empty() {
        return Err(Error::State("operation on an empty net".into()));
    }
    Ok(net.len())
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    Ok(())
}

/// Full `n × n` table of `∘`, row-major.
pub fn op_table(net: &Net) -> Result<Vec<u32>> {
    let n = require_points(net)?;
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| round_op(net, i, j).map(|k| k as u32))
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// Proportion of triples with `(x_i ∘ x_j) ∘ x_k = x_i ∘ (x_j ∘ x_k)`.
///
/// With `exhaustive` set and `n³ ≤ EXHAUSTIVE_TRIPLES` every triple is
/// counted (`trials` is then `n³`); otherwise `trials` uniform triples are
/// sampled.
pub fn assoc_rate(net: &Net, trials: u64, seed: u64, exhaustive: bool) -> Result<OpTableStats> {
    let n = require_points(net)?;
    let triples = (n as u64).saturating_pow(3);
    if exhaustive && triples <= EXHAUSTIVE_TRIPLES {
        let table = op_table(net)?;
        let at = |i: usize, j: usize| table[i * n + j] as usize;
        let hits: u64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut h = 0u64;
                for j in 0..n {
                    let ij = at(i, j);
                    for k in 0..n {
                        if at(ij, k) == at(i, at(j, k)) {
                            h += 1;
                        }
                    }
                }
                h
            })
            .sum();
        return Ok(OpTableStats::new(triples, hits, seed));
    }
    require_trials(trials)?;
    let hits = batched_count(trials, seed, 0, |rng, count| {
        let mut h = 0;
        for _ in 0..count {
            let (i, j, k) = (pick(rng, n), pick(rng, n), pick(rng, n));
            let left = round_op(net, round_op(net, i, j).unwrap(), k).unwrap();
            let right = round_op(net, i, round_op(net, j, k).unwrap()).unwrap();
            h += u64::from(left == right);
        }
        h
    });
    Ok(OpTableStats::new(trials, hits, seed))
}

/// Outcome of checking `d(x ∘ y, xy) ≤ δ` on random pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximalReport {
    pub pairs: u64,
    pub violations: u64,
    pub max_distance: f64,
}

pub fn proximal_check(net: &Net, pairs: u64, seed: u64) -> Result<ProximalReport> {
    let n = require_points(net)?;
    require_trials(pairs)?;
    let dists = batched_collect(pairs, seed, 0, |rng, count| {
        (0..count)
            .map(|_| {
                let (i, j) = (pick(rng, n), pick(rng, n));
                let g = net.points()[i] * net.points()[j];
                net.nn_query(&g).unwrap().1
            })
            .collect()
    });
    let delta = net.delta();
    Ok(ProximalReport {
        pairs,
        violations: dists.iter().filter(|&&d| d > delta).count() as u64,
        max_distance: dists.iter().copied().fold(0.0, f64::max),
    })
}

/// Distribution of fiber sizes `|{y : x ∘ y = z}|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberProfile {
    pub trials: u64,
    /// `histogram[s]` counts sampled fibers of size `s`.
    pub histogram: Vec<u64>,
    pub max: usize,
}

/// Samples `(x, y)` uniformly, sets `z = x ∘ y`, and counts every `y'`
/// with `x ∘ y' = z`. Because `z` is reached through a product, sampled
/// fibers are never empty and larger fibers are drawn proportionally more
/// often.
///
/// Candidates are the net points within `δ` of `x⁻¹z`, which contains the
/// whole fiber whenever the net covers at radius `δ`.
pub fn cancellativity_profile(net: &Net, trials: u64, seed: u64) -> Result<FiberProfile> {
    let n = require_points(net)?;
    require_trials(trials)?;
    let delta = net.delta();
    let sizes = batched_collect(trials, seed, 0, |rng, count| {
        (0..count)
            .map(|_| {
                let (i, j) = (pick(rng, n), pick(rng, n));
                let z = round_op(net, i, j).unwrap();
                let target = net.points()[i].inverse() * net.points()[z];
                net.within(&target, delta)
                    .into_iter()
                    .filter(|&y| round_op(net, i, y).unwrap() == z)
                    .count()
            })
            .collect()
    });
    let max = sizes.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0u64; max + 1];
    for s in sizes {
        histogram[s] += 1;
    }
    Ok(FiberProfile {
        trials,
        histogram,
        max,
    })
}

/// Packing bound on fiber size: a fiber is δ-separated inside a δ-ball,
/// so it has at most `μ(N_{1.5δ}) / μ(N_{δ/2})` points.
pub fn fiber_packing_bound(delta: f64) -> Result<usize> {
    let outer = ball_measure((1.5 * delta).min(DIAMETER))?;
    let inner = ball_measure((0.5 * delta).min(DIAMETER))?;
    Ok((outer / inner).ceil() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyMode {
    /// Count `x_i ∘ x_j = x_k ∘ x_l`.
    Table,
    /// Count `d(x_i x_j, x_k x_l) ≤ eta`.
    Metric { eta: f64 },
}

impl EnergyMode {
    fn validate(&self) -> Result<()> {
        match *self {
            EnergyMode::Metric { eta } if !(eta.is_finite() && eta > 0.0) => Err(Error::input(
                format!("metric energy needs eta > 0, got {eta}"),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStats {
    pub mode: EnergyMode,
    pub stats: OpTableStats,
    /// `n · p̂`, so that the quadruple count is `n³` times this.
    pub normalized_energy: f64,
}

/// Monte Carlo estimate of the fraction of quadruples in the energy count.
pub fn energy_estimate(net: &Net, trials: u64, seed: u64, mode: EnergyMode) -> Result<EnergyStats> {
    let n = require_points(net)?;
    require_trials(trials)?;
    mode.validate()?;
    let pts = net.points();
    let hits = batched_count(trials, seed, 0, |rng, count| {
        let mut h = 0;
        for _ in 0..count {
            let (i, j, k, l) = (pick(rng, n), pick(rng, n), pick(rng, n), pick(rng, n));
            let hit = match mode {
                EnergyMode::Table => round_op(net, i, j).unwrap() == round_op(net, k, l).unwrap(),
                EnergyMode::Metric { eta } => (pts[i] * pts[j]).distance(&(pts[k] * pts[l])) <= eta,
            };
            h += u64::from(hit);
        }
        h
    });
    let stats = OpTableStats::new(trials, hits, seed);
    Ok(EnergyStats {
        mode,
        stats,
        normalized_energy: n as f64 * stats.rate,
    })
}

/// Exact quadruple fraction by enumeration. Table mode sums `r(a)²` over
/// the representation counts `r(a) = |{(i, j) : x_i ∘ x_j = a}|`; metric
/// mode compares all pairs of products.
pub fn energy_exhaustive(net: &Net, mode: EnergyMode) -> Result<f64> {
    let n = require_points(net)?;
    mode.validate()?;
    let quads = (n as u64).saturating_pow(4);
    if quads > EXHAUSTIVE_QUADRUPLES {
        return Err(Error::input(format!(
            "{n} points is too many for exhaustive quadruples"
        )));
    }
    let total = quads as f64;
    match mode {
        EnergyMode::Table => {
            let mut reps = vec![0u64; n];
            for a in op_table(net)? {
                reps[a as usize] += 1;
            }
            Ok(reps.iter().map(|r| (r * r) as f64).sum::<f64>() / total)
        }
        EnergyMode::Metric { eta } => {
            let pts = net.points();
            let products: Vec<_> = (0..n * n).map(|p| pts[p / n] * pts[p % n]).collect();
            let hits: u64 = products
                .par_iter()
                .map(|a| products.iter().filter(|b| a.distance(b) <= eta).count() as u64)
                .sum();
            Ok(hits as f64 / total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::build_net;
    use crate::so3::Rotation;

    fn single() -> Net {
        build_net(3.0, 5, 10).unwrap()
    }

    #[test]
    fn single_point_net_is_trivial() {
        let net = single();
        assert_eq!(net.len(), 1);
        assert_eq!(round_op(&net, 0, 0).unwrap(), 0);
        assert_eq!(assoc_rate(&net, 100, 1, false).unwrap().rate, 1.0);
        assert_eq!(assoc_rate(&net, 100, 1, true).unwrap().trials, 1);
        let prof = cancellativity_profile(&net, 50, 2).unwrap();
        assert_eq!(prof.histogram, vec![0, 50]);
        assert_eq!(
            energy_estimate(&net, 10, 0, EnergyMode::Table)
                .unwrap()
                .stats
                .rate,
            1.0
        );
    }

    #[test]
    fn identity_rounds_to_itself() {
        let pts = vec![
            Rotation::about_x(1.0),
            Rotation::IDENTITY,
            Rotation::about_z(2.0),
        ];
        let net = Net::from_points(0.5, 0, pts).unwrap();
        assert_eq!(round_op(&net, 1, 1).unwrap(), 1);
        assert!(round_op(&net, 3, 0).is_err());
    }

    #[test]
    fn metric_energy_at_diameter_is_one() {
        let net = build_net(1.2, 4, 200).unwrap();
        let e = energy_estimate(&net, 5000, 9, EnergyMode::Metric { eta: DIAMETER }).unwrap();
        assert_eq!(e.stats.rate, 1.0);
        assert!(energy_estimate(&net, 10, 9, EnergyMode::Metric { eta: 0.0 }).is_err());
    }

    #[test]
    fn assoc_is_deterministic_in_seed() {
        let net = build_net(0.9, 3, 500).unwrap();
        let a = assoc_rate(&net, 20_000, 17, false).unwrap();
        let b = assoc_rate(&net, 20_000, 17, false).unwrap();
        assert_eq!(a.hits, b.hits);
    }

    #[test]
    fn empty_net_is_a_state_error() {
        let net = Net::from_points(0.3, 0, Vec::new()).unwrap();
        assert!(matches!(
            assoc_rate(&net, 10, 0, false),
            Err(Error::State(_))
        ));
    }
}

//! Sampling experiment for the centralizer bound
//! `d(g, C(a)) · |a| ≤ C · |[a, g]|`.
//!
//! Pairs `(a, g)` are drawn from four strata: Haar pairs, small `a`,
//! `a` close to a half turn, and `g` close to the centralizer of `a`.
//! Each adversarial stratum has a width that [`Lemma51Config::scale`]
//! shrinks, so runs at scale 1 and 0.1 show whether the ratio grows as
//! the strata tighten.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{batched_collect, Stream};
use crate::so3::{
    angle_for_norm, commutator, dist_to_centralizer, haar_sample, random_axis, random_in_ball,
    Rotation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    Generic,
    SmallA,
    NearHalfTurn,
    NearCommuting,
}

impl Stratum {
    pub const ALL: [Stratum; 4] = [
        Stratum::Generic,
        Stratum::SmallA,
        Stratum::NearHalfTurn,
        Stratum::NearCommuting,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stratum::Generic => "generic",
            Stratum::SmallA => "small_a",
            Stratum::NearHalfTurn => "near_half_turn",
            Stratum::NearCommuting => "near_commuting",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma51Config {
    pub samples: u64,
    pub seed: u64,
    /// Multiplies every stratum width: `|a| ∈ [1e-3, 1e-2]·scale`, angle of
    /// `a` within `1e-3·scale` of π, `g` within `1e-3·scale` of `C(a)`.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma51Sample {
    pub stratum: Stratum,
    pub a_norm: f64,
    pub comm_norm: f64,
    pub dist: f64,
    /// `dist · |a| / |[a, g]|`; NaN when the pair commutes exactly.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma51Report {
    pub config: Lemma51Config,
    pub samples: Vec<Lemma51Sample>,
}

impl Lemma51Report {
    /// Largest finite ratio in a stratum, if any.
    pub fn max_ratio(&self, stratum: Stratum) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| s.stratum == stratum && s.ratio.is_finite())
            .map(|s| s.ratio)
            .reduce(f64::max)
    }

    /// Largest finite ratio over the whole run.
    pub fn overall_max(&self) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| s.ratio)
            .filter(|r| r.is_finite())
            .reduce(f64::max)
    }
}

fn rotation_about(axis: [f64; 3], angle: f64) -> Rotation {
    Rotation::from_axis_angle(axis, angle).unwrap_or(Rotation::IDENTITY)
}

fn draw(stratum: Stratum, scale: f64, rng: &mut Stream) -> (Rotation, Rotation) {
    match stratum {
        Stratum::Generic => (haar_sample(rng), haar_sample(rng)),
        Stratum::SmallA => {
            // log-uniform norm in [1e-3, 1e-2]·scale
            let norm = scale * 10f64.powf(-3.0 + rng.random::<f64>());
            let angle = angle_for_norm(norm);
            (rotation_about(random_axis(rng), angle), haar_sample(rng))
        }
        Stratum::NearHalfTurn => {
            let angle = PI - 1e-3 * scale * rng.random::<f64>();
            (rotation_about(random_axis(rng), angle), haar_sample(rng))
        }
        Stratum::NearCommuting => {
            let a = haar_sample(rng);
            let axis = a.axis().unwrap_or([0.0, 0.0, 1.0]);
            let on_circle = rotation_about(axis, 2.0 * PI * rng.random::<f64>());
            (a, on_circle * random_in_ball(rng, 1e-3 * scale))
        }
    }
}

fn measure(stratum: Stratum, a: Rotation, g: Rotation) -> Result<Lemma51Sample> {
    let a_norm = a.norm();
    let comm_norm = commutator(&a, &g).norm();
    let dist = dist_to_centralizer(&g, &a)?;
    let ratio = if comm_norm > 0.0 {
        dist * a_norm / comm_norm
    } else {
        f64::NAN
    };
    Ok(Lemma51Sample {
        stratum,
        a_norm,
        comm_norm,
        dist,
        ratio,
    })
}

/// Runs the experiment. Samples are split evenly across the strata (the
/// generic stratum takes the remainder); stratum `k` reads streams starting
/// at `k · 2³²`.
pub fn lemma51_experiment(config: &Lemma51Config) -> Result<Lemma51Report> {
    if config.samples < Stratum::ALL.len() as u64 {
        return Err(Error::input("need at least one sample per stratum"));
    }
    if !(config.scale > 0.0 && config.scale <= 1.0) {
        return Err(Error::input(format!(
            "scale must lie in (0, 1], got {}",
            config.scale
        )));
    }
    let per = config.samples / Stratum::ALL.len() as u64;
    let mut samples = Vec::with_capacity(config.samples as usize);
    for (k, stratum) in Stratum::ALL.into_iter().enumerate() {
        let count = if k == 0 {
            config.samples - per * 3
        } else {
            per
        };
        let rows = batched_collect(count, config.seed, (k as u64) << 32, |rng, n| {
            (0..n)
                .map(|_| {
                    let (a, g) = draw(stratum, config.scale, rng);
                    measure(stratum, a, g)
                })
                .collect()
        });
        for row in rows {
            samples.push(row?);
        }
    }
    Ok(Lemma51Report {
        config: *config,
        samples,
    })
}

/// A pair on which the bound fails: `a` a rotation by `π − eps` about the
/// z axis and `g` the half turn about the x axis. The ratio is
/// `√2 / sin(eps/2)`, unbounded as `eps → 0`.
pub fn half_turn_witness(eps: f64) -> (Rotation, Rotation) {
    (Rotation::about_z(PI - eps), Rotation::about_x(PI))
}

/// `√2 / sqrt(1 − x²y²)`: the exact ratio for `a = about_z(θ)`, `θ ≠ π`, and
/// any `g` whose Euler middle angle is `α`, with `x = |sin(θ/2)|`,
/// `y = |sin(α/2)|`.
pub fn ratio_closed_form(theta: f64, alpha: f64) -> f64 {
    let x = (0.5 * theta).sin().abs();
    let y = (0.5 * alpha).sin().abs();
    std::f64::consts::SQRT_2 / (1.0 - x * x * y * y).sqrt()
}

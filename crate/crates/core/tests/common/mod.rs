//! Matrix-level reference computations shared by the integration tests.
//! Nothing here goes through the quaternion code paths under test.
#![allow(dead_code)]

use std::f64::consts::PI;

pub type Mat = [[f64; 3]; 3];

pub const IDENTITY: Mat = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Rodrigues' formula.
pub fn rodrigues(axis: [f64; 3], angle: f64) -> Mat {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|c| c / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

pub fn transpose(a: &Mat) -> Mat {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[j][i];
        }
    }
    m
}

/// Frobenius norm of `a − b`.
pub fn frob_dist(a: &Mat, b: &Mat) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += (a[i][j] - b[i][j]).powi(2);
        }
    }
    s.sqrt()
}

pub fn frob_norm_general(a: &Mat) -> f64 {
    frob_dist(a, &[[0.0; 3]; 3])
}

/// `a⁻¹ g⁻¹ a g` on matrices.
pub fn commutator(a: &Mat, g: &Mat) -> Mat {
    mul(&mul(&transpose(a), &transpose(g)), &mul(a, g))
}

/// Grid minimum of `‖G − R‖` over the rotations commuting with a rotation
/// about `axis`: the circle about `axis`, plus the half turns about
/// perpendicular axes when `half_turn` is set.
pub fn centralizer_grid(g: &Mat, axis: [f64; 3], half_turn: bool, points: usize) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..points {
        let beta = 2.0 * PI * k as f64 / points as f64;
        best = best.min(frob_dist(g, &rodrigues(axis, beta)));
    }
    if half_turn {
        let helper = if axis[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let e1 = normalize(cross(axis, helper));
        let e2 = normalize(cross(axis, e1));
        for k in 0..points {
            let phi = PI * k as f64 / points as f64;
            let u = [0, 1, 2].map(|i| phi.cos() * e1[i] + phi.sin() * e2[i]);
            best = best.min(frob_dist(g, &rodrigues(u, PI)));
        }
    }
    best
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

/// Haar CDF of the rotation angle, `(θ − sin θ)/π`.
pub fn angle_cdf(theta: f64) -> f64 {
    (theta - theta.sin()) / PI
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Least-squares slope of `y` on `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

//! Rotation arithmetic on SO(3) through canonical unit quaternions.
//!
//! The metric throughout is the Frobenius distance between rotation
//! matrices, `d(g, h) = ‖g − h‖_F`, which ranges over `[0, 2√2]` and is
//! invariant under left and right multiplication. For unit quaternions
//! `p, q` it equals `2√2·sqrt(1 − ⟨p,q⟩²) = √2·|p − q|·|p + q|`; the
//! product form is used because it keeps full relative precision for
//! nearby rotations.
//!
//! Angles follow the active right-handed convention: `about_z(t)` rotates
//! the x-axis towards the y-axis.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;
use std::ops::Mul;

use rand::Rng;

use crate::error::{Error, Result};

/// Diameter of SO(3) in the Frobenius metric, `2^{3/2}`.
pub const DIAMETER: f64 = 2.0 * SQRT_2;

/// Components below this magnitude are treated as zero when fixing the
/// quaternion sign.
const CANON_EPS: f64 = 1e-12;

/// Angle within this distance of π selects the extra centralizer branch.
const HALF_TURN_EPS: f64 = 1e-9;

/// A rotation stored as a unit quaternion `(w, x, y, z)` with a fixed sign:
/// the first component whose magnitude exceeds `1e-12` is positive.
#[derive(Clone, Copy, PartialEq)]
pub struct Rotation {
    q: [f64; 4],
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [w, x, y, z] = self.q;
        write!(f, "Rotation({w:.17e}, {x:.17e}, {y:.17e}, {z:.17e})")
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        q: [1.0, 0.0, 0.0, 0.0],
    };

    /// Builds a rotation from any nonzero quaternion, normalizing and
    /// fixing the sign.
    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        let n = norm4(&q);
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::input(format!(
                "quaternion {q:?} cannot be normalized"
            )));
        }
        Ok(Self::normalized(q))
    }

    /// Accepts a quaternion that is already unit length (within `1e-12`)
    /// and canonically signed, keeping its components bit for bit.
    pub(crate) fn from_canonical(q: [f64; 4]) -> Option<Self> {
        let unit = (norm4(&q) - 1.0).abs() <= 1e-12;
        let lead = q.iter().copied().find(|c| c.abs() > CANON_EPS);
        (unit && q.iter().all(|c| c.is_finite()) && lead.is_some_and(|c| c > 0.0))
            .then_some(Rotation { q })
    }

    fn normalized(q: [f64; 4]) -> Self {
        let n = norm4(&q);
        let mut q = q.map(|c| c / n);
        let lead = q
            .iter()
            .copied()
            .find(|c| c.abs() > CANON_EPS)
            .unwrap_or(1.0);
        if lead < 0.0 {
            q = q.map(|c| -c);
        }
        Rotation { q }
    }

    /// Rotation by `angle` radians about the unit vector `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!(
                "axis {axis:?} is not a unit vector (norm {n})"
            )));
        }
        if !angle.is_finite() {
            return Err(Error::input("rotation angle must be finite"));
        }
        Ok(Self::axis_angle_unchecked(axis, angle))
    }

    fn axis_angle_unchecked(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        Self::normalized([c, s * axis[0], s * axis[1], s * axis[2]])
    }

    pub fn about_z(angle: f64) -> Self {
        Self::axis_angle_unchecked([0.0, 0.0, 1.0], angle)
    }

    pub fn about_x(angle: f64) -> Self {
        Self::axis_angle_unchecked([1.0, 0.0, 0.0], angle)
    }

    /// The canonical quaternion `[w, x, y, z]`.
    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Self::normalized(quat_mul(&self.q, &other.q))
    }

    pub fn inverse(&self) -> Rotation {
        let [w, x, y, z] = self.q;
        Self::normalized([w, -x, -y, -z])
    }

    /// `g^k` by repeated squaring.
    pub fn pow(&self, k: u32) -> Rotation {
        let mut result = Rotation::IDENTITY;
        let mut base = *self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        result
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let [w, x, y, z] = self.q;
        2.0 * (x * x + y * y + z * z).sqrt().atan2(w.abs())
    }

    /// Unit rotation axis, or `None` for the identity.
    pub fn axis(&self) -> Option<[f64; 3]> {
        let [_, x, y, z] = self.q;
        let s = (x * x + y * y + z * z).sqrt();
        (s > 0.0).then(|| [x / s, y / s, z / s])
    }

    /// The 3×3 rotation matrix (row-major).
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let [w, x, y, z] = self.q;
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    pub fn trace(&self) -> f64 {
        let w = self.q[0];
        4.0 * w * w - 1.0
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Rotation) -> f64 {
        quat_distance(&self.q, &other.q)
    }

    /// `|g| = d(g, 1)`.
    pub fn norm(&self) -> f64 {
        self.distance(&Rotation::IDENTITY)
    }

    /// Componentwise comparison of canonical quaternions.
    pub fn approx_eq(&self, other: &Rotation, tol: f64) -> bool {
        self.q
            .iter()
            .zip(other.q.iter())
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        self.compose(&rhs)
    }
}

impl<'a> Mul<&'a Rotation> for &'a Rotation {
    type Output = Rotation;

    fn mul(self, rhs: &Rotation) -> Rotation {
        self.compose(rhs)
    }
}

#[inline]
fn norm4(q: &[f64; 4]) -> f64 {
    (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt()
}

#[inline]
pub(crate) fn quat_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    let [aw, ax, ay, az] = *a;
    let [bw, bx, by, bz] = *b;
    [
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ]
}

/// Frobenius distance between the rotations of two unit quaternions.
#[inline]
pub(crate) fn quat_distance(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for k in 0..4 {
        let a = p[k] - q[k];
        let b = p[k] + q[k];
        minus += a * a;
        plus += b * b;
    }
    SQRT_2 * (minus * plus).sqrt()
}

/// Frobenius distance between rotations whose quaternions (nearer sign)
/// are at Euclidean distance `a ∈ [0, √2]`: `d = √2·a·sqrt(4 − a²)`.
#[inline]
pub fn chordal_to_frobenius(a: f64) -> f64 {
    let a = a.min(SQRT_2);
    SQRT_2 * a * (4.0 - a * a).max(0.0).sqrt()
}

/// Inverse of [`chordal_to_frobenius`]; returns a value above `√2` when
/// `d` reaches the diameter, meaning "every point".
#[inline]
pub fn frobenius_to_chordal(d: f64) -> f64 {
    if d >= DIAMETER {
        return f64::INFINITY;
    }
    let h = 0.5 * d * d;
    (h / (2.0 + (4.0 - h).max(0.0).sqrt())).sqrt()
}

/// Frobenius distance computed from the matrices directly.
pub fn matrix_distance(g: &Rotation, h: &Rotation) -> f64 {
    let (a, b) = (g.matrix(), h.matrix());
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let e = a[i][j] - b[i][j];
            s += e * e;
        }
    }
    s.sqrt()
}

/// `|g|` from the rotation angle, `2^{3/2}·|sin(θ/2)|`.
pub fn norm_from_angle(theta: f64) -> f64 {
    DIAMETER * (0.5 * theta).sin().abs()
}

/// Rotation angle whose Frobenius norm is `r`, clamped to `[0, π]`.
pub fn angle_for_norm(r: f64) -> f64 {
    2.0 * (r / DIAMETER).clamp(0.0, 1.0).asin()
}

/// Haar-distributed rotation (Shoemake's subgroup algorithm).
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let (s1, c1) = (TAU * u2).sin_cos();
    let (s2, c2) = (TAU * u3).sin_cos();
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    Rotation::normalized([b * c2, a * s1, a * c1, b * s2])
}

/// Uniform direction on the unit 2-sphere.
pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = TAU * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Random rotation with `|u| ≤ radius`: uniform axis, angle distributed as
/// in a small Euclidean ball of the tangent space.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Rotation {
    let max_angle = angle_for_norm(radius);
    let angle = max_angle * rng.random::<f64>().cbrt();
    Rotation::axis_angle_unchecked(random_axis(rng), angle)
}

/// Haar measure of the closed ball `N_r(1)`.
///
/// With `θ_r = 2·asin(r / 2√2)` this is `(θ_r − sin θ_r)/π`, the integral
/// of the angle density `(1 − cos θ)/π`.
pub fn ball_measure(r: f64) -> Result<f64> {
    if !(0.0..=DIAMETER + 1e-12).contains(&r) {
        return Err(Error::input(format!("ball radius {r} outside [0, 2√2]")));
    }
    let theta = angle_for_norm(r);
    Ok(((theta - theta.sin()) / PI).clamp(0.0, 1.0))
}

/// Proper Euler angles with `g = about_z(beta1)·about_x(alpha)·about_z(beta2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerZXZ {
    pub beta1: f64,
    pub alpha: f64,
    pub beta2: f64,
}

impl EulerZXZ {
    pub fn recompose(&self) -> Rotation {
        Rotation::about_z(self.beta1)
            * Rotation::about_x(self.alpha)
            * Rotation::about_z(self.beta2)
    }
}

fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Euler decomposition. When `alpha` is 0 or π the split between the two
/// z-rotations is not unique; all of it goes to `beta1` and `beta2 = 0`.
pub fn euler_decompose(g: &Rotation) -> EulerZXZ {
    // q = (c·cos σ, s·cos Δ, s·sin Δ, c·sin σ) with c, s the half-angle
    // cosine/sine of alpha, σ = (β1+β2)/2 and Δ = (β1−β2)/2.
    let [w, x, y, z] = g.q;
    let s = (x * x + y * y).sqrt();
    let c = (w * w + z * z).sqrt();
    let alpha = 2.0 * s.atan2(c);
    const DEGENERATE: f64 = 1e-14;
    if s <= DEGENERATE {
        let sigma = z.atan2(w);
        return EulerZXZ {
            beta1: wrap_angle(2.0 * sigma),
            alpha: 0.0,
            beta2: 0.0,
        };
    }
    if c <= DEGENERATE {
        let delta = y.atan2(x);
        return EulerZXZ {
            beta1: wrap_angle(2.0 * delta),
            alpha: PI,
            beta2: 0.0,
        };
    }
    let sigma = z.atan2(w);
    let delta = y.atan2(x);
    EulerZXZ {
        beta1: wrap_angle(sigma + delta),
        alpha,
        beta2: wrap_angle(sigma - delta),
    }
}

/// `a^g = g⁻¹ a g`.
pub fn conjugate(a: &Rotation, g: &Rotation) -> Rotation {
    g.inverse() * *a * *g
}

/// `[a, g] = a⁻¹ g⁻¹ a g`.
pub fn commutator(a: &Rotation, g: &Rotation) -> Rotation {
    a.inverse() * g.inverse() * *a * *g
}

/// Closed form of `|[about_z(theta), about_x(alpha)]|`:
/// `2^{5/2}·x·y·sqrt(1 − x²y²)` with `x = |sin(θ/2)|`, `y = |sin(α/2)|`.
pub fn commutator_rr_norm(theta: f64, alpha: f64) -> f64 {
    let x = (0.5 * theta).sin().abs();
    let y = (0.5 * alpha).sin().abs();
    let xy = x * y;
    4.0 * SQRT_2 * xy * (1.0 - xy * xy).max(0.0).sqrt()
}

/// Distance from `g` to the centralizer `C(a)`.
///
/// `C(a)` is the circle of rotations about the axis `n` of `a`; when `a`
/// is a half turn it also contains every half turn about an axis
/// perpendicular to `n`. With `c = |g_v × n|` (vector part of `g`'s
/// quaternion) the circle is at distance `2√2·c` and the perpendicular
/// half turns at `2√2·sqrt(1 − c²)`.
pub fn dist_to_centralizer(g: &Rotation, a: &Rotation) -> Result<f64> {
    if a.norm() <= 1e-9 {
        return Err(Error::input(
            "centralizer distance undefined for the identity (C(1) is all of SO(3))",
        ));
    }
    let n = a.axis().expect("non-identity rotation has an axis");
    let [_, gx, gy, gz] = g.q;
    let cross = [
        gy * n[2] - gz * n[1],
        gz * n[0] - gx * n[2],
        gx * n[1] - gy * n[0],
    ];
    let c = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2])
        .sqrt()
        .min(1.0);
    let circle = DIAMETER * c;
    if a.angle() >= PI - HALF_TURN_EPS {
        let flips = DIAMETER * (1.0 - c * c).max(0.0).sqrt();
        Ok(circle.min(flips))
    } else {
        Ok(circle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn axis_angle_examples() {
        let id = Rotation::from_axis_angle([0.6, 0.8, 0.0], 0.0).unwrap();
        assert!(id.approx_eq(&Rotation::IDENTITY, 1e-15));

        let m = Rotation::about_z(PI).matrix();
        let expected = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }

        let sum = Rotation::about_z(0.4) * Rotation::about_z(1.1);
        assert!(sum.approx_eq(&Rotation::about_z(1.5), 1e-12));

        assert!(Rotation::from_axis_angle([1.0, 1.0, 0.0], 0.3).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let mut rng = stream(1, 0);
        let g = haar_sample(&mut rng);
        assert!((g * g.inverse()).approx_eq(&Rotation::IDENTITY, 1e-12));
        assert!((Rotation::IDENTITY * g).approx_eq(&g, 1e-15));
        let half = Rotation::about_z(FRAC_PI_2);
        assert!((half * half).approx_eq(&Rotation::about_z(PI), 1e-12));
    }

    #[test]
    fn distance_examples() {
        let g = Rotation::about_x(0.7);
        assert_eq!(g.distance(&g), 0.0);
        assert!((Rotation::about_z(PI).norm() - DIAMETER).abs() < 1e-12);
        assert!(
            (Rotation::about_z(FRAC_PI_2).distance(&Rotation::about_z(PI)) - 2.0).abs() < 1e-12
        );
        assert!((Rotation::about_z(2.0 * PI / 3.0).norm() - 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(Rotation::IDENTITY.norm(), 0.0);
    }

    #[test]
    fn chordal_conversions_invert() {
        for k in 0..=100 {
            let d = DIAMETER * k as f64 / 100.0 * 0.999;
            let a = frobenius_to_chordal(d);
            assert!((chordal_to_frobenius(a) - d).abs() < 1e-12, "d = {d}");
        }
        assert!(frobenius_to_chordal(DIAMETER).is_infinite());
    }

    #[test]
    fn ball_measure_endpoints_and_range() {
        assert_eq!(ball_measure(0.0).unwrap(), 0.0);
        assert!((ball_measure(DIAMETER).unwrap() - 1.0).abs() < 1e-15);
        assert!(ball_measure(-0.1).is_err());
        assert!(ball_measure(3.0).is_err());
    }

    #[test]
    fn euler_examples() {
        let e = euler_decompose(&Rotation::about_z(0.3));
        assert!((e.beta1 - 0.3).abs() < 1e-12 && e.alpha == 0.0 && e.beta2 == 0.0);

        let e = euler_decompose(&Rotation::about_x(1.0));
        assert!(e.beta1.abs() < 1e-12 && (e.alpha - 1.0).abs() < 1e-12 && e.beta2.abs() < 1e-12);

        let e = euler_decompose(&Rotation::about_x(PI));
        assert_eq!(e.alpha, PI);
        assert_eq!(e.beta2, 0.0);
        assert!(e.recompose().distance(&Rotation::about_x(PI)) < 1e-10);
    }

    #[test]
    fn commutator_examples() {
        let a = Rotation::about_x(0.9);
        assert!(commutator(&a, &a).norm() < 1e-12);
        assert!(commutator(&Rotation::about_z(0.3), &Rotation::about_z(2.0)).norm() < 1e-12);
        assert!(commutator(&Rotation::about_z(PI), &Rotation::about_x(PI)).norm() < 1e-12);
        assert_eq!(commutator_rr_norm(0.0, 1.3), 0.0);
        assert!(commutator_rr_norm(PI, PI).abs() < 1e-12);
        let direct =
            commutator(&Rotation::about_z(FRAC_PI_2), &Rotation::about_x(FRAC_PI_2)).norm();
        assert!((commutator_rr_norm(FRAC_PI_2, FRAC_PI_2) - direct).abs() < 1e-10);
    }

    #[test]
    fn conjugate_is_inverse_sandwich() {
        let mut rng = stream(2, 0);
        let (a, g) = (haar_sample(&mut rng), haar_sample(&mut rng));
        let c = conjugate(&a, &g);
        assert!((g * c * g.inverse()).approx_eq(&a, 1e-12));
    }

    #[test]
    fn centralizer_distance_basics() {
        let a = Rotation::about_z(FRAC_PI_2);
        assert!(dist_to_centralizer(&Rotation::about_z(2.0), &a).unwrap() < 1e-12);
        assert!(dist_to_centralizer(&Rotation::about_x(0.3), &Rotation::IDENTITY).is_err());
        // a half turn commutes with perpendicular half turns
        let flip = Rotation::about_z(PI);
        assert!(dist_to_centralizer(&Rotation::about_x(PI), &flip).unwrap() < 1e-12);
        // ... but a rotation merely near a half turn does not
        let near = Rotation::about_z(PI - 1e-3);
        assert!(
            (dist_to_centralizer(&Rotation::about_x(PI), &near).unwrap() - DIAMETER).abs() < 1e-12
        );
    }

    #[test]
    fn pow_matches_repeated_product() {
        let g = Rotation::about_x(0.37);
        let mut p = Rotation::IDENTITY;
        for _ in 0..13 {
            p = p * g;
        }
        assert!(g.pow(13).approx_eq(&p, 1e-12));
        assert!(g.pow(0).approx_eq(&Rotation::IDENTITY, 0.0));
    }
}

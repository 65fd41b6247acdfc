//! Maps from a finite group into SO(3), their cocycles, and correction of
//! near-homomorphisms to genuine ones by iterated averaging.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::FiniteSubgroup;
use crate::rng::stream;
use crate::so3::{haar_sample, random_in_ball, Rotation};

/// Averages whose length falls below this fraction of the summand count
/// are treated as degenerate.
pub const DEGENERATE_MEAN: f64 = 1e-9;

/// One rotation per element of a finite group, addressed by table index.
#[derive(Debug, Clone)]
pub struct NearHom {
    group: Arc<FiniteSubgroup>,
    values: Vec<Rotation>,
    defect: f64,
}

impl NearHom {
    pub fn new(group: Arc<FiniteSubgroup>, values: Vec<Rotation>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::input(format!(
                "{} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        let defect = compute_defect(&group, &values);
        Ok(NearHom {
            group,
            values,
            defect,
        })
    }

    /// The group's own realization in SO(3), a genuine homomorphism.
    pub fn inclusion(group: Arc<FiniteSubgroup>) -> Self {
        let values = group.elements().to_vec();
        NearHom::new(group, values).unwrap()
    }

    pub fn constant(group: Arc<FiniteSubgroup>, c: Rotation) -> Self {
        let values = vec![c; group.order()];
        NearHom::new(group, values).unwrap()
    }

    /// Independent Haar values, far from any homomorphism.
    pub fn random(group: Arc<FiniteSubgroup>, seed: u64) -> Self {
        let mut rng = stream(seed, 0);
        let values = (0..group.order()).map(|_| haar_sample(&mut rng)).collect();
        NearHom::new(group, values).unwrap()
    }

    pub fn group(&self) -> &Arc<FiniteSubgroup> {
        &self.group
    }

    pub fn values(&self) -> &[Rotation] {
        &self.values
    }

    pub fn value(&self, x: usize) -> Result<Rotation> {
        self.values.get(x).copied().ok_or_else(|| {
            Error::input(format!(
                "element {x} outside group of order {}",
                self.values.len()
            ))
        })
    }

    /// `max_{x,y} |∂φ(x, y)|`.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    fn check(&self, x: usize) -> Result<()> {
        self.value(x).map(|_| ())
    }
}

fn cocycle_raw(group: &FiniteSubgroup, values: &[Rotation], x: usize, y: usize) -> Rotation {
    values[y].inverse() * values[x].inverse() * values[group.mul(x, y)]
}

fn compute_defect(group: &FiniteSubgroup, values: &[Rotation]) -> f64 {
    let n = group.order();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| cocycle_raw(group, values, x, y).norm())
        .fold(0.0, f64::max)
}

/// `∂φ(x, y) = φ(y)⁻¹ φ(x)⁻¹ φ(xy)`.
pub fn cocycle(phi: &NearHom, x: usize, y: usize) -> Result<Rotation> {
    phi.check(x)?;
    phi.check(y)?;
    Ok(cocycle_raw(&phi.group, &phi.values, x, y))
}

/// Distance between `φ(z)⁻¹ a φ(z)` and `∂φ(y,z) ∂φ(x,yz) ∂φ(xy,z)⁻¹`
/// where `a = ∂φ(x, y)`. Zero up to rounding for every map.
pub fn cocycle_identity_residual(phi: &NearHom, x: usize, y: usize, z: usize) -> Result<f64> {
    phi.check(z)?;
    let g = &phi.group;
    let a = cocycle(phi, x, y)?;
    let pz = phi.values[z];
    let lhs = pz.inverse() * a * pz;
    let rhs = cocycle(phi, y, z)?
        * cocycle(phi, x, g.mul(y, z))?
        * cocycle(phi, g.mul(x, y), z)?.inverse();
    Ok(lhs.distance(&rhs))
}

/// Largest residual over all triples.
pub fn max_cocycle_identity_residual(phi: &NearHom) -> f64 {
    let n = phi.group.order();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let mut worst: f64 = 0.0;
            for y in 0..n {
                for z in 0..n {
                    worst = worst.max(cocycle_identity_residual(phi, x, y, z).unwrap());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Left-multiplies every value by an independent rotation of norm at most
/// `delta`. The defect of the result is at most `defect(rho) + 3·delta`.
pub fn perturb_hom(rho: &NearHom, delta: f64, seed: u64) -> Result<NearHom> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::input(format!(
            "delta must be finite and nonnegative, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(rho.clone());
    }
    let mut rng = stream(seed, 0);
    let values = rho
        .values
        .iter()
        .map(|v| random_in_ball(&mut rng, delta) * *v)
        .collect();
    NearHom::new(rho.group.clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub defect: f64,
    /// `max_h d(φ_k(h), φ_0(h))`.
    pub sup_dist: f64,
}

#[derive(Debug, Clone)]
pub struct Correction {
    pub phi: NearHom,
    pub sup_dist: f64,
    pub converged: bool,
    /// Iteration 0 is the input.
    pub history: Vec<IterationRecord>,
    /// Iterations whose defect did not drop below the previous one.
    pub non_decreasing: Vec<usize>,
}

fn average_step(phi: &NearHom) -> Result<Vec<Rotation>> {
    let g = &phi.group;
    let n = g.order();
    let v = &phi.values;
    let means: Vec<Option<Rotation>> = (0..n)
        .into_par_iter()
        .map(|h| {
            let reference = v[h].quaternion();
            let mut sum = [0.0; 4];
            for k in 0..n {
                let q = (v[g.mul(h, k)] * v[k].inverse()).quaternion();
                let dot: f64 = q.iter().zip(&reference).map(|(a, b)| a * b).sum();
                let sign = if dot < 0.0 { -1.0 } else { 1.0 };
                for c in 0..4 {
                    sum[c] += sign * q[c];
                }
            }
            let len = sum.iter().map(|c| c * c).sum::<f64>().sqrt();
            (len > DEGENERATE_MEAN * n as f64).then(|| Rotation::from_quaternion(sum).unwrap())
        })
        .collect();
    let bad: Vec<usize> = means
        .iter()
        .enumerate()
        .filter(|(_, m)| m.is_none())
        .map(|(h, _)| h)
        .collect();
    if !bad.is_empty() {
        return Err(Error::DegenerateMean { elements: bad });
    }
    Ok(means.into_iter().flatten().collect())
}

/// Iterates `φ(h) ← mean_g φ(hg) φ(g)⁻¹` until the defect is at most `tol`
/// or `max_iter` steps have run. Non-convergence is reported through
/// `converged`, not as an error.
pub fn correct(phi: &NearHom, tol: f64, max_iter: usize) -> Result<Correction> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::input(format!("tol must be positive, got {tol}")));
    }
    let sup = |cur: &NearHom| {
        cur.values
            .iter()
            .zip(&phi.values)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    };
    let mut current = phi.clone();
    let mut history = vec![IterationRecord {
        iter: 0,
        defect: current.defect,
        sup_dist: 0.0,
    }];
    let mut non_decreasing = Vec::new();
    let mut iter = 0;
    while current.defect > tol && iter < max_iter {
        iter += 1;
        let values = average_step(&current)?;
        let next = NearHom::new(phi.group.clone(), values)?;
        if next.defect >= current.defect {
            non_decreasing.push(iter);
        }
        current = next;
        history.push(IterationRecord {
            iter,
            defect: current.defect,
            sup_dist: sup(&current),
        });
    }
    Ok(Correction {
        sup_dist: sup(&current),
        converged: current.defect <= tol,
        phi: current,
        history,
        non_decreasing,
    })
}

//! Formal words in generators `t_0, t_1, …` and their evaluation on
//! rotations.
//!
//! Words are kept fully expanded and are never freely reduced, so lengths
//! count letters exactly as written: `[u, v] = u⁻¹v⁻¹uv` has length
//! `2(|u| + |v|)` even when letters could cancel.

use std::fmt;
use std::ops::Mul;

use rand::Rng;

use crate::error::{Error, Result};
use crate::groups::FiniteSubgroup;
use crate::rng::{batched_collect, stream};
use crate::so3::{haar_sample, random_in_ball, Rotation, DIAMETER};

/// A generator raised to `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: u8,
    pub inverse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<Letter>,
    arity: usize,
}

impl Word {
    pub fn identity(arity: usize) -> Word {
        Word {
            letters: Vec::new(),
            arity,
        }
    }

    pub fn generator(generator: u8, arity: usize) -> Result<Word> {
        if generator as usize >= arity {
            return Err(Error::input(format!(
                "generator {generator} outside arity {arity}"
            )));
        }
        Ok(Word {
            letters: vec![Letter {
                generator,
                inverse: false,
            }],
            arity,
        })
    }

    /// The generators `t_0, …, t_{arity−1}` as one-letter words.
    pub fn generators(arity: usize) -> Vec<Word> {
        (0..arity)
            .map(|g| Word::generator(g as u8, arity).unwrap())
            .collect()
    }

    pub fn from_letters(letters: Vec<Letter>, arity: usize) -> Result<Word> {
        if let Some(l) = letters.iter().find(|l| l.generator as usize >= arity) {
            return Err(Error::input(format!(
                "generator {} outside arity {arity}",
                l.generator
            )));
        }
        Ok(Word { letters, arity })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter {
                    generator: l.generator,
                    inverse: !l.inverse,
                })
                .collect(),
            arity: self.arity,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word {
            letters,
            arity: self.arity.max(other.arity),
        }
    }

    pub fn pow(&self, k: usize) -> Word {
        Word {
            letters: self.letters.repeat(k),
            arity: self.arity,
        }
    }

    /// `self^by = by⁻¹ · self · by`.
    pub fn conjugate_by(&self, by: &Word) -> Word {
        by.inverse().concat(self).concat(by)
    }

    /// `[self, other] = self⁻¹ · other⁻¹ · self · other`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse()
            .concat(&other.inverse())
            .concat(self)
            .concat(other)
    }

    /// Replaces generator `g` by `images[g]` (inverted for inverse letters).
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        if images.len() != self.arity {
            return Err(Error::input(format!(
                "substitution needs {} images, got {}",
                self.arity,
                images.len()
            )));
        }
        let inverses: Vec<Word> = images.iter().map(Word::inverse).collect();
        let arity = images.iter().map(Word::arity).max().unwrap_or(0);
        let mut letters = Vec::new();
        for l in &self.letters {
            let src = if l.inverse { &inverses } else { images };
            letters.extend_from_slice(&src[l.generator as usize].letters);
        }
        Ok(Word { letters, arity })
    }

    /// Left-to-right product of the assigned rotations, renormalized after
    /// every letter.
    pub fn eval(&self, assignment: &[Rotation]) -> Result<Rotation> {
        if assignment.len() != self.arity {
            return Err(Error::input(format!(
                "word of arity {} evaluated on {} rotations",
                self.arity,
                assignment.len()
            )));
        }
        let inverses: Vec<Rotation> = assignment.iter().map(Rotation::inverse).collect();
        Ok(self.letters.iter().fold(Rotation::IDENTITY, |acc, l| {
            let g = if l.inverse {
                &inverses[l.generator as usize]
            } else {
                &assignment[l.generator as usize]
            };
            acc.compose(g)
        }))
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let name = if self.arity <= 26 {
                ((b'a' + l.generator) as char).to_string()
            } else {
                format!("t{}", l.generator)
            };
            write!(f, "{name}{}", if l.inverse { "⁻¹" } else { "" })?;
        }
        Ok(())
    }
}

/// Largest supported commutator depth.
pub const MAX_DEPTH: u32 = 8;

/// `w_1 = [a, b]`, `w_{s+1} = [a, w_s]`, of length `3·2^s − 2`.
pub fn commutator_word(s: u32) -> Result<Word> {
    if !(1..=MAX_DEPTH).contains(&s) {
        return Err(Error::input(format!(
            "commutator depth {s} outside 1..={MAX_DEPTH}"
        )));
    }
    let gens = Word::generators(2);
    let (a, b) = (&gens[0], &gens[1]);
    let mut w = a.commutator(b);
    for _ in 1..s {
        w = a.commutator(&w);
    }
    Ok(w)
}

/// `3·2^s − 2`.
pub fn commutator_word_length(s: u32) -> usize {
    3 * (1usize << s) - 2
}

/// Exponent in `w_*(a, b) = [[a,b]^b, [a,b]]^60`; every element order of
/// the tetrahedral, octahedral and icosahedral groups divides 60.
pub const W_STAR_EXPONENT: usize = 60;

/// The core `[[a,b]^b, [a,b]]` of the universal word.
pub fn w_star_core() -> Word {
    let gens = Word::generators(2);
    let c = gens[0].commutator(&gens[1]);
    c.conjugate_by(&gens[1]).commutator(&c)
}

/// `w_*(a, b) = [[a,b]^b, [a,b]]^60`.
pub fn w_star_word() -> Word {
    w_star_core().pow(W_STAR_EXPONENT)
}

/// `w̃_s(t_1, t_2, t_3, t_4) = w_s(t_1 t_2⁻¹, t_3 t_4⁻¹)`.
pub fn tilde_commutator_word(s: u32) -> Result<Word> {
    let t = Word::generators(4);
    let images = [t[0].concat(&t[1].inverse()), t[2].concat(&t[3].inverse())];
    commutator_word(s)?.substitute(&images)
}

/// The eight-variable word `w_*(w̃_s(t_1..t_4), w̃_s(t_5..t_8))`.
pub fn eight_variable_word(s: u32) -> Result<Word> {
    let tilde = tilde_commutator_word(s)?;
    let t = Word::generators(8);
    let first = tilde.substitute(&t[0..4])?;
    let second = tilde.substitute(&t[4..8])?;
    w_star_word().substitute(&[first, second])
}

/// Evaluates the eight-variable word by composing the evaluations of its
/// pieces; the same map as `eight_variable_word(s).eval(ys)` at a fraction
/// of the products.
pub fn eval_eight_variable(s: u32, ys: &[Rotation; 8]) -> Result<Rotation> {
    eval_eight_with(&commutator_word(s)?, &w_star_word(), ys)
}

fn eval_eight_with(ws: &Word, wstar: &Word, ys: &[Rotation; 8]) -> Result<Rotation> {
    let tilde = |t: &[Rotation]| ws.eval(&[t[0] * t[1].inverse(), t[2] * t[3].inverse()]);
    let u = tilde(&ys[0..4])?;
    let v = tilde(&ys[4..8])?;
    wstar.eval(&[u, v])
}

/// Largest observed `d(w(x), w(y)) / (ℓ(w) · max_i d(x_i, y_i))` over
/// Haar assignments `x` and perturbations `y_i = x_i u_i` with
/// `|u_i| ≤ perturbation`. The empty word reports 0.
pub fn lipschitz_check(w: &Word, trials: u64, seed: u64, perturbation: f64) -> Result<f64> {
    if !(perturbation.is_finite() && perturbation > 0.0) {
        return Err(Error::input(format!(
            "perturbation must be positive, got {perturbation}"
        )));
    }
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    if w.is_empty() {
        return Ok(0.0);
    }
    let len = w.len() as f64;
    let ratios = batched_collect(trials, seed, 0, |rng, count| {
        (0..count)
            .map(|_| {
                let xs: Vec<Rotation> = (0..w.arity()).map(|_| haar_sample(rng)).collect();
                let ys: Vec<Rotation> = xs
                    .iter()
                    .map(|x| *x * random_in_ball(rng, perturbation))
                    .collect();
                let moved = xs
                    .iter()
                    .zip(&ys)
                    .map(|(x, y)| x.distance(y))
                    .fold(0.0, f64::max);
                if moved == 0.0 {
                    return 0.0;
                }
                let out = w.eval(&xs).unwrap().distance(&w.eval(&ys).unwrap());
                out / (len * moved)
            })
            .collect()
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Pair count above which [`verify_word_on_group`] samples instead of
/// enumerating.
pub const EXHAUSTIVE_PAIRS: usize = 10_000;

/// Stream seed for sampled group verification.
const VERIFY_SEED: u64 = 0x5eed;

/// Largest `|w(g, h)|` over pairs of group elements: all pairs when
/// `exhaustive` is set and `|G|² ≤ 10⁴`, otherwise 10⁴ sampled pairs.
pub fn verify_word_on_group(w: &Word, group: &FiniteSubgroup, exhaustive: bool) -> Result<f64> {
    if w.arity() != 2 {
        return Err(Error::input(format!(
            "expected a two-letter-alphabet word, arity {}",
            w.arity()
        )));
    }
    let els = group.elements();
    let n = els.len();
    let norm = |i: usize, j: usize| w.eval(&[els[i], els[j]]).map(|r| r.norm());
    if exhaustive && n * n <= EXHAUSTIVE_PAIRS {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(norm(i, j)?);
            }
        }
        return Ok(worst);
    }
    let mut rng = stream(VERIFY_SEED, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..EXHAUSTIVE_PAIRS {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        worst = worst.max(norm(i, j)?);
    }
    Ok(worst)
}

/// One row of the empirical distribution of `|w(y_1, …, y_8)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub eta: f64,
    pub hits: u64,
    pub p_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityTable {
    pub s: u32,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<CdfPoint>,
}

/// Empirical `P(|w(y_1, …, y_8)| ≤ η)` over Haar 8-tuples for each `η` in
/// `etas` (ascending), with `w` the eight-variable word at depth `s`.
pub fn genericity_scan(s: u32, etas: &[f64], samples: u64, seed: u64) -> Result<GenericityTable> {
    if !(1..=2).contains(&s) {
        return Err(Error::input(format!(
            "genericity scan supports s in {{1, 2}}, got {s}"
        )));
    }
    if samples == 0 {
        return Err(Error::input("samples must be at least 1"));
    }
    if etas.iter().any(|e| !e.is_finite()) || etas.windows(2).any(|p| p[0] > p[1]) {
        return Err(Error::input("etas must be finite and sorted ascending"));
    }
    let ws = commutator_word(s)?;
    let wstar = w_star_word();
    let norms = batched_collect(samples, seed, 0, |rng, count| {
        (0..count)
            .map(|_| {
                let ys: [Rotation; 8] = std::array::from_fn(|_| haar_sample(rng));
                eval_eight_with(&ws, &wstar, &ys).unwrap().norm()
            })
            .collect()
    });
    let rows = etas
        .iter()
        .map(|&eta| {
            // the diameter bound holds exactly; guard against rounding above it
            let hits = if eta >= DIAMETER {
                samples
            } else {
                norms.iter().filter(|&&v| v <= eta).count() as u64
            };
            CdfPoint {
                eta,
                hits,
                p_hat: hits as f64 / samples as f64,
            }
        })
        .collect();
    Ok(GenericityTable {
        s,
        samples,
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupKind;
    use crate::so3::commutator_rr_norm;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn commutator_word_examples() {
        let w1 = commutator_word(1).unwrap();
        assert_eq!(w1.to_string(), "a⁻¹ b⁻¹ a b");
        assert_eq!(commutator_word(2).unwrap().len(), 10);
        assert_eq!(commutator_word(3).unwrap().len(), 22);
        assert!(commutator_word(0).is_err());
        assert!(commutator_word(9).is_err());
    }

    #[test]
    fn w_star_lengths() {
        assert_eq!(w_star_core().len(), 20);
        assert_eq!(w_star_word().len(), 1200);
        assert_eq!(tilde_commutator_word(1).unwrap().len(), 8);
        assert_eq!(eight_variable_word(1).unwrap().len(), 1200 * 8);
        assert_eq!(eight_variable_word(2).unwrap().len(), 1200 * 20);
    }

    #[test]
    fn eval_examples() {
        let w = commutator_word(1).unwrap();
        assert!(w.eval(&[Rotation::IDENTITY; 2]).unwrap().norm() < 1e-15);
        let same_axis = w
            .eval(&[Rotation::about_z(0.4), Rotation::about_z(2.2)])
            .unwrap();
        assert!(same_axis.norm() < 1e-12);
        let v = w
            .eval(&[Rotation::about_z(FRAC_PI_2), Rotation::about_x(FRAC_PI_2)])
            .unwrap();
        assert!((v.norm() - commutator_rr_norm(FRAC_PI_2, FRAC_PI_2)).abs() < 1e-10);
        assert!(w.eval(&[Rotation::IDENTITY]).is_err());
    }

    #[test]
    fn w_star_on_commuting_pair_is_identity() {
        let v = w_star_word()
            .eval(&[Rotation::about_x(0.3), Rotation::about_x(1.9)])
            .unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn substitution_respects_inverses() {
        let t = Word::generators(2);
        let w = t[0].inverse().concat(&t[1]);
        let images = [t[1].concat(&t[1]), t[0].clone()];
        assert_eq!(w.substitute(&images).unwrap().to_string(), "b⁻¹ b⁻¹ a");
    }

    #[test]
    fn composed_eval_matches_expanded_word() {
        let mut rng = stream(21, 0);
        let ys: [Rotation; 8] = std::array::from_fn(|_| haar_sample(&mut rng));
        let full = eight_variable_word(1).unwrap().eval(&ys).unwrap();
        let composed = eval_eight_variable(1, &ys).unwrap();
        assert!(full.distance(&composed) < 1e-9);
    }

    #[test]
    fn lipschitz_edge_cases() {
        assert_eq!(
            lipschitz_check(&Word::identity(2), 10, 1, 0.1).unwrap(),
            0.0
        );
        let single = Word::generator(0, 1).unwrap();
        let r = lipschitz_check(&single, 500, 1, 0.05).unwrap();
        assert!(r <= 1.0 + 1e-9 && r > 0.99, "{r}");
        assert!(lipschitz_check(&single, 10, 1, 0.0).is_err());
    }

    #[test]
    fn verify_rejects_wrong_arity() {
        let g = FiniteSubgroup::new(GroupKind::Cyclic(3)).unwrap();
        assert!(verify_word_on_group(&Word::identity(3), &g, true).is_err());
    }

    #[test]
    fn genericity_validates_input() {
        assert!(genericity_scan(3, &[0.1], 10, 0).is_err());
        assert!(genericity_scan(1, &[0.5, 0.1], 10, 0).is_err());
        let t = genericity_scan(1, &[0.1, DIAMETER], 200, 4).unwrap();
        assert_eq!(t.rows[1].p_hat, 1.0);
        assert!(t.rows[0].hits <= t.rows[1].hits);
    }
}

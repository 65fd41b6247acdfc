use std::sync::Arc;

use proptest::prelude::*;
use so3round::groups::{FiniteSubgroup, GroupKind};
use so3round::kazhdan::{cocycle_identity_residual, perturb_hom, NearHom};
use so3round::rng::stream;
use so3round::so3::{euler_decompose, haar_sample, random_in_ball, Rotation, DIAMETER};
use so3round::words::{Letter, Word};

fn rotation() -> impl Strategy<Value = Rotation> {
    any::<u64>().prop_map(|s| haar_sample(&mut stream(s, 0)))
}

fn small_rotation(radius: f64) -> impl Strategy<Value = Rotation> {
    any::<u64>().prop_map(move |s| random_in_ball(&mut stream(s, 1), radius))
}

fn word(arity: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..arity as u8, any::<bool>()), 0..max_len).prop_map(move |ls| {
        let letters = ls
            .into_iter()
            .map(|(generator, inverse)| Letter { generator, inverse })
            .collect();
        Word::from_letters(letters, arity).unwrap()
    })
}

fn unit(q: &[f64; 4]) -> bool {
    (q.iter().map(|c| c * c).sum::<f64>().sqrt() - 1.0).abs() <= 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_axioms(g in rotation(), h in rotation(), k in rotation()) {
        prop_assert!((g.distance(&h) - h.distance(&g)).abs() <= 1e-15);
        prop_assert!(g.distance(&g) <= 1e-7);
        prop_assert!(g.distance(&k) <= g.distance(&h) + h.distance(&k) + 1e-12);
        prop_assert!(g.distance(&h) <= DIAMETER + 1e-12);
    }

    #[test]
    fn bi_invariance(g in rotation(), h in rotation(), u in rotation()) {
        let d = g.distance(&h);
        prop_assert!(((u * g).distance(&(u * h)) - d).abs() <= 1e-10);
        prop_assert!(((g * u).distance(&(h * u)) - d).abs() <= 1e-10);
        prop_assert!((g.inverse().distance(&h.inverse()) - d).abs() <= 1e-10);
    }

    #[test]
    fn angle_formula(g in rotation()) {
        let theta = g.angle();
        prop_assert!((g.norm() - 2f64.powf(1.5) * (theta / 2.0).sin().abs()).abs() <= 1e-10);
    }

    #[test]
    fn products_stay_canonical(g in rotation(), h in rotation()) {
        let p = g * h;
        let q = p.quaternion();
        prop_assert!(unit(&q));
        let lead = q.iter().copied().find(|c| c.abs() > 1e-12).unwrap();
        prop_assert!(lead > 0.0);
        prop_assert!(((g * h) * g).distance(&(g * (h * g))) <= 1e-12);
        prop_assert!((g * g.inverse()).norm() <= 1e-7);
    }

    #[test]
    fn matrix_is_orthogonal(g in rotation()) {
        let m = g.matrix();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() <= 1e-10);
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        prop_assert!((det - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn euler_round_trip(g in rotation()) {
        prop_assert!(g.distance(&euler_decompose(&g).recompose()) <= 1e-10);
    }

    #[test]
    fn small_ball_respects_radius(u in small_rotation(0.05)) {
        prop_assert!(u.norm() <= 0.05 + 1e-12);
    }

    #[test]
    fn word_eval_is_a_homomorphism(u in word(3, 12), v in word(3, 12), x in rotation(), y in rotation(), z in rotation()) {
        let xs = [x, y, z];
        let uv = u.concat(&v).eval(&xs).unwrap();
        prop_assert!(uv.distance(&(u.eval(&xs).unwrap() * v.eval(&xs).unwrap())) <= 1e-10);
        prop_assert!(u.inverse().eval(&xs).unwrap().distance(&u.eval(&xs).unwrap().inverse()) <= 1e-10);
        prop_assert_eq!(u.concat(&v).len(), u.len() + v.len());
        prop_assert_eq!(u.inverse().inverse(), u.clone());
    }

    #[test]
    fn substitution_commutes_with_eval(w in word(2, 10), i0 in word(3, 6), i1 in word(3, 6), x in rotation(), y in rotation(), z in rotation()) {
        let xs = [x, y, z];
        let images = [i0.clone(), i1.clone()];
        let direct = w.substitute(&images).unwrap().eval(&xs).unwrap();
        let staged = w.eval(&[i0.eval(&xs).unwrap(), i1.eval(&xs).unwrap()]).unwrap();
        prop_assert!(direct.distance(&staged) <= 1e-10);
    }

    #[test]
    fn word_maps_are_lipschitz(w in word(2, 20), x in rotation(), y in rotation(), u in small_rotation(0.1), v in small_rotation(0.1)) {
        let (x2, y2) = (x * u, y * v);
        let moved = x.distance(&x2).max(y.distance(&y2));
        let out = w.eval(&[x, y]).unwrap().distance(&w.eval(&[x2, y2]).unwrap());
        prop_assert!(out <= w.len() as f64 * moved + 1e-10);
    }

    #[test]
    fn cocycle_identity_for_random_maps(seed in any::<u64>(), x in 0usize..12, y in 0usize..12, z in 0usize..12) {
        let g = Arc::new(FiniteSubgroup::new(GroupKind::Tetrahedral).unwrap());
        let phi = NearHom::random(g, seed);
        prop_assert!(cocycle_identity_residual(&phi, x, y, z).unwrap() <= 1e-12);
    }

    #[test]
    fn perturbed_homomorphism_defect(seed in any::<u64>(), delta in 0.0f64..0.2) {
        let g = Arc::new(FiniteSubgroup::new(GroupKind::Dihedral(4)).unwrap());
        let phi = perturb_hom(&NearHom::inclusion(g), delta, seed).unwrap();
        prop_assert!(phi.defect() <= 3.0 * delta + 1e-10);
    }
}

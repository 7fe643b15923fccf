//! Property tests for the arithmetic substrate: exactness of the scalar
//! field, commuting site embeddings, the group action on tensor factors,
//! and evaluation homomorphisms.

use proptest::prelude::*;

use fmatrix_core::poly::{OperatorPolynomial, ScalarPoly};
use fmatrix_core::perm::SitePermutation;
use fmatrix_core::scalar::Rat;
use fmatrix_core::tensor::{permute_tensor_factors, tensor_embed, TensorOperator, TensorShape};

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| Rat::ratio(p, q))
}

fn arb_nonzero_rat() -> impl Strategy<Value = Rat> {
    arb_rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn arb_local(dim: usize) -> impl Strategy<Value = Vec<Vec<Rat>>> {
    proptest::collection::vec(
        proptest::collection::vec((-5i64..=5).prop_map(Rat::from_int), dim),
        dim,
    )
}

proptest! {
    #[test]
    fn reciprocal_is_exact(a in arb_nonzero_rat()) {
        prop_assert!((a.recip().unwrap() * a).is_one());
    }

    #[test]
    fn field_arithmetic_exact(a in arb_nonzero_rat(), b in arb_nonzero_rat()) {
        // (a/b) * (b/a) = 1, with no rounding anywhere
        let q = &a / &b;
        let r = &b / &a;
        prop_assert!((q * r).is_one());
    }

    #[test]
    fn display_parse_round_trip(a in arb_rat()) {
        prop_assert_eq!(Rat::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn embeddings_at_distinct_sites_commute(
        a in arb_local(2),
        b in arb_local(3),
    ) {
        let shape = TensorShape::new(vec![2, 3]);
        let ea = tensor_embed(&a, 0, &shape).unwrap();
        let eb = tensor_embed(&b, 1, &shape).unwrap();
        prop_assert!(ea.commutator(&eb).is_zero());
    }

    #[test]
    fn permutation_word_action_matches_direct_action(
        a in arb_local(2), b in arb_local(2), c in arb_local(2),
        shuffled in proptest::sample::select(vec![
            vec![0usize, 1, 2], vec![0, 2, 1], vec![1, 0, 2],
            vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0],
        ]),
    ) {
        let shape = TensorShape::new(vec![2, 2, 2]);
        let op = tensor_embed(&a, 0, &shape).unwrap()
            .matmul(&tensor_embed(&b, 1, &shape).unwrap())
            .matmul(&tensor_embed(&c, 2, &shape).unwrap());
        let perm = SitePermutation::from_one_line(shuffled).unwrap();
        let direct = permute_tensor_factors(&op, &perm).unwrap();
        // applying the reduced word letter by letter equals the direct
        // action; the leftmost letter is the outermost factor
        let mut acc = op.clone();
        for &j in perm.reduced_word().iter().rev() {
            acc = permute_tensor_factors(&acc, &SitePermutation::transposition(3, j)).unwrap();
        }
        prop_assert_eq!(direct.first_discrepancy(&acc), None);
        // inverse recovers
        let back = permute_tensor_factors(&direct, &perm.inverse()).unwrap();
        prop_assert_eq!(back.first_discrepancy(&op), None);
    }

    #[test]
    fn scalar_poly_evaluation_is_ring_homomorphism(
        p in proptest::collection::vec(arb_rat(), 0..5),
        q in proptest::collection::vec(arb_rat(), 0..5),
        u in arb_rat(),
    ) {
        let p = ScalarPoly::from_coeffs(p);
        let q = ScalarPoly::from_coeffs(q);
        prop_assert_eq!(p.mul(&q).eval(&u), p.eval(&u) * q.eval(&u));
        prop_assert_eq!(p.add(&q).eval(&u), p.eval(&u) + q.eval(&u));
    }

    #[test]
    fn operator_poly_scalar_coeff_evaluation_homomorphism(
        p in proptest::collection::vec(arb_rat(), 0..4),
        q in proptest::collection::vec(arb_rat(), 0..4),
        u in arb_rat(),
    ) {
        let shape = TensorShape::new(vec![3]);
        let mk = |cs: &[Rat]| OperatorPolynomial::from_coeffs(
            shape.clone(),
            cs.iter().map(|c| TensorOperator::scalar(shape.clone(), c.clone())).collect(),
        );
        let pp = mk(&p);
        let qq = mk(&q);
        prop_assert_eq!(pp.mul(&qq).eval(&u), pp.eval(&u).matmul(&qq.eval(&u)));
    }
}

mod common;

use common::{is_unit, naive_rank};
use gkmkit::exact_lattice::{
    canonicalize, extend_to_basis, hermite_rows, is_primitive_sublattice, matrix_rank, rank_over_rationals, smith_normal_form, IntMatrix,
    IntVector,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_sign_blind(xs in prop::collection::vec(-50i64..=50, 1..6)) {
        let x = IntVector::from_i64s(&xs);
        prop_assume!(!x.is_zero());
        let c = canonicalize(&x).unwrap();
        prop_assert_eq!(canonicalize(c.rep()).unwrap(), c.clone());
        prop_assert_eq!(canonicalize(&x.neg()).unwrap(), c.clone());
        // ±x with the first nonzero entry positive; the gcd is kept
        prop_assert!(c.rep() == &x || c.rep() == &x.neg());
        prop_assert!(c.rep().0.iter().find(|a| !a.is_zero()).unwrap() > &BigInt::zero());
    }

    #[test]
    fn smith_form_is_exact(rows in matrix_strategy(5, 5)) {
        let a = IntMatrix::from_i64_rows(&rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert!(is_unit(&s.u.determinant()));
        prop_assert!(is_unit(&s.v.determinant()));
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let ds = s.divisors();
        prop_assert_eq!(ds.len(), s.rank);
        for w in ds.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        prop_assert!(ds.iter().all(|d| d > &BigInt::zero()));
    }

    #[test]
    fn rank_matches_rational_elimination(rows in matrix_strategy(6, 6)) {
        let expected = naive_rank(&rows);
        let vs: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64s(r)).collect();
        prop_assert_eq!(rank_over_rationals(&vs).unwrap(), expected);
        prop_assert_eq!(matrix_rank(&IntMatrix::from_i64_rows(&rows)), expected);
    }

    #[test]
    fn basis_extension_is_unimodular_and_keeps_the_span(rows in matrix_strategy(4, 5)) {
        let m = rows[0].len();
        let vs: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64s(r)).collect();
        prop_assume!(naive_rank(&rows) == rows.len());
        prop_assume!(is_primitive_sublattice(&vs).unwrap());
        let basis = extend_to_basis(&vs, m).unwrap();
        prop_assert_eq!(basis.len(), m);
        prop_assert!(is_unit(&IntMatrix::from_rows(&basis, m).determinant()));
        prop_assert_eq!(&basis[..vs.len()], &vs[..]);
        prop_assert_eq!(hermite_rows(&basis[..vs.len()], m), hermite_rows(&vs, m));
    }
}

#[test]
fn non_primitive_families_are_not_extended() {
    let vs = vec![IntVector::from_i64s(&[2, 0, 0])];
    assert!(extend_to_basis(&vs, 3).is_err());
}

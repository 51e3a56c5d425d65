use proptest::prelude::*;

use cue_hurwitz::algebra::{int, rat, Coeff, QSeries, Rational};
use cue_hurwitz::hurwitz::assemble_bivariate_disconnected;
use cue_hurwitz::hypergeom::{cue_moment_series, diaconis_expectation};
use cue_hurwitz::partitions::{enumerate_partitions, Partition};
use cue_hurwitz::quasimodular::{basis_dimension, euler_phi, fit_quasimodular, quasimodular_basis};

const ORDER: usize = 7;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-5i64..6, 1i64..4).prop_map(|(a, b)| rat(a, b))
}

fn series() -> impl Strategy<Value = QSeries> {
    prop::collection::vec(small_rational(), ORDER + 1).prop_map(QSeries::from_rationals)
}

fn series_with_constant(c: Rational) -> impl Strategy<Value = QSeries> {
    series().prop_map(move |mut s| {
        s.set_coeff(0, c.clone());
        s
    })
}

fn partition_of(d: usize, pick: usize) -> Partition {
    let all = enumerate_partitions(d, None);
    all[pick % all.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiplication_is_associative(a in series(), b in series(), c in series()) {
        let left = a.checked_mul(&b).unwrap().checked_mul(&c).unwrap();
        let right = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_distributes(a in series(), b in series(), c in series()) {
        let left = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
        let right = a.checked_mul(&b).unwrap().checked_add(&a.checked_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_commutes(a in series(), b in series()) {
        prop_assert_eq!(a.checked_mul(&b).unwrap(), b.checked_mul(&a).unwrap());
    }

    #[test]
    fn inverse_round_trips(a in series(), c in (1i64..5, 1i64..4)) {
        let mut a = a;
        a.set_coeff(0, rat(c.0, c.1));
        let inv = a.inverse().unwrap();
        prop_assert!(a.checked_mul(&inv).unwrap().is_one_series());
        prop_assert_eq!(inv.inverse().unwrap(), a);
    }

    #[test]
    fn log_and_exp_round_trip(x in series_with_constant(int(0)), y in series_with_constant(int(1))) {
        prop_assert_eq!(x.exp().unwrap().log().unwrap(), x);
        prop_assert_eq!(y.log().unwrap().exp().unwrap(), y.clone());
        let sum_of_logs = y.log().unwrap().checked_add(&y.log().unwrap()).unwrap();
        prop_assert_eq!(y.checked_mul(&y).unwrap().log().unwrap(), sum_of_logs);
    }

    #[test]
    fn row_bound_at_size_is_no_bound(d in 0usize..16) {
        prop_assert_eq!(enumerate_partitions(d, Some(d)).len(), enumerate_partitions(d, None).len());
    }

    #[test]
    fn diaconis_is_stable_in_n(d in 1usize..6, i in 0usize..7, j in 0usize..7, extra in 1usize..5) {
        let (alpha, beta) = (partition_of(d, i), partition_of(d, j));
        prop_assert_eq!(
            diaconis_expectation(&alpha, &beta, d).unwrap(),
            diaconis_expectation(&alpha, &beta, d + extra).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn odd_hbar_layers_vanish(m in 0usize..3, n in 0usize..3) {
        let e = assemble_bivariate_disconnected(5, 5, m, n);
        let logs = e.log().unwrap();
        let moments = cue_moment_series(m, n, 5, 5);
        for d in 0..=5 {
            for r in [1, 3, 5] {
                prop_assert!(e.coeff(d, r).is_zero_elem());
                prop_assert!(logs.coeff(d, r).is_zero_elem());
                prop_assert!(moments.coeff(d, r).is_zero_elem());
            }
        }
    }

    #[test]
    fn fitted_forms_reproduce_every_coefficient(c in prop::collection::vec(small_rational(), 4)) {
        // an arbitrary combination of weight ≤ 4 basis series
        let order = 20;
        let basis = quasimodular_basis(4, order).unwrap();
        let mut target = QSeries::zeros(order);
        for ((_, s), k) in basis.iter().zip(&c) {
            target = target.checked_add(&s.scale(k)).unwrap();
        }
        let report = fit_quasimodular(&target, 4, basis_dimension(4), 10).unwrap();
        prop_assert_eq!(report.form.expand(order), target);
    }
}

#[test]
fn genus_one_series_is_reciprocal_of_phi() {
    let order = 25;
    let e = assemble_bivariate_disconnected(order, 0, 0, 1);
    let e1 = e.h_layer(0).evaluate_params(&[], &[int(1)]);
    assert!(euler_phi(order).checked_mul(&e1).unwrap().is_one_series());
    let f1 = e.log().unwrap().h_layer(0).evaluate_params(&[], &[int(1)]);
    let minus_log_phi = euler_phi(order).log().unwrap().scale(&int(-1));
    assert_eq!(f1, minus_log_phi);
}

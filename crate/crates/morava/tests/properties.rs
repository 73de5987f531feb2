use std::collections::BTreeMap;
use std::sync::Arc;

use morava::motives::rost_kn_groups;
use morava::quadric::{build_instance, compute_gr_torsion, torsion_bound};
use morava::snf::smith_decompose;
use morava::splitting::{
    excellent_decomposition, excellent_in_im, monotonic_closure, Verdict,
};
use morava::symfunc::{elementary_values, eval_elementary, smallest_symmetric, Partition};
use morava::{laurent_divide, morava_fgl, GradedSeries, PRat, Ring};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn xy_ring() -> Arc<Ring> {
    Ring::new(2, 6).var("x", 1).var("y", 1).arc()
}

fn series_from(ring: &Arc<Ring>, terms: &[(i64, i64, i64)]) -> GradedSeries {
    let mut s = GradedSeries::zero(ring);
    for (ex, ey, c) in terms {
        let mono =
            GradedSeries::monomial(ring, &[("x", *ex), ("y", *ey)], PRat::from_int(2, *c))
                .unwrap();
        s = s.add(&mono).unwrap();
    }
    s
}

fn raw_terms() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    proptest::collection::vec(((0i64..5), (0i64..5), (-4i64..5)), 0..5)
}

proptest! {
    #[test]
    fn series_ring_axioms(a in raw_terms(), b in raw_terms(), c in raw_terms()) {
        let ring = xy_ring();
        let a = series_from(&ring, &a);
        let b = series_from(&ring, &b);
        let c = series_from(&ring, &c);

        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(
            a.add(&b).unwrap().add(&c).unwrap(),
            a.add(&b.add(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.add(&b).unwrap().mul(&c).unwrap(),
            a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.sub(&a).unwrap(), GradedSeries::zero(&ring));
    }

    #[test]
    fn truncation_is_multiplicative(a in raw_terms(), b in raw_terms()) {
        let wide = Ring::new(2, 9).var("x", 1).var("y", 1).arc();
        let narrow = xy_ring();
        let wa = series_from(&wide, &a);
        let wb = series_from(&wide, &b);
        let product_then_cut = wa.mul(&wb).unwrap().into_ring(&narrow).unwrap();
        let cut_then_product = wa
            .into_ring(&narrow)
            .unwrap()
            .mul(&wb.into_ring(&narrow).unwrap())
            .unwrap();
        prop_assert_eq!(product_then_cut, cut_then_product);
    }

    #[test]
    fn compositional_inverse_round_trip(coeffs in proptest::collection::vec(-3i64..4, 0..5)) {
        let ring = Ring::new(2, 7).var("t", 1).arc();
        let t = GradedSeries::var(&ring, "t").unwrap();
        let mut f = t.clone();
        for (i, c) in coeffs.iter().enumerate() {
            let mono = GradedSeries::monomial(
                &ring,
                &[("t", i as i64 + 2)],
                PRat::from_int(2, *c),
            )
            .unwrap();
            f = f.add(&mono).unwrap();
        }
        let g = f.compositional_inverse("t").unwrap();
        prop_assert_eq!(f.substitute(&[("t", &g)]).unwrap(), t.clone());
        prop_assert_eq!(g.substitute(&[("t", &f)]).unwrap(), t);
    }

    #[test]
    fn laurent_division_multiplies_back(
        num_terms in raw_terms(),
        den_terms in raw_terms(),
        t_shift in -2i64..3,
    ) {
        let ring = Ring::new(2, 6)
            .var("x", 1)
            .var("y", 1)
            .laurent("t", 1, -4)
            .arc();
        let plain = xy_ring();
        let num = series_from(&plain, &num_terms)
            .into_ring(&ring)
            .unwrap()
            .mul_monomial(&[("t", t_shift)], &PRat::one(2))
            .unwrap();
        let x = GradedSeries::var(&ring, "x").unwrap();
        let den = GradedSeries::one(&ring)
            .add(&x.mul(&series_from(&plain, &den_terms).into_ring(&ring).unwrap()).unwrap())
            .unwrap();
        let q = laurent_divide(&num, &den).unwrap();
        prop_assert_eq!(q.mul(&den).unwrap(), num);
    }

    #[test]
    fn multiplication_series_compose(a in -3i64..4, b in -3i64..4) {
        let law = morava_fgl(2, 1, 5).unwrap();
        let ma = law.m_series(a).unwrap();
        let mb = law.m_series(b).unwrap();
        let composed = ma.substitute(&[("t", &mb)]).unwrap();
        prop_assert_eq!(composed, law.m_series(a * b).unwrap());
    }

    #[test]
    fn formal_sum_is_commutative(a in raw_terms(), b in raw_terms()) {
        let law = morava_fgl(2, 1, 5).unwrap();
        let ring = Ring::new(2, 5)
            .invertible("v", -1)
            .var("x", 1)
            .var("y", 1)
            .arc();
        let plain = xy_ring();
        let x = GradedSeries::var(&ring, "x").unwrap();
        let lift_a = x.mul(&series_from(&plain, &a).into_ring(&ring).unwrap()).unwrap();
        let lift_b = x.mul(&series_from(&plain, &b).into_ring(&ring).unwrap()).unwrap();
        prop_assert_eq!(
            law.plus(&lift_a, &lift_b).unwrap(),
            law.plus(&lift_b, &lift_a).unwrap()
        );
        prop_assert_eq!(
            law.plus(&lift_a, &GradedSeries::zero(&ring)).unwrap(),
            lift_a
        );
    }

    #[test]
    fn smith_form_ignores_unimodular_moves(
        entries in proptest::collection::vec(-6i64..7, 9),
        moves in proptest::collection::vec((0usize..3, 0usize..3, -2i64..3, any::<bool>()), 0..6),
    ) {
        let base: Vec<Vec<PRat>> = entries
            .chunks(3)
            .map(|row| row.iter().map(|&n| PRat::from_int(2, n)).collect())
            .collect();
        let mut moved = base.clone();
        for (i, j, c, on_rows) in moves {
            if i == j {
                continue;
            }
            if on_rows {
                let source: Vec<PRat> = moved[j].clone();
                for (dst, s) in moved[i].iter_mut().zip(&source) {
                    *dst = &*dst + &(&PRat::from_int(2, c) * s);
                }
            } else {
                for row in moved.iter_mut() {
                    let s = row[j].clone();
                    row[i] = &row[i] + &(&PRat::from_int(2, c) * &s);
                }
            }
        }
        let left = smith_decompose(2, 3, &base).unwrap();
        let right = smith_decompose(2, 3, &moved).unwrap();
        prop_assert_eq!(left.cokernel(), right.cokernel());
    }

    #[test]
    fn orbit_sum_matches_its_elementary_expression(
        parts in proptest::collection::vec(1i64..4, 1..4),
        raw_points in proptest::collection::vec(-3i64..4, 4),
    ) {
        let mut sorted = parts.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let j = Partition::new(sorted).unwrap();
        let points: Vec<PRat> = raw_points.iter().map(|&n| PRat::from_int(2, n)).collect();
        let (p_j, q_j) = smallest_symmetric(2, &j, points.len()).unwrap();
        let direct = p_j.evaluate(&points).unwrap();
        let through_elementary = eval_elementary(&q_j, &elementary_values(2, &points)).unwrap();
        prop_assert_eq!(direct, through_elementary);
    }

    #[test]
    fn closure_is_idempotent(raw in proptest::collection::btree_map(1u32..7, 0u8..3, 0..5)) {
        let verdicts: BTreeMap<u32, Verdict> = raw
            .into_iter()
            .map(|(k, v)| {
                let v = match v {
                    0 => Verdict::Split,
                    1 => Verdict::NotSplit,
                    _ => Verdict::Unknown,
                };
                (k, v)
            })
            .collect();
        if let Ok(closed) = monotonic_closure(&verdicts) {
            prop_assert_eq!(monotonic_closure(&closed).unwrap(), closed);
        }
    }

    #[test]
    fn membership_is_monotone_in_the_power(dim_half in 1i64..512) {
        let dim = 2 * dim_half;
        let mut previous = true;
        for m in 1..=10u32 {
            let now = excellent_in_im(dim, m).unwrap();
            prop_assert!(previous || !now, "membership regained at m = {} for dim {}", m, dim);
            previous = now;
        }
    }

    #[test]
    fn gamma_torsion_ignores_tail_choices(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tails = || BigInt::from(rng.gen_range(-9i64..10));
        let instance = build_instance(2, 20, &mut tails).unwrap();
        let shape = compute_gr_torsion(&instance).unwrap();
        prop_assert_eq!(
            shape.torsion_order().unwrap(),
            torsion_bound(2, 20).unwrap().order()
        );
    }

    #[test]
    fn rost_computations_stay_consistent(
        p_idx in 0usize..3,
        m in 2usize..6,
        n in 1u32..7,
    ) {
        let prime = [2u32, 3, 5][p_idx];
        prop_assert!(rost_kn_groups(prime, m, n).is_ok());
    }
}

#[test]
fn excellent_decomposition_round_trips_all_small_dimensions() {
    for half in 1..=8192i64 {
        let dim = 2 * half;
        let exponents = excellent_decomposition(dim).unwrap();
        let mut rebuilt = 0i64;
        let mut sign = 1i64;
        for r in &exponents {
            rebuilt += sign * (1i64 << r);
            sign = -sign;
        }
        assert_eq!(rebuilt, dim, "dimension {dim} decomposed as {exponents:?}");
    }
}

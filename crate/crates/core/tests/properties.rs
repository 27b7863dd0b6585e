//! Randomized algebraic-identity checks; exact equality throughout.

use proptest::prelude::*;

use lagloci::cubic::{gl2_act, BinaryCubic, BinaryQuadratic, ScalarCubic, GL2};
use lagloci::exact::GaussianRational;
use lagloci::series::{BiSeries, SeriesMatrix, Var};

fn rat() -> impl Strategy<Value = GaussianRational> {
    (-20i64..=20, 1i64..=12, -20i64..=20, 1i64..=12)
        .prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
}

fn small_series(order: usize) -> impl Strategy<Value = BiSeries> {
    proptest::collection::vec(((0usize..=3, 0usize..=3), rat()), 0..5).prop_map(
        move |terms| {
            BiSeries::from_terms(
                order,
                &terms
                    .into_iter()
                    .map(|((i, j), c)| (i, j, c))
                    .collect::<Vec<_>>(),
            )
        },
    )
}

fn unit_series(order: usize) -> impl Strategy<Value = BiSeries> {
    (rat(), small_series(order)).prop_map(move |(c0, tail)| {
        let c0 = if c0.is_zero() {
            GaussianRational::one()
        } else {
            c0
        };
        let mut s = tail;
        s.set_coeff(0, 0, c0);
        s
    })
}

fn cubic() -> impl Strategy<Value = ScalarCubic> {
    (rat(), rat(), rat(), rat()).prop_map(|(a, b, c, e)| BinaryCubic::new(a, b, c, e))
}

fn gl2() -> impl Strategy<Value = GL2> {
    (-4i64..=4, -4i64..=4, -4i64..=4, -4i64..=4)
        .prop_filter_map("singular", |(p, q, r, s)| {
            GL2::from_ints([[p, q], [r, s]]).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_associativity_and_distributivity(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn field_inverses(a in rat()) {
        prop_assert_eq!(&a + &(-&a), GaussianRational::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
        }
    }

    #[test]
    fn conjugation_is_an_involution_and_multiplicative(a in rat(), b in rat()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
    }

    #[test]
    fn display_parse_round_trip(a in rat()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<GaussianRational>().unwrap(), a);
    }

    #[test]
    fn series_ring_axioms(a in small_series(6), b in small_series(6), c in small_series(6)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn leibniz_rule(a in small_series(6), b in small_series(6)) {
        for v in [Var::U1, Var::U2] {
            let lhs = (&a * &b).diff(v);
            let rhs = &(&a.diff(v) * &b) + &(&a * &b.diff(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn inversion_is_an_involution_on_units(u in unit_series(6)) {
        let back = u.invert().unwrap().invert().unwrap();
        let cap = back.order();
        prop_assert_eq!(back, u.truncate(cap));
    }

    #[test]
    fn linear_solve_residual_is_zero(
        d in unit_series(6),
        b in small_series(6),
        c in small_series(6),
        r1 in small_series(6),
        r2 in small_series(6),
    ) {
        // unit-diagonal coefficient matrix guarantees solvability
        let a = SeriesMatrix::from_rows(vec![
            vec![d.clone(), b],
            vec![c, d.clone()],
        ]);
        prop_assume!(a.det2().is_unit());
        let rhs = SeriesMatrix::from_rows(vec![vec![r1], vec![r2]]);
        let x = SeriesMatrix::linear_solve(&a, &rhs).unwrap();
        let residual = a.mul(&x).sub(&rhs);
        let cap = residual.order();
        prop_assert!(residual.is_zero_to(cap));
    }

    #[test]
    fn alpha_is_linear_and_injective(f in cubic(), h in cubic(), s in rat(), t in rat()) {
        let v = [s.clone(), t.clone()];
        let sum = f.add(&h);
        let lhs = sum.alpha_apply(&v);
        let af = f.alpha_apply(&v);
        let ah = h.alpha_apply(&v);
        let rhs = BinaryQuadratic::new(
            &af.qxx + &ah.qxx,
            &af.qxy + &ah.qxy,
            &af.qyy + &ah.qyy,
        );
        prop_assert_eq!(lhs, rhs);
        // injectivity: a nonzero cubic has a nonzero alpha map
        if !f.is_zero() {
            let on_x = f.alpha_apply(&[GaussianRational::one(), GaussianRational::zero()]);
            let on_y = f.alpha_apply(&[GaussianRational::zero(), GaussianRational::one()]);
            prop_assert!(!(on_x.is_zero() && on_y.is_zero()));
        }
    }

    #[test]
    fn chi_hat_vanishes_exactly_on_the_cone(f in cubic()) {
        if !f.is_zero() {
            let (p, q, r) = f.chi_hat();
            let vanishes = p.is_zero() && q.is_zero() && r.is_zero();
            prop_assert_eq!(vanishes, f.is_degenerate().unwrap());
        }
    }

    #[test]
    fn orbit_is_gl2_invariant(f in cubic(), g in gl2()) {
        if !f.is_zero() {
            let acted = gl2_act(&g, &f).unwrap();
            prop_assert_eq!(
                acted.classify_orbit().unwrap(),
                f.classify_orbit().unwrap()
            );
        }
    }

    #[test]
    fn cube_of_linear_form_is_degenerate(s in rat(), lx in rat(), ly in rat()) {
        if !s.is_zero() && !(lx.is_zero() && ly.is_zero()) {
            let three = GaussianRational::from_int(3);
            let f = BinaryCubic::new(
                &s * &(&(&lx * &lx) * &lx),
                &s * &(&(&ly * &ly) * &ly),
                &(&s * &three) * &(&(&lx * &lx) * &ly),
                &(&s * &three) * &(&lx * &(&ly * &ly)),
            );
            prop_assert!(f.is_degenerate().unwrap());
            // kappa is scale-invariant where defined
            let doubled = f.scale(&GaussianRational::from_int(2));
            prop_assert_eq!(doubled.kappa().unwrap(), f.kappa().unwrap());
        }
    }
}

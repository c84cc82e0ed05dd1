use ceresa_core::arith::exact_sqrt;
use ceresa_core::certifier::{certify, Verdict};
use ceresa_core::heegner::{enumerate_heegner_divisor, heegner_r_values, HeegnerIndex};
use ceresa_core::lattice::{quadratic, Side};
use ceresa_core::pullback::{pullback, pullback_combination, AmbientGenerator, DivisorClass};
use ceresa_core::{build_lattice_l, build_lattice_p, build_lattice_w, q_mod1, DiscElement};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use proptest::prelude::*;

fn frac(q: Rational64) -> Rational64 {
    q - q.floor()
}

#[test]
fn discriminant_groups_for_small_levels() {
    for n in 1..=50u64 {
        let w = build_lattice_w(n).unwrap();
        assert_eq!(w.discriminant_invariants(), vec![2 * n], "W at N={n}");
        assert_eq!(w.determinant(), Rational64::from_integer(2 * n as i64));
        assert_eq!(w.computed_signature(), w.signature);
        let p = build_lattice_p(n).unwrap();
        assert_eq!(p.discriminant_group_order(), 2 * n);
        let l = build_lattice_l(n).unwrap();
        assert_eq!(l.discriminant_group_order(), 4 * n * n, "L at N={n}");
        assert_eq!(l.computed_signature(), l.signature);
    }
}

fn disc_element() -> impl Strategy<Value = DiscElement> {
    (1..=50u64).prop_flat_map(|n| (Just(n), 0..2 * n, 0..2 * n)).prop_map(|(n, a, b)| DiscElement::new(n, a, b).unwrap())
}

fn generator_at(n: u64) -> impl Strategy<Value = AmbientGenerator> {
    (0..2 * n, 0..2 * n, 0u64..25).prop_filter_map("admissible", move |(r1, r2, k)| {
        let four_n = 4 * n as i64;
        let base = ((r2 * r2) as i64 - (r1 * r1) as i64).rem_euclid(four_n) as u64;
        let norm = base + 4 * n * k;
        if norm == 0 && (r1, r2) != (0, 0) {
            return None;
        }
        AmbientGenerator::from_scaled(norm, DiscElement::new(n, r1, r2).ok()?).ok()
    })
}

fn generator() -> impl Strategy<Value = AmbientGenerator> {
    (1..=6u64).prop_flat_map(generator_at)
}

fn generator_pair() -> impl Strategy<Value = (AmbientGenerator, AmbientGenerator)> {
    (1..=6u64).prop_flat_map(|n| (generator_at(n), generator_at(n)))
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

proptest! {
    #[test]
    fn q_is_additive_and_even(mu in disc_element()) {
        let full = q_mod1(&mu, Side::Full);
        prop_assert_eq!(full, frac(q_mod1(&mu, Side::W) + q_mod1(&mu, Side::P)));
        prop_assert_eq!(q_mod1(&mu.neg(), Side::Full), full);
        prop_assert_eq!(q_mod1(&mu.w_part(), Side::P), Rational64::zero());
        prop_assert_eq!(frac(quadratic(mu.level, &mu.matrix())), full);
    }

    #[test]
    fn pullback_is_linear((g1, g2) in generator_pair(), c1 in -5i64..5, c2 in -5i64..5) {
        let level = g1.mu.level;
        let combined = pullback_combination(level, &[(g1, big(c1)), (g2, big(c2))]).unwrap();
        let mut expected = DivisorClass::zero(level);
        expected.add_scaled(&pullback(level, &g1).unwrap(), &big(c1));
        expected.add_scaled(&pullback(level, &g2).unwrap(), &big(c2));
        prop_assert_eq!(combined.heeg_difference(&expected), Default::default());
        prop_assert_eq!(combined.omega, expected.omega);
    }

    #[test]
    fn pullback_support_is_bounded(g in generator()) {
        let level = g.mu.level;
        let class = pullback(level, &g).unwrap();
        for key in class.heeg.keys() {
            prop_assert!(key.n <= g.n);
            prop_assert_eq!(key.r1, g.mu.r1);
            prop_assert!(exact_sqrt(g.n - key.n).is_some());
        }
        prop_assert!(class.heeg.values().all(|c| c > &BigRational::zero()));
    }

    #[test]
    fn heegner_classes_satisfy_their_congruences(level in 1u64..=12, abs_d in 3i64..300) {
        let d = -abs_d;
        prop_assume!(matches!(d.rem_euclid(4), 0 | 1));
        for r in heegner_r_values(level, d) {
            let div = enumerate_heegner_divisor(&HeegnerIndex::new(level, d, r).unwrap()).unwrap();
            let n = level as i64;
            for c in &div.classes {
                prop_assert_eq!(c.form.discriminant(), d);
                prop_assert_eq!(c.form.a % n, 0);
                prop_assert_eq!((c.form.b - r as i64).rem_euclid(2 * n), 0);
                prop_assert!(-c.form.a < c.form.b && c.form.b <= c.form.a);
            }
            let neg = (2 * level - r) % (2 * level);
            let partner = enumerate_heegner_divisor(&HeegnerIndex::new(level, d, neg).unwrap()).unwrap();
            prop_assert_eq!(div.degree, partner.degree);
        }
    }

    #[test]
    fn certificates_are_monotone(n in 1u128..2_000_000, k in 1u128..=10) {
        if certify(n, None).unwrap().verdict == Verdict::ProvenNontrivial {
            prop_assert_eq!(certify(k * n, None).unwrap().verdict, Verdict::ProvenNontrivial);
        }
    }
}

#[test]
fn a_p_matches_direct_count() {
    // Count k with (r2 + 2Nk)² = n over a window wide enough to contain every solution.
    for level in 1..=8u64 {
        let two_n = 2 * level as i64;
        for n in 0..=300u64 {
            for r2 in 0..2 * level {
                let direct = (-40i64..=40).filter(|k| (r2 as i64 + two_n * k).pow(2) == n as i64).count() as u32;
                assert_eq!(ceresa_core::representation::a_p_scaled(level, n, r2), direct, "N={level} n={n} r2={r2}");
            }
        }
    }
}

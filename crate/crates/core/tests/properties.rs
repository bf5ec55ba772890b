use asep_core::lattice::xi_from_path;
use asep_core::oracle::{build_generator, stationary_vector, Rates};
use asep_core::qcalc::{poly_eval, q_factorial, QPolynomial};
use asep_core::rational::{int, ratio};
use asep_core::{
    composition_of, format_rational, parse_rational, path_of, tau_from_path, w_sigma_operator,
    w_sigma_series, Composition, Occupation, Rational,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn rational(max_den: i64) -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1..=max_den).prop_map(|(n, d)| ratio(n, d))
}

fn unit_q() -> impl Strategy<Value = Rational> {
    (0i64..=9).prop_map(|n| ratio(n, 10))
}

fn polynomial() -> impl Strategy<Value = QPolynomial> {
    prop::collection::vec(rational(7), 0..6).prop_map(QPolynomial::new)
}

fn occupation_pair() -> impl Strategy<Value = (Occupation, Occupation)> {
    (0usize..=12).prop_flat_map(|l| {
        let top = if l == 0 { 1u64 } else { 1u64 << l };
        (Just(l), 0..top, 0..top)
            .prop_map(|(l, t, x)| (Occupation::from_bits(l, t), Occupation::from_bits(l, x)))
    })
}

fn composition() -> impl Strategy<Value = Composition> {
    prop::collection::vec(1u32..=3, 1..=5).prop_map(|parts| Composition::new(parts).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_strings_round_trip(x in rational(1000)) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn jackson_derivative_matches_difference_quotient(p in polynomial(), q in unit_q(), z in rational(5)) {
        prop_assume!(!z.is_zero());
        let d = p.jackson_derivative(&q);
        let dq = (poly_eval(&p, &z) - poly_eval(&p, &(&q * &z))) / ((int(1) - &q) * &z);
        prop_assert_eq!(poly_eval(&d, &z), dq);
    }

    #[test]
    fn jackson_product_rule(f in polynomial(), g in polynomial(), q in unit_q()) {
        // D(fg)(z) = D f(z) g(z) + f(qz) D g(z)
        let lhs = (&f * &g).jackson_derivative(&q);
        let rhs = &(&f.jackson_derivative(&q) * &g) + &(&f.dilate(&q) * &g.jackson_derivative(&q));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn occupation_strings_round_trip((t, _) in occupation_pair()) {
        prop_assert_eq!(t.to_string().parse::<Occupation>().unwrap(), t);
    }

    #[test]
    fn layers_are_recovered_from_path_and_fill((t, x) in occupation_pair()) {
        let g = path_of(&t, &x).unwrap();
        let (_, level) = g.forced_top_and_level_mask();
        let eta = Occupation::from_bits(t.len(), t.bits() & level);
        prop_assert_eq!(tau_from_path(&g, &eta).unwrap(), t);
        prop_assert_eq!(xi_from_path(&t, &g).unwrap(), x);
        let sigma = composition_of(&g);
        prop_assert_eq!(sigma.system_size() as usize, t.len());
        prop_assert_eq!(sigma.r() as i32, g.max() - g.min());
    }

    #[test]
    fn weight_polynomial_invariants(sigma in composition(), q in unit_q()) {
        let w = w_sigma_operator(&sigma, &q);
        prop_assert_eq!(&w, &w_sigma_series(&sigma, &q));
        prop_assert!(w.has_nonnegative_coeffs());
        let l = sigma.system_size();
        prop_assert_eq!(poly_eval(&w, &Rational::one()), q_factorial(l + 1, &q));
        prop_assert!(w.degree().unwrap_or(0) <= (l - sigma.r()) as usize);
    }

    #[test]
    fn generator_rows_sum_to_zero(
        l in 1usize..=4,
        rates in prop::collection::vec(0i64..=6, 5),
    ) {
        let v: Vec<Rational> = rates.iter().map(|&n| ratio(n, 3)).collect();
        let r = Rates::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone(), v[4].clone()).unwrap();
        let g = build_generator(l, &r).unwrap();
        for i in 0..g.dim() {
            let total: Rational = g.off_diagonal(i).iter().map(|(_, x)| x).sum::<Rational>() + &g.diagonal()[i];
            prop_assert!(total.is_zero());
            prop_assert!(g.off_diagonal(i).iter().all(|(_, x)| x.is_positive()));
        }
    }

    #[test]
    fn stationary_vector_is_invariant(l in 1usize..=4, a in 1i64..=6, b in 1i64..=6, c in 0i64..=3, d in 0i64..=3, q in 0i64..=5) {
        let r = Rates::new(ratio(a, 6), ratio(b, 6), ratio(c, 5), ratio(d, 7), ratio(q, 6)).unwrap();
        let g = build_generator(l, &r).unwrap();
        let pi = stationary_vector(&g).unwrap();
        prop_assert!(g.left_apply(&pi).iter().all(Zero::is_zero));
        prop_assert!(pi.iter().all(|p| !p.is_negative()));
        prop_assert!(pi.iter().sum::<Rational>().is_one());
    }
}

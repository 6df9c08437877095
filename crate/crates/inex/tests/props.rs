//! Property-based invariants over randomly sampled triples.

use proptest::prelude::*;

use inex::{chi_via_delta, profile_stream, q_poly_coeffs, ChiContext, Triple};

fn coprime_triple() -> impl Strategy<Value = Triple> {
    (3u64..=45, 3u64..=45, 3u64..=45)
        .prop_filter_map("members must be pairwise coprime", |(a, b, c)| {
            Triple::new(a, b, c).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profiles_keep_the_structural_invariants(t in coprime_triple()) {
        let dense = q_poly_coeffs(&t).unwrap();
        let coeffs = dense.coeffs();
        let phi = t.phi() as usize;

        prop_assert_eq!(coeffs.len(), phi + 1);
        prop_assert_eq!(coeffs[0], 1);
        prop_assert_eq!(coeffs[phi], 1);
        prop_assert_eq!(coeffs.iter().sum::<i64>(), 1);
        for i in 0..=phi / 2 {
            prop_assert_eq!(coeffs[i], coeffs[phi - i]);
        }

        let profile = dense.profile();
        prop_assert!(profile.diameter >= 2);
        prop_assert!(profile.diameter <= t.min() as i64);
        // The attained values form a gap-free run.
        let span = profile.a_plus - profile.a_minus + 1;
        prop_assert_eq!(profile.coeff_set.len() as i64, span);

        prop_assert_eq!(profile, profile_stream(&t));
    }

    #[test]
    fn chi_routes_agree_pointwise(t in coprime_triple(), frac in 0.0f64..1.0) {
        let n = ((t.pqr() - 1) as f64 * frac) as i64;
        let ctx = ChiContext::new(&t);
        prop_assert_eq!(ctx.chi(n), chi_via_delta(n, &t));
    }

    #[test]
    fn shifting_r_by_pq_preserves_the_coefficient_set(t in coprime_triple()) {
        let (p, q, r) = (t.p(), t.q(), t.r());
        prop_assume!(r > p && r > q);
        let shifted = Triple::new(p, q, r + p * q).unwrap();
        prop_assert_eq!(
            profile_stream(&t).coeff_set,
            profile_stream(&shifted).coeff_set
        );
    }

    #[test]
    fn negating_r_negates_the_coefficient_set(t in coprime_triple()) {
        let (p, q, r) = (t.p(), t.q(), t.r());
        prop_assume!(r > p && r > q);
        let pq = p * q;
        let mut r_neg = pq - r % pq;
        while r_neg <= q.max(p) {
            r_neg += pq;
        }
        let negated: Vec<i64> = profile_stream(&t)
            .coeff_set
            .iter()
            .rev()
            .map(|&a| -a)
            .collect();
        prop_assert_eq!(
            profile_stream(&Triple::new(p, q, r_neg).unwrap()).coeff_set,
            negated
        );
    }

    #[test]
    fn height_witnesses_match_their_targets(
        p in prop::sample::select(vec![3u64, 5, 7, 11, 13]),
        seed in 0u64..64,
    ) {
        let h = 1 + seed % ((p + 1) / 2);
        let opts = inex::SolveOptions { verify: p <= 7, ..Default::default() };
        let w = inex::solve_height(p, h, &opts).unwrap();
        prop_assert_eq!(w.classification.predicted_height, h as i64);
        if p <= 7 {
            prop_assert_eq!(w.verified, Some(true));
        }
    }
}

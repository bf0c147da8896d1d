use proptest::prelude::*;
use search_game::line::{
    compute_hw, efficient_interval, efficient_strategy, game_value_line, line_certificate,
    sample_seeker, seeker_starts, verify_hider,
};
use search_game::oracle::greedy_loop_starts;
use search_game::rational::from_u64;

fn nontrivial() -> impl Strategy<Value = (u64, u32)> {
    (2u32..=6).prop_flat_map(|k| ((1u64 << k) + 1..=(1u64 << k) + 300, Just(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bezout_identity((n, k) in nontrivial()) {
        let bz = compute_hw(n, k).unwrap();
        let (m, c) = (n as i128 - 1, bz.c as i128);
        if bz.is_coprime() {
            prop_assert_eq!(bz.h as i128 * m - bz.w as i128 * c, 1);
            prop_assert!(bz.h < bz.c);
        } else {
            prop_assert_eq!(bz.h as i128 * bz.gcd as i128, c);
            prop_assert_eq!(bz.w as i128 * bz.gcd as i128, m);
        }
    }

    #[test]
    fn greedy_starts_match_loop((n, k) in nontrivial()) {
        let bz = compute_hw(n, k).unwrap();
        let starts = seeker_starts(&bz);
        prop_assert_eq!(starts.len() as u64, bz.w);
        prop_assert_eq!(&starts, &greedy_loop_starts(n, k, 1 << 20).unwrap());
        for (t, &s) in starts.iter().enumerate() {
            prop_assert_eq!(sample_seeker(n, k, t as u64).unwrap(), s);
        }
    }

    #[test]
    fn line_solution_is_tight((n, k) in nontrivial()) {
        let sol = game_value_line(n, k).unwrap();
        let cert = line_certificate(&sol).unwrap();
        prop_assert!(cert.is_tight());
        prop_assert_eq!(&cert.seeker_guarantee, &sol.value);
        let report = verify_hider(&sol.hider, n, k).unwrap();
        prop_assert!(report.passed(), "{:?}", report.failures());
    }

    #[test]
    fn efficient_strategies_cover_their_interval((n, k) in nontrivial(), pick in any::<prop::sample::Index>()) {
        let v = pick.index(n as usize) as u64;
        prop_assume!(v != 1);
        let iv = efficient_interval(v, n, k).unwrap();
        let c = (1u64 << k) - 2;
        prop_assert!(iv.len() == c || iv.len() == c + 1);
        let tree = efficient_strategy(v, n, k).unwrap();
        prop_assert!(tree.height() <= k);
        let mut covered: Vec<u64> = tree.covered_set().into_iter().map(|x| x as u64).collect();
        covered.sort_unstable();
        let mut expect: Vec<u64> = iv.iter().collect();
        expect.sort_unstable();
        prop_assert_eq!(covered, expect);
    }

    #[test]
    fn value_is_at_most_capacity_ratio((n, k) in nontrivial()) {
        let bz = compute_hw(n, k).unwrap();
        // Each strategy covers at most c+2 of n vertices, c+1 when it avoids an end.
        prop_assert!(bz.value() * from_u64(n) <= from_u64(bz.c + 2));
    }
}

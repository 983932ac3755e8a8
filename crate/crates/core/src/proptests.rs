//! Property tests over randomly generated inputs.

use crate::combinatorics::{parse_rational, rat_string};
use crate::comb::{verify_comb, Comb};
use crate::pairing::{project, sample_pairing};
use crate::power_series::{renewal_coefficients, series_from_lengths};
use crate::renewal::{enumerate_oracle, hit, Variant};
use crate::{LengthMultiset, Multigraph, TruncatedSeries};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_multiset() -> impl Strategy<Value = LengthMultiset> {
    prop::collection::btree_map(1u64..6, 1u64..3, 1..4).prop_filter_map("total size at most 7", |counts| {
        let m: u64 = counts.values().sum();
        (m <= 7).then(|| LengthMultiset::from_counts(counts).expect("positive lengths"))
    })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::WithReplacement), Just(Variant::WithoutReplacement), Just(Variant::SizeBiased)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_hit_matches_enumeration(lengths in small_multiset(), k in 1u64..12, v in variant()) {
        let exact = hit(&lengths, k, v).unwrap();
        let oracle = enumerate_oracle(&lengths, k, v).unwrap();
        prop_assert_eq!(&exact.value, &oracle.value);
        prop_assert!(exact.value >= BigRational::zero() && exact.value <= BigRational::one());
    }

    #[test]
    fn renewal_series_inverts_one_minus_f(lengths in small_multiset(), t in 1usize..30) {
        let f: TruncatedSeries<BigRational> = series_from_lengths(&lengths, t);
        let r = renewal_coefficients(&f, t).unwrap();
        for j in 0..=t {
            let mut conv = r.coeff(j).clone();
            for i in 1..=j {
                conv -= f.coeff(i) * r.coeff(j - i);
            }
            let expected = if j == 0 { BigRational::one() } else { BigRational::zero() };
            prop_assert_eq!(conv, expected);
        }
    }

    #[test]
    fn projected_pairings_are_regular(half in 1usize..40, d in 1usize..5, seed in any::<u64>()) {
        let n = if d % 2 == 1 { 2 * half } else { half };
        let g = project(&sample_pairing(n, d, seed).unwrap());
        prop_assert!(g.is_regular(d));
        prop_assert_eq!(g.edge_count(), n * d / 2);
    }

    #[test]
    fn edge_list_round_trips(n in 1usize..20, raw in prop::collection::vec((0u32..20, 0u32..20), 0..40)) {
        let edges: Vec<(u32, u32)> = raw.into_iter().map(|(u, v)| (u % n as u32, v % n as u32)).collect();
        let g = Multigraph::from_edges(n, &edges).unwrap();
        let back = Multigraph::from_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.multiplicities(), g.multiplicities());
        prop_assert_eq!(back.n(), n);
    }

    #[test]
    fn rational_strings_round_trip(num in -1_000_000i64..1_000_000, den in 1i64..1_000_000) {
        let r = BigRational::new(num.into(), den.into());
        prop_assert_eq!(parse_rational(&rat_string(&r)), Some(r));
    }

    #[test]
    fn relabelled_combs_verify(k in 2usize..6, spine in 2usize..6, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let n = k * spine;
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let teeth: Vec<Vec<u32>> = (0..spine).map(|s| (0..k).map(|j| perm[s * k + j]).collect()).collect();
        let mut edges = Vec::new();
        for t in &teeth {
            edges.extend(t.windows(2).map(|w| (w[0], w[1])));
        }
        edges.extend(teeth.windows(2).map(|w| (w[0][0], w[1][0])));
        let g = Multigraph::from_edges(n, &edges).unwrap();
        let comb = Comb { spine: teeth.iter().map(|t| t[0]).collect(), teeth };
        prop_assert!(verify_comb(&g, &comb, n, k));
        let mut broken = comb.clone();
        broken.spine.swap(0, spine - 1);
        prop_assert!(!verify_comb(&g, &broken, n, k));
        broken.teeth.swap(0, spine - 1);
        prop_assert_eq!(verify_comb(&g, &broken, n, k), spine <= 3);
    }
}

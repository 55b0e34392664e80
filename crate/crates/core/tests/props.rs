//! Property tests for the serialization round trip, the distance metric,
//! and the strategy/column invariants.

use proptest::prelude::*;

use reclab_core::bench::{bin_lengths, BinScheme};
use reclab_core::csv::{parse_csv, to_csv_string};
use reclab_core::kmeans::{partial_distance, NO_OVERLAP_DISTANCE};
use reclab_core::matrix::{Rating, RatingsMatrix, Transaction};
use reclab_core::strategy::{threshold_recommend, ThresholdConfig};

fn arb_cells(n_users: usize, n_articles: usize) -> impl Strategy<Value = Vec<Option<i16>>> {
    prop::collection::vec(prop::option::of(-100i16..=100), n_users * n_articles)
}

fn arb_matrix() -> impl Strategy<Value = RatingsMatrix> {
    (1usize..=8, 1usize..=8)
        .prop_flat_map(|(u, a)| (Just(u), Just(a), arb_cells(u, a)))
        .prop_map(|(u, a, tenths)| {
            let cells = tenths
                .into_iter()
                .map(|t| t.map(|t| Rating::from_tenths(t).unwrap()))
                .collect();
            RatingsMatrix::from_cells(u, a, cells).unwrap()
        })
}

fn arb_sparse_vector(len: usize) -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(
        prop::option::of((-100i16..=100).prop_map(|t| f64::from(t) / 10.0)),
        len,
    )
}

proptest! {
    #[test]
    fn csv_round_trip_is_exact(m in arb_matrix()) {
        let back = parse_csv(&to_csv_string(&m)).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn partial_distance_is_symmetric_and_zero_iff_equal(
        (a, b) in (1usize..=10).prop_flat_map(|n| (arb_sparse_vector(n), arb_sparse_vector(n)))
    ) {
        let d = partial_distance(&a, &b);
        prop_assert_eq!(d, partial_distance(&b, &a));
        prop_assert!(d >= 0.0);

        let co_present: Vec<(f64, f64)> = a
            .iter()
            .zip(&b)
            .filter_map(|(x, y)| x.zip(*y))
            .collect();
        if co_present.is_empty() {
            prop_assert_eq!(d, NO_OVERLAP_DISTANCE);
        } else if co_present.iter().all(|(x, y)| x == y) {
            prop_assert_eq!(d, 0.0);
        } else {
            prop_assert!(d > 0.0);
        }
    }

    #[test]
    fn column_stats_are_consistent(m in arb_matrix(), article_pick in 0usize..8) {
        let a = article_pick % m.n_articles();
        let ratio = m.missing_ratio(a);
        prop_assert!((0.0..=1.0).contains(&ratio));
        let mean = m.article_mean(a);
        prop_assert_eq!(mean.is_none(), ratio == 1.0);
        if let Some(mu) = mean {
            let present: Vec<f64> = (0..m.n_users())
                .filter_map(|u| m.get(u, a).map(Rating::value))
                .collect();
            let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(mu >= lo - 1e-12 && mu <= hi + 1e-12);
        }
    }

    #[test]
    fn threshold_results_shrink_as_theta_rises(
        m in arb_matrix(),
        theta_tenths in -100i16..=90,
        txn_seed in 0usize..64,
    ) {
        prop_assume!(m.n_articles() >= 2);
        let txn = Transaction::for_matrix(vec![txn_seed % m.n_articles()], &m).unwrap();
        let low = ThresholdConfig { theta: Rating::from_tenths(theta_tenths).unwrap() };
        let high = ThresholdConfig { theta: Rating::from_tenths(theta_tenths + 10).unwrap() };
        let at_low = threshold_recommend(&m, &txn, &low);
        let at_high = threshold_recommend(&m, &txn, &high);
        prop_assert!(at_high.len() <= at_low.len());
        // the recommended article set shrinks, not just the count
        for &(article, _) in at_high.entries() {
            prop_assert!(at_low.entries().iter().any(|&(a, _)| a == article));
        }
    }

    #[test]
    fn histogram_totals_match_input_size(
        lengths in prop::collection::vec(0usize..=80, 0..=200),
        labeled in any::<bool>(),
    ) {
        let scheme = if labeled { BinScheme::labeled_default() } else { BinScheme::Content };
        let h = bin_lengths(&lengths, scheme);
        prop_assert_eq!(h.total, lengths.len() as u64);
        prop_assert_eq!(h.bins.iter().map(|b| b.count).sum::<u64>(), h.total);
        if !lengths.is_empty() {
            // five bins, each rounded to one decimal: at most 0.05 drift apiece
            let sum: f64 = reclab_core::bench::proportions(&h).unwrap().iter().sum();
            prop_assert!((sum - 100.0).abs() <= 0.25 + 1e-9, "proportions sum {sum}");
        }
    }
}

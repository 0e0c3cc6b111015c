mod common;

use std::collections::BTreeSet;

use paley_km::comb::dyck::{enumerate_marked_dyck, md_of_partition, strict_dyck_words};
use paley_km::comb::partition::{all_partitions, enumerate_partitions};
use paley_km::comb::vn::{vn_exact, vn_limit, InclusionExclusion};
use paley_km::paley_conference;

#[test]
fn partition_counts_match_stirling_rows() {
    let bell = common::bell_numbers(9);
    for k in 1..=9usize {
        let by_t: usize = (1..=k).map(|t| enumerate_partitions(k, t).count()).sum();
        assert_eq!(by_t as u64, bell[k]);
    }
}

#[test]
fn sparse_partitions_are_bounded_by_block_count() {
    // fewer blocks than k/2 + 1 means at most n^t nonzero summands
    for q in [5u64, 13] {
        let s = paley_conference(q).unwrap();
        let n = s.order() as i128;
        for k in 2..=6usize {
            for pi in all_partitions(k) {
                if 2 * pi.t() < k + 2 {
                    let v = vn_exact(&pi, &s).unwrap();
                    assert!(v.sum.abs() <= n.pow(pi.t() as u32), "{pi} at n = {n}");
                }
            }
        }
    }
}

#[test]
fn marked_dyck_words_of_partitions_cover_each_set_once() {
    for k in [4usize, 6, 8] {
        for t in k / 2 + 1..=k {
            let expected: BTreeSet<String> = enumerate_marked_dyck(k, t).into_iter().map(|w| w.to_string()).collect();
            let mut union = BTreeSet::new();
            let mut total = 0;
            for pi in enumerate_partitions(k, t) {
                if vn_limit(&pi) == 0 {
                    continue;
                }
                for w in md_of_partition(&pi).unwrap() {
                    total += 1;
                    union.insert(w.to_string());
                }
            }
            assert_eq!(union, expected, "k = {k}, t = {t}");
            assert_eq!(total, expected.len(), "k = {k}, t = {t}: words are shared between partitions");
        }
    }
}

#[test]
fn strict_dyck_words_follow_catalan_numbers() {
    for s in 1..=10usize {
        assert_eq!(strict_dyck_words(s).len() as u128, common::catalan(s - 1));
    }
}

#[test]
fn limits_vanish_for_odd_lengths_and_loops() {
    for k in (1..=9usize).step_by(2) {
        assert!(all_partitions(k).all(|pi| vn_limit(&pi) == 0));
    }
    for pi in all_partitions(8).filter(|pi| pi.has_loop()) {
        assert_eq!(vn_limit(&pi), 0);
    }
}

#[test]
fn inclusion_exclusion_matches_enumeration_at_q_29() {
    let s = paley_conference(29).unwrap();
    let table = InclusionExclusion::new(&s, 5).unwrap();
    for pi in all_partitions(5) {
        assert_eq!(table.vn(&pi).unwrap(), vn_exact(&pi, &s).unwrap(), "{pi}");
    }
}

#![allow(dead_code)]

use proptest::prelude::*;
use search_game::rational::ratio;
use search_game::{HiderDistribution, ProfitTable, Tree};

/// Random tree on `n` vertices: vertex `i` hangs off some earlier vertex.
pub fn tree(max_n: usize) -> impl Strategy<Value = Tree> {
    (2..=max_n).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
        parents.prop_map(move |ps| {
            let edges = ps.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
            Tree::new(n, edges).unwrap()
        })
    })
}

/// Non-increasing profits `p(1) >= ... >= p(k) >= 1`.
pub fn profit(k: u32) -> impl Strategy<Value = ProfitTable> {
    prop::collection::vec(0u64..4, k as usize).prop_map(|steps| {
        let mut values: Vec<u64> = steps.iter().rev().scan(0, |acc, s| {
            *acc += s + 1;
            Some(*acc)
        }).collect();
        values.reverse();
        ProfitTable::new(values).unwrap()
    })
}

/// A hider with small integer weights, at least one positive.
pub fn hider(n: usize) -> impl Strategy<Value = HiderDistribution> {
    prop::collection::vec(0i64..6, n).prop_map(move |mut w| {
        if w.iter().all(|&x| x == 0) {
            w[0] = 1;
        }
        let total: i64 = w.iter().sum();
        HiderDistribution::new(w.into_iter().map(|x| ratio(x, total)).collect()).unwrap()
    })
}

pub fn instance(max_n: usize, max_k: u32) -> impl Strategy<Value = (Tree, ProfitTable, HiderDistribution)> {
    (tree(max_n), 1..=max_k).prop_flat_map(|(t, k)| {
        let n = t.n();
        (Just(t), profit(k), hider(n))
    })
}

//! Best response of the seeker against a fixed hider, by dynamic programming
//! over visibility sequences.
//!
//! The tree is rooted at vertex 0. For the edge `e` into `v`, `B[e][L]` is the
//! best profit inside the subtree of `v` given `L(e) = L`; for the `i`-th child
//! edge of `v`, `C[e_i][S]` is the best profit of the first `i` child subtrees
//! given that their visibility sequences union to `S`. Masks are scanned in
//! descending order and only a strictly better value replaces the incumbent,
//! so ties go to the lexicographically larger sequence.

use crate::error::{GameError, Result};
use crate::game::{HiderDistribution, ProfitTable, TreeInstance};
use crate::graph::Tree;
use crate::labeling::{labeling_discovery_times, labeling_is_valid, ValidLabeling};
use crate::scalar::Scalar;
use crate::Rational;

/// Largest budget the tables are allowed to grow to.
pub const MAX_DP_BUDGET: u32 = 16;

/// Table value; `None` is minus infinity and absorbs addition.
type Cell<S> = Option<S>;

fn add<S: Scalar>(a: &Cell<S>, b: &Cell<S>) -> Cell<S> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.clone() + y.clone()),
        _ => None,
    }
}

fn better<S: Scalar>(candidate: &Cell<S>, incumbent: &Cell<S>) -> bool {
    match (candidate, incumbent) {
        (Some(_), None) => true,
        (Some(x), Some(y)) => x > y,
        _ => false,
    }
}

/// Submasks of `mask` in descending order, `mask` itself first and `0` last.
fn submasks_desc(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = (cur != 0).then(|| (cur - 1) & mask);
        Some(cur)
    })
}

/// Filled tables with the arg-max bookkeeping.
#[derive(Debug, Clone)]
pub struct DpTables<S> {
    /// Number of labels, `k + 1`.
    pub width: u32,
    /// `B[e][L]`, indexed by the id of the edge into the child.
    pub b: Vec<Vec<Cell<S>>>,
    /// Chosen `S(v)` for each `B[e][L]`.
    pub b_choice: Vec<Vec<u32>>,
    /// `C[e_i][S]`, indexed by the id of the `i`-th child edge.
    pub c: Vec<Vec<Cell<S>>>,
    /// `(L_i, rest)` for each `C[e_i][S]`.
    pub c_choice: Vec<Vec<(u32, u32)>>,
}

impl<S> DpTables<S> {
    /// Stored `B` and `C` entries.
    pub fn entries(&self) -> usize {
        self.b.iter().map(Vec::len).sum::<usize>() + self.c.iter().map(Vec::len).sum::<usize>()
    }
}

/// Output of the dynamic program.
#[derive(Debug, Clone)]
pub struct DpSolution<S> {
    pub value: S,
    pub labels: Vec<u32>,
    pub tables: DpTables<S>,
    /// Subset pairs examined while filling the tables.
    pub work: u64,
}

/// Maximizes `Σ_v y_v p(h_f(v))` over valid labelings `f` with range `{0..k}`.
pub fn best_response_tables<S: Scalar>(tree: &Tree, profit: &ProfitTable, y: &[S]) -> Result<DpSolution<S>> {
    let k = profit.k();
    if k > MAX_DP_BUDGET {
        return Err(GameError::GuardExceeded(format!(
            "budget {k} exceeds the table limit {MAX_DP_BUDGET}"
        )));
    }
    if y.len() != tree.n() {
        return Err(GameError::InvalidDistribution(format!(
            "{} weights for {} vertices",
            y.len(),
            tree.n()
        )));
    }
    let width = k + 1;
    let size = 1usize << width;
    let m = tree.edges().len();
    let rooted = tree.orient(0);
    // gain(v, l) = y_v p(k + 1 - l) when the smallest label at v is l.
    let gain = |v: usize, l: u32| -> S { y[v].clone() * S::from_count(profit.get(k + 1 - l)) };

    let mut tables = DpTables {
        width,
        b: vec![Vec::new(); m],
        b_choice: vec![Vec::new(); m],
        c: vec![Vec::new(); m],
        c_choice: vec![Vec::new(); m],
    };
    let mut work = 0u64;
    let mut empty_c: Vec<Cell<S>> = vec![None; size];
    empty_c[0] = Some(S::zero());

    for &v in rooted.order.iter().rev() {
        // C tables over the children of v.
        let mut prev_id: Option<usize> = None;
        for &(_, e) in &rooted.children[v] {
            let mut cur = vec![None; size];
            let mut choice = vec![(0u32, 0u32); size];
            {
                let prev = prev_id.map_or(&empty_c, |id| &tables.c[id]);
                let b = &tables.b[e];
                for s in 0..size as u32 {
                    for l in submasks_desc(s).filter(|&l| l != 0) {
                        work += 1;
                        if b[l as usize].is_none() {
                            continue;
                        }
                        for rest in [s & !l, s & !(l & !1)] {
                            let cand = add(&b[l as usize], &prev[rest as usize]);
                            if better(&cand, &cur[s as usize]) {
                                cur[s as usize] = cand;
                                choice[s as usize] = (l, rest);
                            }
                        }
                    }
                }
            }
            tables.c[e] = cur;
            tables.c_choice[e] = choice;
            prev_id = Some(e);
        }
        let Some((_, up)) = rooted.parent[v] else {
            continue;
        };
        // B table for the edge into v.
        let below = prev_id.map_or(&empty_c, |id| &tables.c[id]);
        let mut b = vec![None; size];
        let mut b_choice = vec![0u32; size];
        for l in 1..size as u32 {
            let l1 = l.trailing_zeros();
            if l1 == 0 {
                for sv in [l, l & !1] {
                    work += 1;
                    if better(&below[sv as usize], &b[l as usize]) {
                        b[l as usize] = below[sv as usize].clone();
                        b_choice[l as usize] = sv;
                    }
                }
            } else {
                let above = l & !(1 << l1);
                for extra in submasks_desc((1 << l1) - 1) {
                    work += 1;
                    let sv = above | extra;
                    let lowest = if extra == 0 { l1 } else { extra.trailing_zeros() };
                    let cand = add(&Some(gain(v, lowest)), &below[sv as usize]);
                    if better(&cand, &b[l as usize]) {
                        b[l as usize] = cand;
                        b_choice[l as usize] = sv;
                    }
                }
            }
        }
        tables.b[up] = b;
        tables.b_choice[up] = b_choice;
    }

    // Aggregate at the root.
    let root = rooted.root;
    let top = rooted.children[root].last().map_or(&empty_c, |&(_, id)| &tables.c[id]);
    let mut best: Cell<S> = None;
    let mut best_s = 0u32;
    for s in (0..size as u32).rev() {
        let own = match s {
            0 => S::zero(),
            _ => gain(root, s.trailing_zeros()),
        };
        let cand = add(&Some(own), &top[s as usize]);
        if better(&cand, &best) {
            best = cand;
            best_s = s;
        }
    }
    let value = best.expect("the all-zero labeling is always feasible");

    // Walk the back-pointers down from the root.
    let mut labels = vec![0u32; m];
    let mut stack = vec![(root, best_s)];
    while let Some((v, mut s)) = stack.pop() {
        for &(child, e) in rooted.children[v].iter().rev() {
            let (l, rest) = tables.c_choice[e][s as usize];
            labels[e] = l.trailing_zeros();
            stack.push((child, tables.b_choice[e][l as usize]));
            s = rest;
        }
        debug_assert_eq!(s, 0);
    }
    debug_assert!(labeling_is_valid(&labels, tree, k));

    Ok(DpSolution {
        value,
        labels,
        tables,
        work,
    })
}

/// Best response against the instance's hider, in exact arithmetic.
pub fn best_response_dp(instance: &TreeInstance) -> Result<(Rational, ValidLabeling)> {
    let y = instance.hider.as_ref().ok_or_else(|| {
        GameError::InvalidDistribution("instance has no hider distribution".into())
    })?;
    best_response(&instance.tree, &instance.profit, y)
}

/// Best response against `y`.
pub fn best_response(tree: &Tree, profit: &ProfitTable, y: &HiderDistribution) -> Result<(Rational, ValidLabeling)> {
    let sol = best_response_tables(tree, profit, y.probs())?;
    let labeling = ValidLabeling::new(tree, sol.labels, profit.k())?;
    Ok((sol.value, labeling))
}

/// `Σ_v y_v p(h_f(v))` in any scalar type.
pub fn labeling_value<S: Scalar>(labels: &[u32], tree: &Tree, profit: &ProfitTable, y: &[S]) -> S {
    labeling_discovery_times(labels, tree, profit.k())
        .into_iter()
        .zip(y)
        .fold(S::zero(), |acc, (t, w)| acc + w.clone() * S::from_count(profit.get(t)))
}

/// Whether no single label increase yields a valid labeling of strictly larger profit.
pub fn is_locally_maximal<S: Scalar>(labels: &[u32], tree: &Tree, profit: &ProfitTable, y: &[S]) -> bool {
    let k = profit.k();
    let base = labeling_value(labels, tree, profit, y);
    let mut trial = labels.to_vec();
    for id in 0..labels.len() {
        for l in labels[id] + 1..=k {
            trial[id] = l;
            if labeling_is_valid(&trial, tree, k) && labeling_value(&trial, tree, profit, y) > base {
                return false;
            }
        }
        trial[id] = labels[id];
    }
    true
}

//! Brute-force ground truth: exhaustive strategy enumeration, exact LP values
//! over the enumerated catalog, and direct validity tests.
//!
//! Strategies are enumerated per (component, remaining budget) and collapsed
//! to their payoff profiles `(p(h_T(v)))_v`. Optionally, profiles dominated
//! componentwise by another profile of the same component are dropped; with a
//! non-negative hider this never changes a best-response or game value.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{GameError, Result};
use crate::game::{HiderDistribution, ModInterval, ProfitTable, TreeInstance};
use crate::graph::{Tree, Vertex};
use crate::equilibrium::solve_master;
use crate::rational::{common_denominator, scaled_numerators};
use crate::strategy::{SearchTree, SeekerMixedStrategy, SeekerStrategy, VertexSet};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogOptions {
    pub prune_dominated: bool,
    /// Cap on distinct profiles kept for any single component.
    pub max_profiles: usize,
    /// Cap on child-profile pairs combined over the whole enumeration.
    pub max_combinations: u64,
}

impl CatalogOptions {
    /// Every distinct profile is kept.
    pub fn exhaustive() -> Self {
        CatalogOptions {
            prune_dominated: false,
            max_profiles: 2_000_000,
            max_combinations: 200_000_000,
        }
    }

    /// Dominated profiles are dropped at every component.
    pub fn pruned() -> Self {
        CatalogOptions {
            prune_dominated: true,
            ..Self::exhaustive()
        }
    }
}

impl Default for CatalogOptions {
    fn default() -> Self {
        Self::exhaustive()
    }
}

#[derive(Debug)]
enum Recipe {
    Leaf,
    Split {
        /// Positions of the queried edge's endpoints in the sorted component.
        edge: (usize, usize),
        first: (Rc<ComponentSet>, usize),
        second: (Rc<ComponentSet>, usize),
    },
}

#[derive(Debug)]
struct ComponentSet {
    /// Profiles over the component's vertices in sorted order.
    profiles: Vec<Vec<u64>>,
    recipes: Vec<Recipe>,
    /// Number of strategies before deduplication.
    raw: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    /// A run of consecutive vertices on a path; shape depends only on length.
    Run(usize, u32),
    Set(Vec<Vertex>, u32),
}

struct Enumerator<'a> {
    tree: &'a Tree,
    profit: &'a ProfitTable,
    options: CatalogOptions,
    path: bool,
    memo: HashMap<Key, Rc<ComponentSet>>,
    combinations: u64,
}

impl Enumerator<'_> {
    fn key(&self, comp: &[Vertex], budget: u32) -> Key {
        if self.path {
            Key::Run(comp.len(), budget)
        } else {
            Key::Set(comp.to_vec(), budget)
        }
    }

    fn run(&mut self, comp: &[Vertex], budget: u32) -> Result<Rc<ComponentSet>> {
        let key = self.key(comp, budget);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(Rc::clone(hit));
        }
        let k = self.profit.k();
        let mut profiles: Vec<Vec<u64>> = Vec::new();
        let mut recipes = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let leaf = if comp.len() == 1 {
            vec![self.profit.get(k - budget)]
        } else {
            vec![0; comp.len()]
        };
        index.insert(leaf.clone(), 0);
        profiles.push(leaf);
        recipes.push(Recipe::Leaf);
        let mut raw: u128 = 1;

        if budget >= 1 && comp.len() >= 2 {
            for id in self.tree.edges_within(comp) {
                let (a, b) = self.tree.split(comp, id);
                let sa = self.run(&a, budget - 1)?;
                let sb = self.run(&b, budget - 1)?;
                raw = raw.saturating_add(sa.raw.saturating_mul(sb.raw));
                let pos = |part: &[Vertex]| -> Vec<usize> {
                    part.iter().map(|v| comp.binary_search(v).expect("subset")).collect()
                };
                let (pa, pb) = (pos(&a), pos(&b));
                let (u, v) = self.tree.edge(id);
                let edge = (
                    comp.binary_search(&u).expect("endpoint"),
                    comp.binary_search(&v).expect("endpoint"),
                );
                self.combinations += (sa.profiles.len() * sb.profiles.len()) as u64;
                if self.combinations > self.options.max_combinations {
                    return Err(GameError::GuardExceeded(format!(
                        "more than {} profile combinations",
                        self.options.max_combinations
                    )));
                }
                let mut buf = vec![0u64; comp.len()];
                for (ia, xa) in sa.profiles.iter().enumerate() {
                    for (&p, &val) in pa.iter().zip(xa) {
                        buf[p] = val;
                    }
                    for (ib, xb) in sb.profiles.iter().enumerate() {
                        for (&p, &val) in pb.iter().zip(xb) {
                            buf[p] = val;
                        }
                        if index.contains_key(&buf) {
                            continue;
                        }
                        index.insert(buf.clone(), profiles.len());
                        profiles.push(buf.clone());
                        recipes.push(Recipe::Split {
                            edge,
                            first: (Rc::clone(&sa), ia),
                            second: (Rc::clone(&sb), ib),
                        });
                        if profiles.len() > self.options.max_profiles {
                            return Err(GameError::GuardExceeded(format!(
                                "component of {} vertices has more than {} profiles",
                                comp.len(),
                                self.options.max_profiles
                            )));
                        }
                    }
                }
            }
        }
        let set = if self.options.prune_dominated {
            let keep = undominated(&profiles);
            let mut recipes: Vec<Option<Recipe>> = recipes.into_iter().map(Some).collect();
            ComponentSet {
                profiles: keep.iter().map(|&i| std::mem::take(&mut profiles[i])).collect(),
                recipes: keep.iter().map(|&i| recipes[i].take().expect("unique")).collect(),
                raw,
            }
        } else {
            ComponentSet {
                profiles,
                recipes,
                raw,
            }
        };
        let set = Rc::new(set);
        self.memo.insert(key, Rc::clone(&set));
        Ok(set)
    }
}

/// Indices of profiles not dominated by another (distinct) profile, in input order.
fn undominated(profiles: &[Vec<u64>]) -> Vec<usize> {
    let binary = profiles.iter().all(|p| p.iter().all(|&x| x <= 1));
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    let sums: Vec<u64> = profiles.iter().map(|p| p.iter().sum()).collect();
    order.sort_by(|&a, &b| sums[b].cmp(&sums[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    if binary {
        let words = profiles.first().map_or(0, |p| p.len().div_ceil(64));
        let bits: Vec<Vec<u64>> = profiles
            .iter()
            .map(|p| {
                let mut w = vec![0u64; words];
                for (i, &x) in p.iter().enumerate() {
                    if x == 1 {
                        w[i / 64] |= 1 << (i % 64);
                    }
                }
                w
            })
            .collect();
        for &i in &order {
            let dominated = kept.iter().any(|&j| {
                sums[j] > sums[i] && bits[i].iter().zip(&bits[j]).all(|(a, b)| a & !b == 0)
            });
            if !dominated {
                kept.push(i);
            }
        }
    } else {
        for &i in &order {
            let dominated = kept.iter().any(|&j| {
                sums[j] > sums[i] && profiles[i].iter().zip(&profiles[j]).all(|(a, b)| a <= b)
            });
            if !dominated {
                kept.push(i);
            }
        }
    }
    kept.sort_unstable();
    kept
}

/// All strategies of height at most `k`, up to payoff-profile equivalence.
pub struct StrategyCatalog {
    tree: Tree,
    profit: ProfitTable,
    root: Rc<ComponentSet>,
    pub options: CatalogOptions,
}

impl std::fmt::Debug for StrategyCatalog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StrategyCatalog")
            .field("n", &self.tree.n())
            .field("k", &self.profit.k())
            .field("profiles", &self.len())
            .field("raw", &self.raw_count())
            .finish()
    }
}

impl StrategyCatalog {
    pub fn len(&self) -> usize {
        self.root.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.profiles.is_empty()
    }

    /// Number of distinct strategies (as query trees) before deduplication.
    pub fn raw_count(&self) -> u128 {
        self.root.raw
    }

    pub fn profiles(&self) -> &[Vec<u64>] {
        &self.root.profiles
    }

    pub fn profile(&self, i: usize) -> &[u64] {
        &self.root.profiles[i]
    }

    /// An explicit strategy realizing profile `i`.
    pub fn strategy(&self, i: usize) -> SearchTree {
        let all: Vec<Vertex> = (0..self.tree.n()).collect();
        build(&self.tree, all, &self.root, i)
    }

    pub fn covered_set(&self, i: usize) -> Vec<Vertex> {
        self.strategy(i).covered_set()
    }

    pub fn discovery_times(&self, i: usize) -> Vec<u32> {
        self.strategy(i).discovery_times(self.tree.n(), self.profit.k())
    }
}

fn build(tree: &Tree, comp: Vec<Vertex>, set: &ComponentSet, i: usize) -> SearchTree {
    match &set.recipes[i] {
        Recipe::Leaf => SearchTree::leaf(VertexSet::List(comp)),
        Recipe::Split {
            edge,
            first,
            second,
        } => {
            let (u, v) = (comp[edge.0], comp[edge.1]);
            let id = tree.edge_id(u, v).expect("recipe edge exists");
            let (a, b) = tree.split(&comp, id);
            let left = build(tree, a, &first.0, first.1);
            let right = build(tree, b, &second.0, second.1);
            SearchTree::node(VertexSet::List(comp), (u, v), left, right)
        }
    }
}

/// Enumerates every strategy of height at most `profit.k()` on `tree`.
pub fn enumerate_strategies(tree: &Tree, profit: &ProfitTable, options: CatalogOptions) -> Result<StrategyCatalog> {
    let mut e = Enumerator {
        tree,
        profit,
        options,
        path: tree.is_path(),
        memo: HashMap::new(),
        combinations: 0,
    };
    let all: Vec<Vertex> = (0..tree.n()).collect();
    let root = e.run(&all, profit.k())?;
    Ok(StrategyCatalog {
        tree: tree.clone(),
        profit: profit.clone(),
        root,
        options,
    })
}

/// `y` scaled to integers: `(numerators, denominator)`.
fn integer_weights(y: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(y);
    (scaled_numerators(y, &den), den)
}

/// Up to `limit` profiles with `Σ_v w_v profile_v > floor`, best first (ties by index).
fn top_profiles(profiles: &[Vec<u64>], weights: &[BigInt], floor: &BigInt, limit: usize) -> Vec<(usize, BigInt)> {
    let small: Option<Vec<i128>> = weights.iter().map(ToPrimitive::to_i128).collect();
    let fits = small.as_ref().is_some_and(|w| {
        let wmax = w.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        let pmax = profiles.iter().flatten().copied().max().unwrap_or(0) as u128;
        wmax.checked_mul(pmax)
            .and_then(|x| x.checked_mul(w.len() as u128))
            .is_some_and(|x| x < (1u128 << 126))
    });
    let mut hits: Vec<(usize, BigInt)> = Vec::new();
    let keep = |hits: &mut Vec<(usize, BigInt)>, i: usize, score: BigInt| {
        hits.push((i, score));
        if hits.len() > 4 * limit {
            hits.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            hits.truncate(limit);
        }
    };
    match (fits, small) {
        (true, Some(w)) => {
            let lo = floor.to_i128().unwrap_or(i128::MIN);
            for (i, p) in profiles.iter().enumerate() {
                let score: i128 = p.iter().zip(&w).map(|(&a, &b)| a as i128 * b).sum();
                if score > lo {
                    keep(&mut hits, i, BigInt::from(score));
                }
            }
        }
        _ => {
            for (i, p) in profiles.iter().enumerate() {
                let score: BigInt = p.iter().zip(weights).map(|(&a, b)| b * a).sum();
                if score > *floor {
                    keep(&mut hits, i, score);
                }
            }
        }
    }
    hits.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    hits.truncate(limit);
    hits
}

/// Index and scaled score of the first profile maximizing `Σ_v w_v profile_v`.
fn best_profile(profiles: &[Vec<u64>], weights: &[BigInt]) -> (usize, BigInt) {
    // Scores are non-negative, so -1 admits every profile.
    top_profiles(profiles, weights, &BigInt::from(-1), 1)
        .pop()
        .expect("catalog is never empty")
}

/// Best response by a linear scan of the (dominance-pruned) catalog.
pub fn brute_force_best_response(y: &HiderDistribution, tree: &Tree, profit: &ProfitTable) -> Result<(Rational, SearchTree)> {
    let catalog = enumerate_strategies(tree, profit, CatalogOptions::pruned())?;
    let (i, value) = catalog_best_response(&catalog, y);
    Ok((value, catalog.strategy(i)))
}

/// Best catalog entry against `y`, with its exact payoff.
pub fn catalog_best_response(catalog: &StrategyCatalog, y: &HiderDistribution) -> (usize, Rational) {
    let (w, den) = integer_weights(y.probs());
    let (i, score) = best_profile(catalog.profiles(), &w);
    (i, Rational::new(score, den))
}

/// Exact game value over a catalog with both equilibrium strategies.
#[derive(Debug, Clone)]
pub struct FullMatrixSolution {
    pub value: Rational,
    pub seeker: SeekerMixedStrategy,
    pub hider: HiderDistribution,
    pub catalog_size: usize,
    /// Catalog rows that entered the master program.
    pub active_rows: usize,
}

/// Violated rows added to the master per pricing pass.
const ROWS_PER_ROUND: usize = 8;

/// Solves `[D]` over every profile of `catalog` exactly.
///
/// Rows enter the master on demand: after each master solve the whole catalog
/// is scanned for the most violated row, so the final optimum is the optimum
/// of the full program.
pub fn catalog_value(catalog: &StrategyCatalog) -> Result<FullMatrixSolution> {
    let n = catalog.tree.n();
    let profiles = catalog.profiles();
    let uniform = HiderDistribution::uniform(n);
    let (first, _) = catalog_best_response(catalog, &uniform);
    let mut active = vec![first];
    for _ in 0..=profiles.len() {
        let rows: Vec<&[u64]> = active.iter().map(|&i| profiles[i].as_slice()).collect();
        let master = solve_master(n, &rows)?;
        let (w, den) = integer_weights(&master.y);
        let floor = (master.t.clone() * Rational::from_integer(den)).floor().to_integer();
        let violated = top_profiles(profiles, &w, &floor, ROWS_PER_ROUND);
        if !violated.is_empty() {
            for (i, _) in violated {
                if active.contains(&i) {
                    return Err(GameError::RepeatedColumn(active.len()));
                }
                active.push(i);
            }
            continue;
        }
        let hider = HiderDistribution::new(master.y)?;
        let mut support = Vec::new();
        let mut weights = Vec::new();
        for (&i, x) in active.iter().zip(&master.x) {
            if x.is_positive() {
                support.push(SeekerStrategy::Explicit(catalog.strategy(i)));
                weights.push(x.clone());
            }
        }
        let seeker = SeekerMixedStrategy::new(support, weights)?;
        return Ok(FullMatrixSolution {
            value: master.t,
            seeker,
            hider,
            catalog_size: profiles.len(),
            active_rows: active.len(),
        });
    }
    Err(GameError::GuardExceeded("catalog LP did not converge".into()))
}

/// Game value of `instance` from the dominance-pruned catalog.
pub fn full_matrix_value(instance: &TreeInstance) -> Result<FullMatrixSolution> {
    let catalog = enumerate_strategies(&instance.tree, &instance.profit, CatalogOptions::pruned())?;
    catalog_value(&catalog)
}

/// Start vertices produced by running the greedy loop directly.
pub fn greedy_loop_starts(n: u64, k: u32, max_steps: usize) -> Result<Vec<u64>> {
    let c = (1u64 << k) - 2;
    let m = n - 1;
    let mut starts = vec![0];
    let mut v = c + 1;
    while v != 0 && v != 1 {
        if starts.len() >= max_steps {
            return Err(GameError::GuardExceeded(format!("greedy loop exceeded {max_steps} steps")));
        }
        starts.push(v);
        v = (v + c) % m;
    }
    Ok(starts)
}

/// Direct pairwise test: equal positive labels need a strictly larger label between them.
pub fn labeling_is_valid_pairwise(labels: &[u32], tree: &Tree) -> bool {
    let m = labels.len();
    for e1 in 0..m {
        for e2 in e1 + 1..m {
            let l = labels[e1];
            if l == 0 || labels[e2] != l {
                continue;
            }
            let (a, _) = tree.edge(e1);
            let (c, _) = tree.edge(e2);
            let between = tree
                .path_edges(a, c)
                .into_iter()
                .filter(|&id| id != e1 && id != e2);
            if !between.into_iter().any(|id| labels[id] > l) {
                return false;
            }
        }
    }
    true
}

/// Maximal runs of `set` on the line as intervals modulo `n` (not merged across 0).
pub fn runs_of(set: &[Vertex], n: u64) -> Vec<ModInterval> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[j] + 1 {
            j += 1;
        }
        out.push(ModInterval::new(sorted[i] as u64, (j - i + 1) as u64, n).expect("valid run"));
        i = j + 1;
    }
    out
}

/// Covered sets of the unit-profit catalog on a path that no other covered set strictly contains.
pub fn maximal_covered_sets(n: usize, k: u32) -> Result<BTreeSet<Vec<Vertex>>> {
    let catalog = enumerate_strategies(&Tree::path(n), &ProfitTable::unit(k), CatalogOptions::exhaustive())?;
    let sets: Vec<Vec<Vertex>> = catalog
        .profiles()
        .iter()
        .map(|p| (0..n).filter(|&v| p[v] > 0).collect())
        .collect();
    let masks: Vec<u128> = sets
        .iter()
        .map(|s| s.iter().fold(0u128, |m, &v| m | 1 << v))
        .collect();
    Ok(sets
        .iter()
        .zip(&masks)
        .filter(|(_, &m)| !masks.iter().any(|&o| o != m && o & m == m))
        .map(|(s, _)| s.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn small_path_counts() {
        let unit = |k| ProfitTable::unit(k);
        let c = enumerate_strategies(&Tree::path(2), &unit(1), CatalogOptions::exhaustive()).unwrap();
        assert_eq!((c.len(), c.raw_count()), (2, 2));
        // The middle edge of a 4-path isolates nothing, so it shares the empty profile.
        let c = enumerate_strategies(&Tree::path(4), &unit(1), CatalogOptions::exhaustive()).unwrap();
        assert_eq!((c.len(), c.raw_count()), (3, 4));
        let c = enumerate_strategies(&Tree::path(4), &unit(1), CatalogOptions::pruned()).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn catalog_strategies_are_valid_and_match_profiles() {
        let tree = Tree::new(6, vec![(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)]).unwrap();
        let p = ProfitTable::new(vec![3, 2]).unwrap();
        let c = enumerate_strategies(&tree, &p, CatalogOptions::exhaustive()).unwrap();
        for i in 0..c.len() {
            let t = c.strategy(i);
            t.validate(&tree, 2).unwrap();
            assert_eq!(p.profile(&t.discovery_times(6, 2)), c.profile(i));
        }
    }

    #[test]
    fn line_values() {
        let v = |n, k| full_matrix_value(&TreeInstance::line(n, k)).unwrap().value;
        assert_eq!(v(5, 2), ratio(1, 2));
        assert_eq!(v(11, 3), ratio(3, 5));
        assert_eq!(v(12, 3), ratio(5, 9));
        assert_eq!(v(9, 3), ratio(3, 4));
    }

    #[test]
    fn star_values() {
        // The center needs all three edges queried, so the hider sits there until k = 3.
        let star = |k| TreeInstance::unit(Tree::star(3), k).unwrap();
        assert_eq!(full_matrix_value(&star(1)).unwrap().value, ratio(0, 1));
        assert_eq!(full_matrix_value(&star(2)).unwrap().value, ratio(0, 1));
        assert!(full_matrix_value(&star(3)).unwrap().value > ratio(0, 1));
        // Restricted to the leaves the pairs of leaf queries give 2/3.
        let leaves = HiderDistribution::new(vec![ratio(0, 1), ratio(1, 3), ratio(1, 3), ratio(1, 3)]).unwrap();
        let (v, _) = brute_force_best_response(&leaves, &Tree::star(3), &ProfitTable::unit(2)).unwrap();
        assert_eq!(v, ratio(2, 3));
    }

    #[test]
    fn equilibrium_pair_certifies_value() {
        let inst = TreeInstance::line(12, 3);
        let sol = full_matrix_value(&inst).unwrap();
        let payoffs = sol.seeker.vertex_payoffs(12, &inst.profit).unwrap();
        assert_eq!(payoffs.iter().min().unwrap(), &sol.value);
        let (_, best) = brute_force_best_response(&sol.hider, &inst.tree, &inst.profit).unwrap();
        let _ = best;
        let (_, v) = catalog_best_response(
            &enumerate_strategies(&inst.tree, &inst.profit, CatalogOptions::pruned()).unwrap(),
            &sol.hider,
        );
        assert_eq!(v, sol.value);
    }

    #[test]
    fn brute_force_examples() {
        let (v, _) = brute_force_best_response(&HiderDistribution::uniform(4), &Tree::path(4), &ProfitTable::unit(1)).unwrap();
        assert_eq!(v, ratio(1, 4));
        let (v, t) = brute_force_best_response(&HiderDistribution::point_mass(5, 4), &Tree::path(5), &ProfitTable::unit(1)).unwrap();
        assert_eq!(v, ratio(1, 1));
        assert_eq!(t.covered_set(), vec![4]);
    }

    #[test]
    fn greedy_loop_known_starts() {
        assert_eq!(greedy_loop_starts(11, 3, 100).unwrap(), vec![0, 7, 3, 9, 5]);
        assert_eq!(greedy_loop_starts(12, 3, 100).unwrap(), vec![0, 7, 2, 8, 3, 9, 4, 10, 5]);
    }

    #[test]
    fn pairwise_validity() {
        let path = Tree::path(4);
        assert!(!labeling_is_valid_pairwise(&[1, 0, 1], &path));
        assert!(labeling_is_valid_pairwise(&[1, 2, 1], &path));
        assert!(labeling_is_valid_pairwise(&[0, 0, 0], &path));
        assert!(!labeling_is_valid_pairwise(&[1, 1, 0], &Tree::star(3)));
    }

    #[test]
    fn maximal_sets_on_small_line() {
        let sets = maximal_covered_sets(11, 3).unwrap();
        assert!(sets.contains(&vec![0, 1, 2, 6, 7, 10]));
        assert!(sets.contains(&vec![2, 3, 6, 7, 8]));
        assert!(!sets.contains(&vec![1, 2, 3, 4, 5, 6]));
    }
}

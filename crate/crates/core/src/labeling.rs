//! Edge labelings as an encoding of search strategies.
//!
//! A label is the remaining budget right before an edge is queried; label 0
//! means the edge is never queried. Visibility sequences are bitmasks over
//! `{0, ..., k}`.

use std::fmt;

use num_traits::Zero;

use crate::error::{GameError, Result};
use crate::game::{HiderDistribution, ProfitTable};
use crate::graph::{EdgeId, Rooted, Tree, Vertex};
use crate::rational::from_u64;
use crate::strategy::{SearchTree, VertexSet};
use crate::Rational;

/// Largest budget whose label sets fit the mask type.
pub const MAX_LABEL_BUDGET: u32 = 30;

/// A set of labels in `{0, ..., k}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VisibilitySequence(pub u32);

impl VisibilitySequence {
    pub const EMPTY: VisibilitySequence = VisibilitySequence(0);

    pub fn single(label: u32) -> Self {
        VisibilitySequence(1 << label)
    }

    pub fn from_labels<I: IntoIterator<Item = u32>>(labels: I) -> Self {
        VisibilitySequence(labels.into_iter().fold(0, |m, l| m | (1 << l)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, label: u32) -> bool {
        self.0 >> label & 1 == 1
    }

    pub fn min(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros())
    }

    /// Labels `>= bound`.
    pub fn at_least(self, bound: u32) -> Self {
        VisibilitySequence(self.0 & !((1u32 << bound) - 1))
    }

    pub fn union(self, other: Self) -> Self {
        VisibilitySequence(self.0 | other.0)
    }

    pub fn without(self, label: u32) -> Self {
        VisibilitySequence(self.0 & !(1 << label))
    }

    /// Labels in ascending order.
    pub fn labels(self) -> Vec<u32> {
        (0..32).filter(|&l| self.contains(l)).collect()
    }
}

impl fmt::Debug for VisibilitySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.labels())
    }
}

/// `L(e)` for every edge (indexed by edge id) and `S(u)` for every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visibility {
    pub edge: Vec<VisibilitySequence>,
    pub vertex: Vec<VisibilitySequence>,
}

/// Bottom-up visibility sequences of an arbitrary labeling under `rooted`.
pub fn visibility_sequences(labels: &[u32], tree: &Tree, rooted: &Rooted) -> Visibility {
    let mut edge = vec![VisibilitySequence::EMPTY; tree.edges().len()];
    let mut vertex = vec![VisibilitySequence::EMPTY; tree.n()];
    for &v in rooted.order.iter().rev() {
        let s = rooted.children[v]
            .iter()
            .fold(VisibilitySequence::EMPTY, |acc, &(_, id)| acc.union(edge[id]));
        vertex[v] = s;
        if let Some((_, id)) = rooted.parent[v] {
            let f = labels[id];
            edge[id] = VisibilitySequence::single(f).union(s.at_least(f));
        }
    }
    Visibility { edge, vertex }
}

fn check_range(labels: &[u32], tree: &Tree, k: u32) -> Result<()> {
    if labels.len() != tree.edges().len() {
        return Err(GameError::InvalidArgument(format!(
            "{} labels for {} edges",
            labels.len(),
            tree.edges().len()
        )));
    }
    if k > MAX_LABEL_BUDGET {
        return Err(GameError::GuardExceeded(format!("budget {k} exceeds {MAX_LABEL_BUDGET}")));
    }
    if let Some(id) = labels.iter().position(|&l| l > k) {
        return Err(GameError::InvalidArgument(format!(
            "label {} on edge {id} exceeds k = {k}",
            labels[id]
        )));
    }
    Ok(())
}

/// Local validity test on the orientation rooted at vertex 0.
pub fn labeling_is_valid(labels: &[u32], tree: &Tree, k: u32) -> bool {
    if check_range(labels, tree, k).is_err() {
        return false;
    }
    let rooted = tree.orient(0);
    let vis = visibility_sequences(labels, tree, &rooted);
    (0..tree.n()).all(|u| {
        let incoming_ok = rooted.parent[u].is_none_or(|(_, id)| {
            labels[id] == 0 || !vis.vertex[u].contains(labels[id])
        });
        let mut seen = 0u32;
        let outgoing_ok = rooted.children[u].iter().all(|&(_, id)| {
            let positive = vis.edge[id].bits() & !1;
            let clash = seen & positive != 0;
            seen |= positive;
            !clash
        });
        incoming_ok && outgoing_ok
    })
}

/// A labeling `f: E -> {0..k}` that passed the validity test.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValidLabeling {
    k: u32,
    labels: Vec<u32>,
}

impl ValidLabeling {
    pub fn new(tree: &Tree, labels: Vec<u32>, k: u32) -> Result<Self> {
        check_range(&labels, tree, k)?;
        if !labeling_is_valid(&labels, tree, k) {
            return Err(GameError::InvalidArgument(
                "labeling has two equal positive labels without a larger label between them".into(),
            ));
        }
        Ok(ValidLabeling { k, labels })
    }

    pub fn zero(tree: &Tree, k: u32) -> Self {
        ValidLabeling {
            k,
            labels: vec![0; tree.edges().len()],
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, id: EdgeId) -> u32 {
        self.labels[id]
    }

    pub fn is_zero(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    /// `h_f(v) = k + 1 - min` label on edges incident to `v`.
    pub fn discovery_times(&self, tree: &Tree) -> Vec<u32> {
        labeling_discovery_times(&self.labels, tree, self.k)
    }

    /// `Σ_v y_v p(h_f(v))`.
    pub fn expected_profit(&self, tree: &Tree, y: &HiderDistribution, profit: &ProfitTable) -> Rational {
        y.payoff(&self.discovery_times(tree), profit)
    }

    /// `{"u-v": label}` keyed by edge endpoints.
    pub fn to_map(&self, tree: &Tree) -> serde_json::Map<String, serde_json::Value> {
        tree.edges()
            .iter()
            .zip(&self.labels)
            .map(|(&(u, v), &l)| (format!("{u}-{v}"), l.into()))
            .collect()
    }
}

pub(crate) fn labeling_discovery_times(labels: &[u32], tree: &Tree, k: u32) -> Vec<u32> {
    (0..tree.n())
        .map(|v| {
            let min = tree.neighbors(v).iter().map(|&(_, id)| labels[id]).min().unwrap_or(0);
            k + 1 - min
        })
        .collect()
}

/// Builds a strategy that queries the maximum-label edge of each component first.
pub fn labeling_to_strategy(labeling: &ValidLabeling, tree: &Tree) -> Result<SearchTree> {
    let all: Vec<Vertex> = (0..tree.n()).collect();
    build_from_labels(labeling.labels(), tree, all)
}

fn build_from_labels(labels: &[u32], tree: &Tree, component: Vec<Vertex>) -> Result<SearchTree> {
    let inner = tree.edges_within(&component);
    let top = inner.iter().map(|&id| labels[id]).max().unwrap_or(0);
    if top == 0 {
        return Ok(SearchTree::leaf(VertexSet::List(component)));
    }
    let mut argmax = inner.iter().filter(|&&id| labels[id] == top);
    let id = *argmax.next().expect("maximum exists");
    if argmax.next().is_some() {
        return Err(GameError::InvalidArgument(format!(
            "label {top} is not a unique maximum within its component"
        )));
    }
    let (first, second) = tree.split(&component, id);
    let left = build_from_labels(labels, tree, first)?;
    let right = build_from_labels(labels, tree, second)?;
    Ok(SearchTree::node(VertexSet::List(component), tree.edge(id), left, right))
}

/// `f_T(e) = k - depth` of the node querying `e`, 0 for unqueried edges.
pub fn strategy_to_labeling(strategy: &SearchTree, tree: &Tree, k: u32) -> Result<ValidLabeling> {
    if strategy.height() > k {
        return Err(GameError::InvalidArgument(format!(
            "strategy of height {} exceeds budget {k}",
            strategy.height()
        )));
    }
    let mut labels = vec![0; tree.edges().len()];
    for ((u, v), depth) in strategy.queried_edges() {
        let id = tree
            .edge_id(u, v)
            .ok_or_else(|| GameError::InvalidArgument(format!("({u}, {v}) is not an edge")))?;
        labels[id] = k - depth;
    }
    ValidLabeling::new(tree, labels, k)
}

/// Profit of a raw labeling (validity not checked).
pub fn labeling_profit(labels: &[u32], tree: &Tree, k: u32, y: &HiderDistribution, profit: &ProfitTable) -> Rational {
    let h = labeling_discovery_times(labels, tree, k);
    y.probs()
        .iter()
        .zip(h)
        .map(|(p, t)| p * from_u64(profit.get(t)))
        .fold(Rational::zero(), |a, b| a + b)
}

//! Search strategies (binary query trees) and seeker mixtures.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{GameError, Result};
use crate::game::{HiderDistribution, LineInstance, ProfitTable};
use crate::graph::{Edge, Tree, Vertex};
use crate::rational::{from_u64, to_fraction_string};
use crate::Rational;

/// The vertex set `V(ν)` attached to a strategy node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VertexSet {
    /// `{start, ..., start + len - 1}` on a line, no wrap-around.
    Interval { start: Vertex, len: usize },
    /// Sorted vertex list of a tree component.
    List(Vec<Vertex>),
}

impl VertexSet {
    pub fn len(&self) -> usize {
        match self {
            VertexSet::Interval { len, .. } => *len,
            VertexSet::List(vs) => vs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match self {
            VertexSet::Interval { start, len } => v >= *start && v < start + len,
            VertexSet::List(vs) => vs.binary_search(&v).is_ok(),
        }
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        match self {
            VertexSet::Interval { start, len } => (*start..start + len).collect(),
            VertexSet::List(vs) => vs.clone(),
        }
    }

    /// The single vertex of a singleton set.
    pub fn singleton(&self) -> Option<Vertex> {
        match self {
            VertexSet::Interval { start, len: 1 } => Some(*start),
            VertexSet::List(vs) if vs.len() == 1 => Some(vs[0]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    pub edge: Edge,
    /// `children[0]` holds `edge.0`, `children[1]` holds `edge.1`.
    pub children: [SearchTree; 2],
}

/// A rooted binary query tree. A node without a query is a leaf.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchTree {
    pub vertices: VertexSet,
    pub query: Option<Box<Query>>,
}

/// One step of playing a strategy against a hidden vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptStep {
    pub edge: Edge,
    /// The endpoint of the queried edge on the target's side.
    pub answer: Vertex,
}

impl SearchTree {
    pub fn leaf(vertices: VertexSet) -> Self {
        SearchTree {
            vertices,
            query: None,
        }
    }

    /// The strategy that asks nothing.
    pub fn empty_line(n: usize) -> Self {
        SearchTree::leaf(VertexSet::Interval { start: 0, len: n })
    }

    pub fn node(vertices: VertexSet, edge: Edge, first: SearchTree, second: SearchTree) -> Self {
        SearchTree {
            vertices,
            query: Some(Box::new(Query {
                edge,
                children: [first, second],
            })),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.query.is_none()
    }

    pub fn height(&self) -> u32 {
        match &self.query {
            None => 0,
            Some(q) => 1 + q.children[0].height().max(q.children[1].height()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match &self.query {
            None => 1,
            Some(q) => q.children[0].leaf_count() + q.children[1].leaf_count(),
        }
    }

    /// Leaves with their depth, left to right.
    pub fn leaves(&self) -> Vec<(u32, &VertexSet)> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, depth: u32, out: &mut Vec<(u32, &'a VertexSet)>) {
        match &self.query {
            None => out.push((depth, &self.vertices)),
            Some(q) => {
                q.children[0].collect_leaves(depth + 1, out);
                q.children[1].collect_leaves(depth + 1, out);
            }
        }
    }

    /// `C(T)`: vertices isolated in a singleton leaf, sorted.
    pub fn covered_set(&self) -> Vec<Vertex> {
        let mut out: Vec<_> = self
            .leaves()
            .into_iter()
            .filter_map(|(_, set)| set.singleton())
            .collect();
        out.sort_unstable();
        out
    }

    /// `h_T(v)` for every vertex; `k + 1` when `v` is not covered.
    pub fn discovery_times(&self, n: usize, k: u32) -> Vec<u32> {
        let mut out = vec![k + 1; n];
        for (depth, set) in self.leaves() {
            if let Some(v) = set.singleton() {
                out[v] = depth.min(k + 1);
            }
        }
        out
    }

    /// Queries (with endpoint edges) asked when the target is `v`.
    pub fn transcript(&self, v: Vertex) -> Vec<TranscriptStep> {
        let mut steps = Vec::new();
        let mut node = self;
        while let Some(q) = &node.query {
            let side = usize::from(!q.children[0].vertices.contains(v));
            let answer = if side == 0 { q.edge.0 } else { q.edge.1 };
            steps.push(TranscriptStep {
                edge: q.edge,
                answer,
            });
            node = &q.children[side];
        }
        steps
    }

    /// The leaf reached for target `v`, with its depth.
    pub fn locate(&self, v: Vertex) -> (u32, &VertexSet) {
        let mut node = self;
        let mut depth = 0;
        while let Some(q) = &node.query {
            let side = usize::from(!q.children[0].vertices.contains(v));
            node = &q.children[side];
            depth += 1;
        }
        (depth, &node.vertices)
    }

    /// Edges queried, paired with the depth of the querying node.
    pub fn queried_edges(&self) -> Vec<(Edge, u32)> {
        let mut out = Vec::new();
        let mut stack = vec![(self, 0u32)];
        while let Some((node, depth)) = stack.pop() {
            if let Some(q) = &node.query {
                out.push((q.edge, depth));
                stack.push((&q.children[1], depth + 1));
                stack.push((&q.children[0], depth + 1));
            }
        }
        out
    }

    /// Checks recursive validity against `tree` and the height bound `k`.
    pub fn validate(&self, tree: &Tree, k: u32) -> Result<()> {
        let all: Vec<Vertex> = (0..tree.n()).collect();
        if self.vertices.to_vec() != all {
            return Err(GameError::InvalidArgument(
                "root vertex set is not the whole vertex set".into(),
            ));
        }
        if self.height() > k {
            return Err(GameError::InvalidArgument(format!(
                "strategy height {} exceeds budget {k}",
                self.height()
            )));
        }
        self.validate_node(tree)
    }

    fn validate_node(&self, tree: &Tree) -> Result<()> {
        let Some(q) = &self.query else {
            return Ok(());
        };
        let component = self.vertices.to_vec();
        let (u, v) = q.edge;
        let id = tree
            .edge_id(u, v)
            .filter(|_| self.vertices.contains(u) && self.vertices.contains(v))
            .ok_or_else(|| {
                GameError::InvalidArgument(format!("query ({u}, {v}) is not an edge of its component"))
            })?;
        let (first, second) = if tree.edge(id).0 == u {
            tree.split(&component, id)
        } else {
            let (a, b) = tree.split(&component, id);
            (b, a)
        };
        if q.children[0].vertices.to_vec() != first || q.children[1].vertices.to_vec() != second {
            return Err(GameError::InvalidArgument(format!(
                "children of query ({u}, {v}) do not match the split components"
            )));
        }
        q.children[0].validate_node(tree)?;
        q.children[1].validate_node(tree)
    }

    /// Nested JSON: `{"query": [u, v], "children": [..]}` or `{"leaf": [..]}`.
    pub fn to_json(&self) -> Value {
        match &self.query {
            None => match &self.vertices {
                VertexSet::Interval { start, len } => {
                    json!({ "leaf": { "start": start, "len": len } })
                }
                VertexSet::List(vs) => json!({ "leaf": vs }),
            },
            Some(q) => json!({
                "query": [q.edge.0, q.edge.1],
                "children": [q.children[0].to_json(), q.children[1].to_json()],
            }),
        }
    }
}

/// A pure seeker strategy in a mixed-strategy support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeekerStrategy {
    /// The efficient line strategy `T_start`.
    Efficient { line: LineInstance, start: u64 },
    Explicit(SearchTree),
}

impl SeekerStrategy {
    pub fn tree(&self) -> Result<SearchTree> {
        match self {
            SeekerStrategy::Efficient { line, start } => {
                crate::line::efficient_strategy(*start, line.n, line.k)
            }
            SeekerStrategy::Explicit(t) => Ok(t.clone()),
        }
    }

    pub fn discovery_times(&self, n: usize, k: u32) -> Result<Vec<u32>> {
        Ok(self.tree()?.discovery_times(n, k))
    }

    pub fn to_json(&self) -> Value {
        match self {
            SeekerStrategy::Efficient { start, .. } => json!({ "efficient_start": start }),
            SeekerStrategy::Explicit(t) => t.to_json(),
        }
    }
}

/// `x ∈ Δ_k`: a finite distribution over pure strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeekerMixedStrategy {
    support: Vec<SeekerStrategy>,
    weights: Vec<Rational>,
}

impl SeekerMixedStrategy {
    pub fn new(support: Vec<SeekerStrategy>, weights: Vec<Rational>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(GameError::InvalidDistribution(format!(
                "{} strategies with {} weights",
                support.len(),
                weights.len()
            )));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(GameError::InvalidDistribution("negative seeker weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(GameError::InvalidDistribution(format!(
                "seeker weights sum to {total}"
            )));
        }
        Ok(SeekerMixedStrategy { support, weights })
    }

    pub fn pure(strategy: SeekerStrategy) -> Self {
        SeekerMixedStrategy {
            support: vec![strategy],
            weights: vec![Rational::one()],
        }
    }

    pub fn uniform(support: Vec<SeekerStrategy>) -> Result<Self> {
        let w = Rational::new(1.into(), support.len().into());
        let weights = vec![w; support.len()];
        SeekerMixedStrategy::new(support, weights)
    }

    pub fn support(&self) -> &[SeekerStrategy] {
        &self.support
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Checks every supported strategy against `tree` and `k`.
    pub fn validate(&self, tree: &Tree, k: u32) -> Result<()> {
        self.support.iter().try_for_each(|s| s.tree()?.validate(tree, k))
    }

    /// `Σ_T x_T p(h_T(v))` for every vertex `v`.
    pub fn vertex_payoffs(&self, n: usize, profit: &ProfitTable) -> Result<Vec<Rational>> {
        let k = profit.k();
        let mut out = vec![Rational::zero(); n];
        for (s, x) in self.support.iter().zip(&self.weights) {
            if x.is_zero() {
                continue;
            }
            for (acc, t) in out.iter_mut().zip(s.discovery_times(n, k)?) {
                let p = profit.get(t);
                if p != 0 {
                    *acc += x * from_u64(p);
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.support
                .iter()
                .zip(&self.weights)
                .map(|(s, x)| json!({ "weight": to_fraction_string(x), "strategy": s.to_json() }))
                .collect(),
        )
    }
}

/// `p(x, y) = Σ_T Σ_v y_v x_T p(h_T(v))`.
pub fn expected_profit(
    x: &SeekerMixedStrategy,
    y: &HiderDistribution,
    profit: &ProfitTable,
) -> Result<Rational> {
    let payoffs = x.vertex_payoffs(y.len(), profit)?;
    Ok(payoffs.iter().zip(y.probs()).map(|(a, b)| a * b).sum())
}

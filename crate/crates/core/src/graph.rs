//! Undirected trees on vertices `0..n` and their rooted orientations.

use std::collections::{HashMap, VecDeque};

use crate::error::{GameError, Result};

pub type Vertex = usize;
pub type EdgeId = usize;

/// An unordered edge, stored as given in the input.
pub type Edge = (Vertex, Vertex);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    n: usize,
    edges: Vec<Edge>,
    /// Per vertex: `(neighbor, edge id)` in input order.
    adjacency: Vec<Vec<(Vertex, EdgeId)>>,
    index: HashMap<(Vertex, Vertex), EdgeId>,
}

impl Tree {
    /// Validates that `edges` form a spanning tree on `0..n`.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(GameError::InvalidInstance("tree needs at least one vertex".into()));
        }
        if edges.len() != n - 1 {
            return Err(GameError::InvalidInstance(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut index = HashMap::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GameError::InvalidInstance(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(GameError::InvalidInstance(format!("self loop at {u}")));
            }
            if index.insert(key(u, v), id).is_some() {
                return Err(GameError::InvalidInstance(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        let tree = Tree {
            n,
            edges,
            adjacency,
            index,
        };
        // n - 1 edges plus connectivity implies acyclic.
        let reached = tree.component_of(0, None).len();
        if reached != n {
            return Err(GameError::InvalidInstance(format!(
                "edge list is not connected ({reached} of {n} vertices reachable from 0)"
            )));
        }
        Ok(tree)
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|v| (v - 1, v)).collect();
        Tree::new(n, edges).expect("a path is a tree")
    }

    /// Star with center 0 and `leaves` pendant vertices.
    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves).map(|v| (0, v)).collect();
        Tree::new(leaves + 1, edges).expect("a star is a tree")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.index.get(&key(u, v)).copied()
    }

    /// Whether the tree is the path `0 - 1 - ... - n-1`.
    pub fn is_path(&self) -> bool {
        (1..self.n).all(|v| self.edge_id(v - 1, v).is_some())
    }

    /// Vertices reachable from `start` without crossing `removed`, sorted.
    pub fn component_of(&self, start: Vertex, removed: Option<EdgeId>) -> Vec<Vertex> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut out = vec![start];
        while let Some(u) = queue.pop_front() {
            for &(w, id) in &self.adjacency[u] {
                if Some(id) != removed && !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Splits the connected vertex set `component` along edge `id`.
    /// Returns the side containing the edge's first endpoint, then the other.
    pub fn split(&self, component: &[Vertex], id: EdgeId) -> (Vec<Vertex>, Vec<Vertex>) {
        let (u, _) = self.edges[id];
        let mut inside = vec![false; self.n];
        for &v in component {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([u]);
        seen[u] = true;
        while let Some(a) = queue.pop_front() {
            for &(b, e) in &self.adjacency[a] {
                if e != id && inside[b] && !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        component.iter().partition(|&&v| seen[v])
    }

    /// Edge ids with both endpoints in `component`.
    pub fn edges_within(&self, component: &[Vertex]) -> Vec<EdgeId> {
        let mut inside = vec![false; self.n];
        for &v in component {
            inside[v] = true;
        }
        (0..self.edges.len())
            .filter(|&id| {
                let (u, v) = self.edges[id];
                inside[u] && inside[v]
            })
            .collect()
    }

    /// Edge ids on the simple path between vertices `a` and `b`.
    pub fn path_edges(&self, a: Vertex, b: Vertex) -> Vec<EdgeId> {
        let mut prev: Vec<Option<(Vertex, EdgeId)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &(w, id) in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((u, id));
                    queue.push_back(w);
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = b;
        while let Some((p, id)) = prev[cur] {
            out.push(id);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn orient(&self, root: Vertex) -> Rooted {
        Rooted::new(self, root)
    }
}

fn key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A tree oriented away from a root. Children keep adjacency-list order.
#[derive(Debug, Clone)]
pub struct Rooted {
    pub root: Vertex,
    /// `(parent, edge id)` for every non-root vertex.
    pub parent: Vec<Option<(Vertex, EdgeId)>>,
    /// `(child, edge id)` in adjacency order.
    pub children: Vec<Vec<(Vertex, EdgeId)>>,
    /// Vertices in BFS order from the root; reversed it is a valid bottom-up order.
    pub order: Vec<Vertex>,
}

impl Rooted {
    fn new(tree: &Tree, root: Vertex) -> Self {
        let n = tree.n();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(w, id) in tree.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((u, id));
                    children[u].push((w, id));
                    queue.push_back(w);
                }
            }
        }
        Rooted {
            root,
            parent,
            children,
            order,
        }
    }

    /// Head of each edge (the endpoint farther from the root).
    pub fn head(&self, tree: &Tree, id: EdgeId) -> Vertex {
        let (u, v) = tree.edge(id);
        if self.parent[v] == Some((u, id)) {
            v
        } else {
            u
        }
    }
}

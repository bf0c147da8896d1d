//! Instances, distributions, profit tables and modular intervals.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::graph::{Tree, Vertex};
use crate::rational::{from_u64, parse_fraction, to_fraction_string};
use crate::Rational;

/// Largest budget accepted by the closed-form line pipeline (`2^k` must fit in `u64`).
pub const MAX_LINE_BUDGET: u32 = 62;

/// The interval `[start ⊕ len]_modulus = {start, start+1, ..., start+len-1} mod modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModInterval {
    start: u64,
    len: u64,
    modulus: u64,
}

impl ModInterval {
    pub fn new(start: u64, len: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 || start >= modulus || len > modulus {
            return Err(GameError::InvalidArgument(format!(
                "interval [{start}⊕{len}] mod {modulus} is malformed"
            )));
        }
        Ok(ModInterval {
            start,
            len,
            modulus,
        })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `start + len - 1` without reduction; `>= modulus` when the interval wraps.
    pub fn unwrapped_end(&self) -> u64 {
        self.start + self.len - 1
    }

    pub fn contains(&self, v: u64) -> bool {
        v < self.modulus && (v + self.modulus - self.start) % self.modulus < self.len
    }

    pub fn is_disjoint(&self, other: &ModInterval) -> bool {
        debug_assert_eq!(self.modulus, other.modulus);
        self.is_empty()
            || other.is_empty()
            || (!self.contains(other.start) && !other.contains(self.start))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| (self.start + i) % self.modulus)
    }
}

/// A line `0 - 1 - ... - n-1` with query budget `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineInstance {
    pub n: u64,
    pub k: u32,
}

impl LineInstance {
    pub fn new(n: u64, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(GameError::InvalidInstance(format!("line needs n >= 2, got {n}")));
        }
        if k > MAX_LINE_BUDGET {
            return Err(GameError::InvalidInstance(format!(
                "budget k = {k} exceeds {MAX_LINE_BUDGET}"
            )));
        }
        Ok(LineInstance { n, k })
    }

    /// `2^k`, the maximum number of leaves of a strategy.
    pub fn leaf_capacity(&self) -> u64 {
        1u64 << self.k
    }

    /// `c = 2^k - 2`, the interior interval length coverable with `k` queries.
    pub fn capacity(&self) -> u64 {
        self.leaf_capacity().saturating_sub(2)
    }

    /// Whether plain binary search already finds every vertex.
    pub fn is_trivial(&self) -> bool {
        self.n <= self.leaf_capacity()
    }
}

/// `p(1), ..., p(k+1)` with `p` non-increasing and `p(k+1) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProfitTable {
    values: Vec<u64>,
}

impl ProfitTable {
    /// Builds from `p(1..=k)`; `p(k+1) = 0` is appended.
    pub fn new(mut values: Vec<u64>) -> Result<Self> {
        values.push(0);
        Self::from_full(values)
    }

    /// Builds from `p(1..=k+1)`; the last entry must be zero.
    pub fn from_full(values: Vec<u64>) -> Result<Self> {
        if values.last() != Some(&0) {
            return Err(GameError::InvalidProfit("p(k+1) must be 0".into()));
        }
        if let Some(t) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(GameError::InvalidProfit(format!(
                "profit increases from p({}) = {} to p({}) = {}",
                t + 1,
                values[t],
                t + 2,
                values[t + 1]
            )));
        }
        Ok(ProfitTable { values })
    }

    pub fn unit(k: u32) -> Self {
        let mut values = vec![1; k as usize];
        values.push(0);
        ProfitTable { values }
    }

    pub fn k(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    /// `p(t)`; zero for `t > k`. `t = 0` is treated as `t = 1`.
    pub fn get(&self, t: u32) -> u64 {
        let idx = t.max(1) as usize - 1;
        self.values.get(idx).copied().unwrap_or(0)
    }

    /// `p(1..=k)`, the serialized form.
    pub fn budget_values(&self) -> &[u64] {
        &self.values[..self.values.len() - 1]
    }

    pub fn is_unit(&self) -> bool {
        self.budget_values().iter().all(|&p| p == 1)
    }

    /// Same table with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        ProfitTable {
            values: self.values.iter().map(|p| p * factor).collect(),
        }
    }

    /// `(p(h(v)))_v` for a discovery-time vector.
    pub fn profile(&self, discovery: &[u32]) -> Vec<u64> {
        discovery.iter().map(|&t| self.get(t)).collect()
    }
}

/// A probability vector over the vertices; entries sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HiderDistribution {
    probs: Vec<Rational>,
}

impl HiderDistribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(GameError::InvalidDistribution("empty distribution".into()));
        }
        if let Some(v) = probs.iter().position(|p| p.is_negative()) {
            return Err(GameError::InvalidDistribution(format!(
                "negative mass {} at vertex {v}",
                probs[v]
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(GameError::InvalidDistribution(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(HiderDistribution { probs })
    }

    /// Skips validation; callers guarantee the invariant.
    pub(crate) fn new_unchecked(probs: Vec<Rational>) -> Self {
        debug_assert!(Self::new(probs.clone()).is_ok());
        HiderDistribution { probs }
    }

    pub fn uniform(n: usize) -> Self {
        let p = Rational::new(1.into(), (n as u64).into());
        HiderDistribution {
            probs: vec![p; n],
        }
    }

    pub fn point_mass(n: usize, v: Vertex) -> Self {
        let mut probs = vec![Rational::zero(); n];
        probs[v] = Rational::one();
        HiderDistribution { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn get(&self, v: Vertex) -> &Rational {
        &self.probs[v]
    }

    /// `y(S)` for a vertex set.
    pub fn mass<I: IntoIterator<Item = Vertex>>(&self, vertices: I) -> Rational {
        vertices.into_iter().map(|v| &self.probs[v]).sum()
    }

    /// `Σ_v y_v p(h(v))` for a discovery-time vector.
    pub fn payoff(&self, discovery: &[u32], profit: &ProfitTable) -> Rational {
        self.probs
            .iter()
            .zip(discovery)
            .filter(|(y, _)| !y.is_zero())
            .map(|(y, &t)| y * from_u64(profit.get(t)))
            .sum()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.probs.iter().map(to_fraction_string).collect()
    }
}

/// Input to the general tree solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeInstance {
    pub tree: Tree,
    pub k: u32,
    pub profit: ProfitTable,
    pub hider: Option<HiderDistribution>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TreeInstanceJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profit: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hider: Option<Vec<String>>,
}

impl TreeInstance {
    pub fn new(
        tree: Tree,
        k: u32,
        profit: ProfitTable,
        hider: Option<HiderDistribution>,
    ) -> Result<Self> {
        if tree.n() < 2 {
            return Err(GameError::InvalidInstance("instances need n >= 2".into()));
        }
        if profit.k() != k {
            return Err(GameError::InvalidProfit(format!(
                "profit table has {} budget entries, k = {k}",
                profit.k()
            )));
        }
        if let Some(y) = &hider {
            if y.len() != tree.n() {
                return Err(GameError::InvalidDistribution(format!(
                    "hider has {} entries for {} vertices",
                    y.len(),
                    tree.n()
                )));
            }
        }
        Ok(TreeInstance {
            tree,
            k,
            profit,
            hider,
        })
    }

    /// The path on `n` vertices with unit profit.
    pub fn line(n: usize, k: u32) -> Self {
        TreeInstance::new(Tree::path(n), k, ProfitTable::unit(k), None)
            .expect("line instance is valid")
    }

    pub fn unit(tree: Tree, k: u32) -> Result<Self> {
        TreeInstance::new(tree, k, ProfitTable::unit(k), None)
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn with_hider(mut self, hider: HiderDistribution) -> Result<Self> {
        if hider.len() != self.n() {
            return Err(GameError::InvalidDistribution("hider length mismatch".into()));
        }
        self.hider = Some(hider);
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TreeInstanceJson =
            serde_json::from_str(text).map_err(|e| GameError::Parse(e.to_string()))?;
        let edges = raw.edges.iter().map(|&[u, v]| (u, v)).collect();
        let tree = Tree::new(raw.n, edges)?;
        let profit = match raw.profit {
            None => ProfitTable::unit(raw.k),
            Some(values) if values.len() == raw.k as usize => ProfitTable::new(values)?,
            Some(values) if values.len() == raw.k as usize + 1 => ProfitTable::from_full(values)?,
            Some(values) => {
                return Err(GameError::InvalidProfit(format!(
                    "expected {} profit entries, got {}",
                    raw.k,
                    values.len()
                )))
            }
        };
        let hider = raw
            .hider
            .map(|entries| {
                let probs = entries
                    .iter()
                    .map(|s| parse_fraction(s))
                    .collect::<Result<Vec<_>>>()?;
                HiderDistribution::new(probs)
            })
            .transpose()?;
        TreeInstance::new(tree, raw.k, profit, hider)
    }

    pub fn to_json(&self) -> String {
        let raw = TreeInstanceJson {
            n: self.n(),
            edges: self.tree.edges().iter().map(|&(u, v)| [u, v]).collect(),
            k: self.k,
            profit: (!self.profit.is_unit()).then(|| self.profit.budget_values().to_vec()),
            hider: self.hider.as_ref().map(HiderDistribution::to_strings),
        };
        serde_json::to_string(&raw).expect("instance serializes")
    }
}

//! Equilibria on trees by column generation.
//!
//! The restricted master is `min t` subject to `t ≥ Σ_v y_v P_T(v)` for each
//! generated column `T` and `y ∈ Δ_V`. Its optimum bounds the value from
//! below; the DP best response against the master's `y` bounds it from above
//! and supplies the next column. The loop stops when the two meet.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::dp::best_response;
use crate::error::{GameError, Result};
use crate::game::{HiderDistribution, TreeInstance};
use crate::graph::Vertex;
use crate::labeling::{labeling_to_strategy, ValidLabeling};
use crate::lp::{simplex_solve, LinearProgram, Relation, Sense};
use crate::rational::{from_u64, to_fraction_string};
use crate::strategy::{SeekerMixedStrategy, SeekerStrategy};
use crate::Rational;

pub const DEFAULT_MAX_ITERS: usize = 10_000;

/// Optimum of the restricted master.
#[derive(Debug, Clone)]
pub(crate) struct Master {
    pub t: Rational,
    pub y: Vec<Rational>,
    /// Seeker weight of each column, in input order.
    pub x: Vec<Rational>,
}

pub(crate) fn solve_master(n: usize, columns: &[&[u64]]) -> Result<Master> {
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    lp.set_free(n);
    for col in columns {
        let mut row: Vec<Rational> = col.iter().map(|&p| -from_u64(p)).collect();
        row.push(Rational::one());
        lp.add_constraint(row, Relation::Ge, Rational::zero());
    }
    let mut sum = vec![Rational::one(); n];
    sum.push(Rational::zero());
    lp.add_constraint(sum, Relation::Eq, Rational::one());
    let sol = simplex_solve(&lp)?;
    let y = sol.x[..n].to_vec();
    let x = sol.duals[..columns.len()].to_vec();
    Ok(Master { t: sol.objective, y, x })
}

#[derive(Debug, Clone)]
pub struct Bounds {
    /// Restricted master optimum.
    pub lower: Rational,
    /// Best-response value against the master's hider.
    pub upper: Rational,
}

#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub value: Rational,
    pub seeker: SeekerMixedStrategy,
    pub hider: HiderDistribution,
    pub iterations: usize,
    /// `Σ_T x_T p(h_T(v))` for each vertex.
    pub vertex_payoffs: Vec<Rational>,
    /// `Σ_v y_v p(h_T(v))` for each generated column.
    pub column_payoffs: Vec<Rational>,
    /// Labelings of the generated columns, in generation order.
    pub columns: Vec<ValidLabeling>,
    pub history: Vec<Bounds>,
}

impl EquilibriumResult {
    /// Checks the exact duality certificate.
    pub fn certificate_holds(&self) -> bool {
        let lo = self.vertex_payoffs.iter().min();
        let hi = self.column_payoffs.iter().max();
        lo == Some(&self.value) && hi == Some(&self.value)
    }

    pub fn to_json(&self) -> Value {
        let strings = |v: &[Rational]| v.iter().map(to_fraction_string).collect::<Vec<_>>();
        json!({
            "value": to_fraction_string(&self.value),
            "iterations": self.iterations,
            "seeker": self.seeker.to_json(),
            "hider": self.hider.to_strings(),
            "certificate": {
                "vertex_payoffs": strings(&self.vertex_payoffs),
                "column_payoffs": strings(&self.column_payoffs),
            },
            "bounds": self.history.iter()
                .map(|b| json!([to_fraction_string(&b.lower), to_fraction_string(&b.upper)]))
                .collect::<Vec<_>>(),
        })
    }
}

/// The hider's best pure reply to `x`: the first vertex of least expected payoff.
pub fn hider_best_response(x: &SeekerMixedStrategy, instance: &TreeInstance) -> Result<(Vertex, Rational)> {
    let payoffs = x.vertex_payoffs(instance.n(), &instance.profit)?;
    let mut best = 0;
    for (v, p) in payoffs.iter().enumerate() {
        if *p < payoffs[best] {
            best = v;
        }
    }
    Ok((best, payoffs[best].clone()))
}

pub fn solve_equilibrium(instance: &TreeInstance) -> Result<EquilibriumResult> {
    solve_equilibrium_capped(instance, DEFAULT_MAX_ITERS)
}

pub fn solve_equilibrium_capped(instance: &TreeInstance, max_iters: usize) -> Result<EquilibriumResult> {
    let n = instance.n();
    let (tree, profit) = (&instance.tree, &instance.profit);
    let (_, first) = best_response(tree, profit, &HiderDistribution::uniform(n))?;
    let mut columns = vec![first];
    let mut profiles = vec![profit.profile(&columns[0].discovery_times(tree))];
    let mut history = Vec::new();

    for iteration in 1..=max_iters {
        let refs: Vec<&[u64]> = profiles.iter().map(Vec::as_slice).collect();
        let master = solve_master(n, &refs)?;
        let y = HiderDistribution::new(master.y.clone())?;
        let (upper, labeling) = best_response(tree, profit, &y)?;
        history.push(Bounds {
            lower: master.t.clone(),
            upper: upper.clone(),
        });
        if upper > master.t {
            let profile = profit.profile(&labeling.discovery_times(tree));
            if profiles.contains(&profile) {
                return Err(GameError::RepeatedColumn(iteration));
            }
            profiles.push(profile);
            columns.push(labeling);
            continue;
        }

        let mut support = Vec::new();
        let mut weights = Vec::new();
        for (col, x) in columns.iter().zip(&master.x) {
            if x.is_positive() {
                support.push(SeekerStrategy::Explicit(labeling_to_strategy(col, tree)?));
                weights.push(x.clone());
            }
        }
        let seeker = SeekerMixedStrategy::new(support, weights)?;
        let vertex_payoffs = seeker.vertex_payoffs(n, profit)?;
        let column_payoffs = profiles
            .iter()
            .map(|p| p.iter().zip(y.probs()).map(|(&a, b)| b * from_u64(a)).sum())
            .collect();
        return Ok(EquilibriumResult {
            value: master.t,
            seeker,
            hider: y,
            iterations: iteration,
            vertex_payoffs,
            column_payoffs,
            columns,
            history,
        });
    }
    let last = history.last().expect("at least one iteration");
    Err(GameError::IterationCap {
        cap: max_iters,
        lower: to_fraction_string(&last.lower),
        upper: to_fraction_string(&last.upper),
    })
}

//! Exact solvers for the budget-constrained search game on trees.
//!
//! A seeker locates a hidden vertex by asking at most `k` edge queries; the
//! answer to a query names the side of the edge that contains the target.
//! On a line the game has a closed-form value `h / w` ([`line`]); on general
//! trees equilibria come from column generation ([`equilibrium`]) driven by
//! a best-response dynamic program over edge labelings ([`dp`]). The
//! [`oracle`] module enumerates strategies exhaustively for cross-checks.

pub mod dp;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod graph;
pub mod labeling;
pub mod line;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod scalar;
pub mod strategy;

pub use equilibrium::{hider_best_response, solve_equilibrium, EquilibriumResult};
pub use error::{GameError, Result};
pub use game::{HiderDistribution, LineInstance, ModInterval, ProfitTable, TreeInstance};
pub use graph::{Edge, EdgeId, Tree, Vertex};
pub use scalar::Scalar;
pub use strategy::{expected_profit, SearchTree, SeekerMixedStrategy, SeekerStrategy, VertexSet};

/// Arbitrary-precision rational used by every solver path.
pub type Rational = num_rational::BigRational;

/// Exact linear program over [`Rational`].
pub type RationalLp = lp::LinearProgram<Rational>;

/// DP tables over [`Rational`].
pub type RationalDpTables = dp::DpTables<Rational>;

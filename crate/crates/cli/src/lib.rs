//! Library half of the `search-game` command: sampling, simulation, figure
//! data and the line verification sweep. `main.rs` only parses flags and
//! renders output.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use search_game::line::{
    compute_hw, efficient_interval, game_value_line, hider_line, sample_seeker, seeker_starts, verify_hider,
    BezoutResult,
};
use search_game::oracle::{catalog_value, enumerate_strategies, CatalogOptions};
use search_game::rational::{common_denominator, scaled_numerators, to_f64, to_fraction_string};
use search_game::{
    expected_profit, GameError, HiderDistribution, ProfitTable, Rational, SeekerMixedStrategy, Tree,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Game(#[from] GameError),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 invalid instance, 3 guard exceeded, 4 verification failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Game(e) => match e {
                GameError::InvalidInstance(_)
                | GameError::InvalidDistribution(_)
                | GameError::InvalidProfit(_)
                | GameError::NotApplicable(_)
                | GameError::InvalidArgument(_)
                | GameError::Parse(_) => 2,
                GameError::GuardExceeded(_) | GameError::IterationCap { .. } => 3,
                GameError::Infeasible | GameError::Unbounded | GameError::RepeatedColumn(_) => 1,
            },
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Verification(_) => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Draws indices with probabilities given by exact rational weights.
#[derive(Debug, Clone)]
pub struct WeightedIndex {
    cumulative: Vec<u128>,
    total: u128,
}

impl WeightedIndex {
    pub fn new(weights: &[Rational]) -> CliResult<Self> {
        let den = common_denominator(weights);
        let nums = scaled_numerators(weights, &den);
        let mut cumulative = Vec::with_capacity(nums.len());
        let mut acc = BigInt::zero();
        for x in &nums {
            acc += x;
            cumulative.push(acc.to_u128().ok_or_else(|| {
                GameError::GuardExceeded("weight denominators exceed 128 bits".into())
            })?);
        }
        let total = cumulative.last().copied().unwrap_or(0);
        if total == 0 {
            return Err(GameError::InvalidDistribution("weights sum to zero".into()).into());
        }
        Ok(WeightedIndex { cumulative, total })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u = rng.random_range(0..self.total);
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// A start vertex of the greedy family, drawn uniformly from its `w` members.
pub fn sample_line_start<R: Rng>(bz: &BezoutResult, rng: &mut R) -> CliResult<u64> {
    let t = rng.random_range(0..bz.w);
    Ok(sample_seeker(bz.n, bz.k, t)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    pub empirical_value: f64,
    /// Exact `p(x, y)` as `num/den`.
    pub theoretical_value: String,
    /// Fraction of trials whose sampled strategy found each vertex.
    pub coverage: Vec<f64>,
    pub standard_error: f64,
}

impl SimulationReport {
    pub fn theoretical(&self) -> f64 {
        search_game::rational::parse_fraction(&self.theoretical_value)
            .map(|r| to_f64(&r))
            .unwrap_or(f64::NAN)
    }
}

/// Plays `trials` independent rounds of the game with one seeded generator.
pub fn simulate(
    x: &SeekerMixedStrategy,
    y: &HiderDistribution,
    profit: &ProfitTable,
    trials: u64,
    seed: u64,
) -> CliResult<SimulationReport> {
    if trials == 0 {
        return Err(CliError::Usage("trials must be positive".into()));
    }
    let n = y.len();
    let k = profit.k();
    let payoffs: Vec<Vec<u64>> = x
        .support()
        .iter()
        .map(|s| s.discovery_times(n, k).map(|d| profit.profile(&d)))
        .collect::<search_game::Result<_>>()?;
    let seekers = WeightedIndex::new(x.weights())?;
    let hiders = WeightedIndex::new(y.probs())?;
    let mut rng = rng(seed);
    let mut draws = vec![0u64; payoffs.len()];
    let (mut sum, mut sum_sq) = (0f64, 0f64);
    for _ in 0..trials {
        let s = seekers.sample(&mut rng);
        let v = hiders.sample(&mut rng);
        draws[s] += 1;
        let p = payoffs[s][v] as f64;
        sum += p;
        sum_sq += p * p;
    }
    let t = trials as f64;
    let mean = sum / t;
    let var = (sum_sq / t - mean * mean).max(0.0);
    let coverage = (0..n)
        .map(|v| {
            let hits: u64 = draws.iter().zip(&payoffs).filter(|(_, p)| p[v] > 0).map(|(d, _)| d).sum();
            hits as f64 / t
        })
        .collect();
    Ok(SimulationReport {
        trials,
        seed,
        empirical_value: mean,
        theoretical_value: to_fraction_string(&expected_profit(x, y, profit)?),
        coverage,
        standard_error: (var / t).sqrt(),
    })
}

/// Line instance behind each figure id: 2 is (11, 3), 3 is (12, 3), 4 is (38, 4).
pub fn figure_instance(figure: u32) -> CliResult<(u64, u32)> {
    match figure {
        2 => Ok((11, 3)),
        3 => Ok((12, 3)),
        4 => Ok((38, 4)),
        other => Err(CliError::Usage(format!("unknown figure {other}; expected 2, 3 or 4"))),
    }
}

/// Seeker starts with their covered intervals, the hider row and, when coprime, the segment layout.
pub fn figure_json(figure: u32) -> CliResult<Value> {
    let (n, k) = figure_instance(figure)?;
    let sol = game_value_line(n, k)?;
    let bz = sol.bezout.expect("figure instances are non-trivial");
    let strategies = seeker_starts(&bz)
        .into_iter()
        .map(|v| {
            let iv = efficient_interval(v, n, k)?;
            Ok(json!({ "start": v, "covered_start": iv.start(), "covered_len": iv.len() }))
        })
        .collect::<search_game::Result<Vec<_>>>()?;
    let segments: Vec<Value> = sol
        .layout
        .iter()
        .flat_map(|l| &l.segments)
        .map(|s| json!({ "start": s.start, "len": s.len, "mass": to_fraction_string(&s.mass) }))
        .collect();
    Ok(json!({
        "figure": figure,
        "n": n,
        "k": k,
        "value": to_fraction_string(&sol.value),
        "h": bz.h,
        "w": bz.w,
        "strategies": strategies,
        "hider": sol.hider.to_strings(),
        "segments": segments,
    }))
}

/// The same records as [`figure_json`], one per CSV row.
pub fn figure_csv(figure: u32) -> CliResult<String> {
    let data = figure_json(figure)?;
    let mut out = String::from("record,index,start,length,mass\n");
    for (i, s) in data["strategies"].as_array().into_iter().flatten().enumerate() {
        out += &format!("strategy,{i},{},{},\n", s["covered_start"], s["covered_len"]);
    }
    for (v, m) in data["hider"].as_array().into_iter().flatten().enumerate() {
        out += &format!("hider,{v},{v},1,{}\n", m.as_str().unwrap_or_default());
    }
    for (i, s) in data["segments"].as_array().into_iter().flatten().enumerate() {
        out += &format!("segment,{i},{},{},{}\n", s["start"], s["len"], s["mass"].as_str().unwrap_or_default());
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub k: u32,
    pub closed_form: String,
    /// `None` when the catalog guard stopped the enumeration.
    pub oracle: Option<String>,
    pub catalog_size: Option<usize>,
    pub hider_ok: bool,
    pub failed_checks: Vec<String>,
}

impl SweepRow {
    pub fn passed(&self) -> bool {
        self.hider_ok && self.oracle.as_ref().is_none_or(|o| *o == self.closed_form)
    }
}

/// Closed form against the catalog LP, and the hider verifier, for `2^k < n <= n_max`.
pub fn line_sweep(k: u32, n_max: u64, options: CatalogOptions) -> CliResult<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for n in (1u64 << k) + 1..=n_max {
        rows.push(sweep_row(n, k, options)?);
    }
    Ok(rows)
}

pub fn sweep_row(n: u64, k: u32, options: CatalogOptions) -> CliResult<SweepRow> {
    let bz = compute_hw(n, k)?;
    let (hider, _) = hider_line(n, k)?;
    let report = verify_hider(&hider, n, k)?;
    let size = usize::try_from(n).map_err(|_| GameError::GuardExceeded("n exceeds usize".into()))?;
    let (oracle, catalog_size) =
        match enumerate_strategies(&Tree::path(size), &ProfitTable::unit(k), options) {
            Ok(catalog) => {
                let sol = catalog_value(&catalog)?;
                (Some(to_fraction_string(&sol.value)), Some(catalog.len()))
            }
            Err(GameError::GuardExceeded(_)) => (None, None),
            Err(e) => return Err(e.into()),
        };
    Ok(SweepRow {
        n,
        k,
        closed_form: to_fraction_string(&bz.value()),
        oracle,
        catalog_size,
        hider_ok: report.passed(),
        failed_checks: report.failures().iter().map(|c| c.name.to_string()).collect(),
    })
}

//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

use search_game::dp::best_response_tables;
use search_game::equilibrium::solve_equilibrium;
use search_game::labeling::{labeling_is_valid, labeling_to_strategy, strategy_to_labeling};
use search_game::line::{compute_hw, game_value_line, hider_coprime, hider_line, verify_hider};
use search_game::oracle::{
    enumerate_strategies, full_matrix_value, labeling_is_valid_pairwise, maximal_covered_sets, runs_of,
    CatalogOptions,
};
use search_game::line::is_maximal_covered_set;
use search_game::rational::{parse_fraction, ratio, to_fraction_string};
use search_game::{HiderDistribution, ProfitTable, Rational, Tree, TreeInstance};
use search_game_cli::{sweep_row, SweepRow};

type Outcome = Result<String, String>;

fn cli(args: &[&str]) -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_search-game"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON from {args:?}: {e}"))?;
    Ok((v, elapsed))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rationals(v: &Value) -> Vec<Rational> {
    v.as_array()
        .map(|a| a.iter().filter_map(|s| parse_fraction(s.as_str()?).ok()).collect())
        .unwrap_or_default()
}

fn u64s(v: &Value) -> Vec<u64> {
    v.as_array().map(|a| a.iter().filter_map(Value::as_u64).collect()).unwrap_or_default()
}

/// Fastest of several runs, in process and through the binary.
fn timings(n: u64, k: u32) -> Result<(Duration, Duration), String> {
    let mut lib = Duration::MAX;
    for _ in 0..5 {
        let t = Instant::now();
        game_value_line(n, k).map_err(|e| e.to_string())?;
        lib = lib.min(t.elapsed());
    }
    let mut bin = Duration::MAX;
    for _ in 0..5 {
        bin = bin.min(cli(&["line-solve", "--n", &n.to_string(), "--k", &k.to_string(), "--json"])?.1);
    }
    Ok((lib, bin))
}

/// Euclid steps are logarithmic: at most about 1.44 log2 of the smaller argument, plus slack.
fn ops_bound(n: u64, k: u32) -> u32 {
    let c = (1u64 << k) - 2;
    2 * (64 - c.min(n - 1).leading_zeros()) + 2
}

fn check_line(n: u64, k: u32, h: u64, w: u64, gcd: u64, starts: &[u64], hider: &[Rational]) -> Outcome {
    let (out, _) = cli(&["line-solve", "--n", &n.to_string(), "--k", &k.to_string(), "--json"])?;
    let value = out["value"].as_str().unwrap_or_default();
    ensure(value == to_fraction_string(&Rational::new(h.into(), w.into())), format!("value {value}"))?;
    ensure(out["h"] == h && out["w"] == w && out["gcd"] == gcd, format!("h/w/gcd {} {} {}", out["h"], out["w"], out["gcd"]))?;
    ensure(u64s(&out["seeker_starts"]) == starts, format!("starts {}", out["seeker_starts"]))?;
    ensure(rationals(&out["hider"]) == hider, format!("hider {}", out["hider"]))?;
    let ops = out["ops"].as_u64().unwrap_or(u64::MAX) as u32;
    ensure(ops <= ops_bound(n, k), format!("{ops} Euclid steps"))?;
    let (lib, bin) = timings(n, k)?;
    ensure(lib < Duration::from_millis(10), format!("solve took {lib:?}"))?;
    ensure(bin < Duration::from_millis(10), format!("line-solve process took {bin:?}"))?;
    Ok(format!("value {value}, {ops} Euclid steps, solve {lib:?}, process {bin:?}"))
}

fn criterion_1() -> Outcome {
    let hider: Vec<Rational> = (0..11).map(|v| if v % 2 == 1 && v < 10 { ratio(1, 5) } else { ratio(0, 1) }).collect();
    check_line(11, 3, 3, 5, 2, &[0, 7, 3, 9, 5], &hider)
}

fn criterion_2() -> Outcome {
    let hider: Vec<Rational> = (0..12)
        .map(|v| match v {
            0 | 11 => ratio(0, 1),
            5 | 6 => ratio(1, 18),
            _ => ratio(1, 9),
        })
        .collect();
    check_line(12, 3, 5, 9, 1, &[0, 7, 2, 8, 3, 9, 4, 10, 5], &hider)
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let bz = compute_hw(38, 4).map_err(|e| e.to_string())?;
    let (_, layout) = hider_coprime(38, 4).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure((bz.h, bz.w) == (11, 29), format!("h={} w={}", bz.h, bz.w))?;
    ensure(bz.ops <= ops_bound(38, 4), format!("{} Euclid steps", bz.ops))?;
    let head: Vec<(u64, u64)> = layout.lengths().into_iter().take_while(|&(s, _)| s <= 14).collect();
    let expected = vec![(1, 1), (2, 1), (3, 1), (4, 2), (6, 1), (7, 1), (8, 1), (9, 2), (11, 1), (12, 1), (13, 2)];
    ensure(head == expected, format!("segments on 1..14: {head:?}"))?;
    ensure(elapsed < Duration::from_millis(10), format!("took {elapsed:?}"))?;
    let pattern: String = head.iter().map(|&(_, l)| if l == 1 { 'S' } else { 'L' }).collect();
    Ok(format!("h=11 w=29, {} Euclid steps, segments 1..14 {pattern}, {elapsed:?}", bz.ops))
}

/// `(k, largest n)` covered by the oracle sweep.
const SWEEP: [(u32, u64); 3] = [(2, 40), (3, 40), (4, 24)];

fn sweep() -> Result<Vec<SweepRow>, String> {
    let mut rows = Vec::new();
    for (k, n_max) in SWEEP {
        for n in (1u64 << k) + 1..=n_max {
            rows.push(sweep_row(n, k, CatalogOptions::pruned()).map_err(|e| format!("n={n} k={k}: {e}"))?);
        }
    }
    Ok(rows)
}

fn criterion_4(rows: &[SweepRow]) -> Outcome {
    let mut largest = 0;
    for r in rows {
        let oracle = r.oracle.as_deref().ok_or(format!("n={} k={}: catalog guard", r.n, r.k))?;
        ensure(oracle == r.closed_form, format!("n={} k={}: oracle {oracle} vs h/w {}", r.n, r.k, r.closed_form))?;
        largest = largest.max(r.catalog_size.unwrap_or(0));
    }
    Ok(format!("{} instances (k=2,3 up to n=40; k=4 up to n=24), largest catalog {largest}", rows.len()))
}

fn criterion_5(rows: &[SweepRow]) -> Outcome {
    for r in rows {
        ensure(r.hider_ok, format!("n={} k={}: {:?}", r.n, r.k, r.failed_checks))?;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let (mut caught, mut total) = (0, 0);
    let mut missed = Vec::new();
    while total < 1000 {
        let r = &rows[rng.random_range(0..rows.len())];
        let (hider, _) = hider_line(r.n, r.k).map_err(|e| e.to_string())?;
        let bz = compute_hw(r.n, r.k).map_err(|e| e.to_string())?;
        let delta = Rational::new(1.into(), (2 * bz.w * bz.c).into());
        let n = r.n as usize;
        let from = rng.random_range(0..n);
        let to = rng.random_range(0..n);
        if from == to || *hider.get(from) < delta {
            continue;
        }
        let mut probs = hider.probs().to_vec();
        probs[from] -= &delta;
        probs[to] += &delta;
        let mutated = HiderDistribution::new(probs).map_err(|e| e.to_string())?;
        total += 1;
        if verify_hider(&mutated, r.n, r.k).map_err(|e| e.to_string())?.passed() {
            missed.push((r.n, r.k, from, to));
        } else {
            caught += 1;
        }
    }
    let rate = caught as f64 / total as f64;
    ensure(rate >= 0.95, format!("only {caught}/{total} mutations caught; e.g. {:?}", &missed[..missed.len().min(5)]))?;
    Ok(format!("{} sweep hiders verified; {caught}/{total} mutations caught", rows.len()))
}

fn random_tree(rng: &mut ChaCha20Rng, n: usize) -> Tree {
    let edges = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    Tree::new(n, edges).expect("parent edges form a tree")
}

fn random_profit(rng: &mut ChaCha20Rng, k: u32) -> ProfitTable {
    let mut values = Vec::with_capacity(k as usize);
    let mut p = rng.random_range(1..4u64);
    for _ in 0..k {
        values.push(p);
        p += rng.random_range(0..4u64);
    }
    values.reverse();
    ProfitTable::new(values).expect("non-increasing")
}

fn random_hider(rng: &mut ChaCha20Rng, n: usize) -> HiderDistribution {
    let mut w: Vec<i64> = (0..n).map(|_| rng.random_range(0..12)).collect();
    if w.iter().all(|&x| x == 0) {
        w[rng.random_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    HiderDistribution::new(w.into_iter().map(|x| ratio(x, total)).collect()).expect("normalized")
}

struct TreeCase {
    tree: Tree,
    profit: ProfitTable,
    hider: HiderDistribution,
}

fn tree_cases() -> Vec<TreeCase> {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    (0..200)
        .map(|_| {
            let n = rng.random_range(2..=12);
            let k = rng.random_range(1..=4);
            let tree = random_tree(&mut rng, n);
            let profit = random_profit(&mut rng, k);
            let hider = random_hider(&mut rng, n);
            TreeCase { tree, profit, hider }
        })
        .collect()
}

fn criterion_6(cases: &[TreeCase]) -> Outcome {
    let mut largest_table = 0;
    for (i, c) in cases.iter().enumerate() {
        let sol = best_response_tables(&c.tree, &c.profit, c.hider.probs()).map_err(|e| e.to_string())?;
        let catalog = enumerate_strategies(&c.tree, &c.profit, CatalogOptions::pruned()).map_err(|e| e.to_string())?;
        let (_, brute) = search_game::oracle::catalog_best_response(&catalog, &c.hider);
        ensure(sol.value == brute, format!("case {i}: dp {} vs brute force {}", sol.value, brute))?;
        let (n, k) = (c.tree.n(), c.profit.k());
        let bound = 2 * n * (1usize << (k + 1));
        ensure(sol.tables.entries() <= bound, format!("case {i}: {} table entries", sol.tables.entries()))?;
        largest_table = largest_table.max(sol.tables.entries());
    }
    Ok(format!("{} instances agree exactly; table sizes within 2n*2^(k+1) (max {largest_table})", cases.len()))
}

fn criterion_7(cases: &[TreeCase]) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut checked = 0;
    for (i, c) in cases.iter().enumerate() {
        let (n, k) = (c.tree.n(), c.profit.k());
        let catalog = enumerate_strategies(&c.tree, &c.profit, CatalogOptions::pruned()).map_err(|e| e.to_string())?;
        let (best, _) = search_game::oracle::catalog_best_response(&catalog, &c.hider);
        let mut picks = vec![best];
        picks.extend((0..8).map(|_| rng.random_range(0..catalog.len())));
        for j in picks {
            let t = catalog.strategy(j);
            let f = strategy_to_labeling(&t, &c.tree, k).map_err(|e| format!("case {i}: {e}"))?;
            ensure(labeling_is_valid(f.labels(), &c.tree, k), format!("case {i}: local test rejects {:?}", f.labels()))?;
            ensure(labeling_is_valid_pairwise(f.labels(), &c.tree), format!("case {i}: pairwise test rejects {:?}", f.labels()))?;
            let back = labeling_to_strategy(&f, &c.tree).map_err(|e| format!("case {i}: {e}"))?;
            let before = c.profit.profile(&t.discovery_times(n, k));
            let after = c.profit.profile(&back.discovery_times(n, k));
            ensure(after.iter().zip(&before).all(|(a, b)| a >= b), format!("case {i}: profit fell {before:?} -> {after:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} strategies round-tripped on {} instances", cases.len()))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let mut iterations = 0;
    for i in 0..50 {
        let n = rng.random_range(2..=10);
        let k = rng.random_range(1..=3);
        let tree = random_tree(&mut rng, n);
        let profit = random_profit(&mut rng, k);
        let inst = TreeInstance::new(tree, k, profit, None).map_err(|e| e.to_string())?;
        let eq = solve_equilibrium(&inst).map_err(|e| format!("case {i}: {e}"))?;
        let last = eq.history.last().ok_or("no iterations")?;
        ensure(last.lower == last.upper && last.lower == eq.value, format!("case {i}: bounds did not close"))?;
        ensure(eq.certificate_holds(), format!("case {i}: certificate"))?;
        let full = full_matrix_value(&inst).map_err(|e| e.to_string())?;
        ensure(full.value == eq.value, format!("case {i}: {} vs full matrix {}", eq.value, full.value))?;
        iterations += eq.iterations;
    }
    Ok(format!("50 equilibria exact, {iterations} master solves in total"))
}

fn criterion_9() -> Outcome {
    let k = 3;
    let mut sets = 0usize;
    for n in 2..=14usize {
        let enumerated = maximal_covered_sets(n, k).map_err(|e| e.to_string())?;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let accepted = is_maximal_covered_set(&runs_of(&set, n as u64), n as u64, k).map_err(|e| e.to_string())?;
            ensure(accepted == enumerated.contains(&set), format!("n={n}: {set:?} test={accepted}"))?;
        }
        sets += enumerated.len();
    }
    Ok(format!("all subsets of n <= 14 classified identically; {sets} maximal sets"))
}

fn criterion_10() -> Outcome {
    for (n, k) in [(11u64, 3u32), (12, 3), (38, 4), (40, 3)] {
        let w = compute_hw(n, k).map_err(|e| e.to_string())?.w;
        let draws = (10 * w).to_string();
        let (out, _) = cli(&["line-sample", "--n", &n.to_string(), "--k", &k.to_string(), "--seed", "10", "--draws", &draws, "--json"])?;
        let seen: std::collections::BTreeSet<u64> = u64s(&out["starts"]).into_iter().collect();
        ensure(seen.len() as u64 == w, format!("({n},{k}): {} of {w} starts hit", seen.len()))?;
    }
    let (out, _) = cli(&["line-sample", "--n", "11", "--k", "3", "--seed", "11", "--draws", "100000", "--json"])?;
    let starts = u64s(&out["starts"]);
    let expected = starts.len() as f64 / 5.0;
    let chi2: f64 = [0u64, 7, 3, 9, 5]
        .iter()
        .map(|s| {
            let o = starts.iter().filter(|&&x| x == *s).count() as f64;
            (o - expected).powi(2) / expected
        })
        .sum();
    // 0.999 quantile of chi-square with 4 degrees of freedom.
    ensure(chi2 < 18.467, format!("chi-square {chi2:.3}"))?;
    let (sim, _) = cli(&["simulate", "--n", "11", "--k", "3", "--trials", "100000", "--seed", "12"])?;
    let mean = sim["empirical_value"].as_f64().unwrap_or(f64::NAN);
    let se = sim["standard_error"].as_f64().unwrap_or(f64::NAN);
    ensure((mean - 0.6).abs() <= 3.0 * se, format!("simulated {mean:.4} with standard error {se:.4}"))?;
    Ok(format!("all starts hit; chi-square {chi2:.3}; simulated value {mean:.4} (se {se:.4})"))
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut report = |i: usize, r: Outcome| {
        match &r {
            Ok(msg) => println!("criterion {i:>2}: PASS  {msg}"),
            Err(msg) => println!("criterion {i:>2}: FAIL  {msg}"),
        }
        results.push((i, r));
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    match sweep() {
        Ok(rows) => {
            report(4, criterion_4(&rows));
            report(5, criterion_5(&rows));
        }
        Err(e) => {
            report(4, Err(e.clone()));
            report(5, Err(e));
        }
    }
    let cases = tree_cases();
    report(6, criterion_6(&cases));
    report(7, criterion_7(&cases));
    report(8, criterion_8());
    report(9, criterion_9());
    report(10, criterion_10());
    let failed: Vec<usize> = results.iter().filter(|(_, r)| r.is_err()).map(|(i, _)| *i).collect();
    println!("acceptance: {} of {} criteria passed in {:.1?}", results.len() - failed.len(), results.len(), started.elapsed());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

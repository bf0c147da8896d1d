use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use search_game::dp::best_response_dp;
use search_game::equilibrium::{solve_equilibrium_capped, DEFAULT_MAX_ITERS};
use search_game::labeling::labeling_to_strategy;
use search_game::line::{compute_hw, efficient_strategy, game_value_line, hider_line, seeker_starts, verify_hider};
use search_game::oracle::CatalogOptions;
use search_game::rational::to_fraction_string;
use search_game::{LineInstance, ProfitTable, TreeInstance};
use search_game_cli::{
    figure_csv, figure_json, line_sweep, rng, sample_line_start, simulate, CliError, CliResult,
};

#[derive(Parser)]
#[command(name = "search-game", version, about = "Exact solver for the budgeted hider/seeker search game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form value and equilibrium on the line with n vertices.
    LineSolve {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        json: bool,
    },
    /// Draw seeker strategies from the line equilibrium.
    LineSample {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of independent draws; more than one prints only start vertices.
        #[arg(long, default_value_t = 1)]
        draws: u64,
        /// Vertex to search for in the printed transcript.
        #[arg(long)]
        target: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Optimal hider on the line, its segment layout and the verifier report.
    LineHider {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        json: bool,
    },
    /// Seeker best response against the hider stored in the instance file.
    TreeBestResponse {
        #[arg(long)]
        instance: String,
    },
    /// Exact equilibrium of a tree instance by column generation.
    TreeSolve {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Closed form against the exhaustive oracle for every n up to n-max.
    Verify {
        #[arg(long, value_enum, default_value_t = Family::Line)]
        family: Family,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo play of an equilibrium pair.
    Simulate {
        #[arg(long, required_unless_present = "instance")]
        n: Option<u64>,
        #[arg(long, required_unless_present = "instance")]
        k: Option<u32>,
        #[arg(long, conflicts_with_all = ["n", "k"])]
        instance: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Worked line instances as tables: 2 is n=11 k=3, 3 is n=12 k=3, 4 is n=38 k=4.
    FigureData {
        #[arg(long)]
        figure: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Line,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn read_instance(path: &str) -> CliResult<TreeInstance> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    Ok(TreeInstance::from_json(&text)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn line_solve(n: u64, k: u32, as_json: bool) -> CliResult<()> {
    let sol = game_value_line(n, k)?;
    let bz = sol.bezout;
    let starts = bz.as_ref().map(seeker_starts).unwrap_or_default();
    let out = json!({
        "n": n,
        "k": k,
        "value": to_fraction_string(&sol.value),
        "h": bz.map(|b| b.h),
        "w": bz.map(|b| b.w),
        "gcd": bz.map(|b| b.gcd),
        "ops": bz.map(|b| b.ops),
        "seeker_starts": starts,
        "hider": sol.hider.to_strings(),
    });
    if as_json {
        print_json(&out);
    } else {
        println!("value {}", out["value"].as_str().unwrap_or_default());
        match bz {
            Some(b) => println!("h {} w {} gcd {}", b.h, b.w, b.gcd),
            None => println!("binary search finds every vertex"),
        }
        println!("seeker starts {starts:?}");
        println!("hider {}", sol.hider.to_strings().join(" "));
    }
    Ok(())
}

fn line_sample(n: u64, k: u32, seed: u64, draws: u64, target: Option<u64>, as_json: bool) -> CliResult<()> {
    let line = LineInstance::new(n, k)?;
    if line.is_trivial() {
        return Err(CliError::Usage(format!("n = {n} <= 2^k: the seeker plays binary search")));
    }
    let bz = compute_hw(n, k)?;
    let mut r = rng(seed);
    let starts = (0..draws)
        .map(|_| sample_line_start(&bz, &mut r))
        .collect::<CliResult<Vec<_>>>()?;
    if draws != 1 {
        if as_json {
            print_json(&json!({ "n": n, "k": k, "seed": seed, "starts": starts }));
        } else {
            for s in &starts {
                println!("{s}");
            }
        }
        return Ok(());
    }
    let start = starts[0];
    let tree = efficient_strategy(start, n, k)?;
    let queries: Vec<Value> = tree
        .queried_edges()
        .into_iter()
        .map(|(e, depth)| json!({ "edge": [e.0, e.1], "depth": depth }))
        .collect();
    let transcript: Option<Vec<Value>> = target.map(|v| {
        tree.transcript(v as usize)
            .into_iter()
            .map(|s| json!({ "edge": [s.edge.0, s.edge.1], "answer": s.answer }))
            .collect()
    });
    let found = target.map(|v| tree.covered_set().contains(&(v as usize)));
    if as_json {
        print_json(&json!({
            "n": n, "k": k, "seed": seed, "start": start,
            "queries": queries, "target": target, "transcript": transcript, "found": found,
        }));
    } else {
        println!("start {start}");
        for q in &queries {
            println!("query {} at depth {}", q["edge"], q["depth"]);
        }
        if let (Some(t), Some(steps), Some(f)) = (target, transcript, found) {
            for s in steps {
                println!("ask {} -> {}", s["edge"], s["answer"]);
            }
            println!("target {t} {}", if f { "found" } else { "not isolated" });
        }
    }
    Ok(())
}

fn line_hider_cmd(n: u64, k: u32, as_json: bool) -> CliResult<()> {
    let (hider, layout) = hider_line(n, k)?;
    let report = verify_hider(&hider, n, k)?;
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "witness": c.witness }))
        .collect();
    let segments: Vec<Value> = layout
        .iter()
        .flat_map(|l| &l.segments)
        .map(|s| json!({ "start": s.start, "len": s.len, "mass": to_fraction_string(&s.mass) }))
        .collect();
    if as_json {
        print_json(&json!({
            "n": n, "k": k, "hider": hider.to_strings(), "segments": segments,
            "r": layout.as_ref().map(|l| l.r), "t": layout.as_ref().map(|l| l.t), "checks": checks,
        }));
    } else {
        println!("hider {}", hider.to_strings().join(" "));
        for s in &segments {
            println!("segment start {} len {} mass {}", s["start"], s["len"], s["mass"].as_str().unwrap_or_default());
        }
        for c in &report.checks {
            println!("{:<16} {}", c.name, if c.passed { "pass" } else { "FAIL" });
        }
    }
    if !report.passed() {
        let names: Vec<_> = report.failures().iter().map(|c| c.name).collect();
        return Err(CliError::Verification(names.join(", ")));
    }
    Ok(())
}

fn tree_best_response(path: &str) -> CliResult<()> {
    let inst = read_instance(path)?;
    let (value, labeling) = best_response_dp(&inst)?;
    let strategy = labeling_to_strategy(&labeling, &inst.tree)?;
    print_json(&json!({
        "value": to_fraction_string(&value),
        "labeling": labeling.to_map(&inst.tree),
        "strategy": strategy.to_json(),
    }));
    Ok(())
}

fn tree_solve(path: &str, max_iters: usize) -> CliResult<()> {
    let inst = read_instance(path)?;
    let eq = solve_equilibrium_capped(&inst, max_iters)?;
    if !eq.certificate_holds() {
        return Err(CliError::Verification("duality certificate does not close".into()));
    }
    print_json(&eq.to_json());
    Ok(())
}

fn verify(k: u32, n_max: u64, as_json: bool) -> CliResult<()> {
    let rows = line_sweep(k, n_max, CatalogOptions::pruned())?;
    if as_json {
        print_json(&serde_json::to_value(&rows).expect("rows serialize"));
    } else {
        println!("{:>4} {:>2} {:>10} {:>10} {:>8} {:>6}", "n", "k", "h/w", "oracle", "catalog", "hider");
        for r in &rows {
            println!(
                "{:>4} {:>2} {:>10} {:>10} {:>8} {:>6}  {}",
                r.n,
                r.k,
                r.closed_form,
                r.oracle.as_deref().unwrap_or("guard"),
                r.catalog_size.map_or("-".into(), |s| s.to_string()),
                if r.hider_ok { "ok" } else { "FAIL" },
                if r.passed() { "pass" } else { "FAIL" },
            );
        }
    }
    let failed: Vec<String> = rows.iter().filter(|r| !r.passed()).map(|r| r.n.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("n = {}", failed.join(", "))))
    }
}

fn simulate_cmd(
    line: Option<(u64, u32)>,
    instance: Option<String>,
    trials: u64,
    seed: u64,
    max_iters: usize,
) -> CliResult<()> {
    let (x, y, profit) = match (line, instance) {
        (Some((n, k)), _) => {
            let sol = game_value_line(n, k)?;
            (sol.seeker, sol.hider, ProfitTable::unit(k))
        }
        (None, Some(path)) => {
            let inst = read_instance(&path)?;
            let eq = solve_equilibrium_capped(&inst, max_iters)?;
            (eq.seeker, eq.hider, inst.profit)
        }
        (None, None) => return Err(CliError::Usage("give --n and --k, or --instance".into())),
    };
    let report = simulate(&x, &y, &profit, trials, seed)?;
    print_json(&serde_json::to_value(&report).expect("report serializes"));
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::LineSolve { n, k, json } => line_solve(n, k, json),
        Command::LineSample { n, k, seed, draws, target, json } => line_sample(n, k, seed, draws, target, json),
        Command::LineHider { n, k, json } => line_hider_cmd(n, k, json),
        Command::TreeBestResponse { instance } => tree_best_response(&instance),
        Command::TreeSolve { instance, max_iters } => tree_solve(&instance, max_iters),
        Command::Verify { family: Family::Line, k, n_max, json } => verify(k, n_max, json),
        Command::Simulate { n, k, instance, trials, seed, max_iters } => {
            simulate_cmd(n.zip(k), instance, trials, seed, max_iters)
        }
        Command::FigureData { figure, format } => {
            match format {
                Format::Json => print_json(&figure_json(figure)?),
                Format::Csv => print!("{}", figure_csv(figure)?),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the reader of stdout goes away, as `head` does.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

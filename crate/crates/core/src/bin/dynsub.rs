use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dynsub::harness::{self, BaselineKind, Distribution, RunConfig};
use dynsub::{Constraint, ProblemSpec, Solver, SolverConfig};

/// Drive the dynamic solver over an update stream and write a JSONL report.
#[derive(Debug, Parser)]
#[command(name = "dynsub", version)]
struct Args {
    #[arg(long, default_value = "cardinality")]
    constraint: Constraint,
    /// Cardinality bound; for matroids defaults to the rank.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON problem file; generated from --gen when omitted.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Stream file of `+ id` / `- id` lines.
    #[arg(long, conflicts_with = "gen")]
    stream: Option<PathBuf>,
    /// Generated workload, e.g. `n=500,ops=1000,dist=mix:0.3`.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long)]
    check_invariants: bool,
    /// Cross-check binary-search placements with a linear scan.
    #[arg(long)]
    shadow_scan: bool,
    #[arg(long)]
    baseline: Option<BaselineKind>,
    #[arg(long, default_value_t = 1)]
    baseline_every: usize,
    /// JSONL report path; summary goes to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    float_tol: f64,
    /// After the stream, rebuild one level this many times and test the
    /// chosen element for uniformity.
    #[arg(long)]
    uniformity_trials: Option<usize>,
}

struct GenSpec {
    n: usize,
    ops: usize,
    dist: Distribution,
    seed: Option<u64>,
}

fn parse_gen(s: &str) -> Result<GenSpec, String> {
    let mut spec = GenSpec {
        n: 100,
        ops: 200,
        dist: Distribution::RandomMix(0.3),
        seed: None,
    };
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
        let bad = |_| format!("bad value for {key}: {value:?}");
        match key {
            "n" => spec.n = value.parse().map_err(bad)?,
            "ops" => spec.ops = value.parse().map_err(bad)?,
            "seed" => spec.seed = Some(value.parse().map_err(bad)?),
            "dist" => spec.dist = value.parse().map_err(|e: dynsub::Error| e.to_string())?,
            other => return Err(format!("unknown --gen key {other:?}")),
        }
    }
    Ok(spec)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(clean) if clean => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(args: &Args) -> Result<bool, Box<dyn std::error::Error>> {
    let gen = args.gen.as_deref().map(parse_gen).transpose()?;
    let (problem, events) = match (&args.oracle, &args.stream, &gen) {
        (Some(oracle), Some(stream), _) => {
            (ProblemSpec::load(oracle)?, harness::parse_stream(stream)?)
        }
        (oracle, None, Some(g)) => {
            let seed = g.seed.unwrap_or(args.seed);
            let problem = match oracle {
                Some(path) => ProblemSpec::load(path)?,
                None => harness::generate_problem(args.constraint, g.n, args.k.unwrap_or(5), seed)?,
            };
            (problem, harness::generate_stream(g.n, g.ops, g.dist, seed)?)
        }
        _ => return Err("give --oracle with --stream, or --gen (optionally with --oracle)".into()),
    };

    let mut solver_cfg = SolverConfig::new(args.constraint, args.k, args.epsilon, args.seed);
    solver_cfg.float_tol = args.float_tol;
    solver_cfg.shadow_scan = args.shadow_scan;
    if args.constraint == Constraint::Cardinality && solver_cfg.k.is_none() {
        solver_cfg.k = Some(5);
    }
    let mut cfg = RunConfig::new(solver_cfg.clone());
    cfg.check_invariants = args.check_invariants;
    cfg.baseline = args.baseline;
    cfg.baseline_every = args.baseline_every;

    let report = harness::run(&cfg, &problem, &events)?;
    if let Some(out) = &args.out {
        report.write_jsonl(out)?;
    }
    println!("{}", serde_json::to_string_pretty(&report.summary)?);

    if let Some(trials) = args.uniformity_trials {
        let mut solver = Solver::new(&solver_cfg, &problem)?;
        for &ev in &events {
            solver.update(ev)?;
        }
        let u = solver.uniformity(None, trials, args.seed)?;
        println!("{}", serde_json::to_string_pretty(&u)?);
        if !u.passes(1e-3) {
            return Ok(false);
        }
    }
    Ok(report.summary.clean())
}

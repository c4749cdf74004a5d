use std::path::Path;

use clap::Args;
use faso::config::TowerConfig;
use faso::metric::Generator;
use faso::tower::{validate_schedule, ScheduleMode};
use serde_json::json;

use crate::output::{ensure_dir, report, write, write_json, RunConfig};
use crate::{CliError, CliResult, Shared, Space};

#[derive(Args, Debug)]
pub struct GenerateArgs {
    pub space: Space,
    /// Inclusive level range `A..B`, or `N` for `1..N`.
    #[arg(long, default_value = "1..4", value_parser = parse_levels)]
    pub levels: (usize, usize),
    /// Points per level for `two_squares`: one count, or one per level.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub count: Vec<usize>,
    #[command(flatten)]
    pub shared: Shared,
}

pub fn parse_levels(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad level {t:?}: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => (1, parse(s)?),
    };
    if a == 0 || b < a {
        return Err(format!("empty or invalid level range {s:?}"));
    }
    Ok((a, b))
}

fn generators(args: &GenerateArgs) -> CliResult<Vec<Generator>> {
    let (a, b) = args.levels;
    let n = b - a + 1;
    let counts = match args.count.len() {
        1 => vec![args.count[0]; n],
        k if k == n => args.count.clone(),
        k => return Err(CliError::usage(format!("--count takes 1 or {n} values, got {k}"))),
    };
    Ok((a..=b)
        .zip(counts)
        .map(|(level, count)| match args.space {
            Space::Circle => Generator::Circle { level },
            Space::Cantor => Generator::Cantor { level },
            Space::Interval => Generator::Interval { level },
            Space::TwoSquares => Generator::TwoSquares { level, count, seed: args.shared.seed },
        })
        .collect())
}

pub fn run(args: GenerateArgs) -> CliResult {
    let out = &args.shared.out;
    ensure_dir(out)?;
    let mut config = TowerConfig::from_generators(ScheduleMode::Strict, generators(&args)?);
    if let Some(k) = args.shared.max_dim {
        config.max_dim = k;
    }
    if let Some(k) = args.shared.k_max {
        config.k_max = k;
    }
    if let Some(t) = args.shared.tolerance {
        config.tolerance = t;
    }
    let mut config = config.materialize(Path::new("."), out)?;
    // strict only when every coverage radius is analytic and the strict inequalities hold
    let schedule = config.schedule(out)?;
    let analytic = schedule.levels.iter().rev().skip(1).all(|s| s.gamma.is_some_and(|g| g.exact));
    let strict = validate_schedule(&schedule);
    config.mode = if !args.shared.relaxed && analytic && strict.passed { ScheduleMode::Strict } else { ScheduleMode::Relaxed };
    let why = if args.shared.relaxed {
        "requested with --relaxed".to_string()
    } else if !analytic {
        "coverage radius not analytic".to_string()
    } else if let Some(v) = strict.first_violation() {
        format!("strict inequality fails at level {}: {}", v.level, v.inequality)
    } else {
        "strict inequalities hold".to_string()
    };
    let schedule_path = out.join("schedule.json");
    write(&schedule_path, &(config.to_json() + "\n"))?;

    let run = RunConfig::new(
        "generate",
        json!({
            "space": args.space,
            "levels": [args.levels.0, args.levels.1],
            "count": args.count,
            "seed": args.shared.seed,
            "max_dim": config.max_dim,
            "k_max": config.k_max,
            "tolerance": config.tolerance,
            "relaxed": args.shared.relaxed,
        }),
    );
    let levels: Vec<_> = schedule
        .levels
        .iter()
        .zip(&config.levels)
        .map(|(s, l)| json!({"file": l.points_file, "points": s.len(), "epsilon": s.epsilon, "gamma": s.gamma}))
        .collect();
    write_json(&out.join("generate.json"), &report(&run, json!({"mode": config.mode, "mode_reason": why, "levels": levels})))?;

    println!("wrote {} levels and {}", schedule.depth(), schedule_path.display());
    println!("schedule mode: {:?} ({why})", config.mode);
    Ok(())
}

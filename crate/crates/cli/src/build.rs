use std::path::{Path, PathBuf};

use clap::Args;
use faso::config::TowerConfig;
use faso::tower::{validate_schedule, DumpCheck, ScheduleMode, Tower, TowerDump};
use faso::Exec;
use serde_json::{json, Value};

use crate::output::{ensure_dir, report, write, write_json, RunConfig};
use crate::{CliError, CliResult, Shared};

/// Levels with more elements get a stub instead of a Hasse diagram.
pub const DOT_CAP: usize = 500;

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Schedule file; same as --config.
    pub schedule: Option<PathBuf>,
    #[command(flatten)]
    pub shared: Shared,
}

fn settings(shared: &Shared, config: &TowerConfig, source: &Path) -> Value {
    json!({
        "config": source.display().to_string(),
        "mode": config.mode,
        "max_dim": config.max_dim,
        "k_max": config.k_max,
        "tolerance": config.tolerance,
        "depth": config.levels.len(),
        "relaxed": shared.relaxed,
        "sequential": shared.sequential,
    })
}

pub fn run(args: BuildArgs) -> CliResult {
    let shared = &args.shared;
    let source = args
        .schedule
        .clone()
        .or_else(|| shared.config.clone())
        .ok_or_else(|| CliError::usage("build needs a schedule file (positional or --config)"))?;
    let mut config = TowerConfig::load(&source)?;
    let base = source.parent().map(Path::to_path_buf).unwrap_or_default();
    if let Some(k) = shared.max_dim {
        config.max_dim = k;
    }
    if let Some(k) = shared.k_max {
        config.k_max = k;
    }
    if let Some(t) = shared.tolerance {
        config.tolerance = t;
    }
    if let Some(d) = shared.depth {
        if d == 0 || d > config.levels.len() {
            return Err(CliError::usage(format!("--depth {d} outside 1..={}", config.levels.len())));
        }
        config.levels.truncate(d);
    }
    let requested = config.mode;
    ensure_dir(&shared.out)?;

    // the strict report is always produced; --relaxed only changes what is enforced
    let mut schedule = config.schedule(&base)?;
    let strict_report = validate_schedule(&schedule);
    if shared.relaxed {
        config.mode = ScheduleMode::Relaxed;
    }
    schedule.mode = config.mode;
    let enforced = validate_schedule(&schedule);
    let run = RunConfig::new("build", settings(shared, &config, &source));

    let mut validation = json!({
        "requested_mode": requested,
        "mode": config.mode,
        "schedule": enforced,
        "strict_schedule": strict_report,
        "truncation": format!("terms keep subsets of at most {} points (max_dim {})", config.max_dim + 1, config.max_dim),
    });
    let validation_path = shared.out.join("validation.json");
    if !enforced.passed {
        write_json(&validation_path, &report(&run, &validation))?;
        let v = enforced.first_violation().expect("failed report has a violation");
        let hint = if config.mode == ScheduleMode::Strict { " (rerun with --relaxed to enforce only ε_{n+1} < ε_n/2)" } else { "" };
        return Err(CliError::validation(format!("schedule rejected at level {}: {}{hint}", v.level, v.inequality)));
    }

    let tower = match Tower::build(schedule, config.params(shared.exec())) {
        Ok(t) => t,
        Err(e) => {
            validation["error"] = json!(e.to_string());
            write_json(&validation_path, &report(&run, &validation))?;
            return Err(e.into());
        }
    };

    let mut levels = Vec::new();
    for n in 1..=tower.depth() {
        let sample = tower.sample(n)?;
        let elements = tower.complex(n)?.total();
        let file = format!("level{n}.dot");
        let dot = if elements <= DOT_CAP {
            tower.term(n)?.to_dot(&format!("level{n}"))
        } else {
            format!("digraph \"level{n}\" {{\n  label=\"{elements} elements; Hasse diagrams are drawn up to {DOT_CAP}\";\n}}\n")
        };
        write(&shared.out.join(&file), &format!("// run: {}\n{dot}", run.one_line()))?;
        let truncated = n > 1 && tower.bonding_map(n - 1).is_err();
        levels.push(json!({
            "level": n,
            "points": sample.len(),
            "epsilon": sample.epsilon,
            "gamma": sample.gamma,
            "elements": elements,
            "dot": file,
            "dot_stub": elements > DOT_CAP,
            "bonding_leaves_truncated_term": truncated,
        }));
    }
    validation["levels"] = json!(levels);
    write_json(&validation_path, &report(&run, &validation))?;

    let mut dump = json!({"run": run.to_value(), "tower": tower.dump()});
    if let Value::Object(m) = &mut dump {
        m.insert("config".into(), serde_json::to_value(&config)?);
    }
    write_json(&shared.out.join("tower.json"), &dump)?;

    println!("schedule ({:?}): {}", config.mode, crate::output::pass(enforced.passed));
    if config.mode == ScheduleMode::Relaxed && !strict_report.passed {
        println!("  strict inequalities fail; continuing in relaxed mode");
    }
    println!("terms truncated to subsets of at most {} points", config.max_dim + 1);
    for l in &levels {
        println!(
            "level {}: {} points, {} elements{}",
            l["level"],
            l["points"],
            l["elements"],
            if l["bonding_leaves_truncated_term"] == json!(true) { " (bonding image leaves the truncated term below)" } else { "" }
        );
    }
    println!("wrote {}", shared.out.join("tower.json").display());
    Ok(())
}

/// Reads a `tower.json` written by `build` (or a bare dump) and rebuilds it.
pub fn load_tower(path: &Path, depth: Option<usize>, exec: Exec) -> CliResult<(Tower, DumpCheck)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    let inner = value.get("tower").cloned().unwrap_or(value);
    let mut dump: TowerDump = serde_json::from_value(inner)?;
    if dump.levels.is_empty() {
        return Err(CliError::usage(format!("{} has no levels", path.display())));
    }
    if let Some(d) = depth {
        if d == 0 || d > dump.levels.len() {
            return Err(CliError::usage(format!("--depth {d} outside 1..={}", dump.levels.len())));
        }
        dump.levels.truncate(d);
        dump.bondings.retain(|b| b.level < d);
    }
    Ok(Tower::from_dump(&dump, exec)?)
}

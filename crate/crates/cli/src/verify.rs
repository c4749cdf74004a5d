use std::path::PathBuf;

use clap::Args;
use faso::limit::{separation_check, thread_dump, ThreadDump};
use faso::metric::{read_points_csv, ModelSpace, Point};
use faso::tower::{check_projection_diagram, fas_faso_comparison, two_tower_comparison, Tower, COMPARISON_CONSTANT};
use serde::Serialize;
use serde_json::{json, Value};

use crate::build::load_tower;
use crate::output::{ensure_dir, pass, report, write_json, RunConfig};
use crate::{CliError, CliResult, Shared, Space};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `tower.json` written by `build`.
    pub tower: PathBuf,
    /// Number of probe points.
    #[arg(long, default_value_t = 64)]
    pub probes: usize,
    /// Draw seeded random probes from this model space instead of the finest sample.
    #[arg(long)]
    pub space: Option<Space>,
    /// CSV of probe points; overrides --space.
    #[arg(long)]
    pub probes_file: Option<PathBuf>,
    /// Second tower of the same space for the two-tower comparison.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Constant `c` of the comparison index rule `δ_l < ε_n / c`.
    #[arg(long, default_value_t = COMPARISON_CONSTANT)]
    pub constant: f64,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Serialize)]
struct Outcome {
    check: &'static str,
    passed: bool,
    detail: String,
}

fn probes(args: &VerifyArgs, tower: &Tower) -> CliResult<(Vec<Point>, String)> {
    if let Some(path) = &args.probes_file {
        return Ok((read_points_csv(path)?, format!("file {}", path.display())));
    }
    if let Some(space) = args.space {
        return Ok((ModelSpace::from(space).random_points(args.probes, args.shared.seed), format!("random {space:?}")));
    }
    // evenly strided points of the finest sample
    let finest = tower.sample(tower.depth())?;
    let n = args.probes.min(finest.len()).max(1);
    let points = (0..n).map(|k| finest.point((k * finest.len() / n) as u32).clone()).collect();
    Ok((points, format!("{n} points of level {}", tower.depth())))
}

pub fn run(args: VerifyArgs) -> CliResult {
    let shared = &args.shared;
    let exec = shared.exec();
    let (tower, dump_check) = load_tower(&args.tower, shared.depth, exec)?;
    if tower.depth() < 2 {
        return Err(CliError::usage("verify needs a tower with at least two levels"));
    }
    let (points, probe_source) = probes(&args, &tower)?;
    for p in &points {
        tower.context().check(p)?;
    }
    ensure_dir(&shared.out)?;
    let mut outcomes = Vec::new();
    let mut body = serde_json::Map::new();

    let witness = dump_check
        .bonding_mismatches
        .first()
        .map(|m| format!("bonding {}→{}: vertex {} stored {} recomputed {}", m.level + 1, m.level, m.vertex, m.stored, m.recomputed))
        .or_else(|| dump_check.element_mismatches.first().map(|l| format!("elements of level {l} differ")));
    outcomes.push(Outcome { check: "dump", passed: dump_check.consistent(), detail: witness.unwrap_or_else(|| "matches recomputation".into()) });
    body.insert("dump_check".into(), serde_json::to_value(&dump_check)?);

    let mut diagrams = Vec::new();
    for n in 1..tower.depth() {
        diagrams.push(check_projection_diagram(&tower, n, &points)?);
    }
    let bad = diagrams.iter().find(|d| !d.passed);
    outcomes.push(Outcome {
        check: "projection_diagrams",
        passed: bad.is_none(),
        detail: match bad {
            None => format!("{} levels x {} probes", diagrams.len(), points.len()),
            Some(d) => match d.failures().next() {
                Some(p) => format!("level {}: probe {} direct {:?} through {:?}", d.level, p.probe, p.direct, p.through),
                None => format!("level {}: union homotopy fails", d.level),
            },
        },
    });
    body.insert("diagrams".into(), serde_json::to_value(&diagrams)?);

    let threads: Vec<Result<ThreadDump, String>> =
        exec.map_slice(&points, |x| thread_dump(&tower, x).map_err(|e| e.to_string()));
    let thread_ok = |t: &ThreadDump| {
        t.checks.compatibility.passed
            && t.checks.convergence.as_ref().is_none_or(|c| c.first_failure().is_none())
            && t.checks.stabilization.as_ref().is_none_or(|s| s.passed())
    };
    let bad = threads.iter().enumerate().find(|(_, t)| !t.as_ref().is_ok_and(thread_ok));
    outcomes.push(Outcome {
        check: "threads",
        passed: bad.is_none(),
        detail: match bad {
            None => format!("{} canonical threads compatible, convergent, inside B(x, 2ε_n)", threads.len()),
            Some((i, Err(e))) => format!("probe {i}: {e}"),
            Some((i, Ok(t))) => match t.checks.compatibility.first_failure() {
                Some(c) => format!("probe {i}: level {} entry {} image {}", c.level, c.entry, c.image),
                None => format!("probe {i}: convergence or containment fails"),
            },
        },
    });
    body.insert(
        "threads".into(),
        Value::Array(threads.iter().map(|t| t.as_ref().map_or_else(|e| json!({"error": e}), |t| serde_json::to_value(t).expect("thread serializes"))).collect()),
    );

    let half = points.len() / 2;
    let mut separations = Vec::new();
    let mut separated = true;
    for i in 0..half {
        let (x, y) = (&points[i], &points[i + half]);
        let levels = separation_check(&tower, x, y)?;
        separated &= levels.iter().all(|l| l.disjoint);
        if !levels.is_empty() {
            separations.push(json!({"pair": [i, i + half], "levels": levels}));
        }
    }
    outcomes.push(Outcome { check: "separation", passed: separated, detail: format!("{} pairs with d > 16ε_n at some level", separations.len()) });
    body.insert("separation".into(), Value::Array(separations));

    let has_gamma = (1..tower.depth()).all(|n| tower.sample(n).is_ok_and(|s| s.gamma.is_some()));
    if has_gamma {
        let fas = fas_faso_comparison(&tower)?;
        let literal = if fas.containments_hold { "all containments hold" } else { "q ⊆ i∘g fails somewhere; maps are comparable" };
        outcomes.push(Outcome { check: "fas_comparison", passed: fas.comparable, detail: literal.into() });
        body.insert("fas_comparison".into(), serde_json::to_value(&fas)?);
    }

    if let Some(other_path) = &args.compare {
        let (other, _) = load_tower(other_path, None, exec)?;
        let cmp = two_tower_comparison(&tower, &other, args.constant)?;
        outcomes.push(Outcome { check: "two_tower_comparison", passed: cmp.passed, detail: format!("{} squares checked", cmp.squares_checked) });
        body.insert("comparison".into(), serde_json::to_value(&cmp)?);
    }

    let all = outcomes.iter().all(|o| o.passed);
    let run = RunConfig::new(
        "verify",
        json!({
            "tower": args.tower.display().to_string(),
            "compare": args.compare.as_ref().map(|p| p.display().to_string()),
            "depth": tower.depth(),
            "probes": probe_source,
            "probe_count": points.len(),
            "seed": shared.seed,
            "constant": args.constant,
            "sequential": shared.sequential,
        }),
    );
    body.insert("summary".into(), serde_json::to_value(&outcomes)?);
    body.insert("passed".into(), json!(all));
    write_json(&shared.out.join("verify.json"), &report(&run, Value::Object(body)))?;

    for o in &outcomes {
        println!("{} {}: {}", pass(o.passed), o.check, o.detail);
    }
    if !all {
        return Err(CliError::validation("verification failed; see verify.json"));
    }
    Ok(())
}

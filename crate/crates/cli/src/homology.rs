use std::path::PathBuf;

use clap::Args;
use faso::homology::{tower_homology, HomologyOptions, OrderComplexCheck};
use serde_json::json;

use crate::build::load_tower;
use crate::output::{ensure_dir, report, write, write_json, RunConfig};
use crate::{CliError, CliResult, Shared};

#[derive(Args, Debug)]
pub struct HomologyArgs {
    /// `tower.json` written by `build`.
    pub tower: PathBuf,
    /// Largest order complex (in simplices) built for the subdivision check.
    #[arg(long, default_value_t = HomologyOptions::default().order_complex_cap)]
    pub order_complex_cap: usize,
    #[command(flatten)]
    pub shared: Shared,
}

pub fn run(args: HomologyArgs) -> CliResult {
    let shared = &args.shared;
    let (tower, dump_check) = load_tower(&args.tower, shared.depth, shared.exec())?;
    let opts = HomologyOptions {
        k_max: shared.k_max.unwrap_or(HomologyOptions::default().k_max),
        coefficients: shared.field,
        depth: None,
        order_complex_cap: args.order_complex_cap,
        exec: shared.exec(),
    };
    let run = RunConfig::new(
        "homology",
        json!({
            "tower": args.tower.display().to_string(),
            "depth": tower.depth(),
            "k_max": opts.k_max,
            "field": shared.field.to_string(),
            "order_complex_cap": opts.order_complex_cap,
            "sequential": shared.sequential,
        }),
    );
    ensure_dir(&shared.out)?;
    let result = tower_homology(&tower, &opts)?;

    write(&shared.out.join("betti.csv"), &format!("# run: {}\n{}", run.one_line(), result.betti_csv()))?;
    let mut components = format!("# run: {}\nlevel,points,components,betti_0,reduced_betti_0\n", run.one_line());
    for l in &result.levels {
        let b0 = l.betti.first().map(|b| b.betti).unwrap_or(0);
        components.push_str(&format!("{},{},{},{},{}\n", l.level, l.points, l.components, b0, b0.saturating_sub(1)));
    }
    write(&shared.out.join("components.csv"), &components)?;
    let consistent = result.consistent();
    write_json(&shared.out.join("summary.json"), &report(&run, json!({"consistent": consistent, "dump_check": dump_check, "homology": result})))?;

    println!("{}", result.betti_csv().trim_end());
    for l in &result.limit_ranks {
        println!("limit rank H_{} at level {}: {} (stable: {})", l.degree, l.level, l.rank, l.stable);
    }
    let skipped: Vec<usize> =
        result.levels.iter().filter(|l| matches!(l.order_complex, OrderComplexCheck::Skipped { .. })).map(|l| l.level).collect();
    if !skipped.is_empty() {
        eprintln!("warning: order-complex check skipped at levels {skipped:?} (over --order-complex-cap)");
    }
    if !dump_check.consistent() {
        eprintln!("warning: stored tower differs from its recomputation; stored bonding tables were used");
    }
    if !consistent {
        return Err(CliError::validation("homology checks failed; see summary.json"));
    }
    Ok(())
}

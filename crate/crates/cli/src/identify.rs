use std::fs;
use std::io::Write;
use std::path::PathBuf;

use chanid::geometry::{pack_offsets, parse_supports, GridSupport, MimoSupportPlan};
use chanid::ident::{
    recover, relative_error, simulate_output, stability_bounds, write_csv_rows, MimoChannel, PilotSet, CSV_HEADER,
};
use chanid::rng;
use chanid::spark::{is_prime, search_identifier, IdentifierSequence, DEFAULT_BUDGET};

use crate::context::{emit, warn_if_not_prime, Context};
use crate::error::CliError;

const LABEL_IDENTIFIER: u64 = 1;
const LABEL_CHANNEL: u64 = 2;
const LABEL_NOISE: u64 = 3;
const IDENTIFIER_CANDIDATES: usize = 3;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Built-in plan: `mimo2x2`, `siso` or `overspread`.
    #[arg(long)]
    preset: Option<String>,
    /// Support matrix file (`M N K L` header, `row input cell_m cell_n` lines,
    /// optional `offsets ...` line). Overrides the preset.
    #[arg(long)]
    plan: Option<PathBuf>,
}

fn grid(k: usize, l: usize, cells: &[(usize, usize)]) -> GridSupport {
    GridSupport::new(k, l, cells.iter().copied()).expect("preset cells lie on the grid")
}

pub fn preset(name: &str) -> Result<MimoSupportPlan, CliError> {
    let supports = match name {
        "mimo2x2" => vec![
            vec![grid(2, 7, &[(0, 0), (1, 1)]), grid(2, 7, &[(0, 0), (1, 0), (1, 2)])],
            vec![grid(2, 7, &[(0, 1)]), grid(2, 7, &[(1, 0), (1, 2)])],
        ],
        "siso" => vec![vec![grid(2, 7, &[(0, 0), (0, 3), (1, 1), (1, 4), (1, 6)])]],
        "overspread" => vec![vec![grid(2, 5, &[(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (1, 2)])]],
        other => return Err(CliError::config(format!("unknown preset `{other}`"))),
    };
    Ok(pack_offsets(supports)?)
}

fn load_plan(path: &PathBuf) -> Result<MimoSupportPlan, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let (supports, offsets) = parse_supports(&text)?;
    Ok(match offsets {
        Some(o) => MimoSupportPlan::with_offsets(supports, o)?,
        None => pack_offsets(supports)?,
    })
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let plan = match ctx.path(args.plan, "plan") {
        Some(p) => load_plan(&p)?,
        None => preset(&ctx.value(args.preset, "preset", "mimo2x2".to_string())?)?,
    };
    let seed = ctx.seed()?;
    let trials = ctx.trials(10)?;
    let noise = ctx.noise()?;
    let (k, l) = (plan.k(), plan.l());
    warn_if_not_prime(l);

    let id_seed = rng::derive(seed, LABEL_IDENTIFIER);
    let c = if is_prime(l) {
        search_identifier::<f64>(l, k, IDENTIFIER_CANDIDATES, id_seed, DEFAULT_BUDGET)?.0
    } else {
        IdentifierSequence::random(l, &mut rng::stream(id_seed, 0))
    };
    let pilots = PilotSet::for_plan(c, &plan);
    let (a, b) = stability_bounds(&plan, pilots.identifier())?;
    println!(
        "plan: M={} N={} K={k} L={l} offsets={:?} cells={} A_est={a:.6} B_est={b:.6}",
        plan.rows(),
        plan.inputs(),
        plan.offsets(),
        plan.total_cells()
    );

    let mut detail = ctx.csv("identify_trials.csv")?;
    if let Some(w) = detail.as_mut() {
        writeln!(w, "{CSV_HEADER}")?;
    }
    let mut summary = Vec::with_capacity(trials);
    let mut worst = 0f64;
    for trial in 0..trials {
        let ch = MimoChannel::random(
            plan.clone(),
            &mut rng::stream(rng::derive(seed, LABEL_CHANNEL), trial as u64),
        );
        let y = simulate_output(
            &ch,
            &pilots,
            noise,
            &mut rng::stream(rng::derive(seed, LABEL_NOISE), trial as u64),
        )?;
        let result = recover(&y, &plan, &pilots)?;
        let err = relative_error(&ch, &result.recovered);
        let max_res = result.residual.iter().copied().fold(0f64, f64::max);
        worst = worst.max(err);
        if let Some(w) = detail.as_mut() {
            write_csv_rows(w, trial, &plan, &result)?;
        }
        summary.push(format!("{trial},{err},{max_res},{},{}", result.a_est, result.b_est));
    }
    if let Some(mut w) = detail {
        w.flush()?;
    }
    emit(
        ctx.csv("identify_summary.csv")?,
        "trial,relative_error,max_residual,a_est,b_est",
        summary,
    )?;
    println!("{trials} trials, noise sigma {noise}: max relative error {worst:.3e}");
    Ok(())
}

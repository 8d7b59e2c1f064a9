use chanid::necessity::composition::{DEFAULT_SIDES, INSTABILITY_FLOOR};
use chanid::necessity::{
    composition_instability, composition_sections, kernel_vector, tail_sum, CompositionCurve, CompositionSetup,
    SlantedMatrixSpec,
};

use crate::context::{emit, Context};
use crate::error::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// `appendix`, `tail`, `composition` or `sections`.
    #[arg(long)]
    mode: Option<String>,
    /// Slant factor of the infinite matrix.
    #[arg(long)]
    lambda: Option<f64>,
    /// Off-diagonal decay power of the weight.
    #[arg(long)]
    decay: Option<f64>,
    /// Degree of the polynomial growth factor.
    #[arg(long)]
    poly: Option<u32>,
    /// Inner radii K1, comma separated.
    #[arg(long, value_delimiter = ',')]
    k1: Option<Vec<usize>>,
    /// Number of support cells J for the composition experiment.
    #[arg(long)]
    cells: Option<usize>,
    /// Modulation box sides, comma separated.
    #[arg(long, value_delimiter = ',')]
    sides: Option<Vec<usize>>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let mode = ctx.value(args.mode.clone(), "mode", "appendix".to_string())?;
    match mode.as_str() {
        "appendix" | "tail" => slanted(ctx, &args, mode == "appendix"),
        "composition" | "sections" => composition(ctx, &args, mode == "composition"),
        other => Err(CliError::config(format!("unknown necessity mode `{other}`"))),
    }
}

fn slanted(ctx: &Context, args: &Args, kernels: bool) -> Result<(), CliError> {
    let lambda = ctx.value(args.lambda, "lambda", 2.0)?;
    let poly = ctx.value(args.poly, "poly", 1)?;
    let decay = ctx.optional(args.decay, "decay")?;
    let k1s = ctx.list(args.k1.clone(), "k1", vec![1, 2, 3, 4])?;
    let spec_for = |k1| {
        let mut spec = SlantedMatrixSpec::new(lambda, poly, k1);
        if let Some(d) = decay {
            spec.decay_power = d;
        }
        spec
    };
    let weight = spec_for(1).weight();
    let tails = tail_sum(&weight, poly, &k1s)?;
    for (k1, t) in k1s.iter().zip(&tails) {
        println!("tail K1={k1}: {t:.6e}");
    }
    emit(
        ctx.csv("necessity_tail.csv")?,
        "k1,tail",
        k1s.iter().zip(&tails).map(|(k1, t)| format!("{k1},{t}")),
    )?;
    if !kernels {
        return Ok(());
    }

    let mut rows = Vec::with_capacity(k1s.len());
    for &k1 in &k1s {
        let spec = spec_for(k1);
        spec.validate()?;
        let r = kernel_vector(&spec)?;
        let mx2 = r.norm_mx * r.norm_mx;
        let (nr, nc) = ((2 * r.n_tilde + 1).pow(2), (2 * r.n + 1).pow(2));
        println!(
            "K1={k1}: N={} N~={} section {nr}x{nc} kernel_dim={} |Mx|^2={mx2:.6e} bound={:.6e} shell={:.6e}",
            r.n, r.n_tilde, r.kernel_dim, r.appendix_bound, r.shell_bound
        );
        rows.push(format!(
            "{k1},{},{},{nr},{nc},{},{mx2},{},{},{}",
            r.n, r.n_tilde, r.kernel_dim, r.appendix_bound, r.shell_bound, r.inner_residual
        ));
    }
    emit(
        ctx.csv("necessity_appendix.csv")?,
        "k1,n,n_tilde,rows,cols,kernel_dim,norm_mx_sq,appendix_bound,shell_bound,inner_residual",
        rows,
    )
}

fn composition(ctx: &Context, args: &Args, guarded: bool) -> Result<(), CliError> {
    let cells = ctx.value(args.cells, "cells", 4)?;
    let sides = ctx.list(args.sides.clone(), "sides", DEFAULT_SIDES.to_vec())?;
    let setup = CompositionSetup::<f64>::standard(cells, ctx.seed()?)?;
    let curve: CompositionCurve<f64> = if guarded {
        composition_instability(&setup, &sides)?
    } else {
        composition_sections(&setup, &sides)?
    };
    println!(
        "P={} L={} J={} lambda={} analysis {}x{} (density {})",
        curve.period,
        curve.l,
        curve.cells,
        curve.lambda,
        curve.analysis_steps.0,
        curve.analysis_steps.1,
        curve.analysis_density
    );
    for p in &curve.points {
        println!(
            "side {}: {} members, sigma_min={:.6e} sigma_max={:.6e} ratio={:.6e}",
            p.side,
            p.members,
            p.sigma_min,
            p.sigma_max,
            p.sigma_min / p.sigma_max
        );
    }
    println!(
        "unstable (floor {INSTABILITY_FLOOR}): {}",
        curve.is_unstable(INSTABILITY_FLOOR)
    );
    emit(
        ctx.csv("necessity_sections.csv")?,
        "side,members,sigma_min,sigma_max,ratio",
        curve.points.iter().map(|p| {
            format!(
                "{},{},{},{},{}",
                p.side,
                p.members,
                p.sigma_min,
                p.sigma_max,
                p.sigma_min / p.sigma_max
            )
        }),
    )
}

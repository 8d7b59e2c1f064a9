use chanid::rng;
use chanid::spark::{
    build_a, exhaustive_subset_sigmas, sampled_subset_sigmas, summarize, IdentifierSequence, SparkMode, SubsetSigma,
    DEFAULT_BUDGET,
};
use itertools::Itertools;

use crate::context::{emit, warn_if_not_prime, Context};
use crate::error::CliError;

const LABEL_IDENTIFIER: u64 = 1;
const LABEL_SAMPLING: u64 = 2;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Period L of the identifier (prime for the full spark guarantee).
    #[arg(long = "L")]
    l: Option<usize>,
    /// Number of frequency blocks K.
    #[arg(long = "K")]
    k: Option<usize>,
    /// `exhaustive` or `sampled`.
    #[arg(long)]
    mode: Option<String>,
    /// Maximum number of L-subsets to evaluate.
    #[arg(long)]
    budget: Option<u64>,
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let l = ctx.value(args.l, "L", 7)?;
    let k = ctx.value(args.k, "K", 2)?;
    let budget = ctx.value(args.budget, "budget", DEFAULT_BUDGET)?;
    let mode_name = ctx.value(args.mode, "mode", "exhaustive".to_string())?;
    let seed = ctx.seed()?;
    let trials = ctx.trials(1)?.max(1);
    if l == 0 || k == 0 {
        return Err(CliError::config("L and K must be positive"));
    }
    warn_if_not_prime(l);

    let mut summary = Vec::with_capacity(trials);
    let mut best: Option<(f64, IdentifierSequence<f64>, Vec<SubsetSigma<f64>>)> = None;
    for trial in 0..trials {
        let c =
            IdentifierSequence::<f64>::random(l, &mut rng::stream(rng::derive(seed, LABEL_IDENTIFIER), trial as u64));
        let a = build_a(&c, k)?;
        let (mode, sigmas) = match mode_name.as_str() {
            "exhaustive" => (SparkMode::Exhaustive, exhaustive_subset_sigmas(&a, budget)?),
            "sampled" => {
                if budget == 0 {
                    return Err(CliError::config("sampled mode needs a positive budget"));
                }
                let s = rng::derive(rng::derive(seed, LABEL_SAMPLING), trial as u64);
                (SparkMode::Sampled { seed: s }, sampled_subset_sigmas(&a, budget, s))
            }
            other => return Err(CliError::config(format!("unknown spark mode `{other}`"))),
        };
        let report = summarize(&a, mode, &sigmas);
        let ratio = report.min_sigma_min / report.matrix_norm;
        summary.push(format!(
            "{trial},{l},{k},{mode_name},{},{},{},{},{},{}",
            report.subsets_checked,
            report.min_sigma_min,
            report.matrix_norm,
            ratio,
            report.is_full_spark(),
            report.witness.iter().join(" ")
        ));
        println!(
            "trial {trial}: L={l} K={k} {mode_name} subsets={} min sigma_min={:.6e} ratio={:.6e} full_spark={}",
            report.subsets_checked,
            report.min_sigma_min,
            ratio,
            report.is_full_spark()
        );
        if best.as_ref().is_none_or(|(r, _, _)| ratio > *r) {
            best = Some((ratio, c, sigmas));
        }
    }
    let (_, c, sigmas) = best.expect("at least one trial");

    emit(
        ctx.csv("spark_summary.csv")?,
        "trial,L,K,mode,subsets,min_sigma_min,matrix_norm,ratio,full_spark,witness",
        summary,
    )?;
    emit(
        ctx.csv("spark_subsets.csv")?,
        "subset,columns,sigma_min",
        sigmas
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{i},{},{}", s.columns.iter().join(" "), s.sigma_min)),
    )?;
    emit(
        ctx.csv("identifier.csv")?,
        "index,re,im",
        c.values()
            .iter()
            .enumerate()
            .map(|(i, z)| format!("{i},{},{}", z.re, z.im)),
    )?;
    Ok(())
}

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chanid::geometry::{best_cover, pack_offsets, parse_supports, Rect, RectUnion};

use crate::context::{emit, Context};
use crate::error::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Rectangle file: one `m n t0 t1 nu0 nu1` line per rectangle of the
    /// support of subchannel (m, n).
    #[arg(long)]
    rects: Option<PathBuf>,
    /// Grid supports to pack directly, skipping the cover search.
    #[arg(long, conflicts_with = "rects")]
    supports: Option<PathBuf>,
    /// Largest number of time blocks K to try.
    #[arg(long)]
    kmax: Option<usize>,
    /// Largest prime L to try.
    #[arg(long)]
    lmax: Option<usize>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Rectangles keyed by subchannel, as a dense `M × N` matrix.
pub fn parse_rect_matrix(text: &str) -> Result<Vec<Vec<RectUnion<f64>>>, CliError> {
    let mut by_channel: BTreeMap<(usize, usize), Vec<Rect<f64>>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let bad = || CliError::config(format!("rects line {}: expected `m n t0 t1 nu0 nu1`", i + 1));
        if words.len() != 6 {
            return Err(bad());
        }
        let m: usize = words[0].parse().map_err(|_| bad())?;
        let n: usize = words[1].parse().map_err(|_| bad())?;
        let v: Vec<f64> = words[2..]
            .iter()
            .map(|w| w.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        by_channel
            .entry((m, n))
            .or_default()
            .push(Rect::new(v[0], v[1], v[2], v[3]));
    }
    let rows = by_channel.keys().map(|k| k.0 + 1).max().unwrap_or(0);
    let cols = by_channel.keys().map(|k| k.1 + 1).max().unwrap_or(0);
    if rows == 0 {
        return Err(CliError::config("rects file lists no rectangles"));
    }
    let mut out = Vec::with_capacity(rows);
    for m in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for n in 0..cols {
            let rects = by_channel
                .remove(&(m, n))
                .ok_or_else(|| CliError::config(format!("rects file has no rectangle for subchannel ({m}, {n})")))?;
            row.push(RectUnion::new(rects)?);
        }
        out.push(row);
    }
    Ok(out)
}

pub fn run(ctx: &Context, args: Args) -> Result<(), CliError> {
    let k_max = ctx.value(args.kmax, "kmax", 10)?;
    let l_max = ctx.value(args.lmax, "lmax", 101)?;
    let mut summary = Vec::new();
    let supports = if let Some(path) = ctx.path(args.supports, "supports") {
        parse_supports(&read(&path)?)?.0
    } else {
        let path = ctx
            .path(args.rects, "rects")
            .ok_or_else(|| CliError::config("cover needs --rects or --supports"))?;
        let rows = parse_rect_matrix(&read(&path)?)?;
        let choice = best_cover(&rows, k_max, l_max)?;
        println!("grid K={} L={}", choice.k, choice.l);
        for (m, row) in rows.iter().enumerate() {
            for (n, s) in row.iter().enumerate() {
                let cover = &choice.covers[m][n];
                summary.push(format!(
                    "{m},{n},{},{},{}",
                    s.area(),
                    cover.len(),
                    cover.measure::<f64>()
                ));
            }
        }
        choice.covers
    };
    let plan = pack_offsets(supports)?;
    println!(
        "offsets {:?}; cells per row {:?}",
        plan.offsets(),
        (0..plan.rows()).map(|m| plan.merged(m).len()).collect::<Vec<_>>()
    );
    if summary.is_empty() {
        for m in 0..plan.rows() {
            for n in 0..plan.inputs() {
                let s = plan.support(m, n);
                summary.push(format!("{m},{n},,{},{}", s.len(), s.measure::<f64>()));
            }
        }
    }
    if let Some(mut w) = ctx.csv("cover_plan.txt")? {
        w.write_all(plan.to_text().as_bytes())?;
        w.flush()?;
    }
    emit(ctx.csv("cover_summary.csv")?, "m,n,area,cells,measure", summary)
}

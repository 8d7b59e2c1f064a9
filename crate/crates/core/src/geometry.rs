//! Spreading supports: rectangle unions, grid covers and MIMO offset packing.
//!
//! The grid with parameters `(K, L)` tiles the time-frequency torus
//! `[0, 1) × [0, K)` by cells `[m/K, (m+1)/K] × [nK/L, (n+1)K/L]`, each of area
//! `1/L`, for `m ∈ ℤ_K`, `n ∈ ℤ_L`. Coordinates outside the torus wrap.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::scalar::{from_usize, lit, Real};
use crate::spark::primes_up_to;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("rectangle {0} has a non-finite endpoint")]
    UnboundedInput(usize),
    #[error("rectangle {0} is empty (need t1 > t0 and nu1 > nu0)")]
    EmptyRectangle(usize),
    #[error("grid parameters must be positive, got K={k}, L={l}")]
    InvalidGrid { k: usize, l: usize },
    #[error("cell ({m}, {n}) outside the {k}x{l} grid")]
    CellOutOfRange { m: usize, n: usize, k: usize, l: usize },
    #[error("supports live on different grids")]
    GridMismatch,
    #[error("no cover found: {0}")]
    NoCoverFound(String),
    #[error("no disjoint frequency offsets exist for row {row}")]
    PackingFailed { row: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Axis-aligned rectangle `[t0, t1] × [nu0, nu1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub t0: T,
    pub t1: T,
    pub nu0: T,
    pub nu1: T,
}

impl<T: Real> Rect<T> {
    pub fn new(t0: T, t1: T, nu0: T, nu1: T) -> Self {
        Self { t0, t1, nu0, nu1 }
    }

    pub fn area(&self) -> T {
        (self.t1 - self.t0) * (self.nu1 - self.nu0)
    }

    pub fn contains(&self, t: T, nu: T) -> bool {
        self.t0 <= t && t <= self.t1 && self.nu0 <= nu && nu <= self.nu1
    }
}

/// Finite union of rectangles (a Jordan domain).
#[derive(Debug, Clone, PartialEq)]
pub struct RectUnion<T> {
    rects: Vec<Rect<T>>,
}

impl<T: Real> RectUnion<T> {
    pub fn new(rects: Vec<Rect<T>>) -> Result<Self, GeometryError> {
        for (i, r) in rects.iter().enumerate() {
            if ![r.t0, r.t1, r.nu0, r.nu1].iter().all(|v| v.is_finite()) {
                return Err(GeometryError::UnboundedInput(i));
            }
            if !(r.t1 > r.t0 && r.nu1 > r.nu0) {
                return Err(GeometryError::EmptyRectangle(i));
            }
        }
        Ok(Self { rects })
    }

    pub fn rects(&self) -> &[Rect<T>] {
        &self.rects
    }

    pub fn contains(&self, t: T, nu: T) -> bool {
        self.rects.iter().any(|r| r.contains(t, nu))
    }

    /// Lebesgue measure of the union (overlaps counted once).
    pub fn area(&self) -> T {
        let mut ts: Vec<T> = self.rects.iter().flat_map(|r| [r.t0, r.t1]).collect();
        let mut nus: Vec<T> = self.rects.iter().flat_map(|r| [r.nu0, r.nu1]).collect();
        let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
        ts.sort_by(cmp);
        ts.dedup();
        nus.sort_by(cmp);
        nus.dedup();
        let half = lit::<T>(0.5);
        let mut area = T::zero();
        for tw in ts.windows(2) {
            let tm = (tw[0] + tw[1]) * half;
            for nw in nus.windows(2) {
                let nm = (nw[0] + nw[1]) * half;
                if self
                    .rects
                    .iter()
                    .any(|r| r.t0 < tm && tm < r.t1 && r.nu0 < nm && nm < r.nu1)
                {
                    area += (tw[1] - tw[0]) * (nw[1] - nw[0]);
                }
            }
        }
        area
    }

    /// Parse four whitespace-separated reals per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut rects = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|w| w.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| GeometryError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            if vals.len() != 4 {
                return Err(GeometryError::Parse {
                    line: i + 1,
                    message: format!("expected 4 reals, found {}", vals.len()),
                });
            }
            rects.push(Rect::new(lit(vals[0]), lit(vals[1]), lit(vals[2]), lit(vals[3])));
        }
        Self::new(rects)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rects {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                crate::scalar::to_f64(r.t0),
                crate::scalar::to_f64(r.t1),
                crate::scalar::to_f64(r.nu0),
                crate::scalar::to_f64(r.nu1)
            );
        }
        out
    }
}

/// A union of cells of the `(K, L)` grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridSupport {
    k: usize,
    l: usize,
    cells: BTreeSet<(usize, usize)>,
}

impl GridSupport {
    pub fn new(k: usize, l: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GeometryError> {
        if k == 0 || l == 0 {
            return Err(GeometryError::InvalidGrid { k, l });
        }
        let mut set = BTreeSet::new();
        for (m, n) in cells {
            if m >= k || n >= l {
                return Err(GeometryError::CellOutOfRange { m, n, k, l });
            }
            set.insert((m, n));
        }
        Ok(Self { k, l, cells: set })
    }

    pub fn empty(k: usize, l: usize) -> Result<Self, GeometryError> {
        Self::new(k, l, std::iter::empty())
    }

    pub fn full(k: usize, l: usize) -> Result<Self, GeometryError> {
        Self::new(k, l, (0..k).flat_map(|m| (0..l).map(move |n| (m, n))))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Cells in lexicographic `(m, n)` order.
    pub fn cells(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.cells.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: (usize, usize)) -> bool {
        self.cells.contains(&cell)
    }

    /// Area `|cells| / L`.
    pub fn measure<T: Real>(&self) -> T {
        from_usize::<T>(self.cells.len()) / from_usize::<T>(self.l)
    }

    /// Continuous extent `[t0, t1] × [nu0, nu1]` of cell `(m, n)`.
    pub fn cell_rect<T: Real>(&self, m: usize, n: usize) -> Rect<T> {
        let k = from_usize::<T>(self.k);
        let l = from_usize::<T>(self.l);
        Rect::new(
            from_usize::<T>(m) / k,
            from_usize::<T>(m + 1) / k,
            from_usize::<T>(n * self.k) / l,
            from_usize::<T>((n + 1) * self.k) / l,
        )
    }

    /// Translate every cell by `offset` frequency rows (mod L).
    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            k: self.k,
            l: self.l,
            cells: self.cells.iter().map(|&(m, n)| (m, (n + offset) % self.l)).collect(),
        }
    }

    fn same_grid(&self, other: &Self) -> Result<(), GeometryError> {
        if self.k == other.k && self.l == other.l {
            Ok(())
        } else {
            Err(GeometryError::GridMismatch)
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool, GeometryError> {
        self.same_grid(other)?;
        Ok(self.cells.is_disjoint(&other.cells))
    }

    pub fn union(&self, other: &Self) -> Result<Self, GeometryError> {
        self.same_grid(other)?;
        Ok(Self {
            k: self.k,
            l: self.l,
            cells: self.cells.union(&other.cells).copied().collect(),
        })
    }

    /// `K L` header followed by one `m n` line per cell.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.k, self.l);
        for (m, n) in &self.cells {
            let _ = writeln!(out, "{m} {n}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut rows = integer_rows(text)?;
        let (line, header) = rows.next().ok_or(GeometryError::Parse {
            line: 1,
            message: "missing `K L` header".into(),
        })??;
        let [k, l] = fixed::<2>(line, &header)?;
        let mut cells = Vec::new();
        for row in rows {
            let (line, vals) = row?;
            let [m, n] = fixed::<2>(line, &vals)?;
            cells.push((m, n));
        }
        Self::new(k, l, cells)
    }
}

type IntRow = Result<(usize, Vec<usize>), GeometryError>;

fn integer_rows(text: &str) -> Result<impl Iterator<Item = IntRow> + '_, GeometryError> {
    Ok(text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            return None;
        }
        Some(
            line.split_whitespace()
                .map(|w| w.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map(|v| (i + 1, v))
                .map_err(|e| GeometryError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                }),
        )
    }))
}

fn fixed<const N: usize>(line: usize, vals: &[usize]) -> Result<[usize; N], GeometryError> {
    vals.try_into().map_err(|_| GeometryError::Parse {
        line,
        message: format!("expected {N} integers, found {}", vals.len()),
    })
}

/// Smallest grid-cell union containing `s`: a cell is included iff its open
/// interior meets the open interior of some rectangle of `s`. Boundary-only
/// contact does not count.
pub fn outer_cover<T: Real>(s: &RectUnion<T>, k: usize, l: usize) -> Result<GridSupport, GeometryError> {
    if k == 0 || l == 0 {
        return Err(GeometryError::InvalidGrid { k, l });
    }
    let kf = from_usize::<T>(k);
    let lf = from_usize::<T>(l);
    let mut cells = BTreeSet::new();
    for r in s.rects() {
        let ms = overlapping_indices(r.t0, r.t1, k, |m| from_f::<T>(m) / kf);
        let ns = overlapping_indices(r.nu0, r.nu1, l, |n| from_f::<T>(n) * kf / lf);
        for &m in &ms {
            for &n in &ns {
                cells.insert((m, n));
            }
        }
    }
    Ok(GridSupport { k, l, cells })
}

fn from_f<T: Real>(i: i64) -> T {
    T::from_i64(i).expect("grid index representable")
}

/// Residues `i mod count` of the cells `(edge(i), edge(i+1))` meeting `(lo, hi)`.
fn overlapping_indices<T: Real>(lo: T, hi: T, count: usize, edge: impl Fn(i64) -> T) -> Vec<usize> {
    // Approximate index range from the cell width, then decide with exact
    // comparisons against the edges.
    let width = edge(1) - edge(0);
    let first = (lo / width).floor().to_i64().unwrap_or(0) - 1;
    let last = (hi / width).ceil().to_i64().unwrap_or(0) + 1;
    if last - first > count as i64 + 2 {
        return (0..count).collect();
    }
    let mut out: BTreeSet<usize> = BTreeSet::new();
    for i in first..=last {
        if lo < edge(i + 1) && hi > edge(i) {
            out.insert(i.rem_euclid(count as i64) as usize);
        }
    }
    out.into_iter().collect()
}

/// Chosen grid and the covers of every subchannel support (row-major `M × N`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverChoice {
    pub k: usize,
    pub l: usize,
    pub covers: Vec<Vec<GridSupport>>,
}

impl CoverChoice {
    /// `Σ_n μ(U_mn)` for each row.
    pub fn row_measures<T: Real>(&self) -> Vec<T> {
        self.covers
            .iter()
            .map(|row| row.iter().fold(T::zero(), |acc, u| acc + u.measure::<T>()))
            .collect()
    }
}

/// Search `(K, L)` with `L` prime, `L ≤ l_max`, `K ≤ min(k_max, L)`, in
/// increasing `L` then `K`, for covers whose measures sum to less than one in
/// every row.
pub fn best_cover<T: Real>(
    rows: &[Vec<RectUnion<T>>],
    k_max: usize,
    l_max: usize,
) -> Result<CoverChoice, GeometryError> {
    if rows.is_empty() || rows.iter().any(|r| r.is_empty()) {
        return Err(GeometryError::NoCoverFound("empty support matrix".into()));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(GeometryError::NoCoverFound("ragged support matrix".into()));
    }
    for (m, row) in rows.iter().enumerate() {
        let total = row.iter().fold(T::zero(), |acc, s| acc + s.area());
        if total >= T::one() {
            return Err(GeometryError::NoCoverFound(format!(
                "row {m} has total area {} >= 1",
                crate::scalar::to_f64(total)
            )));
        }
    }
    for l in primes_up_to(l_max) {
        for k in 1..=k_max.min(l) {
            let covers: Vec<Vec<GridSupport>> = rows
                .iter()
                .map(|row| row.iter().map(|s| outer_cover(s, k, l)).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()?;
            if covers
                .iter()
                .all(|row| row.iter().map(GridSupport::len).sum::<usize>() < l)
            {
                return Ok(CoverChoice { k, l, covers });
            }
        }
    }
    Err(GeometryError::NoCoverFound(format!(
        "no grid with K <= {k_max}, prime L <= {l_max}"
    )))
}

/// `M × N` subchannel supports with per-input frequency offsets such that,
/// within every row, the offset supports are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MimoSupportPlan {
    supports: Vec<Vec<GridSupport>>,
    offsets: Vec<usize>,
    merged: Vec<GridSupport>,
}

impl MimoSupportPlan {
    /// Validate explicit offsets against the disjointness requirement.
    pub fn with_offsets(supports: Vec<Vec<GridSupport>>, offsets: Vec<usize>) -> Result<Self, GeometryError> {
        let (k, l) = shared_grid(&supports)?;
        if offsets.len() != supports[0].len() {
            return Err(GeometryError::GridMismatch);
        }
        let mut merged = Vec::with_capacity(supports.len());
        for (row_idx, row) in supports.iter().enumerate() {
            let mut acc = GridSupport::empty(k, l)?;
            for (s, &off) in row.iter().zip(&offsets) {
                let shifted = s.shifted(off % l);
                if !acc.is_disjoint(&shifted)? {
                    return Err(GeometryError::PackingFailed { row: row_idx });
                }
                acc = acc.union(&shifted)?;
            }
            merged.push(acc);
        }
        Ok(Self {
            supports,
            offsets: offsets.into_iter().map(|o| o % l).collect(),
            merged,
        })
    }

    pub fn rows(&self) -> usize {
        self.supports.len()
    }

    pub fn inputs(&self) -> usize {
        self.offsets.len()
    }

    pub fn k(&self) -> usize {
        self.supports[0][0].k()
    }

    pub fn l(&self) -> usize {
        self.supports[0][0].l()
    }

    pub fn support(&self, m: usize, n: usize) -> &GridSupport {
        &self.supports[m][n]
    }

    pub fn supports(&self) -> &[Vec<GridSupport>] {
        &self.supports
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn merged(&self, m: usize) -> &GridSupport {
        &self.merged[m]
    }

    /// Merged cells of row `m` in coefficient order (input-major, then cell
    /// order), each tagged with its input and original cell.
    pub fn row_cells(&self, m: usize) -> Vec<CellAssignment> {
        let l = self.l();
        let mut out = Vec::new();
        for (n, s) in self.supports[m].iter().enumerate() {
            for (mu, nu) in s.cells() {
                out.push(CellAssignment {
                    input: n,
                    cell: (mu, nu),
                    shifted: (mu, (nu + self.offsets[n]) % l),
                });
            }
        }
        out
    }

    /// Every row has at most `L` merged cells.
    pub fn is_identifiable_regime(&self) -> bool {
        self.merged.iter().all(|s| s.len() <= self.l())
    }

    /// Cells across all subchannels.
    pub fn total_cells(&self) -> usize {
        self.supports.iter().flatten().map(GridSupport::len).sum()
    }

    /// First line `M N K L`, then `row input cell_m cell_n` per cell; offsets as
    /// a trailing `offsets s_1 … s_N` line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.rows(), self.inputs(), self.k(), self.l());
        for (m, row) in self.supports.iter().enumerate() {
            for (n, s) in row.iter().enumerate() {
                for (mu, nu) in s.cells() {
                    let _ = writeln!(out, "{m} {n} {mu} {nu}");
                }
            }
        }
        let offs: Vec<String> = self.offsets.iter().map(|o| o.to_string()).collect();
        let _ = writeln!(out, "offsets {}", offs.join(" "));
        out
    }
}

/// One coefficient slot of a row: which input it belongs to, its cell in that
/// subchannel's support, and where the input's offset moves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellAssignment {
    pub input: usize,
    pub cell: (usize, usize),
    pub shifted: (usize, usize),
}

fn shared_grid(supports: &[Vec<GridSupport>]) -> Result<(usize, usize), GeometryError> {
    let first = supports
        .first()
        .and_then(|r| r.first())
        .ok_or(GeometryError::GridMismatch)?;
    let (k, l) = (first.k(), first.l());
    let width = supports[0].len();
    for row in supports {
        if row.len() != width || row.iter().any(|s| s.k() != k || s.l() != l) {
            return Err(GeometryError::GridMismatch);
        }
    }
    Ok((k, l))
}

/// Supports in row-major `M × N` order plus optional offsets.
pub type ParsedSupports = (Vec<Vec<GridSupport>>, Option<Vec<usize>>);

/// Parse a support matrix: header `M N K L` then `row input cell_m cell_n`
/// lines; an optional `offsets …` line is returned separately.
pub fn parse_supports(text: &str) -> Result<ParsedSupports, GeometryError> {
    let mut offsets = None;
    let mut body = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(rest) = line.strip_prefix("offsets") {
            let v = rest
                .split_whitespace()
                .map(|w| w.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| GeometryError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            offsets = Some(v);
            body.push('\n');
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut rows = integer_rows(&body)?;
    let (line, header) = rows.next().ok_or(GeometryError::Parse {
        line: 1,
        message: "missing `M N K L` header".into(),
    })??;
    let [mm, nn, k, l] = fixed::<4>(line, &header)?;
    let mut cells: Vec<Vec<Vec<(usize, usize)>>> = vec![vec![Vec::new(); nn]; mm];
    for row in rows {
        let (line, vals) = row?;
        let [m, n, mu, nu] = fixed::<4>(line, &vals)?;
        if m >= mm || n >= nn {
            return Err(GeometryError::Parse {
                line,
                message: format!("subchannel ({m}, {n}) outside {mm}x{nn}"),
            });
        }
        cells[m][n].push((mu, nu));
    }
    let supports = cells
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| GridSupport::new(k, l, c))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((supports, offsets))
}

/// Frequency offsets `s_n` (with `s_1 = 0`) making every row's offset supports
/// pairwise disjoint on the torus. Tries cumulative frequency extents first
/// (input `n` starts where input `n−1`'s widest support ends), then exhaustive
/// search over `ℤ_L^{N−1}` when `N ≤ 3`.
pub fn pack_offsets(supports: Vec<Vec<GridSupport>>) -> Result<MimoSupportPlan, GeometryError> {
    let (_, l) = shared_grid(&supports)?;
    let inputs = supports[0].len();

    let mut cumulative = vec![0usize; inputs];
    for n in 1..inputs {
        let extent = supports
            .iter()
            .map(|row| row[n - 1].cells().map(|(_, nu)| nu + 1).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        cumulative[n] = cumulative[n - 1] + extent;
    }
    let first_failure = match MimoSupportPlan::with_offsets(supports.clone(), cumulative) {
        Ok(plan) => return Ok(plan),
        Err(GeometryError::PackingFailed { row }) => row,
        Err(e) => return Err(e),
    };

    if inputs <= 3 {
        let free = inputs.saturating_sub(1);
        let total = l.pow(free as u32);
        for code in 0..total {
            let mut offsets = vec![0usize; inputs];
            let mut rest = code;
            for slot in offsets.iter_mut().skip(1) {
                *slot = rest % l;
                rest /= l;
            }
            if let Ok(plan) = MimoSupportPlan::with_offsets(supports.clone(), offsets) {
                return Ok(plan);
            }
        }
    }
    Err(GeometryError::PackingFailed { row: first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square(side: f64) -> RectUnion<f64> {
        RectUnion::new(vec![Rect::new(0.0, side, 0.0, side)]).unwrap()
    }

    #[test]
    fn measure_examples() {
        let one = GridSupport::new(3, 4, [(1, 2)]).unwrap();
        assert_abs_diff_eq!(one.measure::<f64>(), 0.25);
        assert_eq!(GridSupport::empty(3, 4).unwrap().measure::<f64>(), 0.0);
        assert_abs_diff_eq!(GridSupport::full(3, 4).unwrap().measure::<f64>(), 3.0);
    }

    #[test]
    fn aligned_cell_covers_itself() {
        let g = GridSupport::new(4, 6, [(2, 3)]).unwrap();
        let r = g.cell_rect::<f64>(2, 3);
        let cover = outer_cover(&RectUnion::new(vec![r]).unwrap(), 4, 6).unwrap();
        assert_eq!(cover, g);
        assert_abs_diff_eq!(cover.measure::<f64>(), 1.0 / 6.0);
    }

    #[test]
    fn small_square_cover_by_enumeration() {
        let cover = outer_cover(&square(0.3), 10, 10).unwrap();
        let expect: Vec<_> = (0..3).map(|m| (m, 0)).collect();
        assert_eq!(cover.cells().collect::<Vec<_>>(), expect);
        assert_abs_diff_eq!(cover.measure::<f64>(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn rejects_unbounded_and_empty_rectangles() {
        assert_eq!(
            RectUnion::new(vec![Rect::new(0.0, f64::INFINITY, 0.0, 1.0)]),
            Err(GeometryError::UnboundedInput(0))
        );
        assert_eq!(
            RectUnion::new(vec![Rect::new(0.0, 1.0, 0.0, 1.0), Rect::new(0.5, 0.5, 0.0, 1.0)]),
            Err(GeometryError::EmptyRectangle(1))
        );
    }

    #[test]
    fn wraps_around_the_torus() {
        let s = RectUnion::new(vec![Rect::new(-0.25, 0.25, 0.0, 0.5)]).unwrap();
        let cover = outer_cover(&s, 4, 8).unwrap();
        assert_eq!(cover.cells().collect::<Vec<_>>(), vec![(0, 0), (3, 0)]);
    }

    #[test]
    fn union_area_counts_overlap_once() {
        let s = RectUnion::new(vec![Rect::new(0.0, 0.5, 0.0, 0.5), Rect::new(0.25, 0.75, 0.25, 0.75)]).unwrap();
        assert_abs_diff_eq!(s.area(), 0.25 + 0.25 - 0.0625, epsilon = 1e-15);
    }

    #[test]
    fn best_cover_guards_row_sums() {
        let rows = vec![vec![square(0.8), square(0.7)]];
        assert!(matches!(best_cover(&rows, 10, 31), Err(GeometryError::NoCoverFound(_))));
    }

    #[test]
    fn best_cover_matches_brute_force() {
        let s = RectUnion::new(vec![Rect::new(0.0, 0.5, 0.0, 0.4)]).unwrap();
        let got = best_cover(&[vec![s.clone()]], 4, 13).unwrap();
        // Independent enumeration over every candidate in search order.
        let mut expect = None;
        'outer: for l in [2usize, 3, 5, 7, 11, 13] {
            for k in 1..=4usize.min(l) {
                let kf = k as f64;
                let lf = l as f64;
                let mut count = 0;
                for m in 0..k {
                    for n in 0..l {
                        let (a, b) = (m as f64 / kf, (m + 1) as f64 / kf);
                        let (c, d) = (n as f64 * kf / lf, (n + 1) as f64 * kf / lf);
                        if a < 0.5 && b > 0.0 && c < 0.4 && d > 0.0 {
                            count += 1;
                        }
                    }
                }
                if count < l {
                    expect = Some((k, l));
                    break 'outer;
                }
            }
        }
        assert_eq!(Some((got.k, got.l)), expect);
    }

    #[test]
    fn pack_single_input_is_identity() {
        let s = GridSupport::new(2, 5, [(0, 1), (1, 3)]).unwrap();
        let plan = pack_offsets(vec![vec![s.clone()]]).unwrap();
        assert_eq!(plan.offsets(), &[0]);
        assert_eq!(plan.merged(0), &s);
    }

    #[test]
    fn pack_two_single_row_supports() {
        let s = GridSupport::new(1, 5, [(0, 0)]).unwrap();
        let plan = pack_offsets(vec![vec![s.clone(), s]]).unwrap();
        assert_eq!(plan.offsets(), &[0, 1]);
        assert_eq!(plan.merged(0).len(), 2);
    }

    #[test]
    fn pack_full_band_fails() {
        let s = GridSupport::full(1, 5).unwrap();
        assert_eq!(
            pack_offsets(vec![vec![s.clone(), s]]),
            Err(GeometryError::PackingFailed { row: 0 })
        );
    }

    #[test]
    fn pack_falls_back_to_search_when_cumulative_wraps() {
        // Input 0 spans frequency rows {0, 4}: cumulative offset 5 wraps to 0
        // and collides, but offset 1 works.
        let a = GridSupport::new(1, 5, [(0, 0), (0, 4)]).unwrap();
        let b = GridSupport::new(1, 5, [(0, 0)]).unwrap();
        let plan = pack_offsets(vec![vec![a, b]]).unwrap();
        assert_eq!(plan.offsets(), &[0, 1]);
    }

    #[test]
    fn text_round_trips() {
        let g = GridSupport::new(3, 7, [(0, 1), (2, 6)]).unwrap();
        assert_eq!(GridSupport::parse(&g.to_text()).unwrap(), g);
        let r = RectUnion::new(vec![Rect::new(0.0, 0.25, 0.5, 1.5)]).unwrap();
        assert_eq!(RectUnion::<f64>::parse(&r.to_text()).unwrap(), r);
        let plan = pack_offsets(vec![
            vec![g.clone(), g.clone()],
            vec![g.clone(), GridSupport::empty(3, 7).unwrap()],
        ])
        .unwrap();
        let (supports, offsets) = parse_supports(&plan.to_text()).unwrap();
        assert_eq!(MimoSupportPlan::with_offsets(supports, offsets.unwrap()).unwrap(), plan);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            GridSupport::parse("3 7\n0 x\n"),
            Err(GeometryError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            RectUnion::<f64>::parse("0 1 0\n"),
            Err(GeometryError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            GridSupport::parse("3 7\n5 0\n"),
            Err(GeometryError::CellOutOfRange { .. })
        ));
    }
}

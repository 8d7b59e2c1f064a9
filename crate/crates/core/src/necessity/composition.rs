//! Finite sections of `C ∘ Φ_f ∘ E`: synthesis over shifted prototypes on the
//! support cells, the pilot-to-output map, and Gaussian Gabor analysis.
//!
//! The model lives on `ℤ_P` with `P = L·u·v`. The pilot of input `n` is the
//! delta train `Σ_i c_{i mod L} δ_{iu}` modulated by `s_n·v`; support cell
//! `(μ, ν)` is the `u × v` spreading block at `(μu, νv)`. A section keeps the
//! members with modulation indices in a box of odd side `s`, so it has
//! `J·s²` columns against an output of dimension `P`.

use num_complex::Complex;

use crate::geometry::{GridSupport, MimoSupportPlan};
use crate::linalg::{self, CMatrix};
use crate::scalar::{lit, to_f64, Real};
use crate::spark::{search_identifier, IdentifierSequence, DEFAULT_BUDGET};
use crate::tf::{Signal, TfShift};

use super::frame::{densest_steps_below, GaborFrameSpec};
use super::prototype::{build_prototype, gram_of, GramReport, Member, PrototypeOp};
use super::NecessityError;

/// Default experiment grid: `P = 192`, `K = 2`, `L = 3`, `λ = 1.05`.
pub const DEFAULT_PERIOD: usize = 192;
pub const DEFAULT_K: usize = 2;
pub const DEFAULT_L: usize = 3;
pub const DEFAULT_LAMBDA: f64 = 1.05;
pub const DEFAULT_SIDES: [usize; 3] = [1, 3, 5];
/// `σ_min < FLOOR·σ_max` counts as unstable.
pub const INSTABILITY_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct CompositionSetup<T: Real> {
    pub proto: PrototypeOp<T>,
    pub plan: MimoSupportPlan,
    pub row: usize,
    pub c: IdentifierSequence<T>,
    pub analysis: GaborFrameSpec,
}

impl<T: Real> CompositionSetup<T> {
    pub fn new(
        proto: PrototypeOp<T>,
        plan: MimoSupportPlan,
        row: usize,
        c: IdentifierSequence<T>,
        analysis: GaborFrameSpec,
    ) -> Result<Self, NecessityError> {
        if proto.k != plan.k() || proto.l != plan.l() || c.period() != plan.l() {
            return Err(NecessityError::InvalidSpec(
                "prototype, plan and identifier must share (K, L)".into(),
            ));
        }
        if proto.period != plan.l() * proto.u * proto.v || analysis.period != proto.period {
            return Err(NecessityError::GridTooCoarse(format!(
                "need P = L·u·v, got P={} with a {}x{} cell",
                proto.period, proto.u, proto.v
            )));
        }
        if row >= plan.rows() {
            return Err(NecessityError::InvalidSpec(format!("row {row} outside the plan")));
        }
        Ok(Self {
            proto,
            plan,
            row,
            c,
            analysis,
        })
    }

    /// Single-input setup on the default grid using the first `cells` cells of
    /// the `K × L` grid (time index major). The identifier is searched with
    /// `K = L` so that every cell subset of size `L` is independent, and the
    /// analysis lattice is the densest divisor lattice at or below
    /// `min(λ⁴/μ, 0.99)` with `μ = cells/L`.
    pub fn standard(cells: usize, seed: u64) -> Result<Self, NecessityError> {
        let (k, l) = (DEFAULT_K, DEFAULT_L);
        let lambda = lit::<T>(DEFAULT_LAMBDA);
        let proto = build_prototype(DEFAULT_PERIOD, k, l, lambda)?;
        let grid: Vec<(usize, usize)> = (0..k).flat_map(|m| (0..l).map(move |n| (m, n))).take(cells).collect();
        if grid.len() < cells {
            return Err(NecessityError::InvalidSpec(format!(
                "a {k}x{l} grid has fewer than {cells} cells"
            )));
        }
        let support = GridSupport::new(k, l, grid)?;
        let plan = MimoSupportPlan::with_offsets(vec![vec![support]], vec![0])?;
        let (c, _) = search_identifier::<T>(l, l, 10, seed, DEFAULT_BUDGET)?;
        let mu = cells as f64 / l as f64;
        let density = (DEFAULT_LAMBDA.powi(4) / mu).min(0.99);
        let (a, b) = densest_steps_below(DEFAULT_PERIOD, density)
            .ok_or_else(|| NecessityError::InvalidSpec("no analysis lattice".into()))?;
        let analysis = GaborFrameSpec::new(DEFAULT_PERIOD, a, b)?;
        Self::new(proto, plan, 0, c, analysis)
    }

    pub fn period(&self) -> usize {
        self.proto.period
    }

    /// Number of support cells `J` in the row.
    pub fn cells(&self) -> usize {
        self.plan.merged(self.row).len()
    }

    /// `Σ_i c_{i mod L} δ_{iu}` modulated by `s_n·v`.
    pub fn pilot(&self, input: usize) -> Signal<T> {
        let p = self.period();
        let mut samples = vec![Complex::default(); p];
        for i in 0..p / self.proto.u {
            samples[i * self.proto.u] = self.c.at(i as i64);
        }
        let train = Signal::new(samples).expect("finite pilot");
        crate::tf::modulate(&train, (self.plan.offsets()[input] * self.proto.v) as i64)
    }

    /// Section members with their input, ordered by support cell then by
    /// modulation.
    pub fn members(&self, side: usize) -> Result<Vec<(usize, Member<T>)>, NecessityError> {
        let mods = self.proto.modulation_box(side)?;
        let mut out = Vec::new();
        for a in self.plan.row_cells(self.row) {
            for &m in &mods {
                out.push((a.input, self.proto.member(a.cell, m)));
            }
        }
        Ok(out)
    }

    /// `Φ_f ∘ E` on a section: column `i` is `H_i f_{ι(i)}`.
    pub fn synthesis_output(&self, side: usize) -> Result<CMatrix<T>, NecessityError> {
        let p = self.period();
        let pilots: Vec<Signal<T>> = (0..self.plan.inputs()).map(|n| self.pilot(n)).collect();
        let members = self.members(side)?;
        let mut out = CMatrix::zeros(p, members.len());
        for (col, (input, m)) in members.iter().enumerate() {
            let f = pilots[*input].samples();
            for (TfShift { k, l }, z) in self.proto.member_entries(m) {
                for x in 0..p {
                    let src = (x as i64 - k).rem_euclid(p as i64);
                    let phase = crate::scalar::root_of_unity::<T>(l * src, p);
                    out[(x, col)] += z * phase * f[src as usize];
                }
            }
        }
        Ok(out)
    }

    /// HS Gram of the section members (stability of `E`).
    pub fn synthesis_gram(&self, side: usize) -> Result<GramReport<T>, NecessityError> {
        let members: Vec<Member<T>> = self.members(side)?.into_iter().map(|(_, m)| m).collect();
        Ok(gram_of(&self.proto, &members))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint<T> {
    pub side: usize,
    pub members: usize,
    pub sigma_min: T,
    pub sigma_max: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionCurve<T> {
    pub points: Vec<SectionPoint<T>>,
    pub cells: usize,
    pub l: usize,
    pub period: usize,
    pub lambda: T,
    /// Analysis lattice steps and density, as rounded onto divisors of `P`.
    pub analysis_steps: (usize, usize),
    pub analysis_density: f64,
}

impl<T: Real> CompositionCurve<T> {
    /// σ_min strictly decreasing and ending below `floor·σ_max`.
    pub fn is_unstable(&self, floor: f64) -> bool {
        let decreasing = self.points.windows(2).all(|w| w[1].sigma_min < w[0].sigma_min);
        let last = self.points.last();
        decreasing && last.is_some_and(|p| to_f64(p.sigma_min) < floor * to_f64(p.sigma_max))
    }

    /// Every section keeps `σ_min ≥ floor·σ_max`.
    pub fn stays_above(&self, floor: f64) -> bool {
        self.points
            .iter()
            .all(|p| to_f64(p.sigma_min) >= floor * to_f64(p.sigma_max))
    }
}

/// σ extremes of `C ∘ Φ_f ∘ E` for each modulation box side, without checking
/// that the support is overspread.
pub fn composition_sections<T: Real>(
    setup: &CompositionSetup<T>,
    sides: &[usize],
) -> Result<CompositionCurve<T>, NecessityError> {
    let c = setup.analysis.analysis_matrix::<T>();
    let mut points = Vec::with_capacity(sides.len());
    for &side in sides {
        let m = &c * setup.synthesis_output(side)?;
        let (sigma_min, sigma_max) = linalg::sigma_extremes(&m);
        points.push(SectionPoint {
            side,
            members: m.ncols(),
            sigma_min,
            sigma_max,
        });
    }
    Ok(CompositionCurve {
        points,
        cells: setup.cells(),
        l: setup.plan.l(),
        period: setup.period(),
        lambda: setup.proto.lambda,
        analysis_steps: (setup.analysis.a, setup.analysis.b),
        analysis_density: setup.analysis.density(),
    })
}

/// As [`composition_sections`], for supports with more than `L` cells and a
/// slant with `1 < λ⁴ < J/L`.
pub fn composition_instability<T: Real>(
    setup: &CompositionSetup<T>,
    sides: &[usize],
) -> Result<CompositionCurve<T>, NecessityError> {
    let (j, l) = (setup.cells(), setup.plan.l());
    if j <= l {
        return Err(NecessityError::PlanNotOverspread { cells: j, l });
    }
    let l4 = to_f64(setup.proto.lambda).powi(4);
    if !(l4 > 1.0 && l4 < j as f64 / l as f64) {
        return Err(NecessityError::InvalidSpec(format!(
            "need 1 < lambda^4 < {j}/{l}, got {l4}"
        )));
    }
    composition_sections(setup, sides)
}

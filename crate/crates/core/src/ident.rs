//! MIMO identification from one output vector per receive antenna.
//!
//! Input `n` transmits the weighted delta train generated by `c`, shifted in
//! frequency by `s_n` grid rows. On the discrete model a channel coefficient on
//! cell `(μ, ν)` of subchannel `(m, n)` contributes the `A(c)` column at
//! `(μ, ν + s_n)` to output `m`, so every output row is a linear image of the
//! stacked coefficients of that row.

use std::io::{self, Write};

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{CellAssignment, MimoSupportPlan};
use crate::linalg::{self, CMatrix, CVector};
use crate::rng;
use crate::scalar::{to_f64, Real};
use crate::spark::{IdentifierSequence, SparkError};
use crate::tf::{self, LinOp, Signal, SpreadingFunction, TfShift};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentError {
    #[error("identifier period {period} does not match grid L={l}")]
    GridMismatch { period: usize, l: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("row {row} is not identifiable: {columns} unknowns, sigma_min={sigma_min:e}, sigma_max={sigma_max:e}")]
    RankDeficient {
        row: usize,
        columns: usize,
        sigma_min: f64,
        sigma_max: f64,
    },
    #[error(transparent)]
    Spark(#[from] SparkError),
}

/// Identifier plus the per-input frequency offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSet<T> {
    c: IdentifierSequence<T>,
    k: usize,
    offsets: Vec<usize>,
}

impl<T: Real> PilotSet<T> {
    pub fn new(c: IdentifierSequence<T>, k: usize, offsets: Vec<usize>) -> Self {
        Self { c, k, offsets }
    }

    /// Pilots matching a plan's grid and offsets.
    pub fn for_plan(c: IdentifierSequence<T>, plan: &MimoSupportPlan) -> Self {
        Self::new(c, plan.k(), plan.offsets().to_vec())
    }

    pub fn identifier(&self) -> &IdentifierSequence<T> {
        &self.c
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Pilot of input `n` on `ℤ_L`: `M_{s_n} c`.
    pub fn signal(&self, n: usize) -> Signal<T> {
        let c = Signal::new(self.c.values().to_vec()).expect("identifier is finite");
        tf::modulate(&c, self.offsets[n] as i64)
    }

    fn check(&self, plan: &MimoSupportPlan) -> Result<(), IdentError> {
        if self.c.period() != plan.l() {
            return Err(IdentError::GridMismatch {
                period: self.c.period(),
                l: plan.l(),
            });
        }
        if self.k != plan.k() || self.offsets != plan.offsets() {
            return Err(IdentError::ShapeMismatch(
                "pilot grid or offsets differ from the plan".into(),
            ));
        }
        Ok(())
    }
}

/// `M × N` channel with coefficients on the cells of each subchannel support,
/// in the support's cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoChannel<T> {
    plan: MimoSupportPlan,
    coeffs: Vec<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> MimoChannel<T> {
    pub fn new(plan: MimoSupportPlan, coeffs: Vec<Vec<Vec<Complex<T>>>>) -> Result<Self, IdentError> {
        if coeffs.len() != plan.rows() {
            return Err(IdentError::ShapeMismatch(format!(
                "{} coefficient rows for {} outputs",
                coeffs.len(),
                plan.rows()
            )));
        }
        for (m, row) in coeffs.iter().enumerate() {
            if row.len() != plan.inputs() {
                return Err(IdentError::ShapeMismatch(format!(
                    "row {m} has {} subchannels",
                    row.len()
                )));
            }
            for (n, v) in row.iter().enumerate() {
                if v.len() != plan.support(m, n).len() {
                    return Err(IdentError::ShapeMismatch(format!(
                        "subchannel ({m}, {n}) has {} coefficients for {} cells",
                        v.len(),
                        plan.support(m, n).len()
                    )));
                }
            }
        }
        Ok(Self { plan, coeffs })
    }

    pub fn zeros(plan: MimoSupportPlan) -> Self {
        let coeffs = (0..plan.rows())
            .map(|m| {
                (0..plan.inputs())
                    .map(|n| vec![Complex::default(); plan.support(m, n).len()])
                    .collect()
            })
            .collect();
        Self { plan, coeffs }
    }

    /// I.i.d. circular Gaussian coefficients of unit variance.
    pub fn random<R: Rng + ?Sized>(plan: MimoSupportPlan, rng: &mut R) -> Self {
        let mut ch = Self::zeros(plan);
        for v in ch.coeffs.iter_mut().flatten().flatten() {
            *v = rng::unit_complex_gaussian(rng);
        }
        ch
    }

    pub fn plan(&self) -> &MimoSupportPlan {
        &self.plan
    }

    pub fn coeffs(&self, m: usize, n: usize) -> &[Complex<T>] {
        &self.coeffs[m][n]
    }

    pub fn all_coeffs(&self) -> &[Vec<Vec<Complex<T>>>] {
        &self.coeffs
    }

    /// `(Σ_{m,n} ‖η_mn‖²)^{1/2}`.
    pub fn hs_norm(&self) -> T {
        self.coeffs
            .iter()
            .flatten()
            .flatten()
            .fold(T::zero(), |a, z| a + z.norm_sqr())
            .sqrt()
    }

    /// Coefficients of row `m` stacked input-major, matching `row_matrix`.
    pub fn row_vector(&self, m: usize) -> CVector<T> {
        CVector::from_iterator(
            self.coeffs[m].iter().map(Vec::len).sum(),
            self.coeffs[m].iter().flatten().copied(),
        )
    }

    /// Subchannel `(m, n)` as an operator on `ℤ_L`. A cell `(μ, ν)` carries the
    /// time-frequency shift `π(−μ, ν)`.
    pub fn subchannel_operator(&self, m: usize, n: usize) -> LinOp<T> {
        let l = self.plan.l();
        let mut eta = SpreadingFunction::zeros(l);
        for ((mu, nu), &v) in self.plan.support(m, n).cells().zip(&self.coeffs[m][n]) {
            let s = TfShift::new(-(mu as i64), nu as i64);
            eta.set(s, eta.get(s) + v);
        }
        tf::operator_from_spreading(&eta)
    }
}

/// The `L × Σ_n |S_mn|` matrix mapping row `m`'s stacked coefficients to
/// output `m`.
pub fn row_matrix<T: Real>(
    plan: &MimoSupportPlan,
    c: &IdentifierSequence<T>,
    m: usize,
) -> Result<CMatrix<T>, IdentError> {
    let l = plan.l();
    if c.period() != l {
        return Err(IdentError::GridMismatch { period: c.period(), l });
    }
    let cells = plan.row_cells(m);
    let mut a = CMatrix::zeros(l, cells.len());
    for (j, CellAssignment { shifted: (mu, nu), .. }) in cells.into_iter().enumerate() {
        for p in 0..l {
            let shift = (p + mu) as i64;
            a[(p, j)] = c.at(shift) * crate::scalar::root_of_unity::<T>(nu as i64 * shift, l);
        }
    }
    Ok(a)
}

/// Outputs `y_m = A_m η_m + noise`, with independent `N(0, σ²)` real and
/// imaginary parts.
pub fn simulate_output<T: Real, R: Rng + ?Sized>(
    ch: &MimoChannel<T>,
    pilots: &PilotSet<T>,
    noise_sigma: T,
    rng: &mut R,
) -> Result<Vec<CVector<T>>, IdentError> {
    pilots.check(&ch.plan)?;
    let mut out = Vec::with_capacity(ch.plan.rows());
    for m in 0..ch.plan.rows() {
        let a = row_matrix(&ch.plan, pilots.identifier(), m)?;
        let mut y = a * ch.row_vector(m);
        if noise_sigma > T::zero() {
            for v in y.iter_mut() {
                *v += rng::complex_gaussian(rng, noise_sigma);
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Outputs computed in the signal domain, `g_m = Σ_n H_mn f_n` on `ℤ_L`.
pub fn simulate_literal<T: Real>(ch: &MimoChannel<T>, pilots: &PilotSet<T>) -> Result<Vec<Signal<T>>, IdentError> {
    pilots.check(&ch.plan)?;
    let l = ch.plan.l();
    let mut out = Vec::with_capacity(ch.plan.rows());
    for m in 0..ch.plan.rows() {
        let mut acc = vec![Complex::default(); l];
        for n in 0..ch.plan.inputs() {
            let g = ch
                .subchannel_operator(m, n)
                .apply(&pilots.signal(n))
                .map_err(|e| IdentError::ShapeMismatch(e.to_string()))?;
            for (a, b) in acc.iter_mut().zip(g.samples()) {
                *a += *b;
            }
        }
        out.push(Signal::new(acc).map_err(|e| IdentError::ShapeMismatch(e.to_string()))?);
    }
    Ok(out)
}

/// Recovered coefficients with per-row relative residuals and the measured
/// stability constants.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationResult<T> {
    pub recovered: Vec<Vec<Vec<Complex<T>>>>,
    /// `‖y_m − A_m η̂_m‖ / ‖y_m‖` (zero for a zero output).
    pub residual: Vec<T>,
    pub a_est: T,
    pub b_est: T,
}

/// Least-squares solve of every output row; fails on the first row whose
/// matrix is not of full column rank.
pub fn recover<T: Real>(
    y: &[CVector<T>],
    plan: &MimoSupportPlan,
    pilots: &PilotSet<T>,
) -> Result<IdentificationResult<T>, IdentError> {
    pilots.check(plan)?;
    if y.len() != plan.rows() {
        return Err(IdentError::ShapeMismatch(format!(
            "{} outputs for {} rows",
            y.len(),
            plan.rows()
        )));
    }
    let solved: Vec<_> = (0..plan.rows())
        .into_par_iter()
        .map(|m| solve_row(plan, pilots.identifier(), m, &y[m]))
        .collect();
    let mut recovered = Vec::with_capacity(plan.rows());
    let mut residual = Vec::with_capacity(plan.rows());
    let mut bounds = Bounds::default();
    for (m, row) in solved.into_iter().enumerate() {
        let (x, res, extremes) = row?;
        bounds.absorb(extremes);
        let mut split = Vec::with_capacity(plan.inputs());
        let mut offset = 0;
        for n in 0..plan.inputs() {
            let len = plan.support(m, n).len();
            split.push(x.rows(offset, len).iter().copied().collect());
            offset += len;
        }
        recovered.push(split);
        residual.push(res);
    }
    let (a_est, b_est) = bounds.finish();
    Ok(IdentificationResult {
        recovered,
        residual,
        a_est,
        b_est,
    })
}

type RowSolve<T> = Result<(CVector<T>, T, Option<(T, T)>), IdentError>;

fn solve_row<T: Real>(plan: &MimoSupportPlan, c: &IdentifierSequence<T>, m: usize, y: &CVector<T>) -> RowSolve<T> {
    let a = row_matrix(plan, c, m)?;
    if y.len() != a.nrows() {
        return Err(IdentError::ShapeMismatch(format!(
            "output {m} has length {}, expected {}",
            y.len(),
            a.nrows()
        )));
    }
    let ls = linalg::least_squares(&a, y, T::rank_rtol()).ok_or_else(|| rank_error(&a, m))?;
    let ynorm = y.norm();
    let res = if ynorm > T::zero() {
        (y - &a * &ls.solution).norm() / ynorm
    } else {
        T::zero()
    };
    let extremes = (a.ncols() > 0).then_some((ls.sigma_min, ls.sigma_max));
    Ok((ls.solution, res, extremes))
}

fn rank_error<T: Real>(a: &CMatrix<T>, row: usize) -> IdentError {
    let (smin, smax) = linalg::sigma_extremes(a);
    IdentError::RankDeficient {
        row,
        columns: a.ncols(),
        sigma_min: to_f64(smin),
        sigma_max: to_f64(smax),
    }
}

#[derive(Default)]
struct Bounds<T> {
    lo: Option<T>,
    hi: Option<T>,
}

impl<T: Real> Bounds<T> {
    fn absorb(&mut self, e: Option<(T, T)>) {
        if let Some((lo, hi)) = e {
            self.lo = Some(self.lo.map_or(lo, |v| v.min(lo)));
            self.hi = Some(self.hi.map_or(hi, |v| v.max(hi)));
        }
    }

    fn finish(self) -> (T, T) {
        (self.lo.unwrap_or_else(T::zero), self.hi.unwrap_or_else(T::zero))
    }
}

/// `(min_m σ_min(A_m), max_m σ_max(A_m))` over rows with at least one cell.
pub fn stability_bounds<T: Real>(plan: &MimoSupportPlan, c: &IdentifierSequence<T>) -> Result<(T, T), IdentError> {
    let mut bounds = Bounds::default();
    for m in 0..plan.rows() {
        let a = row_matrix(plan, c, m)?;
        if a.ncols() == 0 {
            continue;
        }
        if a.ncols() > a.nrows() {
            return Err(rank_error(&a, m));
        }
        let (lo, hi) = linalg::sigma_extremes(&a);
        if lo <= T::rank_rtol() * hi {
            return Err(rank_error(&a, m));
        }
        bounds.absorb(Some((lo, hi)));
    }
    Ok(bounds.finish())
}

/// `‖η̂ − η‖ / ‖η‖` over all subchannels (absolute error for a zero channel).
pub fn relative_error<T: Real>(truth: &MimoChannel<T>, recovered: &[Vec<Vec<Complex<T>>>]) -> T {
    let diff = truth
        .all_coeffs()
        .iter()
        .flatten()
        .flatten()
        .zip(recovered.iter().flatten().flatten())
        .fold(T::zero(), |a, (x, y)| a + (x - y).norm_sqr())
        .sqrt();
    let scale = truth.hs_norm();
    if scale > T::zero() {
        diff / scale
    } else {
        diff
    }
}

pub const CSV_HEADER: &str = "trial,m,n,cell_m,cell_n,re,im,residual";

/// One CSV line per recovered coefficient.
pub fn write_csv_rows<T: Real, W: Write>(
    out: &mut W,
    trial: usize,
    plan: &MimoSupportPlan,
    result: &IdentificationResult<T>,
) -> io::Result<()> {
    for m in 0..plan.rows() {
        for n in 0..plan.inputs() {
            for ((mu, nu), z) in plan.support(m, n).cells().zip(&result.recovered[m][n]) {
                writeln!(
                    out,
                    "{trial},{m},{n},{mu},{nu},{},{},{}",
                    to_f64(z.re),
                    to_f64(z.im),
                    to_f64(result.residual[m])
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pack_offsets, GridSupport};
    use crate::spark::build_a;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn siso(k: usize, l: usize, cells: &[(usize, usize)]) -> MimoSupportPlan {
        pack_offsets(vec![vec![GridSupport::new(k, l, cells.iter().copied()).unwrap()]]).unwrap()
    }

    fn random_c(l: usize, seed: u64) -> IdentifierSequence<f64> {
        IdentifierSequence::random(l, &mut rng::stream(seed, 0))
    }

    #[test]
    fn siso_row_matrix_is_a_submatrix_of_a() {
        let plan = siso(2, 5, &[(0, 1), (1, 3), (1, 4)]);
        let c = random_c(5, 3);
        let a = build_a(&c, 2).unwrap();
        let expect = a.columns(&[1, 8, 9]).unwrap();
        assert_eq!(row_matrix(&plan, &c, 0).unwrap(), expect);
    }

    #[test]
    fn row_matrix_columns_have_norm_of_c() {
        let s = GridSupport::new(2, 5, [(0, 0), (1, 1)]).unwrap();
        let plan = pack_offsets(vec![vec![s.clone(), s]]).unwrap();
        let c = random_c(5, 11);
        let a = row_matrix(&plan, &c, 0).unwrap();
        assert_eq!(a.ncols(), 4);
        for col in a.column_iter() {
            assert_abs_diff_eq!(col.norm(), c.norm(), epsilon = 1e-13);
        }
    }

    #[test]
    fn single_cell_output_is_c() {
        let plan = siso(1, 5, &[(0, 0)]);
        let c = random_c(5, 1);
        let ch = MimoChannel::new(plan.clone(), vec![vec![vec![c64(1.0, 0.0)]]]).unwrap();
        let pilots = PilotSet::for_plan(c.clone(), &plan);
        let y = simulate_output(&ch, &pilots, 0.0, &mut rng::stream(0, 0)).unwrap();
        for (a, b) in y[0].iter().zip(c.values()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_channel_gives_zero_output_and_recovery() {
        let plan = siso(2, 5, &[(0, 0), (1, 2)]);
        let pilots = PilotSet::for_plan(random_c(5, 2), &plan);
        let ch = MimoChannel::zeros(plan.clone());
        let y = simulate_output(&ch, &pilots, 0.0, &mut rng::stream(0, 0)).unwrap();
        assert!(y[0].iter().all(|z| z.norm() == 0.0));
        let res = recover(&y, &plan, &pilots).unwrap();
        assert!(res.recovered.iter().flatten().flatten().all(|z| z.norm() == 0.0));
        assert_eq!(res.residual, vec![0.0]);
    }

    #[test]
    fn literal_signal_simulation_agrees() {
        let s = [
            GridSupport::new(2, 7, [(0, 0), (1, 2)]).unwrap(),
            GridSupport::new(2, 7, [(1, 0)]).unwrap(),
        ];
        let plan = pack_offsets(vec![s.to_vec(), vec![s[1].clone(), s[0].clone()]]).unwrap();
        let pilots = PilotSet::for_plan(random_c(7, 5), &plan);
        let ch = MimoChannel::random(plan, &mut rand_chacha::ChaCha8Rng::seed_from_u64(9));
        let fast = simulate_output(&ch, &pilots, 0.0, &mut rng::stream(0, 0)).unwrap();
        let slow = simulate_literal(&ch, &pilots).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            for (x, y) in a.iter().zip(b.samples()) {
                assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_recovery_is_exact() {
        let plan = siso(1, 5, &[(0, 0), (0, 1), (0, 3), (0, 4)]);
        let (c, _) = crate::spark::search_identifier::<f64>(5, 1, 5, 7, crate::spark::DEFAULT_BUDGET).unwrap();
        let pilots = PilotSet::for_plan(c, &plan);
        for trial in 0..20 {
            let ch = MimoChannel::random(plan.clone(), &mut rng::stream(100, trial));
            let y = simulate_output(&ch, &pilots, 0.0, &mut rng::stream(0, 0)).unwrap();
            let res = recover(&y, &plan, &pilots).unwrap();
            assert!(relative_error(&ch, &res.recovered) < 1e-10);
            assert!(res.residual[0] < 1e-10);
        }
    }

    #[test]
    fn too_many_cells_is_rank_deficient() {
        let cells: Vec<_> = (0..2).flat_map(|m| (0..3).map(move |n| (m, n))).collect();
        let plan = siso(2, 5, &cells);
        let pilots = PilotSet::for_plan(random_c(5, 4), &plan);
        let y = vec![CVector::zeros(5)];
        assert!(matches!(
            recover(&y, &plan, &pilots),
            Err(IdentError::RankDeficient { row: 0, columns: 6, .. })
        ));
        assert!(matches!(
            stability_bounds(&plan, pilots.identifier()),
            Err(IdentError::RankDeficient { .. })
        ));
    }

    #[test]
    fn single_cell_bounds_equal_norm_of_c() {
        let plan = siso(1, 5, &[(0, 2)]);
        let c = random_c(5, 8);
        let (a, b) = stability_bounds(&plan, &c).unwrap();
        assert_abs_diff_eq!(a, c.norm(), epsilon = 1e-13);
        assert_abs_diff_eq!(b, c.norm(), epsilon = 1e-13);
    }

    #[test]
    fn orthogonal_columns_give_tight_bounds() {
        // c = (1, 1) at L = 2: the columns π(0,0)c = (1,1) and π(0,1)c = (1,−1)
        // are orthogonal.
        let plan = siso(1, 2, &[(0, 0), (0, 1)]);
        let c = IdentifierSequence::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap();
        let (a, b) = stability_bounds(&plan, &c).unwrap();
        assert_abs_diff_eq!(a, 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(b, 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn pilot_mismatch_is_reported() {
        let plan = siso(1, 5, &[(0, 0)]);
        let pilots = PilotSet::new(random_c(3, 0), 1, vec![0]);
        let ch = MimoChannel::zeros(plan);
        assert!(matches!(
            simulate_output(&ch, &pilots, 0.0, &mut rng::stream(0, 0)),
            Err(IdentError::GridMismatch { period: 3, l: 5 })
        ));
    }

    #[test]
    fn csv_lists_every_coefficient() {
        let plan = siso(1, 3, &[(0, 0), (0, 2)]);
        let res = IdentificationResult {
            recovered: vec![vec![vec![c64(1.0, -0.5), c64(0.0, 2.0)]]],
            residual: vec![0.0],
            a_est: 1.0,
            b_est: 1.0,
        };
        let mut buf = Vec::new();
        write_csv_rows(&mut buf, 4, &plan, &res).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "4,0,0,0,0,1,-0.5,0\n4,0,0,0,2,0,2,0\n");
    }
}

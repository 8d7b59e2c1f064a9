//! Slanted matrices `|m_{j′,j}| ≤ w(‖λj′ − j‖_∞)·p(‖j‖_∞)` on `ℤ²` and the
//! explicit almost-kernel vector built from a wide finite section.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::scalar::{from_usize, lit, Real};

use super::tail::{PowerWeight, TailTable};
use super::NecessityError;

/// Slant `λ`, weight `w(x) = (1+x)^{−decay_power}`, polynomial
/// `p(x) = (1+x)^{poly_degree}` and truncation `K₁ > K₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlantedMatrixSpec<T> {
    pub lambda: T,
    pub decay_power: T,
    pub poly_degree: u32,
    pub k1: usize,
    pub k0: usize,
}

impl<T: Real> SlantedMatrixSpec<T> {
    /// Default weight `decay_power = poly_degree + 3`, `K₀ = 0`.
    pub fn new(lambda: T, poly_degree: u32, k1: usize) -> Self {
        Self {
            lambda,
            decay_power: from_usize::<T>(poly_degree as usize + 3),
            poly_degree,
            k1,
            k0: 0,
        }
    }

    pub fn validate(&self) -> Result<(), NecessityError> {
        if !self.lambda.is_finite() || self.lambda <= T::one() {
            return Err(NecessityError::InvalidSpec("lambda must exceed 1".into()));
        }
        if self.decay_power < from_usize::<T>(self.poly_degree as usize + 3) {
            return Err(NecessityError::InvalidSpec(
                "decay_power must be at least poly_degree + 3".into(),
            ));
        }
        if self.k1 <= self.k0 {
            return Err(NecessityError::InvalidSpec("K1 must exceed K0".into()));
        }
        Ok(())
    }

    pub fn weight(&self) -> PowerWeight<T> {
        PowerWeight::new(self.decay_power)
    }

    /// `N = ⌈λ(K₁+1)/(λ−1)⌉`.
    pub fn n(&self) -> usize {
        exact_ceil(self.lambda * from_usize::<T>(self.k1 + 1) / (self.lambda - T::one()))
    }

    /// `⌈N/λ⌉`.
    pub fn n_over_lambda(&self) -> usize {
        exact_ceil(from_usize::<T>(self.n()) / self.lambda)
    }

    /// `Ñ = ⌈N/λ⌉ + K₁`.
    pub fn n_tilde(&self) -> usize {
        self.n_over_lambda() + self.k1
    }

    /// Entry `w(‖λj′ − j‖_∞)·p(‖j‖_∞)`, saturating the hypothesis.
    pub fn entry(&self, row: (i64, i64), col: (i64, i64)) -> T {
        let d0 = (self.lambda * lit::<T>(row.0 as f64) - lit::<T>(col.0 as f64)).abs();
        let d1 = (self.lambda * lit::<T>(row.1 as f64) - lit::<T>(col.1 as f64)).abs();
        let jn = col.0.unsigned_abs().max(col.1.unsigned_abs()) as usize;
        self.weight().eval(d0.max(d1)) * (T::one() + from_usize::<T>(jn)).powi(self.poly_degree as i32)
    }

    /// Section with rows `‖j′‖_∞ ≤ rows` and columns `‖j‖_∞ ≤ cols`, both in
    /// `box_indices` order.
    pub fn section(&self, rows: usize, cols: usize) -> DMatrix<T> {
        let r = box_indices(rows);
        let c = box_indices(cols);
        DMatrix::from_fn(r.len(), c.len(), |i, j| self.entry(r[i], c[j]))
    }

    /// The tail bound as stated for the construction:
    /// `2⁶ (λ/(λ−1))^{2L_p} (K₁+3)^{2L_p} Σ_{K≥⌈N/λ⌉+K₁} K Σ_{k≥K} k·w(k)²`.
    pub fn appendix_bound(&self, table: &TailTable<T>) -> T {
        let two_l = 2 * self.poly_degree as i32;
        let ratio = self.lambda / (self.lambda - T::one());
        lit::<T>(64.0) * ratio.powi(two_l) * from_usize::<T>(self.k1 + 3).powi(two_l) * table.outer(self.n_tilde())
    }

    /// The same chain without re-indexing the outer sum: each of the
    /// `8(⌈N/λ⌉+K)` rows at distance `⌈N/λ⌉+K` contributes at most
    /// `8 (N+1)^{2L_p} Σ_{k≥K} k·w(k)²`, summed over `K > K₁`.
    pub fn shell_bound(&self, table: &TailTable<T>) -> T {
        let two_l = 2 * self.poly_degree as i32;
        let start = self.k1 + 1;
        let shells = table.outer(start) + from_usize::<T>(self.n_over_lambda()) * table.plain(start);
        lit::<T>(64.0) * from_usize::<T>(self.n() + 1).powi(two_l) * shells
    }
}

/// `⌈x⌉`, treating values within rounding error of an integer as that integer.
fn exact_ceil<T: Real>(x: T) -> usize {
    let r = x.round();
    let tol = lit::<T>(1e-9) * x.abs().max(T::one());
    let v = if (x - r).abs() <= tol { r } else { x.ceil() };
    v.to_usize().expect("nonnegative index")
}

/// Points of `{‖j‖_∞ ≤ r}` in lexicographic order.
pub fn box_indices(r: usize) -> Vec<(i64, i64)> {
    let r = r as i64;
    (-r..=r).flat_map(|a| (-r..=r).map(move |b| (a, b))).collect()
}

/// The wide section `(m_{j′,j})_{‖j′‖≤Ñ, ‖j‖≤N}`.
#[derive(Debug, Clone)]
pub struct SlantedSection<T: Real> {
    pub spec: SlantedMatrixSpec<T>,
    pub n: usize,
    pub n_tilde: usize,
    pub matrix: DMatrix<T>,
}

pub fn build_slanted<T: Real>(spec: &SlantedMatrixSpec<T>) -> Result<SlantedSection<T>, NecessityError> {
    spec.validate()?;
    let (n, n_tilde) = (spec.n(), spec.n_tilde());
    Ok(SlantedSection {
        spec: *spec,
        n,
        n_tilde,
        matrix: spec.section(n_tilde, n),
    })
}

/// Unit vector `x` supported on `‖j‖_∞ ≤ N` with `(Mx)_{j′} = 0` for
/// `‖j′‖_∞ ≤ Ñ`, and the size of `Mx` on a larger window.
#[derive(Debug, Clone)]
pub struct KernelVectorReport<T: Real> {
    pub n: usize,
    pub n_tilde: usize,
    pub x: DVector<T>,
    /// `‖Mx‖₂` over rows `‖j′‖_∞ ≤ eval_radius`.
    pub norm_mx: T,
    pub eval_radius: usize,
    /// `max |(Mx)_{j′}|` over `‖j′‖_∞ ≤ Ñ`.
    pub inner_residual: T,
    pub kernel_dim: usize,
    pub appendix_bound: T,
    pub shell_bound: T,
}

/// Any unit null vector of the wide section satisfies the construction. Among
/// them this picks the one with the smallest `‖Mx‖` on the evaluation window
/// (radius `3N`), which makes the choice canonical.
pub fn kernel_vector<T: Real>(spec: &SlantedMatrixSpec<T>) -> Result<KernelVectorReport<T>, NecessityError> {
    let section = build_slanted(spec)?;
    let z = linalg::kernel_basis(&section.matrix, T::rank_rtol());
    if z.ncols() == 0 {
        return Err(NecessityError::NumericalRankFull);
    }
    let eval_radius = 3 * section.n;
    let big = spec.section(eval_radius, section.n);
    let (y, _) = linalg::smallest_right_singular(&(&big * &z));
    let x = &z * y;
    let x = &x / x.norm();
    let inner_residual = (&section.matrix * &x).amax();
    let norm_mx = (&big * &x).norm();
    let table = TailTable::new(&spec.weight())?;
    Ok(KernelVectorReport {
        n: section.n,
        n_tilde: section.n_tilde,
        x,
        norm_mx,
        eval_radius,
        inner_residual,
        kernel_dim: z.ncols(),
        appendix_bound: spec.appendix_bound(&table),
        shell_bound: spec.shell_bound(&table),
    })
}

//! Dense SVD and Hermitian eigen helpers on top of `nalgebra`.
//!
//! Every routine measures singular values over the *domain* of the map: a wide
//! `m×n` matrix (`m < n`) has `n − m` singular values equal to zero. These are
//! obtained numerically by padding with zero rows, so that the associated right
//! singular vectors are genuine kernel vectors.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

fn padded<N: ComplexField>(a: &DMatrix<N>) -> DMatrix<N> {
    let (m, n) = a.shape();
    if m >= n {
        return a.clone();
    }
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (m, n)).copy_from(a);
    out
}

/// Singular values of `a` over its domain, in descending order (length `ncols`).
pub fn singular_values<N>(a: &DMatrix<N>) -> Vec<N::RealField>
where
    N: ComplexField,
    N::RealField: Real,
{
    if a.ncols() == 0 {
        return Vec::new();
    }
    let svd = padded(a).svd(false, false);
    let mut s: Vec<N::RealField> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// `(σ_min, σ_max)` over the domain; `(0, 0)` for a matrix without columns.
pub fn sigma_extremes<N>(a: &DMatrix<N>) -> (N::RealField, N::RealField)
where
    N: ComplexField,
    N::RealField: Real,
{
    let s = singular_values(a);
    match (s.last(), s.first()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (N::RealField::zero(), N::RealField::zero()),
    }
}

/// Unit right singular vector for the smallest singular value, with that value.
pub fn smallest_right_singular<N>(a: &DMatrix<N>) -> (DVector<N>, N::RealField)
where
    N: ComplexField,
    N::RealField: Real,
{
    let n = a.ncols();
    assert!(n > 0, "matrix without columns has no right singular vectors");
    let svd = padded(a).svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty spectrum");
    let v = v_t.row(idx).adjoint();
    (v, sigma)
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is at most `rtol·σ_max` (plus the structural kernel of a wide
/// matrix). Columns of the returned matrix span the kernel.
pub fn kernel_basis<N>(a: &DMatrix<N>, rtol: N::RealField) -> DMatrix<N>
where
    N: ComplexField,
    N::RealField: Real,
{
    let n = a.ncols();
    let svd = padded(a).svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd
        .singular_values
        .iter()
        .copied()
        .fold(N::RealField::zero(), |m, x| if x > m { x } else { m });
    let cut = rtol * smax;
    let idx: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(i, _)| i)
        .collect();
    let mut basis = DMatrix::zeros(n, idx.len());
    for (col, &i) in idx.iter().enumerate() {
        basis.set_column(col, &v_t.row(i).adjoint());
    }
    basis
}

/// Outcome of a least-squares solve with an explicit rank decision.
#[derive(Debug, Clone)]
pub struct LeastSquares<N: ComplexField> {
    pub solution: DVector<N>,
    pub sigma_min: N::RealField,
    pub sigma_max: N::RealField,
}

/// Solve `min ‖a·x − b‖₂`. Returns `None` when `σ_min ≤ rtol·σ_max`, i.e. when
/// the columns of `a` are numerically dependent (always the case for wide `a`).
pub fn least_squares<N>(a: &DMatrix<N>, b: &DVector<N>, rtol: N::RealField) -> Option<LeastSquares<N>>
where
    N: ComplexField,
    N::RealField: Real,
{
    let (smin, smax) = sigma_extremes(a);
    if a.ncols() == 0 {
        return Some(LeastSquares {
            solution: DVector::zeros(0),
            sigma_min: smin,
            sigma_max: smax,
        });
    }
    if a.ncols() > a.nrows() || smin <= rtol * smax {
        return None;
    }
    let svd = a.clone().svd(true, true);
    let solution = svd.solve(b, N::RealField::zero()).ok()?;
    Some(LeastSquares {
        solution,
        sigma_min: smin,
        sigma_max: smax,
    })
}

/// Extreme eigenvalues `(λ_min, λ_max)` of a Hermitian matrix.
pub fn hermitian_extremes<N>(h: &DMatrix<N>) -> (N::RealField, N::RealField)
where
    N: ComplexField,
    N::RealField: Real,
{
    assert!(h.is_square(), "Hermitian matrix must be square");
    if h.nrows() == 0 {
        return (N::RealField::zero(), N::RealField::zero());
    }
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let mut lo = eig.eigenvalues[0];
    let mut hi = lo;
    for &e in eig.eigenvalues.iter() {
        if e < lo {
            lo = e;
        }
        if e > hi {
            hi = e;
        }
    }
    (lo, hi)
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm<N>(a: &DMatrix<N>) -> N::RealField
where
    N: ComplexField,
    N::RealField: Real,
{
    sigma_extremes(a).1
}

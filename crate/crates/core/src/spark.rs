//! Identification matrices `A(c)` and full-spark certification.
//!
//! For an `L`-periodic sequence `c` and `K ≥ 1`, `A(c) = [A_0 … A_{K−1}]` is the
//! `L × KL` matrix with block entries `A_k[p, q] = c_{p+k} e^{2πi q (p+k)/L}`.
//! Column `m·L + n` belongs to grid cell `(m, n)`. The sequence has *full spark*
//! when every choice of `L` columns is linearly independent, certified here by
//! a positive smallest singular value.

use itertools::Itertools;
use num_complex::Complex;
use rand::seq::index::sample;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, CMatrix};
use crate::rng;
use crate::scalar::{root_of_unity, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparkError {
    #[error("identifier sequence must be nonempty and not identically zero")]
    ZeroSequence,
    #[error("column index {index} out of range for {columns} columns")]
    IndexOutOfRange { index: usize, columns: usize },
    #[error("column index {0} listed twice")]
    DuplicateIndex(usize),
    #[error("exhaustive check needs {needed} subsets, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("period {0} is not prime")]
    NotPrime(usize),
    #[error("K must be at least 1")]
    ZeroBlocks,
}

/// Trial division; fine for periods at desk scale.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// All primes `≤ max`.
pub fn primes_up_to(max: usize) -> Vec<usize> {
    (2..=max).filter(|&n| is_prime(n)).collect()
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// An `L`-periodic complex sequence generating pilots and `A(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifierSequence<T> {
    values: Vec<Complex<T>>,
}

impl<T: Real> IdentifierSequence<T> {
    pub fn new(values: Vec<Complex<T>>) -> Result<Self, SparkError> {
        let zero = Complex::new(T::zero(), T::zero());
        if values.is_empty() || values.iter().all(|&z| z == zero) {
            return Err(SparkError::ZeroSequence);
        }
        Ok(Self { values })
    }

    /// Draw `L` unit-variance complex Gaussian entries.
    pub fn random<R: rand::Rng + ?Sized>(period: usize, rng: &mut R) -> Self {
        loop {
            let values = (0..period).map(|_| rng::unit_complex_gaussian(rng)).collect();
            if let Ok(seq) = Self::new(values) {
                return seq;
            }
        }
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// `c_i` with `i` taken mod `L`.
    pub fn at(&self, i: i64) -> Complex<T> {
        self.values[i.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn norm(&self) -> T {
        self.values.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
    }
}

/// `A(c)` together with its block count.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentMatrix<T: Real> {
    blocks: usize,
    period: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> IdentMatrix<T> {
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Column index of cell `(m, n)`.
    pub fn column_index(&self, m: usize, n: usize) -> usize {
        m * self.period + n
    }

    /// The `L × |J|` submatrix on the given columns.
    pub fn columns(&self, cols: &[usize]) -> Result<CMatrix<T>, SparkError> {
        let total = self.ncols();
        let mut seen = vec![false; total];
        for &j in cols {
            if j >= total {
                return Err(SparkError::IndexOutOfRange {
                    index: j,
                    columns: total,
                });
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(SparkError::DuplicateIndex(j));
            }
        }
        Ok(self.matrix.select_columns(cols))
    }
}

/// Assemble `A(c)` with `blocks = K` blocks.
pub fn build_a<T: Real>(c: &IdentifierSequence<T>, blocks: usize) -> Result<IdentMatrix<T>, SparkError> {
    if blocks == 0 {
        return Err(SparkError::ZeroBlocks);
    }
    let l = c.period();
    let mut a = CMatrix::zeros(l, blocks * l);
    for k in 0..blocks {
        for p in 0..l {
            let shift = (p + k) as i64;
            let cv = c.at(shift);
            for q in 0..l {
                a[(p, k * l + q)] = cv * root_of_unity::<T>(q as i64 * shift, l);
            }
        }
    }
    Ok(IdentMatrix {
        blocks,
        period: l,
        matrix: a,
    })
}

/// Smallest singular value of the columns `cols` of `A(c)`, measured over
/// `ℂ^{|J|}`; zero (numerically) when `|J| > L`.
pub fn subset_sigma_min<T: Real>(a: &IdentMatrix<T>, cols: &[usize]) -> Result<T, SparkError> {
    let sub = a.columns(cols)?;
    Ok(linalg::sigma_extremes(&sub).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparkMode {
    /// Every `L`-subset of the `KL` columns.
    Exhaustive,
    /// `budget` uniformly drawn `L`-subsets from the given seed.
    Sampled { seed: u64 },
}

/// Result of a spark check.
#[derive(Debug, Clone, PartialEq)]
pub struct SparkReport<T> {
    pub period: usize,
    pub blocks: usize,
    pub mode: SparkMode,
    pub subsets_checked: u64,
    pub min_sigma_min: T,
    /// Column indices of the worst subset.
    pub witness: Vec<usize>,
    /// `‖A(c)‖₂`, the scale for the independence threshold.
    pub matrix_norm: T,
    pub prime_period: bool,
}

impl<T: Real> SparkReport<T> {
    /// `min σ_min > rtol·‖A(c)‖₂` with the scalar's rank tolerance.
    pub fn is_full_spark(&self) -> bool {
        self.min_sigma_min > T::rank_rtol() * self.matrix_norm
    }
}

/// σ_min of one checked subset.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSigma<T> {
    pub columns: Vec<usize>,
    pub sigma_min: T,
}

/// σ_min for every `L`-subset, in lexicographic subset order.
pub fn exhaustive_subset_sigmas<T: Real>(a: &IdentMatrix<T>, budget: u64) -> Result<Vec<SubsetSigma<T>>, SparkError> {
    let l = a.period();
    let n = a.ncols();
    let needed = binomial(n, l).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(SparkError::BudgetExceeded { needed, budget });
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(l).collect();
    Ok(evaluate(a, subsets))
}

/// σ_min for `budget` random `L`-subsets (sorted indices), drawn from `seed`.
pub fn sampled_subset_sigmas<T: Real>(a: &IdentMatrix<T>, budget: u64, seed: u64) -> Vec<SubsetSigma<T>> {
    let l = a.period();
    let n = a.ncols();
    let mut rng = rng::stream(seed, 0);
    let subsets = (0..budget)
        .map(|_| {
            let mut s = sample(&mut rng, n, l).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    evaluate(a, subsets)
}

fn evaluate<T: Real>(a: &IdentMatrix<T>, subsets: Vec<Vec<usize>>) -> Vec<SubsetSigma<T>> {
    subsets
        .into_par_iter()
        .map(|columns| {
            let sigma_min = subset_sigma_min(a, &columns).expect("generated subsets are valid");
            SubsetSigma { columns, sigma_min }
        })
        .collect()
}

/// Reduce per-subset values to a report; ties keep the earliest subset.
pub fn summarize<T: Real>(a: &IdentMatrix<T>, mode: SparkMode, sigmas: &[SubsetSigma<T>]) -> SparkReport<T> {
    let worst = sigmas
        .iter()
        .reduce(|best, s| if s.sigma_min < best.sigma_min { s } else { best })
        .expect("at least one subset");
    SparkReport {
        period: a.period(),
        blocks: a.blocks(),
        mode,
        subsets_checked: sigmas.len() as u64,
        min_sigma_min: worst.sigma_min,
        witness: worst.columns.clone(),
        matrix_norm: linalg::spectral_norm(a.matrix()),
        prime_period: is_prime(a.period()),
    }
}

/// Check that every `L` columns of `A(c)` are independent.
pub fn full_spark_check<T: Real>(
    c: &IdentifierSequence<T>,
    blocks: usize,
    mode: SparkMode,
    budget: u64,
) -> Result<SparkReport<T>, SparkError> {
    let a = build_a(c, blocks)?;
    let sigmas = match mode {
        SparkMode::Exhaustive => exhaustive_subset_sigmas(&a, budget)?,
        SparkMode::Sampled { seed } => {
            if budget == 0 {
                return Err(SparkError::BudgetExceeded { needed: 1, budget });
            }
            sampled_subset_sigmas(&a, budget, seed)
        }
    };
    Ok(summarize(&a, mode, &sigmas))
}

/// Default subset budget for exhaustive enumeration and sampling.
pub const DEFAULT_BUDGET: u64 = 100_000;

/// Draw `trials` Gaussian candidates for a prime period `L` and keep the one
/// whose worst `L`-subset is best conditioned. Exhaustive when `C(KL, L)` fits
/// the budget, sampled otherwise. Deterministic in `seed`.
pub fn search_identifier<T: Real>(
    period: usize,
    blocks: usize,
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<(IdentifierSequence<T>, SparkReport<T>), SparkError> {
    if !is_prime(period) {
        return Err(SparkError::NotPrime(period));
    }
    if blocks == 0 {
        return Err(SparkError::ZeroBlocks);
    }
    let exhaustive = binomial(blocks * period, period).is_some_and(|n| n <= budget as u128);
    let mut best: Option<(IdentifierSequence<T>, SparkReport<T>)> = None;
    for trial in 0..trials.max(1) {
        let mut rng = rng::stream(seed, trial as u64);
        let c = IdentifierSequence::random(period, &mut rng);
        let mode = if exhaustive {
            SparkMode::Exhaustive
        } else {
            SparkMode::Sampled {
                seed: seed ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            }
        };
        let report = full_spark_check(&c, blocks, mode, budget)?;
        let better = best
            .as_ref()
            .is_none_or(|(_, b)| report.min_sigma_min > b.min_sigma_min);
        if better {
            best = Some((c, report));
        }
    }
    Ok(best.expect("at least one trial"))
}

//! Double tail sums `Σ_{K≥K₁} K Σ_{k≥K} k·w(k)²` for power-law weights.

use crate::scalar::{from_usize, lit, to_f64, Real};

use super::NecessityError;

/// `w(x) = (1 + x)^{−power}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerWeight<T> {
    pub power: T,
}

impl<T: Real> PowerWeight<T> {
    pub fn new(power: T) -> Self {
        Self { power }
    }

    pub fn eval(&self, x: T) -> T {
        (T::one() + x).powf(-self.power)
    }

    /// First `k` with `w(k)² < 1e−30`; terms beyond it are dropped.
    fn cutoff(&self) -> usize {
        let k = 10f64.powf(15.0 / to_f64(self.power));
        (k.ceil() as usize).clamp(16, MAX_TERMS)
    }
}

const MAX_TERMS: usize = 20_000_000;

/// Suffix sums over `k = 0..cutoff`:
/// `inner[K] = Σ_{k≥K} k w(k)²`, `outer[K] = Σ_{K'≥K} K'·inner[K']` and
/// `plain[K] = Σ_{K'≥K} inner[K']`.
#[derive(Debug, Clone)]
pub struct TailTable<T> {
    inner: Vec<T>,
    outer: Vec<T>,
    plain: Vec<T>,
}

impl<T: Real> TailTable<T> {
    pub fn new(w: &PowerWeight<T>) -> Result<Self, NecessityError> {
        if w.power <= lit(2.0) {
            return Err(NecessityError::DivergentTail(to_f64(w.power)));
        }
        let n = w.cutoff();
        let mut inner = vec![T::zero(); n + 1];
        let mut outer = vec![T::zero(); n + 1];
        let mut plain = vec![T::zero(); n + 1];
        for k in (0..n).rev() {
            let kf = from_usize::<T>(k);
            let wk = w.eval(kf);
            inner[k] = inner[k + 1] + kf * wk * wk;
            outer[k] = outer[k + 1] + kf * inner[k];
            plain[k] = plain[k + 1] + inner[k];
        }
        Ok(Self { inner, outer, plain })
    }

    fn at(v: &[T], k: usize) -> T {
        v.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn inner(&self, k: usize) -> T {
        Self::at(&self.inner, k)
    }

    pub fn outer(&self, k: usize) -> T {
        Self::at(&self.outer, k)
    }

    pub fn plain(&self, k: usize) -> T {
        Self::at(&self.plain, k)
    }
}

/// `K₁^{2L_p}·Σ_{K≥K₁} K Σ_{k≥K} k·w(k)²` for each `K₁`.
pub fn tail_sum<T: Real>(w: &PowerWeight<T>, poly_degree: u32, k1_list: &[usize]) -> Result<Vec<T>, NecessityError> {
    let table = TailTable::new(w)?;
    Ok(k1_list
        .iter()
        .map(|&k1| from_usize::<T>(k1).powi(2 * poly_degree as i32) * table.outer(k1))
        .collect())
}

//! Prototype operator with a smooth tensor-bump spreading function on one grid
//! cell, and the shift/modulation family generated from it.
//!
//! On `ℤ_P` a cell of the `(K, L)` grid is a block of `u × v` spreading
//! samples with `u·v = P/L`; `u` is the divisor of `P/L` closest to `√P/K`,
//! so one time or frequency unit spans about `√P` samples.

use num_complex::Complex;

use crate::linalg::{self, CMatrix};
use crate::scalar::{from_usize, lit, Real};
use crate::tf::{self, LinOp, SpreadingFunction, TfShift};

use super::NecessityError;

#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeOp<T> {
    pub period: usize,
    pub k: usize,
    pub l: usize,
    pub lambda: T,
    /// Cell width in time-shift samples.
    pub u: usize,
    /// Cell height in frequency-shift samples.
    pub v: usize,
    pub eta1: Vec<T>,
    pub eta2: Vec<T>,
}

/// Cell-centred coordinate of sample `i` in a cell of width `n`.
fn centred<T: Real>(i: usize, n: usize) -> T {
    from_usize::<T>(2 * i + 1) / lit(2.0) - from_usize::<T>(n) / lit(2.0)
}

/// Plateau `1` for `|x| ≤ n/(2λ)`, raised-cosine taper to `0` at `|x| = n/2`.
fn bump<T: Real>(n: usize, lambda: T) -> Vec<T> {
    let half = lit::<T>(0.5);
    let outer = from_usize::<T>(n) * half;
    let inner = outer / lambda;
    (0..n)
        .map(|i| {
            let x = centred::<T>(i, n).abs();
            if x <= inner {
                T::one()
            } else if x >= outer {
                T::zero()
            } else {
                half * (T::one() + (T::pi() * (x - inner) / (outer - inner)).cos())
            }
        })
        .collect()
}

pub fn build_prototype<T: Real>(
    period: usize,
    k: usize,
    l: usize,
    lambda: T,
) -> Result<PrototypeOp<T>, NecessityError> {
    if !lambda.is_finite() || lambda <= T::one() {
        return Err(NecessityError::InvalidSpec("lambda must exceed 1".into()));
    }
    if k == 0 || l == 0 || !period.is_multiple_of(l) {
        return Err(NecessityError::GridTooCoarse(format!("L={l} must divide P={period}")));
    }
    let area = period / l;
    let target = (period as f64).sqrt() / k as f64;
    let u = (1..=area)
        .filter(|d| area.is_multiple_of(*d))
        .min_by(|a, b| {
            let da = (*a as f64 - target).abs();
            let db = (*b as f64 - target).abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("1 divides");
    let v = area / u;
    let eta1 = bump(u, lambda);
    let eta2 = bump(v, lambda);
    if !eta1.contains(&T::one()) || !eta2.contains(&T::one()) {
        return Err(NecessityError::GridTooCoarse(format!(
            "no sample on the plateau of a {u}x{v} cell"
        )));
    }
    Ok(PrototypeOp {
        period,
        k,
        l,
        lambda,
        u,
        v,
        eta1,
        eta2,
    })
}

/// One family member: a cell of the spreading grid and the `u·v` values on it
/// (time-shift major).
#[derive(Debug, Clone, PartialEq)]
pub struct Member<T> {
    pub cell: (usize, usize),
    pub values: Vec<Complex<T>>,
}

impl<T: Real> PrototypeOp<T> {
    /// Number of time cells and frequency cells on the `P × P` grid.
    pub fn cells(&self) -> (usize, usize) {
        (self.period / self.u, self.period / self.v)
    }

    /// Largest `q` such that modulation indices `|k| ≤ q` keep `λ|k|/u ≤ 1/2`
    /// on both axes.
    pub fn max_modulation(&self) -> usize {
        let half = lit::<T>(0.5);
        let t = (from_usize::<T>(self.u) * half / self.lambda).floor();
        let f = (from_usize::<T>(self.v) * half / self.lambda).floor();
        t.min(f).to_usize().unwrap_or(0)
    }

    /// Tensor bump on cell `(0, 0)`.
    pub fn spreading(&self) -> SpreadingFunction<T> {
        let mut eta = SpreadingFunction::zeros(self.period);
        for (i, &a) in self.eta1.iter().enumerate() {
            for (j, &b) in self.eta2.iter().enumerate() {
                eta.set(TfShift::new(i as i64, j as i64), Complex::new(a * b, T::zero()));
            }
        }
        eta
    }

    pub fn operator(&self) -> LinOp<T> {
        tf::operator_from_spreading(&self.spreading())
    }

    /// Bump moved to `cell` and modulated by `e^{2πiλ(k_t x/u + k_f y/v)}` in
    /// cell-centred coordinates `(x, y)`.
    pub fn member(&self, cell: (usize, usize), modulation: (i64, i64)) -> Member<T> {
        let mut values = Vec::with_capacity(self.u * self.v);
        for (i, &a) in self.eta1.iter().enumerate() {
            let x = centred::<T>(i, self.u) / from_usize::<T>(self.u);
            for (j, &b) in self.eta2.iter().enumerate() {
                let y = centred::<T>(j, self.v) / from_usize::<T>(self.v);
                let cycles = self.lambda * (lit::<T>(modulation.0 as f64) * x + lit::<T>(modulation.1 as f64) * y);
                values.push(crate::scalar::cis_cycles(cycles) * (a * b));
            }
        }
        Member { cell, values }
    }

    /// Nonzero spreading coefficients of a member as `(shift, value)` pairs.
    pub fn member_entries(&self, m: &Member<T>) -> Vec<(TfShift, Complex<T>)> {
        let mut out = Vec::with_capacity(m.values.len());
        for i in 0..self.u {
            for j in 0..self.v {
                let z = m.values[i * self.v + j];
                if z != Complex::default() {
                    let s = TfShift::new((m.cell.0 * self.u + i) as i64, (m.cell.1 * self.v + j) as i64);
                    out.push((s, z));
                }
            }
        }
        out
    }

    /// Modulations `|k_t|, |k_f| ≤ (side−1)/2` in lexicographic order.
    pub fn modulation_box(&self, side: usize) -> Result<Vec<(i64, i64)>, NecessityError> {
        if side.is_multiple_of(2) || side / 2 > self.max_modulation() {
            return Err(NecessityError::InvalidSpec(format!(
                "modulation box side {side} must be odd and at most {}",
                2 * self.max_modulation() + 1
            )));
        }
        let r = (side / 2) as i64;
        Ok((-r..=r).flat_map(|a| (-r..=r).map(move |b| (a, b))).collect())
    }

    /// First `size` members, filling all admissible modulations of one cell
    /// before moving to the next cell.
    pub fn family(&self, size: usize) -> Vec<Member<T>> {
        let side = 2 * self.max_modulation() + 1;
        let mods = self.modulation_box(side).expect("maximal box is admissible");
        let (_, nf) = self.cells();
        let mut out = Vec::with_capacity(size);
        let mut c = 0;
        while out.len() < size {
            let cell = (c / nf, c % nf);
            for &m in mods.iter().take(size - out.len()) {
                out.push(self.member(cell, m));
            }
            c += 1;
        }
        out
    }

    /// Hilbert-Schmidt inner product `P·⟨η_a, η_b⟩` of two members.
    pub fn hs_inner(&self, a: &Member<T>, b: &Member<T>) -> Complex<T> {
        if a.cell != b.cell {
            return Complex::default();
        }
        let s = a
            .values
            .iter()
            .zip(&b.values)
            .fold(Complex::default(), |acc, (x, y)| acc + x.conj() * y);
        s * from_usize::<T>(self.period)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramReport<T> {
    pub size: usize,
    pub lambda_min: T,
    pub lambda_max: T,
}

impl<T: Real> GramReport<T> {
    pub fn condition(&self) -> T {
        self.lambda_max / self.lambda_min
    }
}

/// Extreme eigenvalues of the HS Gram matrix of `prototype.family(size)`.
pub fn riesz_gram_check<T: Real>(proto: &PrototypeOp<T>, size: usize) -> GramReport<T> {
    gram_of(proto, &proto.family(size))
}

pub fn gram_of<T: Real>(proto: &PrototypeOp<T>, members: &[Member<T>]) -> GramReport<T> {
    let n = members.len();
    let g = CMatrix::from_fn(n, n, |i, j| proto.hs_inner(&members[i], &members[j]));
    let (lambda_min, lambda_max) = linalg::hermitian_extremes(&g);
    GramReport {
        size: n,
        lambda_min,
        lambda_max,
    }
}

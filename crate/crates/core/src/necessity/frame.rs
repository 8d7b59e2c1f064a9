//! Gaussian Gabor frames `{M_{lb} T_{ka} g}` on `ℤ_P`.

use num_complex::Complex;

use crate::linalg::{self, CMatrix};
use crate::scalar::{from_usize, lit, Real};
use crate::tf::{self, Signal};

use super::NecessityError;

/// Lattice with time step `a` and frequency step `b` (both dividing `P`). The
/// window is the periodized Gaussian `e^{−π x²/P}`, so one sample corresponds
/// to `1/√P` in both directions and the density is `ab/P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaborFrameSpec {
    pub period: usize,
    pub a: usize,
    pub b: usize,
}

impl GaborFrameSpec {
    pub fn new(period: usize, a: usize, b: usize) -> Result<Self, NecessityError> {
        if period == 0 || a == 0 || b == 0 || !period.is_multiple_of(a) || !period.is_multiple_of(b) {
            return Err(NecessityError::InvalidSpec(format!(
                "steps ({a}, {b}) must divide P={period}"
            )));
        }
        Ok(Self { period, a, b })
    }

    /// `a′b′ = ab/P`.
    pub fn density(&self) -> f64 {
        (self.a * self.b) as f64 / self.period as f64
    }

    pub fn len(&self) -> usize {
        (self.period / self.a) * (self.period / self.b)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn window<T: Real>(&self) -> Signal<T> {
        gaussian_window(self.period)
    }

    /// Atoms as columns, ordered by time index then frequency index.
    pub fn synthesis_matrix<T: Real>(&self) -> CMatrix<T> {
        let g = self.window::<T>();
        let (nt, nf) = (self.period / self.a, self.period / self.b);
        let mut out = CMatrix::zeros(self.period, nt * nf);
        for k in 0..nt {
            let shifted = tf::translate(&g, (k * self.a) as i64);
            for l in 0..nf {
                let atom = tf::modulate(&shifted, (l * self.b) as i64);
                out.set_column(k * nf + l, &atom.to_vector());
            }
        }
        out
    }

    /// Coefficient map `f ↦ (⟨f, g_{k,l}⟩)`.
    pub fn analysis_matrix<T: Real>(&self) -> CMatrix<T> {
        self.synthesis_matrix::<T>().adjoint()
    }
}

/// `g[x] = Σ_n e^{−π (x + nP)²/P}` with `x` taken in `[−P/2, P/2)`.
pub fn gaussian_window<T: Real>(period: usize) -> Signal<T> {
    let p = from_usize::<T>(period);
    let samples = (0..period)
        .map(|x| {
            let centred = x as i64 - if 2 * x >= period { period as i64 } else { 0 };
            let v = (-4i64..=4).fold(T::zero(), |acc, n| {
                let y = lit::<T>((centred + n * period as i64) as f64);
                acc + (-T::pi() * y * y / p).exp()
            });
            Complex::new(v, T::zero())
        })
        .collect();
    Signal::new(samples).expect("finite window")
}

/// `(A, B)`: extreme eigenvalues of the frame operator `S = Σ g_{k,l} g_{k,l}^*`.
pub fn gaussian_frame_bounds<T: Real>(spec: &GaborFrameSpec) -> (T, T) {
    let g = spec.synthesis_matrix::<T>();
    let s = &g * g.adjoint();
    let (lo, hi) = linalg::hermitian_extremes(&s);
    (lo.max(T::zero()), hi)
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Divisor pair `(a, b)`, `a ≤ b`, with `ab = density·P` exactly, closest to
/// square.
pub fn balanced_steps(period: usize, density: f64) -> Option<(usize, usize)> {
    let target = density * period as f64;
    let ds = divisors(period);
    ds.iter()
        .flat_map(|&a| ds.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a <= b && ((a * b) as f64 - target).abs() < 1e-9)
        .min_by_key(|&(a, b)| b - a)
}

/// Divisor pair with the largest density `ab/P ≤ max_density`, closest to
/// square among those.
pub fn densest_steps_below(period: usize, max_density: f64) -> Option<(usize, usize)> {
    let ds = divisors(period);
    let limit = max_density * period as f64 + 1e-9;
    ds.iter()
        .flat_map(|&a| ds.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a <= b && ((a * b) as f64) <= limit)
        .max_by(|x, y| (x.0 * x.1).cmp(&(y.0 * y.1)).then((y.1 - y.0).cmp(&(x.1 - x.0))))
}

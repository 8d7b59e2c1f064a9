//! Discrete time-frequency calculus on the cyclic group `ℤ_P`.
//!
//! Conventions used throughout the crate:
//!
//! * `T_k x[p] = x[p − k]`, `M_l x[p] = e^{2πi l p / P} x[p]`;
//! * the time-frequency shift is `π(k, l) = T_k M_l` (translation applied last);
//! * a spreading function `η` holds the unique coefficients with
//!   `H = Σ_{k,l} η[k, l] π(k, l)`, so that `η` of `π(k₀, l₀)` is a Kronecker
//!   delta. With this scaling `√P‖η‖₂ = ‖κ_H‖_F`;
//! * `V_f g[k, l] = Σ_x g[x] e^{−2πi l (x−k)/P} conj(f[x − k])`, and the pairing
//!   `⟨Hf, g⟩ = ⟨η_H, V_f g⟩` holds with unit constant.

use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::scalar::{root_of_unity, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TfError {
    #[error("signal period must be positive")]
    EmptySignal,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("period mismatch: {0} vs {1}")]
    PeriodMismatch(usize, usize),
    #[error("kernel must be square, got {0}x{1}")]
    NotSquare(usize, usize),
}

/// Reduce an integer index into `ℤ_P`.
#[inline]
pub fn wrap(i: i64, period: usize) -> usize {
    i.rem_euclid(period as i64) as usize
}

/// A complex signal on `ℤ_P`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    samples: Vec<Complex<T>>,
}

impl<T: Real> Signal<T> {
    pub fn new(samples: Vec<Complex<T>>) -> Result<Self, TfError> {
        if samples.is_empty() {
            return Err(TfError::EmptySignal);
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(TfError::NonFinite(i));
        }
        Ok(Self { samples })
    }

    pub fn zeros(period: usize) -> Self {
        assert!(period > 0, "period must be positive");
        Self {
            samples: vec![Complex::new(T::zero(), T::zero()); period],
        }
    }

    /// Unit impulse at position `at` (reduced mod P).
    pub fn delta(period: usize, at: i64) -> Self {
        let mut s = Self::zeros(period);
        s.samples[wrap(at, period)] = Complex::new(T::one(), T::zero());
        s
    }

    pub fn from_real(values: &[T]) -> Result<Self, TfError> {
        Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn period(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn norm_squared(&self) -> T {
        self.samples.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// `⟨self, other⟩ = Σ self[x]·conj(other[x])`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>, TfError> {
        check_period(self.period(), other.period())?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj()))
    }

    pub fn to_vector(&self) -> nalgebra::DVector<Complex<T>> {
        nalgebra::DVector::from_column_slice(&self.samples)
    }
}

fn check_period(a: usize, b: usize) -> Result<(), TfError> {
    if a == b {
        Ok(())
    } else {
        Err(TfError::PeriodMismatch(a, b))
    }
}

/// Time-frequency shift index `(k, l)`; reduced mod P on use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TfShift {
    pub k: i64,
    pub l: i64,
}

impl TfShift {
    pub const fn new(k: i64, l: i64) -> Self {
        Self { k, l }
    }

    pub fn reduced(self, period: usize) -> Self {
        Self {
            k: wrap(self.k, period) as i64,
            l: wrap(self.l, period) as i64,
        }
    }
}

impl std::ops::Add for TfShift {
    type Output = TfShift;
    fn add(self, rhs: TfShift) -> TfShift {
        TfShift::new(self.k + rhs.k, self.l + rhs.l)
    }
}

/// `T_k x`.
pub fn translate<T: Real>(x: &Signal<T>, k: i64) -> Signal<T> {
    let p = x.period();
    let samples = (0..p).map(|i| x.samples[wrap(i as i64 - k, p)]).collect();
    Signal { samples }
}

/// `M_l x`.
pub fn modulate<T: Real>(x: &Signal<T>, l: i64) -> Signal<T> {
    let p = x.period();
    let samples = x
        .samples
        .iter()
        .enumerate()
        .map(|(i, &z)| z * root_of_unity::<T>(l * i as i64, p))
        .collect();
    Signal { samples }
}

/// `π(k, l) x = T_k M_l x`.
pub fn tf_shift<T: Real>(x: &Signal<T>, s: TfShift) -> Signal<T> {
    translate(&modulate(x, s.l), s.k)
}

/// Unimodular factor `z` with `π(s₂)π(s₁) = z·π(s₁ + s₂)`.
pub fn composition_phase<T: Real>(period: usize, first: TfShift, second: TfShift) -> Complex<T> {
    root_of_unity(second.l * first.k, period)
}

/// A linear operator on `ℤ_P` given by its kernel matrix `κ[x, y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOp<T: Real> {
    kernel: CMatrix<T>,
}

impl<T: Real> LinOp<T> {
    pub fn new(kernel: CMatrix<T>) -> Result<Self, TfError> {
        let (r, c) = kernel.shape();
        if r != c {
            return Err(TfError::NotSquare(r, c));
        }
        if r == 0 {
            return Err(TfError::EmptySignal);
        }
        if let Some(i) = kernel.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(TfError::NonFinite(i));
        }
        Ok(Self { kernel })
    }

    pub fn identity(period: usize) -> Self {
        Self {
            kernel: CMatrix::identity(period, period),
        }
    }

    /// Matrix of `π(s)`.
    pub fn tf_shift(period: usize, s: TfShift) -> Self {
        let mut kernel = CMatrix::zeros(period, period);
        for x in 0..period {
            let y = wrap(x as i64 - s.k, period);
            kernel[(x, y)] = root_of_unity(s.l * y as i64, period);
        }
        Self { kernel }
    }

    pub fn translation(period: usize, k: i64) -> Self {
        Self::tf_shift(period, TfShift::new(k, 0))
    }

    pub fn modulation(period: usize, l: i64) -> Self {
        Self::tf_shift(period, TfShift::new(0, l))
    }

    pub fn period(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn kernel(&self) -> &CMatrix<T> {
        &self.kernel
    }

    pub fn into_kernel(self) -> CMatrix<T> {
        self.kernel
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> T {
        self.kernel.norm()
    }

    pub fn apply(&self, x: &Signal<T>) -> Result<Signal<T>, TfError> {
        check_period(self.period(), x.period())?;
        let y = &self.kernel * x.to_vector();
        Ok(Signal {
            samples: y.iter().copied().collect(),
        })
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self, TfError> {
        check_period(self.period(), rhs.period())?;
        Ok(Self {
            kernel: &self.kernel * &rhs.kernel,
        })
    }
}

/// Spreading coefficients `η[k, l]` (rows: time shift, columns: frequency shift).
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingFunction<T: Real> {
    eta: CMatrix<T>,
}

impl<T: Real> SpreadingFunction<T> {
    pub fn new(eta: CMatrix<T>) -> Result<Self, TfError> {
        let (r, c) = eta.shape();
        if r != c {
            return Err(TfError::NotSquare(r, c));
        }
        if r == 0 {
            return Err(TfError::EmptySignal);
        }
        Ok(Self { eta })
    }

    pub fn zeros(period: usize) -> Self {
        Self {
            eta: CMatrix::zeros(period, period),
        }
    }

    /// Kronecker delta at `s`: the spreading function of `π(s)`.
    pub fn delta(period: usize, s: TfShift) -> Self {
        let mut out = Self::zeros(period);
        let r = s.reduced(period);
        out.eta[(r.k as usize, r.l as usize)] = Complex::new(T::one(), T::zero());
        out
    }

    pub fn period(&self) -> usize {
        self.eta.nrows()
    }

    pub fn coefficients(&self) -> &CMatrix<T> {
        &self.eta
    }

    pub fn coefficients_mut(&mut self) -> &mut CMatrix<T> {
        &mut self.eta
    }

    pub fn get(&self, s: TfShift) -> Complex<T> {
        let r = s.reduced(self.period());
        self.eta[(r.k as usize, r.l as usize)]
    }

    pub fn set(&mut self, s: TfShift, value: Complex<T>) {
        let r = s.reduced(self.period());
        self.eta[(r.k as usize, r.l as usize)] = value;
    }

    /// ℓ² norm of the coefficient array.
    pub fn norm(&self) -> T {
        self.eta.norm()
    }

    /// `Σ self·conj(other)` over all grid points.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>, TfError> {
        check_period(self.period(), other.period())?;
        Ok(self.eta.dotc(&other.eta).conj())
    }

    /// Apply `H = Σ η[k,l] π(k,l)` to `x` without forming the kernel; cost is
    /// proportional to the number of nonzero coefficients.
    pub fn apply(&self, x: &Signal<T>) -> Result<Signal<T>, TfError> {
        let p = self.period();
        check_period(p, x.period())?;
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; p];
        for k in 0..p {
            for l in 0..p {
                let c = self.eta[(k, l)];
                if c == zero {
                    continue;
                }
                for (xi, o) in out.iter_mut().enumerate() {
                    let y = wrap(xi as i64 - k as i64, p);
                    *o += c * root_of_unity::<T>(l as i64 * y as i64, p) * x.samples[y];
                }
            }
        }
        Ok(Signal { samples: out })
    }
}

/// Spreading coefficients of `h`: `η[k,l] = (1/P) Σ_x κ[x, x−k] e^{−2πi l (x−k)/P}`.
pub fn spreading_of<T: Real>(h: &LinOp<T>) -> SpreadingFunction<T> {
    let p = h.period();
    let inv_p = T::one() / crate::scalar::from_usize::<T>(p);
    let mut eta = CMatrix::zeros(p, p);
    for k in 0..p {
        for l in 0..p {
            let mut acc = Complex::new(T::zero(), T::zero());
            for x in 0..p {
                let y = wrap(x as i64 - k as i64, p);
                acc += h.kernel[(x, y)] * root_of_unity::<T>(-(l as i64) * y as i64, p);
            }
            eta[(k, l)] = acc * inv_p;
        }
    }
    SpreadingFunction { eta }
}

/// Kernel of `Σ η[k,l] π(k,l)`: `κ[x, x−k] = Σ_l η[k,l] e^{2πi l (x−k)/P}`.
pub fn operator_from_spreading<T: Real>(eta: &SpreadingFunction<T>) -> LinOp<T> {
    let p = eta.period();
    let mut kernel = CMatrix::zeros(p, p);
    for k in 0..p {
        for x in 0..p {
            let y = wrap(x as i64 - k as i64, p);
            let mut acc = Complex::new(T::zero(), T::zero());
            for l in 0..p {
                acc += eta.eta[(k, l)] * root_of_unity::<T>(l as i64 * y as i64, p);
            }
            kernel[(x, y)] = acc;
        }
    }
    LinOp { kernel }
}

/// Short-time Fourier transform `V_f g` with window `f`.
pub fn stft<T: Real>(g: &Signal<T>, f: &Signal<T>) -> Result<CMatrix<T>, TfError> {
    let p = g.period();
    check_period(p, f.period())?;
    let mut v = DMatrix::zeros(p, p);
    for k in 0..p {
        for l in 0..p {
            let mut acc = Complex::new(T::zero(), T::zero());
            for x in 0..p {
                let y = wrap(x as i64 - k as i64, p);
                acc += g.samples[x] * root_of_unity::<T>(-(l as i64) * y as i64, p) * f.samples[y].conj();
            }
            v[(k, l)] = acc;
        }
    }
    Ok(v)
}

/// Parameters `(ω, p, r, ξ)` of the conjugation `M_ω T_{p−r} · H · T_r M_{ξ−ω}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conjugation {
    pub omega: i64,
    pub p: i64,
    pub r: i64,
    pub xi: i64,
}

impl Conjugation {
    pub const fn new(omega: i64, p: i64, r: i64, xi: i64) -> Self {
        Self { omega, p, r, xi }
    }
}

/// Spreading function of `M_ω T_{p−r} H T_r M_{ξ−ω}` from that of `H`:
/// translate by `(p, ξ)`, modulate by `(ω, r)`, and multiply by the global
/// phase `e^{−2πi ξ r / P}`.
pub fn conjugate_spreading<T: Real>(eta: &SpreadingFunction<T>, c: Conjugation) -> SpreadingFunction<T> {
    let n = eta.period();
    let global = root_of_unity::<T>(-c.xi * c.r, n);
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let src = eta.eta[(wrap(k as i64 - c.p, n), wrap(l as i64 - c.xi, n))];
            let phase = root_of_unity::<T>(c.omega * k as i64 + c.r * l as i64, n);
            out[(k, l)] = global * phase * src;
        }
    }
    SpreadingFunction { eta: out }
}

/// The conjugated operator `M_ω T_{p−r} H T_r M_{ξ−ω}` as a matrix.
pub fn conjugate_operator<T: Real>(h: &LinOp<T>, c: Conjugation) -> LinOp<T> {
    let n = h.period();
    let left = LinOp::modulation(n, c.omega)
        .compose(&LinOp::translation(n, c.p - c.r))
        .expect("same period");
    let right = LinOp::translation(n, c.r)
        .compose(&LinOp::modulation(n, c.xi - c.omega))
        .expect("same period");
    left.compose(h).and_then(|lh| lh.compose(&right)).expect("same period")
}

//! Numerical toolkit for identifying MIMO channels from their spreading
//! functions.
//!
//! Everything lives on finite groups: signals on `ℤ_P`, operators as `P × P`
//! kernels, spreading functions as coefficients in the basis of
//! time-frequency shifts `π(k, l) = T_k M_l`.
//!
//! - [`tf`]: translations, modulations, spreading functions, STFT and the
//!   conjugation identity.
//! - [`spark`]: the identification matrix `A(c)` and full-spark checks.
//! - [`geometry`]: rectangle unions, grid covers and MIMO offset packing.
//! - [`ident`]: pilots, channel simulation, least-squares recovery and
//!   stability bounds.
//! - [`necessity`]: slanted matrices, tail sums, prototype operators,
//!   Gaussian Gabor frames and the overspread composition experiment.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the precision.

pub mod geometry;
pub mod ident;
pub mod linalg;
pub mod necessity;
pub mod rng;
pub mod scalar;
pub mod spark;
pub mod tf;

pub use scalar::Real;

pub type Signal64 = tf::Signal<f64>;
pub type Signal32 = tf::Signal<f32>;
pub type LinOp64 = tf::LinOp<f64>;
pub type LinOp32 = tf::LinOp<f32>;
pub type SpreadingFunction64 = tf::SpreadingFunction<f64>;
pub type SpreadingFunction32 = tf::SpreadingFunction<f32>;
pub type IdentifierSequence64 = spark::IdentifierSequence<f64>;
pub type IdentifierSequence32 = spark::IdentifierSequence<f32>;
pub type IdentMatrix64 = spark::IdentMatrix<f64>;
pub type SparkReport64 = spark::SparkReport<f64>;
pub type RectUnion64 = geometry::RectUnion<f64>;
pub type MimoChannel64 = ident::MimoChannel<f64>;
pub type MimoChannel32 = ident::MimoChannel<f32>;
pub type PilotSet64 = ident::PilotSet<f64>;
pub type IdentificationResult64 = ident::IdentificationResult<f64>;
pub type SlantedMatrixSpec64 = necessity::SlantedMatrixSpec<f64>;
pub type PrototypeOp64 = necessity::PrototypeOp<f64>;

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Tf(#[from] tf::TfError),
    #[error(transparent)]
    Spark(#[from] spark::SparkError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Ident(#[from] ident::IdentError),
    #[error(transparent)]
    Necessity(#[from] necessity::NecessityError),
}

//! Dirichlet character groups and Kloosterman-type character sums.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: factorization, multiplicative functions, inverses, CRT and the
//!   structure of `(Z/p^a Z)*` (primitive roots, discrete logarithms).
//! * [`character`]: the full character group mod `q`, exact root-of-unity
//!   values, parity, complete evenness and conductors.
//! * [`sums`]: `Λ_χ(m,n,I;q) = Σ_{a∈I, (a,q)=1} χ(ma + n·a⁻¹)` and its relatives
//!   (Gauss sums, second moments, quadratic exponential sums, bilinear forms).
//!   Floating accumulation is generic over [`Scalar`].
//! * [`oracle`]: definitional brute-force routes used to cross-check `sums`.
//! * [`verify`]: exhaustive identity and bound checks producing
//!   [`verify::VerificationReport`]s.

pub mod arith;
pub mod character;
mod error;
pub mod oracle;
mod scalar;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{sum_tolerance, ComplexValue, Scalar, TOLERANCE_UNIT};

pub use arith::{factorize, Factorization, MultiplicativeProfile, PrimePower, UnitGroupStructure};
pub use character::{
    CharacterGroup, CharacterValue, DirichletCharacter, ParityFlags, RootOfUnity,
};
pub use sums::{BilinearInstance, IntervalSpec, LambdaEvaluator, ValueTable, WeightVector};

/// Double-precision complex value; the accumulator used by the verification engine.
pub type Complex64 = ComplexValue<f64>;
/// Single-precision complex value.
pub type Complex32 = ComplexValue<f32>;

pub type LambdaEvaluator64 = LambdaEvaluator<f64>;
pub type LambdaEvaluator32 = LambdaEvaluator<f32>;
pub type ValueTable64 = ValueTable<f64>;
pub type ValueTable32 = ValueTable<f32>;
pub type WeightVector64 = WeightVector<f64>;
pub type BilinearInstance64 = BilinearInstance<f64>;

//! Exact algebra for string topology on the torus, spheres and surfaces.
//!
//! The crate evaluates the Goldman Lie algebra of the torus, loop homology
//! rings with their loop product and BV operator, integral string homology
//! with the string bracket, and checks long exact sequences mechanically.
//! All arithmetic is exact: integers, rationals and finitely generated
//! abelian groups presented by integer matrices.
//!
//! Chains and matrices are generic over exact scalar types; the aliases
//! below fix the concrete integer and rational types used by the rest of
//! the crate and by the command-line tool.

pub mod chain;
mod error;
pub mod goldman;
pub mod group;
pub mod loops;
pub mod matrix;
pub mod scalar;
pub mod strings;
pub mod surfaces;
pub mod text;

pub use error::{Error, Result};

/// Exact integer scalar.
pub type Int = i64;
/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rat = num_rational::Ratio<Int>;
/// Integer matrix.
pub type IntMatrix = matrix::Matrix<Int>;
/// Chain with integer coefficients.
pub type IntChain<K> = chain::FreeChain<K, Int>;
/// Chain with rational coefficients.
pub type RatChain<K> = chain::FreeChain<K, Rat>;
/// Goldman chain over ℤ.
pub type ZTorusChain = goldman::TorusChain<Int>;
/// Goldman chain over ℚ.
pub type QTorusChain = goldman::TorusChain<Rat>;

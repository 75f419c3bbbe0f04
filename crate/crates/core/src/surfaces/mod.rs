//! String homology and string brackets of closed surfaces: the torus,
//! computed completely block by block, and `Σ_g` for `g ≥ 2`, whose degree-0
//! brackets come from a user-supplied Goldman bracket table.
//!
//! Both are infinite direct sums; every operation works on a finite window
//! of blocks or conjugacy classes and is exact there.

pub mod sigma;
pub mod torus;

pub use sigma::{
    sigma_g_string_bracket, sigma_g_string_homology, GoldmanOracle, SigmaHomology, SigmaStringChain, SurfaceConjClass,
    SurfaceWindow,
};
pub use torus::{
    torus_center_membership, torus_string_bracket, torus_string_homology, TorusHomology, TorusStringChain,
    TorusStringGenerator, TorusWindow,
};

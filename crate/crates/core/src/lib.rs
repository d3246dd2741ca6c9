//! Numerical phase-space calculus: midpoint quantization of symbols on
//! R^n × R^n, the twisted product they inherit, phase-space translation
//! covariance, and the spectral machinery built on top of it — truncation
//! ladders, limit operators along diverging paths, essential-spectrum
//! assembly, affiliation and compactness criteria, and divergence-form
//! operators with rough coefficients.
//!
//! Everything is dimension-generic over n = 1..=4 with dense operators on
//! tensor-product grids; the momentum lattice is tied to the position
//! lattice through the discrete Fourier transform so that the calculus is
//! exact on the class of band-limited symbols the grids can represent.

pub mod affiliate;
pub mod corpus;
pub mod divform;
pub mod error;
pub mod families;
pub mod finite;
pub mod fourier;
pub mod grid;
pub mod linalg;
pub mod localize;
pub mod path;
pub mod phase;
pub mod quantize;
pub mod spectral;
pub mod symbol;
pub mod weyl;

pub use error::{CalcError, Result};
pub use grid::GridSpec;
pub use phase::{symplectic_form, PhasePoint};
pub use symbol::{
    sample, symbol_seminorm, InterpMethod, SampledSymbol, SymbolClass, SymbolProvider,
    StructureTag,
};

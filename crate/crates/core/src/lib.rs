//! Frames, iteration-operator representations `f_{k+1} = T f_k`, and the finite models
//! (Gabor systems on `ℤ_L`, sampled shift-invariant systems) used to probe them.

pub mod error;
pub mod frames;
pub mod gabor;
pub mod hilbert;
pub mod operator_rep;
pub mod shift_invariant;

pub use error::{Error, Result};
pub use frames::{Classification, FrameBounds, FrameFamily, FrameReport, IndexConvention};
pub use hilbert::{ComplexMatrix, ComplexVector, Tolerance, C64};
pub use operator_rep::{FamilyGenerator, RepresentationDiagnostics, RepresentationOptions, Verdict};

/// Crate version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

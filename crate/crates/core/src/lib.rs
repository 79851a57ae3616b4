//! Numerical toolkit for optical homodyne tomograms of single- and two-mode
//! nonclassical states of light.
//!
//! States live in a truncated Fock basis ([`fock`]), are built by the
//! constructors in [`states`], and are observed only through their optical
//! tomograms ([`tomography`]). Normal-ordered moments are recovered from the
//! tomograms ([`moments`]) and turned into entropic, quadrature and
//! higher-order squeezing diagnostics ([`metrics`]). Every tomogram-derived
//! number has an independent Fock-space oracle next to it.
//!
//! Two-mode states come from the 50:50 beamsplitter ([`beamsplitter`]) and
//! can be decohered by amplitude decay or phase damping ([`decoherence`]).
//! [`audit`] bundles the invariant checks into a single report.

pub mod audit;
pub mod beamsplitter;
pub mod decoherence;
pub mod density;
mod error;
pub mod fock;
pub mod hermite;
pub mod linalg;
pub mod metrics;
pub mod moments;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// ½ ln(πe): the tomographic entropy of any coherent state, and the
/// threshold below which a quadrature is entropically squeezed.
pub const HALF_LN_PI_E: f64 = 1.072_364_942_924_700_1;

/// Levels reserved above the certified support of every state.
pub const TRUNCATION_BUFFER: usize = 10;

/// Maximum tail mass tolerated beyond the certified support.
pub const TAIL_TOLERANCE: f64 = 1e-10;

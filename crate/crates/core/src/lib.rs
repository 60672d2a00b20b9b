//! Numerical verification of the computable core of a nondegeneracy theorem for
//! sign-changing solutions built from towers of Aubin-Talenti bubbles: lattice
//! trigonometric sums and the kernel condition on `g`, circulant interaction
//! matrices with mode-by-mode spectral analysis, the bubble-tower approximate
//! solution with its symmetries and error field, and closed-form integral
//! identities -- all checked against independent oracles at desk scale.

pub mod bubble;
pub mod circulant;
pub mod condition;
pub mod interaction;
pub mod modes;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod series;

pub use series::{GKernel, SeriesError, DEFAULT_TOL};

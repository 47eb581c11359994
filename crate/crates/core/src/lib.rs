//! A desk-scale laboratory for the spectral theory of tensors.
//!
//! The crate computes, exactly where possible and numerically where not:
//!
//! * Euclidean distance degrees of Segre varieties (the count of singular
//!   vector tuples of a general tensor), by coefficient extraction in the
//!   Friedland-Ottaviani generating polynomial ([`poly`]);
//! * dimensions of twisted-form cohomology on products of projective
//!   spaces via Bott's formula, the Bott-Borel-Weil exchange algorithm and
//!   a Künneth assembly ([`bbw`]);
//! * the critical space of a tensor and the rank/kernel of the contraction
//!   map whose kernel measures the codimension of the span of singular
//!   vector tuples inside the critical space ([`critical`]), over a prime
//!   field or the rationals ([`exact`]);
//! * all singular vector tuples of small tensors by total-degree homotopy
//!   continuation, with certification residuals and span analysis
//!   ([`solver`]).
//!
//! Everything exact is deterministic given seeds; the parallel code paths
//! (enabled by the default `parallel` feature) produce identical results to
//! the sequential fallbacks.

pub mod bbw;
pub mod binom;
pub mod critical;
pub mod error;
pub mod exact;
pub mod format;
pub mod poly;
pub mod solver;
pub mod tensor;

pub use error::Error;
pub use format::TensorFormat;
pub use tensor::DenseTensor;

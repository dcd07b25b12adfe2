//! Simulator for thermal-state central-broadcast key distribution.
//!
//! A trusted source broadcasts a thermal beam. An eavesdropper taps the beam
//! before it reaches the legal parties' splitter; Alice and Bob receive the
//! two splitter outputs through lossy thermal channels and build correlated
//! bit strings from the intensity fluctuations they record. This crate models
//! the whole chain as Gaussian states propagating through a beamsplitter
//! network and answers the secrecy question two ways:
//!
//! * **analytically** — von Neumann entropies from symplectic spectra give
//!   the mutual information I(A:B), the conditional mutual information
//!   I(A:B|E) and the Gaussian discord D(B|A), whose joint positivity is the
//!   secrecy criterion ([`secrecy`]);
//! * **empirically** — quadrature samples drawn with the same covariance are
//!   sliced into bits, fed through plug-in Shannon estimators, and checked
//!   for thermality with g2 intensity correlations ([`empirical`]).
//!
//! [`network`] builds the protocol state both by symplectic propagation and
//! from closed-form covariance blocks, each serving as the other's oracle;
//! [`sweep`] drives parameter scans and writes reproducible CSV/gnuplot
//! artifacts; [`cli`] exposes the `thermal-sim` binary.
//!
//! See the crate examples for one runnable walk-through per capability.

pub mod cli;
pub mod empirical;
pub mod error;
pub mod gaussian;
pub mod network;
pub mod oplog;
pub mod secrecy;
pub mod sweep;

pub use error::{Error, Result};

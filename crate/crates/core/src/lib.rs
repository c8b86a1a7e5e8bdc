//! Subspace iteration for symmetric operators with a stopping rule that tracks
//! the row-wise (`2 -> inf`) error of the computed invariant subspace.
//!
//! The crate is `no_std` + `alloc`. Everything that touches files, the clock
//! or the command line lives in the `spectral-stop` companion crate.
//!
//! Layout:
//!
//! * [`matcore`]: dense and CSR matrices, norms, thin QR, Jacobi SVD and
//!   eigensolver, Procrustes alignment and subspace distances.
//! * [`subspace`]: the iteration itself, Rayleigh-Ritz extraction, the two
//!   residual criteria and the stopping-time bookkeeping.
//! * [`bounds`]: closed-form convergence rates and perturbation bounds, plus
//!   the empirical check of the tail-power assumption.
//! * [`synth`]: test matrices with a planted geometric spectrum.
//! * [`netgraph`]: graphs, normalized operators, conductance, sweep cuts.
//! * [`tasks`]: centrality ranking, CPQR spectral clustering, bipartitioning.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bounds;
mod error;
pub mod matcore;
pub mod netgraph;
pub mod subspace;
pub mod synth;
pub mod tasks;

pub use error::{Error, Result};
pub use matcore::{ColumnBlock, Mat, SmallSquare, SparseSymMatrix, Spectrum, SymOperator};

/// Seed used wherever a routine needs a deterministic random start.
pub const DEFAULT_SEED: u64 = 0x5EED;

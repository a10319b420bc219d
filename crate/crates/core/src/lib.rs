//! Frames for finite groups acting transitively on point sets.
//!
//! A finite group `G` acts transitively on a finite set `X`. The frame is the
//! Hilbert space `L²(X)` carrying the permutation representation `U_R` and the
//! canonical projection-valued measure `x ↦ P_x`. A system carries an arbitrary
//! unitary representation `U_S`. This crate builds all of these objects as
//! dense complex matrices and provides:
//!
//! - [`group`]: Cayley-table groups, subgroups, cosets, stabilisers and actions.
//! - [`linalg`]: the complex operator kernel (Kronecker products, norms, spectra).
//! - [`representations`]: permutation, regular, tensor-factor and explicit
//!   unitary representations, plus invariant-vector analysis.
//! - [`observables`]: covariant PVMs/POVMs, Born distributions, norm-1 and
//!   localisation analysis, the pulled-back POVM on `G` and its coherent states.
//! - [`relativisation`]: the relativisation maps `¥_x`, `¥^E_x`, `¥^E`, the
//!   restriction map `Γ_ω` and group twirls, with identity checks.
//! - [`harness`]: builtin spaces, verification suites and JSON reports.
//!
//! Everything is immutable after construction; all operations are pure.

#![forbid(unsafe_code)]

pub mod error;
pub mod group;
pub mod harness;
pub mod linalg;
pub mod observables;
pub mod relativisation;
pub mod representations;

pub use error::{Error, Result};

/// Global numeric tolerance for idempotency, Hermiticity, positivity and
/// identity checks.
pub const EPS: f64 = 1e-9;

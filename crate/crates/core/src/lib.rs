//! Simulation and verification of wave matrix Lindbladization.
//!
//! A Lindblad operator `L` with `‖L‖₂ = 1` is encoded in the program state
//! `|ψ⟩ = (L ⊗ I)|Γ⟩`. Each consumed copy of `ψ` drives one short step of a
//! fixed dilated Lindbladian on the system plus program registers, after
//! which the program registers are discarded. Repeating `n` times with step
//! `t/n` approximates `e^{𝓛t}` with error `O(t²/n)`.
//!
//! Modules:
//! - [`numerics`]: dense complex matrices, partial traces, `matexp`, norms, seeded randomness
//! - [`lindblad`]: exact generators and channels (the reference oracle)
//! - [`program`]: program-state encodings of `L` and `H`
//! - [`wml`]: the dilation operator, dilated generators and the step loops
//! - [`metrics`]: identity checks, channel distances, convergence fits
//! - [`suite`]: the verification and sweep drivers shared by the CLI and tests
//! - [`io`]: JSON and CSV interchange formats

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod lindblad;
pub mod metrics;
pub mod numerics;
pub mod program;
pub mod suite;
pub mod wml;

pub use error::{Error, Result};

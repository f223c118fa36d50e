//! Cell-local kernels for linear ADER-DG schemes.
//!
//! The crate builds the nodal tensor-product operators on the reference cube,
//! the AoS / AoSoA element tensor layouts, a small row-major GEMM with
//! leading-dimension support, and four implementations of the
//! Cauchy-Kowalewsky space-time predictor:
//!
//! * [`Variant::Generic`]: scalar nested loops, every Taylor iterate kept.
//! * [`Variant::Log`]: the same algorithm with derivatives done as
//!   Loop-over-GEMM on padded AoS tensors.
//! * [`Variant::SplitCk`]: dimension-split scheme that integrates in time on
//!   the fly and keeps three element tensors of scratch.
//! * [`Variant::AosoaSplitCk`]: SplitCK on the hybrid AoSoA layout with
//!   vectorized user functions.
//!
//! A minimal periodic Cartesian corrector ([`solver`]) drives end-to-end
//! convergence runs. Everything here is `no_std` + `alloc`; IO and the CLI
//! live in the companion `ader-stp` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod basis;
mod error;
pub mod layout;
pub mod microgemm;
pub mod pde;
pub mod predictor;
pub mod solver;

pub use basis::BasisOperators;
pub use error::{Error, Result};
pub use layout::{Axis, ElementTensor, LayoutKind, LayoutSpec, SliceDescriptor};
pub use microgemm::GemmSpec;
pub use pde::{Chunk, LinearPde};
pub use predictor::{PredictorOutput, ScratchArena, StepContext, StpConfig, Variant};

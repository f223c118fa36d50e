//! Seeded test data.
//!
//! Every random degree of freedom comes from SplitMix64 (Steele, Lea and
//! Flood's 64-bit mixer; state advances by `0x9E3779B97F4A7C15`, output is
//! the `30/27/31` xor-shift-multiply finalizer of the new state). A draw
//! `u` becomes `((u >> 11) * 2^-53) * 2 - 1`, uniform on `[-1, 1)`.
//! Element tensors are filled in logical `(z, y, x, s)` order, quantity
//! fastest, so another implementation of the same recipe reproduces them.

use ader_stp_core::{ElementTensor, LayoutSpec};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub struct DofRng(SplitMix64);

impl DofRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) * 2.0 - 1.0
    }

    pub fn tensor(&mut self, spec: LayoutSpec) -> ElementTensor {
        ElementTensor::from_fn(spec, |_, _, _, _| self.uniform())
    }
}

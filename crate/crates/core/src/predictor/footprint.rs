//! Scratch sizing and floating-point operation counts.
//!
//! With `v = vec_width`, `r(x) = pad(x, v)`, `T = N^3 m` (unpadded),
//! `Tp = N^3 pad(m, v)` and `P = N^2 m pad(N, v)`, the arenas are
//!
//! | variant | regions (doubles, each rounded up by `r`) |
//! |---------|-------------------------------------------|
//! | generic | `p (N+1)T`, `dF 3N T`, `flux 3T`, `grad 3T`, `tmp m`, `amp m` |
//! | log     | `p (N+1)Tp`, `dF 3N Tp`, `flux 3Tp`, `grad 3Tp`, `amp m` |
//! | splitck | `p Tp`, `ptemp Tp`, `flux Tp`, `tmp m`, `amp m` |
//! | aosoa   | `p P`, `ptemp P`, `flux P`, `qavg P`, `line m pad(N, v)`, `amp m` |
//!
//! and `scratch_bytes` is 8 times the sum.
//!
//! Flop counts cover the kernel arithmetic only: derivative contractions
//! at two flops per multiply-add over every column the GEMM touches,
//! element-wise sums and scalings including padded lanes. User function
//! internals, source evaluation and layout transposes are not counted.
//!
//! ```text
//! generic  T  (12 N^2 + 14 N)
//! log      Tp (12 N^2 + 14 N)
//! splitck  Tp (12 N^2 + 6 N + 1)
//! aosoa    4 N^2 (N^3 m + 2P) + (6 N + 1) P
//! ```

use alloc::vec;
use alloc::vec::Vec;

use super::{StpConfig, Variant};
use crate::layout::pad;

pub(crate) fn regions(variant: Variant, config: &StpConfig) -> Vec<usize> {
    let (n, m, v) = (config.order, config.quantities, config.vec_width);
    let r = |x: usize| pad(x, v);
    let t = n * n * n * m;
    let tp = n * n * n * pad(m, v);
    let p = n * n * m * pad(n, v);
    match variant {
        Variant::Generic => vec![r((n + 1) * t), r(3 * n * t), r(3 * t), r(3 * t), r(m), r(m)],
        Variant::Log => vec![r((n + 1) * tp), r(3 * n * tp), r(3 * tp), r(3 * tp), r(m)],
        Variant::SplitCk => vec![r(tp), r(tp), r(tp), r(m), r(m)],
        Variant::AosoaSplitCk => vec![r(p), r(p), r(p), r(p), r(m * pad(n, v)), r(m)],
    }
}

/// Exact byte size of the variant's [`ScratchArena`](super::ScratchArena).
pub fn scratch_bytes(variant: Variant, config: &StpConfig) -> usize {
    regions(variant, config).iter().sum::<usize>() * core::mem::size_of::<f64>()
}

/// Closed-form operation count of one predictor call.
pub fn flop_count(variant: Variant, config: &StpConfig) -> u64 {
    let (n, m, v) = (config.order as u64, config.quantities as u64, config.vec_width as u64);
    let padded = |x: u64| x.div_ceil(v) * v;
    let t = n * n * n * m;
    let tp = n * n * n * padded(m);
    let p = n * n * m * padded(n);
    match variant {
        Variant::Generic => t * (12 * n * n + 14 * n),
        Variant::Log => tp * (12 * n * n + 14 * n),
        Variant::SplitCk => tp * (12 * n * n + 6 * n + 1),
        Variant::AosoaSplitCk => 4 * n * n * (n * n * n * m + 2 * p) + (6 * n + 1) * p,
    }
}

/// Cost of one time-loop iteration of the split scheme, the unit the
/// fluctuation recomputation is compared against.
pub fn splitck_iteration_flops(config: &StpConfig) -> u64 {
    let (n, m, v) = (config.order as u64, config.quantities as u64, config.vec_width as u64);
    let tp = n * n * n * m.div_ceil(v) * v;
    tp * (12 * n + 6)
}

//! Small dense row-major GEMM with leading-dimension support.
//!
//! `C (+)= A * B` with `A: m x k`, `B: k x n`, `C: m x n`. Leading dimensions
//! may exceed the logical row length so tensor slices can be multiplied in
//! place. Only `alpha = 1` and `beta in {0, 1}` are supported.
//!
//! The kernel blocks rows and columns into register tiles but always
//! accumulates each output in ascending `k` order, starting from `+0.0`
//! (overwrite) or the old value of `C` (accumulate). Appending zero-valued
//! `k` terms therefore never changes a result bit.

use crate::{Error, Result};

const TILE_ROWS: usize = 4;
const TILE_COLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GemmSpec {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub lda: usize,
    pub ldb: usize,
    pub ldc: usize,
    pub accumulate: bool,
}

impl GemmSpec {
    /// Packed operands, overwrite mode.
    pub const fn new(m: usize, k: usize, n: usize) -> Self {
        Self {
            m,
            k,
            n,
            lda: k,
            ldb: n,
            ldc: n,
            accumulate: false,
        }
    }

    pub const fn strides(mut self, lda: usize, ldb: usize, ldc: usize) -> Self {
        self.lda = lda;
        self.ldb = ldb;
        self.ldc = ldc;
        self
    }

    pub const fn accumulate(mut self, yes: bool) -> Self {
        self.accumulate = yes;
        self
    }

    fn validate(&self, a: usize, b: usize, c: usize) -> Result<()> {
        let dims = [
            ('A', self.lda, self.k),
            ('B', self.ldb, self.n),
            ('C', self.ldc, self.n),
        ];
        for (operand, ld, min) in dims {
            if ld < min {
                return Err(Error::LeadingDimension { operand, ld, min });
            }
        }
        let need = |rows: usize, cols: usize, ld: usize| {
            if rows == 0 || cols == 0 {
                0
            } else {
                (rows - 1) * ld + cols
            }
        };
        let checks = [
            ('A', a, need(self.m, self.k, self.lda)),
            ('B', b, need(self.k, self.n, self.ldb)),
            ('C', c, need(self.m, self.n, self.ldc)),
        ];
        for (operand, len, needed) in checks {
            if len < needed {
                return Err(Error::OperandTooSmall { operand, len, needed });
            }
        }
        Ok(())
    }
}

/// `C (+)= A * B`. Entries of `C` outside the logical `m x n` block are left
/// untouched. `c` cannot alias `a` or `b`; the borrow checker enforces it.
pub fn gemm(spec: &GemmSpec, a: &[f64], b: &[f64], c: &mut [f64]) -> Result<()> {
    spec.validate(a.len(), b.len(), c.len())?;
    if spec.m == 0 || spec.n == 0 {
        return Ok(());
    }
    let mut r0 = 0;
    while r0 < spec.m {
        let rows = TILE_ROWS.min(spec.m - r0);
        let mut c0 = 0;
        while c0 < spec.n {
            let cols = TILE_COLS.min(spec.n - c0);
            if rows == TILE_ROWS && cols == TILE_COLS {
                tile_full(spec, a, b, c, r0, c0);
            } else {
                tile_edge(spec, a, b, c, r0, c0, rows, cols);
            }
            c0 += cols;
        }
        r0 += rows;
    }
    Ok(())
}

#[inline(always)]
fn tile_full(spec: &GemmSpec, a: &[f64], b: &[f64], c: &mut [f64], r0: usize, c0: usize) {
    let mut acc = [[0.0f64; TILE_COLS]; TILE_ROWS];
    if spec.accumulate {
        for (i, row) in acc.iter_mut().enumerate() {
            let off = (r0 + i) * spec.ldc + c0;
            row.copy_from_slice(&c[off..off + TILE_COLS]);
        }
    }
    for kk in 0..spec.k {
        let boff = kk * spec.ldb + c0;
        let brow: &[f64; TILE_COLS] = b[boff..boff + TILE_COLS].try_into().unwrap();
        for (i, row) in acc.iter_mut().enumerate() {
            let aik = a[(r0 + i) * spec.lda + kk];
            for j in 0..TILE_COLS {
                row[j] += aik * brow[j];
            }
        }
    }
    for (i, row) in acc.iter().enumerate() {
        let off = (r0 + i) * spec.ldc + c0;
        c[off..off + TILE_COLS].copy_from_slice(row);
    }
}

#[allow(clippy::too_many_arguments)]
fn tile_edge(spec: &GemmSpec, a: &[f64], b: &[f64], c: &mut [f64], r0: usize, c0: usize, rows: usize, cols: usize) {
    let mut acc = [[0.0f64; TILE_COLS]; TILE_ROWS];
    if spec.accumulate {
        for (i, row) in acc.iter_mut().enumerate().take(rows) {
            let off = (r0 + i) * spec.ldc + c0;
            row[..cols].copy_from_slice(&c[off..off + cols]);
        }
    }
    for kk in 0..spec.k {
        let boff = kk * spec.ldb + c0;
        let brow = &b[boff..boff + cols];
        for (i, row) in acc.iter_mut().enumerate().take(rows) {
            let aik = a[(r0 + i) * spec.lda + kk];
            for (cj, bj) in row[..cols].iter_mut().zip(brow) {
                *cj += aik * bj;
            }
        }
    }
    for (i, row) in acc.iter().enumerate().take(rows) {
        let off = (r0 + i) * spec.ldc + c0;
        c[off..off + cols].copy_from_slice(&row[..cols]);
    }
}

/// Transposed product `C^T (+)= B^T * A^T`.
///
/// `spec` describes the untransposed product `C = A * B` (`m x k` times
/// `k x n`), while `lda`, `ldb`, `ldc` are the leading dimensions of the
/// transposed buffers: `a_t` is `k x m`, `b_t` is `n x k`, `c_t` is `n x m`.
/// Accumulation order matches [`gemm`] on the untransposed operands, so the
/// two agree bit for bit after a transpose.
pub fn gemm_transposed(spec: &GemmSpec, b_t: &[f64], a_t: &[f64], c_t: &mut [f64]) -> Result<()> {
    let swapped = GemmSpec {
        m: spec.n,
        k: spec.k,
        n: spec.m,
        lda: spec.ldb,
        ldb: spec.lda,
        ldc: spec.ldc,
        accumulate: spec.accumulate,
    };
    gemm(&swapped, b_t, a_t, c_t)
}

//! Element tensor linearizations.
//!
//! Rank-4 tensors over `(z, y, x)` nodes and `m` quantities are stored in one
//! of two orders:
//!
//! * AoS: `A[z][y][x][s]`, quantity fastest and padded to `m_pad`.
//! * AoSoA: `A[z][y][s][x]`, x fastest and padded to `n_pad`; the quantity
//!   dimension is not padded. A fixed `(z, y)` gives one SoA chunk of
//!   `m` rows with stride `n_pad`.
//!
//! Padding lanes are zero when a tensor is created and every kernel keeps
//! them that way.

use alloc::alloc::{alloc_zeroed, dealloc, handle_alloc_error, Layout};
use core::fmt;
use core::ops::{Deref, DerefMut};
use core::ptr::NonNull;

use crate::{Error, Result};

/// Smallest multiple of `v` that is `>= n`.
#[inline]
pub const fn pad(n: usize, v: usize) -> usize {
    n.div_ceil(v) * v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutKind {
    Aos,
    Aosoa,
}

/// Tensor dimension, named by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Z,
    Y,
    X,
    /// Quantity.
    Q,
}

impl Axis {
    #[inline]
    const fn slot(self) -> usize {
        match self {
            Axis::Z => 0,
            Axis::Y => 1,
            Axis::X => 2,
            Axis::Q => 3,
        }
    }
}

/// Index tuple `(z, y, x, s)`, independent of storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TensorIndex {
    pub z: usize,
    pub y: usize,
    pub x: usize,
    pub s: usize,
}

impl TensorIndex {
    pub const fn new(z: usize, y: usize, x: usize, s: usize) -> Self {
        Self { z, y, x, s }
    }

    #[inline]
    fn get(&self, axis: Axis) -> usize {
        [self.z, self.y, self.x, self.s][axis.slot()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayoutSpec {
    pub kind: LayoutKind,
    pub n: usize,
    pub m: usize,
    pub vec_width: usize,
}

impl LayoutSpec {
    pub fn new(kind: LayoutKind, n: usize, m: usize, vec_width: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroNodes);
        }
        if vec_width == 0 {
            return Err(Error::InvalidParameter("vector width must be at least 1"));
        }
        Ok(Self { kind, n, m, vec_width })
    }

    pub fn aos(n: usize, m: usize, vec_width: usize) -> Result<Self> {
        Self::new(LayoutKind::Aos, n, m, vec_width)
    }

    pub fn aosoa(n: usize, m: usize, vec_width: usize) -> Result<Self> {
        Self::new(LayoutKind::Aosoa, n, m, vec_width)
    }

    /// Same extents, other layout.
    pub fn with_kind(&self, kind: LayoutKind) -> Self {
        Self { kind, ..*self }
    }

    /// Stored quantity extent.
    #[inline]
    pub fn m_pad(&self) -> usize {
        match self.kind {
            LayoutKind::Aos => pad(self.m, self.vec_width),
            LayoutKind::Aosoa => self.m,
        }
    }

    /// Stored x extent.
    #[inline]
    pub fn n_pad(&self) -> usize {
        match self.kind {
            LayoutKind::Aos => self.n,
            LayoutKind::Aosoa => pad(self.n, self.vec_width),
        }
    }

    #[inline]
    pub fn alignment_bytes(&self) -> usize {
        self.vec_width * core::mem::size_of::<f64>()
    }

    /// Buffer length in doubles.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n_pad() * self.m_pad()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of logical (non-padding) entries.
    #[inline]
    pub fn logical_len(&self) -> usize {
        self.n * self.n * self.n * self.m
    }

    /// Storage order, slowest to fastest.
    pub fn axis_order(&self) -> [Axis; 4] {
        match self.kind {
            LayoutKind::Aos => [Axis::Z, Axis::Y, Axis::X, Axis::Q],
            LayoutKind::Aosoa => [Axis::Z, Axis::Y, Axis::Q, Axis::X],
        }
    }

    /// Logical extent along `axis`.
    #[inline]
    pub fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::Q => self.m,
            _ => self.n,
        }
    }

    /// Stored extent along `axis` (padding included).
    #[inline]
    pub fn stored_extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::Q => self.m_pad(),
            Axis::X => self.n_pad(),
            _ => self.n,
        }
    }

    /// Element distance between consecutive indices along `axis`.
    pub fn stride(&self, axis: Axis) -> usize {
        let order = self.axis_order();
        let pos = order.iter().position(|&a| a == axis).unwrap();
        order[pos + 1..].iter().map(|&a| self.stored_extent(a)).product()
    }

    /// Linear offset of a logical index.
    #[inline]
    pub fn index(&self, z: usize, y: usize, x: usize, s: usize) -> usize {
        let n = self.n;
        match self.kind {
            LayoutKind::Aos => ((z * n + y) * n + x) * self.m_pad() + s,
            LayoutKind::Aosoa => ((z * n + y) * self.m + s) * self.n_pad() + x,
        }
    }

    /// Inverse of [`index`](Self::index); `None` for padding offsets.
    pub fn logical_index(&self, offset: usize) -> Option<TensorIndex> {
        if offset >= self.len() {
            return None;
        }
        let n = self.n;
        match self.kind {
            LayoutKind::Aos => {
                let mp = self.m_pad();
                let s = offset % mp;
                let node = offset / mp;
                (s < self.m).then(|| TensorIndex::new(node / (n * n), (node / n) % n, node % n, s))
            }
            LayoutKind::Aosoa => {
                let np = self.n_pad();
                let x = offset % np;
                let row = offset / np;
                let s = row % self.m;
                let zy = row / self.m;
                (x < n).then(|| TensorIndex::new(zy / n, zy % n, x, s))
            }
        }
    }

    fn check_compatible(&self, other: &LayoutSpec) -> Result<()> {
        if self.n != other.n || self.m != other.m || self.vec_width != other.vec_width {
            return Err(Error::LayoutMismatch("n, m and vec_width must agree"));
        }
        Ok(())
    }

    fn check_fixed(&self, idx: &TensorIndex, axes: &[Axis]) -> Result<()> {
        for &a in axes {
            let i = idx.get(a);
            let extent = self.extent(a);
            if i >= extent {
                return Err(Error::IndexOutOfRange { index: i, extent });
            }
        }
        Ok(())
    }
}

/// Heap buffer of doubles with a caller-chosen alignment, zero-initialised.
pub struct AlignedBuf {
    ptr: NonNull<f64>,
    len: usize,
    align: usize,
}

// SAFETY: AlignedBuf uniquely owns its allocation, like Vec<f64>.
unsafe impl Send for AlignedBuf {}
// SAFETY: shared access only hands out &[f64].
unsafe impl Sync for AlignedBuf {}

impl AlignedBuf {
    pub fn zeroed(len: usize, align_bytes: usize) -> Self {
        let align = align_bytes.max(core::mem::align_of::<f64>()).next_power_of_two();
        if len == 0 {
            return Self {
                ptr: NonNull::dangling(),
                len,
                align,
            };
        }
        let layout = Self::layout(len, align);
        // SAFETY: layout has non-zero size.
        let raw = unsafe { alloc_zeroed(layout) } as *mut f64;
        let ptr = NonNull::new(raw).unwrap_or_else(|| handle_alloc_error(layout));
        Self { ptr, len, align }
    }

    fn layout(len: usize, align: usize) -> Layout {
        Layout::from_size_align(len * core::mem::size_of::<f64>(), align).expect("buffer size overflows")
    }

    #[inline]
    pub fn align(&self) -> usize {
        self.align
    }
}

impl Drop for AlignedBuf {
    fn drop(&mut self) {
        if self.len != 0 {
            // SAFETY: allocated in `zeroed` with this exact layout.
            unsafe { dealloc(self.ptr.as_ptr() as *mut u8, Self::layout(self.len, self.align)) }
        }
    }
}

impl Deref for AlignedBuf {
    type Target = [f64];
    #[inline]
    fn deref(&self) -> &[f64] {
        // SAFETY: ptr is valid for len initialised doubles (or dangling with len 0).
        unsafe { core::slice::from_raw_parts(self.ptr.as_ptr(), self.len) }
    }
}

impl DerefMut for AlignedBuf {
    #[inline]
    fn deref_mut(&mut self) -> &mut [f64] {
        // SAFETY: unique ownership, see Deref.
        unsafe { core::slice::from_raw_parts_mut(self.ptr.as_ptr(), self.len) }
    }
}

impl Clone for AlignedBuf {
    fn clone(&self) -> Self {
        let mut out = Self::zeroed(self.len, self.align);
        out.copy_from_slice(self);
        out
    }
}

impl fmt::Debug for AlignedBuf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlignedBuf")
            .field("len", &self.len)
            .field("align", &self.align)
            .finish()
    }
}

/// Per-element degree-of-freedom tensor in a padded, aligned buffer.
#[derive(Debug, Clone)]
pub struct ElementTensor {
    spec: LayoutSpec,
    data: AlignedBuf,
}

impl ElementTensor {
    pub fn zeros(spec: LayoutSpec) -> Self {
        Self {
            data: AlignedBuf::zeroed(spec.len(), spec.alignment_bytes()),
            spec,
        }
    }

    /// Fills every logical entry from `f(z, y, x, s)`.
    pub fn from_fn(spec: LayoutSpec, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(spec);
        for z in 0..spec.n {
            for y in 0..spec.n {
                for x in 0..spec.n {
                    for s in 0..spec.m {
                        t.data[spec.index(z, y, x, s)] = f(z, y, x, s);
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn spec(&self) -> &LayoutSpec {
        &self.spec
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, z: usize, y: usize, x: usize, s: usize) -> f64 {
        self.data[self.spec.index(z, y, x, s)]
    }

    #[inline]
    pub fn set(&mut self, z: usize, y: usize, x: usize, s: usize, v: f64) {
        let i = self.spec.index(z, y, x, s);
        self.data[i] = v;
    }

    /// `true` when every padding lane reads exactly `+0.0`.
    pub fn padding_is_zero(&self) -> bool {
        self.data
            .iter()
            .enumerate()
            .all(|(i, v)| self.spec.logical_index(i).is_some() || v.to_bits() == 0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn fill(&mut self, v: f64) {
        let spec = self.spec;
        for z in 0..spec.n {
            for y in 0..spec.n {
                for x in 0..spec.n {
                    for s in 0..spec.m {
                        self.data[spec.index(z, y, x, s)] = v;
                    }
                }
            }
        }
    }

    /// Visits every logical entry in `(z, y, x, s)` order.
    pub fn for_each_logical(&self, mut f: impl FnMut(TensorIndex, f64)) {
        let spec = self.spec;
        for z in 0..spec.n {
            for y in 0..spec.n {
                for x in 0..spec.n {
                    for s in 0..spec.m {
                        f(TensorIndex::new(z, y, x, s), self.data[spec.index(z, y, x, s)]);
                    }
                }
            }
        }
    }

    /// Largest absolute difference over logical entries, any layouts.
    pub fn max_abs_diff(&self, other: &ElementTensor) -> Result<f64> {
        if self.spec.n != other.spec.n || self.spec.m != other.spec.m {
            return Err(Error::LayoutMismatch("extents differ"));
        }
        let mut worst = 0.0f64;
        self.for_each_logical(|i, v| {
            let d = libm::fabs(v - other.get(i.z, i.y, i.x, i.s));
            if d > worst || d.is_nan() {
                worst = if d.is_nan() { f64::INFINITY } else { d };
            }
        });
        Ok(worst)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v)))
    }
}

/// Writes `src` into `dst` with a value-preserving index remap.
/// Padding lanes of `dst` are zeroed.
pub fn convert_into(src: &ElementTensor, dst: &mut ElementTensor) -> Result<()> {
    src.spec.check_compatible(&dst.spec)?;
    convert_raw(&src.spec, &src.data, &dst.spec, &mut dst.data);
    Ok(())
}

/// Buffer-level form of [`convert_into`]; specs must already agree on
/// `n`, `m` and `vec_width`.
pub(crate) fn convert_raw(ss: &LayoutSpec, src_data: &[f64], ds: &LayoutSpec, dst_data: &mut [f64]) {
    debug_assert!(ss.check_compatible(ds).is_ok());
    if ss.kind == ds.kind {
        dst_data[..ss.len()].copy_from_slice(&src_data[..ss.len()]);
        return;
    }
    let n = ss.n;
    let m = ss.m;
    match ds.kind {
        LayoutKind::Aosoa => {
            let np = ds.n_pad();
            let mp = ss.m_pad();
            for zy in 0..n * n {
                let line = &mut dst_data[zy * m * np..(zy + 1) * m * np];
                let block = &src_data[zy * n * mp..(zy + 1) * n * mp];
                for s in 0..m {
                    let row = &mut line[s * np..(s + 1) * np];
                    for x in 0..n {
                        row[x] = block[x * mp + s];
                    }
                    row[n..].fill(0.0);
                }
            }
        }
        LayoutKind::Aos => {
            let np = ss.n_pad();
            let mp = ds.m_pad();
            for zy in 0..n * n {
                let line = &src_data[zy * m * np..(zy + 1) * m * np];
                let block = &mut dst_data[zy * n * mp..(zy + 1) * n * mp];
                for x in 0..n {
                    let node = &mut block[x * mp..(x + 1) * mp];
                    for s in 0..m {
                        node[s] = line[s * np + x];
                    }
                    node[m..].fill(0.0);
                }
            }
        }
    }
}

pub fn aos_to_aosoa(src: &ElementTensor) -> Result<ElementTensor> {
    if src.spec.kind != LayoutKind::Aos {
        return Err(Error::LayoutMismatch("source must be AoS"));
    }
    let mut dst = ElementTensor::zeros(src.spec.with_kind(LayoutKind::Aosoa));
    convert_into(src, &mut dst)?;
    Ok(dst)
}

pub fn aosoa_to_aos(src: &ElementTensor) -> Result<ElementTensor> {
    if src.spec.kind != LayoutKind::Aosoa {
        return Err(Error::LayoutMismatch("source must be AoSoA"));
    }
    let mut dst = ElementTensor::zeros(src.spec.with_kind(LayoutKind::Aos));
    convert_into(src, &mut dst)?;
    Ok(dst)
}

/// A strided matrix view into a tensor buffer: element `(r, c)` lives at
/// `offset + r * slice_stride + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceDescriptor {
    pub offset: usize,
    pub slice_stride: usize,
    pub rows: usize,
    pub cols: usize,
}

impl SliceDescriptor {
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> usize {
        self.offset + r * self.slice_stride + c
    }

    /// One past the last addressed element.
    pub fn end(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            self.offset
        } else {
            self.at(self.rows - 1, self.cols - 1) + 1
        }
    }

    /// Copies the addressed elements row by row.
    pub fn gather(&self, data: &[f64]) -> alloc::vec::Vec<f64> {
        let mut out = alloc::vec::Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            out.extend_from_slice(&data[self.at(r, 0)..self.at(r, 0) + self.cols]);
        }
        out
    }
}

/// Matrix slice with `rows` varying along one axis and columns along the
/// layout's unit-stride axis; the two other axes are fixed by `fixed`.
///
/// `cols` is the logical extent of the fastest axis; padding lanes follow
/// each row and may be included by callers up to `slice_stride`.
pub fn slice(spec: &LayoutSpec, rows: Axis, cols: Axis, fixed: TensorIndex) -> Result<SliceDescriptor> {
    let order = spec.axis_order();
    if cols != order[3] {
        return Err(Error::NonUnitStride(cols));
    }
    if rows == cols {
        return Err(Error::InvalidSlice("row and column axes coincide"));
    }
    let mut others = [Axis::Z; 2];
    let mut count = 0;
    for &a in &order {
        if a != rows && a != cols {
            if count == 2 {
                break;
            }
            others[count] = a;
            count += 1;
        }
    }
    spec.check_fixed(&fixed, &others)?;
    let offset = others.iter().map(|&a| fixed.get(a) * spec.stride(a)).sum();
    let desc = SliceDescriptor {
        offset,
        slice_stride: spec.stride(rows),
        rows: spec.extent(rows),
        cols: spec.extent(cols),
    };
    debug_assert!(desc.end() <= spec.len());
    Ok(desc)
}

/// Matrix slice whose columns fuse the two fastest axes of the layout.
///
/// AoS fuses `(x, s)` into `n * m_pad` columns (quantity padding is carried
/// inside the fused row); AoSoA fuses `(s, x)` into `m * n_pad` columns.
/// `rows` must be `Z` or `Y`, the other one is fixed by `fixed`.
pub fn fused_slice(spec: &LayoutSpec, rows: Axis, fuse: (Axis, Axis), fixed: TensorIndex) -> Result<SliceDescriptor> {
    let order = spec.axis_order();
    let fastest = [order[2], order[3]];
    if !(fastest.contains(&fuse.0) && fastest.contains(&fuse.1) && fuse.0 != fuse.1) {
        return Err(Error::NonAdjacentFusion(fuse.0, fuse.1));
    }
    if rows != Axis::Z && rows != Axis::Y {
        return Err(Error::InvalidSlice("row axis must be slower than the fused axes"));
    }
    let other = if rows == Axis::Z { Axis::Y } else { Axis::Z };
    spec.check_fixed(&fixed, &[other])?;
    let desc = SliceDescriptor {
        offset: fixed.get(other) * spec.stride(other),
        slice_stride: spec.stride(rows),
        rows: spec.n,
        cols: spec.stored_extent(order[2]) * spec.stored_extent(order[3]),
    };
    debug_assert!(desc.end() <= spec.len());
    Ok(desc)
}

/// The whole tensor as `n` rows along z, all faster axes fused.
pub fn z_planes(spec: &LayoutSpec) -> SliceDescriptor {
    let stride = spec.stride(Axis::Z);
    SliceDescriptor {
        offset: 0,
        slice_stride: stride,
        rows: spec.n,
        cols: stride,
    }
}

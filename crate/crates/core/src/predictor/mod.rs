//! Cauchy-Kowalewsky space-time predictor.
//!
//! Every variant computes, for one element,
//!
//! ```text
//! qavg    = sum_{o=0}^{N-1} dt^(o+1)/(o+1)! p_o
//! favg[d] = sum_{o=0}^{N-1} dt^(o+1)/(o+1)! inv_h (D_d F_d(p_o) + B_d D_d p_o)
//! ```
//!
//! with `p_0 = q` and
//! `p_{o+1} = inv_h sum_d (D_d F_d(p_o) + B_d D_d p_o) + sum_s P_s S_s^(o)(t)`.
//! `favg[d]` is the time-integrated fluctuation along `d`, so
//! `sum_d favg[d]` is the volume contribution of one corrector step. Face
//! arrays hold the extrapolation of `qavg` to the six faces and the normal
//! physical flux of that trace.
//!
//! Kernels write into a caller-provided [`PredictorOutput`] and only use the
//! buffers of a [`ScratchArena`] built for the same variant and config; they
//! never allocate.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::basis::BasisOperators;
use crate::layout::{AlignedBuf, ElementTensor, LayoutKind, LayoutSpec};
use crate::pde::LinearPde;
use crate::{Error, Result};

mod aosoa;
pub mod footprint;
mod generic;
mod log;
mod splitck;

pub use aosoa::stp_splitck_aosoa;
pub use footprint::{flop_count, scratch_bytes};
pub use generic::stp_generic;
pub use log::stp_log;
pub use splitck::stp_splitck;

/// Guard for [`materialize_volume_operator`].
pub const MAX_DENSE_DOFS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Generic,
    Log,
    SplitCk,
    AosoaSplitCk,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Generic, Variant::Log, Variant::SplitCk, Variant::AosoaSplitCk];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Generic => "generic",
            Variant::Log => "log",
            Variant::SplitCk => "splitck",
            Variant::AosoaSplitCk => "aosoa",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Variant::Generic),
            "log" => Ok(Variant::Log),
            "splitck" => Ok(Variant::SplitCk),
            "aosoa" | "aosoa-splitck" => Ok(Variant::AosoaSplitCk),
            _ => Err(Error::InvalidParameter("unknown predictor variant")),
        }
    }
}

/// Order, quantity count and SIMD width of one predictor instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StpConfig {
    pub order: usize,
    pub quantities: usize,
    pub vec_width: usize,
}

impl StpConfig {
    pub fn new(order: usize, quantities: usize, vec_width: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroNodes);
        }
        if vec_width == 0 {
            return Err(Error::InvalidParameter("vector width must be at least 1"));
        }
        Ok(Self {
            order,
            quantities,
            vec_width,
        })
    }

    pub fn aos(&self) -> LayoutSpec {
        LayoutSpec {
            kind: LayoutKind::Aos,
            n: self.order,
            m: self.quantities,
            vec_width: self.vec_width,
        }
    }

    pub fn aosoa(&self) -> LayoutSpec {
        self.aos().with_kind(LayoutKind::Aosoa)
    }
}

/// Time-step data shared by all elements of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContext {
    /// Start of the step; sources are expanded around it.
    pub t: f64,
    pub dt: f64,
    /// Reference-to-physical derivative scaling, `1 / h`.
    pub inv_h: f64,
}

impl StepContext {
    pub fn new(t: f64, dt: f64, inv_h: f64) -> Result<Self> {
        let ctx = Self { t, dt, inv_h };
        ctx.validate()?;
        Ok(ctx)
    }

    /// Reference element, `t = 0`.
    pub fn reference(dt: f64) -> Self {
        Self { t: 0.0, dt, inv_h: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter("dt must be positive and finite"));
        }
        if !(self.inv_h > 0.0) || !self.inv_h.is_finite() || !self.t.is_finite() {
            return Err(Error::InvalidParameter("inv_h must be positive and finite"));
        }
        Ok(())
    }

    /// `dt^(o+1) / (o+1)!` for `o = 0, 1, ...`.
    pub(crate) fn taylor_coeffs(&self) -> impl Iterator<Item = f64> {
        let dt = self.dt;
        (0..).scan(1.0, move |c, o: usize| {
            *c *= dt / (o + 1) as f64;
            Some(*c)
        })
    }
}

/// Time-averaged element data handed to the corrector. All tensors are AoS.
#[derive(Debug, Clone)]
pub struct PredictorOutput {
    pub qavg: ElementTensor,
    pub favg: [ElementTensor; 3],
    /// Faces `x-, x+, y-, y+, z-, z+`. Each array is `N * N * m`, quantity
    /// fastest, the two tangential axes in `(z, y, x)` order minus the normal.
    pub face_q: [Vec<f64>; 6],
    pub face_f: [Vec<f64>; 6],
}

impl PredictorOutput {
    pub fn new(config: &StpConfig) -> Self {
        let spec = config.aos();
        let face = config.order * config.order * config.quantities;
        Self {
            qavg: ElementTensor::zeros(spec),
            favg: core::array::from_fn(|_| ElementTensor::zeros(spec)),
            face_q: core::array::from_fn(|_| vec![0.0; face]),
            face_f: core::array::from_fn(|_| vec![0.0; face]),
        }
    }

    pub fn config(&self) -> StpConfig {
        let s = self.qavg.spec();
        StpConfig {
            order: s.n,
            quantities: s.m,
            vec_width: s.vec_width,
        }
    }

    /// Largest absolute difference over every tensor and face array.
    pub fn max_abs_diff(&self, other: &PredictorOutput) -> Result<f64> {
        let mut worst = self.qavg.max_abs_diff(&other.qavg)?;
        for d in 0..3 {
            worst = worst.max(self.favg[d].max_abs_diff(&other.favg[d])?);
        }
        for f in 0..6 {
            for (a, b) in self.face_q[f].iter().zip(&other.face_q[f]) {
                worst = worst.max(nan_max(a - b));
            }
            for (a, b) in self.face_f[f].iter().zip(&other.face_f[f]) {
                worst = worst.max(nan_max(a - b));
            }
        }
        Ok(worst)
    }

    /// Largest magnitude over every tensor and face array.
    pub fn max_abs(&self) -> f64 {
        let mut worst = self.qavg.max_abs();
        for t in &self.favg {
            worst = worst.max(t.max_abs());
        }
        for f in self.face_q.iter().chain(&self.face_f) {
            for v in f {
                worst = worst.max(libm::fabs(*v));
            }
        }
        worst
    }

    pub fn padding_is_zero(&self) -> bool {
        self.qavg.padding_is_zero() && self.favg.iter().all(|t| t.padding_is_zero())
    }
}

fn nan_max(d: f64) -> f64 {
    if d.is_nan() {
        f64::INFINITY
    } else {
        libm::fabs(d)
    }
}

/// Pre-sized aligned scratch for one variant. Regions are laid out back to
/// back, each rounded up to a multiple of `vec_width` doubles.
#[derive(Debug, Clone)]
pub struct ScratchArena {
    variant: Variant,
    config: StpConfig,
    regions: Vec<usize>,
    buf: AlignedBuf,
}

impl ScratchArena {
    pub fn new(variant: Variant, config: StpConfig) -> Self {
        let regions = footprint::regions(variant, &config);
        let total = regions.iter().sum();
        Self {
            variant,
            config,
            regions,
            buf: AlignedBuf::zeroed(total, config.vec_width * 8),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn config(&self) -> StpConfig {
        self.config
    }

    pub fn bytes(&self) -> usize {
        self.buf.len() * core::mem::size_of::<f64>()
    }

    fn check(&self, variant: Variant, config: &StpConfig) -> Result<()> {
        if self.variant != variant || self.config != *config {
            return Err(Error::ArenaMismatch);
        }
        Ok(())
    }

    fn split<const K: usize>(&mut self) -> [&mut [f64]; K] {
        debug_assert_eq!(self.regions.len(), K);
        let mut rest: &mut [f64] = &mut self.buf;
        let regions = &self.regions;
        core::array::from_fn(|i| {
            let (head, tail) = core::mem::take(&mut rest).split_at_mut(regions[i]);
            rest = tail;
            head
        })
    }
}

/// Runs one of the four kernels.
pub fn predict(
    variant: Variant,
    q: &ElementTensor,
    pde: &(impl LinearPde + ?Sized),
    ctx: &StepContext,
    ops: &BasisOperators,
    arena: &mut ScratchArena,
    out: &mut PredictorOutput,
) -> Result<()> {
    match variant {
        Variant::Generic => stp_generic(q, pde, ctx, ops, arena, out),
        Variant::Log => stp_log(q, pde, ctx, ops, arena, out),
        Variant::SplitCk => stp_splitck(q, pde, ctx, ops, arena, out),
        Variant::AosoaSplitCk => stp_splitck_aosoa(q, pde, ctx, ops, arena, out),
    }
}

/// Shared argument checks; returns the config of the call.
fn validate(
    variant: Variant,
    q: &ElementTensor,
    pde: &(impl LinearPde + ?Sized),
    ctx: &StepContext,
    ops: &BasisOperators,
    arena: &ScratchArena,
    out: &PredictorOutput,
) -> Result<StpConfig> {
    ctx.validate()?;
    let spec = *q.spec();
    if spec.kind != LayoutKind::Aos {
        return Err(Error::LayoutMismatch("predictor input must be AoS"));
    }
    let config = StpConfig {
        order: spec.n,
        quantities: spec.m,
        vec_width: spec.vec_width,
    };
    if pde.quantities() != config.quantities {
        return Err(Error::ShapeMismatch("pde quantity count differs from the tensor"));
    }
    if ops.order() != config.order {
        return Err(Error::ShapeMismatch("basis order differs from the tensor"));
    }
    if out.config() != config || *out.qavg.spec() != spec {
        return Err(Error::ShapeMismatch("output sized for another config"));
    }
    arena.check(variant, &config)?;
    if !q.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(config)
}

/// Adds `sum_s P_s(k) S_s^(order)(t)` to every node of an AoS-ordered
/// buffer with node stride `ms`.
fn add_sources_aos(
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    order: usize,
    t: f64,
    ms: usize,
    amp: &mut [f64],
    target: &mut [f64],
) {
    let n = ops.order();
    let m = pde.quantities();
    for src in 0..pde.source_count() {
        pde.source_derivative(order, t, src, &mut amp[..m]);
        let pos = pde.source_position(src);
        for z in 0..n {
            let bz = ops.lagrange_value(z, pos[2]) * ops.inv_weights[z];
            for y in 0..n {
                let by = bz * ops.lagrange_value(y, pos[1]) * ops.inv_weights[y];
                for x in 0..n {
                    let w = by * ops.lagrange_value(x, pos[0]) * ops.inv_weights[x];
                    let node = &mut target[((z * n + y) * n + x) * ms..][..m];
                    for (v, a) in node.iter_mut().zip(&amp[..m]) {
                        *v += w * a;
                    }
                }
            }
        }
    }
}

/// Extrapolates `qavg` to the six faces and evaluates the normal flux of
/// each trace.
pub fn extrapolate_faces(
    out: &mut PredictorOutput,
    ops: &BasisOperators,
    pde: &(impl LinearPde + ?Sized),
) -> Result<()> {
    let spec = *out.qavg.spec();
    let (n, m) = (spec.n, spec.m);
    if ops.order() != n || pde.quantities() != m {
        return Err(Error::ShapeMismatch("faces need matching basis and pde"));
    }
    let q = out.qavg.as_slice();
    for f in 0..6 {
        let d = f / 2;
        let coeff = if f % 2 == 0 { &ops.face_left } else { &ops.face_right };
        let face = &mut out.face_q[f];
        face.fill(0.0);
        for a in 0..n {
            for b in 0..n {
                let dst = &mut face[(a * n + b) * m..][..m];
                for (k, c) in coeff.iter().enumerate() {
                    let (z, y, x) = match d {
                        0 => (a, b, k),
                        1 => (a, k, b),
                        _ => (k, a, b),
                    };
                    let src = &q[spec.index(z, y, x, 0)..][..m];
                    for (v, s) in dst.iter_mut().zip(src) {
                        *v += c * s;
                    }
                }
            }
        }
        let (fq, ff) = (&out.face_q[f], &mut out.face_f[f]);
        for node in 0..n * n {
            pde.flux(&fq[node * m..][..m], d, &mut ff[node * m..][..m]);
        }
    }
    Ok(())
}

/// Applies one spatial operator pass `inv_h = 1`,
/// `out = sum_d (D_d F_d(inp) + B_d D_d inp)`, on unpadded AoS vectors
/// (`((z N + y) N + x) m + s`). Scratch holds `2 N^3 m + m` doubles.
pub(crate) fn volume_apply(
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    inp: &[f64],
    out: &mut [f64],
    scratch: &mut [f64],
) {
    let n = ops.order();
    let m = pde.quantities();
    let t = n * n * n * m;
    let (flux, rest) = scratch.split_at_mut(t);
    let (grad, tmp) = rest.split_at_mut(t);
    out[..t].fill(0.0);
    for d in 0..3 {
        for node in 0..n * n * n {
            pde.flux(&inp[node * m..][..m], d, &mut flux[node * m..][..m]);
        }
        generic::derive_add(ops, m, m, d, flux, out);
        grad[..t].fill(0.0);
        generic::derive_add(ops, m, m, d, inp, grad);
        for node in 0..n * n * n {
            pde.ncp(&grad[node * m..][..m], d, &mut tmp[..m]);
            for (o, v) in out[node * m..][..m].iter_mut().zip(&tmp[..m]) {
                *o += v;
            }
        }
    }
}

/// Dense `(N^3 m) x (N^3 m)` row-major matrix of the reference-element
/// operator `q -> sum_d (D_d F_d(q) + B_d D_d q)`, built column by column
/// from unit vectors. Unpadded AoS ordering.
pub fn materialize_volume_operator(pde: &(impl LinearPde + ?Sized), ops: &BasisOperators) -> Result<Vec<f64>> {
    let n = ops.order();
    let m = pde.quantities();
    let dofs = n * n * n * m;
    if dofs > MAX_DENSE_DOFS {
        return Err(Error::OperatorTooLarge(dofs));
    }
    let mut v = vec![0.0; dofs * dofs];
    let mut e = vec![0.0; dofs];
    let mut col = vec![0.0; dofs];
    let mut scratch = vec![0.0; 2 * dofs + m];
    for j in 0..dofs {
        e.fill(0.0);
        e[j] = 1.0;
        volume_apply(pde, ops, &e, &mut col, &mut scratch);
        for (i, c) in col.iter().enumerate() {
            v[i * dofs + j] = *c;
        }
    }
    Ok(v)
}

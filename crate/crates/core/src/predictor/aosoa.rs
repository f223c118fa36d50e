//! SplitCK on the hybrid AoSoA layout.
//!
//! The AoS input is transposed on entry and the outputs are transposed back
//! on exit. x-derivatives contract the whole tensor as one transposed GEMM
//! against `D^T`; y- and z-derivatives use fused `(s, x)` slices. User
//! functions see one padded x-line per `(z, y)` as an SoA chunk.

use super::{extrapolate_faces, validate, PredictorOutput, ScratchArena, StepContext, Variant};
use crate::basis::BasisOperators;
use crate::layout::{convert_raw, fused_slice, z_planes, Axis, ElementTensor, LayoutSpec, TensorIndex};
use crate::microgemm::{gemm, gemm_transposed, GemmSpec};
use crate::pde::{Chunk, LinearPde};
use crate::Result;

fn derive(
    spec: &LayoutSpec,
    ops: &BasisOperators,
    d: usize,
    inp: &[f64],
    out: &mut [f64],
    accumulate: bool,
) -> Result<()> {
    let n = spec.n;
    match d {
        0 => {
            // Out = In * D^T over all (z, y, s) rows; padding columns untouched.
            let np = spec.n_pad();
            let rows = n * n * spec.m;
            let g = GemmSpec::new(n, n, rows).strides(n, np, np).accumulate(accumulate);
            gemm_transposed(&g, inp, &ops.dudx_t, out)
        }
        1 => {
            for z in 0..n {
                let desc = fused_slice(spec, Axis::Y, (Axis::Q, Axis::X), TensorIndex::new(z, 0, 0, 0))?;
                let g = GemmSpec::new(n, n, desc.cols)
                    .strides(n, desc.slice_stride, desc.slice_stride)
                    .accumulate(accumulate);
                gemm(&g, &ops.dudx, &inp[desc.offset..], &mut out[desc.offset..])?;
            }
            Ok(())
        }
        _ => {
            let desc = z_planes(spec);
            let g = GemmSpec::new(n, n, desc.cols)
                .strides(n, desc.slice_stride, desc.slice_stride)
                .accumulate(accumulate);
            gemm(&g, &ops.dudx, inp, out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn fluctuation(
    spec: &LayoutSpec,
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    inv_h: f64,
    dims: core::ops::Range<usize>,
    p: &[f64],
    flux: &mut [f64],
    line: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    let n = spec.n;
    let np = spec.n_pad();
    let lane = spec.m * np;
    let chunk = Chunk { len: np, stride: np };
    let first = dims.start;
    for d in dims {
        for zy in 0..n * n {
            debug_assert_eq!((zy * lane) % spec.vec_width, 0);
            pde.flux_vect(&p[zy * lane..][..lane], d, chunk, &mut flux[zy * lane..][..lane]);
        }
        derive(spec, ops, d, flux, out, d != first)?;
        derive(spec, ops, d, p, flux, false)?;
        for zy in 0..n * n {
            pde.ncp_vect(&flux[zy * lane..][..lane], d, chunk, &mut line[..lane]);
            for (v, x) in out[zy * lane..][..lane].iter_mut().zip(&line[..lane]) {
                *v += x;
            }
        }
    }
    for v in out.iter_mut() {
        *v *= inv_h;
    }
    Ok(())
}

fn add_sources(
    spec: &LayoutSpec,
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    order: usize,
    t: f64,
    amp: &mut [f64],
    target: &mut [f64],
) {
    let (n, m) = (spec.n, spec.m);
    for src in 0..pde.source_count() {
        pde.source_derivative(order, t, src, &mut amp[..m]);
        let pos = pde.source_position(src);
        for z in 0..n {
            let bz = ops.lagrange_value(z, pos[2]) * ops.inv_weights[z];
            for y in 0..n {
                let by = bz * ops.lagrange_value(y, pos[1]) * ops.inv_weights[y];
                for x in 0..n {
                    let w = by * ops.lagrange_value(x, pos[0]) * ops.inv_weights[x];
                    for (s, a) in amp[..m].iter().enumerate() {
                        target[spec.index(z, y, x, s)] += w * a;
                    }
                }
            }
        }
    }
}

pub fn stp_splitck_aosoa(
    q: &ElementTensor,
    pde: &(impl LinearPde + ?Sized),
    ctx: &StepContext,
    ops: &BasisOperators,
    arena: &mut ScratchArena,
    out: &mut PredictorOutput,
) -> Result<()> {
    let config = validate(Variant::AosoaSplitCk, q, pde, ctx, ops, arena, out)?;
    let aos = *q.spec();
    let spec = config.aosoa();
    let n = config.order;
    let len = spec.len();
    let [p_buf, ptemp_buf, flux_buf, qavg_buf, line, amp] = arena.split::<6>();
    let (mut p, mut ptemp) = (&mut p_buf[..len], &mut ptemp_buf[..len]);
    let flux = &mut flux_buf[..len];
    let qavg = &mut qavg_buf[..len];

    convert_raw(&aos, q.as_slice(), &spec, p);
    let mut coeffs = ctx.taylor_coeffs();
    let c0 = coeffs.next().unwrap_or(ctx.dt);
    for (v, x) in qavg.iter_mut().zip(p.iter()) {
        *v = x * c0;
    }
    for (o, c) in coeffs.take(n - 1).enumerate() {
        fluctuation(&spec, pde, ops, ctx.inv_h, 0..3, p, flux, line, ptemp)?;
        add_sources(&spec, pde, ops, o, ctx.t, amp, ptemp);
        for (v, x) in qavg.iter_mut().zip(ptemp.iter()) {
            *v += x * c;
        }
        core::mem::swap(&mut p, &mut ptemp);
    }
    convert_raw(&spec, qavg, &aos, out.qavg.as_mut_slice());

    for d in 0..3 {
        fluctuation(&spec, pde, ops, ctx.inv_h, d..d + 1, qavg, flux, line, ptemp)?;
        convert_raw(&spec, ptemp, &aos, out.favg[d].as_mut_slice());
    }
    extrapolate_faces(out, ops, pde)
}

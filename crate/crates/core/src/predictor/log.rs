//! Loop-over-GEMM kernel on padded AoS tensors.

use super::{add_sources_aos, extrapolate_faces, validate, PredictorOutput, ScratchArena, StepContext, Variant};
use crate::basis::BasisOperators;
use crate::layout::{slice, Axis, ElementTensor, LayoutSpec, TensorIndex};
use crate::microgemm::{gemm, GemmSpec};
use crate::pde::LinearPde;
use crate::Result;

/// `out (+)= D_d inp` on a padded AoS tensor as one small GEMM per matrix
/// slice. Columns span the padded quantity row, so zero lanes stay zero.
pub(crate) fn log_derive(
    spec: &LayoutSpec,
    ops: &BasisOperators,
    d: usize,
    inp: &[f64],
    out: &mut [f64],
    accumulate: bool,
) -> Result<()> {
    let n = spec.n;
    let mp = spec.m_pad();
    let rows = [Axis::X, Axis::Y, Axis::Z][d];
    for a in 0..n {
        for b in 0..n {
            let fixed = match d {
                0 => TensorIndex::new(a, b, 0, 0),
                1 => TensorIndex::new(a, 0, b, 0),
                _ => TensorIndex::new(0, a, b, 0),
            };
            let desc = slice(spec, rows, Axis::Q, fixed)?;
            let g = GemmSpec::new(n, n, mp)
                .strides(n, desc.slice_stride, desc.slice_stride)
                .accumulate(accumulate);
            gemm(&g, &ops.dudx, &inp[desc.offset..], &mut out[desc.offset..])?;
        }
    }
    Ok(())
}

pub fn stp_log(
    q: &ElementTensor,
    pde: &(impl LinearPde + ?Sized),
    ctx: &StepContext,
    ops: &BasisOperators,
    arena: &mut ScratchArena,
    out: &mut PredictorOutput,
) -> Result<()> {
    let config = validate(Variant::Log, q, pde, ctx, ops, arena, out)?;
    let spec = *q.spec();
    let (n, m) = (config.order, config.quantities);
    let nodes = n * n * n;
    let mp = spec.m_pad();
    let t = spec.len();
    let [p, df, flux, grad, amp] = arena.split::<5>();

    p[..t].copy_from_slice(q.as_slice());
    for o in 0..n {
        let (done, next) = p.split_at_mut((o + 1) * t);
        let po = &done[o * t..];
        let pn = &mut next[..t];
        for d in 0..3 {
            let fd = &mut flux[d * t..][..t];
            for node in 0..nodes {
                pde.flux(&po[node * mp..][..m], d, &mut fd[node * mp..][..m]);
            }
        }
        for d in 0..3 {
            log_derive(
                &spec,
                ops,
                d,
                &flux[d * t..][..t],
                &mut df[(o * 3 + d) * t..][..t],
                false,
            )?;
        }
        for d in 0..3 {
            log_derive(&spec, ops, d, po, &mut grad[d * t..][..t], false)?;
        }
        for d in 0..3 {
            let fd = &mut flux[d * t..][..t];
            let dfo = &mut df[(o * 3 + d) * t..][..t];
            for node in 0..nodes {
                let slot = &mut fd[node * mp..][..mp];
                pde.ncp(&grad[d * t + node * mp..][..m], d, &mut slot[..m]);
                for (v, x) in dfo[node * mp..][..mp].iter_mut().zip(slot.iter()) {
                    *v += x;
                }
            }
        }
        let (d0, rest) = df[o * 3 * t..].split_at(t);
        let (d1, d2) = rest.split_at(t);
        for (k, v) in pn.iter_mut().enumerate() {
            *v = ctx.inv_h * (d0[k] + d1[k] + d2[k]);
        }
        add_sources_aos(pde, ops, o, ctx.t, mp, amp, pn);
    }

    let qavg = out.qavg.as_mut_slice();
    qavg.fill(0.0);
    for d in 0..3 {
        out.favg[d].as_mut_slice().fill(0.0);
    }
    for (o, c) in ctx.taylor_coeffs().take(n).enumerate() {
        for (v, x) in qavg.iter_mut().zip(&p[o * t..][..t]) {
            *v += x * c;
        }
        let cf = c * ctx.inv_h;
        for d in 0..3 {
            for (v, x) in out.favg[d].as_mut_slice().iter_mut().zip(&df[(o * 3 + d) * t..][..t]) {
                *v += x * cf;
            }
        }
    }
    extrapolate_faces(out, ops, pde)
}

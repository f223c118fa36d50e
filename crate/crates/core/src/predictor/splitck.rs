//! Dimension-split kernel: three element tensors of scratch, time
//! integration on the fly, fluctuations recomputed from `qavg`.
//!
//! Each pass over `d` reuses one flux buffer: it first holds `F_d(p)`, is
//! consumed by the derivative into `ptemp`, and then holds `D_d p` for the
//! non-conservative product. Only `p_1 .. p_{N-1}` are formed.

use super::log::log_derive;
use super::{add_sources_aos, extrapolate_faces, validate, PredictorOutput, ScratchArena, StepContext, Variant};
use crate::basis::BasisOperators;
use crate::layout::{ElementTensor, LayoutSpec};
use crate::pde::LinearPde;
use crate::Result;

/// `out = inv_h sum_d (D_d F_d(p) + B_d D_d p)`, or the single `d` term
/// when `dims` is one dimension.
#[allow(clippy::too_many_arguments)]
fn fluctuation(
    spec: &LayoutSpec,
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    inv_h: f64,
    dims: core::ops::Range<usize>,
    p: &[f64],
    flux: &mut [f64],
    tmp: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    let m = spec.m;
    let mp = spec.m_pad();
    let nodes = spec.n * spec.n * spec.n;
    let first = dims.start;
    for d in dims {
        for node in 0..nodes {
            pde.flux(&p[node * mp..][..m], d, &mut flux[node * mp..][..m]);
        }
        log_derive(spec, ops, d, flux, out, d != first)?;
        log_derive(spec, ops, d, p, flux, false)?;
        for node in 0..nodes {
            pde.ncp(&flux[node * mp..][..m], d, &mut tmp[..m]);
            for (v, x) in out[node * mp..][..mp].iter_mut().zip(&tmp[..mp]) {
                *v += x;
            }
        }
    }
    for v in out.iter_mut() {
        *v *= inv_h;
    }
    Ok(())
}

pub fn stp_splitck(
    q: &ElementTensor,
    pde: &(impl LinearPde + ?Sized),
    ctx: &StepContext,
    ops: &BasisOperators,
    arena: &mut ScratchArena,
    out: &mut PredictorOutput,
) -> Result<()> {
    let config = validate(Variant::SplitCk, q, pde, ctx, ops, arena, out)?;
    let spec = *q.spec();
    let n = config.order;
    let mp = spec.m_pad();
    let t = spec.len();
    let [p_buf, ptemp_buf, flux_buf, tmp, amp] = arena.split::<5>();
    let (mut p, mut ptemp) = (&mut p_buf[..t], &mut ptemp_buf[..t]);
    let flux = &mut flux_buf[..t];

    p.copy_from_slice(q.as_slice());
    let qavg = out.qavg.as_mut_slice();
    let mut coeffs = ctx.taylor_coeffs();
    let c0 = coeffs.next().unwrap_or(ctx.dt);
    for (v, x) in qavg.iter_mut().zip(p.iter()) {
        *v = x * c0;
    }
    for (o, c) in coeffs.take(n - 1).enumerate() {
        fluctuation(&spec, pde, ops, ctx.inv_h, 0..3, p, flux, tmp, ptemp)?;
        add_sources_aos(pde, ops, o, ctx.t, mp, amp, ptemp);
        for (v, x) in qavg.iter_mut().zip(ptemp.iter()) {
            *v += x * c;
        }
        core::mem::swap(&mut p, &mut ptemp);
    }

    for d in 0..3 {
        let favg = out.favg[d].as_mut_slice();
        fluctuation(
            &spec,
            pde,
            ops,
            ctx.inv_h,
            d..d + 1,
            out.qavg.as_slice(),
            flux,
            tmp,
            favg,
        )?;
    }
    extrapolate_faces(out, ops, pde)
}

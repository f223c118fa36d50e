//! Reference kernel: naive loops, every Taylor iterate and fluctuation kept.

use super::{add_sources_aos, extrapolate_faces, validate, PredictorOutput, ScratchArena, StepContext, Variant};
use crate::basis::BasisOperators;
use crate::layout::ElementTensor;
use crate::pde::LinearPde;
use crate::Result;

/// `out += D_d inp` for AoS-ordered data with `m` logical quantities and
/// node stride `ms`.
pub(crate) fn derive_add(ops: &BasisOperators, m: usize, ms: usize, d: usize, inp: &[f64], out: &mut [f64]) {
    let n = ops.order();
    let step = [1, n, n * n][d];
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let node = (z * n + y) * n + x;
                let k = [x, y, z][d];
                let base = node - k * step;
                for l in 0..n {
                    let c = ops.dudx[k * n + l];
                    let src = (base + l * step) * ms;
                    for s in 0..m {
                        out[node * ms + s] += c * inp[src + s];
                    }
                }
            }
        }
    }
}

pub fn stp_generic(
    q: &ElementTensor,
    pde: &(impl LinearPde + ?Sized),
    ctx: &StepContext,
    ops: &BasisOperators,
    arena: &mut ScratchArena,
    out: &mut PredictorOutput,
) -> Result<()> {
    let config = validate(Variant::Generic, q, pde, ctx, ops, arena, out)?;
    let (n, m) = (config.order, config.quantities);
    let nodes = n * n * n;
    let t = nodes * m;
    let mp = q.spec().m_pad();
    let [p, df, flux, grad, tmp, amp] = arena.split::<6>();

    let qs = q.as_slice();
    for node in 0..nodes {
        p[node * m..][..m].copy_from_slice(&qs[node * mp..][..m]);
    }

    for o in 0..n {
        let (done, next) = p.split_at_mut((o + 1) * t);
        let po = &done[o * t..];
        let pn = &mut next[..t];
        for d in 0..3 {
            let fd = &mut flux[d * t..][..t];
            for node in 0..nodes {
                pde.flux(&po[node * m..][..m], d, &mut fd[node * m..][..m]);
            }
        }
        for d in 0..3 {
            let dfo = &mut df[(o * 3 + d) * t..][..t];
            dfo.fill(0.0);
            derive_add(ops, m, m, d, &flux[d * t..][..t], dfo);
        }
        grad[..3 * t].fill(0.0);
        for d in 0..3 {
            derive_add(ops, m, m, d, po, &mut grad[d * t..][..t]);
        }
        for d in 0..3 {
            let dfo = &mut df[(o * 3 + d) * t..][..t];
            for node in 0..nodes {
                pde.ncp(&grad[d * t + node * m..][..m], d, &mut tmp[..m]);
                for s in 0..m {
                    dfo[node * m + s] += tmp[s];
                }
            }
        }
        for k in 0..t {
            let sum = df[o * 3 * t + k] + df[(o * 3 + 1) * t + k] + df[(o * 3 + 2) * t + k];
            pn[k] = ctx.inv_h * sum;
        }
        add_sources_aos(pde, ops, o, ctx.t, m, amp, pn);
    }

    let coeffs = ctx.taylor_coeffs().take(n);
    let qavg = out.qavg.as_mut_slice();
    qavg.fill(0.0);
    for d in 0..3 {
        out.favg[d].as_mut_slice().fill(0.0);
    }
    for (o, c) in coeffs.enumerate() {
        for node in 0..nodes {
            for s in 0..m {
                qavg[node * mp + s] += p[o * t + node * m + s] * c;
            }
        }
        let cf = c * ctx.inv_h;
        for d in 0..3 {
            let favg = out.favg[d].as_mut_slice();
            for node in 0..nodes {
                for s in 0..m {
                    favg[node * mp + s] += df[(o * 3 + d) * t + node * m + s] * cf;
                }
            }
        }
    }
    extrapolate_faces(out, ops, pde)
}

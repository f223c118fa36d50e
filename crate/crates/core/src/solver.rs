//! Periodic Cartesian ADER-DG driver.
//!
//! Strong-form corrector on the unit reference cube mapped to cubes of edge
//! `h`. For every face with outward sign `sigma` (`-1` left, `+1` right)
//! the time-integrated face term
//!
//! ```text
//! G = sigma (F* - F_in) + sigma / 2 B_d (q_out - q_in)
//! ```
//!
//! is lifted into the element as `q_k += inv_h phi_k(face) / w_k G`, with
//! `F*` the Rusanov flux of the left/right traces ordered along `+d`.
//! Derivatives carry `1 / h` and point sources `1 / h^3`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::basis::BasisOperators;
use crate::layout::ElementTensor;
use crate::pde::{Chunk, LinearPde};
use crate::predictor::{predict, PredictorOutput, ScratchArena, StepContext, StpConfig, Variant};
use crate::{Error, Result};

/// Default Courant factor of [`stable_dt`]. Measured limits over 1000
/// advection steps drop from 1.0 at N = 1 to 0.35 at N = 9; 0.3 is below
/// all of them.
pub const DEFAULT_CFL: f64 = 0.3;

/// `e^3` elements of edge `h = domain_len / e` with periodic wrap.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub elements_per_dim: usize,
    pub domain_len: f64,
    pub config: StpConfig,
    pub time: f64,
    /// Element `(ix, iy, iz)` sits at `(iz e + iy) e + ix`.
    pub cells: Vec<ElementTensor>,
}

impl Mesh {
    pub fn new(elements_per_dim: usize, domain_len: f64, config: StpConfig) -> Result<Self> {
        if elements_per_dim == 0 {
            return Err(Error::InvalidParameter("mesh needs at least one element per dimension"));
        }
        if !(domain_len > 0.0) || !domain_len.is_finite() {
            return Err(Error::InvalidParameter("domain length must be positive"));
        }
        let e = elements_per_dim;
        Ok(Self {
            elements_per_dim,
            domain_len,
            config,
            time: 0.0,
            cells: vec![ElementTensor::zeros(config.aos()); e * e * e],
        })
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.domain_len / self.elements_per_dim as f64
    }

    #[inline]
    pub fn cell_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        let e = self.elements_per_dim;
        (iz * e + iy) * e + ix
    }

    pub fn cell_coords(&self, cell: usize) -> [usize; 3] {
        cell_coords(self.elements_per_dim, cell)
    }

    /// Periodic neighbour of `cell` one step along `d`, forward or back.
    pub fn neighbor(&self, cell: usize, d: usize, forward: bool) -> usize {
        neighbor(self.elements_per_dim, cell, d, forward)
    }

    /// Physical position of node `(z, y, x)` of `cell`.
    pub fn node_position(&self, ops: &BasisOperators, cell: usize, z: usize, y: usize, x: usize) -> [f64; 3] {
        let h = self.h();
        let c = self.cell_coords(cell);
        [
            (c[0] as f64 + ops.nodes[x]) * h,
            (c[1] as f64 + ops.nodes[y]) * h,
            (c[2] as f64 + ops.nodes[z]) * h,
        ]
    }

    /// Sets every node from `f(position, out)`, `out` of length `m`.
    pub fn set_state(&mut self, ops: &BasisOperators, mut f: impl FnMut([f64; 3], &mut [f64])) {
        let n = self.config.order;
        let m = self.config.quantities;
        let mut buf = vec![0.0; m];
        for cell in 0..self.cells.len() {
            for z in 0..n {
                for y in 0..n {
                    for x in 0..n {
                        let pos = self.node_position(ops, cell, z, y, x);
                        f(pos, &mut buf);
                        for (s, v) in buf.iter().enumerate() {
                            self.cells[cell].set(z, y, x, s, *v);
                        }
                    }
                }
            }
        }
    }

    /// Quadrature integral of every quantity over the domain.
    pub fn integral(&self, ops: &BasisOperators) -> Vec<f64> {
        let n = self.config.order;
        let h = self.h();
        let h3 = h * h * h;
        let mut acc = vec![0.0; self.config.quantities];
        for cell in &self.cells {
            cell.for_each_logical(|i, v| {
                let w = ops.weights[i.x] * ops.weights[i.y] * ops.weights[i.z];
                acc[i.s] += h3 * w * v;
            });
        }
        debug_assert!(n == ops.order());
        acc
    }

    /// Discrete L2 norm of `q - exact` by nodal quadrature.
    pub fn l2_error(&self, ops: &BasisOperators, mut exact: impl FnMut([f64; 3], &mut [f64])) -> f64 {
        let n = self.config.order;
        let m = self.config.quantities;
        let h = self.h();
        let h3 = h * h * h;
        let mut buf = vec![0.0; m];
        let mut sum = 0.0;
        for (cell, t) in self.cells.iter().enumerate() {
            for z in 0..n {
                for y in 0..n {
                    for x in 0..n {
                        exact(self.node_position(ops, cell, z, y, x), &mut buf);
                        let w = h3 * ops.weights[x] * ops.weights[y] * ops.weights[z];
                        for (s, e) in buf.iter().enumerate() {
                            let d = t.get(z, y, x, s) - e;
                            sum += w * d * d;
                        }
                    }
                }
            }
        }
        libm::sqrt(sum)
    }
}

fn cell_coords(e: usize, cell: usize) -> [usize; 3] {
    [cell % e, (cell / e) % e, cell / (e * e)]
}

fn neighbor(e: usize, cell: usize, d: usize, forward: bool) -> usize {
    let mut c = cell_coords(e, cell);
    c[d] = if forward { (c[d] + 1) % e } else { (c[d] + e - 1) % e };
    (c[2] * e + c[1]) * e + c[0]
}

/// Rusanov flux for `q_t = dF/dx + ...`, i.e. the usual local Lax-Friedrichs
/// flux with the sign of `F` flipped: `(FL + FR) / 2 + smax (qR - qL) / 2`.
pub fn rusanov_flux(ql: &[f64], qr: &[f64], fl: &[f64], fr: &[f64], smax: f64, out: &mut [f64]) -> Result<()> {
    let n = out.len();
    if ql.len() != n || qr.len() != n || fl.len() != n || fr.len() != n {
        return Err(Error::ShapeMismatch("face arrays differ in length"));
    }
    for i in 0..n {
        out[i] = 0.5 * (fl[i] + fr[i]) + 0.5 * smax * (qr[i] - ql[i]);
    }
    Ok(())
}

/// `C h / (3 smax (2N - 1))`; `+inf` without wave propagation.
pub fn stable_dt(mesh: &Mesh, pde: &(impl LinearPde + ?Sized), cfl: f64) -> f64 {
    let smax = pde.max_wavespeed();
    if smax <= 0.0 {
        return f64::INFINITY;
    }
    let n = mesh.config.order as f64;
    cfl * mesh.h() / (3.0 * smax * (2.0 * n - 1.0))
}

/// The sources of `pde` that fall into one element, in element-reference
/// coordinates and scaled by `1 / h^3`. Source positions of `pde` are in
/// unit-domain coordinates.
pub struct LocalSources<'a, P: ?Sized> {
    pde: &'a P,
    cell: [usize; 3],
    e: usize,
    inv_h3: f64,
}

impl<'a, P: LinearPde + ?Sized> LocalSources<'a, P> {
    pub fn new(pde: &'a P, mesh: &Mesh, cell: usize) -> Self {
        Self::with_geometry(pde, mesh.elements_per_dim, mesh.h(), cell)
    }

    fn with_geometry(pde: &'a P, e: usize, h: f64, cell: usize) -> Self {
        Self {
            pde,
            cell: cell_coords(e, cell),
            e,
            inv_h3: 1.0 / (h * h * h),
        }
    }

    fn owner(&self, pos: [f64; 3]) -> [usize; 3] {
        let e = self.e as f64;
        core::array::from_fn(|d| (libm::floor(pos[d] * e).max(0.0) as usize).min(self.e - 1))
    }

    fn global(&self, local: usize) -> usize {
        (0..self.pde.source_count())
            .filter(|&s| self.owner(self.pde.source_position(s)) == self.cell)
            .nth(local)
            .expect("local source index out of range")
    }
}

impl<P: LinearPde + ?Sized> LinearPde for LocalSources<'_, P> {
    fn quantities(&self) -> usize {
        self.pde.quantities()
    }
    fn flux(&self, q: &[f64], dim: usize, f: &mut [f64]) {
        self.pde.flux(q, dim, f)
    }
    fn ncp(&self, grad: &[f64], dim: usize, out: &mut [f64]) {
        self.pde.ncp(grad, dim, out)
    }
    fn flux_vect(&self, q: &[f64], dim: usize, chunk: Chunk, f: &mut [f64]) {
        self.pde.flux_vect(q, dim, chunk, f)
    }
    fn ncp_vect(&self, grad: &[f64], dim: usize, chunk: Chunk, out: &mut [f64]) {
        self.pde.ncp_vect(grad, dim, chunk, out)
    }
    fn max_wavespeed(&self) -> f64 {
        self.pde.max_wavespeed()
    }
    fn source_count(&self) -> usize {
        (0..self.pde.source_count())
            .filter(|&s| self.owner(self.pde.source_position(s)) == self.cell)
            .count()
    }
    fn source_derivative(&self, order: usize, t: f64, s: usize, out: &mut [f64]) {
        self.pde.source_derivative(order, t, self.global(s), out);
        for v in out.iter_mut() {
            *v *= self.inv_h3;
        }
    }
    fn source_position(&self, s: usize) -> [f64; 3] {
        let pos = self.pde.source_position(self.global(s));
        let e = self.e as f64;
        core::array::from_fn(|d| (pos[d] * e - self.cell[d] as f64).clamp(0.0, 1.0))
    }
}

/// Runs the predictor on `cells` (indices into the mesh), writing
/// `outputs[i]` for `cells.start + i`.
#[allow(clippy::too_many_arguments)]
pub fn predict_range(
    mesh: &Mesh,
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    variant: Variant,
    dt: f64,
    cells: Range<usize>,
    arena: &mut ScratchArena,
    outputs: &mut [PredictorOutput],
) -> Result<()> {
    let ctx = StepContext::new(mesh.time, dt, 1.0 / mesh.h())?;
    for (cell, out) in cells.zip(outputs.iter_mut()) {
        let local = LocalSources::new(pde, mesh, cell);
        predict(variant, &mesh.cells[cell], &local, &ctx, ops, arena, out)?;
    }
    Ok(())
}

/// Advances every element by `dt` from the predictor outputs and bumps
/// `mesh.time`.
pub fn corrector_step(
    mesh: &mut Mesh,
    outputs: &[PredictorOutput],
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    dt: f64,
) -> Result<()> {
    if outputs.len() != mesh.cells.len() {
        return Err(Error::ShapeMismatch("one predictor output per element"));
    }
    let n = mesh.config.order;
    let m = mesh.config.quantities;
    let inv_h = 1.0 / mesh.h();
    let smax = pde.max_wavespeed();
    let face_len = n * n * m;
    let mut fstar = vec![0.0; face_len];
    let mut g = vec![0.0; face_len];
    let mut jump = vec![0.0; m];
    let mut bj = vec![0.0; m];
    let mut amp = vec![0.0; m];
    let e = mesh.elements_per_dim;
    let h = mesh.h();
    let ctx = StepContext::new(mesh.time, dt, inv_h)?;

    for cell in 0..mesh.cells.len() {
        let out = &outputs[cell];
        let spec = *mesh.cells[cell].spec();
        let q = mesh.cells[cell].as_mut_slice();
        for d in 0..3 {
            for (v, f) in q.iter_mut().zip(out.favg[d].as_slice()) {
                *v += f;
            }
        }
        for f in 0..6 {
            let d = f / 2;
            let right = f % 2 == 1;
            let nb = &outputs[neighbor(e, cell, d, right)];
            let nf = if right { 2 * d } else { 2 * d + 1 };
            let (q_in, f_in) = (&out.face_q[f], &out.face_f[f]);
            let (q_out, f_out) = (&nb.face_q[nf], &nb.face_f[nf]);
            if right {
                rusanov_flux(q_in, q_out, f_in, f_out, smax, &mut fstar)?;
            } else {
                rusanov_flux(q_out, q_in, f_out, f_in, smax, &mut fstar)?;
            }
            let sigma = if right { 1.0 } else { -1.0 };
            for node in 0..n * n {
                let base = node * m;
                for s in 0..m {
                    jump[s] = q_out[base + s] - q_in[base + s];
                }
                pde.ncp(&jump, d, &mut bj);
                for s in 0..m {
                    let i = base + s;
                    g[i] = sigma * (fstar[i] - f_in[i]) + 0.5 * sigma * bj[s];
                }
            }
            let trace = if right { &ops.face_right } else { &ops.face_left };
            for a in 0..n {
                for b in 0..n {
                    let gn = &g[(a * n + b) * m..][..m];
                    for k in 0..n {
                        let (z, y, x) = match d {
                            0 => (a, b, k),
                            1 => (a, k, b),
                            _ => (k, a, b),
                        };
                        let lift = inv_h * trace[k] * ops.inv_weights[k];
                        let base = spec.index(z, y, x, 0);
                        for (v, gv) in q[base..base + m].iter_mut().zip(gn) {
                            *v += lift * gv;
                        }
                    }
                }
            }
        }
        // time integral of the point sources, same Taylor order as qavg
        let local = LocalSources::with_geometry(pde, e, h, cell);
        for src in 0..local.source_count() {
            let pos = local.source_position(src);
            let mut weight = [0.0; 3];
            for (o, c) in ctx.taylor_coeffs().take(n).enumerate() {
                local.source_derivative(o, ctx.t, src, &mut amp);
                for z in 0..n {
                    weight[2] = ops.lagrange_value(z, pos[2]) * ops.inv_weights[z];
                    for y in 0..n {
                        weight[1] = ops.lagrange_value(y, pos[1]) * ops.inv_weights[y];
                        for x in 0..n {
                            weight[0] = ops.lagrange_value(x, pos[0]) * ops.inv_weights[x];
                            let w = c * weight[0] * weight[1] * weight[2];
                            let base = spec.index(z, y, x, 0);
                            for (v, a) in q[base..base + m].iter_mut().zip(&amp) {
                                *v += w * a;
                            }
                        }
                    }
                }
            }
        }
        if !q.iter().all(|v| v.is_finite()) {
            return Err(Error::Unstable(cell));
        }
    }
    mesh.time += dt;
    Ok(())
}

/// Outcome of [`run_simulation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationReport {
    pub steps: usize,
    pub time: f64,
    pub dt: f64,
    /// L2 error against the reference solution, when one was given.
    pub l2_error: Option<f64>,
}

/// Reference solution `exact(position, t, out)`.
pub type ExactSolution<'a> = &'a dyn Fn([f64; 3], f64, &mut [f64]);

/// Time step size for a run to `t_end`: the largest stable step shrunk so
/// that an integer number of steps lands exactly on `t_end`.
pub fn step_plan(mesh: &Mesh, pde: &(impl LinearPde + ?Sized), t_end: f64, cfl: f64) -> (usize, f64) {
    let span = t_end - mesh.time;
    if !(span > 0.0) {
        return (0, 0.0);
    }
    let dt = stable_dt(mesh, pde, cfl);
    let steps = if dt.is_finite() {
        libm::ceil(span / dt).max(1.0) as usize
    } else {
        1
    };
    (steps, span / steps as f64)
}

/// Sequential predictor/corrector loop from `mesh.time` to `t_end`.
pub fn run_simulation(
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    mesh: &mut Mesh,
    t_end: f64,
    variant: Variant,
    exact: Option<ExactSolution<'_>>,
) -> Result<SimulationReport> {
    let (steps, dt) = step_plan(mesh, pde, t_end, DEFAULT_CFL);
    run_steps(pde, ops, mesh, steps, dt, variant)?;
    let l2_error = exact.map(|f| {
        let t = mesh.time;
        mesh.l2_error(ops, |x, out| f(x, t, out))
    });
    Ok(SimulationReport {
        steps,
        time: mesh.time,
        dt,
        l2_error,
    })
}

/// `steps` fixed-size steps on one worker.
pub fn run_steps(
    pde: &(impl LinearPde + ?Sized),
    ops: &BasisOperators,
    mesh: &mut Mesh,
    steps: usize,
    dt: f64,
    variant: Variant,
) -> Result<()> {
    let config = mesh.config;
    if pde.quantities() != config.quantities || ops.order() != config.order {
        return Err(Error::ShapeMismatch("mesh, pde and basis disagree"));
    }
    let mut arena = ScratchArena::new(variant, config);
    let mut outputs = vec![PredictorOutput::new(&config); mesh.cells.len()];
    for _ in 0..steps {
        let all = 0..mesh.cells.len();
        predict_range(mesh, pde, ops, variant, dt, all, &mut arena, &mut outputs)?;
        corrector_step(mesh, &outputs, pde, ops, dt)?;
    }
    Ok(())
}

//! Linear PDE user functions.
//!
//! Sign convention: `q_t = sum_d d/dx_d F_d(q) + sum_d B_d dq/dx_d + S`, with
//! any material matrix already folded into `F_d` and `B_d`. Advection with
//! velocity `v` is therefore `F_d(q) = -v_d q`.
//!
//! Every user function comes in a pointwise form (one node, `m` contiguous
//! values) and a chunk form operating on an SoA block: quantity `s` of lane
//! `i` lives at `s * chunk.stride + i` for `i < chunk.len`. Outputs are
//! always fully overwritten for every quantity.

use alloc::vec::Vec;

use crate::{Error, Result};

/// SoA sub-block handed to vectorized user functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk {
    pub len: usize,
    pub stride: usize,
}

pub trait LinearPde {
    fn quantities(&self) -> usize;

    /// `f = F_dim(q)`.
    fn flux(&self, q: &[f64], dim: usize, f: &mut [f64]);

    /// `out = B_dim * grad`, where `grad` is the derivative along `dim`.
    fn ncp(&self, grad: &[f64], dim: usize, out: &mut [f64]);

    fn flux_vect(&self, q: &[f64], dim: usize, chunk: Chunk, f: &mut [f64]);

    fn ncp_vect(&self, grad: &[f64], dim: usize, chunk: Chunk, out: &mut [f64]);

    fn max_wavespeed(&self) -> f64;

    fn source_count(&self) -> usize {
        0
    }

    /// `order`-th time derivative of source `s` at time `t`, as an
    /// `m`-vector of amplitudes.
    fn source_derivative(&self, _order: usize, _t: f64, _s: usize, out: &mut [f64]) {
        out.fill(0.0);
    }

    /// Source location in unit-cube coordinates.
    fn source_position(&self, _s: usize) -> [f64; 3] {
        [0.5; 3]
    }
}

impl<P: LinearPde + ?Sized> LinearPde for &P {
    fn quantities(&self) -> usize {
        (**self).quantities()
    }
    fn flux(&self, q: &[f64], dim: usize, f: &mut [f64]) {
        (**self).flux(q, dim, f)
    }
    fn ncp(&self, grad: &[f64], dim: usize, out: &mut [f64]) {
        (**self).ncp(grad, dim, out)
    }
    fn flux_vect(&self, q: &[f64], dim: usize, chunk: Chunk, f: &mut [f64]) {
        (**self).flux_vect(q, dim, chunk, f)
    }
    fn ncp_vect(&self, grad: &[f64], dim: usize, chunk: Chunk, out: &mut [f64]) {
        (**self).ncp_vect(grad, dim, chunk, out)
    }
    fn max_wavespeed(&self) -> f64 {
        (**self).max_wavespeed()
    }
    fn source_count(&self) -> usize {
        (**self).source_count()
    }
    fn source_derivative(&self, order: usize, t: f64, s: usize, out: &mut [f64]) {
        (**self).source_derivative(order, t, s, out)
    }
    fn source_position(&self, s: usize) -> [f64; 3] {
        (**self).source_position(s)
    }
}

/// `A exp(-(t - center)^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl GaussianPulse {
    pub fn new(amplitude: f64, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter("pulse width must be positive"));
        }
        Ok(Self {
            amplitude,
            center,
            width,
        })
    }

    /// `d^order/dt^order` of the pulse. With `u = (t - c) / w` this is
    /// `A (-1/w)^order He_order(u) exp(-u^2 / 2)`, probabilists' Hermite.
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        let u = (t - self.center) / self.width;
        let mut he_prev = 1.0;
        let mut he = u;
        let he_n = match order {
            0 => 1.0,
            _ => {
                for k in 1..order {
                    let next = u * he - k as f64 * he_prev;
                    he_prev = he;
                    he = next;
                }
                he
            }
        };
        let scale = libm::pow(-1.0 / self.width, order as f64);
        self.amplitude * scale * he_n * libm::exp(-0.5 * u * u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    /// Unit-cube coordinates.
    pub position: [f64; 3],
    pub quantity: usize,
    pub pulse: GaussianPulse,
}

fn sources_derivative(sources: &[PointSource], order: usize, t: f64, s: usize, out: &mut [f64]) {
    out.fill(0.0);
    let src = &sources[s];
    out[src.quantity] = src.pulse.derivative(order, t);
}

fn check_source(src: &PointSource, m: usize) -> Result<()> {
    crate::basis::check_in_cube(src.position)?;
    if src.quantity >= m {
        return Err(Error::InvalidParameter("source quantity out of range"));
    }
    Ok(())
}

/// Linear advection of `m` independent quantities, `F_d(q) = -v_d q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Advection {
    pub velocity: [f64; 3],
    m: usize,
    sources: Vec<PointSource>,
}

impl Advection {
    pub fn new(velocity: [f64; 3], m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("advection needs at least one quantity"));
        }
        Ok(Self {
            velocity,
            m,
            sources: Vec::new(),
        })
    }

    pub fn with_source(mut self, src: PointSource) -> Result<Self> {
        check_source(&src, self.m)?;
        self.sources.push(src);
        Ok(self)
    }
}

impl LinearPde for Advection {
    fn quantities(&self) -> usize {
        self.m
    }

    fn flux(&self, q: &[f64], dim: usize, f: &mut [f64]) {
        let v = self.velocity[dim];
        for (fs, qs) in f[..self.m].iter_mut().zip(&q[..self.m]) {
            *fs = -v * qs;
        }
    }

    fn ncp(&self, _grad: &[f64], _dim: usize, out: &mut [f64]) {
        out[..self.m].fill(0.0);
    }

    fn flux_vect(&self, q: &[f64], dim: usize, chunk: Chunk, f: &mut [f64]) {
        let v = self.velocity[dim];
        for s in 0..self.m {
            let row = s * chunk.stride;
            for i in 0..chunk.len {
                f[row + i] = -v * q[row + i];
            }
        }
    }

    fn ncp_vect(&self, _grad: &[f64], _dim: usize, chunk: Chunk, out: &mut [f64]) {
        for s in 0..self.m {
            out[s * chunk.stride..s * chunk.stride + chunk.len].fill(0.0);
        }
    }

    fn max_wavespeed(&self) -> f64 {
        self.velocity.iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v)))
    }

    fn source_count(&self) -> usize {
        self.sources.len()
    }

    fn source_derivative(&self, order: usize, t: f64, s: usize, out: &mut [f64]) {
        sources_derivative(&self.sources, order, t, s, out)
    }

    fn source_position(&self, s: usize) -> [f64; 3] {
        self.sources[s].position
    }
}

/// Same dynamics as [`Advection`] written through the non-conservative
/// product: `F = 0`, `B_d grad = -v_d grad`.
#[derive(Debug, Clone, PartialEq)]
pub struct NcpAdvection {
    pub velocity: [f64; 3],
    m: usize,
}

impl NcpAdvection {
    pub fn new(velocity: [f64; 3], m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("advection needs at least one quantity"));
        }
        Ok(Self { velocity, m })
    }
}

impl LinearPde for NcpAdvection {
    fn quantities(&self) -> usize {
        self.m
    }

    fn flux(&self, _q: &[f64], _dim: usize, f: &mut [f64]) {
        f[..self.m].fill(0.0);
    }

    fn ncp(&self, grad: &[f64], dim: usize, out: &mut [f64]) {
        let v = self.velocity[dim];
        for (o, g) in out[..self.m].iter_mut().zip(&grad[..self.m]) {
            *o = -v * g;
        }
    }

    fn flux_vect(&self, _q: &[f64], _dim: usize, chunk: Chunk, f: &mut [f64]) {
        for s in 0..self.m {
            f[s * chunk.stride..s * chunk.stride + chunk.len].fill(0.0);
        }
    }

    fn ncp_vect(&self, grad: &[f64], dim: usize, chunk: Chunk, out: &mut [f64]) {
        let v = self.velocity[dim];
        for s in 0..self.m {
            let row = s * chunk.stride;
            for i in 0..chunk.len {
                out[row + i] = -v * grad[row + i];
            }
        }
    }

    fn max_wavespeed(&self) -> f64 {
        self.velocity.iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v)))
    }
}

/// Six-quantity demo system. The x-flux is
///
/// ```text
/// F0 = -(Q0 + Q3 + Q4)
/// F1 = -(Q1 + Q3 + Q5)
/// F2 = -(Q2 + Q4 + Q5)
/// F3 = F4 = F5 = 0
/// ```
///
/// and the y/z fluxes follow by rotating `(0, 1, 2)` and `(3, 4, 5)`
/// cyclically by `dim` positions. No non-conservative product.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DemoPde;

impl DemoPde {
    #[inline]
    fn rot(i: usize, dim: usize) -> usize {
        if i < 3 {
            (i + dim) % 3
        } else {
            3 + (i - 3 + dim) % 3
        }
    }
}

impl LinearPde for DemoPde {
    fn quantities(&self) -> usize {
        6
    }

    fn flux(&self, q: &[f64], dim: usize, f: &mut [f64]) {
        let r = |i| Self::rot(i, dim);
        f[r(0)] = -(q[r(0)] + q[r(3)] + q[r(4)]);
        f[r(1)] = -(q[r(1)] + q[r(3)] + q[r(5)]);
        f[r(2)] = -(q[r(2)] + q[r(4)] + q[r(5)]);
        f[r(3)] = 0.0;
        f[r(4)] = 0.0;
        f[r(5)] = 0.0;
    }

    fn ncp(&self, _grad: &[f64], _dim: usize, out: &mut [f64]) {
        out[..6].fill(0.0);
    }

    fn flux_vect(&self, q: &[f64], dim: usize, chunk: Chunk, f: &mut [f64]) {
        let st = chunk.stride;
        let r = |i: usize| Self::rot(i, dim) * st;
        for i in 0..chunk.len {
            f[r(0) + i] = -(q[r(0) + i] + q[r(3) + i] + q[r(4) + i]);
            f[r(1) + i] = -(q[r(1) + i] + q[r(3) + i] + q[r(5) + i]);
            f[r(2) + i] = -(q[r(2) + i] + q[r(4) + i] + q[r(5) + i]);
        }
        for s in 3..6 {
            f[r(s)..r(s) + chunk.len].fill(0.0);
        }
    }

    fn ncp_vect(&self, _grad: &[f64], _dim: usize, chunk: Chunk, out: &mut [f64]) {
        for s in 0..6 {
            out[s * chunk.stride..s * chunk.stride + chunk.len].fill(0.0);
        }
    }

    fn max_wavespeed(&self) -> f64 {
        // flux Jacobian is [[-I, -C], [0, 0]]: eigenvalues -1 and 0
        1.0
    }
}

pub mod elastic {
    //! Quantity indices of the velocity-stress system.
    pub const SXX: usize = 0;
    pub const SYY: usize = 1;
    pub const SZZ: usize = 2;
    pub const SXY: usize = 3;
    pub const SXZ: usize = 4;
    pub const SYZ: usize = 5;
    pub const U: usize = 6;
    pub const V: usize = 7;
    pub const W: usize = 8;
}

/// Isotropic linear elasticity, first-order velocity-stress form with state
/// `(sxx, syy, szz, sxy, sxz, syz, u, v, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Elastic {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
    sources: Vec<PointSource>,
}

impl Elastic {
    pub fn new(lambda: f64, mu: f64, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter("density must be positive"));
        }
        if !(mu >= 0.0) {
            return Err(Error::InvalidParameter("shear modulus must be non-negative"));
        }
        if !(lambda + 2.0 * mu > 0.0) {
            return Err(Error::InvalidParameter("lambda + 2 mu must be positive"));
        }
        Ok(Self {
            lambda,
            mu,
            rho,
            sources: Vec::new(),
        })
    }

    /// Gaussian pulse forcing one velocity component.
    pub fn with_source(mut self, src: PointSource) -> Result<Self> {
        check_source(&src, 9)?;
        if src.quantity < elastic::U {
            return Err(Error::InvalidParameter("elastic sources act on a velocity component"));
        }
        self.sources.push(src);
        Ok(self)
    }

    pub fn p_speed(&self) -> f64 {
        libm::sqrt((self.lambda + 2.0 * self.mu) / self.rho)
    }

    pub fn s_speed(&self) -> f64 {
        libm::sqrt(self.mu / self.rho)
    }

    /// Writes `F_dim(q)` from a strided accessor so the pointwise and chunk
    /// forms share one definition.
    #[inline(always)]
    fn flux_at(&self, dim: usize, q: impl Fn(usize) -> f64, mut f: impl FnMut(usize, f64)) {
        use elastic::*;
        let (l, m2, mu, irho) = (self.lambda, self.lambda + 2.0 * self.mu, self.mu, 1.0 / self.rho);
        // velocity along dim and the two tangential ones
        let vel = [q(U), q(V), q(W)];
        let vd = vel[dim];
        f(SXX, if dim == 0 { m2 * vd } else { l * vd });
        f(SYY, if dim == 1 { m2 * vd } else { l * vd });
        f(SZZ, if dim == 2 { m2 * vd } else { l * vd });
        f(
            SXY,
            match dim {
                0 => mu * vel[1],
                1 => mu * vel[0],
                _ => 0.0,
            },
        );
        f(
            SXZ,
            match dim {
                0 => mu * vel[2],
                2 => mu * vel[0],
                _ => 0.0,
            },
        );
        f(
            SYZ,
            match dim {
                1 => mu * vel[2],
                2 => mu * vel[1],
                _ => 0.0,
            },
        );
        // traction on the dim-face
        let (tx, ty, tz) = match dim {
            0 => (q(SXX), q(SXY), q(SXZ)),
            1 => (q(SXY), q(SYY), q(SYZ)),
            _ => (q(SXZ), q(SYZ), q(SZZ)),
        };
        f(U, irho * tx);
        f(V, irho * ty);
        f(W, irho * tz);
    }
}

impl LinearPde for Elastic {
    fn quantities(&self) -> usize {
        9
    }

    fn flux(&self, q: &[f64], dim: usize, f: &mut [f64]) {
        self.flux_at(dim, |s| q[s], |s, v| f[s] = v);
    }

    fn ncp(&self, _grad: &[f64], _dim: usize, out: &mut [f64]) {
        out[..9].fill(0.0);
    }

    fn flux_vect(&self, q: &[f64], dim: usize, chunk: Chunk, f: &mut [f64]) {
        let st = chunk.stride;
        for i in 0..chunk.len {
            self.flux_at(dim, |s| q[s * st + i], |s, v| f[s * st + i] = v);
        }
    }

    fn ncp_vect(&self, _grad: &[f64], _dim: usize, chunk: Chunk, out: &mut [f64]) {
        for s in 0..9 {
            out[s * chunk.stride..s * chunk.stride + chunk.len].fill(0.0);
        }
    }

    fn max_wavespeed(&self) -> f64 {
        self.p_speed()
    }

    fn source_count(&self) -> usize {
        self.sources.len()
    }

    fn source_derivative(&self, order: usize, t: f64, s: usize, out: &mut [f64]) {
        sources_derivative(&self.sources, order, t, s, out)
    }

    fn source_position(&self, s: usize) -> [f64; 3] {
        self.sources[s].position
    }
}

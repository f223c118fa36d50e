//! Nodal Lagrange basis on Gauss-Legendre points of the unit interval.
//!
//! All operators live on the reference interval `[0, 1]`; scaling by the
//! physical element size happens in the predictor and solver. "Order N"
//! means `N` nodes per dimension, i.e. polynomial degree `N - 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITERS: usize = 100;

/// Immutable 1D operators shared by every kernel variant.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisOperators {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major `N x N`, `dudx[k * N + l] = phi_l'(x_k)`.
    pub dudx: Vec<f64>,
    /// Element-wise transpose of [`dudx`](Self::dudx).
    pub dudx_t: Vec<f64>,
    /// `phi_k(0)`.
    pub face_left: Vec<f64>,
    /// `phi_k(1)`.
    pub face_right: Vec<f64>,
    pub inv_weights: Vec<f64>,
    barycentric: Vec<f64>,
}

impl BasisOperators {
    /// Builds the operators for `n` Gauss-Legendre nodes.
    pub fn new(n: usize) -> Result<Self> {
        let (nodes, weights) = gauss_legendre(n)?;
        Self::from_rule(nodes, weights)
    }

    /// Builds the operators for an arbitrary set of distinct nodes in
    /// `[0, 1]` with matching quadrature weights.
    pub fn from_rule(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::ZeroNodes);
        }
        if nodes.len() != weights.len() {
            return Err(Error::ShapeMismatch("nodes and weights differ in length"));
        }
        let dudx = derivative_operator(&nodes)?;
        let n = nodes.len();
        let mut dudx_t = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                dudx_t[l * n + k] = dudx[k * n + l];
            }
        }
        let (face_left, face_right) = face_coeffs(&nodes)?;
        let inv_weights = weights.iter().map(|w| 1.0 / w).collect();
        let barycentric = barycentric_weights(&nodes)?;
        Ok(Self {
            nodes,
            weights,
            dudx,
            dudx_t,
            face_left,
            face_right,
            inv_weights,
            barycentric,
        })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Writes `phi_k(x)` for every `k` into `out`.
    pub fn lagrange_values(&self, x: f64, out: &mut [f64]) {
        lagrange_values_into(&self.nodes, &self.barycentric, x, out);
    }

    /// `phi_k(x)` for a single basis function.
    pub fn lagrange_value(&self, k: usize, x: f64) -> f64 {
        let xk = self.nodes[k];
        let mut v = 1.0;
        for (j, &xj) in self.nodes.iter().enumerate() {
            if j != k {
                v *= (x - xj) / (xk - xj);
            }
        }
        v
    }

    /// Evaluates the 1D interpolant of nodal values `coeffs` at `x`.
    pub fn interpolate(&self, coeffs: &[f64], x: f64) -> f64 {
        (0..self.order()).map(|k| coeffs[k] * self.lagrange_value(k, x)).sum()
    }
}

/// `n`-point Gauss-Legendre rule mapped to `[0, 1]`, nodes ascending.
///
/// Roots of `P_n` are found by Newton iteration with the three-term
/// recurrence; the rule is symmetrised about `1/2` so mirrored nodes and
/// weights agree bit for bit.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::ZeroNodes);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // i-th root of P_n on [-1, 1], descending from near +1.
        let mut t = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, d) = legendre_with_derivative(n, t);
            let dx = p / d;
            t -= dx;
            dp = d;
            if libm::fabs(dx) <= NEWTON_TOL {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let w = 1.0 / ((1.0 - t * t) * dp * dp); // 2 / (...) mapped by 1/2
                                                 // t > 0 maps to the right half of [0, 1].
        let x_right = 0.5 * (1.0 + t);
        nodes[n - 1 - i] = x_right;
        nodes[i] = 1.0 - x_right;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok((nodes, weights))
}

/// `(P_n(t), P_n'(t))` via the Bonnet recurrence.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    let mut lambda = vec![1.0; n];
    for l in 0..n {
        for j in 0..n {
            if j == l {
                continue;
            }
            let diff = nodes[l] - nodes[j];
            if diff == 0.0 {
                return Err(Error::DuplicateNodes(j.min(l), j.max(l)));
            }
            lambda[l] /= diff;
        }
    }
    Ok(lambda)
}

fn lagrange_values_into(nodes: &[f64], lambda: &[f64], x: f64, out: &mut [f64]) {
    let n = nodes.len();
    if let Some(hit) = nodes.iter().position(|&xk| xk == x) {
        out[..n].fill(0.0);
        out[hit] = 1.0;
        return;
    }
    // Modified Lagrange formula: l(x) * lambda_k / (x - x_k).
    let ell: f64 = nodes.iter().map(|&xk| x - xk).product();
    for k in 0..n {
        out[k] = ell * lambda[k] / (x - nodes[k]);
    }
}

/// Discrete derivative operator, row-major `D[k][l] = phi_l'(x_k)`.
///
/// Off-diagonal entries use barycentric weights; the diagonal is the negative
/// row sum so constants are annihilated to rounding.
pub fn derivative_operator(nodes: &[f64]) -> Result<Vec<f64>> {
    if nodes.is_empty() {
        return Err(Error::ZeroNodes);
    }
    let lambda = barycentric_weights(nodes)?;
    let n = nodes.len();
    let mut d = vec![0.0; n * n];
    for k in 0..n {
        let mut diag = 0.0;
        for l in 0..n {
            if l == k {
                continue;
            }
            let v = (lambda[l] / lambda[k]) / (nodes[k] - nodes[l]);
            d[k * n + l] = v;
            diag -= v;
        }
        d[k * n + k] = diag;
    }
    Ok(d)
}

/// Lagrange basis values at the two interval ends, `(phi_k(0), phi_k(1))`.
pub fn face_coeffs(nodes: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if nodes.is_empty() {
        return Err(Error::ZeroNodes);
    }
    let lambda = barycentric_weights(nodes)?;
    let n = nodes.len();
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    lagrange_values_into(nodes, &lambda, 0.0, &mut left);
    lagrange_values_into(nodes, &lambda, 1.0, &mut right);
    Ok((left, right))
}

/// Mass-weighted projection of a point source at `x_s` onto the `N^3`
/// nodal basis, index `(k3 * N + k2) * N + k1` with `k1` along x.
///
/// `P[k] = phi_k1(x) phi_k2(y) phi_k3(z) / (w_k1 w_k2 w_k3)`.
pub fn point_source_projection(ops: &BasisOperators, x_s: [f64; 3]) -> Result<Vec<f64>> {
    let n = ops.order();
    let mut out = vec![0.0; n * n * n];
    point_source_projection_into(ops, x_s, &mut out)?;
    Ok(out)
}

pub(crate) fn check_in_cube(x_s: [f64; 3]) -> Result<()> {
    if x_s.iter().all(|c| (0.0..=1.0).contains(c)) {
        Ok(())
    } else {
        Err(Error::OutsideReferenceCube(x_s[0], x_s[1], x_s[2]))
    }
}

pub(crate) fn point_source_projection_into(ops: &BasisOperators, x_s: [f64; 3], out: &mut [f64]) -> Result<()> {
    check_in_cube(x_s)?;
    let n = ops.order();
    for z in 0..n {
        let bz = ops.lagrange_value(z, x_s[2]) * ops.inv_weights[z];
        for y in 0..n {
            let by = bz * ops.lagrange_value(y, x_s[1]) * ops.inv_weights[y];
            for x in 0..n {
                out[(z * n + y) * n + x] = by * ops.lagrange_value(x, x_s[0]) * ops.inv_weights[x];
            }
        }
    }
    Ok(())
}

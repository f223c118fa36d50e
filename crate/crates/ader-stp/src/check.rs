//! `check`: operator exactness, layout round trips, variant equivalence,
//! dense-operator oracle and padding sweeps over a range of orders.

use std::fs;

use ader_stp_core::basis::BasisOperators;
use ader_stp_core::layout::{aos_to_aosoa, aosoa_to_aos};
use ader_stp_core::predictor::{materialize_volume_operator, predict, MAX_DENSE_DOFS};
use ader_stp_core::{ElementTensor, PredictorOutput, ScratchArena, StepContext, StpConfig, Variant};
use anyhow::Context;

use crate::cli::{CheckArgs, Fault, PdeKind};
use crate::csv::{Cell, Table};
use crate::dump::tensor_to_string;
use crate::rng::DofRng;
use crate::setup::{check_common, equivalence_tol, reference_dt, usage, Outcome, PdeChoice, Report};

pub const OPERATOR_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-11;
pub const DEFAULT_ORDERS: std::ops::RangeInclusive<usize> = 3..=8;

/// `max` that lets NaN through, so a poisoned operator cannot pass.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Largest error of the quadrature on monomials up to degree `2N - 1`.
pub fn quadrature_error(ops: &BasisOperators) -> f64 {
    let n = ops.order();
    (0..2 * n)
        .map(|k| {
            let q: f64 = ops
                .nodes
                .iter()
                .zip(&ops.weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            (q - 1.0 / (k + 1) as f64).abs()
        })
        .fold(0.0, worst)
}

/// Largest error of `D` applied to nodal monomials up to degree `N - 1`.
pub fn derivative_error(ops: &BasisOperators) -> f64 {
    let n = ops.order();
    let mut err = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let d: f64 = (0..n).map(|l| ops.dudx[k * n + l] * ops.nodes[l].powi(j as i32)).sum();
            let exact = if j == 0 {
                0.0
            } else {
                j as f64 * ops.nodes[k].powi(j as i32 - 1)
            };
            err = worst(err, (d - exact).abs());
        }
    }
    err
}

fn inject(ops: &mut BasisOperators, fault: Fault) {
    match fault {
        Fault::DBitflip => {
            // entry (0, 0) sits at index 0 of both D and D^T
            for v in [&mut ops.dudx[0], &mut ops.dudx_t[0]] {
                *v = f64::from_bits(v.to_bits() ^ (1 << 62));
            }
        }
    }
}

/// `sum_{o<N} dt^{o+1}/(o+1)! V^o q` with the dense volume operator.
fn dense_taylor(v: &[f64], q: &ElementTensor, n: usize, dt: f64) -> Vec<f64> {
    let mut term = Vec::with_capacity(q.spec().logical_len());
    q.for_each_logical(|_, x| term.push(x));
    let dofs = term.len();
    let mut acc = vec![0.0; dofs];
    let mut c = 1.0;
    for o in 0..n {
        c *= dt / (o + 1) as f64;
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += c * t;
        }
        term = (0..dofs)
            .map(|i| v[i * dofs..][..dofs].iter().zip(&term).map(|(a, b)| a * b).sum())
            .collect();
    }
    acc
}

fn relative(err: f64, scale: f64) -> f64 {
    if err == 0.0 {
        0.0
    } else {
        err / scale.max(f64::MIN_POSITIVE)
    }
}

struct Sink {
    table: Table,
    lines: Vec<String>,
    ok: bool,
}

impl Sink {
    fn record(&mut self, suite: &str, n: usize, m: usize, variant: Option<Variant>, err: f64, tol: f64) {
        // NaN must fail, so compare in the passing direction
        let pass = err <= tol;
        self.ok &= pass;
        let status = if pass { "pass" } else { "FAIL" };
        let who = variant.map_or(String::new(), |v| format!(" {v}"));
        self.lines.push(format!(
            "[{}] N={n} m={m} {suite}{who}: error {err:.3e} (tol {tol:e})",
            status.to_uppercase()
        ));
        let variant: Cell = variant.map(|v| v.name()).into();
        self.table.push(vec![
            suite.into(),
            n.into(),
            m.into(),
            variant,
            err.into(),
            tol.into(),
            status.into(),
        ]);
    }
}

pub fn run(args: &CheckArgs) -> anyhow::Result<Report> {
    let common = &args.common;
    check_common(common)?;
    if args.samples == 0 {
        return usage("--samples must be at least 1");
    }
    let choice = PdeChoice::from_common(common, PdeKind::Elastic)?;
    let pde = choice.get();
    let m = pde.quantities();
    let orders = common.order.clone().map_or_else(|| DEFAULT_ORDERS.collect(), |o| o.0);
    if let Some(dir) = &args.dump_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let mut sink = Sink {
        table: Table::new(&["suite", "N", "m", "variant", "error", "tolerance", "status"]),
        lines: vec![format!(
            "check: pde={} m={m} vec_width={} seed={}",
            choice.name(),
            common.vec_width,
            common.seed
        )],
        ok: true,
    };
    let mut rng = DofRng::new(common.seed);

    for &n in &orders {
        let mut ops = BasisOperators::new(n)?;
        if let Some(f) = args.inject_fault {
            inject(&mut ops, f);
        }
        sink.record("quadrature", n, m, None, quadrature_error(&ops), OPERATOR_TOL);
        sink.record("derivative", n, m, None, derivative_error(&ops), OPERATOR_TOL);

        let config = StpConfig::new(n, m, common.vec_width)?;
        let ctx = StepContext::new(0.0, reference_dt(pde, n), 1.0)?;
        let dense = if n * n * n * m <= MAX_DENSE_DOFS && pde.source_count() == 0 {
            Some(materialize_volume_operator(pde, &ops)?)
        } else {
            None
        };
        let mut arenas: Vec<_> = Variant::ALL.iter().map(|&v| ScratchArena::new(v, config)).collect();
        let mut outs = vec![PredictorOutput::new(&config); Variant::ALL.len()];
        let (mut layout_err, mut oracle_err) = (0.0f64, 0.0f64);
        let mut equiv = [0.0f64; 4];
        let mut padding_bad = [false; 4];

        for sample in 0..args.samples {
            let q = rng.tensor(config.aos());
            let back = aosoa_to_aos(&aos_to_aosoa(&q)?)?;
            if back.as_slice() != q.as_slice() {
                layout_err = layout_err.max(back.max_abs_diff(&q)?.max(f64::MIN_POSITIVE));
            }
            for (i, &v) in Variant::ALL.iter().enumerate() {
                if i == 0 || common.variant.0.contains(&v) {
                    predict(v, &q, pde, &ctx, &ops, &mut arenas[i], &mut outs[i])?;
                    padding_bad[i] |= !outs[i].padding_is_zero();
                }
            }
            let scale = outs[0].max_abs();
            for i in 1..4 {
                if common.variant.0.contains(&Variant::ALL[i]) {
                    equiv[i] = worst(equiv[i], relative(outs[i].max_abs_diff(&outs[0])?, scale));
                }
            }
            if let Some(v) = &dense {
                let want = dense_taylor(v, &q, n, ctx.dt);
                let mut k = 0;
                let (mut err, mut size) = (0.0f64, 0.0f64);
                outs[0].qavg.for_each_logical(|_, x| {
                    err = worst(err, (x - want[k]).abs());
                    size = size.max(want[k].abs());
                    k += 1;
                });
                oracle_err = worst(oracle_err, relative(err, size));
            }
            if sample == 0 {
                if let Some(dir) = &args.dump_dir {
                    for (i, &v) in Variant::ALL.iter().enumerate() {
                        if i == 0 || common.variant.0.contains(&v) {
                            let path = dir.join(format!("qavg_{v}_N{n}.txt"));
                            fs::write(&path, tensor_to_string(&outs[i].qavg))
                                .with_context(|| format!("writing {}", path.display()))?;
                        }
                    }
                }
            }
        }

        sink.record("layout-roundtrip", n, m, None, layout_err, 0.0);
        for (i, &v) in Variant::ALL.iter().enumerate() {
            if !(i == 0 || common.variant.0.contains(&v)) {
                continue;
            }
            if i > 0 {
                sink.record("equivalence", n, m, Some(v), equiv[i], equivalence_tol(n));
            }
            sink.record("padding", n, m, Some(v), if padding_bad[i] { 1.0 } else { 0.0 }, 0.0);
        }
        if dense.is_some() {
            sink.record("dense-oracle", n, m, Some(Variant::Generic), oracle_err, ORACLE_TOL);
        } else {
            sink.lines.push(format!(
                "[SKIP] N={n} m={m} dense-oracle: operator larger than {MAX_DENSE_DOFS} dofs or sources present"
            ));
        }
    }
    let outcome = Outcome::from_ok(sink.ok);
    sink.lines.push(format!(
        "check: {}",
        if sink.ok {
            "all suites passed"
        } else {
            "violations found"
        }
    ));
    Ok(Report {
        lines: sink.lines,
        table: sink.table,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operators_pass_and_fault_is_caught() {
        for n in 1..=12 {
            let mut ops = BasisOperators::new(n).unwrap();
            assert!(quadrature_error(&ops) <= OPERATOR_TOL, "N={n}");
            assert!(derivative_error(&ops) <= OPERATOR_TOL, "N={n}");
            inject(&mut ops, Fault::DBitflip);
            assert!(!(derivative_error(&ops) <= OPERATOR_TOL), "N={n}");
        }
    }
}

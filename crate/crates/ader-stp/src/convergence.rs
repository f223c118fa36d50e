//! `convergence`: advected sinusoid on refined periodic meshes.

use std::f64::consts::PI;
use std::fs;

use ader_stp_core::basis::BasisOperators;
use ader_stp_core::solver::{step_plan, Mesh};
use ader_stp_core::{ElementTensor, Error, LinearPde, StpConfig, Variant};
use anyhow::Context;

use crate::cli::{ConvergenceArgs, PdeKind};
use crate::csv::{Cell, Table};
use crate::dump::write_field;
use crate::parallel;
use crate::setup::{check_common, usage, Outcome, PdeChoice, Report, ADVECTION_VELOCITY};

pub const DEFAULT_ORDERS: [usize; 3] = [2, 3, 4];
/// Observed order must reach `N - ORDER_SLACK`.
pub const ORDER_SLACK: f64 = 0.5;
/// Largest difference allowed between final states of two variants.
pub const VARIANT_TOL: f64 = 1e-9;
/// A run whose L2 norm grows past this factor counts as unstable.
pub const GROWTH_LIMIT: f64 = 1e3;

/// Initial and exact profile, identical in every quantity up to a phase.
pub fn profile(amplitude: f64, x: [f64; 3], t: f64, out: &mut [f64]) {
    let v = ADVECTION_VELOCITY;
    let arg = (x[0] - v[0] * t) + (x[1] - v[1] * t) + (x[2] - v[2] * t);
    for (s, o) in out.iter_mut().enumerate() {
        *o = amplitude * (2.0 * PI * (arg + 0.25 * s as f64)).sin();
    }
}

pub struct Run {
    pub steps: usize,
    pub dt: f64,
    /// `Err` when the run blew up.
    pub result: Result<(f64, Vec<ElementTensor>), String>,
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    pde: &(dyn LinearPde + Sync),
    n: usize,
    e: usize,
    vec_width: usize,
    variant: Variant,
    args: &ConvergenceArgs,
    field: Option<&std::path::Path>,
) -> anyhow::Result<Run> {
    let config = StpConfig::new(n, pde.quantities(), vec_width)?;
    let ops = BasisOperators::new(n)?;
    let mut mesh = Mesh::new(e, 1.0, config)?;
    let amp = args.amplitude;
    mesh.set_state(&ops, |x, out| profile(amp, x, 0.0, out));
    let norm = |mesh: &Mesh| mesh.l2_error(&ops, |_, out| out.fill(0.0));
    let start = norm(&mesh);
    let (steps, dt) = step_plan(&mesh, pde, args.t_end, args.cfl);
    let result = match parallel::run_steps(pde, &ops, &mut mesh, steps, dt, variant, args.common.workers) {
        Err(e @ Error::Unstable(_)) => Err(e.to_string()),
        Err(e) => return Err(e.into()),
        Ok(()) if !(norm(&mesh) <= GROWTH_LIMIT * start.max(f64::MIN_POSITIVE)) => {
            Err(format!("L2 norm grew past {GROWTH_LIMIT:e} times its initial value"))
        }
        Ok(()) => {
            let t = mesh.time;
            Ok(mesh.l2_error(&ops, |x, out| profile(amp, x, t, out)))
        }
    };
    if let (Some(path), Ok(_)) = (field, &result) {
        let mut f =
            std::io::BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
        write_field(&mut f, &mesh, &ops)?;
    }
    Ok(Run {
        steps,
        dt,
        result: result.map(|err| (err, mesh.cells)),
    })
}

pub fn run(args: &ConvergenceArgs) -> anyhow::Result<Report> {
    let common = &args.common;
    check_common(common)?;
    let choice = PdeChoice::from_common(common, PdeKind::Advection)?;
    if !matches!(choice, PdeChoice::Advection(_) | PdeChoice::NcpAdvection(_)) {
        return usage(
            "convergence needs --pde advection or ncp-advection (the exact solution is a translated sinusoid)",
        );
    }
    if args.meshes.len() < 2 || args.meshes.contains(&0) || args.meshes.windows(2).any(|w| w[1] <= w[0]) {
        return usage("--meshes needs at least two increasing element counts");
    }
    if !(args.t_end > 0.0) || !(args.cfl > 0.0) {
        return usage("--t-end and --cfl must be positive");
    }
    if let Some(dir) = &args.field_out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let pde = choice.get();
    let orders = common.order.clone().map_or_else(|| DEFAULT_ORDERS.to_vec(), |o| o.0);

    let mut table = Table::new(&[
        "pde",
        "variant",
        "N",
        "e",
        "steps",
        "dt",
        "l2_error",
        "observed_order",
        "status",
    ]);
    let mut lines = Vec::new();
    let mut ok = true;
    for &n in &orders {
        // final states of the first variant, per mesh
        let mut reference: Vec<Option<Vec<ElementTensor>>> = vec![None; args.meshes.len()];
        for (vi, &variant) in common.variant.0.iter().enumerate() {
            let mut prev: Option<(usize, f64)> = None;
            for (mi, &e) in args.meshes.iter().enumerate() {
                let field = args
                    .field_out
                    .as_ref()
                    .map(|d| d.join(format!("field_{variant}_N{n}_e{e}.txt")));
                let run = simulate(pde, n, e, common.vec_width, variant, args, field.as_deref())?;
                let (err, order, status) = match run.result {
                    Err(err) => {
                        ok = false;
                        lines.push(format!("[FAIL] N={n} e={e} {variant}: run aborted ({err})"));
                        prev = None;
                        (None, None, "unstable")
                    }
                    Ok((err, cells)) => {
                        let order = prev.map(|(pe, perr)| observed_order(perr, err, pe, e));
                        let mut status = "ok";
                        if let Some(o) = order {
                            if !(o >= n as f64 - ORDER_SLACK) {
                                status = "low-order";
                            }
                        }
                        if vi == 0 {
                            reference[mi] = Some(cells);
                        } else if let Some(base) = &reference[mi] {
                            let diff = cells
                                .iter()
                                .zip(base)
                                .map(|(a, b)| a.max_abs_diff(b).unwrap_or(f64::INFINITY))
                                .fold(0.0, f64::max);
                            if !(diff <= VARIANT_TOL) {
                                status = "variant-mismatch";
                            }
                        }
                        ok &= status == "ok";
                        let tag = if status == "ok" { "PASS" } else { "FAIL" };
                        let shown = order.map_or(String::new(), |o| format!(" order {o:.3}"));
                        lines.push(format!(
                            "[{tag}] N={n} e={e} {variant}: L2 error {err:.3e}{shown} ({status})"
                        ));
                        prev = Some((e, err));
                        (Some(err), order, status)
                    }
                };
                table.push(vec![
                    choice.name().into(),
                    variant.name().into(),
                    n.into(),
                    e.into(),
                    run.steps.into(),
                    run.dt.into(),
                    Cell::from(err),
                    Cell::from(order),
                    status.into(),
                ]);
            }
        }
    }
    Ok(Report {
        lines,
        table,
        outcome: Outcome::from_ok(ok),
    })
}

/// `log(err_coarse / err_fine) / log(e_fine / e_coarse)`. Exact zero on
/// both meshes counts as infinitely accurate.
pub fn observed_order(err_coarse: f64, err_fine: f64, e_coarse: usize, e_fine: usize) -> f64 {
    if err_coarse == 0.0 && err_fine == 0.0 {
        return f64::INFINITY;
    }
    (err_coarse / err_fine).ln() / (e_fine as f64 / e_coarse as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_from_error_ratio() {
        assert!((observed_order(27.0, 1.0, 3, 9) - 3.0).abs() < 1e-12);
        assert!((observed_order(4.0, 1.0, 4, 8) - 2.0).abs() < 1e-12);
        assert_eq!(observed_order(0.0, 0.0, 3, 9), f64::INFINITY);
    }

    #[test]
    fn profile_translates_with_velocity() {
        let (mut a, mut b) = ([0.0; 2], [0.0; 2]);
        let v = ADVECTION_VELOCITY;
        profile(1.0, [0.1, 0.2, 0.3], 0.0, &mut a);
        profile(1.0, [0.1 + 0.4 * v[0], 0.2 + 0.4 * v[1], 0.3 + 0.4 * v[2]], 0.4, &mut b);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

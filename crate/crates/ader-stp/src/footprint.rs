//! `footprint`: scratch bytes per variant against a cache budget.

use ader_stp_core::predictor::scratch_bytes;
use ader_stp_core::StpConfig;

use crate::cli::FootprintArgs;
use crate::csv::Table;
use crate::setup::{check_common, Outcome, PdeChoice, Report};

pub const DEFAULT_ORDERS: std::ops::RangeInclusive<usize> = 4..=11;
/// Quantity count of the large elastic systems used in production runs.
pub const DEFAULT_QUANTITIES: usize = 25;

/// First order in `orders` whose scratch exceeds `budget`.
pub fn first_exceedance(
    variant: ader_stp_core::Variant,
    m: usize,
    vec_width: usize,
    orders: &[usize],
    budget: Option<usize>,
) -> ader_stp_core::Result<Option<usize>> {
    let Some(budget) = budget else { return Ok(None) };
    for &n in orders {
        if scratch_bytes(variant, &StpConfig::new(n, m, vec_width)?) > budget {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

pub fn run(args: &FootprintArgs) -> anyhow::Result<Report> {
    let common = &args.common;
    check_common(common)?;
    let m = match (common.quantities, common.pde) {
        (Some(0), _) => return crate::setup::usage("--quantities must be at least 1"),
        (_, Some(kind)) => PdeChoice::build(kind, common.quantities)?.get().quantities(),
        (Some(q), None) => q,
        (None, None) => DEFAULT_QUANTITIES,
    };
    let orders = common.order.clone().map_or_else(|| DEFAULT_ORDERS.collect(), |o| o.0);
    let budget = args.cache_bytes.0;
    let mut table = Table::new(&[
        "variant",
        "N",
        "m",
        "vec_width",
        "scratch_bytes",
        "exceeds_cache",
        "first_exceedance",
    ]);
    let mut lines = vec![match budget {
        Some(b) => format!("footprint: m={m} vec_width={} cache budget {b} bytes", common.vec_width),
        None => format!("footprint: m={m} vec_width={} no cache budget", common.vec_width),
    }];
    for &variant in &common.variant.0 {
        let first = first_exceedance(variant, m, common.vec_width, &orders, budget)?;
        lines.push(match first {
            Some(n) => format!("{variant}: exceeds the budget from N={n}"),
            None => format!("{variant}: within the budget for all requested N"),
        });
        for &n in &orders {
            let bytes = scratch_bytes(variant, &StpConfig::new(n, m, common.vec_width)?);
            let exceeds = budget.is_some_and(|b| bytes > b);
            table.push(vec![
                variant.name().into(),
                n.into(),
                m.into(),
                common.vec_width.into(),
                bytes.into(),
                (if exceeds { "yes" } else { "no" }).into(),
                (if first == Some(n) { "yes" } else { "no" }).into(),
            ]);
        }
    }
    Ok(Report {
        lines,
        table,
        outcome: Outcome::Pass,
    })
}

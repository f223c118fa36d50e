//! `bench`: median wall time of repeated predictor sweeps over a set of
//! random elements, with a warm arena per worker.

use std::thread;
use std::time::Instant;

use ader_stp_core::basis::BasisOperators;
use ader_stp_core::predictor::{flop_count, predict, scratch_bytes};
use ader_stp_core::{ElementTensor, LinearPde, PredictorOutput, ScratchArena, StepContext, StpConfig, Variant};

use crate::cli::{BenchArgs, PdeKind};
use crate::csv::Table;
use crate::rng::DofRng;
use crate::setup::{check_common, equivalence_tol, reference_dt, usage, Outcome, PdeChoice, Report};

pub const DEFAULT_ORDERS: [usize; 3] = [4, 6, 8];
pub const MIN_REPS: usize = 5;
/// Orders from which the directional speed claims are asserted.
pub const SPEEDUP_MIN_ORDER: usize = 8;
pub const SPEEDUP_MIN_QUANTITIES: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub variant: Variant,
    pub n: usize,
    pub m: usize,
    pub elements: usize,
    pub steps: usize,
    pub wall_seconds: f64,
    pub flop_estimate: u64,
    pub flops_per_second: f64,
    pub scratch_bytes: usize,
    pub max_abs_diff_vs_generic: f64,
}

pub const HEADER: [&str; 10] = [
    "variant",
    "N",
    "m",
    "elements",
    "steps",
    "wall_seconds",
    "flop_estimate",
    "flops_per_second",
    "scratch_bytes",
    "max_abs_diff_vs_generic",
];

pub fn table(records: &[BenchRecord]) -> Table {
    let mut t = Table::new(&HEADER);
    for r in records {
        t.push(vec![
            r.variant.name().into(),
            r.n.into(),
            r.m.into(),
            r.elements.into(),
            r.steps.into(),
            r.wall_seconds.into(),
            r.flop_estimate.into(),
            r.flops_per_second.into(),
            r.scratch_bytes.into(),
            r.max_abs_diff_vs_generic.into(),
        ]);
    }
    t
}

pub struct Plan<'a> {
    pub pde: &'a (dyn LinearPde + Sync),
    pub elements: usize,
    pub steps: usize,
    pub reps: usize,
    pub workers: usize,
    pub vec_width: usize,
    pub seed: u64,
}

fn sweep(
    variant: Variant,
    plan: &Plan<'_>,
    qs: &[ElementTensor],
    ctx: &StepContext,
    ops: &BasisOperators,
    arenas: &mut [ScratchArena],
    outs: &mut [PredictorOutput],
) -> ader_stp_core::Result<()> {
    let block = qs.len().div_ceil(arenas.len());
    let one = |qs: &[ElementTensor], arena: &mut ScratchArena, outs: &mut [PredictorOutput]| {
        for _ in 0..plan.steps {
            for (q, out) in qs.iter().zip(outs.iter_mut()) {
                predict(variant, q, plan.pde, ctx, ops, arena, out)?;
            }
        }
        Ok(())
    };
    if arenas.len() == 1 {
        return one(qs, &mut arenas[0], outs);
    }
    thread::scope(|s| {
        let handles: Vec<_> = qs
            .chunks(block)
            .zip(outs.chunks_mut(block))
            .zip(arenas.iter_mut())
            .map(|((qs, outs), arena)| s.spawn(move || one(qs, arena, outs)))
            .collect();
        handles
            .into_iter()
            .try_for_each(|h| h.join().expect("bench worker panicked"))
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[k]
    } else {
        0.5 * (xs[k - 1] + xs[k])
    }
}

/// Times every variant at order `n`. Generic always runs once to provide
/// the reference outputs.
pub fn measure(plan: &Plan<'_>, n: usize, variants: &[Variant]) -> anyhow::Result<Vec<BenchRecord>> {
    let m = plan.pde.quantities();
    let config = StpConfig::new(n, m, plan.vec_width)?;
    let ops = BasisOperators::new(n)?;
    let ctx = StepContext::new(0.0, reference_dt(plan.pde, n), 1.0)?;
    let mut rng = DofRng::new(plan.seed);
    let qs: Vec<_> = (0..plan.elements).map(|_| rng.tensor(config.aos())).collect();
    let workers = plan.workers.clamp(1, plan.elements);

    let mut reference = vec![PredictorOutput::new(&config); plan.elements];
    let mut arena = ScratchArena::new(Variant::Generic, config);
    for (q, out) in qs.iter().zip(reference.iter_mut()) {
        predict(Variant::Generic, q, plan.pde, &ctx, &ops, &mut arena, out)?;
    }

    let mut records = Vec::new();
    for &variant in variants {
        let mut arenas: Vec<_> = (0..workers).map(|_| ScratchArena::new(variant, config)).collect();
        let mut outs = vec![PredictorOutput::new(&config); plan.elements];
        sweep(variant, plan, &qs, &ctx, &ops, &mut arenas, &mut outs)?;
        let mut diff = 0.0f64;
        for (a, b) in outs.iter().zip(&reference) {
            diff = diff.max(a.max_abs_diff(b)?);
        }
        let mut times = Vec::with_capacity(plan.reps);
        for _ in 0..plan.reps {
            let start = Instant::now();
            sweep(variant, plan, &qs, &ctx, &ops, &mut arenas, &mut outs)?;
            times.push(start.elapsed().as_secs_f64().max(1e-9));
        }
        let wall = median(times);
        let flops = flop_count(variant, &config) * (plan.elements * plan.steps) as u64;
        records.push(BenchRecord {
            variant,
            n,
            m,
            elements: plan.elements,
            steps: plan.steps,
            wall_seconds: wall,
            flop_estimate: flops,
            flops_per_second: flops as f64 / wall,
            scratch_bytes: scratch_bytes(variant, &config),
            max_abs_diff_vs_generic: diff,
        });
    }
    Ok(records)
}

fn wall(records: &[BenchRecord], v: Variant, n: usize) -> Option<f64> {
    records
        .iter()
        .find(|r| r.variant == v && r.n == n)
        .map(|r| r.wall_seconds)
}

/// Directional claims at `N >= 8`: splitck no slower than log, and aosoa
/// no slower than splitck when `m >= 9`. Returns the violated claims.
pub fn speedup_violations(records: &[BenchRecord]) -> Vec<String> {
    let mut out = Vec::new();
    let mut orders: Vec<_> = records.iter().map(|r| (r.n, r.m)).collect();
    orders.dedup();
    for (n, m) in orders {
        if n < SPEEDUP_MIN_ORDER {
            continue;
        }
        let pairs = [
            (Variant::SplitCk, Variant::Log, true),
            (Variant::AosoaSplitCk, Variant::SplitCk, m >= SPEEDUP_MIN_QUANTITIES),
        ];
        for (fast, slow, applies) in pairs {
            if let (true, Some(a), Some(b)) = (applies, wall(records, fast, n), wall(records, slow, n)) {
                if a > b {
                    out.push(format!("N={n}: {fast} {a:.3e} s > {slow} {b:.3e} s"));
                }
            }
        }
    }
    out
}

pub fn run(args: &BenchArgs) -> anyhow::Result<Report> {
    let common = &args.common;
    check_common(common)?;
    if args.reps < MIN_REPS {
        return usage(format!("--reps must be at least {MIN_REPS}"));
    }
    if args.elements == 0 || args.steps == 0 {
        return usage("--elements and --steps must be at least 1");
    }
    let choice = PdeChoice::from_common(common, PdeKind::Elastic)?;
    let plan = Plan {
        pde: choice.get(),
        elements: args.elements,
        steps: args.steps,
        reps: args.reps,
        workers: common.workers,
        vec_width: common.vec_width,
        seed: common.seed,
    };
    let orders = common.order.clone().map_or_else(|| DEFAULT_ORDERS.to_vec(), |o| o.0);
    let mut records = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for &n in &orders {
        let rs = measure(&plan, n, &common.variant.0)?;
        for r in &rs {
            lines.push(format!(
                "{:>8} N={:<2} median {:.3e} s  {:.3} GFLOP/s  scratch {} B  diff {:.1e}",
                r.variant.name(),
                r.n,
                r.wall_seconds,
                r.flops_per_second * 1e-9,
                r.scratch_bytes,
                r.max_abs_diff_vs_generic
            ));
        }
        records.extend(rs);
    }
    // correctness is always asserted, relative to the reference magnitude
    for r in &records {
        let tol = equivalence_tol(r.n) * reference_scale(&plan, r.n)?;
        if !(r.max_abs_diff_vs_generic <= tol) {
            ok = false;
            lines.push(format!(
                "[FAIL] {} N={}: differs from generic by {:e}",
                r.variant, r.n, r.max_abs_diff_vs_generic
            ));
        }
    }
    let slow = speedup_violations(&records);
    for s in &slow {
        lines.push(format!(
            "{} speed claim: {s}",
            if args.assert_speedup { "[FAIL]" } else { "[info]" }
        ));
    }
    if args.assert_speedup {
        ok &= slow.is_empty();
    }
    Ok(Report {
        lines,
        table: table(&records),
        outcome: Outcome::from_ok(ok),
    })
}

/// Largest generic output magnitude over the benchmark elements.
fn reference_scale(plan: &Plan<'_>, n: usize) -> anyhow::Result<f64> {
    let config = StpConfig::new(n, plan.pde.quantities(), plan.vec_width)?;
    let ops = BasisOperators::new(n)?;
    let ctx = StepContext::new(0.0, reference_dt(plan.pde, n), 1.0)?;
    let mut rng = DofRng::new(plan.seed);
    let mut arena = ScratchArena::new(Variant::Generic, config);
    let mut out = PredictorOutput::new(&config);
    let mut scale = 0.0f64;
    for _ in 0..plan.elements {
        let q = rng.tensor(config.aos());
        predict(Variant::Generic, &q, plan.pde, &ctx, &ops, &mut arena, &mut out)?;
        scale = scale.max(out.max_abs());
    }
    Ok(scale.max(f64::MIN_POSITIVE))
}

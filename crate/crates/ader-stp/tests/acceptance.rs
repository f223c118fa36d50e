//! Acceptance criteria 1 to 9, one `[PASS]`/`[FAIL]` line each.
//!
//! Criteria listed in `EXPECTED_RED` are known not to hold for the
//! documented sizing formulas; they still run and print their verdict but
//! do not fail the target.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ader_stp::bench::{self, Plan};
use ader_stp::cli::{Cli, Command};
use ader_stp::csv::Cell;
use ader_stp::rng::DofRng;
use ader_stp::setup::reference_dt;
use ader_stp::Outcome;
use ader_stp_core::basis::{gauss_legendre, BasisOperators};
use ader_stp_core::layout::{aos_to_aosoa, aosoa_to_aos, fused_slice, pad, slice, Axis, TensorIndex};
use ader_stp_core::microgemm::{gemm, gemm_transposed};
use ader_stp_core::pde::{Advection, DemoPde, Elastic, GaussianPulse, PointSource};
use ader_stp_core::predictor::{materialize_volume_operator, predict, scratch_bytes, stp_generic};
use ader_stp_core::{
    ElementTensor, GemmSpec, LayoutSpec, LinearPde, PredictorOutput, ScratchArena, StepContext, StpConfig, Variant,
};
use clap::Parser;

/// Criterion 4 asks for `splitck / log < (1 + slack) / (3N)`. With the
/// sizing table the ratio is `3 Tp / ((4N + 6) Tp + ...)`, about
/// `3 / (4N + 7)`, which is above `1 / (3N)` for every N >= 1.
const EXPECTED_RED: &[u8] = &[4];

const MIB: usize = 1 << 20;

struct Verdict {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn elastic() -> Elastic {
    Elastic::new(2.0, 1.0, 1.0).unwrap()
}

fn run_variant(
    variant: Variant,
    q: &ElementTensor,
    pde: &dyn LinearPde,
    ctx: &StepContext,
    ops: &BasisOperators,
) -> PredictorOutput {
    let config = StpConfig::new(q.spec().n, q.spec().m, q.spec().vec_width).unwrap();
    let mut arena = ScratchArena::new(variant, config);
    let mut out = PredictorOutput::new(&config);
    predict(variant, q, pde, ctx, ops, &mut arena, &mut out).unwrap();
    out
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let pde = elastic();
    let mut worst = Vec::new();
    let mut pass = true;
    for n in 3..=9 {
        let tol = if n == 9 { 1e-9 } else { 1e-10 };
        let config = StpConfig::new(n, 9, 8).unwrap();
        let ops = BasisOperators::new(n).unwrap();
        let ctx = StepContext::new(0.0, reference_dt(&pde, n), 1.0).unwrap();
        let mut rel = 0.0f64;
        for seed in 0..10 {
            let q = DofRng::new(seed).tensor(config.aos());
            let reference = run_variant(Variant::Generic, &q, &pde, &ctx, &ops);
            let scale = reference.max_abs();
            for v in [Variant::Log, Variant::SplitCk, Variant::AosoaSplitCk] {
                let out = run_variant(v, &q, &pde, &ctx, &ops);
                let e = out.max_abs_diff(&reference).unwrap() / scale;
                rel = if e.is_nan() { f64::INFINITY } else { rel.max(e) };
            }
        }
        pass &= rel <= tol;
        worst.push(format!("N={n}:{rel:.1e}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    Verdict {
        id: 1,
        title: "variant equivalence (elastic, seeds 0-9, N=3..9)",
        pass,
        detail: format!("worst relative {} in {:.1}s", worst.join(" "), elapsed.as_secs_f64()),
    }
}

/// Dense operator from Kronecker structure: on the AoS index
/// `((z n + y) n + x) m + s`, direction `d` couples nodes that differ only
/// in coordinate `d` through `D`, and quantities through the flux plus
/// non-conservative Jacobian.
fn kron_operator(pde: &dyn LinearPde, ops: &BasisOperators) -> Vec<f64> {
    let (n, m) = (ops.order(), pde.quantities());
    let dofs = n * n * n * m;
    let mut jac = vec![vec![0.0; m * m]; 3];
    let (mut e, mut f, mut g) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for (d, jd) in jac.iter_mut().enumerate() {
        for r in 0..m {
            e.fill(0.0);
            e[r] = 1.0;
            pde.flux(&e, d, &mut f);
            pde.ncp(&e, d, &mut g);
            for s in 0..m {
                jd[s * m + r] = f[s] + g[s];
            }
        }
    }
    let mut v = vec![0.0; dofs * dofs];
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let row = [x, y, z];
                for (d, jd) in jac.iter().enumerate() {
                    for l in 0..n {
                        let mut col = row;
                        col[d] = l;
                        let dkl = ops.dudx[row[d] * n + l];
                        let ri = ((z * n + y) * n + x) * m;
                        let ci = ((col[2] * n + col[1]) * n + col[0]) * m;
                        for s in 0..m {
                            for r in 0..m {
                                v[(ri + s) * dofs + ci + r] += dkl * jd[s * m + r];
                            }
                        }
                    }
                }
            }
        }
    }
    v
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let el = elastic();
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, pde) in [(3usize, &DemoPde as &dyn LinearPde), (4, &el)] {
        let m = pde.quantities();
        let ops = BasisOperators::new(n).unwrap();
        let v = kron_operator(pde, &ops);
        let materialized = materialize_volume_operator(pde, &ops).unwrap();
        let op_err = v
            .iter()
            .zip(&materialized)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let config = StpConfig::new(n, m, 8).unwrap();
        let q = DofRng::new(42).tensor(config.aos());
        let dt = 0.05;
        let mut term = Vec::new();
        q.for_each_logical(|_, x| term.push(x));
        let dofs = term.len();
        let mut want = vec![0.0; dofs];
        let mut c = 1.0;
        for o in 0..n {
            c *= dt / (o + 1) as f64;
            for (w, t) in want.iter_mut().zip(&term) {
                *w += c * t;
            }
            term = (0..dofs)
                .map(|i| (0..dofs).map(|j| materialized[i * dofs + j] * term[j]).sum())
                .collect();
        }
        let mut arena = ScratchArena::new(Variant::Generic, config);
        let mut out = PredictorOutput::new(&config);
        stp_generic(&q, pde, &StepContext::reference(dt), &ops, &mut arena, &mut out).unwrap();
        let (mut err, mut scale, mut k) = (0.0f64, 0.0f64, 0);
        out.qavg.for_each_logical(|_, x| {
            err = err.max((x - want[k]).abs());
            scale = scale.max(want[k].abs());
            k += 1;
        });
        let rel = err / scale;
        pass &= rel <= 1e-11 && op_err <= 1e-12;
        detail.push(format!("(N={n},m={m}) rel {rel:.1e}, operator vs kron {op_err:.1e}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    Verdict {
        id: 2,
        title: "dense operator oracle",
        pass,
        detail: format!("{} in {:.1}s", detail.join("; "), elapsed.as_secs_f64()),
    }
}

fn criterion_3() -> Verdict {
    let (mut quad, mut deriv) = (0.0f64, 0.0f64);
    for n in 1..=12 {
        let ops = BasisOperators::new(n).unwrap();
        for k in 0..2 * n {
            let q: f64 = (0..n).map(|i| ops.weights[i] * ops.nodes[i].powi(k as i32)).sum();
            quad = quad.max((q - 1.0 / (k + 1) as f64).abs());
        }
        for j in 0..n {
            for k in 0..n {
                let d: f64 = (0..n).map(|l| ops.dudx[k * n + l] * ops.nodes[l].powi(j as i32)).sum();
                let exact = if j == 0 {
                    0.0
                } else {
                    j as f64 * ops.nodes[k].powi(j as i32 - 1)
                };
                deriv = deriv.max((d - exact).abs());
            }
        }
    }
    Verdict {
        id: 3,
        title: "operator exactness (N=1..12)",
        pass: quad <= 1e-12 && deriv <= 1e-12,
        detail: format!("quadrature {quad:.1e}, derivative {deriv:.1e}"),
    }
}

fn criterion_4() -> Verdict {
    let (m, v) = (25, 8);
    let bytes = |variant, n| scratch_bytes(variant, &StpConfig::new(n, m, v).unwrap());
    let first = (1..=16).find(|&n| bytes(Variant::Generic, n) > MIB);
    let ratios: Vec<f64> = (4..=11)
        .map(|n| bytes(Variant::SplitCk, n) as f64 / bytes(Variant::Log, n) as f64)
        .collect();
    let monotone = ratios.windows(2).all(|w| w[1] < w[0]);
    let slack = pad(m, v) as f64 / m as f64;
    let bound_failures: Vec<String> = (4..=11)
        .zip(&ratios)
        .filter(|(n, r)| **r >= slack / (3 * n) as f64 || r.is_nan())
        .map(|(n, r)| format!("N={n}: {r:.4} vs {:.4}", slack / (3 * n) as f64))
        .collect();
    let pass = first == Some(6) && monotone && bound_failures.is_empty();
    Verdict {
        id: 4,
        title: "footprint (generic exceeds 1 MiB at N=6, splitck/log shrinking and bounded)",
        pass,
        detail: format!(
            "first generic exceedance N={}, ratio monotone {monotone}, ratios {}, bound (1+slack)/(3N) broken at {}",
            first.map_or("none".into(), |n| n.to_string()),
            ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(" "),
            if bound_failures.is_empty() {
                "no N".into()
            } else {
                bound_failures.join(", ")
            }
        ),
    }
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let cli = Cli::parse_from([
        "ader-stp",
        "convergence",
        "--order",
        "2,3",
        "--variant",
        "all",
        "--meshes",
        "3,9",
    ]);
    let Command::Convergence(args) = &cli.command else {
        unreachable!()
    };
    let report = ader_stp::convergence::run(args).unwrap();
    let t = &report.table;
    let (ni, oi, si, vi) = (
        t.column("N").unwrap(),
        t.column("observed_order").unwrap(),
        t.column("status").unwrap(),
        t.column("variant").unwrap(),
    );
    let mut orders = Vec::new();
    let mut statuses_ok = true;
    for row in t.rows() {
        statuses_ok &= row[si] == Cell::Text("ok".into());
        if let (Cell::Float(o), Cell::Int(n), Cell::Text(v)) = (&row[oi], &row[ni], &row[vi]) {
            if v == "generic" {
                orders.push(format!("N={n}:{o:.2}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = report.outcome == Outcome::Pass && statuses_ok && elapsed < Duration::from_secs(300);
    Verdict {
        id: 5,
        title: "advection convergence e=3 vs e=9, all variants identical",
        pass,
        detail: format!(
            "observed orders {} (need >= N-0.5), runs agree to 1e-9: {statuses_ok}, {:.1}s",
            orders.join(" "),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Verdict {
    let mut rng = DofRng::new(6);
    let mut gemm_ok = true;
    for (m, k, n) in [(3, 3, 5), (6, 6, 9), (8, 8, 25), (12, 12, 7), (5, 7, 1)] {
        let a: Vec<f64> = (0..m * k).map(|_| rng.uniform()).collect();
        let b: Vec<f64> = (0..k * n).map(|_| rng.uniform()).collect();
        let mut c = vec![0.0; m * n];
        gemm(&GemmSpec::new(m, k, n), &a, &b, &mut c).unwrap();
        for extra in [1, 3, 8] {
            let w = n + extra;
            let mut bw = vec![0.0; k * w];
            for r in 0..k {
                bw[r * w..r * w + n].copy_from_slice(&b[r * n..][..n]);
            }
            let mut cw = vec![0.0; m * w];
            gemm(&GemmSpec::new(m, k, w), &a, &bw, &mut cw).unwrap();
            for r in 0..m {
                gemm_ok &= cw[r * w..r * w + n]
                    .iter()
                    .zip(&c[r * n..][..n])
                    .all(|(x, y)| x.to_bits() == y.to_bits());
                gemm_ok &= cw[r * w + n..(r + 1) * w].iter().all(|x| x.to_bits() == 0);
            }
            // transposed form: zero-padded columns of the AoSoA x rows
            let (rows, np) = (n, k + extra);
            let mut bt = vec![0.0; rows * k];
            let mut btw = vec![0.0; rows * np];
            for r in 0..rows {
                for j in 0..k {
                    bt[r * k + j] = rng.uniform();
                    btw[r * np + j] = bt[r * k + j];
                }
            }
            let at: Vec<f64> = (0..k * k).map(|_| rng.uniform()).collect();
            let (mut ct, mut ctw) = (vec![0.0; rows * k], vec![0.0; rows * np]);
            gemm_transposed(&GemmSpec::new(k, k, rows).strides(k, k, k), &bt, &at, &mut ct).unwrap();
            gemm_transposed(&GemmSpec::new(k, k, rows).strides(k, np, np), &btw, &at, &mut ctw).unwrap();
            for r in 0..rows {
                gemm_ok &= ctw[r * np..r * np + k]
                    .iter()
                    .zip(&ct[r * k..][..k])
                    .all(|(x, y)| x.to_bits() == y.to_bits());
                gemm_ok &= ctw[r * np + k..(r + 1) * np].iter().all(|x| x.to_bits() == 0);
            }
        }
    }
    // whole predictor: every vector width is a different zero padding of the
    // same operands
    let pde = elastic();
    let (mut padding_ok, mut widths_identical) = (true, true);
    for n in [1, 2, 3, 5, 8] {
        let ops = BasisOperators::new(n).unwrap();
        let ctx = StepContext::new(0.0, reference_dt(&pde, n), 1.0).unwrap();
        let q1 = DofRng::new(n as u64).tensor(LayoutSpec::aos(n, 9, 1).unwrap());
        for variant in Variant::ALL {
            let base = run_variant(variant, &q1, &pde, &ctx, &ops);
            padding_ok &= base.padding_is_zero();
            for w in [2, 4, 8, 16] {
                let mut q = ElementTensor::zeros(LayoutSpec::aos(n, 9, w).unwrap());
                q1.for_each_logical(|i, x| q.set(i.z, i.y, i.x, i.s, x));
                let out = run_variant(variant, &q, &pde, &ctx, &ops);
                padding_ok &= out.padding_is_zero();
                widths_identical &= out.max_abs_diff(&base).unwrap() == 0.0;
            }
        }
    }
    Verdict {
        id: 6,
        title: "padding neutrality",
        pass: gemm_ok && padding_ok && widths_identical,
        detail: format!("widened gemm bit-identical {gemm_ok}, output padding zero {padding_ok}, outputs identical across vec widths 1..16 {widths_identical}"),
    }
}

/// Checks every entry of `desc` against the logical tensor, padding lanes
/// included.
fn gather_matches(
    t: &ElementTensor,
    desc: &ader_stp_core::SliceDescriptor,
    at: impl Fn(usize, usize) -> Option<(usize, usize, usize, usize)>,
) -> bool {
    let g = desc.gather(t.as_slice());
    (0..desc.rows).all(|r| {
        (0..desc.cols).all(|c| {
            let want = at(r, c).map_or(0.0, |(z, y, x, s)| t.get(z, y, x, s));
            g[r * desc.cols + c].to_bits() == want.to_bits()
        })
    })
}

fn criterion_7() -> Verdict {
    let mut roundtrip = true;
    let mut gathers = true;
    for v in [4, 8] {
        for n in 1..=12 {
            for m in 1..=12 {
                let mut rng = DofRng::new((v * 1000 + n * 16 + m) as u64);
                let aos = rng.tensor(LayoutSpec::aos(n, m, v).unwrap());
                let soa = aos_to_aosoa(&aos).unwrap();
                roundtrip &= aosoa_to_aos(&soa).unwrap().as_slice() == aos.as_slice();
                roundtrip &= soa.padding_is_zero();
                let (mp, np) = (pad(m, v), pad(n, v));
                for k in [0, n / 2, n - 1] {
                    let fy =
                        fused_slice(aos.spec(), Axis::Y, (Axis::X, Axis::Q), TensorIndex::new(k, 0, 0, 0)).unwrap();
                    gathers &= gather_matches(&aos, &fy, |r, c| (c % mp < m).then_some((k, r, c / mp, c % mp)));
                    let fz =
                        fused_slice(aos.spec(), Axis::Z, (Axis::X, Axis::Q), TensorIndex::new(0, k, 0, 0)).unwrap();
                    gathers &= gather_matches(&aos, &fz, |r, c| (c % mp < m).then_some((r, k, c / mp, c % mp)));
                    let sy =
                        fused_slice(soa.spec(), Axis::Y, (Axis::Q, Axis::X), TensorIndex::new(k, 0, 0, 0)).unwrap();
                    gathers &= gather_matches(&soa, &sy, |r, c| (c % np < n).then_some((k, r, c % np, c / np)));
                    for x in [0, n - 1] {
                        let line = slice(aos.spec(), Axis::Y, Axis::Q, TensorIndex::new(k, 0, x, 0)).unwrap();
                        gathers &= gather_matches(&aos, &line, |r, c| Some((k, r, x, c)));
                        // a fused row is the concatenation of the per-x lines
                        let fused = fy.gather(aos.as_slice());
                        let part = line.gather(aos.as_slice());
                        for r in 0..n {
                            gathers &= fused[r * fy.cols + x * mp..][..m] == part[r * m..][..m];
                        }
                    }
                }
            }
        }
    }
    // the fixed configuration: N=6, m=12, rows of 72 contiguous values
    let spec = LayoutSpec::aos(6, 12, 4).unwrap();
    let t = DofRng::new(72).tensor(spec);
    let fixed = (0..6).all(|z| {
        let d = fused_slice(&spec, Axis::Y, (Axis::X, Axis::Q), TensorIndex::new(z, 0, 0, 0)).unwrap();
        d.slice_stride == 72
            && d.cols == 72
            && d.offset == 432 * z
            && gather_matches(&t, &d, |r, c| Some((z, r, c / 12, c % 12)))
    });
    Verdict {
        id: 7,
        title: "layout round trips and slice gathers",
        pass: roundtrip && gathers && fixed,
        detail: format!(
            "round trip n,m<=12 vec 4/8 {roundtrip}, gathers {gathers}, N=6 m=12 stride-72 fused slice {fixed}"
        ),
    }
}

/// Taylor coefficients `S^(o)(t)` of the pulse from the power series of
/// `exp(-(u0 + h)^2 / 2)` in `h`.
fn pulse_series(p: &GaussianPulse, t: f64, count: usize) -> Vec<f64> {
    let u0 = (t - p.center) / p.width;
    let mut e = vec![(-0.5 * u0 * u0).exp()];
    for k in 0..count {
        let prev = if k >= 1 { e[k - 1] } else { 0.0 };
        e.push((-u0 * e[k] - prev) / (k + 1) as f64);
    }
    let mut fact = 1.0;
    (0..count)
        .map(|o| {
            if o > 0 {
                fact *= o as f64;
            }
            p.amplitude * e[o] * fact / p.width.powi(o as i32)
        })
        .collect()
}

fn lagrange(nodes: &[f64], k: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, xj)| (x - xj) / (nodes[k] - xj))
        .product()
}

fn criterion_8() -> Verdict {
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for n in [3, 5] {
        let pulse = GaussianPulse::new(2.0, 0.1, 0.05).unwrap();
        let src = PointSource {
            position: [0.3, 0.55, 0.8],
            quantity: 1,
            pulse,
        };
        let pde = Advection::new([0.0; 3], 3).unwrap().with_source(src).unwrap();
        let ops = BasisOperators::new(n).unwrap();
        let (t, dt) = (0.08, 0.01);
        let ctx = StepContext::new(t, dt, 1.0).unwrap();
        // qavg = dt q0 + P * int_0^dt int_0^tau S_N(s) ds dtau, S_N the
        // (N-1)-term Taylor polynomial of the pulse around t
        let derivs = pulse_series(&pulse, t, n - 1);
        let series = |s: f64| {
            derivs
                .iter()
                .enumerate()
                .map(|(o, d)| d * s.powi(o as i32) / (1..=o).product::<usize>() as f64)
                .sum::<f64>()
        };
        let (gx, gw) = gauss_legendre(12).unwrap();
        let mut time_integral = 0.0;
        for (xi, wi) in gx.iter().zip(&gw) {
            let tau = xi * dt;
            let inner: f64 = gx.iter().zip(&gw).map(|(xj, wj)| wj * tau * series(xj * tau)).sum();
            time_integral += wi * dt * inner;
        }
        let basis = |k: usize, d: usize| lagrange(&ops.nodes, k, src.position[d]) / ops.weights[k];
        let q = DofRng::new(n as u64).tensor(StpConfig::new(n, 3, 8).unwrap().aos());
        let mut rel = 0.0f64;
        for variant in Variant::ALL {
            let out = run_variant(variant, &q, &pde, &ctx, &ops);
            let (mut err, mut scale) = (0.0f64, 0.0f64);
            out.qavg.for_each_logical(|i, v| {
                let p = if i.s == 1 {
                    basis(i.x, 0) * basis(i.y, 1) * basis(i.z, 2) * time_integral
                } else {
                    0.0
                };
                scale = scale.max(p.abs());
                err = err.max((v - (dt * q.get(i.z, i.y, i.x, i.s) + p)).abs());
            });
            rel = rel.max(err / scale);
        }
        worst = worst.max(rel);
        detail.push(format!("N={n}: {rel:.1e}"));
    }
    Verdict {
        id: 8,
        title: "point source vs time quadrature",
        pass: worst <= 1e-10,
        detail: format!("relative error {}", detail.join(", ")),
    }
}

fn l2_bytes() -> Option<usize> {
    let text = std::fs::read_to_string("/sys/devices/system/cpu/cpu0/cache/index2/size").ok()?;
    let text = text.trim();
    let (num, mult) = match text.strip_suffix('K') {
        Some(k) => (k, 1024),
        None => (text.strip_suffix('M')?, MIB),
    };
    num.parse::<usize>().ok().map(|v| v * mult)
}

fn criterion_9() -> Verdict {
    let asserted = std::env::var("ADER_STP_ASSERT_SPEEDUP").is_ok_and(|v| v == "1");
    let pde = elastic();
    let plan = Plan {
        pde: &pde,
        elements: 8,
        steps: 1,
        reps: 5,
        workers: 1,
        vec_width: 8,
        seed: 9,
    };
    let mut records = Vec::new();
    for n in [8, 9] {
        records.extend(bench::measure(&plan, n, &Variant::ALL).unwrap());
    }
    let csv = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance_bench.csv");
    bench::table(&records).emit(Some(&csv)).unwrap();
    let wall = |v: Variant, n: usize| {
        records
            .iter()
            .find(|r| r.variant == v && r.n == n)
            .unwrap()
            .wall_seconds
    };
    let ratios: Vec<String> = [8, 9]
        .iter()
        .map(|&n| {
            format!(
                "N={n} splitck/log {:.2} aosoa/splitck {:.2}",
                wall(Variant::SplitCk, n) / wall(Variant::Log, n),
                wall(Variant::AosoaSplitCk, n) / wall(Variant::SplitCk, n)
            )
        })
        .collect();
    let violations = bench::speedup_violations(&records);
    let l2 = l2_bytes();
    let eligible = cfg!(target_arch = "x86_64") && l2.is_some_and(|b| b * 2 <= 3 * MIB);
    let mode = match (asserted, eligible) {
        (false, _) => "informational".to_owned(),
        (true, true) => "asserted".to_owned(),
        (true, false) => format!("not asserted: L2 {l2:?} bytes or arch outside the stated machine class"),
    };
    Verdict {
        id: 9,
        title: "directional performance",
        pass: !(asserted && eligible) || violations.is_empty(),
        detail: format!("{mode}; {}; CSV at {}", ratios.join(", "), csv.display()),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Verdict; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let mut unexpected = 0;
    for c in criteria {
        let v = c();
        println!(
            "[{}] {} {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.title,
            v.detail
        );
        let red = EXPECTED_RED.contains(&v.id);
        if !v.pass && !red {
            unexpected += 1;
        } else if !v.pass {
            println!("       known unattainable under the sizing formulas, not counted");
        }
    }
    if unexpected == 0 {
        println!("acceptance: no unexpected failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} criteria failed");
        ExitCode::FAILURE
    }
}

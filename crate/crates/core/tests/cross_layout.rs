//! Public-API checks across layouts and kernel variants.

use ader_stp_core::basis::BasisOperators;
use ader_stp_core::layout::{aos_to_aosoa, aosoa_to_aos, fused_slice, slice, Axis, TensorIndex};
use ader_stp_core::microgemm::{gemm, gemm_transposed};
use ader_stp_core::pde::{DemoPde, Elastic};
use ader_stp_core::predictor::{predict, PredictorOutput, ScratchArena, StepContext, StpConfig, Variant};
use ader_stp_core::{ElementTensor, GemmSpec, LayoutSpec};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

fn random(spec: LayoutSpec, seed: u64) -> ElementTensor {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    ElementTensor::from_fn(spec, |_, _, _, _| rng.random_range(-1.0..1.0))
}

#[test]
fn transposed_x_derivative_matches_aos_slices() {
    for (n, m, v) in [(3, 4, 4), (5, 9, 8), (8, 6, 8), (9, 3, 4)] {
        let ops = BasisOperators::new(n).unwrap();
        let aos = random(LayoutSpec::aos(n, m, v).unwrap(), n as u64);
        let soa = aos_to_aosoa(&aos).unwrap();
        let spec = *soa.spec();

        // AoS: one D * slice GEMM per (z, y)
        let mut d_aos = ElementTensor::zeros(*aos.spec());
        for z in 0..n {
            for y in 0..n {
                let desc = slice(aos.spec(), Axis::X, Axis::Q, TensorIndex::new(z, y, 0, 0)).unwrap();
                let g = GemmSpec::new(n, n, desc.cols).strides(n, desc.slice_stride, desc.slice_stride);
                gemm(
                    &g,
                    &ops.dudx,
                    &aos.as_slice()[desc.offset..],
                    &mut d_aos.as_mut_slice()[desc.offset..],
                )
                .unwrap();
            }
        }
        // AoSoA: whole tensor times D^T
        let mut d_soa = ElementTensor::zeros(spec);
        let g = GemmSpec::new(n, n, n * n * m).strides(n, spec.n_pad(), spec.n_pad());
        gemm_transposed(&g, soa.as_slice(), &ops.dudx_t, d_soa.as_mut_slice()).unwrap();

        assert!(d_soa.padding_is_zero());
        let back = aosoa_to_aos(&d_soa).unwrap();
        let scale = d_aos.max_abs();
        assert!(back.max_abs_diff(&d_aos).unwrap() <= 1e-13 * scale, "n={n} m={m}");
    }
}

#[test]
fn fused_y_slices_match_per_line_slices() {
    let (n, m, v) = (6, 12, 4);
    let ops = BasisOperators::new(n).unwrap();
    let t = random(LayoutSpec::aos(n, m, v).unwrap(), 3);
    let spec = *t.spec();
    let mut fused = ElementTensor::zeros(spec);
    for z in 0..n {
        let desc = fused_slice(&spec, Axis::Y, (Axis::X, Axis::Q), TensorIndex::new(z, 0, 0, 0)).unwrap();
        assert_eq!((desc.slice_stride, desc.cols, desc.offset), (72, 72, z * 432));
        let g = GemmSpec::new(n, n, desc.cols).strides(n, desc.slice_stride, desc.slice_stride);
        gemm(
            &g,
            &ops.dudx,
            &t.as_slice()[desc.offset..],
            &mut fused.as_mut_slice()[desc.offset..],
        )
        .unwrap();
    }
    let mut lines = ElementTensor::zeros(spec);
    for z in 0..n {
        for x in 0..n {
            let desc = slice(&spec, Axis::Y, Axis::Q, TensorIndex::new(z, 0, x, 0)).unwrap();
            let g = GemmSpec::new(n, n, m).strides(n, desc.slice_stride, desc.slice_stride);
            gemm(
                &g,
                &ops.dudx,
                &t.as_slice()[desc.offset..],
                &mut lines.as_mut_slice()[desc.offset..],
            )
            .unwrap();
        }
    }
    assert_eq!(fused.as_slice(), lines.as_slice());
}

fn run(variant: Variant, q: &ElementTensor, pde: &dyn ader_stp_core::LinearPde, ctx: &StepContext) -> PredictorOutput {
    let spec = q.spec();
    let config = StpConfig::new(spec.n, spec.m, spec.vec_width).unwrap();
    let ops = BasisOperators::new(spec.n).unwrap();
    let mut arena = ScratchArena::new(variant, config);
    let mut out = PredictorOutput::new(&config);
    predict(variant, q, pde, ctx, &ops, &mut arena, &mut out).unwrap();
    out
}

#[test]
fn high_order_variants_agree() {
    let elastic = Elastic::new(2.0, 1.0, 1.0).unwrap();
    for n in 7..=9 {
        for (pde, m) in [(&elastic as &dyn ader_stp_core::LinearPde, 9), (&DemoPde, 6)] {
            let q = random(LayoutSpec::aos(n, m, 8).unwrap(), 100 + n as u64);
            let ctx = StepContext::new(1.0, 0.01, 3.0).unwrap();
            let reference = run(Variant::Generic, &q, pde, &ctx);
            let tol = if n == 9 { 1e-9 } else { 1e-10 };
            for variant in [Variant::Log, Variant::SplitCk, Variant::AosoaSplitCk] {
                let out = run(variant, &q, pde, &ctx);
                let err = out.max_abs_diff(&reference).unwrap() / reference.max_abs();
                assert!(err < tol, "{variant} N={n} m={m}: {err}");
                assert!(out.padding_is_zero());
            }
        }
    }
}

#[test]
fn arena_is_reused_across_elements() {
    let config = StpConfig::new(5, 9, 8).unwrap();
    let ops = BasisOperators::new(5).unwrap();
    let pde = Elastic::new(2.0, 1.0, 1.0).unwrap();
    let ctx = StepContext::reference(0.02);
    for variant in Variant::ALL {
        let mut arena = ScratchArena::new(variant, config);
        let bytes = arena.bytes();
        let mut out = PredictorOutput::new(&config);
        let mut fresh = PredictorOutput::new(&config);
        for seed in 0..3 {
            let q = random(config.aos(), seed);
            predict(variant, &q, &pde, &ctx, &ops, &mut arena, &mut out).unwrap();
            let mut clean = ScratchArena::new(variant, config);
            predict(variant, &q, &pde, &ctx, &ops, &mut clean, &mut fresh).unwrap();
            assert_eq!(out.max_abs_diff(&fresh).unwrap(), 0.0);
        }
        assert_eq!(arena.bytes(), bytes);
    }
}

//! Element-parallel time stepping.
//!
//! Each step splits the element range into one contiguous block per
//! worker; every worker owns an arena and writes its own block of
//! predictor outputs. The corrector then runs on the caller's thread, so
//! results do not depend on the worker count.

use std::thread;

use ader_stp_core::basis::BasisOperators;
use ader_stp_core::solver::{corrector_step, predict_range, Mesh};
use ader_stp_core::{LinearPde, PredictorOutput, ScratchArena, Variant};

pub fn run_steps(
    pde: &(dyn LinearPde + Sync),
    ops: &BasisOperators,
    mesh: &mut Mesh,
    steps: usize,
    dt: f64,
    variant: Variant,
    workers: usize,
) -> ader_stp_core::Result<()> {
    let config = mesh.config;
    let cells = mesh.cells.len();
    let workers = workers.clamp(1, cells.max(1));
    let block = cells.div_ceil(workers);
    let mut arenas: Vec<_> = (0..workers).map(|_| ScratchArena::new(variant, config)).collect();
    let mut outputs = vec![PredictorOutput::new(&config); cells];
    for _ in 0..steps {
        let shared = &*mesh;
        if workers == 1 {
            predict_range(shared, pde, ops, variant, dt, 0..cells, &mut arenas[0], &mut outputs)?;
        } else {
            thread::scope(|s| {
                let handles: Vec<_> = outputs
                    .chunks_mut(block)
                    .zip(arenas.iter_mut())
                    .enumerate()
                    .map(|(w, (outs, arena))| {
                        let start = w * block;
                        let range = start..start + outs.len();
                        s.spawn(move || predict_range(shared, pde, ops, variant, dt, range, arena, outs))
                    })
                    .collect();
                handles
                    .into_iter()
                    .try_for_each(|h| h.join().expect("predictor worker panicked"))
            })?;
        }
        corrector_step(mesh, &outputs, pde, ops, dt)?;
    }
    Ok(())
}

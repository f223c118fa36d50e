//! Plain-text dumps for diffing against external oracles.
//!
//! Tensor dumps hold one `(z,y,x,s) = value` line per logical entry in
//! logical order. Field dumps hold one `x y z q0 .. q(m-1)` line per node.

use std::io::{self, Write};

use ader_stp_core::basis::BasisOperators;
use ader_stp_core::solver::Mesh;
use ader_stp_core::{ElementTensor, LayoutSpec};
use anyhow::{bail, Context};

use crate::csv::format_float;

pub fn write_tensor(w: &mut impl Write, t: &ElementTensor) -> io::Result<()> {
    let mut res = Ok(());
    t.for_each_logical(|i, v| {
        if res.is_ok() {
            res = writeln!(w, "({},{},{},{}) = {}", i.z, i.y, i.x, i.s, format_float(v));
        }
    });
    res
}

pub fn tensor_to_string(t: &ElementTensor) -> String {
    let mut buf = Vec::new();
    write_tensor(&mut buf, t).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Parses a tensor dump into a zero tensor of layout `spec`. Every logical
/// entry must appear exactly once.
pub fn parse_tensor(text: &str, spec: LayoutSpec) -> anyhow::Result<ElementTensor> {
    let mut t = ElementTensor::zeros(spec);
    let mut seen = vec![false; spec.logical_len()];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let ctx = || format!("line {}: {line:?}", lineno + 1);
        let (idx, val) = line.split_once('=').with_context(ctx)?;
        let idx = idx
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .with_context(ctx)?;
        let parts: Vec<usize> = idx
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()
            .with_context(ctx)?;
        let &[z, y, x, s] = parts.as_slice() else {
            bail!("{}: expected four indices", ctx());
        };
        if z >= spec.n || y >= spec.n || x >= spec.n || s >= spec.m {
            bail!("{}: index outside {}^3 x {}", ctx(), spec.n, spec.m);
        }
        let flat = ((z * spec.n + y) * spec.n + x) * spec.m + s;
        if std::mem::replace(&mut seen[flat], true) {
            bail!("{}: duplicate entry", ctx());
        }
        t.set(z, y, x, s, val.trim().parse().with_context(ctx)?);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        bail!("entry {missing} (flat logical index) missing");
    }
    Ok(t)
}

pub fn write_field(w: &mut impl Write, mesh: &Mesh, ops: &BasisOperators) -> io::Result<()> {
    let n = mesh.config.order;
    for (c, cell) in mesh.cells.iter().enumerate() {
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    let p = mesh.node_position(ops, c, z, y, x);
                    write!(
                        w,
                        "{} {} {}",
                        format_float(p[0]),
                        format_float(p[1]),
                        format_float(p[2])
                    )?;
                    for s in 0..mesh.config.quantities {
                        write!(w, " {}", format_float(cell.get(z, y, x, s)))?;
                    }
                    writeln!(w)?;
                }
            }
        }
    }
    Ok(())
}

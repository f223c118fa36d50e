//! Shared plumbing: PDE construction, usage errors, tolerances.

use std::fmt;

use ader_stp_core::pde::{Advection, DemoPde, Elastic, NcpAdvection};
use ader_stp_core::LinearPde;

use crate::cli::{Common, PdeKind};
use crate::csv::Table;

/// Velocity of the advection test problems: diagonal, equal speed on
/// every axis.
pub const ADVECTION_VELOCITY: [f64; 3] = [1.0, 1.0, 1.0];

/// Invalid flag value or combination. Maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
}

impl Outcome {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Violation
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
        }
    }
}

/// What a command produced: human-readable lines, a CSV table and a verdict.
#[derive(Debug, Clone)]
pub struct Report {
    pub lines: Vec<String>,
    pub table: Table,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub enum PdeChoice {
    Elastic(Elastic),
    Advection(Advection),
    Demo(DemoPde),
    NcpAdvection(NcpAdvection),
}

impl PdeChoice {
    pub fn build(kind: PdeKind, quantities: Option<usize>) -> anyhow::Result<Self> {
        let fixed = |name: &str, m: usize| match quantities {
            Some(q) if q != m => usage(format!("--pde {name} has exactly {m} quantities, got --quantities {q}")),
            _ => Ok(()),
        };
        let m = quantities.unwrap_or(1);
        if m == 0 {
            return usage("--quantities must be at least 1");
        }
        Ok(match kind {
            PdeKind::Elastic => {
                fixed("elastic", 9)?;
                PdeChoice::Elastic(Elastic::new(2.0, 1.0, 1.0)?)
            }
            PdeKind::Demo => {
                fixed("demo", 6)?;
                PdeChoice::Demo(DemoPde)
            }
            PdeKind::Advection => PdeChoice::Advection(Advection::new(ADVECTION_VELOCITY, m)?),
            PdeKind::NcpAdvection => PdeChoice::NcpAdvection(NcpAdvection::new(ADVECTION_VELOCITY, m)?),
        })
    }

    pub fn from_common(c: &Common, default: PdeKind) -> anyhow::Result<Self> {
        Self::build(c.pde.unwrap_or(default), c.quantities)
    }

    pub fn get(&self) -> &(dyn LinearPde + Sync) {
        match self {
            PdeChoice::Elastic(p) => p,
            PdeChoice::Advection(p) => p,
            PdeChoice::Demo(p) => p,
            PdeChoice::NcpAdvection(p) => p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PdeChoice::Elastic(_) => "elastic",
            PdeChoice::Advection(_) => "advection",
            PdeChoice::Demo(_) => "demo",
            PdeChoice::NcpAdvection(_) => "ncp-advection",
        }
    }
}

pub fn check_common(c: &Common) -> anyhow::Result<()> {
    if c.vec_width == 0 {
        return usage("--vec-width must be at least 1");
    }
    if c.workers == 0 {
        return usage("--workers must be at least 1");
    }
    if c.variant.0.is_empty() {
        return usage("--variant selects nothing");
    }
    Ok(())
}

/// Relative agreement demanded between predictor variants.
pub fn equivalence_tol(n: usize) -> f64 {
    if n >= 9 {
        1e-9
    } else {
        1e-10
    }
}

/// A stable step for a unit-size element.
pub fn reference_dt(pde: &dyn LinearPde, n: usize) -> f64 {
    let s = pde.max_wavespeed();
    let s = if s > 0.0 { s } else { 1.0 };
    ader_stp_core::solver::DEFAULT_CFL / (3.0 * s * (2 * n - 1) as f64)
}

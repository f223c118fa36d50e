//! Command-line surface.

use std::path::PathBuf;
use std::str::FromStr;

use ader_stp_core::Variant;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ader-stp", version, about = "Linear ADER-DG space-time predictor kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-check operators, layouts and all predictor variants.
    Check(CheckArgs),
    /// Advection convergence study on refined periodic meshes.
    Convergence(ConvergenceArgs),
    /// Wall-time benchmark of the predictor variants.
    Bench(BenchArgs),
    /// Scratch memory per variant against a cache budget.
    Footprint(FootprintArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdeKind {
    Elastic,
    Advection,
    Demo,
    NcpAdvection,
}

/// Orders as `3`, `3-8`, `3..8` (inclusive) or `4,6,8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderList(pub Vec<usize>);

impl FromStr for OrderList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid order list {s:?}");
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let range = part.split_once("..").or_else(|| part.split_once('-'));
            match range {
                Some((a, b)) => {
                    let a: usize = a.trim().parse().map_err(|_| bad())?;
                    let b: usize = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().map_err(|_| bad())?),
            }
        }
        if out.contains(&0) {
            return Err("order must be at least 1".into());
        }
        Ok(Self(out))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantSel(pub Vec<Variant>);

impl FromStr for VariantSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Self(Variant::ALL.to_vec()));
        }
        s.split(',')
            .map(|v| {
                v.trim()
                    .parse::<Variant>()
                    .map_err(|_| format!("unknown variant {v:?}"))
            })
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheBytes(pub Option<usize>);

impl FromStr for CacheBytes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "none" => Ok(Self(None)),
            _ => s
                .parse()
                .map(|b| Self(Some(b)))
                .map_err(|_| format!("invalid byte count {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Flip the top exponent bit of the first derivative matrix entry.
    DBitflip,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Orders N to run: `3`, `3-8`, `3..8` or `4,6,8`.
    #[arg(long)]
    pub order: Option<OrderList>,
    #[arg(long, value_enum)]
    pub pde: Option<PdeKind>,
    /// Quantity count for advection-type PDEs (elastic and demo are fixed).
    #[arg(long)]
    pub quantities: Option<usize>,
    /// `generic`, `log`, `splitck`, `aosoa`, a comma list, or `all`.
    #[arg(long, default_value = "all")]
    pub variant: VariantSel,
    #[arg(long, default_value_t = 8)]
    pub vec_width: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// Element-parallel worker threads.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Random elements per order.
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    #[arg(long, value_enum)]
    pub inject_fault: Option<Fault>,
    /// Write per-variant `qavg` tensor dumps of the first sample here.
    #[arg(long)]
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Elements per dimension of each mesh, coarse to fine.
    #[arg(long, value_delimiter = ',', default_value = "3,9")]
    pub meshes: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub t_end: f64,
    #[arg(long, default_value_t = ader_stp_core::solver::DEFAULT_CFL)]
    pub cfl: f64,
    /// Amplitude of the initial sinusoid.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Write a node field dump per run into this directory.
    #[arg(long)]
    pub field_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    /// Distinct elements per sweep.
    #[arg(long, default_value_t = 16)]
    pub elements: usize,
    /// Sweeps per timed repetition.
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    /// Timed repetitions; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Fail unless splitck <= log and aosoa <= splitck at N >= 8.
    #[arg(long)]
    pub assert_speedup: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FootprintArgs {
    #[command(flatten)]
    pub common: Common,
    /// Per-core cache budget in bytes, or `inf`.
    #[arg(long, default_value = "1048576")]
    pub cache_bytes: CacheBytes,
}

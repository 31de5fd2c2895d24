use std::ops::RangeInclusive;

use crate::continuation::QuadratureConfig;
use crate::error::{domain, Error, Result};
use crate::numerics::OfferedLoad;
use crate::par;

use super::checks::{
    convexity_at, monotone_pair, phi_chord, phi_per_index, product_bounds, ratio_three_term,
    sum_log_concavity, LoadTable,
};
use super::{Arg, CheckName, CheckReport, Params};

/// Largest index a sweep may reach.
pub const MAX_SWEEP_INDEX: u64 = 100_000;

pub const DEFAULT_LOADS: [f64; 9] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Range of the leading index `n` (and of `m` for the per-index check).
    pub n_range: RangeInclusive<u64>,
    pub loads: Vec<OfferedLoad>,
    /// Upper bound on `m` in the product and chord enumerations.
    pub index_limit: u64,
    /// Real-argument probes of the continuation; skipped when `None`.
    pub convexity: Option<ConvexityGrid>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityGrid {
    pub xs: Vec<f64>,
    pub h: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for ConvexityGrid {
    fn default() -> Self {
        Self {
            xs: (1..=40).map(|k| 0.5 * k as f64).collect(),
            h: 0.01,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            n_range: 0..=100,
            loads: DEFAULT_LOADS
                .iter()
                .map(|&v| OfferedLoad::new(v).expect("default loads are positive"))
                .collect(),
            index_limit: 30,
            convexity: Some(ConvexityGrid::default()),
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (*self.n_range.start(), *self.n_range.end());
        if lo > hi {
            return Err(domain(format!("empty index range {lo}..={hi}")));
        }
        if hi > MAX_SWEEP_INDEX || self.index_limit > MAX_SWEEP_INDEX {
            return Err(domain(format!(
                "sweep indices are limited to {MAX_SWEEP_INDEX}"
            )));
        }
        if let Some(c) = &self.convexity {
            c.quadrature.validate()?;
            if !(c.h > 0.0 && c.h.is_finite()) {
                return Err(domain(format!("convexity step must be positive, got {}", c.h)));
            }
        }
        Ok(())
    }

    fn max_index(&self) -> u64 {
        // chord reaches φ(n + m), i.e. B(n + m + 1)
        self.n_range.end() + self.index_limit.max(2) + 2
    }
}

/// A check that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub name: CheckName,
    pub lambda: f64,
    pub params: Params,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sweep {
    pub reports: Vec<CheckReport>,
    pub failures: Vec<SweepFailure>,
}

impl Sweep {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.reports.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.reports.iter().all(|r| r.passed)
    }

    /// Smallest margin relative to the larger side, over all reports.
    pub fn min_relative_margin(&self) -> Option<f64> {
        self.reports
            .iter()
            .map(|r| r.margin / r.lhs.abs().max(r.rhs.abs()))
            .min_by(f64::total_cmp)
    }
}

/// Work item: every report for one leading index (or real argument) of one check
/// family at one load.
#[derive(Debug, Clone, Copy)]
enum Unit {
    RatioThreeTerm { load: usize, n: u64 },
    Product { load: usize, n: u64 },
    Chord { load: usize, n: i64 },
    PerIndex { load: usize, m: u64 },
    LogConcavity { load: usize, n: u64 },
    Monotone { load: usize, n: u64 },
    Convexity { load: usize, x: usize },
}

fn units(grid: &SweepGrid) -> Vec<Unit> {
    let (lo, hi) = (*grid.n_range.start(), *grid.n_range.end());
    let loads = 0..grid.loads.len();
    let mut out = Vec::new();

    for load in loads.clone() {
        out.extend((lo..=hi).map(|n| Unit::RatioThreeTerm { load, n }));
    }
    for load in loads.clone() {
        out.extend((lo.max(2)..=hi).map(|n| Unit::Product { load, n }));
    }
    for load in loads.clone() {
        let first = if lo == 0 { -1 } else { lo as i64 };
        out.extend((first..=hi as i64).map(|n| Unit::Chord { load, n }));
    }
    for load in loads.clone() {
        out.extend((lo.max(1)..=hi).map(|m| Unit::PerIndex { load, m }));
    }
    for load in loads.clone() {
        out.extend((lo.max(1)..=hi).map(|n| Unit::LogConcavity { load, n }));
    }
    for load in loads.clone() {
        out.extend((lo..hi).map(|n| Unit::Monotone { load, n }));
    }
    if let Some(c) = &grid.convexity {
        for load in loads {
            out.extend((0..c.xs.len()).map(|x| Unit::Convexity { load, x }));
        }
    }
    out
}

type UnitOutcome = std::result::Result<Vec<CheckReport>, SweepFailure>;

fn evaluate(unit: Unit, grid: &SweepGrid, tables: &[LoadTable]) -> UnitOutcome {
    let limit = grid.index_limit;
    let out = match unit {
        Unit::RatioThreeTerm { load, n } => vec![ratio_three_term(&tables[load], n)],
        Unit::Product { load, n } => {
            let t = &tables[load];
            let mut out = Vec::new();
            for m in 2..=n.min(limit) {
                for l in 1..m {
                    let (lower, upper) = product_bounds(t, n, m, l);
                    out.push(lower);
                    out.push(upper);
                }
            }
            out
        }
        Unit::Chord { load, n } => {
            let t = &tables[load];
            let mut out = Vec::new();
            for m in 2..=limit {
                for r in 1..m {
                    out.push(phi_chord(t, n, m, r));
                }
            }
            out
        }
        Unit::PerIndex { load, m } => (0..m).map(|r| phi_per_index(&tables[load], m, r)).collect(),
        Unit::LogConcavity { load, n } => vec![sum_log_concavity(&tables[load], n)],
        Unit::Monotone { load, n } => monotone_pair(&tables[load], n).to_vec(),
        Unit::Convexity { load, x } => {
            let c = grid.convexity.as_ref().expect("convexity units need a grid");
            let x = c.xs[x];
            let load = grid.loads[load];
            return convexity_at(x, load, c.h, &c.quadrature).map_err(|error| SweepFailure {
                name: CheckName::BlockingConvex,
                lambda: load.value(),
                params: Params {
                    n: Some(Arg::Real(x)),
                    ..Params::default()
                },
                error,
            });
        }
    };
    Ok(out)
}

fn sweep_with(grid: &SweepGrid, parallel: bool) -> Result<Sweep> {
    grid.validate()?;
    let max_index = grid.max_index();
    let build = |load: &OfferedLoad| LoadTable::new(*load, max_index);
    let work = units(grid);

    let tables: Vec<LoadTable> = if parallel {
        par::map_ordered(&grid.loads, build)
    } else {
        par::map_sequential(&grid.loads, build)
    };
    let eval = |u: &Unit| evaluate(*u, grid, &tables);
    let outcomes = if parallel {
        par::map_ordered(&work, eval)
    } else {
        par::map_sequential(&work, eval)
    };

    let mut sweep = Sweep::default();
    for outcome in outcomes {
        match outcome {
            Ok(reports) => sweep.reports.extend(reports),
            Err(failure) => sweep.failures.push(failure),
        }
    }
    Ok(sweep)
}

/// Runs every check over `grid`.
///
/// Reports are ordered by check family (three-term ratio, product bounds, chord,
/// per-index, log-concavity, monotonicity, convexity), then by load in grid order,
/// then lexicographically by `(n, m, l, r)`. Product bounds emit the lower report
/// before the upper one; monotonicity and convexity emit the `B` report before the
/// `φ` report. Checks that fail to evaluate are collected in [`Sweep::failures`]
/// without stopping the sweep.
///
/// With the `parallel` feature the work is spread over rayon; the output is the same
/// as [`run_sweep_sequential`].
pub fn run_sweep(grid: &SweepGrid) -> Result<Sweep> {
    sweep_with(grid, cfg!(feature = "parallel"))
}

/// [`run_sweep`] on the calling thread only.
pub fn run_sweep_sequential(grid: &SweepGrid) -> Result<Sweep> {
    sweep_with(grid, false)
}

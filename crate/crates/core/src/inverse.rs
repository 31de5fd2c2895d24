//! Dimensioning: invert `B` in the number of servers or in the offered load.
//!
//! All solvers bracket and bisect. `B(x, λ)` strictly decreases in `x`, so brackets
//! in the server count are exact; `B(n, λ)` increasing in `λ` is relied on by
//! [`solve_traffic`] and checked empirically in the test suite.

use crate::continuation::{erlang_b_real, QuadratureConfig};
use crate::error::{domain, Error, Result};
use crate::numerics::{erlang_b_int, OfferedLoad};

/// Number of doublings / halvings allowed when searching integer server counts.
const INTEGER_SEARCH_CAP: u32 = 128;

/// Blocking probability to solve for, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BlockingTarget(f64);

impl BlockingTarget {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(domain(format!("blocking target must lie in (0, 1], got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Absolute tolerance on server counts, relative tolerance on loads.
    pub x_tol: f64,
    pub max_iter: u32,
    pub bracket_growth: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            x_tol: 1e-9,
            max_iter: 200,
            bracket_growth: 2.0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.x_tol.is_nan() || self.x_tol <= 0.0 {
            return Err(domain(format!("x_tol must be positive, got {}", self.x_tol)));
        }
        if self.max_iter < 1 {
            return Err(domain("max_iter must be at least 1"));
        }
        if !(self.bracket_growth > 1.0 && self.bracket_growth.is_finite()) {
            return Err(domain(format!(
                "bracket_growth must exceed 1, got {}",
                self.bracket_growth
            )));
        }
        Ok(())
    }
}

/// Smallest `n ≥ 0` with `B(n, λ) ≤ target`.
///
/// Doubles an upper bracket until it meets the target, then bisects on the integers.
pub fn min_servers(load: OfferedLoad, target: BlockingTarget) -> Result<u64> {
    let meets = |n: u64| erlang_b_int(n, load).value() <= target.value();
    if meets(0) {
        return Ok(0);
    }
    // invariant: B(lo) > target >= B(hi)
    let mut lo = 0u64;
    let mut hi = 1u64;
    let mut doublings = 0;
    while !meets(hi) {
        doublings += 1;
        if doublings > INTEGER_SEARCH_CAP {
            return Err(Error::IterationLimit {
                what: "server bracket",
                iterations: INTEGER_SEARCH_CAP,
                lo: lo as f64,
                hi: hi as f64,
            });
        }
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The unique real `x ≥ 0` with `B(x, λ) = target`, to within `opts.x_tol`.
pub fn solve_servers_real(
    load: OfferedLoad,
    target: BlockingTarget,
    opts: &SolveOptions,
    quad: &QuadratureConfig,
) -> Result<f64> {
    opts.validate()?;
    quad.validate()?;
    if target.value() == 1.0 {
        return Ok(0.0);
    }
    let upper = min_servers(load, target)?;
    if erlang_b_int(upper, load).value() == target.value() {
        return Ok(upper as f64);
    }
    // B(upper - 1) > target, and upper >= 1 because target < 1
    let mut lo = (upper - 1) as f64;
    let mut hi = upper as f64;
    for _ in 0..opts.max_iter {
        if hi - lo <= opts.x_tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if erlang_b_real(mid, load, quad)?.value() > target.value() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::IterationLimit {
        what: "real server count",
        iterations: opts.max_iter,
        lo,
        hi,
    })
}

/// The offered load `λ` at which `n` servers block with probability `target`.
///
/// The starting bracket comes from `B(n, λ) ≤ λⁿ/n!` (so `(target · n!)^{1/n}` is a
/// lower end) and `B(n, λ) > 1 − n/λ` (so `n / (1 − target)` is an upper end). It is
/// widened by `bracket_growth` should rounding put either end on the wrong side, then
/// bisected until its width is within `x_tol` of its lower end.
pub fn solve_traffic(n: u64, target: BlockingTarget, opts: &SolveOptions) -> Result<OfferedLoad> {
    opts.validate()?;
    if n < 1 {
        return Err(domain("solve_traffic needs at least one server"));
    }
    let t = target.value();
    if t >= 1.0 {
        return Err(domain("solve_traffic needs a target below 1"));
    }
    let blocking = |lambda: f64| -> Result<f64> {
        let load = OfferedLoad::new(lambda)?;
        Ok(erlang_b_int(n, load).value())
    };
    let limit = |lo, hi| Error::IterationLimit {
        what: "traffic bracket",
        iterations: opts.max_iter,
        lo,
        hi,
    };

    let growth = opts.bracket_growth;
    let nf = n as f64;
    let mut lo = ((t.ln() + libm::lgamma(nf + 1.0)) / nf).exp();
    let mut hi = nf / (1.0 - t);
    let mut iterations = 0;
    while blocking(lo)? >= t {
        iterations += 1;
        if iterations > opts.max_iter {
            return Err(limit(lo, hi));
        }
        hi = lo;
        lo /= growth;
    }
    while blocking(hi)? < t {
        iterations += 1;
        if iterations > opts.max_iter {
            return Err(limit(lo, hi));
        }
        lo = hi;
        hi *= growth;
    }

    let mut bisections = 0;
    while hi - lo > opts.x_tol * lo {
        bisections += 1;
        if bisections > opts.max_iter {
            return Err(limit(lo, hi));
        }
        let mid = 0.5 * (lo + hi);
        if blocking(mid)? < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    OfferedLoad::new(0.5 * (lo + hi))
}

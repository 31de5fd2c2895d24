//! `B(x, λ)` for real `x ≥ 0`.
//!
//! The continuation is `1 / I(x)` with
//!
//! ```text
//! I(x) = λ ∫_0^∞ e^{-λt} (1+t)^x dt = ∫_0^∞ e^{-u} (1 + u/λ)^x du,
//! ```
//!
//! and integration by parts gives `I(x+1) = 1 + (x+1)/λ · I(x)`. Only the fractional
//! part of `x` goes through quadrature; whole steps use the recursion, which is exact
//! and sidesteps the heavy `(1+u/λ)^x` tail at large `x`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result};
use crate::numerics::{Blocking, OfferedLoad, PhiValue};

/// Above this `I(x)` is carried as a logarithm.
const LOG_SWITCH: f64 = 1e300;

// Abscissa window for the exp-sinh rule. Below T_MIN the nodes sit within 1e-30 of
// the origin; above T_MAX they lie past u = 6e6 where e^{-u} is zero.
const T_MIN: f64 = -4.5;
const T_MAX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Successive refinements must agree to this relative tolerance.
    pub rel_tol: f64,
    /// Cap on the number of step halvings.
    pub max_refinements: u32,
    /// Arguments at or above this are reduced with the recursion before integrating.
    /// Use `f64::INFINITY` to integrate at the full argument.
    pub reduction_threshold: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_refinements: 30,
            reduction_threshold: 1.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_refinements < 1 {
            return Err(domain("max_refinements must be at least 1"));
        }
        if self.reduction_threshold.is_nan() || self.reduction_threshold <= 0.0 {
            return Err(domain(format!(
                "reduction_threshold must be positive, got {}",
                self.reduction_threshold
            )));
        }
        Ok(())
    }
}

/// Result of one quadrature: `∫_0^∞ e^{-u} ((1 + u/λ)^y − 1) du = I(y) − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excess {
    pub value: f64,
    /// Difference between the last two refinements.
    pub error_estimate: f64,
    pub refinements: u32,
}

/// Integrates `I(y) − 1` with an exp-sinh (double exponential) rule, halving the step
/// until two successive estimates agree to `cfg.rel_tol`.
///
/// Subtracting the constant part of the integrand analytically keeps the result
/// accurate for `y` near 0 and for large `λ`, where `I(y)` is close to 1.
pub fn integral_excess(y: f64, load: OfferedLoad, cfg: &QuadratureConfig) -> Result<Excess> {
    let lambda = load.value();
    let integrand = |t: f64| -> f64 {
        let u = (FRAC_PI_2 * t.sinh()).exp();
        let weight = FRAC_PI_2 * t.cosh() * u;
        let g = y * (u / lambda).ln_1p();
        // e^{-u} (e^g − 1), without forming ∞ · 0 far out in the tail
        let f = if g.abs() < 1.0 {
            (-u).exp() * g.exp_m1()
        } else {
            (g - u).exp() - (-u).exp()
        };
        if f == 0.0 {
            0.0
        } else {
            f * weight
        }
    };

    let mut h = 1.0;
    let mut sum: f64 = {
        let lo = T_MIN.ceil() as i64;
        let hi = T_MAX.floor() as i64;
        (lo..=hi).map(|k| integrand(k as f64)).sum()
    };
    let mut estimate = h * sum;
    let mut last_diff = f64::INFINITY;
    let mut stalled = 0;

    for level in 1..=cfg.max_refinements {
        h *= 0.5;
        // new nodes are the odd multiples of h inside the window
        let first = (T_MIN / h).ceil() as i64;
        let last = (T_MAX / h).floor() as i64;
        let first = if first % 2 == 0 { first + 1 } else { first };
        let added: f64 = (first..=last)
            .step_by(2)
            .map(|k| integrand(k as f64 * h))
            .sum();
        sum += added;
        let next = h * sum;
        let diff = (next - estimate).abs();
        if level >= 3 && diff <= cfg.rel_tol * next.abs() {
            return Ok(Excess {
                value: next,
                error_estimate: diff,
                refinements: level,
            });
        }
        // once the differences stop shrinking the rule is at its rounding floor and
        // further halvings only cost time
        stalled = if level >= 6 && diff >= 0.5 * last_diff { stalled + 1 } else { 0 };
        if level == cfg.max_refinements || !next.is_finite() || stalled >= 3 {
            return Err(Error::Quadrature {
                refinements: level,
                previous: estimate,
                last: next,
            });
        }
        estimate = next;
        last_diff = diff;
    }
    unreachable!("max_refinements >= 1 is validated")
}

/// Number of unit recursion steps applied before integrating at `x - steps`.
fn reduction_steps(x: f64, threshold: f64) -> u64 {
    if x < threshold {
        return 0;
    }
    let whole = x.floor();
    let to_window = (x - threshold).floor() + 1.0;
    whole.min(to_window) as u64
}

/// Log-aware value of `I(x) = 1 / B(x, λ)`.
#[derive(Debug, Clone, Copy)]
enum Inverse {
    Linear(f64),
    Log(f64),
}

impl Inverse {
    /// `I(a+1) = 1 + (a+1)/λ · I(a)`.
    fn step(self, next_arg: f64, lambda: f64) -> Self {
        match self {
            Inverse::Linear(v) => {
                let next = 1.0 + next_arg / lambda * v;
                if next > LOG_SWITCH {
                    Inverse::Log(next.ln())
                } else {
                    Inverse::Linear(next)
                }
            }
            Inverse::Log(ln_v) => {
                let c = (next_arg / lambda).ln() + ln_v;
                Inverse::Log(c + (-c).exp().ln_1p())
            }
        }
    }

    fn to_blocking(self) -> Blocking {
        match self {
            Inverse::Linear(v) => Blocking::from_value(1.0 / v),
            Inverse::Log(ln_v) => Blocking::from_ln(-ln_v),
        }
    }
}

fn check_arg(x: f64, lower: f64, what: &str) -> Result<()> {
    if x.is_finite() && x >= lower {
        Ok(())
    } else {
        Err(domain(format!("{what} needs a finite argument >= {lower}, got {x}")))
    }
}

/// Erlang's loss function at a real number of servers `x ≥ 0`.
pub fn erlang_b_real(x: f64, load: OfferedLoad, cfg: &QuadratureConfig) -> Result<Blocking> {
    check_arg(x, 0.0, "erlang_b_real")?;
    cfg.validate()?;
    let steps = reduction_steps(x, cfg.reduction_threshold);
    let base = x - steps as f64;
    let lambda = load.value();

    let mut inv = if base == 0.0 {
        Inverse::Linear(1.0)
    } else {
        Inverse::Linear(1.0 + integral_excess(base, load, cfg)?.value)
    };
    for k in 1..=steps {
        inv = inv.step(base + k as f64, lambda);
    }
    Ok(inv.to_blocking())
}

/// `φ(x, λ) = 1 − B(x+1, λ)` for real `x ≥ -1`.
pub fn phi_real(x: f64, load: OfferedLoad, cfg: &QuadratureConfig) -> Result<PhiValue> {
    check_arg(x, -1.0, "phi_real")?;
    cfg.validate()?;
    if x == -1.0 {
        return Ok(PhiValue::AT_MINUS_ONE);
    }
    let y = x + 1.0;
    if x < 0.0 || reduction_steps(y, cfg.reduction_threshold) == 0 {
        // 1 − 1/I(y) = (I(y) − 1) / I(y), no subtraction needed
        let excess = integral_excess(y, load, cfg)?.value;
        let inv = 1.0 + excess;
        return Ok(PhiValue::new(excess / inv, Blocking::from_value(1.0 / inv)));
    }
    let b = erlang_b_real(x, load, cfg)?;
    Ok(crate::numerics::phi_from_real_blocking(x, b, load))
}

/// `f(x+h) − 2 f(x) + f(x−h)`.
pub fn second_difference<F, E>(mut f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let ahead = f(x + h)?;
    let centre = f(x)?;
    let behind = f(x - h)?;
    Ok(ahead - 2.0 * centre + behind)
}

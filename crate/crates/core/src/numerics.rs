//! Overflow-safe evaluation of `B(n, λ)`, `φ(n, λ)` and the scaled partial sums
//! `e^{-λ} s_n(λ)` of the exponential series.
//!
//! Raw partial sums `s_n(λ) = Σ_{j≤n} λ^j / j!` overflow long before the quantities
//! of interest become extreme, so everything here is expressed through Poisson
//! probabilities: `e^{-λ} s_n(λ)` is the Poisson(λ) CDF at `n`. Every ratio and every
//! product inequality between partial sums is unchanged by that common factor.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Below this value the blocking recursion switches to log space.
const LOG_SWITCH: f64 = 1e-280;

/// Relative size at which a Poisson term no longer moves a running sum.
const TERM_CUTOFF: f64 = 1e-17;

/// Positive, finite traffic intensity in erlangs.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct OfferedLoad(f64);

impl OfferedLoad {
    pub fn new(erlangs: f64) -> Result<Self> {
        if erlangs.is_finite() && erlangs > 0.0 {
            Ok(Self(erlangs))
        } else {
            Err(Error::InvalidLoad(erlangs))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for OfferedLoad {
    type Error = Error;

    fn try_from(erlangs: f64) -> Result<Self> {
        Self::new(erlangs)
    }
}

/// A blocking probability `B ∈ (0, 1]`.
///
/// `ln_value` is always finite. `value` is the same quantity in linear scale and may
/// underflow to zero when the server count dwarfs the load (for example
/// `B(1000, 10) ≈ 1e-1572`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Blocking {
    value: f64,
    ln_value: f64,
}

impl Blocking {
    pub const ONE: Blocking = Blocking {
        value: 1.0,
        ln_value: 0.0,
    };

    pub(crate) fn from_value(value: f64) -> Self {
        Self {
            value,
            ln_value: value.ln(),
        }
    }

    pub(crate) fn from_ln(ln_value: f64) -> Self {
        Self {
            value: ln_value.exp(),
            ln_value,
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.value
    }

    #[inline]
    pub fn ln_value(self) -> f64 {
        self.ln_value
    }
}

/// `φ(n, λ) = s_n / s_{n+1} = 1 − B(n+1, λ)`.
///
/// The complement `B(n+1, λ)` is kept alongside so callers can work with whichever
/// side is better conditioned: `value` rounds to 1 once `B(n+1, λ)` drops below the
/// machine epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiValue {
    value: f64,
    complement: Blocking,
}

impl PhiValue {
    /// `φ(-1, λ) = 0`, the extension that follows from `B(0, λ) = 1`.
    pub const AT_MINUS_ONE: PhiValue = PhiValue {
        value: 0.0,
        complement: Blocking::ONE,
    };

    pub(crate) fn new(value: f64, complement: Blocking) -> Self {
        Self { value, complement }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.value
    }

    /// `1 − φ`, i.e. the blocking probability one server further along.
    #[inline]
    pub fn complement(self) -> Blocking {
        self.complement
    }
}

/// `e^{-λ} s_n(λ)` together with its complement `1 − e^{-λ} s_n(λ)`.
///
/// Both are stored as natural logs: for large loads the scaled sum at small `n`
/// is far below the smallest positive double (`e^{-λ}` at `λ = 10^5`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledPartialSum {
    n: u64,
    load: OfferedLoad,
    ln_value: f64,
    ln_tail: f64,
}

impl ScaledPartialSum {
    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn load(&self) -> OfferedLoad {
        self.load
    }

    /// `e^{-λ} s_n(λ)`, the Poisson(λ) CDF at `n`.
    #[inline]
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    #[inline]
    pub fn ln_value(&self) -> f64 {
        self.ln_value
    }

    /// `1 − e^{-λ} s_n(λ)`, the Poisson upper tail `P(X > n)`, computed without
    /// cancellation.
    #[inline]
    pub fn tail(&self) -> f64 {
        self.ln_tail.exp()
    }

    #[inline]
    pub fn ln_tail(&self) -> f64 {
        self.ln_tail
    }
}

/// Computes `e^{-λ} Σ_{j=0}^{n} λ^j / j!`.
///
/// Whichever of the CDF and the upper tail lies on the far side of the mode is summed
/// directly, starting from its largest term (evaluated in log space) and walking away
/// from the mode with the ratio recurrence until terms are negligible. The other one
/// follows as the complement, which is then at least about one half and so loses
/// nothing to cancellation.
pub fn scaled_partial_sum(n: u64, load: OfferedLoad) -> ScaledPartialSum {
    let lambda = load.value();
    let mode = lambda.floor();

    let (ln_value, ln_tail) = if (n as f64) < mode {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = n;
        while j > 0 {
            term *= j as f64 / lambda;
            sum += term;
            if term < TERM_CUTOFF * sum {
                break;
            }
            j -= 1;
        }
        let ln_value = ln_poisson_term(n, lambda) + sum.ln();
        (ln_value, (-ln_value.exp()).ln_1p())
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = n + 1;
        loop {
            j += 1;
            term *= lambda / j as f64;
            sum += term;
            if term < TERM_CUTOFF * sum {
                break;
            }
        }
        let ln_tail = ln_poisson_term(n + 1, lambda) + sum.ln();
        ((-ln_tail.exp()).ln_1p(), ln_tail)
    };

    ScaledPartialSum {
        n,
        load,
        ln_value,
        ln_tail,
    }
}

/// Iterator over `B(0, λ), B(1, λ), B(2, λ), …`.
///
/// Runs `b_k = λ b_{k-1} / (k + λ b_{k-1})`, which stays in `(0, 1]` and damps
/// rounding errors, and moves to log space once values approach the bottom of the
/// double range.
#[derive(Debug, Clone)]
pub struct BlockingRecursion {
    lambda: f64,
    ln_lambda: f64,
    k: u64,
    current: Blocking,
    log_mode: bool,
}

impl BlockingRecursion {
    pub fn new(load: OfferedLoad) -> Self {
        Self {
            lambda: load.value(),
            ln_lambda: load.value().ln(),
            k: 0,
            current: Blocking::ONE,
            log_mode: false,
        }
    }

    fn advance(&mut self) {
        self.k += 1;
        let k = self.k as f64;
        if self.log_mode {
            let ln_b = self.current.ln_value;
            let ln_next = self.ln_lambda + ln_b - (k + self.lambda * ln_b.exp()).ln();
            self.current = Blocking::from_ln(ln_next);
        } else {
            let b = self.current.value;
            let next = self.lambda * b / (k + self.lambda * b);
            self.current = Blocking::from_value(next);
            if next < LOG_SWITCH {
                self.log_mode = true;
            }
        }
    }
}

impl Iterator for BlockingRecursion {
    type Item = Blocking;

    fn next(&mut self) -> Option<Blocking> {
        let out = self.current;
        self.advance();
        Some(out)
    }

    fn nth(&mut self, n: usize) -> Option<Blocking> {
        for _ in 0..n {
            self.advance();
        }
        self.next()
    }
}

/// Erlang's loss function at an integer number of servers.
pub fn erlang_b_int(n: u64, load: OfferedLoad) -> Blocking {
    let mut rec = BlockingRecursion::new(load);
    for _ in 0..n {
        rec.advance();
    }
    rec.current
}

/// `φ(n, λ) = s_n(λ) / s_{n+1}(λ) = 1 − B(n+1, λ)` for `n ≥ -1`, with `φ(-1, λ) = 0`.
pub fn phi(n: i64, load: OfferedLoad) -> Result<PhiValue> {
    match n {
        -1 => Ok(PhiValue::AT_MINUS_ONE),
        n if n < -1 => Err(domain(format!("phi is defined for n >= -1, got {n}"))),
        n => Ok(phi_from_blocking(n as u64, erlang_b_int(n as u64, load), load)),
    }
}

/// `1 − B(n+1, λ)` from `B(n, λ)`.
///
/// Substituting one step of the recursion gives `(n+1) / (n+1 + λ B(n, λ))`, which
/// keeps full relative accuracy when `φ` is small (`n ≪ λ`), where the literal
/// subtraction would not.
pub(crate) fn phi_from_blocking(n: u64, b: Blocking, load: OfferedLoad) -> PhiValue {
    phi_one_step_on((n + 1) as f64, b, load)
}

/// Real-argument version of [`phi_from_blocking`]: `φ(x, λ)` from `B(x, λ)`.
pub(crate) fn phi_from_real_blocking(x: f64, b: Blocking, load: OfferedLoad) -> PhiValue {
    phi_one_step_on(x + 1.0, b, load)
}

fn phi_one_step_on(k: f64, b: Blocking, load: OfferedLoad) -> PhiValue {
    let lambda = load.value();
    let denom = k + lambda * b.value;
    let complement = if b.value >= LOG_SWITCH {
        Blocking::from_value(lambda * b.value / denom)
    } else {
        Blocking::from_ln(lambda.ln() + b.ln_value - denom.ln())
    };
    PhiValue::new(k / denom, complement)
}

/// Natural log of the binomial coefficient `C(a, b)`.
pub fn log_binomial(a: u64, b: u64) -> Result<f64> {
    if b > a {
        return Err(domain(format!(
            "binomial coefficient C({a}, {b}) needs 0 <= b <= a"
        )));
    }
    let k = b.min(a - b);
    if k == 0 {
        return Ok(0.0);
    }
    if k <= 30 {
        // every factor is at least 2 because k <= a / 2
        let base = (a - k) as f64;
        return Ok((1..=k).map(|i| ((base + i as f64) / i as f64).ln()).sum());
    }

    // Stirling split: n! = sqrt(2πn) (n/e)^n e^{δ(n)}. The leading part is a sum of
    // positive terms, so nothing cancels.
    let (n, k) = (a as f64, k as f64);
    let rest = n - k;
    let entropy = k * (n / k).ln() - rest * (-k / n).ln_1p();
    let correction = stirling_error(a) - stirling_error(b) - stirling_error(a - b);
    Ok(entropy - 0.5 * (2.0 * PI * k * rest / n).ln() + correction)
}

/// `ln(e^{-λ} λ^k / k!)` without forming `λ^k` or `k!`.
pub(crate) fn ln_poisson_term(k: u64, lambda: f64) -> f64 {
    if k == 0 {
        return -lambda;
    }
    let kf = k as f64;
    -0.5 * (2.0 * PI * kf).ln() - stirling_error(k) - deviance(kf, lambda)
}

/// `δ(n) = ln n! − (n + ½) ln n + n − ½ ln 2π`.
fn stirling_error(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

    let x = n as f64;
    if n <= 15 {
        if n == 0 {
            return 0.0;
        }
        return libm::lgamma(x + 1.0) - (x + 0.5) * x.ln() + x - LN_SQRT_2PI;
    }
    let xx = x * x;
    if n > 500 {
        (S0 - S1 / xx) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// `x ln(x/μ) + μ − x`, evaluated by series when `x` is close to `μ`.
fn deviance(x: f64, mu: f64) -> f64 {
    if (x - mu).abs() < 0.1 * (x + mu) {
        let mut v = (x - mu) / (x + mu);
        let mut s = (x - mu) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / mu).ln() + mu - x
    }
}

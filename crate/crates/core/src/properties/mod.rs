//! Machine checks of the inequalities that follow from the convexity of `B(x, λ)`.
//!
//! Every check reports an inequality in the orientation `lhs < rhs`, with
//! `margin = rhs − lhs`, and passes only when the margin clears a noise allowance
//! proportional to the size of the two sides. Several of the inequalities compare
//! quantities that all round to 1 in double precision once `n ≫ λ`; those are
//! re-evaluated in an equivalent complementary form (in terms of `B` or the Poisson
//! tail) when the direct form cannot resolve them. See [`Form`].

mod checks;
mod sweep;

use std::fmt;

use serde::{Serialize, Serializer};

pub use checks::{
    check_convexity, check_monotonicity, check_phi_chord, check_phi_per_index,
    check_product_bounds, check_ratio_three_term, check_sum_log_concavity,
};
pub use sweep::{
    run_sweep, run_sweep_sequential, ConvexityGrid, Sweep, SweepFailure, SweepGrid, DEFAULT_LOADS,
    MAX_SWEEP_INDEX,
};

/// Relative strictness allowance for the integer-index checks.
pub const REL_SLACK: f64 = 1e-12;
/// Absolute floor of every allowance.
pub const ABS_SLACK: f64 = 1e-300;
/// Quadrature-noise multiple that second differences must clear.
pub const NOISE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    /// `φ(n) + φ(n+2) < 2 φ(n+1)`.
    RatioThreeTerm,
    /// `C(n−m+l, l)/C(n, l) · s_{n−l} s_{n−m+l} < s_n s_{n−m}`.
    ProductLower,
    /// `s_n s_{n−m} < s_{n−l} s_{n−m+l}`.
    ProductUpper,
    /// `((m−r)/m) φ(n) + (r/m) φ(n+m) < φ(n+r)`, including `n = -1`.
    PhiChord,
    /// `φ(m)/(m+1) < φ(r)/(r+1)` for `r < m`.
    PhiPerIndex,
    /// `(n/(n+1)) s_n² < s_{n−1} s_{n+1}`.
    SumLogConcavity,
    /// `B(n+1) < B(n)`.
    BlockingDecrease,
    /// `φ(n) < φ(n+1)`.
    PhiIncrease,
    /// `2 B(x) < B(x−h) + B(x+h)`.
    BlockingConvex,
    /// `φ(x−h) + φ(x+h) < 2 φ(x)`.
    PhiConcave,
}

impl CheckName {
    pub const ALL: [CheckName; 10] = [
        CheckName::RatioThreeTerm,
        CheckName::ProductLower,
        CheckName::ProductUpper,
        CheckName::PhiChord,
        CheckName::PhiPerIndex,
        CheckName::SumLogConcavity,
        CheckName::BlockingDecrease,
        CheckName::PhiIncrease,
        CheckName::BlockingConvex,
        CheckName::PhiConcave,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::RatioThreeTerm => "ratio_three_term",
            CheckName::ProductLower => "product_lower",
            CheckName::ProductUpper => "product_upper",
            CheckName::PhiChord => "phi_chord",
            CheckName::PhiPerIndex => "phi_per_index",
            CheckName::SumLogConcavity => "sum_log_concavity",
            CheckName::BlockingDecrease => "blocking_decrease",
            CheckName::PhiIncrease => "phi_increase",
            CheckName::BlockingConvex => "blocking_convex",
            CheckName::PhiConcave => "phi_concave",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the two sides of a report were evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// The inequality as written, with partial sums scaled by `e^{-λ}`.
    Direct,
    /// An algebraically equivalent rearrangement in terms of `B = 1 − φ` or of
    /// Poisson tails `1 − e^{-λ} s_n`, used when the direct sides agree to rounding.
    Complement,
    /// As `Direct` or `Complement`, with both sides divided by a common power of `e`
    /// because they fall outside the double range.
    Rescaled,
}

/// A report parameter that is either an index or a real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arg {
    Int(i64),
    Real(f64),
}

impl Serialize for Arg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Arg::Int(v) => s.serialize_i64(v),
            Arg::Real(v) => s.serialize_f64(v),
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Int(v) => write!(f, "{v}"),
            Arg::Real(v) => write!(f, "{v}"),
        }
    }
}

/// Outcome of one inequality check.
///
/// Serializes to the ten-field row `name, n, m, l, r, lambda, lhs, rhs, margin,
/// passed`; `form` and `slack` are diagnostics kept out of the wire format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: CheckName,
    pub n: Option<Arg>,
    pub m: Option<i64>,
    pub l: Option<i64>,
    pub r: Option<i64>,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
    #[serde(skip)]
    pub form: Form,
    #[serde(skip)]
    pub slack: f64,
}

/// Index parameters of a report; unset fields do not apply to the check.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Params {
    pub n: Option<Arg>,
    pub m: Option<i64>,
    pub l: Option<i64>,
    pub r: Option<i64>,
}

impl Params {
    pub(crate) fn n(n: i64) -> Self {
        Self {
            n: Some(Arg::Int(n)),
            ..Self::default()
        }
    }

    pub(crate) fn x(x: f64) -> Self {
        Self {
            n: Some(Arg::Real(x)),
            ..Self::default()
        }
    }
}

/// The two sides of an inequality, oriented `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub form: Form,
}

impl Sides {
    pub(crate) fn new(lhs: f64, rhs: f64, form: Form) -> Self {
        Self { lhs, rhs, form }
    }

    /// Both sides given as natural logs; exponentiated directly when representable
    /// and otherwise after removing the larger exponent.
    pub(crate) fn from_ln(ln_lhs: f64, ln_rhs: f64, form: Form) -> Self {
        const RANGE: f64 = 690.0;
        let top = ln_lhs.max(ln_rhs);
        if top.abs() <= RANGE && ln_lhs.min(ln_rhs) >= -RANGE {
            Self::new(ln_lhs.exp(), ln_rhs.exp(), form)
        } else {
            Self::new((ln_lhs - top).exp(), (ln_rhs - top).exp(), Form::Rescaled)
        }
    }

    fn slack(&self, rel: f64) -> f64 {
        rel * self.lhs.abs().max(self.rhs.abs()) + ABS_SLACK
    }

    fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub(crate) fn resolves(&self, rel: f64) -> bool {
        self.margin() > self.slack(rel)
    }
}

impl CheckReport {
    pub(crate) fn build(name: CheckName, params: Params, lambda: f64, sides: Sides, rel: f64) -> Self {
        let margin = sides.margin();
        let slack = sides.slack(rel);
        Self {
            name,
            n: params.n,
            m: params.m,
            l: params.l,
            r: params.r,
            lambda,
            lhs: sides.lhs,
            rhs: sides.rhs,
            margin,
            passed: margin > slack,
            form: sides.form,
            slack,
        }
    }

    pub fn params(&self) -> Params {
        Params {
            n: self.n,
            m: self.m,
            l: self.l,
            r: self.r,
        }
    }
}

use crate::continuation::{erlang_b_real, phi_real, QuadratureConfig};
use crate::error::{domain, Result};
use crate::numerics::{
    erlang_b_int, log_binomial, phi, phi_from_blocking, scaled_partial_sum, Blocking,
    BlockingRecursion, OfferedLoad, PhiValue, ScaledPartialSum,
};

use super::{Arg, CheckName, CheckReport, Form, Params, Sides, NOISE_FACTOR, REL_SLACK};

/// Source of `B`, `φ` and scaled partial sums at a fixed load.
pub(crate) trait Values {
    fn load(&self) -> OfferedLoad;
    fn blocking(&self, n: u64) -> Blocking;
    /// `n ≥ -1`.
    fn phi(&self, n: i64) -> PhiValue;
    fn sum(&self, n: u64) -> ScaledPartialSum;

    fn lambda(&self) -> f64 {
        self.load().value()
    }
}

/// Evaluates everything from scratch; used by the single-shot checkers.
pub(crate) struct OnDemand(pub OfferedLoad);

impl Values for OnDemand {
    fn load(&self) -> OfferedLoad {
        self.0
    }

    fn blocking(&self, n: u64) -> Blocking {
        erlang_b_int(n, self.0)
    }

    fn phi(&self, n: i64) -> PhiValue {
        phi(n, self.0).expect("callers validate n >= -1")
    }

    fn sum(&self, n: u64) -> ScaledPartialSum {
        scaled_partial_sum(n, self.0)
    }
}

/// Precomputed values for indices `0..=max_index`; used by sweeps.
pub(crate) struct LoadTable {
    load: OfferedLoad,
    blocking: Vec<Blocking>,
    phi: Vec<PhiValue>,
    sums: Vec<ScaledPartialSum>,
}

impl LoadTable {
    pub(crate) fn new(load: OfferedLoad, max_index: u64) -> Self {
        let blocking: Vec<Blocking> = BlockingRecursion::new(load)
            .take(max_index as usize + 2)
            .collect();
        let phi = blocking[..=max_index as usize]
            .iter()
            .enumerate()
            .map(|(n, &b)| phi_from_blocking(n as u64, b, load))
            .collect();
        let sums = (0..=max_index).map(|n| scaled_partial_sum(n, load)).collect();
        Self {
            load,
            blocking,
            phi,
            sums,
        }
    }
}

impl Values for LoadTable {
    fn load(&self) -> OfferedLoad {
        self.load
    }

    fn blocking(&self, n: u64) -> Blocking {
        self.blocking[n as usize]
    }

    fn phi(&self, n: i64) -> PhiValue {
        if n == -1 {
            PhiValue::AT_MINUS_ONE
        } else {
            self.phi[n as usize]
        }
    }

    fn sum(&self, n: u64) -> ScaledPartialSum {
        self.sums[n as usize]
    }
}

/// Common unit for a set of blocking probabilities, chosen from the largest so the
/// smaller ones stay representable relative to it.
struct Unit {
    ln_unit: f64,
}

impl Unit {
    fn of_largest(largest: Blocking) -> Self {
        let ln_unit = if largest.ln_value() >= -650.0 {
            0.0
        } else {
            largest.ln_value()
        };
        Self { ln_unit }
    }

    fn of(&self, b: Blocking) -> f64 {
        if self.ln_unit == 0.0 {
            b.value()
        } else {
            (b.ln_value() - self.ln_unit).exp()
        }
    }

    fn form(&self) -> Form {
        if self.ln_unit == 0.0 {
            Form::Complement
        } else {
            Form::Rescaled
        }
    }
}

fn resolve(direct: Sides, complement: impl FnOnce() -> Sides) -> Sides {
    if direct.resolves(REL_SLACK) {
        direct
    } else {
        complement()
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn report(name: CheckName, params: Params, v: &impl Values, sides: Sides) -> CheckReport {
    CheckReport::build(name, params, v.lambda(), sides, REL_SLACK)
}

pub(crate) fn ratio_three_term(v: &impl Values, n: u64) -> CheckReport {
    let k = n as i64;
    let (p0, p1, p2) = (v.phi(k), v.phi(k + 1), v.phi(k + 2));
    let direct = Sides::new(p0.value() + p2.value(), 2.0 * p1.value(), Form::Direct);
    let sides = resolve(direct, || {
        // φ(j) = 1 − B(j+1)
        let (b1, b2, b3) = (p0.complement(), p1.complement(), p2.complement());
        let unit = Unit::of_largest(b1);
        Sides::new(2.0 * unit.of(b2), unit.of(b1) + unit.of(b3), unit.form())
    });
    report(CheckName::RatioThreeTerm, Params::n(k), v, sides)
}

pub(crate) fn product_bounds(v: &impl Values, n: u64, m: u64, l: u64) -> (CheckReport, CheckReport) {
    let params = Params {
        n: Some(Arg::Int(n as i64)),
        m: Some(m as i64),
        l: Some(l as i64),
        r: None,
    };
    let s_n = v.sum(n);
    let s_nm = v.sum(n - m);
    let s_nl = v.sum(n - l);
    let s_nml = v.sum(n - m + l);

    let ln_binomial_ratio = log_binomial(n - m + l, l).expect("l <= n - m + l")
        - log_binomial(n, l).expect("l <= n");
    let lower = Sides::from_ln(
        ln_binomial_ratio + s_nl.ln_value() + s_nml.ln_value(),
        s_n.ln_value() + s_nm.ln_value(),
        Form::Direct,
    );

    let direct = Sides::from_ln(
        s_n.ln_value() + s_nm.ln_value(),
        s_nl.ln_value() + s_nml.ln_value(),
        Form::Direct,
    );
    let upper = resolve(direct, || {
        // 1 − S_a S_b = T_a + T_b S_a with T = 1 − S, so the inequality flips to
        // 1 − S_{n−l} S_{n−m+l} < 1 − S_n S_{n−m}.
        let ln_union = |a: &ScaledPartialSum, b: &ScaledPartialSum| {
            ln_add(a.ln_tail(), b.ln_tail() + a.ln_value())
        };
        Sides::from_ln(ln_union(&s_nl, &s_nml), ln_union(&s_n, &s_nm), Form::Complement)
    });

    (
        report(CheckName::ProductLower, params, v, lower),
        report(CheckName::ProductUpper, params, v, upper),
    )
}

pub(crate) fn phi_chord(v: &impl Values, n: i64, m: u64, r: u64) -> CheckReport {
    let (mf, rf) = (m as f64, r as f64);
    let (w_first, w_last) = ((mf - rf) / mf, rf / mf);
    let (p_first, p_mid, p_last) = (v.phi(n), v.phi(n + r as i64), v.phi(n + m as i64));
    let direct = Sides::new(
        w_first * p_first.value() + w_last * p_last.value(),
        p_mid.value(),
        Form::Direct,
    );
    let sides = resolve(direct, || {
        let unit = Unit::of_largest(p_first.complement());
        Sides::new(
            unit.of(p_mid.complement()),
            w_first * unit.of(p_first.complement()) + w_last * unit.of(p_last.complement()),
            unit.form(),
        )
    });
    let params = Params {
        n: Some(Arg::Int(n)),
        m: Some(m as i64),
        l: None,
        r: Some(r as i64),
    };
    report(CheckName::PhiChord, params, v, sides)
}

pub(crate) fn phi_per_index(v: &impl Values, m: u64, r: u64) -> CheckReport {
    let lhs = v.phi(m as i64).value() / (m + 1) as f64;
    let rhs = v.phi(r as i64).value() / (r + 1) as f64;
    let params = Params {
        n: None,
        m: Some(m as i64),
        l: None,
        r: Some(r as i64),
    };
    report(CheckName::PhiPerIndex, params, v, Sides::new(lhs, rhs, Form::Direct))
}

pub(crate) fn sum_log_concavity(v: &impl Values, n: u64) -> CheckReport {
    let nf = n as f64;
    let sides = Sides::from_ln(
        (nf / (nf + 1.0)).ln() + 2.0 * v.sum(n).ln_value(),
        v.sum(n - 1).ln_value() + v.sum(n + 1).ln_value(),
        Form::Direct,
    );
    report(CheckName::SumLogConcavity, Params::n(n as i64), v, sides)
}

pub(crate) fn monotone_pair(v: &impl Values, n: u64) -> [CheckReport; 2] {
    let (b0, b1) = (v.blocking(n), v.blocking(n + 1));
    let unit = Unit::of_largest(b0);
    let form = if unit.form() == Form::Rescaled {
        Form::Rescaled
    } else {
        Form::Direct
    };
    let decrease = Sides::new(unit.of(b1), unit.of(b0), form);

    let (p0, p1) = (v.phi(n as i64), v.phi(n as i64 + 1));
    let direct = Sides::new(p0.value(), p1.value(), Form::Direct);
    let increase = resolve(direct, || {
        let unit = Unit::of_largest(p0.complement());
        Sides::new(unit.of(p1.complement()), unit.of(p0.complement()), unit.form())
    });

    let params = Params::n(n as i64);
    [
        report(CheckName::BlockingDecrease, params, v, decrease),
        report(CheckName::PhiIncrease, params, v, increase),
    ]
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(domain(msg()))
    }
}

/// `φ(n) + φ(n+2) < 2 φ(n+1)`, i.e. `s_n/s_{n+1} + s_{n+2}/s_{n+3} < 2 s_{n+1}/s_{n+2}`.
pub fn check_ratio_three_term(n: u64, load: OfferedLoad) -> CheckReport {
    ratio_three_term(&OnDemand(load), n)
}

/// Both sides of the two-sided product bound for `n ≥ m > l ≥ 1`:
///
/// ```text
/// C(n−m+l, l)/C(n, l) · s_{n−l} s_{n−m+l}  <  s_n s_{n−m}  <  s_{n−l} s_{n−m+l}
/// ```
///
/// Returns the lower report first.
pub fn check_product_bounds(
    n: u64,
    m: u64,
    l: u64,
    load: OfferedLoad,
) -> Result<(CheckReport, CheckReport)> {
    need(n >= m && m > l && l >= 1, || {
        format!("product bounds need n >= m > l >= 1, got n={n}, m={m}, l={l}")
    })?;
    Ok(product_bounds(&OnDemand(load), n, m, l))
}

/// Chord inequality of the concave `φ`: `((m−r)/m) φ(n) + (r/m) φ(n+m) < φ(n+r)`
/// for `1 ≤ r < m` and `n ≥ -1`.
pub fn check_phi_chord(n: i64, m: u64, r: u64, load: OfferedLoad) -> Result<CheckReport> {
    need(n >= -1, || format!("chord check needs n >= -1, got {n}"))?;
    need(r >= 1 && r < m, || {
        format!("chord check needs 1 <= r < m, got m={m}, r={r}")
    })?;
    Ok(phi_chord(&OnDemand(load), n, m, r))
}

/// `φ(m)/(m+1) < φ(r)/(r+1)` for `0 ≤ r < m`.
pub fn check_phi_per_index(m: u64, r: u64, load: OfferedLoad) -> Result<CheckReport> {
    need(r < m, || format!("per-index check needs r < m, got m={m}, r={r}"))?;
    Ok(phi_per_index(&OnDemand(load), m, r))
}

/// `s_{n−1} s_{n+1} > (n/(n+1)) s_n²` for `n ≥ 1`.
pub fn check_sum_log_concavity(n: u64, load: OfferedLoad) -> Result<CheckReport> {
    need(n >= 1, || format!("log-concavity check needs n >= 1, got {n}"))?;
    Ok(sum_log_concavity(&OnDemand(load), n))
}

/// `B(n+1) < B(n)` and `φ(n) < φ(n+1)` for every consecutive pair in `n_range`.
pub fn check_monotonicity(
    n_range: std::ops::RangeInclusive<u64>,
    load: OfferedLoad,
) -> Vec<CheckReport> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if hi <= lo {
        return Vec::new();
    }
    let table = LoadTable::new(load, hi + 1);
    (lo..hi).flat_map(|n| monotone_pair(&table, n)).collect()
}

/// Second-difference probes of the continuation at each `x` in `xs`: `B(·, λ)` must be
/// convex (for `x ≥ h`) and `φ(·, λ)` concave (for `x ≥ -1 + h`), each by more than
/// ten times the quadrature tolerance relative to the function values.
pub fn check_convexity(
    xs: &[f64],
    load: OfferedLoad,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<CheckReport>> {
    need(h > 0.0 && h.is_finite(), || format!("step h must be positive, got {h}"))?;
    let mut out = Vec::with_capacity(2 * xs.len());
    for &x in xs {
        out.extend(convexity_at(x, load, h, cfg)?);
    }
    Ok(out)
}

pub(crate) fn convexity_at(
    x: f64,
    load: OfferedLoad,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<CheckReport>> {
    need(x.is_finite() && x - h >= -1.0, || {
        format!("convexity probe at x={x} with h={h} leaves the domain x - h >= -1")
    })?;
    let rel = NOISE_FACTOR * cfg.rel_tol;
    let lambda = load.value();
    let mut out = Vec::with_capacity(2);

    if x - h >= 0.0 {
        let (behind, centre, ahead) = (
            erlang_b_real(x - h, load, cfg)?,
            erlang_b_real(x, load, cfg)?,
            erlang_b_real(x + h, load, cfg)?,
        );
        let unit = Unit::of_largest(behind);
        let form = if unit.form() == Form::Rescaled {
            Form::Rescaled
        } else {
            Form::Direct
        };
        let sides = Sides::new(2.0 * unit.of(centre), unit.of(behind) + unit.of(ahead), form);
        out.push(CheckReport::build(
            CheckName::BlockingConvex,
            Params::x(x),
            lambda,
            sides,
            rel,
        ));
    }

    let (behind, centre, ahead) = (
        phi_real(x - h, load, cfg)?,
        phi_real(x, load, cfg)?,
        phi_real(x + h, load, cfg)?,
    );
    let direct = Sides::new(behind.value() + ahead.value(), 2.0 * centre.value(), Form::Direct);
    let sides = if direct.resolves(rel) {
        direct
    } else {
        let unit = Unit::of_largest(behind.complement());
        Sides::new(
            2.0 * unit.of(centre.complement()),
            unit.of(behind.complement()) + unit.of(ahead.complement()),
            unit.form(),
        )
    };
    out.push(CheckReport::build(CheckName::PhiConcave, Params::x(x), lambda, sides, rel));
    Ok(out)
}

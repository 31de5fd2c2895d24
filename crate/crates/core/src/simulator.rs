//! Monte Carlo loss system: `n` circuits, Poisson arrivals at rate `λ`, holding times
//! with unit mean, blocked calls cleared.
//!
//! Runs are deterministic in the seed. The generator is ChaCha8 (`rand_chacha`)
//! seeded through `SeedableRng::seed_from_u64`; exponential variates are drawn by
//! inversion, `−ln(1 − U) / rate`, with `U` the generator's standard `[0, 1)` double.
//! The system starts empty and nothing is discarded as warm-up, which biases the
//! estimate by `O(n / arrivals)`.
//!
//! `std_error` is the binomial `sqrt(p(1 − p)/N)`. Blocking events are positively
//! correlated (a blocked call is likely followed by another), so it understates the
//! spread of the estimate, by a factor near 2 at moderate load. `batch_std_error`
//! estimates the actual standard error from [`BATCHES`] consecutive batch means.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{erlang_b_int, OfferedLoad};
use crate::par;

pub const GENERATOR: &str = "ChaCha8Rng/seed_from_u64";

pub const DEFAULT_ARRIVALS: u64 = 1_000_000;

/// Number of equal batches behind `batch_std_error`.
pub const BATCHES: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceDistribution {
    /// Exponential holding times with unit mean.
    #[default]
    Exponential,
    /// Every call holds a circuit for exactly one time unit.
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub servers: u64,
    pub load: OfferedLoad,
    pub arrivals: u64,
    pub seed: u64,
    pub service: ServiceDistribution,
}

impl SimConfig {
    pub fn new(servers: u64, load: OfferedLoad, seed: u64) -> Self {
        Self {
            servers,
            load,
            arrivals: DEFAULT_ARRIVALS,
            seed,
            service: ServiceDistribution::Exponential,
        }
    }

    pub fn with_arrivals(mut self, arrivals: u64) -> Self {
        self.arrivals = arrivals;
        self
    }

    pub fn with_service(mut self, service: ServiceDistribution) -> Self {
        self.service = service;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub offered: u64,
    pub blocked: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// Standard error from batch means; `None` with fewer than two arrivals per batch.
    pub batch_std_error: Option<f64>,
    pub generator: &'static str,
}

impl SimResult {
    fn new(offered: u64, blocked: u64, batch_estimates: &[f64]) -> Self {
        let estimate = blocked as f64 / offered as f64;
        Self {
            offered,
            blocked,
            estimate,
            std_error: (estimate * (1.0 - estimate) / offered as f64).sqrt(),
            batch_std_error: batch_std_error(batch_estimates),
            generator: GENERATOR,
        }
    }

    /// `(estimate − B(n, λ)) / std_error`; `None` when the standard error is zero and
    /// the estimate differs from the analytic value.
    pub fn z_score(&self, analytic: f64) -> Option<f64> {
        let diff = self.estimate - analytic;
        if self.std_error > 0.0 {
            Some(diff / self.std_error)
        } else if diff == 0.0 {
            Some(0.0)
        } else {
            None
        }
    }
}

/// Wire format of a simulation together with its analytic comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub servers: u64,
    pub lambda: f64,
    pub arrivals: u64,
    pub seed: u64,
    pub blocked: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub batch_std_error: Option<f64>,
    pub analytic: f64,
    pub z_score: Option<f64>,
    pub service: ServiceDistribution,
    pub generator: &'static str,
}

impl SimReport {
    pub fn new(cfg: &SimConfig, result: &SimResult) -> Self {
        let analytic = erlang_b_int(cfg.servers, cfg.load).value();
        Self {
            servers: cfg.servers,
            lambda: cfg.load.value(),
            arrivals: cfg.arrivals,
            seed: cfg.seed,
            blocked: result.blocked,
            estimate: result.estimate,
            std_error: result.std_error,
            batch_std_error: result.batch_std_error,
            analytic,
            z_score: result.z_score(analytic),
            service: cfg.service,
            generator: result.generator,
        }
    }
}

/// Departure time ordered by `f64::total_cmp`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Time(f64);

impl Eq for Time {}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn batch_std_error(means: &[f64]) -> Option<f64> {
    if means.len() < 2 {
        return None;
    }
    let k = means.len() as f64;
    let mean = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Some((var / k).sqrt())
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p() / rate
}

pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.arrivals == 0 {
        return Err(domain("a simulation needs at least one arrival"));
    }
    let lambda = cfg.load.value();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut departures: BinaryHeap<Reverse<Time>> = BinaryHeap::new();
    let mut now = 0.0;
    let mut blocked = 0u64;
    let batched = cfg.arrivals >= 2 * BATCHES;
    let batch_len = cfg.arrivals / BATCHES;
    let mut batch_means = Vec::new();
    let mut batch_blocked = 0u64;

    for i in 0..cfg.arrivals {
        now += exponential(&mut rng, lambda);
        while let Some(&Reverse(Time(t))) = departures.peek() {
            if t > now {
                break;
            }
            departures.pop();
        }
        if (departures.len() as u64) < cfg.servers {
            let hold = match cfg.service {
                ServiceDistribution::Exponential => exponential(&mut rng, 1.0),
                ServiceDistribution::Deterministic => 1.0,
            };
            departures.push(Reverse(Time(now + hold)));
        } else {
            blocked += 1;
            batch_blocked += 1;
        }
        // the remainder of arrivals / BATCHES is left out of the batches only
        if batched && (i + 1) % batch_len == 0 && (batch_means.len() as u64) < BATCHES {
            batch_means.push(batch_blocked as f64 / batch_len as f64);
            batch_blocked = 0;
        }
    }
    Ok(SimResult::new(cfg.arrivals, blocked, &batch_means))
}

/// Runs independent simulations, in parallel when the `parallel` feature is enabled.
/// Results are in input order and identical to running [`simulate`] on each.
pub fn simulate_many(cfgs: &[SimConfig]) -> Result<Vec<SimResult>> {
    par::map_ordered(cfgs, simulate).into_iter().collect()
}

/// [`simulate_many`] on the calling thread only.
pub fn simulate_many_sequential(cfgs: &[SimConfig]) -> Result<Vec<SimResult>> {
    par::map_sequential(cfgs, simulate).into_iter().collect()
}

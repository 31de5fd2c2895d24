//! Erlang's loss function `B(n, λ)` and the partial sums of the exponential series.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] evaluates `B(n, λ)` at integer `n`, the ratio `φ(n, λ)` and the
//!   Poisson-scaled partial sums `e^{-λ} s_n(λ)` without overflow.
//! * [`continuation`] extends `B` to real server counts through its integral
//!   representation.
//! * [`properties`] checks the convexity-derived inequalities over parameter grids.
//! * [`inverse`] answers dimensioning questions (servers for a target, traffic for a
//!   target).
//! * [`simulator`] is a Monte Carlo loss system used as an independent oracle.
//!
//! With the `parallel` feature (on by default) sweeps and multi-seed simulations are
//! spread over a rayon thread pool. Results are identical with and without it.

pub mod continuation;
mod error;
pub mod inverse;
pub mod numerics;
mod par;
pub mod properties;
pub mod simulator;

pub use continuation::{erlang_b_real, phi_real, second_difference, QuadratureConfig};
pub use error::{Error, Result};
pub use inverse::{min_servers, solve_servers_real, solve_traffic, BlockingTarget, SolveOptions};
pub use numerics::{
    erlang_b_int, log_binomial, phi, scaled_partial_sum, Blocking, OfferedLoad, PhiValue,
    ScaledPartialSum,
};
pub use properties::{run_sweep, run_sweep_sequential, CheckName, CheckReport, SweepGrid};
pub use simulator::{simulate, simulate_many, SimConfig, SimReport, SimResult};

//! The one-sided β-stable subordinator `S_β` and its inverse `W_β(t) = inf{r : S_β(r) > t}`.
//!
//! `S_β(1)` is drawn with Kanter's representation, which has Laplace transform
//! `E[exp(-u S_β(1))] = exp(-u^β)`. Marginals of the inverse use
//! self-similarity, `W_β(t) =ᵈ (t / S_β(1))^β`, which is exact.
//!
//! Whole trajectories come from a [`Clock`]: `S_β` is simulated on an
//! operational-time lattice of spacing `step` and `W_β(t)` is the first lattice
//! time at which `S_β` exceeds `t`. The first-passage time is recorded at the
//! overshooting lattice point, so path values are biased upward by at most
//! `step`. β = 1 is the deterministic calendar clock `W(t) = t`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::specfun::{beta_fn, inc_beta};

/// Stability index of the subordinator. `beta = 1` is the degenerate calendar clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    beta: f64,
}

impl StableParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain(format!(
                "stability index must lie in (0, 1], got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_deterministic(&self) -> bool {
        self.beta == 1.0
    }
}

/// Strictly increasing, non-negative observation times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("time grid must not be empty"));
        }
        if points.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::domain(
                "time grid points must be finite and non-negative",
            ));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("time grid must be strictly increasing"));
        }
        Ok(Self { points })
    }

    /// `0, step, 2 step, ..., horizon`.
    pub fn uniform(horizon: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && horizon > 0.0 && step <= horizon) {
            return Err(Error::domain(format!(
                "uniform grid needs 0 < step <= horizon, got step={step}, horizon={horizon}"
            )));
        }
        let n = (horizon / step).round() as usize;
        Self::new((0..=n).map(|i| i as f64 * step).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().expect("grid is non-empty")
    }

    /// Spacing of a uniform grid starting at zero, if the grid is one.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.points.len() < 2 || self.points[0] != 0.0 {
            return None;
        }
        let h = self.points[1];
        let uniform = self
            .points
            .iter()
            .enumerate()
            .all(|(i, t)| (t - i as f64 * h).abs() <= 1e-9 * h.max(*t));
        uniform.then_some(h)
    }
}

/// One realization of `W_β` observed on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InversePath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Draws `S_β(1)` (Kanter / Chambers–Mallows–Stuck for the totally skewed case).
pub fn sample_stable_unit<R: Rng + ?Sized>(params: &StableParams, rng: &mut R) -> f64 {
    let b = params.beta;
    if b == 1.0 {
        return 1.0;
    }
    let u = loop {
        let r: f64 = rng.random();
        if r > 0.0 {
            break PI * r;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let a = (b * u).sin() / u.sin().powf(1.0 / b);
    let c = (((1.0 - b) * u).sin() / e).powf((1.0 - b) / b);
    a * c
}

/// Draws `W_β(t)` exactly via `(t / S_β(1))^β`.
pub fn sample_inverse_marginal<R: Rng + ?Sized>(params: &StableParams, t: f64, rng: &mut R) -> f64 {
    assert!(t >= 0.0, "time must be non-negative");
    if params.is_deterministic() || t == 0.0 {
        return t;
    }
    (t / sample_stable_unit(params, rng)).powf(params.beta)
}

/// A sampled time change: either calendar time or a lattice realization of `S_β`.
#[derive(Debug, Clone, PartialEq)]
pub enum Clock {
    Calendar,
    Lattice {
        step: f64,
        /// `S_β(i step)` for `i = 0, 1, ...`, ending with the first level above the horizon.
        levels: Vec<f64>,
    },
}

impl Clock {
    /// Samples `S_β` on the lattice until it passes `horizon`.
    pub fn sample<R: Rng + ?Sized>(
        params: &StableParams,
        horizon: f64,
        step: f64,
        rng: &mut R,
    ) -> Self {
        assert!(step > 0.0, "lattice step must be positive");
        if params.is_deterministic() {
            return Clock::Calendar;
        }
        let scale = step.powf(1.0 / params.beta);
        let mut levels = vec![0.0];
        let mut s = 0.0;
        while s <= horizon {
            s += scale * sample_stable_unit(params, rng);
            levels.push(s);
        }
        Clock::Lattice { step, levels }
    }

    /// `W_β(t)`; `W_β(0) = 0` by convention. `t` must not exceed the sampled horizon.
    pub fn inverse_at(&self, t: f64) -> f64 {
        match self {
            Clock::Calendar => t,
            Clock::Lattice { step, levels } => {
                if t <= 0.0 {
                    return 0.0;
                }
                debug_assert!(
                    *levels.last().unwrap() > t,
                    "time beyond the sampled horizon"
                );
                levels.partition_point(|s| *s <= t) as f64 * step
            }
        }
    }

    /// Calendar time at which an event at operational time `tau > 0` becomes
    /// visible through the clock: the event is counted in `N(W_β(t))` exactly
    /// when `epoch_of(tau) <= t`. Infinite past the sampled horizon.
    pub fn epoch_of(&self, tau: f64) -> f64 {
        match self {
            Clock::Calendar => tau,
            Clock::Lattice { step, levels } => {
                let cell = (tau / step).ceil().max(1.0) as usize;
                levels.get(cell - 1).copied().unwrap_or(f64::INFINITY)
            }
        }
    }

    pub fn observe(&self, grid: &TimeGrid) -> InversePath {
        InversePath {
            grid: grid.points().to_vec(),
            values: grid.points().iter().map(|t| self.inverse_at(*t)).collect(),
        }
    }
}

/// Samples a trajectory of `W_β` on `grid` with operational lattice spacing `step`.
pub fn sample_inverse_path<R: Rng + ?Sized>(
    params: &StableParams,
    grid: &TimeGrid,
    step: f64,
    rng: &mut R,
) -> InversePath {
    Clock::sample(params, grid.horizon(), step, rng).observe(grid)
}

/// Calendar epochs of events at increasing operational times, drawn with the
/// same law as [`Clock::epoch_of`] on a lattice of spacing `step` but at a cost
/// proportional to the number of events: stable increments over several
/// lattice cells are aggregated into one draw.
#[derive(Debug, Clone)]
pub struct EpochSampler {
    params: StableParams,
    step: f64,
    index: u64,
    level: f64,
}

impl EpochSampler {
    pub fn new(params: StableParams, step: f64) -> Self {
        assert!(step > 0.0, "lattice step must be positive");
        Self {
            params,
            step,
            index: 0,
            level: 0.0,
        }
    }

    /// Epoch of the next event; `tau` must not decrease between calls.
    pub fn epoch<R: Rng + ?Sized>(&mut self, tau: f64, rng: &mut R) -> f64 {
        if self.params.is_deterministic() {
            return tau;
        }
        let target = ((tau / self.step).ceil().max(1.0) as u64) - 1;
        if target > self.index {
            let span = (target - self.index) as f64 * self.step;
            self.level += span.powf(1.0 / self.params.beta) * sample_stable_unit(&self.params, rng);
            self.index = target;
        }
        self.level
    }
}

/// `E[W_β(t)] = t^β / Γ(β+1)`.
pub fn inverse_mean(params: &StableParams, t: f64) -> f64 {
    t.powf(params.beta) / gamma(params.beta + 1.0)
}

/// `d(β) = 2/Γ(2β+1) - 1/Γ(β+1)^2`, so that `Var[W_β(t)] = d(β) t^{2β}`.
pub fn inverse_var_coefficient(beta: f64) -> f64 {
    2.0 / gamma(2.0 * beta + 1.0) - 1.0 / gamma(beta + 1.0).powi(2)
}

pub fn inverse_var(params: &StableParams, t: f64) -> f64 {
    inverse_var_coefficient(params.beta) * t.powf(2.0 * params.beta)
}

/// Exact `Cov[W_β(s), W_β(t)]` for `0 <= s <= t`:
///
/// ```text
/// (β s^{2β} B(β, β+1) + β t^{2β} B(β, β+1; s/t) - (ts)^β) / Γ(β+1)^2
/// ```
pub fn inverse_cov(params: &StableParams, s: f64, t: f64) -> Result<f64> {
    check_ordered(s, t)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let b = params.beta;
    let full = beta_fn(b, b + 1.0)?;
    let partial = inc_beta(b, b + 1.0, s / t)?;
    let g = gamma(b + 1.0);
    Ok((b * s.powf(2.0 * b) * full + b * t.powf(2.0 * b) * partial - (t * s).powf(b)) / (g * g))
}

/// Large-`t` form of [`inverse_cov`] at fixed `s`:
/// `(β s^{2β} B(β, β+1) - β² s^{β+1} / ((β+1) t^{1-β})) / Γ(β+1)^2`.
pub fn inverse_cov_asymptotic(params: &StableParams, s: f64, t: f64) -> Result<f64> {
    check_ordered(s, t)?;
    let b = params.beta;
    let g = gamma(b + 1.0);
    let full = beta_fn(b, b + 1.0)?;
    Ok(
        (b * s.powf(2.0 * b) * full - b * b * s.powf(b + 1.0) / ((b + 1.0) * t.powf(1.0 - b)))
            / (g * g),
    )
}

fn check_ordered(s: f64, t: f64) -> Result<()> {
    if !(s >= 0.0 && s <= t && t.is_finite()) {
        return Err(Error::domain(format!(
            "covariance requires 0 <= s <= t, got s={s}, t={t}"
        )));
    }
    Ok(())
}

//! The generalized counting process (GCP) with jumps of size `1..=k` at rates
//! `λ_1..λ_k`, and its time change by the inverse β-stable subordinator
//! (GFCP), `N^β(t) = N(W_β(t))`.
//!
//! The pmf is
//!
//! ```text
//! p_n(t) = Σ_{r=0}^{n} Σ_{j: Σ j_i = r, Σ i j_i = n} r! Π λ_i^{j_i} / j_i!  t^{βr} E^{r+1}_{β,βr+1}(-Δ t^β)
//! ```
//!
//! with `Δ = Σ λ_i`; the inner sum runs over non-negative integer vectors
//! `(j_1..j_k)`, enumerated depth-first with the pruning `j_i <= n / i`. The
//! enumeration grows like the number of partitions of `n`, so `n` up to about
//! 40 is the supported range.

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::specfun::{mlf, mlf3, rl_derivative, MlfArgs, SeriesControl};
use crate::subordinator::{
    inverse_cov, inverse_cov_asymptotic, sample_inverse_marginal, Clock, StableParams, TimeGrid,
};

/// Stability index and jump rates of a GFCP.
#[derive(Debug, Clone, PartialEq)]
pub struct GfcpParams {
    beta: f64,
    rates: Vec<f64>,
}

impl GfcpParams {
    pub fn new(beta: f64, rates: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain(format!(
                "beta must lie in (0, 1], got {beta}"
            )));
        }
        if rates.is_empty() {
            return Err(Error::domain("at least one jump rate is required"));
        }
        if let Some((i, r)) = rates
            .iter()
            .enumerate()
            .find(|(_, r)| !(**r > 0.0 && r.is_finite()))
        {
            return Err(Error::domain(format!(
                "rates[{i}] must be positive, got {r}"
            )));
        }
        Ok(Self { beta, rates })
    }

    /// Pólya–Aeppli of order `k`: `λ_j = λ (1-ρ) ρ^{j-1} / (1-ρ^k)`.
    pub fn polya_aeppli(beta: f64, lambda: f64, rho: f64, k: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::domain(format!(
                "Pólya–Aeppli rho must lie in [0, 1), got {rho}"
            )));
        }
        if k == 0 {
            return Err(Error::domain("order k must be at least 1"));
        }
        let norm = 1.0 - rho.powi(k as i32);
        let rates = (1..=k)
            .map(|j| lambda * (1.0 - rho) * rho.powi(j as i32 - 1) / norm)
            .collect();
        Self::new(beta, rates)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Number of jump kinds.
    pub fn k(&self) -> usize {
        self.rates.len()
    }

    /// `Δ = Σ λ_j`.
    pub fn delta(&self) -> f64 {
        self.rates.iter().sum()
    }

    /// `Σ j λ_j`, the mean jump rate of the GCP.
    pub fn jump_rate(&self) -> f64 {
        self.weighted(1)
    }

    /// `Σ j² λ_j`.
    pub fn jump_rate_sq(&self) -> f64 {
        self.weighted(2)
    }

    fn weighted(&self, power: i32) -> f64 {
        self.rates
            .iter()
            .enumerate()
            .map(|(i, l)| ((i + 1) as f64).powi(power) * l)
            .sum()
    }

    /// `S = Σ j λ_j / Γ(β+1)`.
    pub fn s_const(&self) -> f64 {
        self.jump_rate() / gamma(self.beta + 1.0)
    }

    /// `R = (2/Γ(2β+1) - 1/Γ(β+1)²) (Σ j λ_j)²`.
    pub fn r_const(&self) -> f64 {
        crate::subordinator::inverse_var_coefficient(self.beta) * self.jump_rate().powi(2)
    }

    /// `T = Σ j² λ_j / Γ(β+1)`.
    pub fn t_const(&self) -> f64 {
        self.jump_rate_sq() / gamma(self.beta + 1.0)
    }

    pub fn stable(&self) -> StableParams {
        StableParams::new(self.beta).expect("beta validated on construction")
    }

    /// Same rates on the calendar clock.
    pub fn calendar(&self) -> Self {
        Self {
            beta: 1.0,
            rates: self.rates.clone(),
        }
    }

    /// Jump size drawn with probabilities `λ_j / Δ`.
    pub(crate) fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut u = rng.random::<f64>() * self.delta();
        for (i, l) in self.rates.iter().enumerate() {
            if u < *l {
                return i as u64 + 1;
            }
            u -= l;
        }
        self.k() as u64
    }
}

/// One realization of a counting process on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingPath {
    pub grid: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Event of the GCP in operational time: `jump` units arrive at time `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcpEvent {
    pub time: f64,
    pub jump: u64,
}

/// GCP events in operational time, in increasing order.
///
/// The superposition of the `k` independent Poisson streams (stream `j` at
/// rate `λ_j` contributing jumps of size `j`) is generated as one Poisson
/// stream of rate `Δ` whose events carry size `j` with probability `λ_j / Δ`.
pub struct GcpEvents<'a, R: Rng + ?Sized> {
    params: &'a GfcpParams,
    inter_arrival: Exp<f64>,
    time: f64,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> GcpEvents<'a, R> {
    pub fn new(params: &'a GfcpParams, rng: &'a mut R) -> Self {
        Self {
            inter_arrival: Exp::new(params.delta()).expect("positive total rate"),
            params,
            time: 0.0,
            rng,
        }
    }

    /// Mutable access to the underlying stream, for draws interleaved with events.
    pub fn rng(&mut self) -> &mut R {
        self.rng
    }
}

impl<R: Rng + ?Sized> Iterator for GcpEvents<'_, R> {
    type Item = GcpEvent;

    fn next(&mut self) -> Option<GcpEvent> {
        self.time += self.inter_arrival.sample(self.rng);
        let jump = self.params.sample_jump(self.rng);
        Some(GcpEvent {
            time: self.time,
            jump,
        })
    }
}

/// GCP events in operational time up to `horizon`.
pub fn gcp_events<R: Rng + ?Sized>(
    params: &GfcpParams,
    horizon: f64,
    rng: &mut R,
) -> Vec<GcpEvent> {
    GcpEvents::new(params, rng)
        .take_while(|e| e.time <= horizon)
        .collect()
}

/// Counts `N(x)` on increasing operational times `xs` from a sorted event list.
pub(crate) fn count_at(events: &[GcpEvent], xs: impl IntoIterator<Item = f64>) -> Vec<u64> {
    let mut out = Vec::new();
    let mut idx = 0;
    let mut total = 0u64;
    for x in xs {
        while idx < events.len() && events[idx].time <= x {
            total += events[idx].jump;
            idx += 1;
        }
        out.push(total);
    }
    out
}

/// A GCP path on `grid` (β of `params` is ignored).
pub fn gcp_sample_path<R: Rng + ?Sized>(
    params: &GfcpParams,
    grid: &TimeGrid,
    rng: &mut R,
) -> CountingPath {
    let events = gcp_events(params, grid.horizon(), rng);
    CountingPath {
        grid: grid.points().to_vec(),
        counts: count_at(&events, grid.points().iter().copied()),
    }
}

/// A GFCP path: a GCP path in operational time read through a sampled clock.
pub fn gfcp_sample_path<R: Rng + ?Sized>(
    params: &GfcpParams,
    grid: &TimeGrid,
    step: f64,
    rng: &mut R,
) -> CountingPath {
    let clock = Clock::sample(&params.stable(), grid.horizon(), step, rng);
    gfcp_path_on_clock(params, grid, &clock, rng)
}

/// Composes GCP events with a given clock; the clock must cover the grid horizon.
pub fn gfcp_path_on_clock<R: Rng + ?Sized>(
    params: &GfcpParams,
    grid: &TimeGrid,
    clock: &Clock,
    rng: &mut R,
) -> CountingPath {
    let op_times: Vec<f64> = grid.points().iter().map(|t| clock.inverse_at(*t)).collect();
    let events = gcp_events(params, *op_times.last().unwrap(), rng);
    CountingPath {
        grid: grid.points().to_vec(),
        counts: count_at(&events, op_times),
    }
}

/// One draw of `N^β(t)`: an exact `W_β(t)` followed by independent Poisson
/// counts per jump kind.
pub fn gfcp_sample_marginal<R: Rng + ?Sized>(params: &GfcpParams, t: f64, rng: &mut R) -> u64 {
    let w = sample_inverse_marginal(&params.stable(), t, rng);
    sample_gcp_count(params, w, rng)
}

/// `N(x)` for the calendar-clock GCP at operational time `x`.
pub(crate) fn sample_gcp_count<R: Rng + ?Sized>(params: &GfcpParams, x: f64, rng: &mut R) -> u64 {
    if x <= 0.0 {
        return 0;
    }
    params
        .rates
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let n: f64 = Poisson::new(l * x).expect("positive mean").sample(rng);
            (i as u64 + 1) * n as u64
        })
        .sum()
}

/// `ln` of `Σ_{j} r! Π λ_i^{j_i} / j_i!` grouped by `r = Σ j_i`, over vectors with `Σ i j_i = n`.
/// Entry `r` is `None` when no composition has that many parts.
fn composition_log_weights(n: usize, rates: &[f64]) -> Vec<Option<f64>> {
    let ln_rates: Vec<f64> = rates.iter().map(|l| l.ln()).collect();
    let mut acc: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    let mut counts = vec![0usize; rates.len()];

    fn dfs(
        kind: usize,
        remaining: usize,
        counts: &mut [usize],
        ln_rates: &[f64],
        acc: &mut [Vec<f64>],
    ) {
        if kind == 0 {
            // The size-1 jumps absorb whatever remains.
            counts[0] = remaining;
            let r: usize = counts.iter().sum();
            let ln_w = ln_gamma(r as f64 + 1.0)
                + counts
                    .iter()
                    .zip(ln_rates)
                    .map(|(j, lr)| *j as f64 * lr - ln_gamma(*j as f64 + 1.0))
                    .sum::<f64>();
            acc[r].push(ln_w);
            return;
        }
        let size = kind + 1;
        for j in 0..=remaining / size {
            counts[kind] = j;
            dfs(kind - 1, remaining - j * size, counts, ln_rates, acc);
        }
        counts[kind] = 0;
    }

    dfs(rates.len() - 1, n, &mut counts, &ln_rates, &mut acc);
    acc.into_iter()
        .map(|terms| {
            if terms.is_empty() {
                None
            } else {
                let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                Some(m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln())
            }
        })
        .collect()
}

/// `E^{r+1}_{β,βr+1}(-Δ t^β)` for `r = 0..=n_max`.
fn pmf_kernels(n_max: usize, t: f64, params: &GfcpParams, ctl: &SeriesControl) -> Result<Vec<f64>> {
    let z = -params.delta() * t.powf(params.beta);
    (0..=n_max)
        .map(|r| {
            let rf = r as f64;
            mlf3(
                &MlfArgs::new(rf + 1.0, params.beta, params.beta * rf + 1.0, z),
                ctl,
            )
        })
        .collect()
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!(
            "time must be non-negative and finite, got {t}"
        )));
    }
    Ok(())
}

fn pmf_from_kernels(n: usize, t: f64, params: &GfcpParams, kernels: &[f64]) -> f64 {
    let ln_tb = params.beta * t.ln();
    composition_log_weights(n, &params.rates)
        .into_iter()
        .enumerate()
        .filter_map(|(r, w)| w.map(|ln_w| (ln_w + r as f64 * ln_tb).exp() * kernels[r]))
        .sum()
}

/// `Pr{N^β(t) = n}` by the series formula.
pub fn gfcp_pmf(n: usize, t: f64, params: &GfcpParams, ctl: &SeriesControl) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let kernels = pmf_kernels(n, t, params, ctl)?;
    Ok(pmf_from_kernels(n, t, params, &kernels))
}

/// `[p_0(t), ..., p_{n_max}(t)]`, sharing the Mittag-Leffler kernels across `n`.
pub fn gfcp_pmf_table(
    n_max: usize,
    t: f64,
    params: &GfcpParams,
    ctl: &SeriesControl,
) -> Result<Vec<f64>> {
    check_time(t)?;
    if t == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return Ok(v);
    }
    let kernels = pmf_kernels(n_max, t, params, ctl)?;
    Ok((0..=n_max)
        .map(|n| pmf_from_kernels(n, t, params, &kernels))
        .collect())
}

/// `E[u^{N^β(t)}] = E_{β,1}(Σ λ_i (u^i - 1) t^β)` for `|u| <= 1`.
pub fn gfcp_pgf(u: f64, t: f64, params: &GfcpParams, ctl: &SeriesControl) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::domain(format!(
            "pgf argument must lie in [-1, 1], got {u}"
        )));
    }
    check_time(t)?;
    let arg: f64 = params
        .rates
        .iter()
        .enumerate()
        .map(|(i, l)| l * (u.powi(i as i32 + 1) - 1.0))
        .sum::<f64>()
        * t.powf(params.beta);
    mlf(params.beta, arg, ctl)
}

/// `E[N^β(t)] = S t^β`.
pub fn gfcp_mean(t: f64, params: &GfcpParams) -> f64 {
    params.s_const() * t.powf(params.beta)
}

/// `Var[N^β(t)] = R t^{2β} + T t^β`.
pub fn gfcp_var(t: f64, params: &GfcpParams) -> f64 {
    params.r_const() * t.powf(2.0 * params.beta) + params.t_const() * t.powf(params.beta)
}

/// `Cov[N^β(s), N^β(t)] = T min^β + (Σ jλ_j)² Cov[W_β(s), W_β(t)]`; symmetric in its arguments.
pub fn gfcp_cov(s: f64, t: f64, params: &GfcpParams) -> Result<f64> {
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    check_time(s)?;
    Ok(params.t_const() * s.powf(params.beta)
        + params.jump_rate().powi(2) * inverse_cov(&params.stable(), s, t)?)
}

/// Large-`t` form `T s^β + S² (β s^{2β} B(β,β+1) - β² s^{β+1} / ((β+1) t^{1-β}))`.
pub fn gfcp_cov_asymptotic(s: f64, t: f64, params: &GfcpParams) -> Result<f64> {
    Ok(params.t_const() * s.powf(params.beta)
        + params.jump_rate().powi(2) * inverse_cov_asymptotic(&params.stable(), s, t)?)
}

/// Grid and evaluation window for checking a governing fractional DE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeCheck {
    pub t_max: f64,
    pub step: f64,
    pub n_max: usize,
    /// Residuals are reported on grid points with `t >= window_start`. The
    /// discretization error of the Grünwald–Letnikov sum carries a factor
    /// `t^{-β-1}`, so the window is kept away from the origin.
    pub window_start: f64,
}

impl DeCheck {
    pub fn new(t_max: f64, step: f64, n_max: usize) -> Result<Self> {
        let check = Self {
            t_max,
            step,
            n_max,
            window_start: t_max / 2.0,
        };
        check.validate()?;
        Ok(check)
    }

    pub fn with_window_start(mut self, window_start: f64) -> Result<Self> {
        self.window_start = window_start;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.step > 0.0 && self.step * 2.0 <= self.t_max) {
            return Err(Error::domain(format!(
                "DE check needs t_max > 0 and at least two steps, got t_max={}, step={}",
                self.t_max, self.step
            )));
        }
        if !(self.window_start > 0.0 && self.window_start <= self.t_max) {
            return Err(Error::domain(format!(
                "window start must lie in (0, t_max], got {}",
                self.window_start
            )));
        }
        Ok(())
    }

    pub(crate) fn grid(&self) -> Vec<f64> {
        let n = (self.t_max / self.step).round() as usize;
        (0..=n).map(|i| i as f64 * self.step).collect()
    }
}

/// Residual summary for one state `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateResidual {
    pub n: usize,
    pub max: f64,
    pub mean: f64,
}

/// Residuals `|D^β p_n(t) - RHS_n(t)|` over the evaluation window.
///
/// The derivative is taken of `p_n(t) - p_n(0)`, i.e. the Riemann–Liouville
/// operator regularized at the initial value (the Caputo form). Without the
/// shift the `n = 0` equation picks up the singular term `t^{-β} / Γ(1-β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeResidualReport {
    pub step: f64,
    pub states: Vec<StateResidual>,
}

impl DeResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.states.iter().map(|s| s.max).fold(0.0, f64::max)
    }

    pub(crate) fn from_rows(
        check: &DeCheck,
        order: f64,
        grid: &[f64],
        values: &[Vec<f64>],
        rhs: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut states = Vec::with_capacity(values.len());
        for (n, series) in values.iter().enumerate() {
            let start = series[0];
            let shifted: Vec<f64> = series.iter().map(|v| v - start).collect();
            let deriv = rl_derivative(&shifted, order, check.step)?;
            let residuals: Vec<f64> = grid
                .iter()
                .enumerate()
                .filter(|(_, t)| **t >= check.window_start - 1e-12 * check.t_max)
                .map(|(i, _)| (deriv[i] - rhs(n, i)).abs())
                .collect();
            states.push(StateResidual {
                n,
                max: residuals.iter().cloned().fold(0.0, f64::max),
                mean: residuals.iter().sum::<f64>() / residuals.len() as f64,
            });
        }
        Ok(Self {
            step: check.step,
            states,
        })
    }
}

/// Checks `D^β p_n = -Δ p_n + Σ_{j=1}^{n∧k} λ_j p_{n-j}` on a uniform grid.
pub fn verify_gfcp_de(
    params: &GfcpParams,
    check: &DeCheck,
    ctl: &SeriesControl,
) -> Result<DeResidualReport> {
    let grid = check.grid();
    let tables = grid
        .iter()
        .map(|t| gfcp_pmf_table(check.n_max, *t, params, ctl))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Vec<f64>> = (0..=check.n_max)
        .map(|n| tables.iter().map(|row| row[n]).collect())
        .collect();
    let delta = params.delta();
    DeResidualReport::from_rows(check, params.beta, &grid, &values, |n, i| {
        let row = &tables[i];
        -delta * row[n]
            + (1..=n.min(params.k()))
                .map(|j| params.rates[j - 1] * row[n - j])
                .sum::<f64>()
    })
}

//! Risk surplus processes driven by the GFCP.
//!
//! * GFRP: `R(t) = ν + η(1+ρ) m W_β(t) - Σ_{j ≤ N^β(t)} X_j` with `m = Σ i λ_i`
//!   and `E[X] = η`. Premium and claim counts read one clock trajectory.
//! * NH-GFRP: premium `η(1+ρ) Λ(W_β(t))` and claim counts `N(Λ(W_β(t)) / m)`,
//!   so that jump kind `i` has mean measure `λ_i Λ / m`. `Λ(t) = m t` gives
//!   back the GFRP.
//! * AGFRP: `ν + η t - Σ_{j ≤ N^β(t)} Y_j`, premium in calendar time.
//!
//! The increment process `H_ε(t) = R(t+ε) - R(t)` of the GFRP is the GFNRP.

use rand::Rng;
use statrs::function::gamma::gamma;

use crate::compound::ClaimDistribution;
use crate::counting::{count_at, gcp_events, CountingPath, GfcpParams};
use crate::error::{Error, Result};
use crate::mc::{normal_quantile_two_sided, simulate, RngStreams, Summary};
use crate::subordinator::{inverse_cov, inverse_mean, Clock, InversePath, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskVariant {
    Gfrp,
    NhGfrp,
    Agfrp,
}

/// Cumulative rate `Λ(t) = a t^γ`, `a > 0`, `0 < γ <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulativeRate {
    scale: f64,
    exponent: f64,
}

impl CumulativeRate {
    pub fn new(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!(
                "cumulative rate scale must be positive, got {scale}"
            )));
        }
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::domain(format!(
                "cumulative rate exponent must lie in (0, 1], got {exponent}"
            )));
        }
        Ok(Self { scale, exponent })
    }

    pub fn linear(scale: f64) -> Result<Self> {
        Self::new(scale, 1.0)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.scale * t.powf(self.exponent)
        }
    }

    /// `E[Λ(W_β(t))] = a t^{βγ} Γ(γ+1) / Γ(βγ+1)`.
    pub fn mean_on_clock(&self, beta: f64, t: f64) -> f64 {
        let g = self.exponent;
        self.scale * t.powf(beta * g) * gamma(g + 1.0) / gamma(beta * g + 1.0)
    }
}

/// Parameters of one of the three surplus processes.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskModelSpec {
    variant: RiskVariant,
    nu: f64,
    eta: f64,
    rho: f64,
    gfcp: GfcpParams,
    claims: ClaimDistribution,
    cumulative_rate: Option<CumulativeRate>,
}

impl RiskModelSpec {
    /// GFRP. With `rescale` the claim law is rescaled to mean `eta`; otherwise
    /// its mean must already be `eta`.
    pub fn gfrp(
        nu: f64,
        eta: f64,
        rho: f64,
        gfcp: GfcpParams,
        claims: ClaimDistribution,
        rescale: bool,
    ) -> Result<Self> {
        let claims = loaded_claims(nu, eta, rho, claims, rescale)?;
        Ok(Self {
            variant: RiskVariant::Gfrp,
            nu,
            eta,
            rho,
            gfcp,
            claims,
            cumulative_rate: None,
        })
    }

    pub fn nhgfrp(
        nu: f64,
        eta: f64,
        rho: f64,
        gfcp: GfcpParams,
        claims: ClaimDistribution,
        rate: CumulativeRate,
        rescale: bool,
    ) -> Result<Self> {
        let claims = loaded_claims(nu, eta, rho, claims, rescale)?;
        Ok(Self {
            variant: RiskVariant::NhGfrp,
            nu,
            eta,
            rho,
            gfcp,
            claims,
            cumulative_rate: Some(rate),
        })
    }

    /// AGFRP with premium rate `eta`.
    pub fn agfrp(nu: f64, eta: f64, gfcp: GfcpParams, claims: ClaimDistribution) -> Result<Self> {
        check_capital(nu)?;
        check_positive("premium rate", eta)?;
        claims.finite_mean()?;
        Ok(Self {
            variant: RiskVariant::Agfrp,
            nu,
            eta,
            rho: 0.0,
            gfcp,
            claims,
            cumulative_rate: None,
        })
    }

    pub fn variant(&self) -> RiskVariant {
        self.variant
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gfcp(&self) -> &GfcpParams {
        &self.gfcp
    }

    pub fn claims(&self) -> &ClaimDistribution {
        &self.claims
    }

    pub fn cumulative_rate(&self) -> Option<CumulativeRate> {
        self.cumulative_rate
    }

    /// Same model with a different initial capital.
    pub fn with_capital(&self, nu: f64) -> Result<Self> {
        check_capital(nu)?;
        Ok(Self { nu, ..self.clone() })
    }

    /// Premium collected up to calendar time `t` given the clock value `w = W_β(t)`.
    fn premium(&self, t: f64, w: f64) -> f64 {
        let loading = self.eta * (1.0 + self.rho);
        match self.variant {
            RiskVariant::Gfrp => loading * self.gfcp.jump_rate() * w,
            RiskVariant::NhGfrp => loading * self.rate().eval(w),
            RiskVariant::Agfrp => self.eta * t,
        }
    }

    /// GCP operational time at which claims are read for clock value `w`.
    fn claim_time(&self, w: f64) -> f64 {
        match self.variant {
            RiskVariant::NhGfrp => self.rate().eval(w) / self.gfcp.jump_rate(),
            _ => w,
        }
    }

    fn rate(&self) -> CumulativeRate {
        self.cumulative_rate
            .expect("NH-GFRP carries a cumulative rate")
    }

    fn require(&self, variant: RiskVariant) -> Result<()> {
        if self.variant == variant {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "operation needs a {variant:?} model, got {:?}",
                self.variant
            )))
        }
    }
}

fn check_capital(nu: f64) -> Result<()> {
    if nu >= 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "initial capital must be non-negative, got {nu}"
        )))
    }
}

fn check_positive(what: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be positive, got {x}")))
    }
}

fn loaded_claims(
    nu: f64,
    eta: f64,
    rho: f64,
    claims: ClaimDistribution,
    rescale: bool,
) -> Result<ClaimDistribution> {
    check_capital(nu)?;
    check_positive("claim mean eta", eta)?;
    if !rho.is_finite() || rho <= -1.0 {
        return Err(Error::domain(format!(
            "safety loading must exceed -1, got {rho}"
        )));
    }
    if rescale {
        return claims.with_mean(eta);
    }
    let mean = claims.finite_mean()?;
    if (mean - eta).abs() > 1e-12 * eta.max(1.0) {
        return Err(Error::domain(format!(
            "claim mean {mean} must equal eta = {eta}"
        )));
    }
    Ok(claims)
}

/// One surplus trajectory with the clock and claim counts that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SurplusPath {
    pub grid: Vec<f64>,
    pub surplus: Vec<f64>,
    pub clock: InversePath,
    pub counts: CountingPath,
}

/// Samples a surplus path of any variant.
pub fn sample_surplus_path<R: Rng + ?Sized>(
    spec: &RiskModelSpec,
    grid: &TimeGrid,
    step: f64,
    rng: &mut R,
) -> SurplusPath {
    let clock = Clock::sample(&spec.gfcp.stable(), grid.horizon(), step, rng);
    surplus_on_clock(spec, grid, &clock, rng)
}

/// Builds the surplus path from one clock trajectory; premium and counts both read `clock`.
pub fn surplus_on_clock<R: Rng + ?Sized>(
    spec: &RiskModelSpec,
    grid: &TimeGrid,
    clock: &Clock,
    rng: &mut R,
) -> SurplusPath {
    let path = clock.observe(grid);
    let claim_times: Vec<f64> = path.values.iter().map(|w| spec.claim_time(*w)).collect();
    let events = gcp_events(&spec.gfcp, *claim_times.last().unwrap(), rng);
    let mut paid = Vec::with_capacity(events.len() + 1);
    let mut total = 0.0;
    paid.push(0.0);
    for e in &events {
        for _ in 0..e.jump {
            total += spec.claims.sample(rng);
        }
        paid.push(total);
    }
    let counts = count_at(&events, claim_times.iter().copied());
    let mut idx = 0;
    let surplus = grid
        .points()
        .iter()
        .zip(&path.values)
        .zip(&claim_times)
        .map(|((t, w), x)| {
            while idx < events.len() && events[idx].time <= *x {
                idx += 1;
            }
            spec.nu + spec.premium(*t, *w) - paid[idx]
        })
        .collect();
    SurplusPath {
        grid: grid.points().to_vec(),
        surplus,
        counts: CountingPath {
            grid: grid.points().to_vec(),
            counts,
        },
        clock: path,
    }
}

pub fn gfrp_sample_path<R: Rng + ?Sized>(
    spec: &RiskModelSpec,
    grid: &TimeGrid,
    step: f64,
    rng: &mut R,
) -> Result<SurplusPath> {
    spec.require(RiskVariant::Gfrp)?;
    Ok(sample_surplus_path(spec, grid, step, rng))
}

pub fn nhgfrp_sample_path<R: Rng + ?Sized>(
    spec: &RiskModelSpec,
    grid: &TimeGrid,
    step: f64,
    rng: &mut R,
) -> Result<SurplusPath> {
    spec.require(RiskVariant::NhGfrp)?;
    Ok(sample_surplus_path(spec, grid, step, rng))
}

pub fn agfrp_sample_path<R: Rng + ?Sized>(
    spec: &RiskModelSpec,
    grid: &TimeGrid,
    step: f64,
    rng: &mut R,
) -> Result<SurplusPath> {
    spec.require(RiskVariant::Agfrp)?;
    Ok(sample_surplus_path(spec, grid, step, rng))
}

/// `E[R(t)]` for any variant.
pub fn surplus_mean(spec: &RiskModelSpec, t: f64) -> Result<f64> {
    let beta = spec.gfcp.beta();
    let stable = spec.gfcp.stable();
    let m = spec.gfcp.jump_rate();
    Ok(match spec.variant {
        RiskVariant::Gfrp => spec.nu + spec.eta * spec.rho * m * inverse_mean(&stable, t),
        RiskVariant::NhGfrp => spec.nu + spec.eta * spec.rho * spec.rate().mean_on_clock(beta, t),
        RiskVariant::Agfrp => {
            spec.nu + spec.eta * t - spec.claims.finite_mean()? * m * inverse_mean(&stable, t)
        }
    })
}

/// `Cov[R(s), R(t)] = η² m² ρ² Cov[W(s), W(t)] + S min^β Var[X] + T min^β η²` for the GFRP.
pub fn gfrp_cov(spec: &RiskModelSpec, s: f64, t: f64) -> Result<f64> {
    spec.require(RiskVariant::Gfrp)?;
    spec.claims.finite_second_moment()?;
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    let p = &spec.gfcp;
    let sb = s.powf(p.beta());
    let clock = (spec.eta * p.jump_rate() * spec.rho).powi(2) * inverse_cov(&p.stable(), s, t)?;
    Ok(clock + p.s_const() * sb * spec.claims.variance() + p.t_const() * sb * spec.eta * spec.eta)
}

pub fn gfrp_var(spec: &RiskModelSpec, t: f64) -> Result<f64> {
    gfrp_cov(spec, t, t)
}

pub fn gfrp_corr(spec: &RiskModelSpec, s: f64, t: f64) -> Result<f64> {
    Ok(gfrp_cov(spec, s, t)? / (gfrp_var(spec, s)? * gfrp_var(spec, t)?).sqrt())
}

fn check_lag(epsilon: f64) -> Result<()> {
    check_positive("increment lag", epsilon)
}

/// `Cov[H_ε(s), H_ε(t)]` for the GFNRP `H_ε(t) = R(t+ε) - R(t)`.
pub fn gfnrp_cov(spec: &RiskModelSpec, epsilon: f64, s: f64, t: f64) -> Result<f64> {
    check_lag(epsilon)?;
    let c = |a: f64, b: f64| gfrp_cov(spec, a, b);
    Ok(c(s + epsilon, t + epsilon)? - c(s + epsilon, t)? - c(s, t + epsilon)? + c(s, t)?)
}

/// `Var[H_ε(t)]`.
pub fn gfnrp_var(spec: &RiskModelSpec, epsilon: f64, t: f64) -> Result<f64> {
    gfnrp_cov(spec, epsilon, t, t)
}

/// Leading large-`t` behaviour `Var[H_ε(t)] ≈ (T η² + S Var[X]) β ε t^{β-1}`.
pub fn gfnrp_var_leading(spec: &RiskModelSpec, epsilon: f64, t: f64) -> Result<f64> {
    check_lag(epsilon)?;
    spec.require(RiskVariant::Gfrp)?;
    let p = &spec.gfcp;
    let coeff = p.t_const() * spec.eta * spec.eta + p.s_const() * spec.claims.variance();
    Ok(coeff * p.beta() * epsilon * t.powf(p.beta() - 1.0))
}

pub fn gfnrp_corr(spec: &RiskModelSpec, epsilon: f64, s: f64, t: f64) -> Result<f64> {
    Ok(gfnrp_cov(spec, epsilon, s, t)?
        / (gfnrp_var(spec, epsilon, s)? * gfnrp_var(spec, epsilon, t)?).sqrt())
}

/// Increments `R(t_i + ε) - R(t_i)` along a path on a uniform grid; `ε` must
/// be a whole number of grid steps.
pub fn gfnrp_increments(path: &SurplusPath, epsilon: f64) -> Result<Vec<f64>> {
    check_lag(epsilon)?;
    let grid = TimeGrid::new(path.grid.clone())?;
    let step = grid
        .uniform_step()
        .ok_or_else(|| Error::domain("increments need a uniform grid starting at 0"))?;
    let lag = (epsilon / step).round();
    if lag < 1.0 || (lag * step - epsilon).abs() > 1e-9 * epsilon {
        return Err(Error::domain(format!(
            "increment lag {epsilon} is not a multiple of the grid step {step}"
        )));
    }
    let lag = lag as usize;
    Ok(path
        .surplus
        .iter()
        .zip(path.surplus.iter().skip(lag))
        .map(|(a, b)| b - a)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dependence {
    Long,
    Short,
    Neither,
}

impl Dependence {
    pub fn label(&self) -> &'static str {
        match self {
            Dependence::Long => "LRD",
            Dependence::Short => "SRD",
            Dependence::Neither => "none",
        }
    }
}

/// Least-squares fit of `log|corr| = c + slope log t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependenceFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub class: Dependence,
}

impl DependenceFit {
    /// Decay exponent `d` in `corr ~ c t^{-d}`.
    pub fn exponent(&self) -> f64 {
        -self.slope
    }
}

pub fn estimate_dependence_exponent(samples: &[(f64, f64)]) -> Result<DependenceFit> {
    if samples.len() < 5 {
        return Err(Error::Estimation(format!(
            "need at least 5 points, got {}",
            samples.len()
        )));
    }
    if let Some((t, c)) = samples
        .iter()
        .find(|(t, c)| !(*t > 0.0 && t.is_finite() && c.is_finite() && *c != 0.0))
    {
        return Err(Error::Estimation(format!(
            "points need t > 0 and non-zero finite correlation, got ({t}, {c})"
        )));
    }
    let mut ts: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
    ts.sort_by(f64::total_cmp);
    if ts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Estimation("time points must be distinct".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, c)| c.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_se = (rss / (n - 2.0) / sxx).sqrt();
    let d = -slope;
    let class = if d > 0.0 && d < 1.0 {
        Dependence::Long
    } else if d > 1.0 && d < 2.0 {
        Dependence::Short
    } else {
        Dependence::Neither
    };
    Ok(DependenceFit {
        slope,
        intercept,
        slope_se,
        class,
    })
}

/// Empirical `E[R(t) - R(s)]` with a normal confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Closed-form drift.
    pub expected: f64,
}

/// Estimates the drift of a GFRP or NH-GFRP between `s` and `t` from shared-clock paths.
pub fn martingale_drift_check(
    spec: &RiskModelSpec,
    s: f64,
    t: f64,
    n_paths: usize,
    step: f64,
    streams: &RngStreams,
    confidence: f64,
) -> Result<DriftEstimate> {
    if spec.variant == RiskVariant::Agfrp {
        return Err(Error::domain(
            "drift check applies to GFRP and NH-GFRP models",
        ));
    }
    if !(s > 0.0 && s < t && t.is_finite()) {
        return Err(Error::domain(format!(
            "drift check needs 0 < s < t, got s={s}, t={t}"
        )));
    }
    if n_paths < 2 {
        return Err(Error::domain("drift check needs at least two paths"));
    }
    check_positive("lattice step", step)?;
    let z = normal_quantile_two_sided(confidence)?;
    let grid = TimeGrid::new(vec![0.0, s, t])?;
    let diffs = simulate(streams, n_paths, |rng, _| {
        let path = sample_surplus_path(spec, &grid, step, rng);
        path.surplus[2] - path.surplus[1]
    });
    let summary = Summary::of(&diffs);
    Ok(DriftEstimate {
        mean: summary.mean,
        std_error: summary.std_error,
        ci_lo: summary.mean - z * summary.std_error,
        ci_hi: summary.mean + z * summary.std_error,
        expected: surplus_mean(spec, t)? - surplus_mean(spec, s)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gfcp(beta: f64) -> GfcpParams {
        GfcpParams::new(beta, vec![1.0, 0.5]).unwrap()
    }

    fn gfrp(beta: f64, rho: f64) -> RiskModelSpec {
        let claims = ClaimDistribution::exponential(1.0).unwrap();
        RiskModelSpec::gfrp(5.0, 1.0, rho, gfcp(beta), claims, false).unwrap()
    }

    #[test]
    fn claim_mean_must_match_eta() {
        let claims = ClaimDistribution::exponential(1.0).unwrap();
        assert!(RiskModelSpec::gfrp(1.0, 2.0, 0.1, gfcp(0.7), claims.clone(), false).is_err());
        let spec = RiskModelSpec::gfrp(1.0, 2.0, 0.1, gfcp(0.7), claims, true).unwrap();
        assert_abs_diff_eq!(spec.claims().mean(), 2.0, epsilon = 1e-14);
        assert!(RiskModelSpec::agfrp(
            -1.0,
            1.0,
            gfcp(0.7),
            ClaimDistribution::exponential(1.0).unwrap()
        )
        .is_err());
        assert!(CumulativeRate::new(1.0, 1.5).is_err());
    }

    #[test]
    fn covariance_reductions() {
        let spec = RiskModelSpec::gfrp(
            0.0,
            2.0,
            0.0,
            gfcp(0.6),
            ClaimDistribution::deterministic(2.0).unwrap(),
            false,
        )
        .unwrap();
        let p = spec.gfcp();
        assert_abs_diff_eq!(
            gfrp_cov(&spec, 1.0, 3.0).unwrap(),
            p.t_const() * 4.0,
            epsilon = 1e-12
        );
        let spec = gfrp(0.7, 0.2);
        assert_abs_diff_eq!(
            gfrp_cov(&spec, 1.5, 1.5).unwrap(),
            gfrp_var(&spec, 1.5).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            gfrp_cov(&spec, 1.0, 2.0).unwrap(),
            gfrp_cov(&spec, 2.0, 1.0).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn gfnrp_variance_approaches_leading_term() {
        let spec = gfrp(0.6, 0.1);
        let exact = gfnrp_var(&spec, 1.0, 5000.0).unwrap();
        let lead = gfnrp_var_leading(&spec, 1.0, 5000.0).unwrap();
        assert!((exact / lead - 1.0).abs() < 0.05, "{exact} vs {lead}");
    }

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<(f64, f64)> = (1..=8)
            .map(|i| (i as f64 * 10.0, (i as f64 * 10.0).powf(-0.5)))
            .collect();
        let fit = estimate_dependence_exponent(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, -0.5, epsilon = 1e-10);
        assert_eq!(fit.class, Dependence::Long);
        assert!(estimate_dependence_exponent(&pts[..4]).is_err());
        let mut dup = pts.clone();
        dup[1].0 = dup[0].0;
        assert!(estimate_dependence_exponent(&dup).is_err());
        let mut zero = pts;
        zero[2].1 = 0.0;
        assert!(estimate_dependence_exponent(&zero).is_err());
    }

    #[test]
    fn path_starts_at_capital_and_jumps_down_at_claims() {
        let spec = gfrp(0.7, 0.2);
        let grid = TimeGrid::uniform(3.0, 0.01).unwrap();
        let mut rng = RngStreams::new(4).stream(0);
        for _ in 0..20 {
            let path = gfrp_sample_path(&spec, &grid, 1e-3, &mut rng).unwrap();
            assert_eq!(path.surplus[0], 5.0);
            for i in 1..path.grid.len() {
                let premium = spec.premium(path.grid[i], path.clock.values[i])
                    - spec.premium(path.grid[i - 1], path.clock.values[i - 1]);
                let change = path.surplus[i] - path.surplus[i - 1];
                if path.counts.counts[i] == path.counts.counts[i - 1] {
                    assert_abs_diff_eq!(change, premium, epsilon = 1e-9);
                } else {
                    assert!(change < premium);
                }
            }
        }
    }

    #[test]
    fn increments_telescope() {
        let spec = gfrp(0.6, 0.3);
        let grid = TimeGrid::uniform(2.0, 0.1).unwrap();
        let mut rng = RngStreams::new(8).stream(0);
        let path = gfrp_sample_path(&spec, &grid, 1e-3, &mut rng).unwrap();
        let inc = gfnrp_increments(&path, 0.1).unwrap();
        let total: f64 = inc.iter().sum();
        assert_abs_diff_eq!(total, path.surplus[20] - path.surplus[0], epsilon = 1e-9);
        assert!(gfnrp_increments(&path, 0.15).is_err());
        assert_eq!(gfnrp_increments(&path, 0.3).unwrap().len(), 18);
    }

    #[test]
    fn agfrp_without_claims_is_linear() {
        let p = GfcpParams::new(0.8, vec![1e-12]).unwrap();
        let spec = RiskModelSpec::agfrp(2.0, 1.5, p, ClaimDistribution::exponential(1.0).unwrap())
            .unwrap();
        let grid = TimeGrid::uniform(1.0, 0.25).unwrap();
        let mut rng = RngStreams::new(1).stream(0);
        let path = agfrp_sample_path(&spec, &grid, 1e-3, &mut rng).unwrap();
        for (t, r) in path.grid.iter().zip(&path.surplus) {
            assert_abs_diff_eq!(*r, 2.0 + 1.5 * t, epsilon = 1e-12);
        }
        assert!(gfrp_sample_path(&spec, &grid, 1e-3, &mut rng).is_err());
    }

    #[test]
    fn linear_cumulative_rate_matches_gfrp_mean() {
        let claims = ClaimDistribution::exponential(1.0).unwrap();
        let p = gfcp(0.7);
        let rate = CumulativeRate::linear(p.jump_rate()).unwrap();
        let nh =
            RiskModelSpec::nhgfrp(1.0, 1.0, 0.3, p.clone(), claims.clone(), rate, false).unwrap();
        let g = RiskModelSpec::gfrp(1.0, 1.0, 0.3, p, claims, false).unwrap();
        assert_abs_diff_eq!(
            surplus_mean(&nh, 2.0).unwrap(),
            surplus_mean(&g, 2.0).unwrap(),
            epsilon = 1e-12
        );
    }
}

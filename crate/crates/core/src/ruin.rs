//! Finite-time ruin of the AGFRP `ν + η t - Σ_{j ≤ N^β(t)} Y_j`.
//!
//! Between claims the surplus rises linearly, so ruin can only happen at a
//! claim epoch. Each simulated path walks the GCP events in operational time
//! and maps them to calendar epochs with an [`EpochSampler`]; ruin before `t`
//! from capital `u` is the event `max_j (C_j - η e_j) > u` over epochs
//! `e_j <= t`, where `C_j` is the claim total after the `j`-th event. One set
//! of paths therefore serves every initial capital.

use statrs::function::gamma::gamma;

use crate::compound::ClaimDistribution;
use crate::counting::{GcpEvents, GfcpParams};
use crate::error::{Error, Result};
use crate::mc::{simulate, wilson_interval, RngStreams};
use crate::risk::{RiskModelSpec, RiskVariant};
use crate::subordinator::EpochSampler;

/// `Γ(y_0)`, the minimum of the gamma function on the positive axis, to four places.
pub const GAMMA_Y0: f64 = 0.8856;

/// A Monte Carlo ruin question.
#[derive(Debug, Clone, PartialEq)]
pub struct RuinQuery {
    pub u: f64,
    pub t: f64,
    pub model: RiskModelSpec,
    pub n_paths: usize,
    pub step: f64,
    pub confidence: f64,
}

impl RuinQuery {
    pub fn new(
        u: f64,
        t: f64,
        model: RiskModelSpec,
        n_paths: usize,
        step: f64,
        confidence: f64,
    ) -> Result<Self> {
        let query = Self {
            u,
            t,
            model,
            n_paths,
            step,
            confidence,
        };
        query.validate()?;
        Ok(query)
    }

    fn validate(&self) -> Result<()> {
        if self.model.variant() != RiskVariant::Agfrp {
            return Err(Error::domain("ruin probability is defined for the AGFRP"));
        }
        if !(self.u >= 0.0 && self.u.is_finite()) {
            return Err(Error::domain(format!(
                "initial capital must be non-negative, got {}",
                self.u
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::domain(format!(
                "horizon must be positive, got {}",
                self.t
            )));
        }
        if self.n_paths < 100 {
            return Err(Error::domain(format!(
                "need at least 100 paths, got {}",
                self.n_paths
            )));
        }
        if !(self.step > 0.0 && self.step <= self.t / 10.0) {
            return Err(Error::domain(format!(
                "lattice step must lie in (0, t/10], got {}",
                self.step
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::domain(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// Estimated `Ψ(u, t)` with a Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinEstimate {
    pub u: f64,
    pub t: f64,
    pub psi_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub ruined: u64,
    pub n_paths: u64,
}

/// Largest `C_j - η e_j` over claim epochs `e_j <= t` of one path (0 if none).
fn worst_deficit(model: &RiskModelSpec, t: f64, step: f64, rng: &mut crate::mc::PathRng) -> f64 {
    let mut clock = EpochSampler::new(model.gfcp().stable(), step);
    let mut events = GcpEvents::new(model.gfcp(), rng);
    let mut worst = f64::NEG_INFINITY;
    let mut paid = 0.0;
    while let Some(e) = events.next() {
        let epoch = clock.epoch(e.time, events.rng());
        if epoch > t {
            break;
        }
        for _ in 0..e.jump {
            paid += model.claims().sample(events.rng());
        }
        worst = worst.max(paid - model.eta() * epoch);
    }
    worst
}

/// `Ψ(u, t)` for every `u` in `capitals`, all from the same simulated paths.
pub fn ruin_curve(
    model: &RiskModelSpec,
    capitals: &[f64],
    t: f64,
    n_paths: usize,
    step: f64,
    confidence: f64,
    streams: &RngStreams,
) -> Result<Vec<RuinEstimate>> {
    for u in capitals {
        RuinQuery::new(*u, t, model.clone(), n_paths, step, confidence)?;
    }
    let deficits = simulate(streams, n_paths, |rng, _| {
        worst_deficit(model, t, step, rng)
    });
    capitals
        .iter()
        .map(|u| {
            let ruined = deficits.iter().filter(|d| **d > *u).count() as u64;
            let (ci_lo, ci_hi) = wilson_interval(ruined, n_paths as u64, confidence)?;
            Ok(RuinEstimate {
                u: *u,
                t,
                psi_hat: ruined as f64 / n_paths as f64,
                ci_lo,
                ci_hi,
                ruined,
                n_paths: n_paths as u64,
            })
        })
        .collect()
}

pub fn ruin_probability_mc(query: &RuinQuery, streams: &RngStreams) -> Result<RuinEstimate> {
    query.validate()?;
    let mut curve = ruin_curve(
        &query.model,
        &[query.u],
        query.t,
        query.n_paths,
        query.step,
        query.confidence,
        streams,
    )?;
    Ok(curve.remove(0))
}

/// Inputs of the light-tailed bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Xi0Inputs {
    pub t: f64,
    pub gfcp: GfcpParams,
    pub claims: ClaimDistribution,
    pub gamma_y0: f64,
}

impl Xi0Inputs {
    pub fn new(t: f64, gfcp: GfcpParams, claims: ClaimDistribution) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("horizon must be positive, got {t}")));
        }
        if !claims.has_mgf() {
            return Err(Error::capability(format!(
                "{} claims are not light tailed",
                claims.name()
            )));
        }
        Ok(Self {
            t,
            gfcp,
            claims,
            gamma_y0: GAMMA_Y0,
        })
    }

    /// `1 + (2Γ(y_0) - 1) / (2 t^β Γ(y_0))`.
    pub fn target(&self) -> f64 {
        let g = self.gamma_y0;
        1.0 + (2.0 * g - 1.0) / (2.0 * self.t.powf(self.gfcp.beta()) * g)
    }

    /// `Σ_i λ_i H(ξ)^i`.
    pub fn mgf_sum(&self, xi: f64) -> Result<f64> {
        let h = self.claims.mgf(xi)?;
        Ok(self
            .gfcp
            .rates()
            .iter()
            .enumerate()
            .map(|(i, l)| l * h.powi(i as i32 + 1))
            .sum())
    }
}

/// The positive root of `Σ_i λ_i H(ξ)^i = target`, by bracketing and bisection.
pub fn solve_xi0(inputs: &Xi0Inputs) -> Result<f64> {
    let target = inputs.target();
    let at_zero = inputs.mgf_sum(0.0)?;
    if at_zero >= target {
        return Err(Error::NoRoot { at_zero, target });
    }
    let bound = inputs.claims.mgf_domain_bound();
    let mut lo = 0.0;
    let mut hi = if bound.is_finite() { bound / 2.0 } else { 1.0 };
    let mut bracketed = false;
    for _ in 0..200 {
        if inputs.mgf_sum(hi)? >= target {
            bracketed = true;
            break;
        }
        lo = hi;
        hi = if bound.is_finite() {
            (hi + bound) / 2.0
        } else {
            hi * 2.0
        };
        if !hi.is_finite() || (bound.is_finite() && hi >= bound) {
            break;
        }
    }
    if !bracketed {
        return Err(Error::BeyondMgfDomain { bound });
    }
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inputs.mgf_sum(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The light-tailed bound `(1/2) Ψ(u, t) <= e^{-u ξ_0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightTailBound {
    pub xi0: f64,
    pub bound: f64,
    /// `Σ_i λ_i (H(ξ_0)^i - 1) t^β`, the Mittag-Leffler argument at the root.
    pub ml_argument: f64,
    /// Whether the argument stays below 1 as the bound's derivation assumes.
    pub argument_below_one: bool,
}

pub fn light_tail_bound(u: f64, inputs: &Xi0Inputs) -> Result<LightTailBound> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::domain(format!(
            "initial capital must be non-negative, got {u}"
        )));
    }
    let xi0 = solve_xi0(inputs)?;
    let ml_argument =
        (inputs.mgf_sum(xi0)? - inputs.gfcp.delta()) * inputs.t.powf(inputs.gfcp.beta());
    Ok(LightTailBound {
        xi0,
        bound: (-u * xi0).exp(),
        ml_argument,
        argument_below_one: ml_argument < 1.0,
    })
}

/// `(t^β / Γ(β+1)) Σ i λ_i Pr{Y > u}` for Pareto claims, `u` above the scale.
pub fn heavy_tail_asymptotic(
    u: f64,
    t: f64,
    gfcp: &GfcpParams,
    claims: &ClaimDistribution,
) -> Result<f64> {
    let ClaimDistribution::Pareto { scale, .. } = claims else {
        return Err(Error::capability(format!(
            "heavy-tailed asymptotic needs Pareto claims, got {}",
            claims.name()
        )));
    };
    if !(u > *scale && u.is_finite()) {
        return Err(Error::domain(format!(
            "capital {u} must exceed the Pareto scale {scale}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("horizon must be positive, got {t}")));
    }
    let beta = gfcp.beta();
    Ok(t.powf(beta) / gamma(beta + 1.0) * gfcp.jump_rate() * claims.survival(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn agfrp(beta: f64, eta: f64, claims: ClaimDistribution) -> RiskModelSpec {
        RiskModelSpec::agfrp(0.0, eta, GfcpParams::new(beta, vec![1.0]).unwrap(), claims).unwrap()
    }

    #[test]
    fn query_validation() {
        let m = agfrp(0.8, 1.0, ClaimDistribution::exponential(1.0).unwrap());
        assert!(RuinQuery::new(1.0, 1.0, m.clone(), 99, 0.01, 0.95).is_err());
        assert!(RuinQuery::new(1.0, 1.0, m.clone(), 100, 0.2, 0.95).is_err());
        assert!(RuinQuery::new(1.0, 1.0, m, 100, 0.1, 0.95).is_ok());
    }

    #[test]
    fn xi0_matches_exponential_closed_form() {
        let theta = 2.0;
        let inputs = Xi0Inputs::new(
            2.0,
            GfcpParams::new(0.8, vec![0.5]).unwrap(),
            ClaimDistribution::exponential(theta).unwrap(),
        )
        .unwrap();
        let c = inputs.target() - 1.0;
        let expected = theta * (1.0 - 0.5 / (1.0 + c));
        let xi0 = solve_xi0(&inputs).unwrap();
        assert_abs_diff_eq!(xi0, expected, epsilon = 1e-12);
        assert!((inputs.mgf_sum(xi0).unwrap() - inputs.target()).abs() < 1e-9);
    }

    #[test]
    fn xi0_errors() {
        let heavy_rate = Xi0Inputs::new(
            1.0,
            GfcpParams::new(0.8, vec![3.0]).unwrap(),
            ClaimDistribution::exponential(1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(solve_xi0(&heavy_rate), Err(Error::NoRoot { .. })));
        assert!(Xi0Inputs::new(
            1.0,
            GfcpParams::new(0.8, vec![0.5]).unwrap(),
            ClaimDistribution::pareto(2.0, 1.0).unwrap()
        )
        .is_err());
    }

    #[test]
    fn bounded_claims_have_a_root() {
        let inputs = Xi0Inputs::new(
            1.5,
            GfcpParams::new(0.7, vec![0.3, 0.2]).unwrap(),
            ClaimDistribution::discrete(vec![0.0, 0.6, 0.4]).unwrap(),
        )
        .unwrap();
        let xi0 = solve_xi0(&inputs).unwrap();
        assert!(xi0 > 0.0);
        assert!((inputs.mgf_sum(xi0).unwrap() - inputs.target()).abs() < 1e-9);
    }

    #[test]
    fn light_bound_shape() {
        let inputs = Xi0Inputs::new(
            2.0,
            GfcpParams::new(0.8, vec![0.5]).unwrap(),
            ClaimDistribution::exponential(2.0).unwrap(),
        )
        .unwrap();
        assert_eq!(light_tail_bound(0.0, &inputs).unwrap().bound, 1.0);
        let b1 = light_tail_bound(1.0, &inputs).unwrap().bound;
        let b2 = light_tail_bound(2.0, &inputs).unwrap().bound;
        assert!(b2 < b1);
    }

    #[test]
    fn heavy_tail_plug_in() {
        let p = GfcpParams::new(1.0, vec![1.0]).unwrap();
        let claims = ClaimDistribution::pareto(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            heavy_tail_asymptotic(10.0, 1.0, &p, &claims).unwrap(),
            0.01,
            epsilon = 1e-15
        );
        let ratio = heavy_tail_asymptotic(10.0, 1.0, &p, &claims).unwrap()
            / heavy_tail_asymptotic(20.0, 1.0, &p, &claims).unwrap();
        assert_abs_diff_eq!(ratio, 4.0, epsilon = 1e-12);
        assert!(heavy_tail_asymptotic(0.5, 1.0, &p, &claims).is_err());
        let e = ClaimDistribution::exponential(1.0).unwrap();
        assert!(matches!(
            heavy_tail_asymptotic(10.0, 1.0, &p, &e),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn huge_premium_prevents_ruin() {
        let m = agfrp(0.8, 1e6, ClaimDistribution::exponential(1.0).unwrap());
        let q = RuinQuery::new(1.0, 1.0, m, 2000, 0.01, 0.95).unwrap();
        let est = ruin_probability_mc(&q, &RngStreams::new(3)).unwrap();
        assert!(est.ci_hi < 0.01);
    }

    #[test]
    fn zero_capital_is_ruined_sometimes() {
        let m = agfrp(0.8, 1.0, ClaimDistribution::exponential(1.0).unwrap());
        let q = RuinQuery::new(0.0, 1.0, m, 2000, 0.01, 0.95).unwrap();
        assert!(
            ruin_probability_mc(&q, &RngStreams::new(3))
                .unwrap()
                .psi_hat
                > 0.0
        );
    }
}

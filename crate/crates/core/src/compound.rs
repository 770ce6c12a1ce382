//! Claim-size laws and the compound GFCP `C^β(t) = Σ_{j ≤ N^β(t)} X_j`.
//!
//! For integer claims the pmf is `q_n(t) = Σ_{i=1}^{n} r_n(i) p_i(t)` with
//! `r_n(i) = Pr{X_1 + ... + X_i = n}`, and `q_0 = p_0` when claims are at
//! least one.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::counting::{
    gfcp_pmf_table, gfcp_sample_marginal, DeCheck, DeResidualReport, GfcpParams,
};
use crate::error::{Error, Result};
use crate::specfun::{mlf, SeriesControl};

/// A claim pmf on `0, 1, ..., len-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf {
    probs: Vec<f64>,
}

impl DiscretePmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("claim pmf must not be empty"));
        }
        if let Some((j, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= 0.0 && p.is_finite()))
        {
            return Err(Error::domain(format!(
                "claim pmf entry {j} must be non-negative, got {p}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "claim pmf must sum to 1, sums to {total}"
            )));
        }
        Ok(Self { probs })
    }

    /// Pmf from `(value, probability)` pairs.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let len = pairs.iter().map(|(v, _)| v + 1).max().unwrap_or(0);
        let mut probs = vec![0.0; len];
        for (v, p) in pairs {
            probs[*v] += p;
        }
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest value with positive mass.
    pub fn max_value(&self) -> usize {
        self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }

    pub fn is_positive(&self) -> bool {
        self.probs[0] == 0.0
    }
}

/// Claim-size law.
#[derive(Debug, Clone, PartialEq)]
pub enum ClaimDistribution {
    Discrete(DiscretePmf),
    Exponential { rate: f64 },
    Pareto { shape: f64, scale: f64 },
    Deterministic { value: f64 },
}

impl ClaimDistribution {
    pub fn discrete(probs: Vec<f64>) -> Result<Self> {
        Ok(Self::Discrete(DiscretePmf::new(probs)?))
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("exponential rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        positive("Pareto shape", shape)?;
        positive("Pareto scale", scale)?;
        Ok(Self::Pareto { shape, scale })
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        positive("deterministic claim value", value)?;
        Ok(Self::Deterministic { value })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Discrete(_) => "discrete",
            Self::Exponential { .. } => "exponential",
            Self::Pareto { .. } => "pareto",
            Self::Deterministic { .. } => "deterministic",
        }
    }

    /// `E[X]`; infinite for Pareto with shape at most 1.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Discrete(d) => d.probs.iter().enumerate().map(|(j, p)| j as f64 * p).sum(),
            Self::Exponential { rate } => 1.0 / rate,
            Self::Pareto { shape, scale } => {
                if *shape > 1.0 {
                    shape * scale / (shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::Deterministic { value } => *value,
        }
    }

    /// `E[X²]`; infinite for Pareto with shape at most 2.
    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Discrete(d) => d
                .probs
                .iter()
                .enumerate()
                .map(|(j, p)| (j * j) as f64 * p)
                .sum(),
            Self::Exponential { rate } => 2.0 / (rate * rate),
            Self::Pareto { shape, scale } => {
                if *shape > 2.0 {
                    shape * scale * scale / (shape - 2.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::Deterministic { value } => value * value,
        }
    }

    pub fn variance(&self) -> f64 {
        self.second_moment() - self.mean().powi(2)
    }

    pub(crate) fn finite_mean(&self) -> Result<f64> {
        let m = self.mean();
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::capability(format!(
                "{} claims have no finite mean",
                self.name()
            )))
        }
    }

    pub(crate) fn finite_second_moment(&self) -> Result<f64> {
        let m = self.second_moment();
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::capability(format!(
                "{} claims have no finite second moment",
                self.name()
            )))
        }
    }

    pub fn has_mgf(&self) -> bool {
        !matches!(self, Self::Pareto { .. })
    }

    /// Supremum of the arguments at which the mgf is finite.
    pub fn mgf_domain_bound(&self) -> f64 {
        match self {
            Self::Exponential { rate } => *rate,
            Self::Pareto { .. } => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// `H(ξ) = E[e^{ξ X}]`.
    pub fn mgf(&self, xi: f64) -> Result<f64> {
        if !self.has_mgf() {
            return Err(Error::capability(format!(
                "{} claims have no mgf",
                self.name()
            )));
        }
        if xi >= self.mgf_domain_bound() {
            return Err(Error::domain(format!(
                "mgf argument {xi} must lie below {}",
                self.mgf_domain_bound()
            )));
        }
        Ok(match self {
            Self::Discrete(d) => d
                .probs
                .iter()
                .enumerate()
                .map(|(j, p)| p * (xi * j as f64).exp())
                .sum(),
            Self::Exponential { rate } => rate / (rate - xi),
            Self::Deterministic { value } => (xi * value).exp(),
            Self::Pareto { .. } => unreachable!(),
        })
    }

    /// `Pr{X > x}`.
    pub fn survival(&self, x: f64) -> f64 {
        match self {
            Self::Discrete(d) => d
                .probs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j as f64 > x)
                .map(|(_, p)| p)
                .sum(),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Self::Pareto { shape, scale } => {
                if x <= *scale {
                    1.0
                } else {
                    (scale / x).powf(*shape)
                }
            }
            Self::Deterministic { value } => {
                if x < *value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Discrete(d) => {
                let mut u: f64 = rng.random();
                for (j, p) in d.probs.iter().enumerate() {
                    if u < *p {
                        return j as f64;
                    }
                    u -= p;
                }
                d.max_value() as f64
            }
            Self::Exponential { rate } => Exp::new(*rate).expect("positive rate").sample(rng),
            Self::Pareto { shape, scale } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                scale * u.powf(-1.0 / shape)
            }
            Self::Deterministic { value } => *value,
        }
    }

    /// The same family rescaled to mean `eta`. Discrete laws cannot be
    /// rescaled and are accepted only when their mean already equals `eta`.
    pub fn with_mean(&self, eta: f64) -> Result<Self> {
        positive("target claim mean", eta)?;
        match self {
            Self::Exponential { .. } => Self::exponential(1.0 / eta),
            Self::Deterministic { .. } => Self::deterministic(eta),
            Self::Pareto { shape, .. } => {
                if *shape <= 1.0 {
                    return Err(Error::capability(
                        "Pareto claims with shape <= 1 have no finite mean",
                    ));
                }
                Self::pareto(*shape, eta * (shape - 1.0) / shape)
            }
            Self::Discrete(_) => {
                if (self.mean() - eta).abs() <= 1e-12 * eta.max(1.0) {
                    Ok(self.clone())
                } else {
                    Err(Error::capability(format!(
                        "discrete claims with mean {} cannot be rescaled to mean {eta}",
                        self.mean()
                    )))
                }
            }
        }
    }

    fn as_discrete(&self) -> Result<DiscretePmf> {
        match self {
            Self::Discrete(d) => Ok(d.clone()),
            Self::Deterministic { value } if value.fract() == 0.0 => {
                let v = *value as usize;
                let mut probs = vec![0.0; v + 1];
                probs[v] = 1.0;
                Ok(DiscretePmf { probs })
            }
            _ => Err(Error::capability(format!(
                "{} claims are not integer valued",
                self.name()
            ))),
        }
    }

    fn as_positive_discrete(&self) -> Result<DiscretePmf> {
        let d = self.as_discrete()?;
        if !d.is_positive() {
            return Err(Error::capability(
                "claim pmf puts mass on 0; positive integer claims are required",
            ));
        }
        Ok(d)
    }
}

fn positive(what: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be positive, got {x}")))
    }
}

/// `r_n(i) = Pr{X_1 + ... + X_i = n}` for `n <= n_max`, `i <= i_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionTable {
    /// `columns[i][n] = r_n(i)`.
    columns: Vec<Vec<f64>>,
}

impl ConvolutionTable {
    pub fn get(&self, n: usize, i: usize) -> f64 {
        self.columns[i][n]
    }

    pub fn n_max(&self) -> usize {
        self.columns[0].len() - 1
    }

    pub fn i_max(&self) -> usize {
        self.columns.len() - 1
    }

    /// `Σ_{n <= n_max} r_n(i)`.
    pub fn column_sum(&self, i: usize) -> f64 {
        self.columns[i].iter().sum()
    }
}

/// Iterated discrete convolution of an integer claim pmf.
pub fn claim_convolutions(
    dist: &ClaimDistribution,
    n_max: usize,
    i_max: usize,
) -> Result<ConvolutionTable> {
    let d = dist.as_discrete()?;
    let base: Vec<f64> = (0..=n_max)
        .map(|n| d.probs.get(n).copied().unwrap_or(0.0))
        .collect();
    let mut columns = Vec::with_capacity(i_max + 1);
    let mut identity = vec![0.0; n_max + 1];
    identity[0] = 1.0;
    columns.push(identity);
    for i in 1..=i_max {
        let prev: &Vec<f64> = &columns[i - 1];
        let next: Vec<f64> = (0..=n_max)
            .map(|n| (0..=n).map(|l| base[l] * prev[n - l]).sum())
            .collect();
        columns.push(next);
    }
    Ok(ConvolutionTable { columns })
}

/// `[q_0(t), ..., q_{n_max}(t)]` with the probability mass beyond `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundPmfTable {
    pub t: f64,
    pub values: Vec<f64>,
    pub tail_mass: f64,
}

/// Compound pmf table for positive integer claims.
pub fn cgfcp_pmf_table(
    n_max: usize,
    t: f64,
    params: &GfcpParams,
    dist: &ClaimDistribution,
    ctl: &SeriesControl,
) -> Result<CompoundPmfTable> {
    dist.as_positive_discrete()?;
    let conv = claim_convolutions(dist, n_max, n_max)?;
    let p = gfcp_pmf_table(n_max, t, params, ctl)?;
    Ok(compound_from(t, &p, &conv))
}

fn compound_from(t: f64, p: &[f64], conv: &ConvolutionTable) -> CompoundPmfTable {
    let n_max = p.len() - 1;
    let values: Vec<f64> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                p[0]
            } else {
                (1..=n).map(|i| conv.get(n, i) * p[i]).sum()
            }
        })
        .collect();
    let tail_mass = (1.0 - values.iter().sum::<f64>()).max(0.0);
    CompoundPmfTable {
        t,
        values,
        tail_mass,
    }
}

/// `Pr{C^β(t) = n}` for positive integer claims.
pub fn cgfcp_pmf(
    n: usize,
    t: f64,
    params: &GfcpParams,
    dist: &ClaimDistribution,
    ctl: &SeriesControl,
) -> Result<f64> {
    Ok(cgfcp_pmf_table(n, t, params, dist, ctl)?.values[n])
}

/// One draw of `C^β(t)`.
pub fn cgfcp_sample<R: Rng + ?Sized>(
    t: f64,
    params: &GfcpParams,
    dist: &ClaimDistribution,
    rng: &mut R,
) -> f64 {
    let n = gfcp_sample_marginal(params, t, rng);
    (0..n).map(|_| dist.sample(rng)).sum()
}

/// `E[C^β(t)] = S t^β E[X]`.
pub fn cgfcp_mean(t: f64, params: &GfcpParams, dist: &ClaimDistribution) -> Result<f64> {
    Ok(params.s_const() * t.powf(params.beta()) * dist.finite_mean()?)
}

/// `Var[C^β(t)] = S t^β E[X²] + (R t^{2β} + (T-S) t^β) E[X]²`.
pub fn cgfcp_var(t: f64, params: &GfcpParams, dist: &ClaimDistribution) -> Result<f64> {
    let m1 = dist.finite_mean()?;
    let m2 = dist.finite_second_moment()?;
    let tb = t.powf(params.beta());
    Ok(params.s_const() * tb * m2
        + (params.r_const() * tb * tb + (params.t_const() - params.s_const()) * tb) * m1 * m1)
}

/// `E[u^{C^β(t)}] = E_{β,1}(t^β Σ_i λ_i Σ_j r_j(i) (u^j - 1))` for integer claims.
pub fn cgfcp_pgf(
    u: f64,
    t: f64,
    params: &GfcpParams,
    dist: &ClaimDistribution,
    ctl: &SeriesControl,
) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::domain(format!(
            "pgf argument must lie in [-1, 1], got {u}"
        )));
    }
    let d = dist.as_discrete()?;
    let k = params.k();
    let conv = claim_convolutions(dist, k * d.max_value(), k)?;
    let inner: f64 = params
        .rates()
        .iter()
        .enumerate()
        .map(|(idx, l)| {
            let i = idx + 1;
            l * (0..=conv.n_max())
                .map(|j| conv.get(j, i) * (u.powi(j as i32) - 1.0))
                .sum::<f64>()
        })
        .sum();
    mlf(params.beta(), inner * t.powf(params.beta()), ctl)
}

/// `E[e^{ξ C^β(t)}] = E_{β,1}(Σ_i λ_i (H(ξ)^i - 1) t^β)`.
pub fn cgfcp_mgf(
    xi: f64,
    t: f64,
    params: &GfcpParams,
    dist: &ClaimDistribution,
    ctl: &SeriesControl,
) -> Result<f64> {
    let h = dist.mgf(xi)?;
    let arg: f64 = params
        .rates()
        .iter()
        .enumerate()
        .map(|(i, l)| l * (h.powi(i as i32 + 1) - 1.0))
        .sum::<f64>()
        * t.powf(params.beta());
    mlf(params.beta(), arg, ctl)
}

/// Checks `D^β q_n = -Δ q_n + Σ_{j=1}^{k} λ_j Σ_{l=j}^{n} r_l(j) q_{n-l}` on a
/// uniform grid, for positive integer claims.
pub fn verify_cgfcp_de(
    params: &GfcpParams,
    dist: &ClaimDistribution,
    check: &DeCheck,
    ctl: &SeriesControl,
) -> Result<DeResidualReport> {
    dist.as_positive_discrete()?;
    let n_max = check.n_max;
    let conv = claim_convolutions(dist, n_max, n_max.max(params.k()))?;
    let grid = check.grid();
    let tables = grid
        .iter()
        .map(|t| {
            gfcp_pmf_table(n_max, *t, params, ctl).map(|p| compound_from(*t, &p, &conv).values)
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Vec<f64>> = (0..=n_max)
        .map(|n| tables.iter().map(|row| row[n]).collect())
        .collect();
    let delta = params.delta();
    DeResidualReport::from_rows(check, params.beta(), &grid, &values, |n, i| {
        let row = &tables[i];
        let inflow: f64 = params
            .rates()
            .iter()
            .enumerate()
            .map(|(idx, l)| {
                let j = idx + 1;
                l * (j..=n).map(|m| conv.get(m, j) * row[n - m]).sum::<f64>()
            })
            .sum();
        -delta * row[n] + inflow
    })
}

//! Reproducible random streams and the small set of statistics used to compare
//! simulations against closed forms.
//!
//! Every simulated path draws from its own ChaCha stream, selected by
//! `(master seed, path index)`. Results are collected in path order, so
//! reductions are identical whatever the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Random stream handle used by every sampler.
pub type PathRng = ChaCha8Rng;

/// Factory of independent per-path random streams derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStreams {
    seed: u64,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The random stream for path `index`.
    pub fn stream(&self, index: u64) -> PathRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// A new family of streams, independent of this one, labelled by `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        Self::new(splitmix64(
            self.seed ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d)),
        ))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Runs `f` once per path index on its own stream and returns the results in
/// path order.
pub fn simulate<T, F>(streams: &RngStreams, n_paths: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut PathRng, u64) -> T + Sync,
{
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.stream(i);
            f(&mut rng, i)
        })
        .collect()
}

/// Sample mean, unbiased variance and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            n,
            mean,
            variance,
            std_error: (variance / n as f64).sqrt(),
        }
    }

    /// Number of standard errors separating the sample mean from `expected`.
    pub fn z_score(&self, expected: f64) -> f64 {
        (self.mean - expected) / self.std_error
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn z_score(&self, expected: f64) -> f64 {
        (self.value - expected) / self.std_error
    }
}

/// Sample variance with a delta-method standard error
/// `sqrt((m4 - s^4) / n)`.
pub fn variance_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Estimate {
        value: m2 * n / (n - 1.0),
        std_error: ((m4 - m2 * m2).max(0.0) / n).sqrt(),
    }
}

/// Sample covariance with the standard error of the mean of centred products.
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Estimate {
    assert_eq!(xs.len(), ys.len(), "covariance needs paired samples");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let prods: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let s = Summary::of(&prods);
    Estimate {
        value: s.mean * n / (n - 1.0),
        std_error: s.std_error,
    }
}

/// Two-sided standard normal quantile for a confidence level, e.g. 0.99 → 2.5758.
pub fn normal_quantile_two_sided(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + confidence / 2.0))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, n: u64, confidence: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::domain("binomial interval needs at least one trial"));
    }
    let z = normal_quantile_two_sided(confidence)?;
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub critical_value: f64,
    pub reject: bool,
}

/// Two-sample Kolmogorov–Smirnov test at the 1% level (asymptotic critical
/// value `1.628 sqrt((n+m)/(nm))`; conservative for discrete data).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    let critical_value = 1.628 * ((nf + mf) / (nf * mf)).sqrt();
    KsTest {
        statistic: d,
        critical_value,
        reject: d > critical_value,
    }
}

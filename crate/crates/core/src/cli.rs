//! Command-line front end: a flat `key = value` configuration with `[section]`
//! headers, dispatched to one of the analytic or simulation commands.
//!
//! Every run writes `<prefix>.csv`, whose first line is
//! `# manifest_hash=<sha256>`, and `<prefix>.manifest.json`. The hash covers
//! the command, the effective seed and every configuration entry except the
//! output prefix, so equal hashes mean equal CSV bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::compound::{cgfcp_mean, cgfcp_pmf_table, cgfcp_var, verify_cgfcp_de, ClaimDistribution};
use crate::counting::{gfcp_mean, gfcp_pmf_table, gfcp_var, verify_gfcp_de, DeCheck, GfcpParams};
use crate::error::Error;
use crate::mc::{simulate, RngStreams};
use crate::risk::{
    estimate_dependence_exponent, gfnrp_corr, gfrp_corr, sample_surplus_path, CumulativeRate,
    RiskModelSpec, RiskVariant,
};
use crate::ruin::{heavy_tail_asymptotic, light_tail_bound, ruin_curve, Xi0Inputs};
use crate::specfun::{mlf3, MlfArgs, SeriesControl};
use crate::subordinator::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Pmf,
    Moments,
    Simulate,
    Dependence,
    Ruin,
    #[value(name = "verify-de")]
    VerifyDe,
    Mlf,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pmf => "pmf",
            Command::Moments => "moments",
            Command::Simulate => "simulate",
            Command::Dependence => "dependence",
            Command::Ruin => "ruin",
            Command::VerifyDe => "verify-de",
            Command::Mlf => "mlf",
        }
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "model",
        &[
            "beta",
            "rates",
            "variant",
            "nu",
            "eta",
            "rho",
            "lambda_scale",
            "lambda_exponent",
            "rescale_claims",
        ],
    ),
    (
        "claims",
        &["kind", "rate", "shape", "scale", "value", "probs"],
    ),
    ("sim", &["n_paths", "horizon", "step", "seed"]),
    ("output", &["prefix"]),
    ("pmf", &["t", "n_max"]),
    ("moments", &["times"]),
    ("simulate", &["grid_step"]),
    ("dependence", &["s", "times", "epsilon"]),
    ("ruin", &["t", "capitals", "confidence"]),
    ("verify-de", &["t_max", "steps", "n_max", "window_start"]),
    ("mlf", &["alpha", "beta", "gamma", "z"]),
];

/// Failures of the command-line driver.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error(transparent)]
    Run(#[from] Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(e) => match e {
                Error::Domain(_)
                | Error::NoRoot { .. }
                | Error::BeyondMgfDomain { .. }
                | Error::Estimation(_) => 3,
                Error::NonConvergence { .. } | Error::PrecisionLoss { .. } => 4,
                Error::Capability(_) => 5,
            },
            CliError::Io { .. } => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

type Document = BTreeMap<String, BTreeMap<String, Entry>>;

fn parse_document(text: &str) -> (Document, Vec<String>) {
    let mut doc = Document::new();
    let mut errors = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                errors.push(format!("line {line_no}: malformed section header '{line}'"));
                continue;
            };
            let name = name.trim();
            if SCHEMA.iter().any(|(s, _)| *s == name) {
                section = Some(name.to_string());
            } else {
                errors.push(format!("line {line_no}: unknown section [{name}]"));
                section = None;
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!(
                "line {line_no}: expected 'key = value', got '{line}'"
            ));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section.as_deref() else {
            errors.push(format!(
                "line {line_no}: key '{key}' appears outside a known section"
            ));
            continue;
        };
        let known = SCHEMA
            .iter()
            .find(|(s, _)| *s == sec)
            .map(|(_, k)| *k)
            .unwrap_or(&[]);
        if !known.contains(&key) {
            errors.push(format!("line {line_no}: unknown key '{key}' in [{sec}]"));
            continue;
        }
        if value.is_empty() {
            errors.push(format!("line {line_no}: key '{key}' has no value"));
            continue;
        }
        let entries = doc.entry(sec.to_string()).or_default();
        if let Some(prev) = entries.get(key) {
            errors.push(format!(
                "line {line_no}: duplicate key '{key}' in [{sec}] (first defined on line {})",
                prev.line
            ));
            continue;
        }
        entries.insert(
            key.to_string(),
            Entry {
                value: value.trim_matches('"').to_string(),
                line: line_no,
            },
        );
    }
    (doc, errors)
}

/// Typed field access that records every failure instead of stopping at the first.
struct Fields<'a> {
    doc: &'a Document,
    errors: Vec<String>,
}

impl<'a> Fields<'a> {
    fn raw(&self, sec: &str, key: &str) -> Option<&'a Entry> {
        self.doc.get(sec).and_then(|m| m.get(key))
    }

    fn has(&self, sec: &str, key: &str) -> bool {
        self.raw(sec, key).is_some()
    }

    fn has_section(&self, sec: &str) -> bool {
        self.doc.contains_key(sec)
    }

    fn missing(&mut self, sec: &str, key: &str) {
        self.errors.push(format!("[{sec}] {key} is required"));
    }

    fn parsed<T>(
        &mut self,
        sec: &str,
        key: &str,
        what: &str,
        f: impl Fn(&str) -> Option<T>,
    ) -> Option<T> {
        let entry = self.raw(sec, key)?;
        let out = f(&entry.value);
        if out.is_none() {
            self.errors.push(format!(
                "[{sec}] {key} (line {}): expected {what}, got '{}'",
                entry.line, entry.value
            ));
        }
        out
    }

    fn opt_f64(&mut self, sec: &str, key: &str) -> Option<f64> {
        self.parsed(sec, key, "a number", |v| {
            v.parse::<f64>().ok().filter(|x| x.is_finite())
        })
    }

    fn f64(&mut self, sec: &str, key: &str) -> Option<f64> {
        if !self.has(sec, key) {
            self.missing(sec, key);
            return None;
        }
        self.opt_f64(sec, key)
    }

    fn f64_or(&mut self, sec: &str, key: &str, default: f64) -> Option<f64> {
        if self.has(sec, key) {
            self.opt_f64(sec, key)
        } else {
            Some(default)
        }
    }

    fn usize(&mut self, sec: &str, key: &str) -> Option<usize> {
        if !self.has(sec, key) {
            self.missing(sec, key);
            return None;
        }
        self.parsed(sec, key, "a non-negative integer", |v| v.parse().ok())
    }

    fn u64_opt(&mut self, sec: &str, key: &str) -> Option<u64> {
        self.parsed(sec, key, "a non-negative integer", |v| v.parse().ok())
    }

    fn bool_or(&mut self, sec: &str, key: &str, default: bool) -> Option<bool> {
        if self.has(sec, key) {
            self.parsed(sec, key, "true or false", |v| v.parse().ok())
        } else {
            Some(default)
        }
    }

    fn list(&mut self, sec: &str, key: &str) -> Option<Vec<f64>> {
        if !self.has(sec, key) {
            self.missing(sec, key);
            return None;
        }
        self.parsed(sec, key, "a list of numbers like [1.0, 2.0]", parse_list)
    }

    fn string(&mut self, sec: &str, key: &str) -> Option<String> {
        match self.raw(sec, key) {
            Some(e) => Some(e.value.clone()),
            None => {
                self.missing(sec, key);
                None
            }
        }
    }

    fn check(&mut self, sec: &str, ok: bool, msg: impl fmt::Display) {
        if !ok {
            self.errors.push(format!("[{sec}] {msg}"));
        }
    }

    fn lift<T>(&mut self, sec: &str, r: crate::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                let msg = match e {
                    Error::Domain(m) | Error::Capability(m) => m,
                    other => other.to_string(),
                };
                self.errors.push(format!("[{sec}] {msg}"));
                None
            }
        }
    }
}

fn parse_list(v: &str) -> Option<Vec<f64>> {
    let inner = v.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return None;
    }
    inner
        .split(',')
        .map(|x| x.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect()
}

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
}

/// A validated command with everything it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Pmf {
        gfcp: GfcpParams,
        claims: Option<ClaimDistribution>,
        t: f64,
        n_max: usize,
    },
    Moments {
        gfcp: GfcpParams,
        claims: ClaimDistribution,
        times: Vec<f64>,
    },
    Simulate {
        spec: RiskModelSpec,
        sim: SimConfig,
        grid_step: f64,
    },
    Dependence {
        spec: RiskModelSpec,
        s: f64,
        times: Vec<f64>,
        epsilon: f64,
    },
    Ruin {
        spec: RiskModelSpec,
        sim: SimConfig,
        t: f64,
        capitals: Vec<f64>,
        confidence: f64,
    },
    VerifyDe {
        gfcp: GfcpParams,
        claims: Option<ClaimDistribution>,
        t_max: f64,
        steps: Vec<f64>,
        n_max: usize,
        window_start: Option<f64>,
    },
    Mlf {
        alpha: f64,
        beta: f64,
        gamma: f64,
        z: Vec<f64>,
    },
}

/// A parsed and validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub job: Job,
    pub seed: u64,
    pub prefix: String,
    canonical: Vec<String>,
}

impl RunConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        match &mut self.job {
            Job::Simulate { sim, .. } | Job::Ruin { sim, .. } => sim.seed = seed,
            _ => {}
        }
        self
    }

    pub fn with_prefix(mut self, prefix: impl Into<String>) -> Self {
        self.prefix = prefix.into();
        self
    }

    /// SHA-256 of the sorted configuration entries, command and effective seed.
    pub fn manifest_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("command={}\n", self.command.name()));
        for line in &self.canonical {
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
        }
        hasher.update(format!("seed={}\n", self.seed));
        hex::encode(hasher.finalize())
    }
}

/// Parses and validates a configuration for `command`, reporting every problem found.
pub fn parse_config(command: Command, text: &str) -> Result<RunConfig, CliError> {
    let (doc, errors) = parse_document(text);
    let mut f = Fields { doc: &doc, errors };
    let seed = f.u64_opt("sim", "seed").unwrap_or(0);
    let prefix = f
        .raw("output", "prefix")
        .map(|e| e.value.clone())
        .unwrap_or_else(|| format!("fracrisk-{}", command.name()));
    let job = match command {
        Command::Pmf => parse_pmf(&mut f),
        Command::Moments => parse_moments(&mut f),
        Command::Simulate => parse_simulate(&mut f, seed),
        Command::Dependence => parse_dependence(&mut f),
        Command::Ruin => parse_ruin(&mut f, seed),
        Command::VerifyDe => parse_verify(&mut f),
        Command::Mlf => parse_mlf(&mut f),
    };
    match job {
        Some(job) if f.errors.is_empty() => {
            let canonical = doc
                .iter()
                .flat_map(|(sec, m)| m.iter().map(move |(k, e)| (sec, k, e)))
                .filter(|(sec, k, _)| !(*sec == "output" || (*sec == "sim" && *k == "seed")))
                .map(|(sec, k, e)| format!("{sec}.{k}={}", e.value))
                .collect();
            Ok(RunConfig {
                command,
                job,
                seed,
                prefix,
                canonical,
            })
        }
        _ => {
            if f.errors.is_empty() {
                f.errors.push("configuration is incomplete".into());
            }
            Err(CliError::Config(f.errors))
        }
    }
}

fn parse_gfcp(f: &mut Fields) -> Option<GfcpParams> {
    let beta = f.f64("model", "beta");
    let rates = f.list("model", "rates");
    // Validate beta and the rates separately so both problems are reported.
    let beta = beta.and_then(|b| f.lift("model", GfcpParams::new(b, vec![1.0])).map(|_| b));
    let rates = rates.and_then(|r| {
        f.lift("model", GfcpParams::new(1.0, r))
            .map(|p| p.rates().to_vec())
    });
    f.lift("model", GfcpParams::new(beta?, rates?))
}

fn parse_claims(f: &mut Fields) -> Option<ClaimDistribution> {
    let kind = f.string("claims", "kind")?;
    let result = match kind.as_str() {
        "exponential" => ClaimDistribution::exponential(f.f64("claims", "rate")?),
        "pareto" => {
            let shape = f.f64("claims", "shape");
            let scale = f.f64("claims", "scale");
            ClaimDistribution::pareto(shape?, scale?)
        }
        "deterministic" => ClaimDistribution::deterministic(f.f64("claims", "value")?),
        "discrete" => ClaimDistribution::discrete(f.list("claims", "probs")?),
        other => {
            f.errors.push(format!(
                "[claims] kind must be one of exponential, pareto, deterministic, discrete; got '{other}'"
            ));
            return None;
        }
    };
    f.lift("claims", result)
}

fn parse_optional_claims(f: &mut Fields) -> Option<Option<ClaimDistribution>> {
    if f.has_section("claims") {
        parse_claims(f).map(Some)
    } else {
        Some(None)
    }
}

fn parse_sim(f: &mut Fields, seed: u64) -> Option<SimConfig> {
    let n_paths = f.usize("sim", "n_paths");
    let horizon = f.f64("sim", "horizon");
    let step = f.f64("sim", "step");
    let (n_paths, horizon, step) = (n_paths?, horizon?, step?);
    f.check("sim", n_paths >= 1, "n_paths must be at least 1");
    f.check("sim", horizon > 0.0, "horizon must be positive");
    f.check(
        "sim",
        step > 0.0 && step <= horizon,
        "step must lie in (0, horizon]",
    );
    Some(SimConfig {
        n_paths,
        horizon,
        step,
        seed,
    })
}

fn parse_risk(f: &mut Fields) -> Option<RiskModelSpec> {
    let gfcp = parse_gfcp(f);
    let claims = parse_claims(f);
    let variant = match f
        .raw("model", "variant")
        .map(|e| e.value.as_str())
        .unwrap_or("gfrp")
    {
        "gfrp" => Some(RiskVariant::Gfrp),
        "nhgfrp" => Some(RiskVariant::NhGfrp),
        "agfrp" => Some(RiskVariant::Agfrp),
        other => {
            f.errors.push(format!(
                "[model] variant must be gfrp, nhgfrp or agfrp; got '{other}'"
            ));
            None
        }
    };
    let nu = f.f64_or("model", "nu", 0.0);
    let eta = f.f64("model", "eta");
    let rho = f.f64_or("model", "rho", 0.0);
    let rescale = f.bool_or("model", "rescale_claims", false);
    let rate = if variant == Some(RiskVariant::NhGfrp) {
        let a = f.f64("model", "lambda_scale");
        let g = f.f64_or("model", "lambda_exponent", 1.0);
        let (a, g) = (a?, g?);
        f.lift("model", CumulativeRate::new(a, g))
    } else {
        None
    };
    let (gfcp, claims, variant, nu, eta, rho, rescale) =
        (gfcp?, claims?, variant?, nu?, eta?, rho?, rescale?);
    let spec = match variant {
        RiskVariant::Gfrp => RiskModelSpec::gfrp(nu, eta, rho, gfcp, claims, rescale),
        RiskVariant::NhGfrp => RiskModelSpec::nhgfrp(nu, eta, rho, gfcp, claims, rate?, rescale),
        RiskVariant::Agfrp => RiskModelSpec::agfrp(nu, eta, gfcp, claims),
    };
    f.lift("model", spec)
}

fn positive_list(f: &mut Fields, sec: &str, key: &str, xs: &[f64]) {
    f.check(
        sec,
        xs.iter().all(|x| *x > 0.0),
        format!("{key} must all be positive"),
    );
}

fn parse_pmf(f: &mut Fields) -> Option<Job> {
    let gfcp = parse_gfcp(f);
    let claims = parse_optional_claims(f);
    let t = f.f64("pmf", "t");
    let n_max = f.usize("pmf", "n_max");
    let t = t?;
    f.check("pmf", t >= 0.0, "t must be non-negative");
    Some(Job::Pmf {
        gfcp: gfcp?,
        claims: claims?,
        t,
        n_max: n_max?,
    })
}

fn parse_moments(f: &mut Fields) -> Option<Job> {
    let gfcp = parse_gfcp(f);
    let claims = parse_claims(f);
    let times = f.list("moments", "times")?;
    f.check(
        "moments",
        times.iter().all(|t| *t >= 0.0),
        "times must be non-negative",
    );
    Some(Job::Moments {
        gfcp: gfcp?,
        claims: claims?,
        times,
    })
}

fn parse_simulate(f: &mut Fields, seed: u64) -> Option<Job> {
    let spec = parse_risk(f);
    let sim = parse_sim(f, seed);
    let grid_step = f.f64("simulate", "grid_step");
    let (sim, grid_step) = (sim?, grid_step?);
    f.check(
        "simulate",
        grid_step > 0.0 && grid_step <= sim.horizon,
        "grid_step must lie in (0, horizon]",
    );
    Some(Job::Simulate {
        spec: spec?,
        sim,
        grid_step,
    })
}

fn parse_dependence(f: &mut Fields) -> Option<Job> {
    let spec = parse_risk(f);
    let s = f.f64("dependence", "s");
    let times = f.list("dependence", "times");
    let epsilon = f.f64_or("dependence", "epsilon", 1.0);
    let (spec, s, times, epsilon) = (spec?, s?, times?, epsilon?);
    f.check(
        "dependence",
        spec.variant() == RiskVariant::Gfrp,
        "dependence needs variant = gfrp",
    );
    f.check("dependence", s > 0.0, "s must be positive");
    f.check("dependence", epsilon > 0.0, "epsilon must be positive");
    f.check(
        "dependence",
        times.iter().all(|t| *t > s + epsilon),
        "times must all exceed s + epsilon",
    );
    f.check(
        "dependence",
        times.len() >= 5,
        "times needs at least 5 entries",
    );
    Some(Job::Dependence {
        spec,
        s,
        times,
        epsilon,
    })
}

fn parse_ruin(f: &mut Fields, seed: u64) -> Option<Job> {
    let spec = parse_risk(f);
    let n_paths = f.usize("sim", "n_paths");
    let step = f.f64("sim", "step");
    let t = f.f64("ruin", "t");
    let capitals = f.list("ruin", "capitals");
    let confidence = f.f64_or("ruin", "confidence", 0.95);
    let (spec, n_paths, step, t, capitals, confidence) =
        (spec?, n_paths?, step?, t?, capitals?, confidence?);
    f.check(
        "model",
        spec.variant() == RiskVariant::Agfrp,
        "ruin needs variant = agfrp",
    );
    f.check(
        "sim",
        n_paths >= 100,
        "n_paths must be at least 100 for ruin estimates",
    );
    f.check("ruin", t > 0.0, "t must be positive");
    f.check(
        "sim",
        step > 0.0 && step <= t / 10.0,
        "step must lie in (0, t/10]",
    );
    f.check(
        "ruin",
        capitals.iter().all(|u| *u >= 0.0),
        "capitals must be non-negative",
    );
    f.check(
        "ruin",
        confidence > 0.0 && confidence < 1.0,
        "confidence must lie in (0, 1)",
    );
    Some(Job::Ruin {
        spec,
        sim: SimConfig {
            n_paths,
            horizon: t,
            step,
            seed,
        },
        t,
        capitals,
        confidence,
    })
}

fn parse_verify(f: &mut Fields) -> Option<Job> {
    let gfcp = parse_gfcp(f);
    let claims = parse_optional_claims(f);
    let t_max = f.f64("verify-de", "t_max");
    let steps = f.list("verify-de", "steps");
    let n_max = f.usize("verify-de", "n_max");
    let window_start = if f.has("verify-de", "window_start") {
        Some(f.opt_f64("verify-de", "window_start")?)
    } else {
        None
    };
    let (t_max, steps) = (t_max?, steps?);
    positive_list(f, "verify-de", "steps", &steps);
    f.check("verify-de", t_max > 0.0, "t_max must be positive");
    Some(Job::VerifyDe {
        gfcp: gfcp?,
        claims: claims?,
        t_max,
        steps,
        n_max: n_max?,
        window_start,
    })
}

fn parse_mlf(f: &mut Fields) -> Option<Job> {
    let alpha = f.f64("mlf", "alpha");
    let beta = f.f64("mlf", "beta");
    let gamma = f.f64("mlf", "gamma");
    let z = f.list("mlf", "z");
    let (alpha, beta, gamma, z) = (alpha?, beta?, gamma?, z?);
    f.check("mlf", alpha > 0.0, "alpha must be positive");
    f.check("mlf", beta > 0.0, "beta must be positive");
    f.check("mlf", gamma > 0.0, "gamma must be positive");
    Some(Job::Mlf {
        alpha,
        beta,
        gamma,
        z,
    })
}

/// CSV header and rows produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Runs the job and returns its result table, without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<Table, Error> {
    let ctl = SeriesControl::default();
    match &config.job {
        Job::Pmf {
            gfcp,
            claims,
            t,
            n_max,
        } => {
            let values = match claims {
                Some(c) => cgfcp_pmf_table(*n_max, *t, gfcp, c, &ctl)?.values,
                None => gfcp_pmf_table(*n_max, *t, gfcp, &ctl)?,
            };
            Ok(Table {
                header: vec!["n", "p_n"],
                rows: values
                    .iter()
                    .enumerate()
                    .map(|(n, p)| vec![n.to_string(), num(*p)])
                    .collect(),
            })
        }
        Job::Moments {
            gfcp,
            claims,
            times,
        } => {
            let rows = times
                .iter()
                .map(|t| {
                    Ok(vec![
                        num(*t),
                        num(gfcp_mean(*t, gfcp)),
                        num(gfcp_var(*t, gfcp)),
                        num(cgfcp_mean(*t, gfcp, claims)?),
                        num(cgfcp_var(*t, gfcp, claims)?),
                    ])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Table {
                header: vec!["t", "gfcp_mean", "gfcp_var", "cgfcp_mean", "cgfcp_var"],
                rows,
            })
        }
        Job::Simulate {
            spec,
            sim,
            grid_step,
        } => {
            let grid = TimeGrid::uniform(sim.horizon, *grid_step)?;
            let streams = RngStreams::new(sim.seed);
            let paths = simulate(&streams, sim.n_paths, |rng, _| {
                sample_surplus_path(spec, &grid, sim.step, rng)
            });
            let mut rows = Vec::new();
            for (i, p) in paths.iter().enumerate() {
                for j in 0..p.grid.len() {
                    rows.push(vec![
                        i.to_string(),
                        num(p.grid[j]),
                        num(p.clock.values[j]),
                        p.counts.counts[j].to_string(),
                        num(p.surplus[j]),
                    ]);
                }
            }
            Ok(Table {
                header: vec!["path", "t", "clock", "count", "surplus"],
                rows,
            })
        }
        Job::Dependence {
            spec,
            s,
            times,
            epsilon,
        } => {
            let mut rows = Vec::new();
            for series in ["gfrp", "gfnrp"] {
                let points = times
                    .iter()
                    .map(|t| {
                        let c = if series == "gfrp" {
                            gfrp_corr(spec, *s, *t)?
                        } else {
                            gfnrp_corr(spec, *epsilon, *s, *t)?
                        };
                        Ok((*t, c))
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                let fit = estimate_dependence_exponent(&points)?;
                for (t, c) in points {
                    rows.push(vec![
                        series.to_string(),
                        num(t),
                        num(c),
                        num(fit.slope),
                        num(fit.slope_se),
                        fit.class.label().to_string(),
                    ]);
                }
            }
            Ok(Table {
                header: vec![
                    "series",
                    "t",
                    "correlation",
                    "fitted_slope",
                    "slope_se",
                    "classification",
                ],
                rows,
            })
        }
        Job::Ruin {
            spec,
            sim,
            t,
            capitals,
            confidence,
        } => {
            let curve = ruin_curve(
                spec,
                capitals,
                *t,
                sim.n_paths,
                sim.step,
                *confidence,
                &RngStreams::new(sim.seed),
            )?;
            let rows = curve
                .iter()
                .map(|e| {
                    vec![
                        num(e.u),
                        num(e.t),
                        num(e.psi_hat),
                        num(e.ci_lo),
                        num(e.ci_hi),
                        reference_value(spec, e.u, *t).map(num).unwrap_or_default(),
                    ]
                })
                .collect();
            Ok(Table {
                header: vec!["u", "t", "psi_hat", "ci_lo", "ci_hi", "bound_or_asymptotic"],
                rows,
            })
        }
        Job::VerifyDe {
            gfcp,
            claims,
            t_max,
            steps,
            n_max,
            window_start,
        } => {
            let mut rows = Vec::new();
            for step in steps {
                let mut check = DeCheck::new(*t_max, *step, *n_max)?;
                if let Some(w) = window_start {
                    check = check.with_window_start(*w)?;
                }
                let mut reports = vec![("gfcp", verify_gfcp_de(gfcp, &check, &ctl)?)];
                if let Some(c) = claims {
                    reports.push(("cgfcp", verify_cgfcp_de(gfcp, c, &check, &ctl)?));
                }
                for (name, report) in reports {
                    for s in &report.states {
                        rows.push(vec![
                            name.to_string(),
                            num(*step),
                            s.n.to_string(),
                            num(s.max),
                            num(s.mean),
                        ]);
                    }
                }
            }
            Ok(Table {
                header: vec!["process", "step", "n", "max_residual", "mean_residual"],
                rows,
            })
        }
        Job::Mlf {
            alpha,
            beta,
            gamma,
            z,
        } => {
            let rows = z
                .iter()
                .map(|z| {
                    let v = mlf3(&MlfArgs::new(*alpha, *beta, *gamma, *z), &ctl)?;
                    Ok(vec![num(*alpha), num(*beta), num(*gamma), num(*z), num(v)])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Table {
                header: vec!["alpha", "beta", "gamma", "z", "value"],
                rows,
            })
        }
    }
}

/// Light-tailed bound for claims with an mgf, heavy-tailed asymptotic for
/// Pareto claims; `None` where neither applies.
fn reference_value(spec: &RiskModelSpec, u: f64, t: f64) -> Option<f64> {
    let claims = spec.claims();
    if claims.has_mgf() {
        let inputs = Xi0Inputs::new(t, spec.gfcp().clone(), claims.clone()).ok()?;
        match light_tail_bound(u, &inputs) {
            Ok(b) => Some(b.bound),
            Err(e) => {
                eprintln!("note: no light-tailed bound at u={u}: {e}");
                None
            }
        }
    } else {
        heavy_tail_asymptotic(u, t, spec.gfcp(), claims).ok()
    }
}

/// Renders a table as CSV preceded by the manifest-hash comment line.
pub fn render_csv(hash: &str, table: &Table) -> Vec<u8> {
    let mut out = format!("# manifest_hash={hash}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&table.header).expect("in-memory write");
        for row in &table.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    out
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    fs::rename(&tmp, path).map_err(io)
}

/// Paths written by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub hash: String,
}

/// Executes the configuration and writes the CSV and manifest.
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let table = execute(config)?;
    let hash = config.manifest_hash();
    let csv = PathBuf::from(format!("{}.csv", config.prefix));
    let manifest = PathBuf::from(format!("{}.manifest.json", config.prefix));
    write_atomic(&csv, &render_csv(&hash, &table))?;
    let doc = serde_json::json!({
        "command": config.command.name(),
        "config_hash": hash,
        "seed": config.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_seconds": start.elapsed().as_secs_f64(),
        "csv": csv.display().to_string(),
        "rows": table.rows.len(),
    });
    let body = serde_json::to_vec_pretty(&doc).expect("manifest serializes");
    write_atomic(&manifest, &body)?;
    Ok(RunOutput {
        csv,
        manifest,
        hash,
    })
}

/// Reads a configuration file and applies command-line overrides.
pub fn load(
    command: Command,
    path: &Path,
    seed: Option<u64>,
    out: Option<String>,
) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = parse_config(command, &text)?;
    if let Some(seed) = seed {
        config = config.with_seed(seed);
    }
    if let Some(out) = out {
        config = config.with_prefix(out);
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PMF: &str = "[model]\nbeta = 0.8\nrates = [1.0]\n\n[pmf]\nt = 1\nn_max = 10\n";

    fn errors(r: Result<RunConfig, CliError>) -> Vec<String> {
        match r {
            Err(CliError::Config(e)) => e,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn minimal_pmf_config() {
        let c = parse_config(Command::Pmf, PMF).unwrap();
        assert_eq!(c.seed, 0);
        assert!(matches!(c.job, Job::Pmf { n_max: 10, .. }));
    }

    #[test]
    fn negative_rate_is_named() {
        let text = PMF.replace("[1.0]", "[1.0, -0.5]");
        let errs = errors(parse_config(Command::Pmf, &text));
        assert!(
            errs.iter().any(|e| e.contains("rates[1] must be positive")),
            "{errs:?}"
        );
    }

    #[test]
    fn duplicate_key_reports_both_lines() {
        let text = format!("{PMF}[model]\nbeta = 0.5\n");
        let errs = errors(parse_config(Command::Pmf, &text));
        assert!(
            errs.iter()
                .any(|e| e.contains("line 9") && e.contains("line 2")),
            "{errs:?}"
        );
    }

    #[test]
    fn collects_all_errors() {
        let text = "[model]\nbeta = x\nrates = [1]\nbogus = 1\n[pmf]\nn_max = 3\n[nowhere]\n";
        let errs = errors(parse_config(Command::Pmf, text));
        assert!(errs.len() >= 3, "{errs:?}");
        let errs = errors(parse_config(
            Command::Pmf,
            "[model]\nbeta = x\nrates = [1]\n[pmf]\nn_max = 3\n",
        ));
        assert!(
            errs.iter().any(|e| e.contains("beta"))
                && errs.iter().any(|e| e.contains("t is required"))
        );
    }

    #[test]
    fn syntax_error_has_line_number() {
        let errs = errors(parse_config(Command::Pmf, "[model]\nbeta 0.8\n"));
        assert!(errs[0].starts_with("line 2"), "{errs:?}");
    }

    #[test]
    fn hash_ignores_prefix_but_not_seed() {
        let a = parse_config(Command::Pmf, PMF).unwrap();
        let b = a.clone().with_prefix("elsewhere/x");
        let c = a.clone().with_seed(9);
        assert_eq!(a.manifest_hash(), b.manifest_hash());
        assert_ne!(a.manifest_hash(), c.manifest_hash());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(vec![]).exit_code(), 2);
        assert_eq!(CliError::Run(Error::domain("x")).exit_code(), 3);
        assert_eq!(
            CliError::Run(Error::PrecisionLoss {
                partial_sum: 0.0,
                rounding_error: 1.0
            })
            .exit_code(),
            4
        );
        assert_eq!(CliError::Run(Error::capability("x")).exit_code(), 5);
    }

    #[test]
    fn pmf_table_sums_below_one() {
        let c = parse_config(Command::Pmf, PMF).unwrap();
        let t = execute(&c).unwrap();
        assert_eq!(t.header, vec!["n", "p_n"]);
        let total: f64 = t.rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
        assert!(total <= 1.0 + 1e-12 && total > 0.99);
        let csv = String::from_utf8(render_csv("abc", &t)).unwrap();
        assert!(csv.starts_with("# manifest_hash=abc\nn,p_n\n0,"));
    }
}

//! Monte Carlo reference prices for arithmetic-average Asian options and
//! samples of the exponential functional `a(τ)`.
//!
//! Paths are exact geometric Brownian motion on a uniform grid, averaged
//! with the trapezoidal rule. Path `i` (or antithetic pair `i`) draws from
//! ChaCha stream `i` of the configured seed, so results do not depend on
//! how the work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::asian::{MarketParams, Payoff};
use crate::error::{Error, Result};

/// Paths (or pairs) per reduction block.
const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub n_paths: u64,
    /// Number of time intervals.
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(n_paths: u64, n_steps: usize, seed: u64, antithetic: bool) -> Result<Self> {
        let cfg = McConfig {
            n_paths,
            n_steps,
            seed,
            antithetic,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 || (self.antithetic && self.n_paths < 2) {
            return Err(Error::invalid("n_paths", "need at least one path (two with antithetic pairs)"));
        }
        if self.n_steps < 2 {
            return Err(Error::invalid("n_steps", "must be at least 2"));
        }
        if (self.n_paths as u128) * (self.n_steps as u128) >= 1u128 << 40 {
            return Err(Error::invalid("n_paths", "n_paths * n_steps must stay below 2^40"));
        }
        Ok(())
    }

    fn samples(&self) -> u64 {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Independent samples behind `std_error`: paths, or pairs when
    /// antithetic.
    pub n_effective: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64),
        }
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    fn estimate(&self) -> McEstimate {
        McEstimate {
            mean: self.mean,
            std_error: (self.variance() / self.n as f64).sqrt(),
            n_effective: self.n,
        }
    }
}

fn stream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard normal draws by inverse CDF of a uniform on the open interval.
fn fill_normals(rng: &mut ChaCha12Rng, normal: &Normal, out: &mut [f64]) {
    for z in out.iter_mut() {
        let u = ((rng.gen::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        *z = normal.inverse_cdf(u);
    }
}

/// Summary of one path: trapezoidal time average and terminal value.
#[derive(Debug, Clone, Copy)]
struct PathSummary {
    average: f64,
    terminal: f64,
}

/// `x_{j+1} = x_j + drift + vol·z_j` from `x_0 = 0`, summarizing `e^{x}`
/// by its trapezoidal average over `[0, n·dt]` and its final value.
fn exp_path(z: &[f64], drift: f64, vol: f64, sign: f64) -> PathSummary {
    let mut x = 0.0f64;
    let mut sum = 0.5;
    let mut last = 1.0;
    for (j, &zj) in z.iter().enumerate() {
        x += drift + vol * sign * zj;
        last = x.exp();
        sum += if j + 1 == z.len() { 0.5 * last } else { last };
    }
    PathSummary {
        average: sum / z.len() as f64,
        terminal: last,
    }
}

fn simulate<F>(cfg: &McConfig, drift: f64, vol: f64, sample: F) -> Result<Moments>
where
    F: Fn(PathSummary) -> f64 + Sync,
{
    cfg.validate()?;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let total = cfg.samples();
    let n_blocks = total.div_ceil(BLOCK);
    let blocks: Vec<Moments> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut z = vec![0.0; cfg.n_steps];
            let mut acc = Moments::default();
            for i in b * BLOCK..((b + 1) * BLOCK).min(total) {
                let mut rng = stream(cfg.seed, i);
                fill_normals(&mut rng, &normal, &mut z);
                let v = if cfg.antithetic {
                    0.5 * (sample(exp_path(&z, drift, vol, 1.0)) + sample(exp_path(&z, drift, vol, -1.0)))
                } else {
                    sample(exp_path(&z, drift, vol, 1.0))
                };
                acc.push(v);
            }
            acc
        })
        .collect();
    Ok(blocks.into_iter().fold(Moments::default(), Moments::merge))
}

fn check_market(m: &MarketParams<f64>) -> Result<()> {
    m.validate()
}

/// `e^{−rT} E[(K − A(T))⁺]` (or the call analogue), with `A(T)` the
/// trapezoidal time average of `S` over `n_steps` exact GBM increments.
pub fn price_asian(m: &MarketParams<f64>, payoff: Payoff, cfg: &McConfig) -> Result<McEstimate> {
    check_market(m)?;
    let dt = m.t_expiry / cfg.n_steps as f64;
    let drift = (m.r - 0.5 * m.sigma * m.sigma) * dt;
    let vol = m.sigma * dt.sqrt();
    let disc = m.discount();
    let (s0, k) = (m.s0, m.strike);
    let est = simulate(cfg, drift, vol, |p| {
        let a = s0 * p.average;
        match payoff {
            Payoff::Put => (k - a).max(0.0),
            Payoff::Call => (a - k).max(0.0),
        }
    })?
    .estimate();
    Ok(McEstimate {
        mean: disc * est.mean,
        std_error: disc * est.std_error,
        n_effective: est.n_effective,
    })
}

/// `E[e^{−rT} S(T)]`, which equals `S₀`.
pub fn discounted_terminal(m: &MarketParams<f64>, cfg: &McConfig) -> Result<McEstimate> {
    check_market(m)?;
    let dt = m.t_expiry / cfg.n_steps as f64;
    let drift = (m.r - 0.5 * m.sigma * m.sigma) * dt;
    let vol = m.sigma * dt.sqrt();
    let disc = m.discount();
    let s0 = m.s0;
    let est = simulate(cfg, drift, vol, |p| disc * s0 * p.terminal)?.estimate();
    Ok(est)
}

pub const HISTOGRAM_LO: f64 = 0.01;
pub const HISTOGRAM_HI: f64 = 2.0;
pub const HISTOGRAM_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    pub fn edges(&self) -> Vec<f64> {
        let n = self.counts.len();
        (0..=n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ATauSample {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// 1st, 50th and 99th percentiles.
    pub percentiles: [f64; 3],
    pub histogram: Histogram,
}

/// Samples of `a(τ) = ∫₀^τ e^{2(W_s + νs)} ds` by the trapezoidal rule on
/// `n_steps` exact increments. The antithetic flag is ignored: every path
/// is an independent sample.
pub fn sample_a_tau(nu: f64, tau: f64, cfg: &McConfig) -> Result<ATauSample> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid("tau", "must be positive and finite"));
    }
    if !nu.is_finite() {
        return Err(Error::invalid("nu", "must be finite"));
    }
    let cfg = McConfig { antithetic: false, ..*cfg };
    cfg.validate()?;
    let dt = tau / cfg.n_steps as f64;
    // exponent 2(W + νs) has drift 2ν dt and volatility 2√dt per step
    let (drift, vol) = (2.0 * nu * dt, 2.0 * dt.sqrt());
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let n_blocks = cfg.n_paths.div_ceil(BLOCK);
    let mut samples: Vec<f64> = (0..n_blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut z = vec![0.0; cfg.n_steps];
            let normal = &normal;
            (b * BLOCK..((b + 1) * BLOCK).min(cfg.n_paths)).map(move |i| {
                let mut rng = stream(cfg.seed, i);
                fill_normals(&mut rng, normal, &mut z);
                tau * exp_path(&z, drift, vol, 1.0).average
            })
        })
        .collect();
    let mut acc = Moments::default();
    for &s in &samples {
        acc.push(s);
    }
    let mut hist = Histogram {
        lo: HISTOGRAM_LO,
        hi: HISTOGRAM_HI,
        counts: vec![0; HISTOGRAM_BINS],
        below: 0,
        above: 0,
    };
    let width = (HISTOGRAM_HI - HISTOGRAM_LO) / HISTOGRAM_BINS as f64;
    for &s in &samples {
        if s < HISTOGRAM_LO {
            hist.below += 1;
        } else if s >= HISTOGRAM_HI {
            hist.above += 1;
        } else {
            let i = (((s - HISTOGRAM_LO) / width) as usize).min(HISTOGRAM_BINS - 1);
            hist.counts[i] += 1;
        }
    }
    samples.sort_by(f64::total_cmp);
    let pct = |q: f64| samples[((q * (samples.len() - 1) as f64).round() as usize).min(samples.len() - 1)];
    let est = acc.estimate();
    Ok(ATauSample {
        n: acc.n,
        mean: acc.mean,
        variance: acc.variance(),
        std_error: est.std_error,
        percentiles: [pct(0.01), pct(0.5), pct(0.99)],
        histogram: hist,
    })
}

//! Arithmetic-average Asian options under geometric Brownian motion,
//! priced through the spectral expansion of the transition density of
//! `a(τ) = ∫₀^τ e^{2(W_s + νs)} ds`.
//!
//! The density `K(a, 0; τ)` solves a diffusion whose Sturm-Liouville form
//! reduces to the Morse problem with `κ = (1−ν)/2`, `e^{x0} = 1/(2(1−ν))`,
//! shifted by `ν²/4`. Only `ν < 1` is supported.

mod kernel;
mod price;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morse::MorsePotential;
use crate::real::{lit, to_f64, Real};

pub use kernel::{heat_kernel_at_zero, mean_of_a, HeatKernel, WeightFunctions};
pub use price::{call_price, price_spec, put_price, put_price_by_payoff_quadrature, Payoff, PriceBreakdown, Warning, SHORT_TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketParams<T> {
    pub s0: T,
    pub strike: T,
    pub r: T,
    pub sigma: T,
    pub t_expiry: T,
}

impl<T: Real> MarketParams<T> {
    pub fn new(s0: T, strike: T, r: T, sigma: T, t_expiry: T) -> Result<Self> {
        let m = MarketParams {
            s0,
            strike,
            r,
            sigma,
            t_expiry,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be positive and finite, got {}", to_f64(v))))
            }
        };
        positive("s0", self.s0)?;
        positive("strike", self.strike)?;
        positive("sigma", self.sigma)?;
        positive("t_expiry", self.t_expiry)?;
        if !self.r.is_finite() {
            return Err(Error::invalid("r", "must be finite"));
        }
        Ok(())
    }

    /// `e^{−rT}`.
    pub fn discount(&self) -> T {
        (-self.r * self.t_expiry).exp()
    }

    /// `E[A(T)] = S₀(e^{rT} − 1)/(rT)`.
    pub fn expected_average(&self) -> T {
        let x = self.r * self.t_expiry;
        let growth = if x.abs() < lit(1e-6) {
            T::one() + x * lit(0.5) + x * x / lit(6.0)
        } else {
            x.exp_m1() / x
        };
        self.s0 * growth
    }
}

/// Dimensionless parameters and the induced Morse potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedParams<T> {
    pub tau: T,
    pub nu: T,
    pub k: T,
    pub kappa: T,
    pub x0: T,
}

impl<T: Real> ReducedParams<T> {
    /// Direct construction from `(τ, ν, k)`.
    pub fn from_dimensionless(tau: T, nu: T, k: T) -> Result<Self> {
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(Error::invalid("tau", "must be positive and finite"));
        }
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::invalid("k", "must be positive and finite"));
        }
        check_nu(nu)?;
        let two = lit::<T>(2.0);
        Ok(ReducedParams {
            tau,
            nu,
            k,
            kappa: (T::one() - nu) / two,
            x0: -(two * (T::one() - nu)).ln(),
        })
    }

    pub fn morse(&self) -> MorsePotential<T> {
        MorsePotential::new(self.kappa, self.x0).expect("kappa > 0 whenever nu < 1")
    }
}

pub(crate) fn check_nu<T: Real>(nu: T) -> Result<()> {
    if !nu.is_finite() {
        return Err(Error::invalid("nu", "must be finite"));
    }
    if nu >= T::one() {
        return Err(Error::UnsupportedRegime(format!(
            "nu = 2r/sigma^2 - 1 = {} but the spectral expansion requires nu < 1 (r < sigma^2)",
            to_f64(nu)
        )));
    }
    Ok(())
}

/// `τ = σ²T/4`, `ν = 2r/σ² − 1`, `k = τK/S₀`.
pub fn reduce<T: Real>(m: &MarketParams<T>) -> Result<ReducedParams<T>> {
    m.validate()?;
    let s2 = m.sigma * m.sigma;
    let tau = s2 * m.t_expiry / lit(4.0);
    let nu = lit::<T>(2.0) * m.r / s2 - T::one();
    ReducedParams::from_dimensionless(tau, nu, tau * m.strike / m.s0)
}

/// A discrete term of the expansion: eigenvalue `λ_n = n(−ν−n)` and
/// Laguerre index `α = −ν − 2n > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteTerm<T> {
    pub n: usize,
    pub lambda: T,
    pub alpha: T,
}

/// Indices with `−ν − 2n > 0`; empty for `ν ≥ 0`.
pub fn discrete_eigensystem<T: Real>(rp: &ReducedParams<T>) -> Vec<DiscreteTerm<T>> {
    discrete_terms(rp.nu)
}

pub(crate) fn discrete_terms<T: Real>(nu: T) -> Vec<DiscreteTerm<T>> {
    let mut out = Vec::new();
    let mut n = 0usize;
    loop {
        let nf: T = lit(n as f64);
        let alpha = -nu - nf - nf;
        if !(alpha > T::zero()) {
            return out;
        }
        out.push(DiscreteTerm {
            n,
            lambda: nf * (-nu - nf),
            alpha,
        });
        n += 1;
    }
}

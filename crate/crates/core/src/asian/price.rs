//! Closed-form Asian put, parity call, and the payoff-integration
//! cross-check.

use std::cell::{Cell, RefCell};

use num_complex::Complex;
use serde::Serialize;

use super::kernel::{calibrated_envelope, ln_spectral_weight, quadrature_failure, scaled, HeatKernel};
use super::{discrete_terms, reduce, MarketParams, ReducedParams};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, integrate_semi_infinite_with, QuadratureResult, QuadratureSpec};
use crate::real::{lit, to_f64, Real};
use crate::specfun::{ln_abs_gamma, WhittakerW};

/// Below this `τ` the continuum integral needs `p_max ∼ √(80/τ)` nodes
/// and a [`Warning::PrecisionWarning`] is attached to the result.
pub const SHORT_TAU: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Payoff {
    Put,
    Call,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    PrecisionWarning { tau: f64, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceBreakdown<T> {
    /// Discrete sum times the common prefactor `e^{−rT} S₀/τ`.
    pub discrete_part: T,
    /// Continuum integral times the common prefactor.
    pub continuum_part: T,
    pub price: T,
    pub n_terms: usize,
    /// The raw continuum integral, before the prefactor.
    pub quad: QuadratureResult<T>,
    pub reduced: ReducedParams<T>,
    /// Largest relative imaginary residue of `W_{−(ν+3)/2, ip/2}(1/(2k))`
    /// over the quadrature nodes.
    pub max_imag_residue: f64,
    pub warnings: Vec<Warning>,
}

/// Discrete price term with Whittaker index `−ν/2 − n`:
/// `(−ν−2n)/(2 n! Γ(1−ν−n)) e^{−2λ_n τ} (2k)^{(ν+3)/2} e^{−1/(4k)} W_{−(ν+3)/2, −ν/2−n}(1/(2k))`.
fn discrete_price_term<T: Real>(rp: &ReducedParams<T>, n: usize, alpha: T, lambda: T) -> Result<T> {
    let two = lit::<T>(2.0);
    let nf: T = lit(n as f64);
    let (nu, k) = (rp.nu, rp.k);
    let ln_fact = ln_abs_gamma(Complex::new(nf + T::one(), T::zero()))?;
    let ln_mag = (alpha / two).ln() - ln_fact - ln_abs_gamma(Complex::new(T::one() - nu - nf, T::zero()))? - two * lambda * rp.tau
        + (nu + lit(3.0)) / two * (two * k).ln()
        - (lit::<T>(4.0) * k).recip();
    let plan = WhittakerW::new(-(nu + lit(3.0)) / two, Complex::new(alpha / two, T::zero()))?;
    let (w, _) = plan.eval_real((two * k).recip())?;
    Ok(scaled(ln_mag, w))
}

/// Quadrature settings for [`put_price`]: panels of width 1 with 16
/// nodes, relative tolerance `1e-12`.
pub fn price_spec<T: Real>() -> QuadratureSpec<T> {
    QuadratureSpec {
        panel_width: T::one(),
        nodes_per_panel: 16,
        ..QuadratureSpec::default()
    }
}

/// Prefactor `e^{−rT} · 4S₀/(σ²T) = e^{−rT} S₀/τ`.
fn prefactor<T: Real>(m: &MarketParams<T>, rp: &ReducedParams<T>) -> T {
    m.discount() * m.s0 / rp.tau
}

fn short_tau_warnings<T: Real>(tau: T) -> Vec<Warning> {
    if tau < lit(SHORT_TAU) {
        vec![Warning::PrecisionWarning {
            tau: to_f64(tau),
            message: format!(
                "tau = {} is below {SHORT_TAU}; the continuum integral extends to p ~ {:.0}",
                to_f64(tau),
                (80.0 / to_f64(tau)).sqrt()
            ),
        }]
    } else {
        Vec::new()
    }
}

/// Arithmetic-average put by the spectral formula: the discrete sum over
/// `−ν−2n > 0` plus
/// `1/(8π²) ∫₀^∞ e^{−(p²+ν²)τ/2} (2k)^{(ν+3)/2} e^{−1/(4k)} W_{−(ν+3)/2, ip/2}(1/(2k)) |Γ((ν+ip)/2)|² sinh(πp) p dp`,
/// times `e^{−rT} 4S₀/(σ²T)`.
///
/// Only the tolerances, panel width and node count of `spec` are used;
/// the truncation envelope is supplied here.
pub fn put_price<T: Real>(m: &MarketParams<T>, spec: &QuadratureSpec<T>) -> Result<PriceBreakdown<T>> {
    let rp = reduce(m)?;
    spec.validate()?;
    let two = lit::<T>(2.0);
    let (nu, tau, k) = (rp.nu, rp.tau, rp.k);

    let terms = discrete_terms(nu);
    let mut discrete = T::zero();
    for d in &terms {
        discrete = discrete + discrete_price_term(&rp, d.n, d.alpha, d.lambda)?;
    }

    let kappa_w = -(nu + lit(3.0)) / two;
    let z = (two * k).recip();
    let pi2 = T::PI() * T::PI();
    let ln_pre = (nu + lit(3.0)) / two * (two * k).ln() - (lit::<T>(4.0) * k).recip() - (lit::<T>(8.0) * pi2).ln();
    let half = lit::<T>(0.5);
    let residue = Cell::new(0.0f64);
    let term = |p: T| -> Result<T> {
        let (w, _) = WhittakerW::new(kappa_w, Complex::new(T::zero(), p * half))?.eval(z)?;
        if w.re != T::zero() {
            residue.set(residue.get().max(to_f64(w.im.abs() / w.re.abs())));
        } else if w.im != T::zero() {
            residue.set(f64::INFINITY);
        }
        Ok(scaled(ln_spectral_weight(p, nu, tau)? + ln_pre, w.re))
    };
    let (envelope, _) = calibrated_envelope(|p| Ok(term(p)?.abs().ln()), tau)?;
    residue.set(0.0);
    let failure = RefCell::new(None);
    let g = |p: T| match term(p) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            T::zero()
        }
    };
    let qspec = QuadratureSpec {
        truncation_envelope: None,
        ..spec.clone()
    }
    .with_envelope(envelope);
    let quad = integrate_semi_infinite_with(&g, T::zero(), &qspec).map_err(quadrature_failure)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }

    let pre = prefactor(m, &rp);
    let discrete_part = pre * discrete;
    let continuum_part = pre * quad.value;
    Ok(PriceBreakdown {
        discrete_part,
        continuum_part,
        price: discrete_part + continuum_part,
        n_terms: terms.len(),
        quad,
        reduced: rp,
        max_imag_residue: residue.get(),
        warnings: short_tau_warnings(tau),
    })
}

/// Call by parity: `P + e^{−rT}(S₀(e^{rT}−1)/(rT) − K)`.
pub fn call_price<T: Real>(m: &MarketParams<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    let put = put_price(m, spec)?;
    Ok(put.price + m.discount() * (m.expected_average() - m.strike))
}

/// The put as `e^{−rT} S₀/τ · ∫₀^k (k−a) K(a, 0; τ) da`, integrating the
/// spectral heat kernel directly against the payoff. The outer integral
/// runs over `ln a` to the relative tolerance of `spec`.
pub fn put_price_by_payoff_quadrature<T: Real>(m: &MarketParams<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    let rp = reduce(m)?;
    let hk = HeatKernel::new(rp.nu, rp.tau, &HeatKernel::default_rule())?;
    let k = rp.k;
    let (lo, _) = hk.effective_support(lit(1e-17))?;
    let y_hi = k.ln();
    let y_lo = lo.ln().min(y_hi - lit(1.0));
    let n = to_f64((y_hi - y_lo).ceil()).max(1.0) as usize;
    let bps: Vec<T> = (0..=n).map(|i| y_lo + (y_hi - y_lo) * lit(i as f64 / n as f64)).collect();
    let failure = RefCell::new(None);
    let g = |y: T| {
        let a = y.exp();
        match hk.eval(a) {
            Ok(v) => (k - a) * v * a,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::zero()
            }
        }
    };
    let outer = QuadratureSpec::default().with_tolerances(spec.rel_tol.max(lit(1e-11)), lit(1e-15)).with_nodes(16);
    let (res, ok) = adaptive(&g, &bps, &outer)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !ok {
        return Err(Error::QuadratureFailure(format!(
            "payoff integral did not reach tolerance (est. error {})",
            to_f64(res.est_error)
        )));
    }
    Ok(prefactor(m, &rp) * res.value)
}

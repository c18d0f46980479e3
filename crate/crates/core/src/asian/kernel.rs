//! Spectral expansion of the density `K(a, 0; τ)` of `a(τ)`.

use std::cell::RefCell;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_nu, discrete_terms, DiscreteTerm};
use crate::error::{Error, Result};
use crate::quadrature::{composite_rule, gaussian_tail_bound, integrate_semi_infinite_with, QuadratureSpec, TailBound};
use crate::real::{lit, to_f64, Real};
use crate::specfun::{laguerre, ln_abs_gamma, WhittakerW};

/// Weights of the Sturm-Liouville form of the generator of `a(t)`:
/// `p(a) = a^{ν+1} e^{1/(2a)}`, `w(a) = a^{ν−1} e^{−1/(2a)}`, so that
/// `K(a, a'; t) = w(a) Σ_λ e^{−2λt} f*_λ(a) f_λ(a')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightFunctions<T> {
    pub nu: T,
}

impl<T: Real> WeightFunctions<T> {
    pub fn p_weight(&self, a: T) -> T {
        ((self.nu + T::one()) * a.ln() + (a + a).recip()).exp()
    }

    pub fn w_weight(&self, a: T) -> T {
        ((self.nu - T::one()) * a.ln() - (a + a).recip()).exp()
    }
}

fn ln_sinh<T: Real>(x: T) -> T {
    x - T::LN_2() + (-(-(x + x)).exp_m1()).ln()
}

/// `−(p²+ν²)τ/2 + ln[sinh(πp) |Γ((ν+ip)/2)|² p]`, shared by the kernel and
/// the price integrands.
pub(crate) fn ln_spectral_weight<T: Real>(p: T, nu: T, tau: T) -> Result<T> {
    let half = lit::<T>(0.5);
    let g = ln_abs_gamma(Complex::new(nu * half, p * half))?;
    Ok(-(p * p + nu * nu) * tau * half + ln_sinh(T::PI() * p) + g + g + p.ln())
}

/// Signed `exp(ln_mag) · w` without forming `exp(ln_mag)` on its own.
pub(crate) fn scaled<T: Real>(ln_mag: T, w: T) -> T {
    if w == T::zero() {
        return T::zero();
    }
    let v = (ln_mag + w.abs().ln()).exp();
    if w < T::zero() {
        -v
    } else {
        v
    }
}

/// Slack added to the `π/4` growth of the continuum integrands to absorb
/// their power-law factors.
const GROWTH_SLACK: f64 = 0.5;
const ENVELOPE_SAFETY: f64 = 1e3;

/// Gaussian tail bound for an integrand behaving like
/// `p^m e^{πp/4 − τp²/2}`, with the scale fitted on samples reaching well
/// past the Gaussian peak.
pub(crate) fn calibrated_envelope<T: Real>(ln_abs: impl Fn(T) -> Result<T>, tau: T) -> Result<(TailBound<T>, T)> {
    let growth = lit::<T>(std::f64::consts::FRAC_PI_4 + GROWTH_SLACK);
    let half = lit::<T>(0.5);
    let peak = growth / tau;
    let p_hi = peak + (lit::<T>(120.0) / tau).sqrt();
    let step = lit::<T>(0.25);
    let n = to_f64((p_hi / step).ceil()) as usize;
    let mut ln_scale = T::neg_infinity();
    for j in 1..=n {
        let p = step * lit(j as f64);
        let l = ln_abs(p)?;
        if l.is_finite() {
            ln_scale = ln_scale.max(l - growth * p + tau * p * p * half);
        }
    }
    if !ln_scale.is_finite() {
        ln_scale = lit(-700.0);
    }
    ln_scale = ln_scale + lit::<T>(ENVELOPE_SAFETY).ln();
    Ok((gaussian_tail_bound(ln_scale, growth, tau), p_hi))
}

/// `(−1)^n 2(−ν−2n)/Γ(1−ν−n) · e^{−2λ_n τ} (2a)^{ν+n−1} e^{−1/(2a)} L_n^{−ν−2n}(1/(2a))`.
fn discrete_kernel_term<T: Real>(d: &DiscreteTerm<T>, nu: T, tau: T, a: T) -> Result<T> {
    let nf: T = lit(d.n as f64);
    let two = lit::<T>(2.0);
    let x = (two * a).recip();
    let ln_mag = (two * d.alpha).ln() - ln_abs_gamma(Complex::new(T::one() - nu - nf, T::zero()))? - two * d.lambda * tau
        + (nu + nf - T::one()) * (two * a).ln()
        - x;
    let sign = if d.n % 2 == 0 { T::one() } else { -T::one() };
    Ok(sign * scaled(ln_mag, laguerre(d.n, d.alpha, x)))
}

fn ln_kernel_prefactor<T: Real>(nu: T, a: T) -> T {
    let two = lit::<T>(2.0);
    let pi2 = T::PI() * T::PI();
    (nu - T::one()) / two * (two * a).ln() - (lit::<T>(4.0) * a).recip() - (two * pi2).ln()
}

fn check_inputs<T: Real>(a: T, tau: T, nu: T) -> Result<()> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::invalid("a", "must be positive and finite"));
    }
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::invalid("tau", "must be positive and finite"));
    }
    check_nu(nu)
}

/// `K(a, 0; τ)`, with the continuum integral in `p = 2√(λ − ν²/4)` taken
/// on chained adaptive panels and cut by a Gaussian `e^{−p²τ/2}` envelope.
pub fn heat_kernel_at_zero<T: Real>(a: T, tau: T, nu: T) -> Result<T> {
    check_inputs(a, tau, nu)?;
    let mut discrete = T::zero();
    for d in discrete_terms(nu) {
        discrete = discrete + discrete_kernel_term(&d, nu, tau, a)?;
    }
    let two = lit::<T>(2.0);
    let kappa_w = (T::one() - nu) / two;
    let z = (two * a).recip();
    let ln_pre = ln_kernel_prefactor(nu, a);
    let half = lit::<T>(0.5);
    let term = |p: T| -> Result<T> {
        let (w, _) = WhittakerW::new(kappa_w, Complex::new(T::zero(), p * half))?.eval_real(z)?;
        Ok(scaled(ln_spectral_weight(p, nu, tau)? + ln_pre, w))
    };
    let (envelope, _) = calibrated_envelope(|p| Ok(term(p)?.abs().ln()), tau)?;
    let failure = RefCell::new(None);
    let g = |p: T| match term(p) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            T::zero()
        }
    };
    let spec = QuadratureSpec::default().with_envelope(envelope);
    let res = integrate_semi_infinite_with(&g, T::zero(), &spec).map_err(quadrature_failure)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(discrete + res.value)
}

pub(crate) fn quadrature_failure(e: Error) -> Error {
    match e {
        Error::NoConvergence { .. } | Error::MissingEnvelope { .. } => Error::QuadratureFailure(e.to_string()),
        other => other,
    }
}

struct Node<T> {
    weight_ln: T,
    weight: T,
    w: WhittakerW<T>,
}

/// Relative size below which the two parts of `K` are taken to cancel.
pub const CANCELLATION_FLOOR: f64 = 1e-8;

/// Fraction of the peak of `a·K` treated as quadrature noise in the support scan.
pub const NOISE_FLOOR: f64 = 1e-10;

/// `K(a, 0; τ)` for many `a` at fixed `(ν, τ)`: the continuum integral uses
/// a fixed composite Gauss-Legendre rule on `[0, p_max]` with a Whittaker
/// plan cached per node.
pub struct HeatKernel<T> {
    nu: T,
    tau: T,
    discrete: Vec<DiscreteTerm<T>>,
    nodes: Vec<(T, Node<T>)>,
    p_max: T,
}

impl<T: Real> HeatKernel<T> {
    /// Panels of width 1 with 16 nodes each.
    pub fn default_rule() -> QuadratureSpec<T> {
        QuadratureSpec {
            panel_width: T::one(),
            nodes_per_panel: 16,
            ..QuadratureSpec::default()
        }
    }

    /// `p_max` is placed where the spectral weight, times the large-`p`
    /// decay `e^{−πp/4}` of `W`, has fallen `e^{−45}` below its peak. Panel
    /// width and nodes come from `spec`.
    pub fn new(nu: T, tau: T, spec: &QuadratureSpec<T>) -> Result<Self> {
        check_inputs(T::one(), tau, nu)?;
        spec.validate()?;
        let two = lit::<T>(2.0);
        let kappa_w = (T::one() - nu) / two;
        let quarter_pi = T::FRAC_PI_4();
        let power = kappa_w.abs() + T::one();
        let model = |p: T| -> Result<T> { Ok(ln_spectral_weight(p, nu, tau)? - quarter_pi * p + power * (T::one() + p).ln()) };
        let step = lit::<T>(0.25);
        let mut best = T::neg_infinity();
        let mut p = step;
        loop {
            let m = model(p)?;
            best = best.max(m);
            if p * tau > quarter_pi && m < best - lit(45.0) {
                break;
            }
            p = p + step;
        }
        let p_max = p;
        let n_panels = to_f64((p_max / spec.panel_width).ceil()).max(1.0) as usize;
        let rule = composite_rule(T::zero(), p_max, n_panels, spec.nodes_per_panel);
        let half = lit::<T>(0.5);
        let nodes = rule
            .par_iter()
            .map(|&(p, wq)| {
                let weight_ln = ln_spectral_weight(p, nu, tau)?;
                let w = WhittakerW::new(kappa_w, Complex::new(T::zero(), p * half))?;
                Ok((p, Node { weight_ln, weight: wq, w }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HeatKernel {
            nu,
            tau,
            discrete: discrete_terms(nu),
            nodes,
            p_max,
        })
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn p_max(&self) -> T {
        self.p_max
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn discrete_part(&self, a: T) -> Result<T> {
        check_inputs(a, self.tau, self.nu)?;
        let mut s = T::zero();
        for d in &self.discrete {
            s = s + discrete_kernel_term(d, self.nu, self.tau, a)?;
        }
        Ok(s)
    }

    pub fn continuum_part(&self, a: T) -> Result<T> {
        check_inputs(a, self.tau, self.nu)?;
        let two = lit::<T>(2.0);
        let z = (two * a).recip();
        let ln_pre = ln_kernel_prefactor(self.nu, a);
        let mut s = T::zero();
        for (_, node) in &self.nodes {
            let (w, _) = node.w.eval_real(z)?;
            s = s + node.weight * scaled(node.weight_ln + ln_pre, w);
        }
        Ok(s)
    }

    pub fn eval(&self, a: T) -> Result<T> {
        Ok(self.discrete_part(a)? + self.continuum_part(a)?)
    }

    /// Interval `[a_lo, a_hi]` outside of which `a·K(a)` stays below
    /// `rel · max a·K` on a log-spaced scan, starting from the mean of `a(τ)`.
    /// Points where the discrete and continuum parts cancel to
    /// [`CANCELLATION_FLOOR`] of their size also count as negligible, as do
    /// values under [`NOISE_FLOOR`] of the peak.
    pub fn effective_support(&self, rel: T) -> Result<(T, T)> {
        let step = lit::<T>(0.25);
        let start = mean_of_a(self.nu, self.tau).ln();
        let density = |y: T| -> Result<(T, T)> {
            let a = y.exp();
            let (d, c) = (self.discrete_part(a)?, self.continuum_part(a)?);
            Ok(((a * (d + c)).abs(), a * (d.abs() + c.abs()) * lit(CANCELLATION_FLOOR)))
        };
        let mut peak = density(start)?.0;
        let mut scan = |dir: T| -> Result<T> {
            let mut y = start;
            let mut quiet = 0;
            for _ in 0..400 {
                y = y + dir * step;
                let (d, floor) = density(y)?;
                peak = peak.max(d);
                if d < rel.max(lit(NOISE_FLOOR)) * peak || d < floor {
                    quiet += 1;
                    if quiet >= 4 {
                        return Ok(y);
                    }
                } else {
                    quiet = 0;
                }
            }
            Err(Error::QuadratureFailure(format!(
                "heat kernel does not decay within the log-scan from a = {}",
                to_f64(start.exp())
            )))
        };
        let hi = scan(T::one())?;
        let lo = scan(-T::one())?;
        Ok((lo.exp(), hi.exp()))
    }
}

/// `E a(τ) = (e^{(2ν+2)τ} − 1)/(2ν+2)`, with the `ν = −1` limit `τ`.
pub fn mean_of_a<T: Real>(nu: T, tau: T) -> T {
    let c = lit::<T>(2.0) * nu + lit(2.0);
    if c.abs() < lit(1e-8) {
        tau * (T::one() + c * tau * lit(0.5))
    } else {
        (c * tau).exp_m1() / c
    }
}

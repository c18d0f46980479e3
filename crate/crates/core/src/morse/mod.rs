//! The Schrödinger operator `−ψ'' + V ψ = λ ψ` on the line with the Morse
//! potential `V(x) = κ²(e^{−2(x−x0)} − 2e^{−(x−x0)})`.
//!
//! Everything is expressed through `u = 2κ e^{−(x−x0)}`, which maps the line
//! onto `(0, ∞)` with `x → +∞` at `u → 0`.

mod expansion;
mod green;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{lit, Real};
use crate::specfun::{laguerre, ln_abs_gamma, EvalDiagnostics, WhittakerW};

pub use expansion::{reconstruct, Reconstruction, ReconstructSpec};
pub use green::{green_function, wronskian_residual, GreenEval, Resolvent, SPECTRUM_GUARD};

/// Relative error above which a grid value past the turning point is
/// replaced by the monotone bound.
const GRID_ACCEPT: f64 = 1e-6;

/// Most negative `x − x0` for which `u` is computed.
pub const U_OVERFLOW_LIMIT: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorsePotential<T> {
    kappa: T,
    x0: T,
}

impl<T: Real> MorsePotential<T> {
    pub fn new(kappa: T, x0: T) -> Result<Self> {
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::invalid("kappa", "must be positive and finite"));
        }
        if !x0.is_finite() {
            return Err(Error::invalid("x0", "must be finite"));
        }
        Ok(MorsePotential { kappa, x0 })
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn x0(&self) -> T {
        self.x0
    }

    pub fn potential(&self, x: T) -> T {
        let e = (self.x0 - x).exp();
        self.kappa * self.kappa * (e * e - e - e)
    }

    pub fn u_of_x(&self, x: T) -> Result<T> {
        let y = x - self.x0;
        let u = (self.kappa + self.kappa) * (-y).exp();
        if y < lit(U_OVERFLOW_LIMIT) || !u.is_finite() {
            return Err(Error::Overflow {
                what: "u = 2κ·exp(−(x − x0))",
                at: crate::real::to_f64(x),
            });
        }
        Ok(u)
    }

    /// States `n = 0, 1, …` with `2κ − 2n − 1 > 0`.
    pub fn bound_states(&self) -> Vec<DiscreteState<T>> {
        let half = lit::<T>(0.5);
        let mut out = Vec::new();
        let mut n = 0usize;
        loop {
            let nf: T = lit(n as f64);
            let alpha = self.kappa + self.kappa - nf - nf - T::one();
            if !(alpha > T::zero()) {
                break;
            }
            let e = self.kappa - nf - half;
            let ln_fact = ln_abs_gamma(Complex::new(nf + T::one(), T::zero())).expect("positive argument");
            let ln_den = ln_abs_gamma(Complex::new(self.kappa + self.kappa - nf, T::zero())).expect("positive argument");
            let ln_norm = (ln_fact + alpha.ln() - ln_den) * half;
            out.push(DiscreteState {
                n,
                lambda_n: -e * e,
                norm_const: ln_norm.exp(),
                ln_norm,
            });
            n += 1;
        }
        out
    }
}

/// `u = 2κ e^{−(x−x0)}`.
pub fn u_of_x<T: Real>(x: T, pot: &MorsePotential<T>) -> Result<T> {
    pot.u_of_x(x)
}

pub fn bound_states<T: Real>(pot: &MorsePotential<T>) -> Vec<DiscreteState<T>> {
    pot.bound_states()
}

/// A bound state: `λ_n = −(κ − n − ½)²` with
/// `norm_const² = n!(2κ−2n−1)/Γ(2κ−n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteState<T> {
    pub n: usize,
    pub lambda_n: T,
    pub norm_const: T,
    #[serde(skip)]
    ln_norm: T,
}

/// `ψ_n(x) = N_n e^{−u/2} u^{κ−n−½} L_n^{(2κ−2n−1)}(u)`, combined in log space.
pub fn psi_n<T: Real>(x: T, state: &DiscreteState<T>, pot: &MorsePotential<T>) -> Result<T> {
    let u = pot.u_of_x(x)?;
    let half = lit::<T>(0.5);
    let nf: T = lit(state.n as f64);
    let alpha = pot.kappa + pot.kappa - nf - nf - T::one();
    let l = laguerre(state.n, alpha, u);
    if l == T::zero() {
        return Ok(T::zero());
    }
    if !l.is_finite() {
        // only for u so large that e^{−u/2} underflows regardless
        return Ok(T::zero());
    }
    let ln = state.ln_norm - u * half + (pot.kappa - nf - half) * u.ln() + l.abs().ln();
    Ok(ln.exp().copysign(l))
}

/// `ψ_λ(x) = (√2 π)^{−1} sinh^{½}(2π√λ) |Γ(½−κ+i√λ)| u^{−½} W_{κ,i√λ}(u)`
/// for one `λ > 0`, with the `λ`-dependent prefactor computed once.
#[derive(Debug, Clone)]
pub struct ContinuumEigenfunction<T> {
    pot: MorsePotential<T>,
    lambda: T,
    ln_prefactor: T,
    w: WhittakerW<T>,
}

impl<T: Real> ContinuumEigenfunction<T> {
    pub fn new(pot: &MorsePotential<T>, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::invalid("lambda", "continuum eigenvalue must be positive and finite"));
        }
        let s = lambda.sqrt();
        let two_pi = T::PI() + T::PI();
        let half = lit::<T>(0.5);
        // ln sinh(2πs) = 2πs − ln 2 + ln(1 − e^{−4πs})
        let ln_sinh = two_pi * s - T::LN_2() + (-(-(two_pi + two_pi) * s).exp_m1()).ln();
        let ln_gamma = ln_abs_gamma(Complex::new(half - pot.kappa, s))?;
        let ln_prefactor = ln_sinh * half + ln_gamma - (T::SQRT_2() * T::PI()).ln();
        let w = WhittakerW::new(pot.kappa, Complex::new(T::zero(), s))?;
        Ok(ContinuumEigenfunction {
            pot: *pot,
            lambda,
            ln_prefactor,
            w,
        })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn eval(&self, x: T) -> Result<T> {
        self.eval_with_diagnostics(x).map(|r| r.0)
    }

    pub fn eval_with_diagnostics(&self, x: T) -> Result<(T, EvalDiagnostics)> {
        let u = self.pot.u_of_x(x)?;
        let (w, diag) = self.w.eval_real(u)?;
        Ok(((self.ln_prefactor - u.ln() * lit(0.5)).exp() * w, diag))
    }

    /// Values on an increasing grid.
    ///
    /// Points are visited from the right; once the classically forbidden
    /// region on the left is reached and `|ψ|` has fallen below
    /// `negligible` times its running maximum, the remaining values are set
    /// to zero, which is safe because `ψ` is monotone there. Also returns
    /// the largest estimated error relative to `max |ψ|`.
    pub fn eval_grid(&self, xs: &[T], negligible: T) -> Result<(Vec<T>, f64)> {
        let kappa = self.pot.kappa;
        let two = lit::<T>(2.0);
        let forbidden = two * kappa + two * (kappa * kappa + self.lambda).sqrt();
        let mut out = vec![T::zero(); xs.len()];
        let mut abs_err = vec![0.0f64; xs.len()];
        let mut peak = T::zero();
        let mut last = T::zero();
        let mut in_forbidden = false;
        for (i, &x) in xs.iter().enumerate().rev() {
            let u = self.pot.u_of_x(x)?;
            let r = self.eval_with_diagnostics(x);
            if in_forbidden && u > forbidden {
                // past the turning point |ψ| only decreases, so the last
                // reliable value bounds everything further left
                let unreliable = match &r {
                    Ok((v, d)) => d.est_rel_error > GRID_ACCEPT || v.abs() > last.abs(),
                    Err(_) => true,
                };
                if unreliable {
                    abs_err[i] = crate::real::to_f64(last.abs());
                    break;
                }
            }
            let (v, d) = r?;
            last = v;
            in_forbidden = u > forbidden;
            out[i] = v;
            abs_err[i] = d.est_rel_error * crate::real::to_f64(v.abs());
            peak = peak.max(v.abs());
            if in_forbidden && v.abs() <= negligible * peak {
                break;
            }
        }
        let worst = abs_err.iter().fold(0.0f64, |m, &e| m.max(e));
        let peak = crate::real::to_f64(peak);
        Ok((out, if peak > 0.0 { worst / peak } else { 0.0 }))
    }
}

pub fn psi_continuum<T: Real>(x: T, lambda: T, pot: &MorsePotential<T>) -> Result<T> {
    ContinuumEigenfunction::new(pot, lambda)?.eval(x)
}

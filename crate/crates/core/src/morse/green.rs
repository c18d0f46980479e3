use num_complex::Complex;
use serde::Serialize;

use super::MorsePotential;
use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};
use crate::specfun::{log_gamma, whittaker_m, WhittakerW};

/// Distance to the spectrum below which the resolvent is not evaluated.
pub const SPECTRUM_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenEval<T> {
    pub value: Complex<T>,
    pub x: T,
    pub x_prime: T,
    pub lambda: Complex<T>,
}

/// Kernel of `(−d²/dx² + V − λ)^{−1}` at a fixed `λ` off the spectrum.
///
/// With `μ = i√λ` on the branch `Im √λ < 0` (so `Re μ > 0`),
/// `ψ₁ = u^{−½} M_{κ,μ}(u)` decays as `x → +∞` and `ψ₂ = u^{−½} W_{κ,μ}(u)`
/// as `x → −∞`, and `G = ψ₁(x_>) ψ₂(x_<) / 𝒲` with
/// `𝒲 = ψ₁ψ₂' − ψ₁'ψ₂ = Γ(1+2μ)/Γ(½−κ+μ)`.
#[derive(Debug, Clone)]
pub struct Resolvent<T> {
    pot: MorsePotential<T>,
    lambda: Complex<T>,
    mu: Complex<T>,
    inv_wronskian: Complex<T>,
    w: WhittakerW<T>,
}

impl<T: Real> Resolvent<T> {
    pub fn new(pot: &MorsePotential<T>, lambda: Complex<T>) -> Result<Self> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::invalid("lambda", "must be finite"));
        }
        let mut distance = if lambda.re >= T::zero() { lambda.im.abs() } else { lambda.norm() };
        for s in pot.bound_states() {
            distance = distance.min((lambda - s.lambda_n).norm());
        }
        if distance < lit(SPECTRUM_GUARD) {
            return Err(Error::Spectrum {
                re: to_f64(lambda.re),
                im: to_f64(lambda.im),
                distance: to_f64(distance),
            });
        }
        let mut root = lambda.sqrt();
        if root.im > T::zero() {
            root = -root;
        }
        let mu = Complex::new(-root.im, root.re);
        let half = lit::<T>(0.5);
        let a = mu + half - pot.kappa();
        let b = mu + mu + T::one();
        let inv_wronskian = (log_gamma(a)? - log_gamma(b)?).exp();
        let w = WhittakerW::new(pot.kappa(), mu)?;
        Ok(Resolvent {
            pot: *pot,
            lambda,
            mu,
            inv_wronskian,
            w,
        })
    }

    pub fn lambda(&self) -> Complex<T> {
        self.lambda
    }

    pub fn mu(&self) -> Complex<T> {
        self.mu
    }

    /// `Γ(1+2μ)/Γ(½−κ+μ)`.
    pub fn wronskian(&self) -> Complex<T> {
        self.inv_wronskian.inv()
    }

    /// `u^{−½} M_{κ,μ}(u)`, the solution that decays as `x → +∞`.
    pub fn psi_right(&self, x: T) -> Result<Complex<T>> {
        let u = self.pot.u_of_x(x)?;
        let (m, _) = whittaker_m(self.pot.kappa(), self.mu, u)?;
        Ok(m / u.sqrt())
    }

    /// `u^{−½} W_{κ,μ}(u)`, the solution that decays as `x → −∞`.
    pub fn psi_left(&self, x: T) -> Result<Complex<T>> {
        let u = self.pot.u_of_x(x)?;
        let (w, _) = self.w.eval(u)?;
        Ok(w / u.sqrt())
    }

    /// Branch for `x ≥ x'`.
    pub fn plus(&self, x: T, x_prime: T) -> Result<Complex<T>> {
        Ok(self.inv_wronskian * self.psi_right(x)? * self.psi_left(x_prime)?)
    }

    /// Branch for `x < x'`.
    pub fn minus(&self, x: T, x_prime: T) -> Result<Complex<T>> {
        Ok(self.inv_wronskian * self.psi_right(x_prime)? * self.psi_left(x)?)
    }

    pub fn eval(&self, x: T, x_prime: T) -> Result<GreenEval<T>> {
        let value = if x >= x_prime { self.plus(x, x_prime)? } else { self.minus(x, x_prime)? };
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Overflow {
                what: "resolvent kernel",
                at: to_f64(x),
            });
        }
        Ok(GreenEval {
            value,
            x,
            x_prime,
            lambda: self.lambda,
        })
    }
}

pub fn green_function<T: Real>(x: T, x_prime: T, lambda: Complex<T>, pot: &MorsePotential<T>) -> Result<GreenEval<T>> {
    Resolvent::new(pot, lambda)?.eval(x, x_prime)
}

/// Relative gap between the central-difference Wronskian of the two
/// resolvent solutions at `x` and `Γ(1+2μ)/Γ(½−κ+μ)`.
pub fn wronskian_residual<T: Real>(lambda: Complex<T>, x: T, pot: &MorsePotential<T>) -> Result<T> {
    let r = Resolvent::new(pot, lambda)?;
    let h = lit::<T>(1e-5);
    let two_h = h + h;
    let p1 = r.psi_right(x)?;
    let p2 = r.psi_left(x)?;
    let d1 = (r.psi_right(x + h)? - r.psi_right(x - h)?) / two_h;
    let d2 = (r.psi_left(x + h)? - r.psi_left(x - h)?) / two_h;
    let exact = r.wronskian();
    Ok((p1 * d2 - d1 * p2 - exact).norm() / exact.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::psi_n;

    fn pot() -> MorsePotential<f64> {
        MorsePotential::new(2.3, 0.0).unwrap()
    }

    #[test]
    fn symmetric() {
        let p = pot();
        let lam = Complex::new(-2.0, 0.5);
        let r = Resolvent::new(&p, lam).unwrap();
        let a = r.eval(1.3, -0.7).unwrap().value;
        let b = r.eval(-0.7, 1.3).unwrap().value;
        assert_eq!(a, b);
        let c = r.minus(-0.7, 1.3).unwrap();
        let d = r.plus(1.3, -0.7).unwrap();
        assert!((c - d).norm() <= 1e-12 * d.norm());
    }

    #[test]
    fn derivative_jump() {
        let p = pot();
        let r = Resolvent::new(&p, Complex::new(-2.0, 0.5)).unwrap();
        let (xp, h) = (0.4, 1e-4);
        let g = |x: f64| r.eval(x, xp).unwrap().value;
        // second-order one-sided differences on each side of x'
        let right = (g(xp) * -3.0 + g(xp + h) * 4.0 - g(xp + 2.0 * h)) / (2.0 * h);
        let left = (g(xp) * 3.0 - g(xp - h) * 4.0 + g(xp - 2.0 * h)) / (2.0 * h);
        let jump = right - left;
        assert!((jump - Complex::new(-1.0, 0.0)).norm() < 1e-4, "{jump}");
    }

    #[test]
    fn pole_residue() {
        let p = pot();
        let s = p.bound_states()[0];
        let lam = Complex::new(s.lambda_n + 1e-6, 0.0);
        let r = Resolvent::new(&p, lam).unwrap();
        for &(x, xp) in &[(0.5, -0.2), (1.5, 1.0), (-0.3, 2.0)] {
            let res = r.eval(x, xp).unwrap().value * 1e-6;
            let expected = -psi_n(x, &s, &p).unwrap() * psi_n(xp, &s, &p).unwrap();
            assert!((res.re - expected).abs() < 0.01 * expected.abs(), "{res} vs {expected}");
        }
    }

    #[test]
    fn wronskian_identity() {
        let p = pot();
        let lam = Complex::new(-1.5, 0.3);
        let r0 = wronskian_residual(lam, 0.2, &p).unwrap();
        assert!(r0 < 1e-6, "{r0}");
        let rs: Vec<f64> = [-1.0, 0.0, 2.0].iter().map(|&x| wronskian_residual(lam, x, &p).unwrap()).collect();
        assert!(rs.iter().all(|&r| r < 1e-6), "{rs:?}");
        let p2 = MorsePotential::new(0.7, 0.0).unwrap();
        let r = wronskian_residual(Complex::new(4.0, -2.0), 1.0, &p2).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn branch_has_positive_real_mu() {
        let p = pot();
        for &lam in &[Complex::new(-2.0, 0.5), Complex::new(-2.0, -0.5), Complex::new(3.0, 1.0), Complex::new(-0.1, 0.0)] {
            assert!(Resolvent::new(&p, lam).unwrap().mu().re > 0.0);
        }
    }

    #[test]
    fn refuses_the_spectrum() {
        let p = pot();
        assert!(matches!(Resolvent::new(&p, Complex::new(-3.24, 0.0)), Err(Error::Spectrum { .. })));
        assert!(matches!(Resolvent::new(&p, Complex::new(2.0, 1e-12)), Err(Error::Spectrum { .. })));
        assert!(Resolvent::new(&p, Complex::new(2.0, 1e-6)).is_ok());
    }
}

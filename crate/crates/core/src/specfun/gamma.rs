//! Complex log-gamma.
//!
//! Stirling's series after an upward recurrence shift. Reflection takes over
//! far into the left half-plane.

use num_complex::Complex;

use super::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

/// B_{2k} as exact numerator/denominator pairs, k = 1..=12.
const BERNOULLI: [(f64, f64); 12] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
];

const SHIFT_TARGET: f64 = 10.0;
const STIRLING_TERMS: usize = 8;
const REFLECT_BELOW: f64 = -50.0;

fn check_pole<T: Real>(z: Complex<T>) -> Result<()> {
    let tol = lit::<T>(1e-14);
    if z.im.abs() < tol && z.re <= tol && (z.re - z.re.round()).abs() < tol {
        return Err(Error::Pole {
            re: to_f64(z.re),
            im: to_f64(z.im),
        });
    }
    Ok(())
}

fn stirling<T: Real>(w: Complex<T>) -> Complex<T> {
    let half = lit::<T>(0.5);
    let half_ln_two_pi = lit::<T>(0.918_938_533_204_672_8);
    let mut acc = (w - half) * w.ln() - w + half_ln_two_pi;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, &(num, den)) in BERNOULLI.iter().take(STIRLING_TERMS).enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        acc = acc + pow * lit::<T>(num / (den * two_k * (two_k - 1.0)));
        pow = pow * inv2;
    }
    acc
}

/// Principal branch of `ln Γ(z)`.
///
/// Fails with [`Error::Pole`] within `1e-14` of a nonpositive integer.
pub fn log_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_pole(z)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("z", "non-finite argument"));
    }
    if z.re < lit(REFLECT_BELOW) {
        // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1−z), branch fixed modulo 2πi
        let pi = T::PI();
        let s = (z * pi).sin();
        return Ok(Complex::new(pi.ln(), T::zero()) - s.ln() - log_gamma(Complex::new(T::one(), T::zero()) - z)?);
    }
    let mut w = z;
    let mut shift = Complex::new(T::zero(), T::zero());
    while w.re < lit(SHIFT_TARGET) {
        shift = shift + w.ln();
        w = w + T::one();
    }
    Ok(stirling(w) - shift)
}

/// `|Γ(z)|²`, computed as `exp(2 Re ln Γ(z))`.
pub fn abs_gamma_sq<T: Real>(z: Complex<T>) -> Result<T> {
    Ok((log_gamma(z)?.re * lit(2.0)).exp())
}

/// `ln |Γ(z)|`.
pub fn ln_abs_gamma<T: Real>(z: Complex<T>) -> Result<T> {
    Ok(log_gamma(z)?.re)
}

/// `ln Γ(z)` in double-word precision, congruent to the principal branch
/// modulo `2πi`. Only meant to be exponentiated.
pub(crate) fn log_gamma_dd<T: Real>(z: Complex<T>) -> Result<CDd<T>> {
    check_pole(z)?;
    let target = lit::<T>(40.0);
    let mut w = CDd::from_complex(z);
    let mut shift = CDd::zero();
    let mut product = CDd::one();
    let mut pending = 0;
    if z.re < target {
        let steps = (target - z.re).ceil().to_usize().unwrap_or(0);
        for _ in 0..steps {
            product = product * w;
            w = w + CDd::one();
            pending += 1;
            if pending == 8 {
                shift = shift + product.ln();
                product = CDd::one();
                pending = 0;
            }
        }
        if pending > 0 {
            shift = shift + product.ln();
        }
    }
    let half = CDd::from_real(Dd::from_t(lit(0.5)));
    let two_pi = Dd::pi().mul_t(lit(2.0));
    let mut acc = (w - half) * w.ln() - w + CDd::from_real(two_pi.ln().mul_t(lit(0.5)));
    let inv = CDd::one() / w;
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        let c = Dd::ratio(lit::<T>(num), lit::<T>(den * two_k * (two_k - 1.0)));
        acc = acc + pow.scale(c);
        pow = pow * inv2;
    }
    Ok(acc - shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn half_and_integers() {
        let v = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((v.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
        let v = log_gamma(c(5.0, 0.0)).unwrap();
        assert!((v.re - 24f64.ln()).abs() < 1e-14 * 24f64.ln());
    }

    #[test]
    fn modulus_identity_on_imaginary_line() {
        // |Γ(1+i)|² = π / sinh π
        let expect = std::f64::consts::PI / std::f64::consts::PI.sinh();
        let got = abs_gamma_sq(c(1.0, 1.0)).unwrap();
        assert!((got - expect).abs() < 1e-14 * expect);
        // |Γ(iy)|² = π / (y sinh πy)
        let got = abs_gamma_sq(c(0.0, 1.0)).unwrap();
        assert!((got - expect).abs() < 1e-14 * expect);
        assert!((abs_gamma_sq(c(0.5, 0.0)).unwrap() - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn poles_rejected() {
        for re in [0.0, -1.0, -7.0] {
            assert!(matches!(log_gamma(c(re, 0.0)), Err(Error::Pole { .. })));
        }
        assert!(log_gamma(c(-1.0, 1e-10)).is_ok());
    }

    #[test]
    fn branch_is_principal() {
        // ln Γ(z) is continuous across the upper half-plane; compare imaginary parts
        // against reference values of the principal loggamma
        let v = log_gamma(c(-2.5, 1.0)).unwrap();
        assert!((v.re - (-2.344_190_652_465_59)).abs() < 1e-12, "{v}");
        assert!((v.im - (-8.304_127_986_657_93)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn double_word_agrees_and_is_sharper() {
        for &(re, im) in &[(0.5, 0.0), (1.0, 1.0), (-3.3, 0.9), (12.0, -7.0), (0.0, 2.5)] {
            let z = c(re, im);
            let d = log_gamma_dd(z).unwrap().exp().to_complex();
            let s = log_gamma(z).unwrap().exp();
            assert!((d - s).norm() < 1e-13 * s.norm(), "{z}: {d} vs {s}");
        }
        // Γ(1/2)² − π vanishes to double-word precision
        let g = log_gamma_dd(c(0.5, 0.0)).unwrap().exp();
        let diff = g.re * g.re - Dd::pi();
        assert!(diff.to_t().abs() < 1e-28);
        // Γ(11) = 10!
        let g = log_gamma_dd(c(11.0, 0.0)).unwrap().exp();
        assert!((g.re - Dd::from_t(3_628_800.0)).to_t().abs() < 1e-23);
    }
}
